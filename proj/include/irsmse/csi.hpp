// SPDX-License-Identifier: Apache-2.0
//
// irsmse: robust MSE transceiver design for wideband IRS-aided multiuser MIMO
// Copyright (C) 2026 The irsmse authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef IRSMSE_CSI_HPP
#define IRSMSE_CSI_HPP

#include "irsmse/core_model.hpp"

#include <random>

namespace irsmse
{
    /// Training design: pilots X[l] (N_p = N_t) and IRS phase allocations V ((N+1) x (N+1)).
    struct PilotPlan
    {
        std::vector<CMatrix> pilots; // X[l]
        CMatrix allocations;         // V; column j is nu'_j = [1, nu_j^T]^T
    };

    /// Estimated direct and per-element cascaded channels seen by the designer.
    struct CsiEstimate
    {
        int num_users = 0;
        int num_subcarriers = 0;
        int num_irs = 0;
        std::vector<CMatrix> direct;   // H^_B,k[l] at l * K + k
        std::vector<CMatrix> cascaded; // H^_c,k,n[l] at (l * K + k) * N + n
        double error_scale = 0.0;      // L / P_T for estimated CSI, 0 for perfect CSI
        NoiseModel noise;

        const CMatrix &H_B(int k, int l) const { return direct[static_cast<std::size_t>(l) * num_users + k]; }
        const CMatrix &H_c(int k, int l, int n) const
        {
            return cascaded[(static_cast<std::size_t>(l) * num_users + k) * num_irs + n];
        }
        std::span<const CMatrix> cascaded_terms(int k, int l) const
        {
            return {cascaded.data() + (static_cast<std::size_t>(l) * num_users + k) * num_irs,
                    static_cast<std::size_t>(num_irs)};
        }

        /// H^_B,k[l] + sum_n nu_n H^_c,k,n[l].
        CMatrix equivalent(int k, int l, const IrsPhases &nu) const;

        /// Direct links only (N = 0).
        CsiEstimate without_irs() const;
    };

    /// Error covariance of the LS estimate: (L / P_T) I_{N_t} (x) C_eta,k per user.
    struct ErrorCovariance
    {
        double scale = 0.0;
        int num_tx = 0;
        std::vector<CMatrix> noise_cov;

        CMatrix matrix(int k) const;
    };

    PilotPlan build_pilot_plan(const SystemConfig &config);

    /// Truth as seen by a genie: H^_B = H_B, H^_c,k,n = h_I,k,n h_BI,n^T, error_scale 0.
    CsiEstimate perfect_csi(const ChannelSet &channels, const NoiseModel &noise);

    /// Simulates the pilot phase and applies the LS estimator.
    ///
    /// Per (k, l), Y = (X (x) I) H_k V / sqrt(N + 1) + N_k with noise columns CN(0, I (x) C_eta,k),
    /// and H^ = sqrt(N + 1) (X (x) I)^+ Y V^+. The 1/sqrt(N + 1) splits the per-subcarrier training
    /// energy across the N + 1 phase allocations, which gives every estimated column the error
    /// covariance (L / P_T) I (x) C_eta,k. Pseudoinverses are scaled adjoints.
    CsiEstimate ls_estimate_full(const ChannelSet &channels, const PilotPlan &plan, const SystemConfig &config,
                                 const NoiseModel &noise, std::mt19937_64 &rng, bool add_noise = true);

    ErrorCovariance ls_error_covariance(const SystemConfig &config, const NoiseModel &noise);

    /// Draws H^ = H + E with the columns of every E i.i.d. CN(0, (L / P_T) C_eta,k).
    /// Perfect mode returns perfect_csi().
    CsiEstimate sample_csi_statistical(const ChannelSet &channels, const SystemConfig &config,
                                       const NoiseModel &noise, std::mt19937_64 &rng);
}

#endif
