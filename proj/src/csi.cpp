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

#include "irsmse/csi.hpp"
#include "irsmse/linalg.hpp"

#include <cmath>

namespace irsmse
{
    CMatrix CsiEstimate::equivalent(int k, int l, const IrsPhases &nu) const
    {
        CMatrix out = H_B(k, l);
        for (int n = 0; n < num_irs; ++n)
            out += nu[n] * H_c(k, l, n);
        return out;
    }

    CsiEstimate CsiEstimate::without_irs() const
    {
        CsiEstimate out;
        out.num_users = num_users;
        out.num_subcarriers = num_subcarriers;
        out.num_irs = 0;
        out.direct = direct;
        out.error_scale = error_scale;
        out.noise = noise;
        return out;
    }

    CMatrix ErrorCovariance::matrix(int k) const
    {
        return scale * linalg::kron(CMatrix::Identity(num_tx, num_tx), noise_cov[k]);
    }

    PilotPlan build_pilot_plan(const SystemConfig &config)
    {
        PilotPlan plan;
        const CMatrix U = linalg::unitary_dft(config.num_tx_antennas);
        const double amp = std::sqrt(config.power_per_subcarrier());
        plan.pilots.assign(static_cast<std::size_t>(config.num_subcarriers), amp * U);
        const int order = config.num_irs_elements + 1;
        plan.allocations = std::sqrt(static_cast<double>(order)) * linalg::unitary_dft(order);
        return plan;
    }

    CsiEstimate perfect_csi(const ChannelSet &channels, const NoiseModel &noise)
    {
        CsiEstimate est;
        est.num_users = channels.num_users;
        est.num_subcarriers = channels.num_subcarriers;
        est.num_irs = channels.num_irs;
        est.direct = channels.direct;
        est.error_scale = 0.0;
        est.noise = noise;
        est.cascaded.reserve(channels.irs_user.size() * static_cast<std::size_t>(channels.num_irs));
        for (int l = 0; l < channels.num_subcarriers; ++l)
            for (int k = 0; k < channels.num_users; ++k)
                for (int n = 0; n < channels.num_irs; ++n)
                    est.cascaded.push_back(channels.cascaded_term(k, l, n));
        return est;
    }

    namespace
    {
        // Returns c such that A^* A = c I (or A A^* = c I when `rows` is true); throws otherwise.
        double orthogonal_scale(const CMatrix &A, bool rows)
        {
            const CMatrix gram = rows ? CMatrix(A * A.adjoint()) : CMatrix(A.adjoint() * A);
            const double c = gram(0, 0).real();
            if (!(c > 0.0) || (gram - c * CMatrix::Identity(gram.rows(), gram.cols())).norm() > 1e-9 * c * gram.rows())
                throw ConfigError("pilot plan matrices are singular or not scaled-unitary");
            return c;
        }
    }

    CsiEstimate ls_estimate_full(const ChannelSet &channels, const PilotPlan &plan, const SystemConfig &config,
                                 const NoiseModel &noise, std::mt19937_64 &rng, bool add_noise)
    {
        const int K = channels.num_users;
        const int L = channels.num_subcarriers;
        const int N = channels.num_irs;
        const int Nr = config.num_rx_antennas;
        const int Nt = config.num_tx_antennas;
        const int Nnu = N + 1;
        if (plan.allocations.rows() != Nnu || static_cast<int>(plan.pilots.size()) != L)
            throw ConfigError("pilot plan does not match the scenario dimensions");

        const CMatrix &V = plan.allocations;
        const CMatrix V_pinv = V.adjoint() / orthogonal_scale(V, true);
        const double split = std::sqrt(static_cast<double>(Nnu));
        const CMatrix I_r = CMatrix::Identity(Nr, Nr);

        CsiEstimate est;
        est.num_users = K;
        est.num_subcarriers = L;
        est.num_irs = N;
        est.error_scale = config.error_scale();
        est.noise = noise;
        est.direct.resize(static_cast<std::size_t>(K) * L);
        est.cascaded.resize(static_cast<std::size_t>(K) * L * N);

        for (int l = 0; l < L; ++l)
        {
            const CMatrix &X = plan.pilots[l];
            const CMatrix A = linalg::kron(X, I_r);
            const CMatrix A_pinv = linalg::kron(X.adjoint() / orthogonal_scale(X, false), I_r);
            const int Np = static_cast<int>(X.rows());
            for (int k = 0; k < K; ++k)
            {
                // Stacked unknowns [vec(H_B), vec(h_I,1 h_BI,1^T), ...], N_r N_t x (N + 1).
                CMatrix H(Nr * Nt, Nnu);
                H.col(0) = channels.H_B(k, l).reshaped();
                for (int n = 0; n < N; ++n)
                    H.col(n + 1) = channels.cascaded_term(k, l, n).reshaped();

                CMatrix Y = (A * H * V) / split;
                if (add_noise)
                {
                    for (int j = 0; j < Nnu; ++j)
                    {
                        const CMatrix Z = noise.sqrt(k) * complex_gaussian(Nr, Np, rng);
                        Y.col(j) += Z.reshaped();
                    }
                }
                const CMatrix H_ls = split * (A_pinv * Y * V_pinv);

                est.direct[static_cast<std::size_t>(l) * K + k] = H_ls.col(0).reshaped(Nr, Nt);
                for (int n = 0; n < N; ++n)
                    est.cascaded[(static_cast<std::size_t>(l) * K + k) * N + n] = H_ls.col(n + 1).reshaped(Nr, Nt);
            }
        }
        return est;
    }

    ErrorCovariance ls_error_covariance(const SystemConfig &config, const NoiseModel &noise)
    {
        ErrorCovariance cov;
        cov.scale = config.error_scale();
        cov.num_tx = config.num_tx_antennas;
        for (int k = 0; k < noise.num_users(); ++k)
            cov.noise_cov.push_back(noise.covariance(k));
        return cov;
    }

    CsiEstimate sample_csi_statistical(const ChannelSet &channels, const SystemConfig &config,
                                       const NoiseModel &noise, std::mt19937_64 &rng)
    {
        CsiEstimate est = perfect_csi(channels, noise);
        if (config.csi_mode == CsiMode::perfect)
            return est;

        const int K = channels.num_users;
        const int N = channels.num_irs;
        const double amp = std::sqrt(config.error_scale());
        est.error_scale = config.error_scale();
        for (int l = 0; l < channels.num_subcarriers; ++l)
            for (int k = 0; k < K; ++k)
            {
                const CMatrix &S = noise.sqrt(k);
                CMatrix &hb = est.direct[static_cast<std::size_t>(l) * K + k];
                hb += amp * S * complex_gaussian(hb.rows(), hb.cols(), rng);
                for (int n = 0; n < N; ++n)
                {
                    CMatrix &hc = est.cascaded[(static_cast<std::size_t>(l) * K + k) * N + n];
                    hc += amp * S * complex_gaussian(hc.rows(), hc.cols(), rng);
                }
            }
        return est;
    }
}
