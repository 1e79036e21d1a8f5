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

#ifndef IRSMSE_TRANSCEIVER_HPP
#define IRSMSE_TRANSCEIVER_HPP

#include "irsmse/core_model.hpp"
#include "irsmse/csi.hpp"

namespace irsmse
{
    /// Per-(user, subcarrier) matrices stored at l * K + k.
    using BlockSet = std::vector<CMatrix>;

    /// Everything the closed-form transceiver math needs besides the channels and filters.
    ///
    /// `robust_scale` is the error scale s entering every robust term; it is L / P_T for the
    /// robust design and 0 for perfect CSI or the non-robust design. `irs_order` is N + 1.
    struct DesignContext
    {
        int num_users = 0;
        int num_subcarriers = 0;
        int num_tx = 0;
        int irs_order = 1;
        double robust_scale = 0.0;
        double power_per_subcarrier = 0.0;
        const NoiseModel *noise = nullptr;
        const SystemConfig *config = nullptr;

        int streams(int k, int l) const { return config->streams(k, l); }
        std::size_t index(int k, int l) const { return static_cast<std::size_t>(l) * num_users + k; }
    };

    /// Context for a design on `csi`; `robust` keeps the estimation-error terms.
    DesignContext make_design_context(const CsiEstimate &csi, const SystemConfig &config, bool robust);

    /// Context for evaluating on true channels (no error terms).
    DesignContext make_truth_context(const ChannelSet &channels, const SystemConfig &config, const NoiseModel &noise);

    /// H^_e,k[l] for all (k, l).
    BlockSet equivalent_channels(const CsiEstimate &csi, const IrsPhases &nu);
    BlockSet equivalent_channels(const ChannelSet &channels, const IrsPhases &nu);

    struct TransceiverState
    {
        BlockSet P; // downlink precoders  N_t x N_s
        BlockSet W; // downlink filters    N_s x N_r
        BlockSet T; // dual-MAC precoders  N_r x N_s
        BlockSet G; // dual-MAC filters    N_s x N_t
        std::vector<double> xi;
        std::vector<double> zeta;
        IrsPhases nu;
    };

    // ----- Downlink ----------------------------------------------------------

    /// sum_{i != k} H P_i P_i^* H^* + C_eta,k + (N + 1) s sum_i tr(P_i P_i^*) C_eta,k.
    CMatrix interference_plus_noise_cov(int k, int l, const BlockSet &P, const BlockSet &He, const DesignContext &ctx);

    /// W = P_k^* H^* (H P_k P_k^* H^* + C_IN,k)^{-1}.
    CMatrix mmse_downlink_filter(int k, int l, const BlockSet &P, const BlockSet &He, const DesignContext &ctx);

    /// MMSE filters for every (k, l).
    BlockSet mmse_downlink_filters(const BlockSet &P, const BlockSet &He, const DesignContext &ctx);

    /// Full robust expansion of E||s_k - s^_k||^2 for an arbitrary filter W. The cascaded error
    /// term carries nu^* (s tr(sum P P^*) tr(W C W^*) I) nu, i.e. the factor 1 + ||nu||^2.
    double downlink_mse(int k, int l, const BlockSet &P, const CMatrix &W, const BlockSet &He, const IrsPhases &nu,
                        const DesignContext &ctx);

    /// Closed form at the MMSE filter: tr (I + P_k^* H^* C_IN,k^{-1} H P_k)^{-1}.
    double downlink_mse_mmse(int k, int l, const BlockSet &P, const BlockSet &He, const DesignContext &ctx);

    /// Sum over users of downlink_mse() on subcarrier l.
    double downlink_sum_mse(int l, const BlockSet &P, const BlockSet &W, const BlockSet &He, const IrsPhases &nu,
                            const DesignContext &ctx);

    // ----- Dual uplink -------------------------------------------------------

    /// Quantities shared by the uplink filter, MSE and gradient on one subcarrier.
    ///
    /// A_k = C_k^{-1/2} T_k, M = [H_1^* A_1, ..., H_K^* A_K] (N_t x S),
    /// alpha = 1 + (N + 1) s ||T[l]||_F^2, B = I + M^* M / alpha.
    struct UplinkTerms
    {
        CMatrix M;
        CMatrix A; // [A_1, ..., A_K], N_r x S
        CMatrix B;
        double alpha = 1.0;
        std::vector<int> offsets; // first stream column of each user, size K + 1
    };

    UplinkTerms uplink_terms(int l, const BlockSet &T, const BlockSet &He, const DesignContext &ctx);

    /// G_k rows of M^* (M M^* + alpha I)^{-1}, equal to B^{-1} M^* / alpha. One block per user, indexed by k.
    BlockSet mmse_uplink_filters(int l, const BlockSet &T, const BlockSet &He, const DesignContext &ctx);

    /// In-place MMSE uplink filters for every subcarrier.
    void mmse_uplink_filters_all(BlockSet &G, const BlockSet &T, const BlockSet &He, const DesignContext &ctx);

    /// tr B^{-1} on subcarrier l.
    double uplink_mse(int l, const BlockSet &T, const BlockSet &He, const DesignContext &ctx);

    /// Per-user blocks of B^{-1} (their traces sum to uplink_mse()).
    std::vector<double> uplink_mse_per_user(int l, const BlockSet &T, const BlockSet &He, const DesignContext &ctx);

    /// Sum of uplink_mse() over subcarriers.
    double uplink_mse_total(const BlockSet &T, const BlockSet &He, const DesignContext &ctx);

    // ----- Duality -----------------------------------------------------------

    /// P_k[l] = xi G_k^*[l], xi = sqrt(P_T[l] / sum_k ||G_k[l]||_F^2). Writes into P; returns xi.
    double mac_to_bc(int l, const BlockSet &G, double power, BlockSet &P, const DesignContext &ctx);

    /// T_k[l] = zeta C_k^{-1/2,*} W_k^*[l], zeta = sqrt(P_T[l] / sum_k ||W_k[l]||_F^2). Writes into T; returns zeta.
    double bc_to_mac(int l, const BlockSet &W, double power, const NoiseModel &noise, BlockSet &T, const DesignContext &ctx);

    // ----- Initialization and metrics ----------------------------------------

    /// Leading right singular vectors of each H^_e,k[l], every column carrying P_T / (K L N_s).
    /// Columns beyond the numerical rank are zero-power complement directions; their number is
    /// added to `rank_deficient` when given.
    BlockSet mrt_precoders(const BlockSet &He, const DesignContext &ctx, int *rank_deficient = nullptr);

    /// sum_l sum_k log2 det(I + X_k^{-1} W H P_k P_k^* H^* W^*) with X_k the filtered
    /// interference plus noise. Singular X_k is regularized by 1e-12 I and counted in `regularized`.
    double sum_rate(const ChannelSet &channels, const BlockSet &P, const BlockSet &W, const IrsPhases &nu,
                    const NoiseModel &noise, int *regularized = nullptr);

    /// Sum over users and subcarriers of the downlink MSE on true channels.
    double true_sum_mse(const ChannelSet &channels, const BlockSet &P, const BlockSet &W, const IrsPhases &nu,
                        const SystemConfig &config, const NoiseModel &noise);

    /// Largest per-subcarrier ratio sum_k tr(P_k P_k^*) / P_T[l].
    double max_power_ratio(const BlockSet &P, const DesignContext &ctx);
}

#endif
