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

#include "irsmse/transceiver.hpp"
#include "irsmse/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace irsmse
{
    DesignContext make_design_context(const CsiEstimate &csi, const SystemConfig &config, bool robust)
    {
        DesignContext ctx;
        ctx.num_users = csi.num_users;
        ctx.num_subcarriers = csi.num_subcarriers;
        ctx.num_tx = config.num_tx_antennas;
        ctx.irs_order = csi.num_irs + 1;
        ctx.robust_scale = robust ? csi.error_scale : 0.0;
        ctx.power_per_subcarrier = config.power_per_subcarrier();
        ctx.noise = &csi.noise;
        ctx.config = &config;
        return ctx;
    }

    DesignContext make_truth_context(const ChannelSet &channels, const SystemConfig &config, const NoiseModel &noise)
    {
        DesignContext ctx;
        ctx.num_users = channels.num_users;
        ctx.num_subcarriers = channels.num_subcarriers;
        ctx.num_tx = config.num_tx_antennas;
        ctx.irs_order = channels.num_irs + 1;
        ctx.robust_scale = 0.0;
        ctx.power_per_subcarrier = config.power_per_subcarrier();
        ctx.noise = &noise;
        ctx.config = &config;
        return ctx;
    }

    BlockSet equivalent_channels(const CsiEstimate &csi, const IrsPhases &nu)
    {
        BlockSet He;
        He.reserve(csi.direct.size());
        for (int l = 0; l < csi.num_subcarriers; ++l)
            for (int k = 0; k < csi.num_users; ++k)
                He.push_back(csi.equivalent(k, l, nu));
        return He;
    }

    BlockSet equivalent_channels(const ChannelSet &channels, const IrsPhases &nu)
    {
        BlockSet He;
        He.reserve(channels.direct.size());
        for (int l = 0; l < channels.num_subcarriers; ++l)
            for (int k = 0; k < channels.num_users; ++k)
                He.push_back(channels.equivalent(k, l, nu));
        return He;
    }

    namespace
    {
        double power_on_subcarrier(int l, const BlockSet &X, const DesignContext &ctx)
        {
            double p = 0.0;
            for (int k = 0; k < ctx.num_users; ++k)
                p += X[ctx.index(k, l)].squaredNorm();
            return p;
        }
    }

    // ----- Downlink ----------------------------------------------------------

    CMatrix interference_plus_noise_cov(int k, int l, const BlockSet &P, const BlockSet &He, const DesignContext &ctx)
    {
        const CMatrix &H = He[ctx.index(k, l)];
        const CMatrix &C = ctx.noise->covariance(k);
        CMatrix out = C;
        for (int i = 0; i < ctx.num_users; ++i)
        {
            if (i == k)
                continue;
            const CMatrix HP = H * P[ctx.index(i, l)];
            out.noalias() += HP * HP.adjoint();
        }
        if (ctx.robust_scale > 0.0)
            out += (ctx.irs_order * ctx.robust_scale * power_on_subcarrier(l, P, ctx)) * C;
        return linalg::hermitian_part(out);
    }

    CMatrix mmse_downlink_filter(int k, int l, const BlockSet &P, const BlockSet &He, const DesignContext &ctx)
    {
        const CMatrix &H = He[ctx.index(k, l)];
        const CMatrix HP = H * P[ctx.index(k, l)];
        CMatrix R = interference_plus_noise_cov(k, l, P, He, ctx);
        R.noalias() += HP * HP.adjoint();
        // W = (HP)^* R^{-1} = (R^{-1} HP)^* since R is Hermitian
        return linalg::hpd_solve(R, HP).adjoint();
    }

    BlockSet mmse_downlink_filters(const BlockSet &P, const BlockSet &He, const DesignContext &ctx)
    {
        BlockSet W(P.size());
        for (int l = 0; l < ctx.num_subcarriers; ++l)
            for (int k = 0; k < ctx.num_users; ++k)
                W[ctx.index(k, l)] = mmse_downlink_filter(k, l, P, He, ctx);
        return W;
    }

    double downlink_mse(int k, int l, const BlockSet &P, const CMatrix &W, const BlockSet &He, const IrsPhases &nu,
                        const DesignContext &ctx)
    {
        const CMatrix &H = He[ctx.index(k, l)];
        const CMatrix &C = ctx.noise->covariance(k);
        const CMatrix WH = W * H;
        const CMatrix E = WH * P[ctx.index(k, l)] - CMatrix::Identity(W.rows(), W.rows());
        double mse = E.squaredNorm();
        for (int i = 0; i < ctx.num_users; ++i)
            if (i != k)
                mse += (WH * P[ctx.index(i, l)]).squaredNorm();
        const double wcw = (W * C * W.adjoint()).trace().real();
        mse += wcw;
        if (ctx.robust_scale > 0.0)
        {
            const double scale = ctx.robust_scale * power_on_subcarrier(l, P, ctx) * wcw;
            mse += scale;                              // direct-link error
            mse += scale * nu.values.squaredNorm();    // nu^* diag(scale) nu, cascaded errors
        }
        return mse;
    }

    double downlink_mse_mmse(int k, int l, const BlockSet &P, const BlockSet &He, const DesignContext &ctx)
    {
        const CMatrix HP = He[ctx.index(k, l)] * P[ctx.index(k, l)];
        const CMatrix C_in = interference_plus_noise_cov(k, l, P, He, ctx);
        CMatrix A = HP.adjoint() * linalg::hpd_solve(C_in, HP);
        A += CMatrix::Identity(A.rows(), A.cols());
        return linalg::hpd_trace_inverse(linalg::hermitian_part(A));
    }

    double downlink_sum_mse(int l, const BlockSet &P, const BlockSet &W, const BlockSet &He, const IrsPhases &nu,
                            const DesignContext &ctx)
    {
        double acc = 0.0;
        for (int k = 0; k < ctx.num_users; ++k)
            acc += downlink_mse(k, l, P, W[ctx.index(k, l)], He, nu, ctx);
        return acc;
    }

    // ----- Dual uplink -------------------------------------------------------

    UplinkTerms uplink_terms(int l, const BlockSet &T, const BlockSet &He, const DesignContext &ctx)
    {
        UplinkTerms u;
        u.offsets.assign(static_cast<std::size_t>(ctx.num_users) + 1, 0);
        for (int k = 0; k < ctx.num_users; ++k)
            u.offsets[k + 1] = u.offsets[k] + static_cast<int>(T[ctx.index(k, l)].cols());
        const int S = u.offsets.back();
        const Eigen::Index Nr = T[ctx.index(0, l)].rows();

        u.A.resize(Nr, S);
        u.M.resize(ctx.num_tx, S);
        double t_power = 0.0;
        for (int k = 0; k < ctx.num_users; ++k)
        {
            const CMatrix &Tk = T[ctx.index(k, l)];
            const int s_k = static_cast<int>(Tk.cols());
            u.A.middleCols(u.offsets[k], s_k) = ctx.noise->inv_sqrt(k) * Tk;
            u.M.middleCols(u.offsets[k], s_k) = He[ctx.index(k, l)].adjoint() * u.A.middleCols(u.offsets[k], s_k);
            t_power += Tk.squaredNorm();
        }
        u.alpha = 1.0 + ctx.irs_order * ctx.robust_scale * t_power;
        u.B = CMatrix::Identity(S, S);
        u.B.noalias() += (u.M.adjoint() * u.M) / u.alpha;
        u.B = linalg::hermitian_part(u.B);
        return u;
    }

    BlockSet mmse_uplink_filters(int l, const BlockSet &T, const BlockSet &He, const DesignContext &ctx)
    {
        const UplinkTerms u = uplink_terms(l, T, He, ctx);
        const CMatrix G = linalg::hpd_solve(u.B, CMatrix(u.M.adjoint())) / u.alpha;
        BlockSet out(static_cast<std::size_t>(ctx.num_users));
        for (int k = 0; k < ctx.num_users; ++k)
            out[k] = G.middleRows(u.offsets[k], u.offsets[k + 1] - u.offsets[k]);
        return out;
    }

    void mmse_uplink_filters_all(BlockSet &G, const BlockSet &T, const BlockSet &He, const DesignContext &ctx)
    {
        G.resize(T.size());
        for (int l = 0; l < ctx.num_subcarriers; ++l)
        {
            BlockSet g = mmse_uplink_filters(l, T, He, ctx);
            for (int k = 0; k < ctx.num_users; ++k)
                G[ctx.index(k, l)] = std::move(g[k]);
        }
    }

    double uplink_mse(int l, const BlockSet &T, const BlockSet &He, const DesignContext &ctx)
    {
        return linalg::hpd_trace_inverse(uplink_terms(l, T, He, ctx).B);
    }

    std::vector<double> uplink_mse_per_user(int l, const BlockSet &T, const BlockSet &He, const DesignContext &ctx)
    {
        const UplinkTerms u = uplink_terms(l, T, He, ctx);
        const CMatrix Binv = linalg::hpd_solve(u.B, CMatrix::Identity(u.B.rows(), u.B.cols()));
        std::vector<double> out(static_cast<std::size_t>(ctx.num_users));
        for (int k = 0; k < ctx.num_users; ++k)
        {
            const int s_k = u.offsets[k + 1] - u.offsets[k];
            out[k] = Binv.block(u.offsets[k], u.offsets[k], s_k, s_k).trace().real();
        }
        return out;
    }

    double uplink_mse_total(const BlockSet &T, const BlockSet &He, const DesignContext &ctx)
    {
        double acc = 0.0;
        for (int l = 0; l < ctx.num_subcarriers; ++l)
            acc += uplink_mse(l, T, He, ctx);
        return acc;
    }

    // ----- Duality -----------------------------------------------------------

    double mac_to_bc(int l, const BlockSet &G, double power, BlockSet &P, const DesignContext &ctx)
    {
        const double norm = power_on_subcarrier(l, G, ctx);
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw DegenerateStateError("MAC-to-BC transform: uplink filters vanish on subcarrier " + std::to_string(l));
        const double xi = std::sqrt(power / norm);
        P.resize(G.size());
        for (int k = 0; k < ctx.num_users; ++k)
            P[ctx.index(k, l)] = xi * G[ctx.index(k, l)].adjoint();
        return xi;
    }

    double bc_to_mac(int l, const BlockSet &W, double power, const NoiseModel &noise, BlockSet &T, const DesignContext &ctx)
    {
        const double norm = power_on_subcarrier(l, W, ctx);
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw DegenerateStateError("BC-to-MAC transform: downlink filters vanish on subcarrier " + std::to_string(l));
        const double zeta = std::sqrt(power / norm);
        T.resize(W.size());
        for (int k = 0; k < ctx.num_users; ++k)
            T[ctx.index(k, l)] = zeta * noise.inv_sqrt(k).adjoint() * W[ctx.index(k, l)].adjoint();
        return zeta;
    }

    // ----- Initialization and metrics ----------------------------------------

    BlockSet mrt_precoders(const BlockSet &He, const DesignContext &ctx, int *rank_deficient)
    {
        BlockSet P(He.size());
        const double total = ctx.power_per_subcarrier * ctx.num_subcarriers;
        for (int l = 0; l < ctx.num_subcarriers; ++l)
            for (int k = 0; k < ctx.num_users; ++k)
            {
                const CMatrix &H = He[ctx.index(k, l)];
                const int s_k = ctx.streams(k, l);
                Eigen::JacobiSVD<CMatrix> svd(H, Eigen::ComputeFullV);
                const Eigen::VectorXd &sv = svd.singularValues();
                const double tol = (sv.size() > 0 ? sv(0) : 0.0) * std::max(H.rows(), H.cols()) *
                                   std::numeric_limits<double>::epsilon();
                const double amp = std::sqrt(total / (static_cast<double>(ctx.num_users) * ctx.num_subcarriers * s_k));

                CMatrix Pk = svd.matrixV().leftCols(s_k);
                for (int c = 0; c < s_k; ++c)
                {
                    auto col = Pk.col(c);
                    for (Eigen::Index r = 0; r < col.size(); ++r)
                        if (std::abs(col(r)) > 1e-14)
                        {
                            col *= std::conj(col(r)) / std::abs(col(r));
                            break;
                        }
                    const bool live = c < sv.size() && sv(c) > tol;
                    col *= live ? amp : 0.0;
                    if (!live && rank_deficient)
                        ++*rank_deficient;
                }
                P[ctx.index(k, l)] = std::move(Pk);
            }
        return P;
    }

    double sum_rate(const ChannelSet &channels, const BlockSet &P, const BlockSet &W, const IrsPhases &nu,
                    const NoiseModel &noise, int *regularized)
    {
        const int K = channels.num_users;
        double rate = 0.0;
        for (int l = 0; l < channels.num_subcarriers; ++l)
            for (int k = 0; k < K; ++k)
            {
                const std::size_t idx = static_cast<std::size_t>(l) * K + k;
                const CMatrix WH = W[idx] * channels.equivalent(k, l, nu);
                CMatrix X = W[idx] * noise.covariance(k) * W[idx].adjoint();
                for (int i = 0; i < K; ++i)
                {
                    if (i == k)
                        continue;
                    const CMatrix F = WH * P[static_cast<std::size_t>(l) * K + i];
                    X.noalias() += F * F.adjoint();
                }
                X = linalg::hermitian_part(X);
                const CMatrix F = WH * P[idx];
                CMatrix S = F * F.adjoint();

                Eigen::SelfAdjointEigenSolver<CMatrix> es(X, Eigen::EigenvaluesOnly);
                const double lo = es.eigenvalues().size() ? es.eigenvalues().minCoeff() : 1.0;
                const double hi = es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : 1.0;
                if (!(lo > 1e-12 * std::max(1.0, hi)))
                {
                    X += 1e-12 * CMatrix::Identity(X.rows(), X.cols());
                    if (regularized)
                        ++*regularized;
                }
                const double r = linalg::hpd_log2_det(linalg::hermitian_part(X + S)) - linalg::hpd_log2_det(X);
                rate += std::max(r, 0.0);
            }
        return rate;
    }

    double true_sum_mse(const ChannelSet &channels, const BlockSet &P, const BlockSet &W, const IrsPhases &nu,
                        const SystemConfig &config, const NoiseModel &noise)
    {
        const DesignContext ctx = make_truth_context(channels, config, noise);
        const BlockSet He = equivalent_channels(channels, nu);
        double acc = 0.0;
        for (int l = 0; l < ctx.num_subcarriers; ++l)
            acc += downlink_sum_mse(l, P, W, He, nu, ctx);
        return acc;
    }

    double max_power_ratio(const BlockSet &P, const DesignContext &ctx)
    {
        double worst = 0.0;
        for (int l = 0; l < ctx.num_subcarriers; ++l)
            worst = std::max(worst, power_on_subcarrier(l, P, ctx) / ctx.power_per_subcarrier);
        return worst;
    }
}
