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

#include "irsmse/optimizer.hpp"
#include "irsmse/linalg.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>

namespace irsmse
{
    PgSettings PgSettings::from_config(const SystemConfig &config)
    {
        PgSettings s;
        s.initial_step = config.pg_initial_step;
        s.tolerance = config.tolerance();
        s.max_iterations = config.max_iterations;
        s.max_halvings = config.max_halvings;
        s.reset_step = config.reset_step_each_iteration;
        s.literal_reference = config.pg_compare_previous_iterate;
        return s;
    }

    void PgSettings::validate() const
    {
        if (!(initial_step > 0.0))
            throw ConfigError("PG initial step must be positive");
        if (!(tolerance > 0.0))
            throw ConfigError("MSE tolerance must be positive");
        if (max_iterations < 1)
            throw ConfigError("max_iterations must be at least 1");
        if (max_halvings < 1)
            throw ConfigError("max_halvings must be positive");
    }

    // ----- Gradient and objective --------------------------------------------

    CVector mse_gradient_nu(const BlockSet &T, const IrsPhases &nu, const CsiEstimate &csi, const DesignContext &ctx)
    {
        const int N = csi.num_irs;
        CVector g = CVector::Zero(N);
        if (N == 0)
            return g;
        const BlockSet He = equivalent_channels(csi, nu);
        for (int l = 0; l < ctx.num_subcarriers; ++l)
        {
            const UplinkTerms u = uplink_terms(l, T, He, ctx);
            const CMatrix Binv = linalg::hpd_solve(u.B, CMatrix::Identity(u.B.rows(), u.B.cols()));
            const CMatrix Q = u.M * (Binv * Binv);
            for (int k = 0; k < ctx.num_users; ++k)
            {
                const int s_k = u.offsets[k + 1] - u.offsets[k];
                // R_k = Q_k A_k^*, N_t x N_r; tr(H_c R_k) = sum(H_c .* R_k^T)
                const CMatrix Rt = (Q.middleCols(u.offsets[k], s_k) * u.A.middleCols(u.offsets[k], s_k).adjoint()).transpose();
                for (int n = 0; n < N; ++n)
                    g(n) -= csi.H_c(k, l, n).cwiseProduct(Rt).sum() / u.alpha;
            }
        }
        return g;
    }

    double uplink_objective(const BlockSet &T, const IrsPhases &nu, const CsiEstimate &csi, const DesignContext &ctx)
    {
        return uplink_mse_total(T, equivalent_channels(csi, nu), ctx);
    }

    // ----- Feasible sets -----------------------------------------------------

    IrsPhases project_unit_modulus(const CVector &raw)
    {
        CVector out(raw.size());
        for (Eigen::Index n = 0; n < raw.size(); ++n)
        {
            const double mag = std::abs(raw(n));
            out(n) = mag < 1e-300 ? cplx(1.0, 0.0) : raw(n) / mag;
        }
        return IrsPhases(std::move(out));
    }

    IrsPhases af_normalize(const CVector &raw, int N)
    {
        const double norm = raw.norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw DegenerateStateError("AF normalization of a zero IRS vector");
        return IrsPhases(CVector(raw * (std::sqrt(static_cast<double>(N)) / norm)));
    }

    IrsPhases random_phases(int N, std::mt19937_64 &rng)
    {
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        Eigen::VectorXd theta(N);
        for (int n = 0; n < N; ++n)
            theta(n) = angle(rng);
        return IrsPhases::from_angles(theta);
    }

    IrsPhases quantize_phases(const IrsPhases &nu, int bits)
    {
        if (bits < 1)
            throw ConfigError("quantization bits must be at least 1");
        const long levels = 1L << bits;
        const double delta = 2.0 * std::numbers::pi / static_cast<double>(levels);
        Eigen::VectorXd theta(nu.size());
        for (Eigen::Index n = 0; n < nu.size(); ++n)
        {
            double t = std::arg(nu[n]);
            if (t < 0.0)
                t += 2.0 * std::numbers::pi;
            const double x = t / delta;
            const double frac = x - std::floor(x);
            long m = std::abs(frac - 0.5) < 1e-12 ? static_cast<long>(std::floor(x)) : std::lround(x);
            m %= levels;
            theta(n) = static_cast<double>(m) * delta;
        }
        return IrsPhases::from_angles(theta);
    }

    namespace
    {
        IrsPhases apply_constraint(const CVector &raw, PhaseConstraint constraint)
        {
            if (constraint == PhaseConstraint::frobenius)
                return af_normalize(raw, static_cast<int>(raw.size()));
            return project_unit_modulus(raw);
        }
    }

    PgStep pg_update(const IrsPhases &nu, const BlockSet &T, const CsiEstimate &csi, const DesignContext &ctx,
                     double step, const PgSettings &settings, PhaseConstraint constraint, double reference)
    {
        PgStep out;
        out.nu = nu;
        out.step = step;
        const double f0 = uplink_objective(T, nu, csi, ctx);
        out.mse = f0;
        if (nu.size() == 0)
            return out;
        const CVector g = mse_gradient_nu(T, nu, csi, ctx);
        if (g.squaredNorm() == 0.0)
            return out;

        const CVector dir = g.conjugate();
        double mu = step;
        IrsPhases cand = apply_constraint(nu.values - mu * dir, constraint);
        double f = uplink_objective(T, cand, csi, ctx);
        const double bar = std::isnan(reference) ? f0 : reference;
        int halvings = 0;
        while (!(f <= bar) && halvings < settings.max_halvings)
        {
            mu *= 0.5;
            ++halvings;
            cand = apply_constraint(nu.values - mu * dir, constraint);
            f = uplink_objective(T, cand, csi, ctx);
        }
        out.step = mu;
        out.halvings = halvings;
        if (f <= bar)
        {
            out.nu = std::move(cand);
            out.mse = f;
            out.accepted = true;
        }
        return out;
    }

    // ----- Outer loops -------------------------------------------------------

    namespace
    {
        using Clock = std::chrono::steady_clock;

        void mac_to_bc_all(TransceiverState &st, const DesignContext &ctx)
        {
            st.xi.resize(static_cast<std::size_t>(ctx.num_subcarriers));
            for (int l = 0; l < ctx.num_subcarriers; ++l)
                st.xi[l] = mac_to_bc(l, st.G, ctx.power_per_subcarrier, st.P, ctx);
        }

        void bc_to_mac_all(TransceiverState &st, const DesignContext &ctx)
        {
            st.zeta.resize(static_cast<std::size_t>(ctx.num_subcarriers));
            for (int l = 0; l < ctx.num_subcarriers; ++l)
                st.zeta[l] = bc_to_mac(l, st.W, ctx.power_per_subcarrier, *ctx.noise, st.T, ctx);
        }

        DesignResult duality_sweeps(const CsiEstimate &csi, const SystemConfig &config, const PgSettings &settings,
                                    const IrsPhases &nu0, bool robust, bool optimize_nu, PhaseConstraint constraint)
        {
            settings.validate();
            if (nu0.size() != csi.num_irs)
                throw ConfigError("initial IRS vector length does not match the CSI");
            const auto start = Clock::now();
            const DesignContext ctx = make_design_context(csi, config, robust);

            DesignResult res;
            TransceiverState &st = res.state;
            RunTrace &trace = res.trace;
            st.nu = nu0;
            BlockSet He = equivalent_channels(csi, st.nu);

            st.P = mrt_precoders(He, ctx);
            st.W = mmse_downlink_filters(st.P, He, ctx);
            bc_to_mac_all(st, ctx);
            mmse_uplink_filters_all(st.G, st.T, He, ctx);

            double mu = settings.initial_step;
            double prev = uplink_mse_total(st.T, He, ctx);
            trace.records.push_back({0, prev, mu, 0});

            for (int i = 1; i <= settings.max_iterations; ++i)
            {
                mac_to_bc_all(st, ctx);
                st.W = mmse_downlink_filters(st.P, He, ctx);
                bc_to_mac_all(st, ctx);

                int halvings = 0;
                if (optimize_nu && csi.num_irs > 0)
                {
                    if (settings.reset_step)
                        mu = settings.initial_step;
                    PgStep step = pg_update(st.nu, st.T, csi, ctx, mu, settings, constraint,
                                            settings.literal_reference ? prev : std::numeric_limits<double>::quiet_NaN());
                    mu = step.step;
                    halvings = step.halvings;
                    if (!step.accepted)
                        ++trace.exhausted_halvings;
                    st.nu = std::move(step.nu);
                    He = equivalent_channels(csi, st.nu);
                }
                mmse_uplink_filters_all(st.G, st.T, He, ctx);

                const double mse = uplink_mse_total(st.T, He, ctx);
                trace.records.push_back({i, mse, mu, halvings});
                trace.iterations = i;
                if (prev - mse < settings.tolerance)
                {
                    trace.converged = true;
                    break;
                }
                prev = mse;
            }

            mac_to_bc_all(st, ctx);
            st.W = mmse_downlink_filters(st.P, He, ctx);
            trace.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
            return res;
        }
    }

    DesignResult alternating_minimize(const CsiEstimate &csi, const SystemConfig &config, const PgSettings &settings,
                                      const IrsPhases &nu0, bool robust, PhaseConstraint constraint)
    {
        return duality_sweeps(csi, config, settings, nu0, robust, true, constraint);
    }

    DesignResult fixed_phase_design(const CsiEstimate &csi, const SystemConfig &config, const PgSettings &settings,
                                    const IrsPhases &nu, bool robust)
    {
        return duality_sweeps(csi, config, settings, nu, robust, false, PhaseConstraint::unit_modulus);
    }

    DesignResult mrt_phase_design(const CsiEstimate &csi, const SystemConfig &config, const PgSettings &settings,
                                  const IrsPhases &nu0, bool robust)
    {
        settings.validate();
        if (nu0.size() != csi.num_irs)
            throw ConfigError("initial IRS vector length does not match the CSI");
        const auto start = Clock::now();
        const DesignContext ctx = make_design_context(csi, config, robust);

        DesignResult res;
        TransceiverState &st = res.state;
        RunTrace &trace = res.trace;
        st.nu = nu0;

        auto evaluate = [&](const IrsPhases &nu)
        {
            const BlockSet He = equivalent_channels(csi, nu);
            st.P = mrt_precoders(He, ctx);
            st.W = mmse_downlink_filters(st.P, He, ctx);
            bc_to_mac_all(st, ctx);
            return uplink_mse_total(st.T, He, ctx);
        };

        double mu = settings.initial_step;
        double prev = evaluate(st.nu);
        trace.records.push_back({0, prev, mu, 0});

        for (int i = 1; i <= settings.max_iterations && csi.num_irs > 0; ++i)
        {
            if (settings.reset_step)
                mu = settings.initial_step;
            PgStep step = pg_update(st.nu, st.T, csi, ctx, mu, settings, PhaseConstraint::unit_modulus);
            mu = step.step;
            if (!step.accepted)
                ++trace.exhausted_halvings;
            const IrsPhases previous_nu = st.nu;
            const double mse = evaluate(step.nu);
            trace.iterations = i;
            if (mse > prev)
            {
                // keep the incumbent; MRT precoders do not follow the dual MAC
                evaluate(previous_nu);
                trace.converged = true;
                break;
            }
            st.nu = std::move(step.nu);
            trace.records.push_back({i, mse, mu, step.halvings});
            if (prev - mse < settings.tolerance)
            {
                trace.converged = true;
                break;
            }
            prev = mse;
        }
        trace.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        return res;
    }

    DesignResult mrt_mmse_design(const CsiEstimate &csi, const SystemConfig &config, const IrsPhases &nu, bool robust)
    {
        if (nu.size() != csi.num_irs)
            throw ConfigError("IRS vector length does not match the CSI");
        const auto start = Clock::now();
        const DesignContext ctx = make_design_context(csi, config, robust);
        DesignResult res;
        res.state.nu = nu;
        const BlockSet He = equivalent_channels(csi, nu);
        res.state.P = mrt_precoders(He, ctx);
        res.state.W = mmse_downlink_filters(res.state.P, He, ctx);
        res.trace.converged = true;
        res.trace.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        return res;
    }

    void write_trace_csv(const RunTrace &trace, std::ostream &os)
    {
        os << "iteration,mse_ul,step,halvings\n";
        const auto flags = os.flags();
        const auto prec = os.precision();
        os << std::setprecision(17);
        for (const auto &r : trace.records)
            os << r.iteration << ',' << r.mse_ul << ',' << r.step << ',' << r.halvings << '\n';
        os.flags(flags);
        os.precision(prec);
    }
}
