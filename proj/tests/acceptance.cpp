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
//
// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include "irsmse/harness.hpp"
#include "irsmse/linalg.hpp"
#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#ifndef IRSMSE_CLI_PATH
#error "IRSMSE_CLI_PATH must name the CLI executable"
#endif

using namespace irsmse;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    int threads()
    {
        return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }

    std::string fmt(double x)
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", x);
        return buf;
    }

    std::vector<MetricRow> sweep(SystemConfig base, std::vector<double> snr, std::vector<int> irs, std::vector<int> bits,
                                 std::vector<Method> methods, int realizations)
    {
        ExperimentSpec spec;
        spec.base = base;
        spec.snr_db = std::move(snr);
        spec.num_irs_elements = std::move(irs);
        spec.paths_irs_user = {base.paths_irs_user};
        spec.quantization_bits = std::move(bits);
        spec.methods = std::move(methods);
        spec.num_realizations = realizations;
        return monte_carlo(spec, {threads(), true});
    }

    double cell_mean(const std::vector<MetricRow> &rows, const CellKey &cell, const std::string &method)
    {
        double sum = 0.0;
        int n = 0;
        for (const auto &r : rows)
            if (r.cell() == cell && r.method == method)
            {
                sum += r.sum_rate;
                ++n;
            }
        return sum / n;
    }

    // 1. Gradient against central differences, 20 instances of K=2, N_r=2, N_t=4, L=4, N=6.
    Outcome gradient_oracle()
    {
        const SystemConfig c = test::small();
        double worst = 0.0;
        for (int t = 0; t < 20; ++t)
        {
            std::mt19937_64 rng(1000 + t);
            const NoiseModel noise = NoiseModel::white(c.num_users, c.num_rx_antennas, 1.0);
            const CsiEstimate csi = test::random_csi(c, noise, rng);
            const IrsPhases nu = random_phases(c.num_irs_elements, rng);
            const DesignContext ctx = make_design_context(csi, c, true);
            const BlockSet T = test::random_blocks(c, c.num_rx_antennas, true, rng);
            const CVector g = mse_gradient_nu(T, nu, csi, ctx);
            const double h = 1e-6;
            for (Eigen::Index n = 0; n < g.size(); ++n)
            {
                auto f = [&](cplx d)
                {
                    IrsPhases v = nu;
                    v.values(n) += d;
                    return uplink_objective(T, v, csi, ctx);
                };
                const double fx = (f(h) - f(-h)) / (2 * h);
                const double fy = (f(cplx(0, h)) - f(cplx(0, -h))) / (2 * h);
                const double gx = 2 * g(n).real(), gy = -2 * g(n).imag();
                worst = std::max(worst, std::hypot(fx - gx, fy - gy) / std::hypot(fx, fy));
            }
        }
        return {worst < 1e-5, "max relative error " + fmt(worst) + " (tol 1e-5)"};
    }

    // 2. Monotone descent and median iteration count over 50 seeded desk runs per CSI mode.
    Outcome monotone_descent()
    {
        double worst = -1e300;
        std::string medians;
        bool ok = true;
        for (CsiMode mode : {CsiMode::perfect, CsiMode::robust})
        {
            const SystemConfig c = test::desk(mode);
            const PgSettings s = PgSettings::from_config(c);
            std::vector<int> iters;
            for (int r = 0; r < 50; ++r)
            {
                const Scenario scn = draw_scenario(c, r);
                const DesignResult res = alternating_minimize(scn.csi, c, s, scn.init_nu, mode == CsiMode::robust);
                for (std::size_t i = 1; i < res.trace.records.size(); ++i)
                    worst = std::max(worst, res.trace.records[i].mse_ul - res.trace.records[i - 1].mse_ul);
                iters.push_back(res.trace.converged ? res.trace.iterations : 1000000);
            }
            std::sort(iters.begin(), iters.end());
            const double median = 0.5 * (iters[24] + iters[25]);
            ok = ok && median <= 40;
            medians += " " + to_string(mode) + " median " + fmt(median);
        }
        ok = ok && worst <= 1e-9;
        return {ok, "max increase " + fmt(worst) + " (tol 1e-9);" + medians + " iterations (limit 40)"};
    }

    // 3. General robust downlink MSE at the MMSE filter against the closed form, 100 instances.
    Outcome formula_cross_validation()
    {
        double worst = 0.0;
        for (int t = 0; t < 100; ++t)
        {
            std::mt19937_64 rng(3000 + t);
            const SystemConfig c = test::small();
            std::vector<CMatrix> covs;
            for (int k = 0; k < c.num_users; ++k)
                covs.push_back(test::random_hpd(c.num_rx_antennas, rng));
            const NoiseModel noise(covs);
            const CsiEstimate csi = test::random_csi(c, noise, rng);
            const IrsPhases nu = random_phases(c.num_irs_elements, rng);
            const DesignContext ctx = make_design_context(csi, c, true);
            const BlockSet He = equivalent_channels(csi, nu);
            const BlockSet P = test::random_blocks(c, c.num_tx_antennas, true, rng);
            for (int l = 0; l < c.num_subcarriers; ++l)
                for (int k = 0; k < c.num_users; ++k)
                {
                    const CMatrix W = mmse_downlink_filter(k, l, P, He, ctx);
                    worst = std::max(worst, test::rel_err(downlink_mse(k, l, P, W, He, nu, ctx),
                                                          downlink_mse_mmse(k, l, P, He, ctx)));
                }
        }
        return {worst < 1e-9, "max relative difference " + fmt(worst) + " (tol 1e-9)"};
    }

    // 4. One duality cycle from MRT + MMSE under perfect CSI, 100 instances.
    Outcome duality_cycle()
    {
        double worst = -1e300;
        const SystemConfig c = test::desk(CsiMode::perfect);
        for (int t = 0; t < 100; ++t)
        {
            const Scenario scn = draw_scenario(c, 4000 + t);
            const DesignContext ctx = make_design_context(scn.csi, c, false);
            const BlockSet He = equivalent_channels(scn.csi, scn.init_nu);
            const BlockSet P0 = mrt_precoders(He, ctx);
            const BlockSet W0 = mmse_downlink_filters(P0, He, ctx);
            BlockSet T, G, P;
            for (int l = 0; l < c.num_subcarriers; ++l)
                bc_to_mac(l, W0, ctx.power_per_subcarrier, scn.noise, T, ctx);
            mmse_uplink_filters_all(G, T, He, ctx);
            for (int l = 0; l < c.num_subcarriers; ++l)
                mac_to_bc(l, G, ctx.power_per_subcarrier, P, ctx);
            const BlockSet W1 = mmse_downlink_filters(P, He, ctx);
            for (int l = 0; l < c.num_subcarriers; ++l)
                worst = std::max(worst, downlink_sum_mse(l, P, W1, He, scn.init_nu, ctx) -
                                            downlink_sum_mse(l, P0, W0, He, scn.init_nu, ctx));
        }
        return {worst <= 1e-9, "max per-subcarrier increase " + fmt(worst) + " (slack 1e-9)"};
    }

    // 5. Sum-rate ordering AF O-Ps >= proposed >= R-IRS O-Ps >= No-IRS MRT-Ps at SNR 10 dB.
    Outcome baseline_ordering()
    {
        const int R = 4000;
        const auto rows = sweep(test::desk(CsiMode::robust), {10.0}, {9}, {0},
                                {Method::af_ops, Method::proposed_pg, Method::r_irs_ops, Method::no_irs_mrt}, R);
        const CellKey cell{10.0, 9, 4, 0};
        const char *order[] = {"af_ops", "proposed_pg", "r_irs_ops", "no_irs_mrt"};
        bool ok = true;
        std::string detail = std::to_string(R) + " paired realizations;";
        for (int i = 0; i < 3; ++i)
        {
            const PairedDifference d = paired_difference(rows, cell, order[i], order[i + 1]);
            ok = ok && d.mean > 2.0 * d.se;
            detail += std::string(" ") + order[i] + "-" + order[i + 1] + " " + fmt(d.mean) + " (2se " + fmt(2 * d.se) + ")";
        }
        return {ok, detail};
    }

    // 6. Robust over non-robust at SNR -5 and 0 dB with imperfect CSI.
    Outcome robustness_gain()
    {
        const auto rows = sweep(test::desk(CsiMode::robust), {-5.0, 0.0}, {9}, {0},
                                {Method::proposed_pg, Method::proposed_nonrobust}, 200);
        bool ok = true;
        std::string detail = "200 paired realizations;";
        for (double snr : {-5.0, 0.0})
        {
            const PairedDifference d = paired_difference(rows, {snr, 9, 4, 0}, "proposed_pg", "proposed_nonrobust");
            ok = ok && d.mean > 2.0 * d.se;
            detail += " " + fmt(snr) + " dB gain " + fmt(d.mean) + " (2se " + fmt(2 * d.se) + ")";
        }
        return {ok, detail};
    }

    // 7. Delta R strictly increasing in N at SNR 5 dB.
    Outcome irs_size_trend()
    {
        const std::vector<int> sizes{9, 16, 25, 36};
        const auto rows = sweep(test::desk(CsiMode::robust), {5.0}, sizes, {0},
                                {Method::proposed_pg, Method::r_irs_ops}, 100);
        bool ok = true;
        double prev = -1e300;
        std::string detail = "100 realizations; delta_r";
        for (int n : sizes)
        {
            const double d = delta_r(rows, {5.0, n, 4, 0});
            ok = ok && d > prev;
            prev = d;
            detail += " N=" + std::to_string(n) + ":" + fmt(d);
        }
        return {ok, detail};
    }

    // 8. Continuous >= 3-bit >= 2-bit, with the 3-bit loss below the 2-bit loss.
    Outcome quantization_ordering()
    {
        const auto rows = sweep(test::desk(CsiMode::robust), {10.0}, {9}, {0, 3, 2}, {Method::proposed_pg}, 100);
        const double c = cell_mean(rows, {10.0, 9, 4, 0}, "proposed_pg");
        const double b3 = cell_mean(rows, {10.0, 9, 4, 3}, "proposed_pg");
        const double b2 = cell_mean(rows, {10.0, 9, 4, 2}, "proposed_pg");
        const bool ok = c >= b3 && b3 >= b2 && (c - b3) < (c - b2);
        return {ok, "100 paired realizations; continuous " + fmt(c) + ", 3-bit " + fmt(b3) + ", 2-bit " + fmt(b2) +
                        ", losses " + fmt(c - b3) + " < " + fmt(c - b2)};
    }

    // 9. Noiseless LS recovery and the empirical LS error covariance.
    Outcome ls_validation()
    {
        SystemConfig c = test::small();
        c.num_tx_antennas = 2;
        c.num_irs_elements = 3;
        c.streams_default = 1;
        c.validate();
        CMatrix C(2, 2);
        C << 1.0, cplx(0.3, 0.2), cplx(0.3, -0.2), 2.0;
        const NoiseModel noise({C, C});
        const PilotPlan plan = build_pilot_plan(c);
        std::mt19937_64 rng(9000);
        const ChannelSet ch = gen_scenario(c, rng);
        const CsiEstimate truth = perfect_csi(ch, noise);

        double recover = 0.0;
        const CsiEstimate clean = ls_estimate_full(ch, plan, c, noise, rng, false);
        for (std::size_t i = 0; i < clean.direct.size(); ++i)
            recover = std::max(recover, test::rel_err(clean.direct[i], truth.direct[i]));
        for (std::size_t i = 0; i < clean.cascaded.size(); ++i)
            recover = std::max(recover, (clean.cascaded[i] - truth.cascaded[i]).norm() /
                                            std::max(1.0, truth.cascaded[i].norm()));

        CMatrix acc = CMatrix::Zero(4, 4);
        int count = 0;
        for (int t = 0; t < 2000; ++t)
        {
            const CsiEstimate est = ls_estimate_full(ch, plan, c, noise, rng);
            for (std::size_t i = 0; i < est.direct.size(); ++i)
            {
                const CVector e = (est.direct[i] - truth.direct[i]).reshaped();
                acc += e * e.adjoint();
                ++count;
            }
        }
        const CMatrix model = ls_error_covariance(c, noise).matrix(0);
        const double cov = test::rel_err(CMatrix(acc / count), model);
        return {recover < 1e-9 && cov < 0.05, "noiseless recovery " + fmt(recover) + " (tol 1e-9); covariance rel err " +
                                                  fmt(cov) + " over 2000 trials (tol 0.05)"};
    }

    // 10. Two deterministic CLI runs produce byte-identical CSVs.
    Outcome determinism()
    {
        const auto root = std::filesystem::temp_directory_path() / "irsmse_acceptance_determinism";
        std::filesystem::remove_all(root);
        std::filesystem::create_directories(root);
        const auto spec = root / "spec.json";
        std::ofstream(spec) << R"({"base": {"preset": "desk", "csi_mode": "robust"},
  "sweep": {"snr_db": [0, 10], "quantization_bits": [0, 2]},
  "methods": ["proposed_pg", "af_ops", "r_irs_ops", "o_irs_mrt", "no_irs_mrt"],
  "num_realizations": 6})";
        bool ok = true;
        for (const char *run : {"a", "b"})
        {
            const std::string cmd = std::string("\"") + IRSMSE_CLI_PATH + "\" run --config \"" + spec.string() +
                                    "\" --out \"" + (root / run).string() + "\" --deterministic --threads " +
                                    (run[0] == 'a' ? "1" : "3") + " > /dev/null";
            ok = ok && std::system(cmd.c_str()) == 0;
        }
        auto slurp = [](const std::filesystem::path &p)
        {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        };
        std::size_t bytes = 0;
        for (const char *f : {"results.csv", "summary.csv", "gains.csv"})
        {
            const std::string a = slurp(root / "a" / f), b = slurp(root / "b" / f);
            ok = ok && !a.empty() && a == b;
            bytes += a.size();
        }
        ok = ok && !std::filesystem::exists(root / "a" / "run_info.json");
        std::filesystem::remove_all(root);
        return {ok, "compared " + std::to_string(bytes) + " bytes across results/summary/gains"};
    }
}

int main()
{
    struct Criterion
    {
        int id;
        const char *name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "gradient oracle", 10.0, gradient_oracle},
        {2, "monotone descent", 120.0, monotone_descent},
        {3, "formula cross-validation", 60.0, formula_cross_validation},
        {4, "duality cycle", 60.0, duality_cycle},
        {5, "baseline ordering", 900.0, baseline_ordering},
        {6, "robustness gain", 900.0, robustness_gain},
        {7, "IRS-size trend", 900.0, irs_size_trend},
        {8, "quantization ordering", 900.0, quantization_ordering},
        {9, "LS estimator validation", 60.0, ls_validation},
        {10, "determinism", 300.0, determinism},
    };
    int failed = 0;
    for (const auto &c : criteria)
    {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try
        {
            out = c.run();
        }
        catch (const std::exception &e)
        {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = out.pass && secs <= c.limit_s;
        failed += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << out.detail << "; " << fmt(secs)
                  << " s (limit " << fmt(c.limit_s) << " s)" << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
