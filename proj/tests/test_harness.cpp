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

#include "irsmse/harness.hpp"
#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

using namespace irsmse;

namespace
{
    ExperimentSpec small_spec(int realizations)
    {
        ExperimentSpec spec;
        spec.base = test::desk(CsiMode::robust);
        spec.snr_db = {0.0, 10.0};
        spec.num_irs_elements = {9};
        spec.paths_irs_user = {4};
        spec.quantization_bits = {0, 2};
        spec.methods = {Method::proposed_pg, Method::r_irs_ops, Method::no_irs_mrt};
        spec.num_realizations = realizations;
        return spec;
    }

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
}

TEST_CASE("method names round-trip", "[harness]")
{
    for (Method m : {Method::proposed_pg, Method::af_ops, Method::r_irs_ops, Method::o_irs_mrt, Method::no_irs_mrt,
                     Method::proposed_nonrobust, Method::proposed_perfect})
        CHECK(method_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(method_from_string("dpc"), ConfigError);
}

TEST_CASE("experiment spec parsing", "[harness][config]")
{
    const ExperimentSpec s = parse_experiment_spec(R"({
        "base": {"preset": "desk", "csi_mode": "robust"},
        "sweep": {"snr_db": [-5, 5], "num_irs_elements": [9, 16], "quantization_bits": [0, 3]},
        "methods": ["proposed_pg", "no_irs_mrt"],
        "num_realizations": 7,
        "output": "out"})");
    CHECK(s.cells().size() == 8);
    CHECK(s.cells()[1] == CellKey{-5.0, 9, 4, 3});
    CHECK(s.num_realizations == 7);
    CHECK(s.methods.size() == 2);
    const SystemConfig c = s.cell_config(s.cells()[7]);
    CHECK(c.num_irs_elements == 16);
    CHECK(c.quantization_bits == 3);
    CHECK(c.total_power == Catch::Approx(c.num_subcarriers * std::pow(10.0, 0.5)));

    CHECK_THROWS_AS(parse_experiment_spec(R"({"methods": ["proposed_pg"], "extra": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_spec(R"({"methods": ["proposed_pg"], "sweep": {"snr": [1]}})"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_spec(R"({"methods": []})"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_spec(R"({"methods": ["proposed_pg"], "num_realizations": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_spec(R"({"methods": ["proposed_pg"], "sweep": {"quantization_bits": [-1]}})"),
                    ConfigError);
}

TEST_CASE("one realization, one method, one cell gives one row", "[harness]")
{
    ExperimentSpec spec = small_spec(1);
    spec.snr_db = {5.0};
    spec.quantization_bits = {0};
    spec.methods = {Method::proposed_pg};
    const auto rows = monte_carlo(spec, {});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].sum_rate >= 0.0);
    CHECK(rows[0].avg_mse >= 0.0);
    CHECK(rows[0].method == "proposed_pg");
}

TEST_CASE("methods are paired on identical scenarios", "[harness][property]")
{
    ExperimentSpec spec = small_spec(4);
    spec.methods = {Method::proposed_pg, Method::af_ops, Method::r_irs_ops, Method::o_irs_mrt, Method::no_irs_mrt,
                    Method::proposed_nonrobust, Method::proposed_perfect};
    const auto rows = monte_carlo(spec, {});
    CHECK(rows.size() == spec.cells().size() * 4 * spec.methods.size());
    for (std::size_t i = 0; i < rows.size(); i += spec.methods.size())
        for (std::size_t j = 1; j < spec.methods.size(); ++j)
        {
            CHECK(rows[i + j].scenario_hash == rows[i].scenario_hash);
            CHECK(rows[i + j].realization == rows[i].realization);
            CHECK(rows[i + j].cell() == rows[i].cell());
            CHECK(rows[i + j].method == to_string(spec.methods[j]));
        }
    for (const auto &r : rows)
    {
        CHECK(r.sum_rate >= 0.0);
        CHECK(r.avg_mse >= 0.0);
    }
    // Different realizations draw different scenarios.
    CHECK(rows[0].scenario_hash != rows[spec.methods.size()].scenario_hash);
}

TEST_CASE("scenario draws are reproducible", "[harness]")
{
    const SystemConfig c = test::desk(CsiMode::robust);
    const Scenario a = draw_scenario(c, 6);
    const Scenario b = draw_scenario(c, 6);
    CHECK(a.hash == b.hash);
    CHECK(a.channels.direct == b.channels.direct);
    CHECK(a.csi.cascaded == b.csi.cascaded);
    CHECK(a.init_nu.values == b.init_nu.values);
    CHECK(draw_scenario(c, 7).hash != a.hash);
}

TEST_CASE("no-IRS MRT with a zero direct channel has zero rate", "[harness]")
{
    const SystemConfig c = test::desk(CsiMode::perfect);
    Scenario scn = draw_scenario(c, 0);
    for (auto &m : scn.channels.direct)
        m.setZero();
    scn.csi = perfect_csi(scn.channels, scn.noise);
    const MethodOutcome out = run_method(Method::no_irs_mrt, scn);
    CHECK(out.row.sum_rate == 0.0);
}

TEST_CASE("quantized methods return quantized phases", "[harness]")
{
    SystemConfig c = test::desk(CsiMode::robust);
    c.quantization_bits = 2;
    const Scenario scn = draw_scenario(c, 1);
    for (Method m : {Method::proposed_pg, Method::af_ops, Method::r_irs_ops, Method::o_irs_mrt})
    {
        const MethodOutcome out = run_method(m, scn);
        const IrsPhases &nu = out.design.state.nu;
        CHECK(quantize_phases(nu, 2).values.isApprox(nu.values, 1e-12));
        CHECK(out.row.bits == 2);
    }
}

TEST_CASE("summary statistics recompute from raw rows", "[harness][property]")
{
    const auto rows = monte_carlo(small_spec(5), {});
    const auto stats = summarize(rows);
    CHECK(stats.size() == 4 * 3);
    for (const auto &s : stats)
    {
        std::vector<double> x;
        for (const auto &r : rows)
            if (r.cell() == s.cell && r.method == s.method)
                x.push_back(r.sum_rate);
        REQUIRE(static_cast<int>(x.size()) == s.count);
        double mean = 0.0;
        for (double v : x)
            mean += v;
        mean /= x.size();
        double ss = 0.0;
        for (double v : x)
            ss += (v - mean) * (v - mean);
        CHECK(std::abs(s.sum_rate_mean - mean) <= 1e-12 * std::abs(mean));
        CHECK(std::abs(s.sum_rate_se - std::sqrt(ss / (x.size() - 1) / x.size())) <= 1e-12 * std::max(1.0, mean));
    }
}

TEST_CASE("gain metrics", "[harness]")
{
    const auto rows = monte_carlo(small_spec(3), {});
    const CellKey cell{10.0, 9, 4, 0};
    double by_hand = 0.0;
    int n = 0;
    for (const auto &a : rows)
        for (const auto &b : rows)
            if (a.cell() == cell && b.cell() == cell && a.realization == b.realization && a.method == "proposed_pg" &&
                b.method == "r_irs_ops")
            {
                by_hand += a.sum_rate - b.sum_rate;
                ++n;
            }
    CHECK(n == 3);
    CHECK(delta_r(rows, cell) == Catch::Approx(by_hand / n).epsilon(1e-12));
    CHECK(paired_difference(rows, cell, "proposed_pg", "proposed_pg").mean == 0.0);
    CHECK(g_irs(rows, cell) > 0.0);
    CHECK_THROWS_AS(paired_difference(rows, cell, "proposed_pg", "af_ops"), ReportingError);
    CHECK_THROWS_AS(delta_r(rows, CellKey{3.0, 9, 4, 0}), ReportingError);
}

TEST_CASE("thread count does not change the rows", "[harness]")
{
    const ExperimentSpec spec = small_spec(3);
    const auto a = monte_carlo(spec, {1, true});
    const auto b = monte_carlo(spec, {3, true});
    std::ostringstream x, y;
    write_results_csv(a, x);
    write_results_csv(b, y);
    CHECK(x.str() == y.str());
    for (const auto &r : a)
        CHECK(r.wall_ms == 0.0);
}

TEST_CASE("deterministic outputs are byte-identical", "[harness]")
{
    const ExperimentSpec spec = small_spec(2);
    const auto root = std::filesystem::temp_directory_path() / "irsmse_harness_test";
    std::filesystem::remove_all(root);
    write_experiment_outputs(monte_carlo(spec, {1, true}), spec, root / "a", true);
    write_experiment_outputs(monte_carlo(spec, {2, true}), spec, root / "b", true);
    for (const char *f : {"results.csv", "summary.csv", "gains.csv"})
    {
        CHECK(std::filesystem::exists(root / "a" / f));
        CHECK(slurp(root / "a" / f) == slurp(root / "b" / f));
    }
    CHECK_FALSE(std::filesystem::exists(root / "a" / "run_info.json"));
    write_experiment_outputs(monte_carlo(spec, {1, false}), spec, root / "c", false);
    CHECK(std::filesystem::exists(root / "c" / "run_info.json"));

    const std::string header = slurp(root / "a" / "results.csv").substr(0, 92);
    CHECK(header.rfind("method,snr_db,N,N_path_I,bits,realization,sum_rate,avg_mse,iterations,wall_ms,scenario_hash", 0) ==
          0);
    std::filesystem::remove_all(root);
}

TEST_CASE("CSV doubles keep 17 significant digits", "[harness]")
{
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("invariant suite passes on the desk configuration", "[harness]")
{
    std::ostringstream os;
    CHECK(run_invariant_suite(test::desk(CsiMode::robust), 5, os));
    CHECK(os.str().find("FAIL") == std::string::npos);
}

TEST_CASE("delta R grows with SNR at N = 25", "[harness][statistical]")
{
    ExperimentSpec spec;
    spec.base = test::desk(CsiMode::robust);
    spec.snr_db = {-5.0, 5.0};
    spec.num_irs_elements = {25};
    spec.paths_irs_user = {4};
    spec.quantization_bits = {0};
    spec.methods = {Method::proposed_pg, Method::r_irs_ops};
    spec.num_realizations = 100;
    const auto rows = monte_carlo(spec, {});
    CHECK(delta_r(rows, {5.0, 25, 4, 0}) >= delta_r(rows, {-5.0, 25, 4, 0}));
}

TEST_CASE("IRS gain over no-IRS MRT is positive for every path count", "[harness][statistical]")
{
    ExperimentSpec spec;
    spec.base = test::desk(CsiMode::robust);
    spec.snr_db = {10.0};
    spec.num_irs_elements = {9};
    spec.paths_irs_user = {2, 3, 4};
    spec.quantization_bits = {0};
    spec.methods = {Method::proposed_pg, Method::no_irs_mrt};
    spec.num_realizations = 30;
    const auto rows = monte_carlo(spec, {});
    for (int p : {2, 3, 4})
    {
        const PairedDifference d = paired_difference(rows, {10.0, 9, p, 0}, "proposed_pg", "no_irs_mrt");
        CHECK(d.mean > 2.0 * d.se);
    }
}

TEST_CASE("per-iteration cost grows less than quadratically in L", "[harness][timing]")
{
    auto per_iteration_ms = [](int L)
    {
        SystemConfig c = test::desk(CsiMode::robust);
        c.num_subcarriers = L;
        c.set_snr_db(10.0);
        std::vector<double> samples;
        for (int r = 0; r < 15; ++r)
        {
            const Scenario scn = draw_scenario(c, r);
            const DesignResult res = alternating_minimize(scn.csi, c, PgSettings::from_config(c), scn.init_nu, true);
            samples.push_back(res.trace.wall_ms / std::max(1, res.trace.iterations));
        }
        std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
        return samples[samples.size() / 2];
    };
    const double t8 = per_iteration_ms(8);
    const double t16 = per_iteration_ms(16);
    CHECK(t16 < 4.0 * t8);
}
