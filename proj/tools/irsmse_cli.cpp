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
// Command line front end: run (Monte Carlo sweep), trace (single realization), validate
// (invariant suite). Exit codes: 0 success, 1 other failure, 2 config error, 3 degeneracy.

#include "irsmse/config_io.hpp"
#include "irsmse/harness.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>

namespace
{
    struct Options
    {
        std::string config;
        std::string out;
        std::optional<std::uint64_t> seed;
        std::optional<int> realizations;
        bool deterministic = false;
        int threads = 1;
        int realization = 0;
    };

    int cmd_run(const Options &opt)
    {
        if (opt.config.empty())
            throw irsmse::ConfigError("run needs --config <experiment spec>");
        irsmse::ExperimentSpec spec = irsmse::load_experiment_spec(opt.config);
        if (opt.seed)
            spec.base.rng_seed = *opt.seed;
        if (opt.realizations)
            spec.num_realizations = *opt.realizations;
        if (!opt.out.empty())
            spec.output = opt.out;
        if (spec.output.empty())
            spec.output = "out";
        spec.validate();

        const auto rows = irsmse::monte_carlo(spec, {opt.threads, opt.deterministic});
        irsmse::write_experiment_outputs(rows, spec, spec.output, opt.deterministic);
        std::cout << "wrote " << rows.size() << " rows to " << spec.output << "\n";
        return 0;
    }

    int cmd_trace(const Options &opt)
    {
        irsmse::SystemConfig config =
            opt.config.empty() ? irsmse::SystemConfig::desk_scale() : irsmse::load_config(opt.config);
        if (opt.seed)
            config.rng_seed = *opt.seed;
        config.validate();
        const std::filesystem::path dir = opt.out.empty() ? "out" : opt.out;
        std::filesystem::create_directories(dir);

        const irsmse::Scenario scn = irsmse::draw_scenario(config, opt.realization);
        irsmse::MethodOutcome outcome = irsmse::run_method(irsmse::Method::proposed_pg, scn);
        if (opt.deterministic)
            outcome.row.wall_ms = 0.0;

        std::ofstream trace(dir / "trace.csv", std::ios::binary | std::ios::trunc);
        if (!trace)
            throw std::runtime_error("cannot write '" + (dir / "trace.csv").string() + "'");
        irsmse::write_trace_csv(outcome.design.trace, trace);
        irsmse::write_channel_dump(scn.channels, dir / "channels.bin");

        std::cout << "iterations " << outcome.row.iterations << (outcome.design.trace.converged ? " (converged)" : "")
                  << "\nsum_rate " << irsmse::format_double(outcome.row.sum_rate) << "\navg_mse "
                  << irsmse::format_double(outcome.row.avg_mse) << "\n";
        return 0;
    }

    int cmd_validate(const Options &opt)
    {
        irsmse::SystemConfig config =
            opt.config.empty() ? irsmse::SystemConfig::desk_scale() : irsmse::load_config(opt.config);
        const std::uint64_t seed = opt.seed.value_or(config.rng_seed);
        return irsmse::run_invariant_suite(config, seed, std::cout) ? 0 : 1;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"irsmse: robust MSE transceiver and IRS design experiments"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App *sub)
    {
        sub->add_option("--config", opt.config, "configuration or experiment spec (JSON)");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--seed", opt.seed, "base RNG seed");
        sub->add_flag("--deterministic", opt.deterministic, "zero timings and suppress run_info.json");
    };

    CLI::App *run = app.add_subcommand("run", "Monte Carlo sweep from an experiment spec");
    add_common(run);
    run->add_option("--realizations", opt.realizations, "realizations per cell")->check(CLI::PositiveNumber);
    run->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);

    CLI::App *trace = app.add_subcommand("trace", "Single realization with iteration trace and channel dump");
    add_common(trace);
    trace->add_option("--realization", opt.realization, "realization index")->check(CLI::NonNegativeNumber);

    CLI::App *validate = app.add_subcommand("validate", "Invariant suite");
    add_common(validate);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try
    {
        if (*run)
            return cmd_run(opt);
        if (*trace)
            return cmd_trace(opt);
        return cmd_validate(opt);
    }
    catch (const irsmse::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    catch (const irsmse::DegenerateStateError &e)
    {
        std::cerr << "numerical degeneracy: " << e.what() << "\n";
        return 3;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
