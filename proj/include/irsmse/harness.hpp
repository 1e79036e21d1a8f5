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

#ifndef IRSMSE_HARNESS_HPP
#define IRSMSE_HARNESS_HPP

#include "irsmse/channel_gen.hpp"
#include "irsmse/csi.hpp"
#include "irsmse/optimizer.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace irsmse
{
    enum class Method
    {
        proposed_pg,
        af_ops,
        r_irs_ops,
        o_irs_mrt,
        no_irs_mrt,
        proposed_nonrobust,
        proposed_perfect
    };

    std::string to_string(Method method);
    Method method_from_string(const std::string &name);

    /// One sweep point. bits = 0 means continuous phases.
    struct CellKey
    {
        double snr_db = 0.0;
        int num_irs = 0;
        int paths_irs_user = 0;
        int bits = 0;

        bool operator==(const CellKey &) const = default;
    };

    struct ExperimentSpec
    {
        SystemConfig base;
        std::vector<double> snr_db;
        std::vector<int> num_irs_elements;
        std::vector<int> paths_irs_user;
        std::vector<int> quantization_bits;
        std::vector<Method> methods;
        int num_realizations = 100;
        std::string output;

        /// Sweep points in the order snr, N, N_path_I, bits (last axis fastest).
        std::vector<CellKey> cells() const;

        /// Base configuration specialized to one cell (validated).
        SystemConfig cell_config(const CellKey &cell) const;

        void validate() const;
    };

    /// JSON object {"base": {...}, "sweep": {"snr_db": [...], "num_irs_elements": [...],
    /// "paths_irs_user": [...], "quantization_bits": [...]}, "methods": [...],
    /// "num_realizations": n, "output": "dir"}. Missing sweep axes default to the base value.
    ExperimentSpec parse_experiment_spec(const std::string &json_text);
    ExperimentSpec load_experiment_spec(const std::filesystem::path &path);

    struct MetricRow
    {
        std::string method;
        double snr_db = 0.0;
        int num_irs = 0;
        int paths_irs_user = 0;
        int bits = 0;
        int realization = 0;
        double sum_rate = 0.0;
        double avg_mse = 0.0;
        int iterations = 0;
        double wall_ms = 0.0;
        std::uint64_t scenario_hash = 0;

        CellKey cell() const { return {snr_db, num_irs, paths_irs_user, bits}; }
    };

    /// One paired realization: true channels, the designer's CSI and the IRS initialization.
    struct Scenario
    {
        SystemConfig config;
        NoiseModel noise;
        ChannelSet channels;
        CsiEstimate csi;
        IrsPhases init_nu;
        int realization = 0;
        std::uint64_t hash = 0;
    };

    /// Seeds base = config.rng_seed + realization; channel, CSI and IRS init use separate streams.
    Scenario draw_scenario(const SystemConfig &config, int realization);

    struct MethodOutcome
    {
        MetricRow row;
        DesignResult design;
    };

    /// Runs `method` on the scenario. Sum-rate and MSE are evaluated on the true channels;
    /// avg_mse is the downlink sum-MSE over users and subcarriers divided by K.
    MethodOutcome run_method(Method method, const Scenario &scenario);

    struct CellStats
    {
        CellKey cell;
        std::string method;
        int count = 0;
        double sum_rate_mean = 0.0;
        double sum_rate_se = 0.0;
        double avg_mse_mean = 0.0;
        double avg_mse_se = 0.0;
        double iterations_mean = 0.0;
    };

    /// Mean and standard error per (cell, method), in first-appearance order.
    std::vector<CellStats> summarize(const std::vector<MetricRow> &rows);

    struct PairedDifference
    {
        int count = 0;
        double mean = 0.0;
        double se = 0.0;
    };

    /// Per-realization difference of sum-rates a - b within `cell`. Throws ReportingError when
    /// either method has no rows in the cell.
    PairedDifference paired_difference(const std::vector<MetricRow> &rows, const CellKey &cell,
                                       const std::string &method_a, const std::string &method_b);

    /// Mean sum-rate gain of proposed_pg over r_irs_ops.
    double delta_r(const std::vector<MetricRow> &rows, const CellKey &cell);

    /// Mean sum-rate gain of proposed_pg over no_irs_mrt.
    double g_irs(const std::vector<MetricRow> &rows, const CellKey &cell);

    struct RunOptions
    {
        int threads = 1;
        bool deterministic = false; // zero wall_ms and suppress timestamps
    };

    /// Every cell x realization x method, paired within (cell, realization). Rows are ordered by
    /// cell, realization, then method as listed in the spec, regardless of thread scheduling.
    std::vector<MetricRow> monte_carlo(const ExperimentSpec &spec, const RunOptions &options);

    /// Formats with 17 significant digits.
    std::string format_double(double x);

    void write_results_csv(const std::vector<MetricRow> &rows, std::ostream &os);
    void write_summary_csv(const std::vector<CellStats> &stats, std::ostream &os);

    /// Per cell: delta_r and g_irs (paired mean and standard error) when their methods were run.
    void write_gains_csv(const std::vector<MetricRow> &rows, std::ostream &os);

    /// Writes results.csv, summary.csv and gains.csv into `dir` (created if needed), plus
    /// run_info.json unless `deterministic`. I/O failures raise std::runtime_error with the path.
    void write_experiment_outputs(const std::vector<MetricRow> &rows, const ExperimentSpec &spec,
                                  const std::filesystem::path &dir, bool deterministic);

    /// Invariant checks on a few random instances of `config`; one PASS/FAIL line per check.
    bool run_invariant_suite(const SystemConfig &config, std::uint64_t seed, std::ostream &os);
}

#endif
