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
#include "irsmse/config_io.hpp"
#include "json_util.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace irsmse
{
    namespace
    {
        constexpr std::pair<Method, const char *> method_names[] = {
            {Method::proposed_pg, "proposed_pg"},
            {Method::af_ops, "af_ops"},
            {Method::r_irs_ops, "r_irs_ops"},
            {Method::o_irs_mrt, "o_irs_mrt"},
            {Method::no_irs_mrt, "no_irs_mrt"},
            {Method::proposed_nonrobust, "proposed_nonrobust"},
            {Method::proposed_perfect, "proposed_perfect"},
        };
    }

    std::string to_string(Method method)
    {
        for (const auto &[m, name] : method_names)
            if (m == method)
                return name;
        return "unknown";
    }

    Method method_from_string(const std::string &name)
    {
        for (const auto &[m, n] : method_names)
            if (name == n)
                return m;
        throw ConfigError("unknown method '" + name + "'");
    }

    // ----- ExperimentSpec ----------------------------------------------------

    std::vector<CellKey> ExperimentSpec::cells() const
    {
        std::vector<CellKey> out;
        for (double snr : snr_db)
            for (int n : num_irs_elements)
                for (int p : paths_irs_user)
                    for (int b : quantization_bits)
                        out.push_back({snr, n, p, b});
        return out;
    }

    SystemConfig ExperimentSpec::cell_config(const CellKey &cell) const
    {
        SystemConfig c = base;
        c.num_irs_elements = cell.num_irs;
        c.paths_irs_user = cell.paths_irs_user;
        c.quantization_bits = cell.bits > 0 ? std::optional<int>(cell.bits) : std::nullopt;
        c.set_snr_db(cell.snr_db);
        c.validate();
        return c;
    }

    void ExperimentSpec::validate() const
    {
        if (methods.empty())
            throw ConfigError("experiment spec lists no methods");
        if (snr_db.empty() || num_irs_elements.empty() || paths_irs_user.empty() || quantization_bits.empty())
            throw ConfigError("experiment spec has an empty sweep axis");
        if (num_realizations < 1)
            throw ConfigError("num_realizations must be at least 1");
        for (int b : quantization_bits)
            if (b < 0)
                throw ConfigError("quantization_bits entries must be non-negative (0 = continuous)");
        for (const auto &cell : cells())
            cell_config(cell);
    }

    namespace
    {
        template <class T>
        std::vector<T> read_axis(const nlohmann::json &sweep, const char *key, T fallback)
        {
            auto it = sweep.find(key);
            if (it == sweep.end())
                return {fallback};
            if (!it->is_array())
                throw ConfigError(std::string("sweep.") + key + " must be an array");
            std::vector<T> out;
            for (const auto &v : *it)
                out.push_back(json_util::get<T>(v, std::string("sweep.") + key));
            return out;
        }
    }

    ExperimentSpec parse_experiment_spec(const std::string &json_text)
    {
        const nlohmann::json obj = json_util::parse(json_text, "experiment spec");
        if (!obj.is_object())
            throw ConfigError("experiment spec must be a JSON object");
        json_util::reject_unknown(obj, {"base", "sweep", "methods", "num_realizations", "output"}, "experiment spec");

        ExperimentSpec spec;
        spec.base = config_from_json(obj.value("base", nlohmann::json::object()));

        const nlohmann::json sweep = obj.value("sweep", nlohmann::json::object());
        if (!sweep.is_object())
            throw ConfigError("sweep must be a JSON object");
        json_util::reject_unknown(sweep, {"snr_db", "num_irs_elements", "paths_irs_user", "quantization_bits"}, "sweep");
        spec.snr_db = read_axis<double>(sweep, "snr_db", spec.base.snr_db);
        spec.num_irs_elements = read_axis<int>(sweep, "num_irs_elements", spec.base.num_irs_elements);
        spec.paths_irs_user = read_axis<int>(sweep, "paths_irs_user", spec.base.paths_irs_user);
        spec.quantization_bits = read_axis<int>(sweep, "quantization_bits", spec.base.quantization_bits.value_or(0));

        auto methods = obj.find("methods");
        if (methods == obj.end() || !methods->is_array())
            throw ConfigError("experiment spec needs a 'methods' array");
        for (const auto &m : *methods)
            spec.methods.push_back(method_from_string(json_util::get<std::string>(m, "methods")));

        if (auto it = obj.find("num_realizations"); it != obj.end())
            spec.num_realizations = json_util::get<int>(*it, "num_realizations");
        if (auto it = obj.find("output"); it != obj.end())
            spec.output = json_util::get<std::string>(*it, "output");

        spec.validate();
        return spec;
    }

    ExperimentSpec load_experiment_spec(const std::filesystem::path &path)
    {
        try
        {
            return parse_experiment_spec(read_text_file(path));
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(path.string() + ": " + e.what());
        }
    }

    // ----- Scenarios and methods ---------------------------------------------

    namespace
    {
        std::mt19937_64 stream(std::uint64_t base, std::uint32_t id)
        {
            std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32), id};
            return std::mt19937_64(seq);
        }

        std::uint64_t scenario_hash(const ChannelSet &ch, const CsiEstimate &csi, const IrsPhases &nu)
        {
            std::uint64_t h = content_hash(ch.direct);
            h = content_hash(ch.bs_irs, h);
            h = content_hash(ch.irs_user, h);
            h = content_hash(csi.direct, h);
            h = content_hash(csi.cascaded, h);
            const CMatrix v = nu.values;
            return content_hash(std::span<const CMatrix>(&v, 1), h);
        }
    }

    Scenario draw_scenario(const SystemConfig &config, int realization)
    {
        config.validate();
        const std::uint64_t base = config.rng_seed + static_cast<std::uint64_t>(realization);
        auto rng_channel = stream(base, 0);
        auto rng_csi = stream(base, 1);
        auto rng_init = stream(base, 2);

        Scenario s;
        s.config = config;
        s.realization = realization;
        s.noise = NoiseModel::white(config.num_users, config.num_rx_antennas, config.noise_power);
        s.channels = gen_scenario(config, rng_channel);
        s.csi = sample_csi_statistical(s.channels, config, s.noise, rng_csi);
        s.init_nu = random_phases(config.num_irs_elements, rng_init);
        s.hash = scenario_hash(s.channels, s.csi, s.init_nu);
        return s;
    }

    namespace
    {
        // Continuous design followed, for discrete phases, by quantization and fixed-phase refinement.
        DesignResult with_quantization(DesignResult continuous, const CsiEstimate &csi, const SystemConfig &config,
                                       const PgSettings &settings, bool robust)
        {
            if (!config.quantization_bits)
                return continuous;
            const IrsPhases q = quantize_phases(continuous.state.nu, *config.quantization_bits);
            DesignResult refined = fixed_phase_design(csi, config, settings, q, robust);
            refined.trace.iterations += continuous.trace.iterations;
            return refined;
        }
    }

    MethodOutcome run_method(Method method, const Scenario &scenario)
    {
        const auto start = std::chrono::steady_clock::now();
        const SystemConfig &cfg = scenario.config;
        const PgSettings settings = PgSettings::from_config(cfg);
        const bool robust = cfg.csi_mode == CsiMode::robust;
        const CsiEstimate &csi = scenario.csi;

        MethodOutcome out;
        const ChannelSet *truth = &scenario.channels;
        ChannelSet no_irs_channels;
        switch (method)
        {
        case Method::proposed_pg:
            out.design = with_quantization(alternating_minimize(csi, cfg, settings, scenario.init_nu, robust), csi, cfg,
                                           settings, robust);
            break;
        case Method::proposed_nonrobust:
            out.design = with_quantization(alternating_minimize(csi, cfg, settings, scenario.init_nu, false), csi, cfg,
                                           settings, false);
            break;
        case Method::proposed_perfect:
        {
            const CsiEstimate perfect = perfect_csi(scenario.channels, scenario.noise);
            out.design = with_quantization(alternating_minimize(perfect, cfg, settings, scenario.init_nu, false), perfect,
                                           cfg, settings, false);
            break;
        }
        case Method::af_ops:
            out.design = with_quantization(
                alternating_minimize(csi, cfg, settings, scenario.init_nu, robust, PhaseConstraint::frobenius), csi, cfg,
                settings, robust);
            break;
        case Method::r_irs_ops:
        {
            const IrsPhases nu = cfg.quantization_bits ? quantize_phases(scenario.init_nu, *cfg.quantization_bits)
                                                       : scenario.init_nu;
            out.design = fixed_phase_design(csi, cfg, settings, nu, robust);
            break;
        }
        case Method::o_irs_mrt:
        {
            out.design = mrt_phase_design(csi, cfg, settings, scenario.init_nu, robust);
            if (cfg.quantization_bits)
            {
                const int iterations = out.design.trace.iterations;
                out.design = mrt_mmse_design(csi, cfg, quantize_phases(out.design.state.nu, *cfg.quantization_bits),
                                             robust);
                out.design.trace.iterations = iterations;
            }
            break;
        }
        case Method::no_irs_mrt:
            out.design = mrt_mmse_design(csi.without_irs(), cfg, IrsPhases(), robust);
            no_irs_channels = scenario.channels.without_irs();
            truth = &no_irs_channels;
            break;
        }

        const TransceiverState &st = out.design.state;
        MetricRow &row = out.row;
        row.method = to_string(method);
        row.snr_db = cfg.snr_db;
        row.num_irs = cfg.num_irs_elements;
        row.paths_irs_user = cfg.paths_irs_user;
        row.bits = cfg.quantization_bits.value_or(0);
        row.realization = scenario.realization;
        row.sum_rate = sum_rate(*truth, st.P, st.W, st.nu, scenario.noise);
        row.avg_mse = true_sum_mse(*truth, st.P, st.W, st.nu, cfg, scenario.noise) / cfg.num_users;
        row.iterations = out.design.trace.iterations;
        row.scenario_hash = scenario.hash;
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return out;
    }

    // ----- Aggregation -------------------------------------------------------

    namespace
    {
        struct Moments
        {
            int n = 0;
            double sum = 0.0;
            double sum_sq = 0.0;

            void add(double x)
            {
                ++n;
                sum += x;
                sum_sq += x * x;
            }
            double mean() const { return n ? sum / n : 0.0; }
            double se() const
            {
                if (n < 2)
                    return 0.0;
                const double m = mean();
                const double var = std::max(0.0, (sum_sq - n * m * m) / (n - 1));
                return std::sqrt(var / n);
            }
        };

        // Two-pass version for accuracy on the reported numbers.
        void mean_se(const std::vector<double> &x, double &mean, double &se)
        {
            mean = 0.0;
            se = 0.0;
            if (x.empty())
                return;
            for (double v : x)
                mean += v;
            mean /= static_cast<double>(x.size());
            if (x.size() < 2)
                return;
            double ss = 0.0;
            for (double v : x)
                ss += (v - mean) * (v - mean);
            se = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
        }
    }

    std::vector<CellStats> summarize(const std::vector<MetricRow> &rows)
    {
        struct Group
        {
            CellKey cell;
            std::string method;
            std::vector<double> rate, mse, iters;
        };
        std::vector<Group> groups;
        for (const auto &r : rows)
        {
            auto it = std::find_if(groups.begin(), groups.end(), [&](const Group &g)
                                   { return g.cell == r.cell() && g.method == r.method; });
            if (it == groups.end())
            {
                groups.push_back({r.cell(), r.method, {}, {}, {}});
                it = groups.end() - 1;
            }
            it->rate.push_back(r.sum_rate);
            it->mse.push_back(r.avg_mse);
            it->iters.push_back(r.iterations);
        }
        std::vector<CellStats> out;
        for (const auto &g : groups)
        {
            CellStats s;
            s.cell = g.cell;
            s.method = g.method;
            s.count = static_cast<int>(g.rate.size());
            mean_se(g.rate, s.sum_rate_mean, s.sum_rate_se);
            mean_se(g.mse, s.avg_mse_mean, s.avg_mse_se);
            double ignored = 0.0;
            mean_se(g.iters, s.iterations_mean, ignored);
            out.push_back(s);
        }
        return out;
    }

    PairedDifference paired_difference(const std::vector<MetricRow> &rows, const CellKey &cell,
                                       const std::string &method_a, const std::string &method_b)
    {
        std::map<int, double> a, b;
        for (const auto &r : rows)
        {
            if (!(r.cell() == cell))
                continue;
            if (r.method == method_a)
                a[r.realization] = r.sum_rate;
            if (r.method == method_b)
                b[r.realization] = r.sum_rate;
        }
        if (a.empty() || b.empty())
            throw ReportingError("no rows for '" + (a.empty() ? method_a : method_b) + "' in the requested cell");
        std::vector<double> diff;
        for (const auto &[idx, v] : a)
            if (auto it = b.find(idx); it != b.end())
                diff.push_back(v - it->second);
        if (diff.empty())
            throw ReportingError("methods '" + method_a + "' and '" + method_b + "' share no realizations");
        PairedDifference d;
        d.count = static_cast<int>(diff.size());
        mean_se(diff, d.mean, d.se);
        return d;
    }

    double delta_r(const std::vector<MetricRow> &rows, const CellKey &cell)
    {
        return paired_difference(rows, cell, "proposed_pg", "r_irs_ops").mean;
    }

    double g_irs(const std::vector<MetricRow> &rows, const CellKey &cell)
    {
        return paired_difference(rows, cell, "proposed_pg", "no_irs_mrt").mean;
    }

    // ----- Monte Carlo -------------------------------------------------------

    std::vector<MetricRow> monte_carlo(const ExperimentSpec &spec, const RunOptions &options)
    {
        spec.validate();
        const std::vector<CellKey> cells = spec.cells();
        std::vector<SystemConfig> configs;
        for (const auto &c : cells)
            configs.push_back(spec.cell_config(c));

        const std::size_t R = static_cast<std::size_t>(spec.num_realizations);
        const std::size_t tasks = cells.size() * R;
        std::vector<std::vector<MetricRow>> slots(tasks);

        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::atomic<bool> stop{false};

        auto worker = [&]()
        {
            for (;;)
            {
                const std::size_t t = next.fetch_add(1);
                if (t >= tasks || stop.load())
                    return;
                try
                {
                    const std::size_t c = t / R;
                    const int r = static_cast<int>(t % R);
                    const Scenario scn = draw_scenario(configs[c], r);
                    auto &rows = slots[t];
                    for (Method m : spec.methods)
                    {
                        MetricRow row = run_method(m, scn).row;
                        row.snr_db = cells[c].snr_db;
                        if (options.deterministic)
                            row.wall_ms = 0.0;
                        rows.push_back(std::move(row));
                    }
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    stop = true;
                    return;
                }
            }
        };

        const int threads = std::max(1, options.threads);
        if (threads == 1)
            worker();
        else
        {
            std::vector<std::thread> pool;
            for (int i = 0; i < threads; ++i)
                pool.emplace_back(worker);
            for (auto &th : pool)
                th.join();
        }
        if (failure)
            std::rethrow_exception(failure);

        std::vector<MetricRow> rows;
        rows.reserve(tasks * spec.methods.size());
        for (auto &slot : slots)
            for (auto &row : slot)
                rows.push_back(std::move(row));
        return rows;
    }

    // ----- CSV ---------------------------------------------------------------

    std::string format_double(double x)
    {
        if (std::isnan(x))
            return "nan";
        if (std::isinf(x))
            return x > 0 ? "inf" : "-inf";
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        return buf;
    }

    namespace
    {
        std::string hex64(std::uint64_t v)
        {
            char buf[20];
            std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
            return buf;
        }

        void cell_columns(std::ostream &os, const CellKey &c)
        {
            os << format_double(c.snr_db) << ',' << c.num_irs << ',' << c.paths_irs_user << ',' << c.bits;
        }
    }

    void write_results_csv(const std::vector<MetricRow> &rows, std::ostream &os)
    {
        os << "method,snr_db,N,N_path_I,bits,realization,sum_rate,avg_mse,iterations,wall_ms,scenario_hash\n";
        for (const auto &r : rows)
        {
            os << r.method << ',';
            cell_columns(os, r.cell());
            os << ',' << r.realization << ',' << format_double(r.sum_rate) << ',' << format_double(r.avg_mse) << ','
               << r.iterations << ',' << format_double(r.wall_ms) << ',' << hex64(r.scenario_hash) << '\n';
        }
    }

    void write_summary_csv(const std::vector<CellStats> &stats, std::ostream &os)
    {
        os << "method,snr_db,N,N_path_I,bits,count,sum_rate_mean,sum_rate_se,avg_mse_mean,avg_mse_se,iterations_mean\n";
        for (const auto &s : stats)
        {
            os << s.method << ',';
            cell_columns(os, s.cell);
            os << ',' << s.count << ',' << format_double(s.sum_rate_mean) << ',' << format_double(s.sum_rate_se) << ','
               << format_double(s.avg_mse_mean) << ',' << format_double(s.avg_mse_se) << ','
               << format_double(s.iterations_mean) << '\n';
        }
    }

    void write_gains_csv(const std::vector<MetricRow> &rows, std::ostream &os)
    {
        os << "snr_db,N,N_path_I,bits,delta_r,delta_r_se,g_irs,g_irs_se\n";
        std::vector<CellKey> cells;
        for (const auto &r : rows)
            if (std::find(cells.begin(), cells.end(), r.cell()) == cells.end())
                cells.push_back(r.cell());
        auto column = [&](const CellKey &c, const char *b)
        {
            try
            {
                const PairedDifference d = paired_difference(rows, c, "proposed_pg", b);
                return format_double(d.mean) + "," + format_double(d.se);
            }
            catch (const ReportingError &)
            {
                return std::string(",");
            }
        };
        for (const auto &c : cells)
        {
            cell_columns(os, c);
            os << ',' << column(c, "r_irs_ops") << ',' << column(c, "no_irs_mrt") << '\n';
        }
    }

    void write_experiment_outputs(const std::vector<MetricRow> &rows, const ExperimentSpec &spec,
                                  const std::filesystem::path &dir, bool deterministic)
    {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
            throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());

        auto open = [](const std::filesystem::path &p)
        {
            std::ofstream f(p, std::ios::binary | std::ios::trunc);
            if (!f)
                throw std::runtime_error("cannot write '" + p.string() + "'");
            return f;
        };
        auto finish = [](std::ofstream &f, const std::filesystem::path &p)
        {
            f.flush();
            if (!f)
                throw std::runtime_error("write failed for '" + p.string() + "'");
        };

        const auto results = dir / "results.csv";
        auto f1 = open(results);
        write_results_csv(rows, f1);
        finish(f1, results);

        const auto summary = dir / "summary.csv";
        auto f2 = open(summary);
        write_summary_csv(summarize(rows), f2);
        finish(f2, summary);

        const auto gains = dir / "gains.csv";
        auto f3 = open(gains);
        write_gains_csv(rows, f3);
        finish(f3, gains);

        if (!deterministic)
        {
            nlohmann::json info;
            const std::time_t now = std::time(nullptr);
            char stamp[32];
            std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
            info["generated"] = stamp;
            info["base"] = config_to_json_value(spec.base);
            nlohmann::json methods = nlohmann::json::array();
            for (Method m : spec.methods)
                methods.push_back(to_string(m));
            info["methods"] = methods;
            info["num_realizations"] = spec.num_realizations;
            info["rows"] = rows.size();
            const auto path = dir / "run_info.json";
            auto f4 = open(path);
            f4 << info.dump(2) << '\n';
            finish(f4, path);
        }
    }

    // ----- Invariant suite ---------------------------------------------------

    namespace
    {
        struct Reporter
        {
            std::ostream &os;
            bool all = true;

            void check(bool ok, const std::string &name, const std::string &detail)
            {
                all = all && ok;
                os << (ok ? "PASS " : "FAIL ") << name << " (" << detail << ")\n";
            }
        };

        BlockSet random_blocks(const DesignContext &ctx, int rows_per, bool precoder, std::mt19937_64 &rng)
        {
            BlockSet out;
            for (int l = 0; l < ctx.num_subcarriers; ++l)
                for (int k = 0; k < ctx.num_users; ++k)
                {
                    const int s = ctx.streams(k, l);
                    out.push_back(precoder ? complex_gaussian(rows_per, s, rng) : complex_gaussian(s, rows_per, rng));
                }
            return out;
        }
    }

    bool run_invariant_suite(const SystemConfig &config_in, std::uint64_t seed, std::ostream &os)
    {
        SystemConfig config = config_in;
        config.rng_seed = seed;
        config.validate();
        Reporter rep{os};
        const int instances = 5;

        double grad_err = 0.0, formula_err = 0.0, cycle_inc = -1e300, power_err = 0.0;
        for (int t = 0; t < instances; ++t)
        {
            SystemConfig c = config;
            c.csi_mode = CsiMode::robust;
            const Scenario scn = draw_scenario(c, t);
            const DesignContext ctx = make_design_context(scn.csi, c, true);
            std::mt19937_64 rng(seed * 7919 + static_cast<std::uint64_t>(t));

            // Gradient against central differences of the real objective.
            const BlockSet T = random_blocks(ctx, c.num_rx_antennas, true, rng);
            const CVector g = mse_gradient_nu(T, scn.init_nu, scn.csi, ctx);
            const double h = 1e-6;
            for (Eigen::Index n = 0; n < g.size(); ++n)
            {
                auto f = [&](cplx d)
                {
                    IrsPhases v = scn.init_nu;
                    v.values(n) += d;
                    return uplink_objective(T, v, scn.csi, ctx);
                };
                const double fx = (f(h) - f(-h)) / (2 * h);
                const double fy = (f(cplx(0, h)) - f(cplx(0, -h))) / (2 * h);
                const double ex = 2 * g(n).real(), ey = -2 * g(n).imag();
                grad_err = std::max(grad_err, std::hypot(fx - ex, fy - ey) / std::max(1e-12, std::hypot(ex, ey)));
            }

            // General robust downlink MSE at the MMSE filter against the closed form.
            const BlockSet He = equivalent_channels(scn.csi, scn.init_nu);
            const BlockSet P = random_blocks(ctx, c.num_tx_antennas, true, rng);
            for (int l = 0; l < c.num_subcarriers; ++l)
                for (int k = 0; k < c.num_users; ++k)
                {
                    const CMatrix W = mmse_downlink_filter(k, l, P, He, ctx);
                    const double a = downlink_mse(k, l, P, W, He, scn.init_nu, ctx);
                    const double b = downlink_mse_mmse(k, l, P, He, ctx);
                    formula_err = std::max(formula_err, std::abs(a - b) / std::max(1e-300, std::abs(b)));
                }

            // Duality cycle from MRT + MMSE under perfect CSI, and power conservation.
            const CsiEstimate perfect = perfect_csi(scn.channels, scn.noise);
            const DesignContext pctx = make_design_context(perfect, c, false);
            const BlockSet Hp = equivalent_channels(perfect, scn.init_nu);
            const BlockSet P0 = mrt_precoders(Hp, pctx);
            const BlockSet W0 = mmse_downlink_filters(P0, Hp, pctx);
            BlockSet T1, G1, P1;
            for (int l = 0; l < c.num_subcarriers; ++l)
                bc_to_mac(l, W0, pctx.power_per_subcarrier, scn.noise, T1, pctx);
            mmse_uplink_filters_all(G1, T1, Hp, pctx);
            for (int l = 0; l < c.num_subcarriers; ++l)
                mac_to_bc(l, G1, pctx.power_per_subcarrier, P1, pctx);
            const BlockSet W1 = mmse_downlink_filters(P1, Hp, pctx);
            for (int l = 0; l < c.num_subcarriers; ++l)
            {
                const double before = downlink_sum_mse(l, P0, W0, Hp, scn.init_nu, pctx);
                const double after = downlink_sum_mse(l, P1, W1, Hp, scn.init_nu, pctx);
                cycle_inc = std::max(cycle_inc, after - before);
            }
            power_err = std::max(power_err, std::abs(max_power_ratio(P1, pctx) - 1.0));
        }
        rep.check(grad_err < 1e-5, "gradient_finite_difference", "max rel err " + format_double(grad_err));
        rep.check(formula_err < 1e-9, "downlink_mse_closed_form", "max rel err " + format_double(formula_err));
        rep.check(cycle_inc <= 1e-9, "duality_cycle_non_increasing", "max increase " + format_double(cycle_inc));
        rep.check(power_err < 1e-10, "mac_to_bc_power", "max |ratio - 1| " + format_double(power_err));

        // Monotone trace, feasibility and determinism of the alternating design.
        double worst_inc = -1e300, worst_mod = 0.0, worst_pow = 0.0;
        bool deterministic = true;
        for (int t = 0; t < instances; ++t)
        {
            const Scenario scn = draw_scenario(config, t);
            const bool robust = config.csi_mode == CsiMode::robust;
            const PgSettings settings = PgSettings::from_config(config);
            const DesignResult a = alternating_minimize(scn.csi, config, settings, scn.init_nu, robust);
            const DesignResult b = alternating_minimize(scn.csi, config, settings, scn.init_nu, robust);
            for (std::size_t i = 1; i < a.trace.records.size(); ++i)
                worst_inc = std::max(worst_inc, a.trace.records[i].mse_ul - a.trace.records[i - 1].mse_ul);
            for (Eigen::Index n = 0; n < a.state.nu.size(); ++n)
                worst_mod = std::max(worst_mod, std::abs(std::abs(a.state.nu[n]) - 1.0));
            const DesignContext ctx = make_design_context(scn.csi, config, robust);
            worst_pow = std::max(worst_pow, max_power_ratio(a.state.P, ctx) - 1.0);
            deterministic = deterministic && a.state.nu.values == b.state.nu.values &&
                            a.trace.records.size() == b.trace.records.size();
            for (std::size_t i = 0; deterministic && i < a.trace.records.size(); ++i)
                deterministic = a.trace.records[i].mse_ul == b.trace.records[i].mse_ul;
        }
        rep.check(worst_inc <= 1e-9, "monotone_uplink_mse", "max increase " + format_double(worst_inc));
        rep.check(worst_mod <= 1e-12, "unit_modulus", "max | |nu| - 1 | " + format_double(worst_mod));
        rep.check(worst_pow <= 1e-9, "downlink_power", "max ratio - 1 " + format_double(worst_pow));
        rep.check(deterministic, "deterministic_rerun", deterministic ? "identical" : "differs");
        return rep.all;
    }
}
