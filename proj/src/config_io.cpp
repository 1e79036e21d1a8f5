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

#include "irsmse/config_io.hpp"
#include "json_util.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace irsmse
{
    namespace
    {
        template <class T>
        void read(const nlohmann::json &obj, const char *key, T &dst)
        {
            auto it = obj.find(key);
            if (it == obj.end())
                return;
            dst = json_util::get<T>(*it, key);
        }
    }

    SystemConfig config_from_json(const nlohmann::json &obj)
    {
        if (!obj.is_object())
            throw ConfigError("configuration must be a JSON object");

        static const std::vector<std::string> known = {
            "preset", "num_tx_antennas", "num_rx_antennas", "num_users", "num_subcarriers", "num_irs_elements",
            "streams_per_user_per_subcarrier", "total_power", "noise_power", "snr_db", "carrier_freq", "bandwidth",
            "sampling_rate", "num_delay_taps", "paths_bs_irs", "paths_irs_user", "paths_direct", "rolloff",
            "direct_link_gain", "cascaded_link_gain", "positive_dft_exponent", "frequency_dependent_arrays",
            "pg_initial_step", "mse_tolerance", "max_iterations", "max_halvings", "reset_step_each_iteration",
            "pg_compare_previous_iterate", "rng_seed", "csi_mode", "quantization_bits"};
        json_util::reject_unknown(obj, known, "configuration");

        SystemConfig c;
        if (auto it = obj.find("preset"); it != obj.end())
        {
            const auto name = json_util::get<std::string>(*it, "preset");
            if (name == "full")
                c = SystemConfig::full_scale();
            else if (name == "desk")
                c = SystemConfig::desk_scale();
            else
                throw ConfigError("unknown preset '" + name + "' (expected full or desk)");
        }

        read(obj, "num_tx_antennas", c.num_tx_antennas);
        read(obj, "num_rx_antennas", c.num_rx_antennas);
        read(obj, "num_users", c.num_users);
        read(obj, "num_subcarriers", c.num_subcarriers);
        read(obj, "num_irs_elements", c.num_irs_elements);
        read(obj, "noise_power", c.noise_power);
        read(obj, "carrier_freq", c.carrier_freq);
        read(obj, "bandwidth", c.bandwidth);
        read(obj, "sampling_rate", c.sampling_rate);
        read(obj, "num_delay_taps", c.num_delay_taps);
        read(obj, "paths_bs_irs", c.paths_bs_irs);
        read(obj, "paths_irs_user", c.paths_irs_user);
        read(obj, "paths_direct", c.paths_direct);
        read(obj, "rolloff", c.rolloff);
        read(obj, "direct_link_gain", c.direct_link_gain);
        read(obj, "cascaded_link_gain", c.cascaded_link_gain);
        read(obj, "positive_dft_exponent", c.positive_dft_exponent);
        read(obj, "frequency_dependent_arrays", c.frequency_dependent_arrays);
        read(obj, "pg_initial_step", c.pg_initial_step);
        read(obj, "max_iterations", c.max_iterations);
        read(obj, "max_halvings", c.max_halvings);
        read(obj, "reset_step_each_iteration", c.reset_step_each_iteration);
        read(obj, "pg_compare_previous_iterate", c.pg_compare_previous_iterate);
        read(obj, "rng_seed", c.rng_seed);

        if (auto it = obj.find("mse_tolerance"); it != obj.end())
            c.mse_tolerance = json_util::get<double>(*it, "mse_tolerance");
        if (auto it = obj.find("quantization_bits"); it != obj.end() && !it->is_null())
            c.quantization_bits = json_util::get<int>(*it, "quantization_bits");
        if (auto it = obj.find("csi_mode"); it != obj.end())
            c.csi_mode = csi_mode_from_string(json_util::get<std::string>(*it, "csi_mode"));

        if (auto it = obj.find("streams_per_user_per_subcarrier"); it != obj.end())
        {
            if (it->is_number_integer())
            {
                c.streams_default = it->get<int>();
                c.streams_map.clear();
            }
            else if (it->is_array())
            {
                if (static_cast<int>(it->size()) != c.num_users)
                    throw ConfigError("streams_per_user_per_subcarrier must have num_users rows");
                c.streams_map.clear();
                for (const auto &row : *it)
                {
                    if (!row.is_array() || static_cast<int>(row.size()) != c.num_subcarriers)
                        throw ConfigError("streams_per_user_per_subcarrier rows must have num_subcarriers entries");
                    for (const auto &v : row)
                        c.streams_map.push_back(json_util::get<int>(v, "streams_per_user_per_subcarrier"));
                }
            }
            else
                throw ConfigError("streams_per_user_per_subcarrier must be an integer or a K x L array");
        }

        const bool has_power = obj.contains("total_power");
        const bool has_snr = obj.contains("snr_db");
        if (has_power && has_snr)
            throw ConfigError("give at most one of total_power and snr_db");
        if (has_power)
        {
            read(obj, "total_power", c.total_power);
            c.snr_db = 10.0 * std::log10(c.total_power / (c.num_subcarriers * c.noise_power));
        }
        else
        {
            double snr = c.snr_db;
            read(obj, "snr_db", snr);
            c.set_snr_db(snr);
        }

        c.validate();
        return c;
    }

    SystemConfig parse_config(const std::string &json_text)
    {
        return config_from_json(json_util::parse(json_text, "configuration"));
    }

    std::string read_text_file(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError("cannot open '" + path.string() + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    SystemConfig load_config(const std::filesystem::path &path)
    {
        try
        {
            return parse_config(read_text_file(path));
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(path.string() + ": " + e.what());
        }
    }

    nlohmann::json config_to_json_value(const SystemConfig &c)
    {
        nlohmann::json j;
        j["num_tx_antennas"] = c.num_tx_antennas;
        j["num_rx_antennas"] = c.num_rx_antennas;
        j["num_users"] = c.num_users;
        j["num_subcarriers"] = c.num_subcarriers;
        j["num_irs_elements"] = c.num_irs_elements;
        if (c.streams_map.empty())
            j["streams_per_user_per_subcarrier"] = c.streams_default;
        else
        {
            nlohmann::json rows = nlohmann::json::array();
            for (int k = 0; k < c.num_users; ++k)
            {
                nlohmann::json row = nlohmann::json::array();
                for (int l = 0; l < c.num_subcarriers; ++l)
                    row.push_back(c.streams(k, l));
                rows.push_back(row);
            }
            j["streams_per_user_per_subcarrier"] = rows;
        }
        j["total_power"] = c.total_power;
        j["noise_power"] = c.noise_power;
        j["carrier_freq"] = c.carrier_freq;
        j["bandwidth"] = c.bandwidth;
        j["sampling_rate"] = c.sampling_rate;
        j["num_delay_taps"] = c.num_delay_taps;
        j["paths_bs_irs"] = c.paths_bs_irs;
        j["paths_irs_user"] = c.paths_irs_user;
        j["paths_direct"] = c.paths_direct;
        j["rolloff"] = c.rolloff;
        j["direct_link_gain"] = c.direct_link_gain;
        j["cascaded_link_gain"] = c.cascaded_link_gain;
        j["positive_dft_exponent"] = c.positive_dft_exponent;
        j["frequency_dependent_arrays"] = c.frequency_dependent_arrays;
        j["pg_initial_step"] = c.pg_initial_step;
        if (c.mse_tolerance)
            j["mse_tolerance"] = *c.mse_tolerance;
        j["max_iterations"] = c.max_iterations;
        j["max_halvings"] = c.max_halvings;
        j["reset_step_each_iteration"] = c.reset_step_each_iteration;
        j["pg_compare_previous_iterate"] = c.pg_compare_previous_iterate;
        j["rng_seed"] = c.rng_seed;
        j["csi_mode"] = to_string(c.csi_mode);
        if (c.quantization_bits)
            j["quantization_bits"] = *c.quantization_bits;
        return j;
    }

    std::string config_to_json(const SystemConfig &config)
    {
        return config_to_json_value(config).dump(2);
    }
}
