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

#ifndef IRSMSE_CONFIG_IO_HPP
#define IRSMSE_CONFIG_IO_HPP

#include "irsmse/core_model.hpp"

#include <filesystem>
#include <string>

namespace irsmse
{
    /// Parses a JSON object whose keys are SystemConfig field names.
    ///
    /// Extra keys: "preset" ("full" or "desk") selects the starting point, and
    /// "streams_per_user_per_subcarrier" takes an integer or a K x L nested array.
    /// At most one of "total_power" and "snr_db" may be given; without either, the preset SNR is
    /// re-applied after the dimensions are read. Unknown keys and wrong types raise ConfigError.
    /// The result is validated.
    SystemConfig parse_config(const std::string &json_text);

    /// Same as parse_config() on the contents of `path`.
    SystemConfig load_config(const std::filesystem::path &path);

    /// Canonical JSON text of a configuration (round-trips through parse_config()).
    std::string config_to_json(const SystemConfig &config);

    /// Reads a whole file; throws ConfigError naming the path on failure.
    std::string read_text_file(const std::filesystem::path &path);
}

#endif
