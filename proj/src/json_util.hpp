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

// Internal helpers shared by the JSON readers.

#ifndef IRSMSE_JSON_UTIL_HPP
#define IRSMSE_JSON_UTIL_HPP

#include "irsmse/core_model.hpp"

#include <json.hpp>

#include <algorithm>
#include <string>
#include <vector>

namespace irsmse
{
    SystemConfig config_from_json(const nlohmann::json &obj);
    nlohmann::json config_to_json_value(const SystemConfig &config);
}

namespace irsmse::json_util
{
    inline nlohmann::json parse(const std::string &text, const std::string &what)
    {
        try
        {
            return nlohmann::json::parse(text);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ConfigError(what + " is not valid JSON: " + e.what());
        }
    }

    template <class T>
    T get(const nlohmann::json &value, const std::string &key)
    {
        if constexpr (std::is_same_v<T, bool>)
        {
            if (!value.is_boolean())
                throw ConfigError("'" + key + "' must be a boolean");
        }
        else if constexpr (std::is_integral_v<T>)
        {
            if (!value.is_number_integer())
                throw ConfigError("'" + key + "' must be an integer");
            if constexpr (std::is_unsigned_v<T>)
                if (value.is_number_integer() && !value.is_number_unsigned() && value.get<long long>() < 0)
                    throw ConfigError("'" + key + "' must be non-negative");
        }
        else if constexpr (std::is_floating_point_v<T>)
        {
            if (!value.is_number())
                throw ConfigError("'" + key + "' must be a number");
        }
        else if constexpr (std::is_same_v<T, std::string>)
        {
            if (!value.is_string())
                throw ConfigError("'" + key + "' must be a string");
        }
        return value.get<T>();
    }

    inline void reject_unknown(const nlohmann::json &obj, const std::vector<std::string> &known, const std::string &where)
    {
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (std::find(known.begin(), known.end(), it.key()) == known.end())
                throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

#endif
