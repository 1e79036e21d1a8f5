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

#include "irsmse/core_model.hpp"
#include "irsmse/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <Eigen/Eigenvalues>

namespace irsmse
{
    std::string to_string(CsiMode mode)
    {
        switch (mode)
        {
        case CsiMode::perfect:
            return "perfect";
        case CsiMode::robust:
            return "robust";
        case CsiMode::non_robust:
            return "non_robust";
        }
        return "unknown";
    }

    CsiMode csi_mode_from_string(const std::string &name)
    {
        if (name == "perfect")
            return CsiMode::perfect;
        if (name == "robust")
            return CsiMode::robust;
        if (name == "non_robust")
            return CsiMode::non_robust;
        throw ConfigError("unknown csi_mode '" + name + "' (expected perfect, robust or non_robust)");
    }

    // ----- SystemConfig ----------------------------------------------------

    SystemConfig SystemConfig::full_scale()
    {
        SystemConfig c;
        c.set_snr_db(10.0);
        return c;
    }

    SystemConfig SystemConfig::desk_scale()
    {
        SystemConfig c;
        c.num_users = 2;
        c.num_rx_antennas = 2;
        c.num_tx_antennas = 4;
        c.num_subcarriers = 8;
        c.num_irs_elements = 9;
        c.streams_default = 2;
        c.set_snr_db(10.0);
        return c;
    }

    void SystemConfig::set_snr_db(double snr)
    {
        snr_db = snr;
        total_power = num_subcarriers * std::pow(10.0, snr / 10.0) * noise_power;
    }

    int SystemConfig::streams(int k, int l) const
    {
        if (streams_map.empty())
            return streams_default;
        return streams_map[static_cast<std::size_t>(k) * num_subcarriers + l];
    }

    int SystemConfig::streams_on_subcarrier(int l) const
    {
        int s = 0;
        for (int k = 0; k < num_users; ++k)
            s += streams(k, l);
        return s;
    }

    int SystemConfig::total_streams() const
    {
        int s = 0;
        for (int l = 0; l < num_subcarriers; ++l)
            s += streams_on_subcarrier(l);
        return s;
    }

    double SystemConfig::power_per_subcarrier() const
    {
        return total_power / num_subcarriers;
    }

    double SystemConfig::tolerance() const
    {
        return mse_tolerance.value_or(1e-5 * total_streams());
    }

    void SystemConfig::validate() const
    {
        auto require = [](bool ok, const std::string &what)
        {
            if (!ok)
                throw ConfigError(what);
        };
        require(num_tx_antennas >= 1, "num_tx_antennas must be positive");
        require(num_rx_antennas >= 1, "num_rx_antennas must be positive");
        require(num_users >= 1, "num_users must be positive");
        require(num_subcarriers >= 1, "num_subcarriers must be positive");
        require(num_irs_elements >= 0, "num_irs_elements must be non-negative");
        require(streams_map.empty() || streams_map.size() == static_cast<std::size_t>(num_users) * num_subcarriers,
                "streams_per_user_per_subcarrier must have num_users x num_subcarriers entries");
        const int max_streams = std::min(num_rx_antennas, num_tx_antennas);
        for (int l = 0; l < num_subcarriers; ++l)
        {
            for (int k = 0; k < num_users; ++k)
            {
                const int s = streams(k, l);
                require(s >= 1, "stream counts must be positive");
                require(s <= max_streams, "stream count exceeds min(num_rx_antennas, num_tx_antennas)");
            }
            require(streams_on_subcarrier(l) <= num_tx_antennas, "total streams on a subcarrier exceed num_tx_antennas");
        }
        require(std::isfinite(total_power) && total_power > 0.0, "total_power must be positive");
        require(std::isfinite(noise_power) && noise_power > 0.0, "noise_power must be positive");
        require(carrier_freq > 0.0, "carrier_freq must be positive");
        require(bandwidth > 0.0, "bandwidth must be positive");
        require(sampling_rate > 0.0, "sampling_rate must be positive");
        require(num_delay_taps >= 1, "num_delay_taps must be positive");
        require(num_subcarriers >= num_delay_taps, "num_subcarriers must be at least num_delay_taps");
        require(paths_bs_irs >= 1 && paths_irs_user >= 1 && paths_direct >= 1, "path counts must be positive");
        require(rolloff >= 0.0 && rolloff <= 1.0, "rolloff must lie in [0, 1]");
        require(direct_link_gain >= 0.0 && cascaded_link_gain >= 0.0, "link gains must be non-negative");
        require(pg_initial_step > 0.0, "pg_initial_step must be positive");
        require(!mse_tolerance || *mse_tolerance > 0.0, "mse_tolerance must be positive");
        require(max_iterations >= 1, "max_iterations must be positive");
        require(max_halvings >= 1, "max_halvings must be positive");
        require(!quantization_bits || *quantization_bits >= 1, "quantization_bits must be positive");
    }

    double power_per_subcarrier(const SystemConfig &config)
    {
        return config.power_per_subcarrier();
    }

    // ----- IrsPhases -------------------------------------------------------

    IrsPhases IrsPhases::from_angles(const Eigen::VectorXd &theta)
    {
        CVector v(theta.size());
        for (Eigen::Index n = 0; n < theta.size(); ++n)
            v(n) = std::polar(1.0, theta(n));
        return IrsPhases(std::move(v));
    }

    bool IrsPhases::is_unit_modulus(double tol) const
    {
        for (Eigen::Index n = 0; n < values.size(); ++n)
            if (std::abs(std::abs(values(n)) - 1.0) > tol)
                return false;
        return true;
    }

    // ----- NoiseModel ------------------------------------------------------

    NoiseModel::NoiseModel(std::vector<CMatrix> covariances) : cov_(std::move(covariances))
    {
        for (const auto &C : cov_)
        {
            if (!linalg::is_hermitian(C, 1e-12))
                throw ConfigError("noise covariance is not Hermitian");
            Eigen::SelfAdjointEigenSolver<CMatrix> es(C, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() <= 0.0)
                throw ConfigError("noise covariance is not positive definite");
            sqrt_.push_back(linalg::hermitian_sqrt(C));
            inv_sqrt_.push_back(linalg::hermitian_inv_sqrt(C));
        }
    }

    NoiseModel NoiseModel::white(int num_users, int num_rx, double sigma2)
    {
        std::vector<CMatrix> covs(static_cast<std::size_t>(num_users),
                                  sigma2 * CMatrix::Identity(num_rx, num_rx));
        return NoiseModel(std::move(covs));
    }

    // ----- ChannelSet ------------------------------------------------------

    CMatrix ChannelSet::cascaded_term(int k, int l, int n) const
    {
        return H_I(k, l).col(n) * H_BI(l).row(n);
    }

    CMatrix ChannelSet::equivalent(int k, int l, const IrsPhases &nu) const
    {
        CMatrix out = H_B(k, l);
        if (num_irs > 0)
            out.noalias() += H_I(k, l) * nu.values.asDiagonal() * H_BI(l);
        return out;
    }

    ChannelSet ChannelSet::without_irs() const
    {
        ChannelSet out;
        out.num_users = num_users;
        out.num_subcarriers = num_subcarriers;
        out.num_irs = 0;
        out.direct = direct;
        for (const auto &h : bs_irs)
            out.bs_irs.emplace_back(0, h.cols());
        for (const auto &h : irs_user)
            out.irs_user.emplace_back(h.rows(), 0);
        return out;
    }

    bool ChannelSet::all_finite() const
    {
        auto finite = [](const std::vector<CMatrix> &v)
        {
            return std::all_of(v.begin(), v.end(), [](const CMatrix &m)
                               { return m.allFinite(); });
        };
        return finite(direct) && finite(bs_irs) && finite(irs_user);
    }

    CMatrix assemble_equivalent_channel(const CMatrix &direct,
                                        std::span<const CMatrix> cascaded_terms,
                                        const IrsPhases &nu)
    {
        if (static_cast<Eigen::Index>(cascaded_terms.size()) != nu.size())
            throw ConfigError("cascaded term count does not match the number of IRS elements");
        CMatrix out = direct;
        for (std::size_t n = 0; n < cascaded_terms.size(); ++n)
        {
            const CMatrix &term = cascaded_terms[n];
            if (term.rows() != direct.rows() || term.cols() != direct.cols())
                throw ConfigError("cascaded term dimensions do not match the direct channel");
            out += nu[static_cast<Eigen::Index>(n)] * term;
        }
        return out;
    }

    std::uint64_t content_hash(std::span<const CMatrix> matrices, std::uint64_t seed)
    {
        std::uint64_t h = seed;
        auto mix = [&h](const void *data, std::size_t bytes)
        {
            const auto *p = static_cast<const unsigned char *>(data);
            for (std::size_t i = 0; i < bytes; ++i)
            {
                h ^= p[i];
                h *= 1099511628211ULL;
            }
        };
        for (const auto &m : matrices)
        {
            const std::int64_t dims[2] = {m.rows(), m.cols()};
            mix(dims, sizeof(dims));
            mix(m.data(), sizeof(cplx) * static_cast<std::size_t>(m.size()));
        }
        return h;
    }
}
