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

#ifndef IRSMSE_TESTS_SUPPORT_HPP
#define IRSMSE_TESTS_SUPPORT_HPP

#include "irsmse/channel_gen.hpp"
#include "irsmse/csi.hpp"
#include "irsmse/transceiver.hpp"

#include <random>

namespace irsmse::test
{
    /// Desk-scale configuration with the given csi mode.
    inline SystemConfig desk(CsiMode mode = CsiMode::perfect)
    {
        SystemConfig c = SystemConfig::desk_scale();
        c.csi_mode = mode;
        return c;
    }

    /// Small configuration used by the formula tests (K=2, N_r=2, N_t=4, L=4, N=6).
    inline SystemConfig small()
    {
        SystemConfig c = SystemConfig::desk_scale();
        c.num_users = 2;
        c.num_rx_antennas = 2;
        c.num_tx_antennas = 4;
        c.num_subcarriers = 4;
        c.num_delay_taps = 4;
        c.num_irs_elements = 6;
        c.streams_default = 2;
        c.set_snr_db(5.0);
        c.validate();
        return c;
    }

    /// CSI with i.i.d. CN(0,1) entries; error_scale from the config.
    inline CsiEstimate random_csi(const SystemConfig &c, const NoiseModel &noise, std::mt19937_64 &rng)
    {
        CsiEstimate csi;
        csi.num_users = c.num_users;
        csi.num_subcarriers = c.num_subcarriers;
        csi.num_irs = c.num_irs_elements;
        csi.error_scale = c.error_scale();
        csi.noise = noise;
        for (int i = 0; i < c.num_users * c.num_subcarriers; ++i)
        {
            csi.direct.push_back(complex_gaussian(c.num_rx_antennas, c.num_tx_antennas, rng));
            for (int n = 0; n < c.num_irs_elements; ++n)
                csi.cascaded.push_back(0.5 * complex_gaussian(c.num_rx_antennas, c.num_tx_antennas, rng));
        }
        return csi;
    }

    /// Hermitian positive-definite matrix of size n.
    inline CMatrix random_hpd(int n, std::mt19937_64 &rng)
    {
        const CMatrix a = complex_gaussian(n, n, rng);
        return a * a.adjoint() + CMatrix::Identity(n, n);
    }

    /// Random blocks: precoders (rows x N_s) when `columns_are_streams`, else filters (N_s x rows).
    inline BlockSet random_blocks(const SystemConfig &c, int rows, bool columns_are_streams, std::mt19937_64 &rng)
    {
        BlockSet out;
        for (int l = 0; l < c.num_subcarriers; ++l)
            for (int k = 0; k < c.num_users; ++k)
            {
                const int s = c.streams(k, l);
                out.push_back(columns_are_streams ? complex_gaussian(rows, s, rng) : complex_gaussian(s, rows, rng));
            }
        return out;
    }

    inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

    inline double rel_err(const CMatrix &a, const CMatrix &b)
    {
        return (a - b).norm() / std::max(1e-300, b.norm());
    }
}

#endif
