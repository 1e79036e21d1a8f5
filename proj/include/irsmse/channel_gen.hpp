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

#ifndef IRSMSE_CHANNEL_GEN_HPP
#define IRSMSE_CHANNEL_GEN_HPP

#include "irsmse/core_model.hpp"

#include <filesystem>
#include <random>

namespace irsmse
{
    constexpr double speed_of_light = 299792458.0;

    /// One propagation path of the clustered delay-tap model.
    struct PathParams
    {
        cplx gain{1.0, 0.0}; // beta_j
        double delay = 0.0;  // tau_j in seconds
        double aoa_azimuth = 0.0;
        double aoa_elevation = 0.0;
        double aod_azimuth = 0.0;
        double aod_elevation = 0.0;
    };

    /// Uniform planar array N_a x N_b with element spacing in meters.
    struct ArrayGeometry
    {
        int n_a = 1;
        int n_b = 1;
        double spacing = 0.0;

        int size() const { return n_a * n_b; }

        /// Squarest factorization of `ports` (N_a = first divisor at or below ceil(sqrt(ports))),
        /// half-wavelength spacing at the carrier.
        static ArrayGeometry for_ports(int ports, double carrier_freq);
    };

    /// Raised-cosine pulse; returns the analytic limit at t = +-T_s / (2 rolloff).
    double raised_cosine(double t, double T_s, double rolloff);

    /// Unit-norm UPA response. Element (p, q) sits at index p * N_b + q with phase
    /// (2 pi d f / c) (p sin(phi) sin(psi) + q cos(psi)).
    CVector upa_response(double azimuth, double elevation, const ArrayGeometry &geom, double frequency);

    /// Delay-domain taps H_temp[m], m = 0 .. L_D - 1, with arrays evaluated at the carrier.
    std::vector<CMatrix> gen_time_taps(std::span<const PathParams> paths,
                                       const ArrayGeometry &geom_rx,
                                       const ArrayGeometry &geom_tx,
                                       const SystemConfig &config);

    /// H[l] = sum_m H_temp[m] exp(+-j 2 pi m l / L), l = 0 .. L - 1.
    std::vector<CMatrix> taps_to_frequency(std::span<const CMatrix> taps, int num_subcarriers,
                                           bool positive_exponent = true);

    /// Subcarrier centre frequency f_c + B ((l / L) - 1/2), l zero-based.
    double subcarrier_frequency(const SystemConfig &config, int l);

    /// Draws `count` paths: CN(0,1) gains, angles U[0, pi], delays U[0, (L_D - 1) T_s].
    std::vector<PathParams> draw_paths(int count, const SystemConfig &config, std::mt19937_64 &rng);

    /// Frequency responses of one link built from explicit paths.
    std::vector<CMatrix> link_response(std::span<const PathParams> paths,
                                       const ArrayGeometry &geom_rx,
                                       const ArrayGeometry &geom_tx,
                                       const SystemConfig &config);

    /// Full scenario: BS-user direct links, the BS-IRS link and the IRS-user links.
    ChannelSet gen_scenario(const SystemConfig &config, std::mt19937_64 &rng);

    // ----- Channel dump ------------------------------------------------------
    //
    // Little-endian binary file:
    //   magic "IRSCHAN1" (8 bytes), u32 K, u32 L, u32 N, u32 record count,
    //   then per record: u8 link (0 direct, 1 bs_irs, 2 irs_user), u32 k, u32 l,
    //   u32 rows, u32 cols, rows * cols pairs of f64 (re, im) in row-major order.
    // Records appear in the order direct(l, k), bs_irs(l), irs_user(l, k).

    void write_channel_dump(const ChannelSet &channels, const std::filesystem::path &path);
    ChannelSet read_channel_dump(const std::filesystem::path &path);
}

#endif
