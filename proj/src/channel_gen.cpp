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

#include "irsmse/channel_gen.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

namespace irsmse
{
    using std::numbers::pi;

    ArrayGeometry ArrayGeometry::for_ports(int ports, double carrier_freq)
    {
        ArrayGeometry g;
        g.spacing = 0.5 * speed_of_light / carrier_freq;
        if (ports <= 0)
        {
            g.n_a = 0;
            g.n_b = 0;
            return g;
        }
        int a = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(ports))));
        while (a > 1 && ports % a != 0)
            --a;
        g.n_a = a;
        g.n_b = ports / a;
        return g;
    }

    double raised_cosine(double t, double T_s, double rolloff)
    {
        const double x = t / T_s;
        if (x == 0.0)
            return 1.0;
        if (x == std::round(x))
            return 0.0; // Nyquist zero crossings
        const double sinc = std::sin(pi * x) / (pi * x);
        if (rolloff == 0.0)
            return sinc;
        const double edge = 1.0 / (2.0 * rolloff);
        if (std::abs(std::abs(x) - edge) < 1e-12 * edge)
        {
            const double y = pi / (2.0 * rolloff);
            return (pi / 4.0) * std::sin(y) / y;
        }
        const double r = 2.0 * rolloff * x;
        return sinc * std::cos(pi * rolloff * x) / (1.0 - r * r);
    }

    CVector upa_response(double azimuth, double elevation, const ArrayGeometry &geom, double frequency)
    {
        const int n = geom.size();
        CVector a(n);
        const double k0 = 2.0 * pi * geom.spacing * frequency / speed_of_light;
        const double u = std::sin(azimuth) * std::sin(elevation);
        const double v = std::cos(elevation);
        const double norm = 1.0 / std::sqrt(static_cast<double>(n));
        for (int p = 0; p < geom.n_a; ++p)
            for (int q = 0; q < geom.n_b; ++q)
                a(p * geom.n_b + q) = std::polar(norm, k0 * (p * u + q * v));
        return a;
    }

    std::vector<CMatrix> gen_time_taps(std::span<const PathParams> paths,
                                       const ArrayGeometry &geom_rx,
                                       const ArrayGeometry &geom_tx,
                                       const SystemConfig &config)
    {
        const int rows = geom_rx.size();
        const int cols = geom_tx.size();
        const double T_s = 1.0 / config.sampling_rate;
        const double gamma = std::sqrt(static_cast<double>(rows) * cols / static_cast<double>(paths.size()));

        std::vector<CMatrix> taps(static_cast<std::size_t>(config.num_delay_taps), CMatrix::Zero(rows, cols));
        for (const auto &path : paths)
        {
            const CVector a_r = upa_response(path.aoa_azimuth, path.aoa_elevation, geom_rx, config.carrier_freq);
            const CVector a_t = upa_response(path.aod_azimuth, path.aod_elevation, geom_tx, config.carrier_freq);
            const CMatrix outer = a_r * a_t.adjoint();
            for (int m = 0; m < config.num_delay_taps; ++m)
            {
                const double p = raised_cosine(m * T_s - path.delay, T_s, config.rolloff);
                if (p != 0.0)
                    taps[m] += (gamma * path.gain * p) * outer;
            }
        }
        return taps;
    }

    std::vector<CMatrix> taps_to_frequency(std::span<const CMatrix> taps, int num_subcarriers, bool positive_exponent)
    {
        const double sign = positive_exponent ? 1.0 : -1.0;
        std::vector<CMatrix> out;
        out.reserve(static_cast<std::size_t>(num_subcarriers));
        for (int l = 0; l < num_subcarriers; ++l)
        {
            CMatrix H = CMatrix::Zero(taps.empty() ? 0 : taps[0].rows(), taps.empty() ? 0 : taps[0].cols());
            for (std::size_t m = 0; m < taps.size(); ++m)
            {
                // m * l is reduced mod L so that l and l + L give identical phases.
                const long long idx = (static_cast<long long>(m) * l) % num_subcarriers;
                H += std::polar(1.0, sign * 2.0 * pi * static_cast<double>(idx) / num_subcarriers) * taps[m];
            }
            out.push_back(std::move(H));
        }
        return out;
    }

    double subcarrier_frequency(const SystemConfig &config, int l)
    {
        return config.carrier_freq + config.bandwidth * (static_cast<double>(l) / config.num_subcarriers - 0.5);
    }

    std::vector<PathParams> draw_paths(int count, const SystemConfig &config, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
        std::uniform_real_distribution<double> angle(0.0, pi);
        std::uniform_real_distribution<double> delay(0.0, (config.num_delay_taps - 1) / config.sampling_rate);
        std::vector<PathParams> paths(static_cast<std::size_t>(count));
        for (auto &p : paths)
        {
            const double re = gauss(rng);
            const double im = gauss(rng);
            p.gain = cplx(re, im);
            p.delay = delay(rng);
            p.aoa_azimuth = angle(rng);
            p.aoa_elevation = angle(rng);
            p.aod_azimuth = angle(rng);
            p.aod_elevation = angle(rng);
        }
        return paths;
    }

    std::vector<CMatrix> link_response(std::span<const PathParams> paths,
                                       const ArrayGeometry &geom_rx,
                                       const ArrayGeometry &geom_tx,
                                       const SystemConfig &config)
    {
        if (!config.frequency_dependent_arrays)
        {
            const auto taps = gen_time_taps(paths, geom_rx, geom_tx, config);
            return taps_to_frequency(taps, config.num_subcarriers, config.positive_dft_exponent);
        }

        // Beam-squint variant: per-subcarrier path gains with arrays evaluated at f_l.
        const int L = config.num_subcarriers;
        const double T_s = 1.0 / config.sampling_rate;
        const double sign = config.positive_dft_exponent ? 1.0 : -1.0;
        const double gamma = std::sqrt(static_cast<double>(geom_rx.size()) * geom_tx.size() / static_cast<double>(paths.size()));
        std::vector<CMatrix> out(static_cast<std::size_t>(L), CMatrix::Zero(geom_rx.size(), geom_tx.size()));
        for (int l = 0; l < L; ++l)
        {
            const double f = subcarrier_frequency(config, l);
            for (const auto &path : paths)
            {
                cplx beta_l = 0.0;
                for (int m = 0; m < config.num_delay_taps; ++m)
                {
                    const long long idx = (static_cast<long long>(m) * l) % L;
                    beta_l += raised_cosine(m * T_s - path.delay, T_s, config.rolloff) *
                              std::polar(1.0, sign * 2.0 * pi * static_cast<double>(idx) / L);
                }
                beta_l *= gamma * path.gain;
                const CVector a_r = upa_response(path.aoa_azimuth, path.aoa_elevation, geom_rx, f);
                const CVector a_t = upa_response(path.aod_azimuth, path.aod_elevation, geom_tx, f);
                out[l] += beta_l * a_r * a_t.adjoint();
            }
        }
        return out;
    }

    ChannelSet gen_scenario(const SystemConfig &config, std::mt19937_64 &rng)
    {
        const int K = config.num_users;
        const int L = config.num_subcarriers;
        const int N = config.num_irs_elements;
        const auto bs = ArrayGeometry::for_ports(config.num_tx_antennas, config.carrier_freq);
        const auto ue = ArrayGeometry::for_ports(config.num_rx_antennas, config.carrier_freq);
        const auto irs = ArrayGeometry::for_ports(N, config.carrier_freq);

        ChannelSet cs;
        cs.num_users = K;
        cs.num_subcarriers = L;
        cs.num_irs = N;
        cs.direct.resize(static_cast<std::size_t>(K) * L);
        cs.irs_user.resize(static_cast<std::size_t>(K) * L);

        const double direct_amp = std::sqrt(config.direct_link_gain);
        const double cascaded_amp = std::sqrt(config.cascaded_link_gain);

        if (N > 0)
        {
            const auto paths = draw_paths(config.paths_bs_irs, config, rng);
            cs.bs_irs = link_response(paths, irs, bs, config);
            for (auto &h : cs.bs_irs)
                h *= cascaded_amp;
        }
        else
        {
            cs.bs_irs.assign(static_cast<std::size_t>(L), CMatrix(0, config.num_tx_antennas));
        }

        for (int k = 0; k < K; ++k)
        {
            const auto direct_paths = draw_paths(config.paths_direct, config, rng);
            const auto direct = link_response(direct_paths, ue, bs, config);
            std::vector<CMatrix> irs_user;
            if (N > 0)
            {
                const auto paths = draw_paths(config.paths_irs_user, config, rng);
                irs_user = link_response(paths, ue, irs, config);
            }
            for (int l = 0; l < L; ++l)
            {
                cs.direct[l * K + k] = direct_amp * direct[l];
                cs.irs_user[l * K + k] = N > 0 ? irs_user[l] : CMatrix(config.num_rx_antennas, 0);
            }
        }
        return cs;
    }

    // ----- Channel dump ------------------------------------------------------

    namespace
    {
        constexpr char dump_magic[8] = {'I', 'R', 'S', 'C', 'H', 'A', 'N', '1'};

        template <class T>
        void put(std::ostream &os, T value)
        {
            os.write(reinterpret_cast<const char *>(&value), sizeof(T));
        }

        template <class T>
        T get(std::istream &is)
        {
            T value{};
            is.read(reinterpret_cast<char *>(&value), sizeof(T));
            if (!is)
                throw ConfigError("truncated channel dump");
            return value;
        }

        void put_record(std::ostream &os, std::uint8_t link, int k, int l, const CMatrix &m)
        {
            put<std::uint8_t>(os, link);
            put<std::uint32_t>(os, static_cast<std::uint32_t>(k));
            put<std::uint32_t>(os, static_cast<std::uint32_t>(l));
            put<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows()));
            put<std::uint32_t>(os, static_cast<std::uint32_t>(m.cols()));
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                for (Eigen::Index c = 0; c < m.cols(); ++c)
                {
                    put<double>(os, m(r, c).real());
                    put<double>(os, m(r, c).imag());
                }
        }
    }

    void write_channel_dump(const ChannelSet &cs, const std::filesystem::path &path)
    {
        static_assert(std::endian::native == std::endian::little, "channel dump assumes a little-endian host");
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw std::runtime_error("cannot open channel dump for writing: " + path.string());
        os.write(dump_magic, sizeof(dump_magic));
        put<std::uint32_t>(os, static_cast<std::uint32_t>(cs.num_users));
        put<std::uint32_t>(os, static_cast<std::uint32_t>(cs.num_subcarriers));
        put<std::uint32_t>(os, static_cast<std::uint32_t>(cs.num_irs));
        const auto records = cs.direct.size() + cs.bs_irs.size() + cs.irs_user.size();
        put<std::uint32_t>(os, static_cast<std::uint32_t>(records));
        for (int l = 0; l < cs.num_subcarriers; ++l)
            for (int k = 0; k < cs.num_users; ++k)
                put_record(os, 0, k, l, cs.H_B(k, l));
        for (int l = 0; l < cs.num_subcarriers; ++l)
            put_record(os, 1, 0, l, cs.H_BI(l));
        for (int l = 0; l < cs.num_subcarriers; ++l)
            for (int k = 0; k < cs.num_users; ++k)
                put_record(os, 2, k, l, cs.H_I(k, l));
        if (!os)
            throw std::runtime_error("failed writing channel dump: " + path.string());
    }

    ChannelSet read_channel_dump(const std::filesystem::path &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw std::runtime_error("cannot open channel dump: " + path.string());
        char magic[8];
        is.read(magic, sizeof(magic));
        if (!is || std::memcmp(magic, dump_magic, sizeof(magic)) != 0)
            throw ConfigError("not a channel dump: " + path.string());

        ChannelSet cs;
        cs.num_users = static_cast<int>(get<std::uint32_t>(is));
        cs.num_subcarriers = static_cast<int>(get<std::uint32_t>(is));
        cs.num_irs = static_cast<int>(get<std::uint32_t>(is));
        const auto records = get<std::uint32_t>(is);
        const auto KL = static_cast<std::size_t>(cs.num_users) * cs.num_subcarriers;
        if (records != 2 * KL + static_cast<std::size_t>(cs.num_subcarriers))
            throw ConfigError("channel dump record count does not match its header");
        cs.direct.resize(KL);
        cs.bs_irs.resize(static_cast<std::size_t>(cs.num_subcarriers));
        cs.irs_user.resize(KL);

        for (std::uint32_t i = 0; i < records; ++i)
        {
            const auto link = get<std::uint8_t>(is);
            const auto k = static_cast<int>(get<std::uint32_t>(is));
            const auto l = static_cast<int>(get<std::uint32_t>(is));
            const auto rows = get<std::uint32_t>(is);
            const auto cols = get<std::uint32_t>(is);
            if (k >= cs.num_users || l >= cs.num_subcarriers || link > 2)
                throw ConfigError("channel dump record index out of range");
            CMatrix m(rows, cols);
            for (std::uint32_t r = 0; r < rows; ++r)
                for (std::uint32_t c = 0; c < cols; ++c)
                {
                    const double re = get<double>(is);
                    const double im = get<double>(is);
                    m(r, c) = cplx(re, im);
                }
            const auto idx = static_cast<std::size_t>(l) * cs.num_users + k;
            if (link == 0)
                cs.direct[idx] = std::move(m);
            else if (link == 1)
                cs.bs_irs[static_cast<std::size_t>(l)] = std::move(m);
            else
                cs.irs_user[idx] = std::move(m);
        }
        return cs;
    }
}
