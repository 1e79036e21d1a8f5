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

#ifndef IRSMSE_CORE_MODEL_HPP
#define IRSMSE_CORE_MODEL_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace irsmse
{
    using cplx = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;

    // ----- Errors -----------------------------------------------------------

    /// Invalid or inconsistent configuration (CLI exit code 2).
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// A transform hit a state it cannot normalize, e.g. all-zero filters (CLI exit code 3).
    class DegenerateStateError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// A requested aggregate has no matching rows.
    class ReportingError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // ----- Configuration ----------------------------------------------------

    enum class CsiMode
    {
        perfect,
        robust,
        non_robust
    };

    std::string to_string(CsiMode mode);
    CsiMode csi_mode_from_string(const std::string &name);

    /// All scenario constants. Powers are linear; dB only enters through set_snr_db().
    struct SystemConfig
    {
        int num_tx_antennas = 9;  // N_t
        int num_rx_antennas = 4;  // N_r
        int num_users = 3;        // K
        int num_subcarriers = 32; // L
        int num_irs_elements = 25;

        // Streams per (user, subcarrier). Empty map means `streams_default` everywhere;
        // otherwise indexed [k * L + l].
        int streams_default = 2;
        std::vector<int> streams_map;

        double total_power = 320.0; // P_T over all subcarriers
        double noise_power = 1.0;   // sigma^2
        double snr_db = 10.0;       // per-subcarrier SNR, kept in sync by set_snr_db()

        double carrier_freq = 28e9;
        double bandwidth = 400e6;
        double sampling_rate = 1760e6; // T_s = 1 / sampling_rate
        int num_delay_taps = 8;
        int paths_bs_irs = 4;
        int paths_irs_user = 4;
        int paths_direct = 4;
        double rolloff = 0.25;
        double direct_link_gain = 1.0;    // linear power factor on H_B
        double cascaded_link_gain = 1.0;  // linear power factor on H_BI
        bool positive_dft_exponent = true;
        bool frequency_dependent_arrays = false;

        double pg_initial_step = 100.0;
        std::optional<double> mse_tolerance; // default: 1e-5 * total streams
        int max_iterations = 100;
        int max_halvings = 30;
        bool reset_step_each_iteration = true;
        bool pg_compare_previous_iterate = true; // halve while above MSE(T^(i-1), nu^(i-1))

        std::uint64_t rng_seed = 1;
        CsiMode csi_mode = CsiMode::perfect;
        std::optional<int> quantization_bits;

        /// Full-scale scenario: K=3, N_r=4, N_t=9, L=32, N=25.
        static SystemConfig full_scale();

        /// Small scenario used by tests and the acceptance suite: K=2, N_r=2, N_t=4, L=8, N=9.
        static SystemConfig desk_scale();

        /// Sets P_T = L * 10^(snr_db/10) * sigma^2.
        void set_snr_db(double snr);

        int streams(int k, int l) const;
        int streams_on_subcarrier(int l) const;
        int total_streams() const;
        double power_per_subcarrier() const;
        double error_scale() const { return static_cast<double>(num_subcarriers) / total_power; }
        double tolerance() const;

        /// Throws ConfigError on any violated invariant.
        void validate() const;
    };

    /// P_T / L.
    double power_per_subcarrier(const SystemConfig &config);

    // ----- IRS phases -------------------------------------------------------

    /// Diagonal of the IRS reflection matrix.
    struct IrsPhases
    {
        CVector values;

        IrsPhases() = default;
        explicit IrsPhases(CVector v) : values(std::move(v)) {}

        Eigen::Index size() const { return values.size(); }
        const cplx &operator[](Eigen::Index n) const { return values[n]; }

        static IrsPhases ones(Eigen::Index n) { return IrsPhases(CVector::Ones(n)); }
        static IrsPhases from_angles(const Eigen::VectorXd &theta);
        bool is_unit_modulus(double tol = 1e-12) const;
    };

    // ----- Noise ------------------------------------------------------------

    /// Per-user receive noise covariance C_eta,k with cached Hermitian square roots.
    class NoiseModel
    {
    public:
        NoiseModel() = default;

        /// Validates Hermitian (1e-12) and positive definite.
        explicit NoiseModel(std::vector<CMatrix> covariances);

        static NoiseModel white(int num_users, int num_rx, double sigma2);

        int num_users() const { return static_cast<int>(cov_.size()); }
        const CMatrix &covariance(int k) const { return cov_[k]; }
        const CMatrix &sqrt(int k) const { return sqrt_[k]; }
        const CMatrix &inv_sqrt(int k) const { return inv_sqrt_[k]; }

    private:
        std::vector<CMatrix> cov_;
        std::vector<CMatrix> sqrt_;
        std::vector<CMatrix> inv_sqrt_;
    };

    // ----- Channels ---------------------------------------------------------

    /// True frequency-domain channels. Per-(user, subcarrier) entries are stored at l * K + k.
    struct ChannelSet
    {
        int num_users = 0;
        int num_subcarriers = 0;
        int num_irs = 0;
        std::vector<CMatrix> direct;   // H_B,k[l]   N_r x N_t
        std::vector<CMatrix> bs_irs;   // H_BI[l]    N x N_t
        std::vector<CMatrix> irs_user; // H_I,k[l]   N_r x N

        const CMatrix &H_B(int k, int l) const { return direct[l * num_users + k]; }
        const CMatrix &H_BI(int l) const { return bs_irs[l]; }
        const CMatrix &H_I(int k, int l) const { return irs_user[l * num_users + k]; }

        /// Rank-one product h_I,k,n[l] h_BI,n[l]^T.
        CMatrix cascaded_term(int k, int l, int n) const;

        /// H_B,k[l] + H_I,k[l] diag(nu) H_BI[l].
        CMatrix equivalent(int k, int l, const IrsPhases &nu) const;

        /// Same scenario with the IRS removed (N = 0).
        ChannelSet without_irs() const;

        bool all_finite() const;
    };

    /// direct + sum_n nu_n * cascaded_terms[n].
    CMatrix assemble_equivalent_channel(const CMatrix &direct,
                                        std::span<const CMatrix> cascaded_terms,
                                        const IrsPhases &nu);

    /// Stable 64-bit FNV-1a digest over matrix contents, used to verify pairing across methods.
    std::uint64_t content_hash(std::span<const CMatrix> matrices, std::uint64_t seed = 1469598103934665603ULL);

    /// Complex standard normal entries, CN(0, 1).
    template <class Rng>
    CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng &rng);

} // namespace irsmse

#include <random>

template <class Rng>
irsmse::CMatrix irsmse::complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng &rng)
{
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    CMatrix out(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
        {
            double re = gauss(rng);
            double im = gauss(rng);
            out(r, c) = cplx(re, im);
        }
    return out;
}

#endif
