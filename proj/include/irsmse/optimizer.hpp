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

#ifndef IRSMSE_OPTIMIZER_HPP
#define IRSMSE_OPTIMIZER_HPP

#include "irsmse/transceiver.hpp"

#include <limits>
#include <ostream>
#include <random>

namespace irsmse
{
    struct PgSettings
    {
        double initial_step = 100.0; // mu_1
        double tolerance = 1e-5;   // delta, absolute decrease of the total uplink MSE
        int max_iterations = 100;  // epsilon
        int max_halvings = 30;
        bool reset_step = true;
        bool literal_reference = true; // halve against the previous outer iterate, not (T^(i), nu^(i-1))

        static PgSettings from_config(const SystemConfig &config);
        void validate() const;
    };

    /// Feasible set of the IRS vector.
    enum class PhaseConstraint
    {
        unit_modulus, // |nu_n| = 1
        frobenius     // ||nu||^2 = N (AF O-Ps)
    };

    struct IterationRecord
    {
        int iteration = 0;
        double mse_ul = 0.0;
        double step = 0.0;
        int halvings = 0;
    };

    struct RunTrace
    {
        std::vector<IterationRecord> records; // record 0 is the initial point
        int iterations = 0;
        bool converged = false;
        int exhausted_halvings = 0; // PG steps that kept the incumbent
        double wall_ms = 0.0;
    };

    struct DesignResult
    {
        TransceiverState state;
        RunTrace trace;
    };

    /// Cogradient dMSE^UL / dnu_n (nu^* held fixed) of the total uplink MSE:
    /// g_n = -sum_l tr(H^_c,n[l] M B^{-2} A^*) / alpha_l, per-user blocks of A = C^{-1/2} T.
    /// The steepest-descent direction of the real MSE is -conj(g).
    CVector mse_gradient_nu(const BlockSet &T, const IrsPhases &nu, const CsiEstimate &csi, const DesignContext &ctx);

    /// Total uplink MSE at (T, nu).
    double uplink_objective(const BlockSet &T, const IrsPhases &nu, const CsiEstimate &csi, const DesignContext &ctx);

    /// Entrywise nu_n / |nu_n|; entries below 1e-300 in magnitude map to 1.
    IrsPhases project_unit_modulus(const CVector &raw);

    /// sqrt(N) raw / ||raw||; throws DegenerateStateError on a zero vector.
    IrsPhases af_normalize(const CVector &raw, int N);

    /// Uniform phases on [0, 2 pi).
    IrsPhases random_phases(int N, std::mt19937_64 &rng);

    /// Snaps each phase to the nearest of 2 pi m / 2^bits; ties go to the smaller angle.
    IrsPhases quantize_phases(const IrsPhases &nu, int bits);

    struct PgStep
    {
        IrsPhases nu;
        double step = 0.0;
        int halvings = 0;
        bool accepted = false;
        double mse = 0.0;
    };

    /// Candidate project(nu - mu conj(g)); halves mu while the uplink MSE at T exceeds the
    /// incumbent's (or `reference` when given), at most max_halvings times. Exhaustion returns
    /// nu unchanged.
    PgStep pg_update(const IrsPhases &nu, const BlockSet &T, const CsiEstimate &csi, const DesignContext &ctx,
                     double step, const PgSettings &settings, PhaseConstraint constraint = PhaseConstraint::unit_modulus,
                     double reference = std::numeric_limits<double>::quiet_NaN());

    /// Alternating minimization starting from `nu0`: MRT + MMSE init, then duality sweeps
    /// (MAC->BC, DL MMSE, BC->MAC, PG on nu, UL MMSE) until the decrease drops below delta.
    DesignResult alternating_minimize(const CsiEstimate &csi, const SystemConfig &config, const PgSettings &settings,
                                      const IrsPhases &nu0, bool robust,
                                      PhaseConstraint constraint = PhaseConstraint::unit_modulus);

    /// Same sweeps with nu held fixed (R-IRS O-Ps, no-IRS, post-quantization refinement).
    DesignResult fixed_phase_design(const CsiEstimate &csi, const SystemConfig &config, const PgSettings &settings,
                                    const IrsPhases &nu, bool robust);

    /// O-IRS MRT-Ps: each sweep uses MRT precoders on the current nu, DL MMSE filters and their
    /// BC->MAC image, then one PG step on nu. Stops on a decrease below delta or an increase.
    DesignResult mrt_phase_design(const CsiEstimate &csi, const SystemConfig &config, const PgSettings &settings,
                                  const IrsPhases &nu0, bool robust);

    /// MRT precoders on H^_e(nu) with downlink MMSE filters; no iterations.
    DesignResult mrt_mmse_design(const CsiEstimate &csi, const SystemConfig &config, const IrsPhases &nu, bool robust);

    /// CSV with header iteration,mse_ul,step,halvings.
    void write_trace_csv(const RunTrace &trace, std::ostream &os);
}

#endif
