// Copyright 2026 The restoplan Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Closed-form VSG grid-forming inverter model: voltage droop, quasi-steady-
// state frequency, RoCoF and nadir estimators, the overshoot factor gamma,
// SoC bookkeeping, the grid-following PV rules, and a reduced-order ODE
// simulator of the frequency transient used to verify the estimators.

#ifndef RESTOPLAN_DER_HPP
#define RESTOPLAN_DER_HPP

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace restoplan {

struct PvUnit;  // feeder.hpp

/// VSG control constants of one grid-forming inverter.
struct GfmiParams {
    double s_rat = 0.0;   // rated apparent power, kVA
    double c = 0.0;       // battery capacity, kWh
    double h = 0.0;       // inertia constant, per-unit seconds
    double d = 0.0;       // damping, per-unit
    double kf = 0.0;      // frequency droop gain, per-unit
    double kv = 0.0;      // voltage droop gain, per-unit
    double v_star = 1.0;  // nominal voltage, pu
    double f_star = 60.0; // nominal frequency, Hz
    std::optional<double> t_lp;  // measurement low-pass time constant, s
    double gamma = 0.0;   // nadir overshoot factor, dimensionless

    void validate() const;  // throws std::invalid_argument
    bool operator==(const GfmiParams&) const = default;
};

/// Frequency response of a GFMI to one load-pickup event.
struct FreqResponse {
    double f_qss = 0.0;   // Hz
    double rocof = 0.0;   // Hz/s, signed (negative on pickup)
    double f_nadir = 0.0; // Hz
};

/// Quasi-steady-state frequency after droop action settles:
/// f* (1 - p_pu/(D+Kf)) + delta_f_star. p_total in kW, discharge positive.
double qss_frequency(const GfmiParams& p, double p_total_kw, double delta_f_star_hz = 0.0);

/// Initial frequency slope for a power step of delta_p (kW, pickup
/// positive): -f* (dp_pu)/(2H). Signed; a pickup gives a negative value.
double rocof_estimate(const GfmiParams& p, double delta_p_kw);

/// Frequency nadir for a pickup of delta_p starting from the pre-event
/// QSS frequency f_pre: f_pre - (1+gamma) f* dp_pu/(D+Kf).
double nadir_estimate(const GfmiParams& p, double f_pre_hz, double delta_p_kw);

struct GammaResult {
    double value = 0.0;
    bool overdamped = false;  // no overshoot; value forced to 0
};

/// Overshoot factor of the second-order VSG frequency transient
/// (swing + first-order measurement lag t_lp). Returns 0 with the
/// overdamped flag when the damping ratio reaches 1.
GammaResult gamma_compute(double h, double d, double kf, double t_lp);

/// Recovers the measurement lag that reproduces a given gamma by scalar
/// root finding over t in (0, t_max]. Throws if no underdamped t matches.
double recover_t_lp(double h, double d, double kf, double gamma_target, double t_max = 10.0);

struct TerminalVoltage {
    double v_sq = 0.0;   // (V* - Kv q_pu)^2, pu^2
    double dv_cc = 0.0;  // deviation from (V*)^2
};

/// Squared terminal voltage under the reactive droop, plus the linear
/// decomposition (V*)^2 + dv_cc.
TerminalVoltage terminal_voltage_sq(const GfmiParams& p, double q_total_kvar);

struct SocStep {
    double soc = 0.0;
    bool in_range = true;  // false when the result leaves [0, 1]
};

/// Energy-balance SoC update: soc_prev - p_total * dt / C. Discharge
/// (p > 0) reduces SoC. Values outside [0,1] are reported, not clamped.
SocStep soc_step(const GfmiParams& p, double soc_prev, double p_total_kw, double dt_hours);

/// Grid-following PV output at step t (0-based index into the forecast):
/// the unit produces only one full step after its bus energizes.
double pv_output(const PvUnit& pv, int t, bool bus_status_prev);

/// IEEE-1547 reactive capability of a PV inverter, gated by the previous
/// step's bus status: +/- 0.484 * rated.
std::pair<double, double> pv_q_bounds(const PvUnit& pv, bool bus_status_prev);

struct FreqSample {
    double t_s = 0.0;
    double f_hz = 0.0;
};

/// RK4 integration of the reduced-order VSG frequency dynamics (swing with
/// inertia 2H and damping D; droop Kf acting on a first-order frequency
/// measurement with lag t_lp). The unit starts at the QSS implied by
/// p_pre_kw and a step of delta_p_kw is applied at t=0.
/// Requires params.t_lp. Throws std::invalid_argument on bad arguments and
/// std::runtime_error if the integration diverges.
std::vector<FreqSample> simulate_vsg_step(const GfmiParams& p, double p_pre_kw,
                                          double delta_p_kw, double duration_s,
                                          double dt_sim_s);

/// Extracts (f_qss, RoCoF, nadir) from a simulated trajectory. RoCoF is the
/// maximum-magnitude slope over the first rocof_window_s seconds, the nadir
/// the trajectory minimum, f_qss the terminal value.
FreqResponse extract_response(const std::vector<FreqSample>& traj, double rocof_window_s = 0.5);

}  // namespace restoplan

#endif  // RESTOPLAN_DER_HPP
