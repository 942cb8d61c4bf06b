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
// Independent replay of a restoration plan against the feeder. Works from
// the feeder description and the plan alone; never touches the planner's
// model, so it can serve as an oracle for it.

#ifndef RESTOPLAN_VALIDATOR_HPP
#define RESTOPLAN_VALIDATOR_HPP

#include <string>
#include <vector>

#include "restoplan/feeder.hpp"
#include "restoplan/planner.hpp"

namespace restoplan {

enum class Severity { pass, warn, fail };

struct Finding {
    int step = 0;  // 0 = plan-level
    std::string check;
    std::string element;
    Severity severity = Severity::pass;
    std::string message;
    double slack = 0.0;  // signed margin; negative = violated by that much
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool passed() const;
    int fail_count() const;
    int warn_count() const;
};

/// Switch-state-machine legality of every closure (Table of five states).
std::vector<Finding> check_switch_legality(const FeederModel& feeder, const RestorationPlan& plan);

/// Forest radiality: per step the energized subgraph must be acyclic with
/// exactly one root (alive GFMI root or alive TG bus) per component, and
/// the counting identity closed-lines = alive-buses - roots must hold.
std::vector<Finding> check_radiality(const FeederModel& feeder, const RestorationPlan& plan);

/// Re-derives f_qss / RoCoF / nadir from the planned dispatch and verifies
/// the configured security bounds, frequency matching across closed
/// switches, and per-island uniformity.
std::vector<Finding> check_frequency_security(const FeederModel& feeder,
                                              const RestorationPlan& plan,
                                              const PlanningConfig& config);

/// Island-level P/Q balance from dispatch, PV (one-step delay), CLPU
/// demand, and TG import; SoC replay; sync-instant flow limits across SSWs.
std::vector<Finding> check_energy_and_balance(const FeederModel& feeder,
                                              const RestorationPlan& plan,
                                              const PlanningConfig& config);

ValidationReport validate_plan(const FeederModel& feeder, const RestorationPlan& plan,
                               const PlanningConfig& config);

struct FreqVerifyRow {
    double pickup_kw = 0.0;
    FreqResponse estimated;
    FreqResponse measured;
    double acc_rocof_pct = 0.0;
    double acc_nadir_pct = 0.0;
    double acc_qss_pct = 0.0;
};

/// Runs the reduced-order simulator for each pickup and compares against
/// the closed-form estimates; accuracy is 100*(1 - |est-meas| / |meas -
/// pre-event value|) per cell, the comparison used for the published
/// validation table.
std::vector<FreqVerifyRow> verify_frequency_estimates(const GfmiParams& params,
                                                      const std::vector<double>& pickups_kw,
                                                      double duration_s = 8.0,
                                                      double dt_sim_s = 1e-3);

std::string report_to_json(const ValidationReport& report);
std::string report_to_text(const ValidationReport& report);

}  // namespace restoplan

#endif  // RESTOPLAN_VALIDATOR_HPP
