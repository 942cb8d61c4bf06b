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
// Assembles the blackstart/load-restoration mixed-integer model from a
// feeder, solves it, and extracts a time-stepped switching plan.

#ifndef RESTOPLAN_PLANNER_HPP
#define RESTOPLAN_PLANNER_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "restoplan/feeder.hpp"
#include "restoplan/milp/model.hpp"
#include "restoplan/milp/solve.hpp"

namespace restoplan {

class PlanningError : public std::runtime_error {
  public:
    explicit PlanningError(const std::string& what,
                           std::vector<milp::ElasticViolation> violations = {})
        : std::runtime_error(what), violations_(std::move(violations)) {}
    const std::vector<milp::ElasticViolation>& violations() const { return violations_; }

  private:
    std::vector<milp::ElasticViolation> violations_;
};

enum class SyncMode { optimal, rule_based };

struct FreqBounds {
    double qss_lo = 59.5;
    double qss_hi = 60.5;
    double nadir_min = 59.3;
    double nadir_max = 60.7;
    double rocof_min = -2.0;  // Hz/s
    double rocof_max = 2.0;
};

struct PlanningConfig {
    double dt_minutes = 15.0;  // <=0 -> feeder horizon value
    int horizon_steps = 0;     // <=0 -> feeder horizon value
    int start_step = 0;        // offset into the load/PV profiles
    SyncMode sync_mode = SyncMode::optimal;
    FreqBounds freq;
    double v_sq_lo = 0.9025;
    double v_sq_hi = 1.1025;
    std::optional<ClpuCoefficients> clpu;  // unset -> feeder value
    double soc_min = 0.2;
    double delta_f_star_max = 0.5;  // Hz, symmetric bound
    // Big-M / epsilon overrides; <=0 -> derived from model data.
    double big_m_flow_kw = 0.0;
    double big_m_freq_hz = 61.0;
    double eps_flow_kw = 1.0;
    double eps_flow_kvar = 1.0;
    double eps_freq_hz = 0.01;
    milp::CapabilityMode thermal_mode = milp::CapabilityMode::polygon;
    int polygon_sides = 16;
    // Root-count tie-break weight: nudges equal-energy optima toward early
    // synchronization without changing the served-energy optimum. Must stay
    // below the smallest energy increment of the instance.
    double tie_break_eps = 1e-6;
    int tg_recovery_step = 0;  // >0 overrides the feeder's value

    int steps(const FeederModel& f) const {
        return horizon_steps > 0 ? horizon_steps : f.horizon.steps;
    }
    double dt_min(const FeederModel& f) const {
        return dt_minutes > 0 ? dt_minutes : f.horizon.dt_minutes;
    }
    ClpuCoefficients clpu_coeffs(const FeederModel& f) const {
        return clpu ? *clpu : f.clpu;
    }
    int recovery_step(const FeederModel& f) const {
        if (tg_recovery_step > 0) return tg_recovery_step;
        return f.tg ? f.tg->recovery_step : 0;
    }
};

PlanningConfig load_config_file(const std::string& path);
PlanningConfig parse_config(const std::string& json_text);

struct SwitchClosure {
    std::string switch_id;
    SwitchKind kind = SwitchKind::esw;
    bool sync = false;  // SSW closed at a synchronizing instant (z = 1)
};

struct GfmiState {
    std::string bus;
    std::array<double, 3> p_kw{0, 0, 0};
    std::array<double, 3> q_kvar{0, 0, 0};
    double soc = 1.0;
    double f_hz = 0.0;
    bool is_root = true;
    bool delta = false;  // demoted at this step
};

struct PlanStep {
    int t = 0;  // 1-based
    std::string label;
    std::vector<SwitchClosure> closures;
    std::vector<std::string> blocks_on;
    std::vector<std::string> loads_on;  // switchable loads currently served
    std::vector<GfmiState> gfmi;
    std::map<std::string, double> block_f;  // block id -> Hz (0 when dead)
    bool tg_on = false;
};

struct Metrics {
    double customer_hours_mwh = 0.0;      // CLPU-inflated served energy
    double diversified_mwh = 0.0;         // served energy at diversified demand
    std::optional<int> restored_step;     // first step fully restored
    double restoration_time_min = -1.0;   // -1 when not restored in horizon
};

struct RestorationPlan {
    std::vector<PlanStep> steps;
    Metrics metrics;
    double objective = 0.0;  // solver objective (includes tie-break term)
};

/// Variable registry populated by build_model, used for plan extraction.
struct PlannerVars {
    // name maps keyed as built; values are milp::VarId
    std::map<std::string, milp::VarId> by_name;
    milp::VarId get(const std::string& name) const;
    bool has(const std::string& name) const { return by_name.count(name) != 0; }
};

struct BuiltModel {
    milp::ModelIR ir{"restoration"};
    PlannerVars vars;
};

/// Emits every constraint family of the restoration problem, tagged f01..f18.
/// Throws PlanningError on inconsistent inputs (profiles shorter than the
/// horizon, TG recovery outside the horizon, ...).
BuiltModel build_model(const FeederModel& feeder, const PlanningConfig& config);

/// Fixes the synchronization schedule for the rule-based benchmark: no
/// demotions before TG recovery, then one island per step in block-graph
/// distance order from the TG bus. Returns the GFMI bus order.
std::vector<std::string> rule_based_order(const FeederModel& feeder);

RestorationPlan solve_plan(const FeederModel& feeder, const PlanningConfig& config,
                           const milp::Backend& backend);

Metrics compute_metrics(const FeederModel& feeder, const PlanningConfig& config,
                        const RestorationPlan& plan);

std::string plan_to_json(const RestorationPlan& plan);
RestorationPlan plan_from_json(const std::string& json_text);
std::string plan_to_csv(const FeederModel& feeder, const PlanningConfig& config,
                        const RestorationPlan& plan);

/// Served active demand of one load at one step, reconstructed from the
/// plan's pickup statuses with the CLPU staircase.
double plan_load_demand_kw(const FeederModel& feeder, const PlanningConfig& config,
                           const RestorationPlan& plan, int load_index, int t);

}  // namespace restoplan

#endif  // RESTOPLAN_PLANNER_HPP
