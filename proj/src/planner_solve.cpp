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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "restoplan/planner.hpp"

namespace restoplan {

using nlohmann::json;

namespace {

std::string safe(const std::string& id) {
    std::string out = id;
    for (char& c : out) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) c = '_';
    }
    return out;
}

std::string at(const std::string& base, int t) { return base + "_" + std::to_string(t); }

std::string step_label(const Horizon& h, double dt_min, int t) {
    if (h.start_label.size() == 5 && h.start_label[2] == ':') {
        const int hh = std::atoi(h.start_label.substr(0, 2).c_str());
        const int mm = std::atoi(h.start_label.substr(3, 2).c_str());
        const int total = ((hh * 60 + mm) + static_cast<int>((t - 1) * dt_min)) % (24 * 60);
        char buf[8];
        std::snprintf(buf, sizeof(buf), "%02d:%02d", total / 60, total % 60);
        return buf;
    }
    return "t" + std::to_string(t);
}

// Pickup status series of one load over the plan, pre-horizon zeros implied.
std::vector<int> load_status_series(const FeederModel& f, const RestorationPlan& plan,
                                    const Load& d) {
    std::vector<int> y;
    y.reserve(plan.steps.size());
    const std::string block =
        f.blocks[static_cast<std::size_t>(f.block_of_bus(d.bus))].id;
    for (const auto& st : plan.steps) {
        bool on;
        if (d.switchable) {
            on = std::find(st.loads_on.begin(), st.loads_on.end(), d.id()) != st.loads_on.end();
        } else if (f.is_tg_bus(d.bus)) {
            on = st.tg_on;
        } else {
            on = std::find(st.blocks_on.begin(), st.blocks_on.end(), block) != st.blocks_on.end();
        }
        y.push_back(on ? 1 : 0);
    }
    return y;
}

}  // namespace

double plan_load_demand_kw(const FeederModel& feeder, const PlanningConfig& config,
                           const RestorationPlan& plan, int load_index, int t) {
    const Load& d = feeder.loads[static_cast<std::size_t>(load_index)];
    const std::vector<int> y = load_status_series(feeder, plan, d);
    auto status = [&](int step) { return step >= 1 && step <= static_cast<int>(y.size())
                                             ? y[static_cast<std::size_t>(step - 1)]
                                             : 0; };
    const double pbar = d.profile[static_cast<std::size_t>(config.start_step + t - 1)];
    return clpu_active_demand(pbar, status(t), status(t - 1), status(t - 2), status(t - 3),
                              config.clpu_coeffs(feeder));
}

Metrics compute_metrics(const FeederModel& feeder, const PlanningConfig& config,
                        const RestorationPlan& plan) {
    Metrics m;
    const double dt_h = config.dt_min(feeder) / 60.0;
    const int T = static_cast<int>(plan.steps.size());
    for (int t = 1; t <= T; ++t) {
        for (std::size_t i = 0; i < feeder.loads.size(); ++i) {
            m.customer_hours_mwh +=
                plan_load_demand_kw(feeder, config, plan, static_cast<int>(i), t) * dt_h / 1000.0;
            const Load& d = feeder.loads[i];
            const std::vector<int> y = load_status_series(feeder, plan, d);
            m.diversified_mwh += d.profile[static_cast<std::size_t>(config.start_step + t - 1)] *
                                 y[static_cast<std::size_t>(t - 1)] * dt_h / 1000.0;
        }
    }
    // restored: every load served, every GFMI demoted (when a TG exists),
    // and the TG alive
    for (int t = 1; t <= T; ++t) {
        const auto& st = plan.steps[static_cast<std::size_t>(t - 1)];
        bool all_loads = true;
        for (std::size_t i = 0; i < feeder.loads.size(); ++i) {
            const std::vector<int> y = load_status_series(feeder, plan, feeder.loads[i]);
            if (!y[static_cast<std::size_t>(t - 1)]) {
                all_loads = false;
                break;
            }
        }
        if (!all_loads) continue;
        if (feeder.tg) {
            if (!st.tg_on) continue;
            bool any_root = false;
            for (const auto& g : st.gfmi) {
                if (g.is_root) any_root = true;
            }
            if (any_root) continue;
        }
        m.restored_step = t;
        m.restoration_time_min = (t - 1) * config.dt_min(feeder);
        break;
    }
    return m;
}

RestorationPlan solve_plan(const FeederModel& feeder, const PlanningConfig& config,
                           const milp::Backend& backend) {
    BuiltModel built = build_model(feeder, config);
    const milp::Solution sol = milp::solve(built.ir, backend);
    if (sol.status == milp::SolveStatus::infeasible) {
        std::vector<milp::ElasticViolation> violations;
        if (backend.exhaustive) {
            violations = milp::elastic_diagnose(built.ir, backend.exhaustive->max_binaries);
        }
        std::string what = "restoration model infeasible";
        if (!violations.empty()) {
            what += "; unmet families:";
            for (std::size_t i = 0; i < violations.size() && i < 8; ++i) {
                what += " " + violations[i].tag;
            }
        }
        throw PlanningError(what, std::move(violations));
    }
    if (sol.status != milp::SolveStatus::optimal && sol.status != milp::SolveStatus::feasible) {
        throw PlanningError("solver failed: " + sol.message);
    }

    const int T = config.steps(feeder);
    const double dt_min = config.dt_min(feeder);
    RestorationPlan plan;
    plan.objective = sol.objective;
    auto val = [&](const std::string& name) { return sol.value(built.vars.get(name)); };
    auto bval = [&](const std::string& name) { return val(name) > 0.5; };

    for (int t = 1; t <= T; ++t) {
        PlanStep st;
        st.t = t;
        st.label = step_label(feeder.horizon, dt_min, t);
        st.tg_on = feeder.tg && config.recovery_step(feeder) > 0 &&
                   t >= config.recovery_step(feeder);
        for (int li : feeder.switch_line_indices()) {
            const auto& l = feeder.lines[static_cast<std::size_t>(li)];
            const bool now = bval(at("yL_" + safe(l.id), t));
            const bool before = bval(at("yL_" + safe(l.id), t - 1));
            if (now && !before) {
                SwitchClosure cl;
                cl.switch_id = l.id;
                cl.kind = l.switch_kind;
                cl.sync = l.switch_kind == SwitchKind::ssw && val(at("z_" + safe(l.id), t)) > 0.5;
                st.closures.push_back(std::move(cl));
            }
        }
        for (std::size_t m = 0; m < feeder.blocks.size(); ++m) {
            const auto& blk = feeder.blocks[m];
            const bool is_tg_block =
                feeder.tg && feeder.block_of_bus(feeder.tg->bus) == static_cast<int>(m);
            const bool on = is_tg_block ? st.tg_on : bval(at("yBB_" + safe(blk.id), t));
            if (on) st.blocks_on.push_back(blk.id);
            st.block_f[blk.id] = val(at("f_" + safe(blk.id), t));
        }
        for (const auto& d : feeder.loads) {
            if (d.switchable && bval(at("yNL_" + safe(d.id()), t))) st.loads_on.push_back(d.id());
        }
        for (const auto& g : feeder.gfmis) {
            GfmiState gs;
            gs.bus = g.bus;
            for (Phase ph : feeder.bus(g.bus).phases.list()) {
                gs.p_kw[static_cast<std::size_t>(ph)] =
                    val(at("pES_" + safe(g.bus) + "_" + phase_name(ph), t));
                gs.q_kvar[static_cast<std::size_t>(ph)] =
                    val(at("qES_" + safe(g.bus) + "_" + phase_name(ph), t));
            }
            gs.soc = val(at("soc_" + safe(g.bus), t));
            gs.f_hz = st.block_f.at(
                feeder.blocks[static_cast<std::size_t>(feeder.block_of_bus(g.bus))].id);
            gs.is_root = bval(at("yES_" + safe(g.bus), t));
            gs.delta = val(at("delta_" + safe(g.bus), t)) > 0.5;
            st.gfmi.push_back(std::move(gs));
        }
        plan.steps.push_back(std::move(st));
    }
    plan.metrics = compute_metrics(feeder, config, plan);
    return plan;
}

std::string plan_to_json(const RestorationPlan& plan) {
    json j;
    j["steps"] = json::array();
    for (const auto& st : plan.steps) {
        json s;
        s["t"] = st.t;
        s["label"] = st.label;
        s["closures"] = json::array();
        for (const auto& cl : st.closures) {
            s["closures"].push_back({{"switch", cl.switch_id},
                                     {"kind", cl.kind == SwitchKind::esw ? "ESW" : "SSW"},
                                     {"sync", cl.sync}});
        }
        s["blocks_on"] = st.blocks_on;
        s["loads_on"] = st.loads_on;
        s["gfmi"] = json::array();
        for (const auto& g : st.gfmi) {
            s["gfmi"].push_back({{"bus", g.bus},
                                 {"p_kw", g.p_kw},
                                 {"q_kvar", g.q_kvar},
                                 {"soc", g.soc},
                                 {"f_hz", g.f_hz},
                                 {"is_root", g.is_root},
                                 {"delta", g.delta}});
        }
        s["block_f"] = st.block_f;
        s["tg_on"] = st.tg_on;
        j["steps"].push_back(std::move(s));
    }
    j["metrics"] = {{"customer_hours_mwh", plan.metrics.customer_hours_mwh},
                    {"diversified_mwh", plan.metrics.diversified_mwh},
                    {"restoration_time_min", plan.metrics.restoration_time_min}};
    if (plan.metrics.restored_step) j["metrics"]["restored_step"] = *plan.metrics.restored_step;
    else j["metrics"]["restored_step"] = nullptr;
    j["objective"] = plan.objective;
    return j.dump(2);
}

RestorationPlan plan_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw PlanningError(std::string("plan: not valid JSON (") + e.what() + ")");
    }
    RestorationPlan plan;
    for (const auto& s : j.at("steps")) {
        PlanStep st;
        st.t = s.at("t").get<int>();
        if (s.contains("label")) st.label = s["label"].get<std::string>();
        for (const auto& cl : s.at("closures")) {
            SwitchClosure c;
            c.switch_id = cl.at("switch").get<std::string>();
            c.kind = cl.at("kind").get<std::string>() == "SSW" ? SwitchKind::ssw : SwitchKind::esw;
            c.sync = cl.at("sync").get<bool>();
            st.closures.push_back(std::move(c));
        }
        st.blocks_on = s.at("blocks_on").get<std::vector<std::string>>();
        st.loads_on = s.at("loads_on").get<std::vector<std::string>>();
        for (const auto& g : s.at("gfmi")) {
            GfmiState gs;
            gs.bus = g.at("bus").get<std::string>();
            const auto p = g.at("p_kw").get<std::vector<double>>();
            const auto q = g.at("q_kvar").get<std::vector<double>>();
            for (std::size_t i = 0; i < 3 && i < p.size(); ++i) gs.p_kw[i] = p[i];
            for (std::size_t i = 0; i < 3 && i < q.size(); ++i) gs.q_kvar[i] = q[i];
            gs.soc = g.at("soc").get<double>();
            gs.f_hz = g.at("f_hz").get<double>();
            gs.is_root = g.at("is_root").get<bool>();
            if (g.contains("delta")) gs.delta = g["delta"].get<bool>();
            st.gfmi.push_back(std::move(gs));
        }
        if (s.contains("block_f")) {
            for (const auto& [k, v] : s["block_f"].items()) st.block_f[k] = v.get<double>();
        }
        if (s.contains("tg_on")) st.tg_on = s["tg_on"].get<bool>();
        plan.steps.push_back(std::move(st));
    }
    if (j.contains("metrics")) {
        const auto& m = j["metrics"];
        plan.metrics.customer_hours_mwh = m.value("customer_hours_mwh", 0.0);
        plan.metrics.diversified_mwh = m.value("diversified_mwh", 0.0);
        plan.metrics.restoration_time_min = m.value("restoration_time_min", -1.0);
        if (m.contains("restored_step") && !m["restored_step"].is_null()) {
            plan.metrics.restored_step = m["restored_step"].get<int>();
        }
    }
    plan.objective = j.value("objective", 0.0);
    return plan;
}

std::string plan_to_csv(const FeederModel& feeder, const PlanningConfig& config,
                        const RestorationPlan& plan) {
    std::ostringstream os;
    os << "t,label,closures,blocks_on,served_kw,diversified_kw,pv_kw,roots,tg_on";
    for (const auto& g : feeder.gfmis) {
        os << ",p_kw_" << g.bus << ",soc_" << g.bus << ",f_hz_" << g.bus;
    }
    os << "\n";
    for (const auto& st : plan.steps) {
        double served = 0.0, diversified = 0.0;
        for (std::size_t i = 0; i < feeder.loads.size(); ++i) {
            const double p = plan_load_demand_kw(feeder, config, plan, static_cast<int>(i), st.t);
            served += p;
            const std::vector<int> y = load_status_series(feeder, plan, feeder.loads[i]);
            diversified += feeder.loads[i]
                               .profile[static_cast<std::size_t>(config.start_step + st.t - 1)] *
                           y[static_cast<std::size_t>(st.t - 1)];
        }
        double pv = 0.0;
        for (const auto& u : feeder.pvs) {
            const std::string block =
                feeder.blocks[static_cast<std::size_t>(feeder.block_of_bus(u.bus))].id;
            bool prev_on = false;
            if (st.t >= 2) {
                const auto& prev = plan.steps[static_cast<std::size_t>(st.t - 2)];
                prev_on = std::find(prev.blocks_on.begin(), prev.blocks_on.end(), block) !=
                          prev.blocks_on.end();
            } else {
                prev_on = feeder.gfmi_at(u.bus) != nullptr;
            }
            if (prev_on) pv += u.profile[static_cast<std::size_t>(config.start_step + st.t - 1)];
        }
        int roots = 0;
        for (const auto& g : st.gfmi) roots += g.is_root ? 1 : 0;
        if (st.tg_on) ++roots;
        std::string closures;
        for (const auto& cl : st.closures) {
            if (!closures.empty()) closures += ";";
            closures += cl.switch_id + (cl.sync ? "(sync)" : "");
        }
        std::string blocks;
        for (const auto& b : st.blocks_on) {
            if (!blocks.empty()) blocks += ";";
            blocks += b;
        }
        os << st.t << "," << st.label << "," << closures << "," << blocks << "," << served << ","
           << diversified << "," << pv << "," << roots << "," << (st.tg_on ? 1 : 0);
        for (const auto& g : st.gfmi) {
            const double p = g.p_kw[0] + g.p_kw[1] + g.p_kw[2];
            os << "," << p << "," << g.soc << "," << g.f_hz;
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace restoplan
