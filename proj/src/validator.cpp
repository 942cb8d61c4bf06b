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

#include "restoplan/validator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace restoplan {

namespace {

constexpr double kNumTol = 1e-4;   // slack for solver-produced quantities
constexpr double kBalTol = 1e-3;   // kW / kvar, per the balance contract
constexpr double kSocTol = 1e-6;

struct Replay {
    const FeederModel& f;
    const RestorationPlan& plan;

    // cumulative switch closure step (0 = never), plus per-step lookups
    std::map<std::string, int> closed_at;
    std::vector<std::set<std::string>> blocks_on;  // per step (0-based)
    std::vector<std::set<std::string>> loads_on;

    explicit Replay(const FeederModel& feeder, const RestorationPlan& p) : f(feeder), plan(p) {
        for (const auto& st : p.steps) {
            for (const auto& cl : st.closures) {
                if (!closed_at.count(cl.switch_id)) closed_at[cl.switch_id] = st.t;
            }
            blocks_on.emplace_back(st.blocks_on.begin(), st.blocks_on.end());
            loads_on.emplace_back(st.loads_on.begin(), st.loads_on.end());
        }
    }

    bool switch_closed(const std::string& id, int t) const {
        auto it = closed_at.find(id);
        return it != closed_at.end() && t >= it->second;
    }

    // bus energization; t = 0 reproduces the initialization
    bool bus_on(const std::string& bus, int t) const {
        if (t <= 0) return f.gfmi_at(bus) != nullptr;
        if (f.is_tg_bus(bus)) return plan.steps[static_cast<std::size_t>(t - 1)].tg_on;
        const auto& blk = f.blocks[static_cast<std::size_t>(f.block_of_bus(bus))];
        return blocks_on[static_cast<std::size_t>(t - 1)].count(blk.id) != 0;
    }

    bool block_on(const std::string& id, int t) const {
        if (t <= 0) return false;
        return blocks_on[static_cast<std::size_t>(t - 1)].count(id) != 0;
    }

    int load_status(const Load& d, int t) const {
        if (t <= 0) return 0;
        if (d.switchable) return loads_on[static_cast<std::size_t>(t - 1)].count(d.id()) ? 1 : 0;
        return bus_on(d.bus, t) ? 1 : 0;
    }

    const GfmiState* gfmi_state(const std::string& bus, int t) const {
        if (t <= 0) return nullptr;
        for (const auto& g : plan.steps[static_cast<std::size_t>(t - 1)].gfmi) {
            if (g.bus == bus) return &g;
        }
        return nullptr;
    }

    // connected components of the energized subgraph at step t;
    // returns bus -> component id for alive buses
    std::map<std::string, int> components(int t, int* edge_count = nullptr,
                                          bool* cycle = nullptr) const {
        std::map<std::string, int> comp;
        std::vector<std::string> alive;
        for (const auto& b : f.buses) {
            if (bus_on(b.id, t)) alive.push_back(b.id);
        }
        std::map<std::string, std::string> parent;
        for (const auto& b : alive) parent[b] = b;
        std::function<std::string(const std::string&)> find = [&](const std::string& x) {
            std::string r = x;
            while (parent[r] != r) r = parent[r];
            return r;
        };
        int edges = 0;
        bool has_cycle = false;
        for (const auto& l : f.lines) {
            bool closed;
            if (l.is_switch()) {
                closed = switch_closed(l.id, t);
            } else {
                const auto& blk = f.blocks[static_cast<std::size_t>(f.block_of_bus(l.from))];
                closed = block_on(blk.id, t);
            }
            if (!closed) continue;
            ++edges;
            if (!parent.count(l.from) || !parent.count(l.to)) continue;  // flagged elsewhere
            const std::string a = find(l.from), b = find(l.to);
            if (a == b) has_cycle = true;
            else parent[a] = b;
        }
        int next = 0;
        std::map<std::string, int> root_id;
        for (const auto& b : alive) {
            const std::string r = find(b);
            auto [it, fresh] = root_id.emplace(r, next);
            if (fresh) ++next;
            comp[b] = it->second;
        }
        if (edge_count) *edge_count = edges;
        if (cycle) *cycle = has_cycle;
        return comp;
    }
};

void add(std::vector<Finding>& out, int step, const std::string& check, const std::string& elem,
         Severity sev, const std::string& msg, double slack = 0.0) {
    out.push_back({step, check, elem, sev, msg, slack});
}

void summarize(std::vector<Finding>& out, const std::string& check, std::size_t before) {
    bool any_fail = false;
    for (std::size_t i = before; i < out.size(); ++i) {
        if (out[i].severity == Severity::fail) any_fail = true;
    }
    if (!any_fail) {
        add(out, 0, check, "*", Severity::pass, "all steps pass");
    }
}

}  // namespace

bool ValidationReport::passed() const { return fail_count() == 0; }

int ValidationReport::fail_count() const {
    int n = 0;
    for (const auto& f : findings) n += f.severity == Severity::fail ? 1 : 0;
    return n;
}

int ValidationReport::warn_count() const {
    int n = 0;
    for (const auto& f : findings) n += f.severity == Severity::warn ? 1 : 0;
    return n;
}

std::vector<Finding> check_switch_legality(const FeederModel& feeder, const RestorationPlan& plan) {
    std::vector<Finding> out;
    const std::size_t mark = out.size();
    Replay rp(feeder, plan);
    std::set<std::string> closed;
    for (const auto& st : plan.steps) {
        for (const auto& cl : st.closures) {
            int li = -1;
            try {
                li = feeder.line_index(cl.switch_id);
            } catch (const FeederError&) {
                add(out, st.t, "switch_legality", cl.switch_id, Severity::fail, "unknown switch");
                continue;
            }
            const auto& l = feeder.lines[static_cast<std::size_t>(li)];
            if (!l.is_switch()) {
                add(out, st.t, "switch_legality", cl.switch_id, Severity::fail,
                    "closure of a non-switch line");
                continue;
            }
            if (l.switch_kind != cl.kind) {
                add(out, st.t, "switch_legality", cl.switch_id, Severity::fail,
                    "closure kind does not match the feeder switch kind");
            }
            if (closed.count(cl.switch_id)) {
                add(out, st.t, "switch_legality", cl.switch_id, Severity::fail,
                    "switch closed twice (state 5 forbids re-operation)");
                continue;
            }
            const bool i_on = rp.bus_on(l.from, st.t - 1);
            const bool j_on = rp.bus_on(l.to, st.t - 1);
            const int live = (i_on ? 1 : 0) + (j_on ? 1 : 0);
            if (live == 0) {
                add(out, st.t, "switch_legality", cl.switch_id, Severity::fail,
                    "state-1 closure: both sides dark, no cranking power");
            } else if (live == 2) {
                if (l.switch_kind == SwitchKind::esw) {
                    add(out, st.t, "switch_legality", cl.switch_id, Severity::fail,
                        "state-4 closure: ESW cannot connect two live buses");
                } else if (!cl.sync) {
                    add(out, st.t, "switch_legality", cl.switch_id, Severity::fail,
                        "live-live SSW closure without the synchronizing flag");
                }
            } else if (cl.sync) {
                add(out, st.t, "switch_legality", cl.switch_id, Severity::fail,
                    "synchronizing flag on an energizing (dead-live) closure");
            }
            closed.insert(cl.switch_id);
        }
    }
    summarize(out, "switch_legality", mark);
    return out;
}

std::vector<Finding> check_radiality(const FeederModel& feeder, const RestorationPlan& plan) {
    std::vector<Finding> out;
    const std::size_t mark = out.size();
    Replay rp(feeder, plan);
    for (const auto& st : plan.steps) {
        int edges = 0;
        bool cycle = false;
        const auto comp = rp.components(st.t, &edges, &cycle);
        int alive = static_cast<int>(comp.size());
        int roots = 0;
        std::map<int, int> roots_per_comp;
        for (const auto& g : st.gfmi) {
            if (!g.is_root) continue;
            ++roots;
            auto it = comp.find(g.bus);
            if (it == comp.end()) {
                add(out, st.t, "radiality", g.bus, Severity::fail,
                    "GFMI still flagged root while its bus is dark");
            } else {
                roots_per_comp[it->second] += 1;
            }
        }
        if (st.tg_on && feeder.tg) {
            ++roots;
            auto it = comp.find(feeder.tg->bus);
            if (it != comp.end()) roots_per_comp[it->second] += 1;
        }
        // counting identity: closed lines = alive buses (incl. TG) - roots
        const int lhs = edges;
        const int rhs = alive - roots;
        if (lhs != rhs) {
            add(out, st.t, "radiality", "*", Severity::fail,
                "counting identity broken: " + std::to_string(lhs) + " closed lines vs " +
                    std::to_string(alive) + " buses - " + std::to_string(roots) + " roots",
                static_cast<double>(lhs - rhs));
        }
        if (cycle) {
            add(out, st.t, "radiality", "*", Severity::fail, "energized subgraph contains a cycle");
        }
        std::set<int> comp_ids;
        for (const auto& [bus, cid] : comp) {
            (void)bus;
            comp_ids.insert(cid);
        }
        for (int cid : comp_ids) {
            const int r = roots_per_comp.count(cid) ? roots_per_comp[cid] : 0;
            if (r != 1) {
                add(out, st.t, "radiality", "component" + std::to_string(cid), Severity::fail,
                    "component carries " + std::to_string(r) + " roots (exactly one required)");
            }
        }
        // closed switches must not dangle into dark buses
        for (const auto& l : feeder.lines) {
            if (!l.is_switch() || !rp.switch_closed(l.id, st.t)) continue;
            if (!rp.bus_on(l.from, st.t) || !rp.bus_on(l.to, st.t)) {
                add(out, st.t, "radiality", l.id, Severity::fail,
                    "closed switch with a de-energized endpoint");
            }
        }
    }
    summarize(out, "radiality", mark);
    return out;
}

std::vector<Finding> check_frequency_security(const FeederModel& feeder,
                                              const RestorationPlan& plan,
                                              const PlanningConfig& config) {
    std::vector<Finding> out;
    const std::size_t mark = out.size();
    Replay rp(feeder, plan);
    const double F = config.delta_f_star_max;
    for (const auto& st : plan.steps) {
        int delta_count = 0;
        for (const auto& g : st.gfmi) delta_count += g.delta ? 1 : 0;
        for (const auto& g : st.gfmi) {
            const GfmiUnit* unit = feeder.gfmi_at(g.bus);
            if (!unit) {
                add(out, st.t, "frequency", g.bus, Severity::fail, "plan names an unknown GFMI");
                continue;
            }
            const auto& p = unit->params;
            const double p_tot = g.p_kw[0] + g.p_kw[1] + g.p_kw[2];
            const bool active = rp.bus_on(g.bus, st.t);
            if (!active) {
                if (std::abs(p_tot) > kNumTol) {
                    add(out, st.t, "frequency", g.bus, Severity::fail,
                        "dark GFMI dispatching power", std::abs(p_tot));
                }
                continue;
            }
            const double droop = qss_frequency(p, p_tot, 0.0);
            const double pert = g.f_hz - droop;
            const double allowed = F * delta_count + kNumTol;
            if (std::abs(pert) > allowed) {
                add(out, st.t, "frequency", g.bus, Severity::fail,
                    "frequency deviates from the droop law beyond the synchronizing perturbation",
                    allowed - std::abs(pert));
            }
            if (g.f_hz < config.freq.qss_lo - kNumTol || g.f_hz > config.freq.qss_hi + kNumTol) {
                add(out, st.t, "frequency", g.bus, Severity::fail, "QSS frequency outside its band",
                    std::min(g.f_hz - config.freq.qss_lo, config.freq.qss_hi - g.f_hz));
            }
            const GfmiState* prev = rp.gfmi_state(g.bus, st.t - 1);
            const double p_prev =
                prev ? prev->p_kw[0] + prev->p_kw[1] + prev->p_kw[2] : 0.0;
            const double dp = p_tot - p_prev;
            const double rocof = rocof_estimate(p, dp);
            if (rocof < config.freq.rocof_min - kNumTol || rocof > config.freq.rocof_max + kNumTol) {
                add(out, st.t, "frequency", g.bus, Severity::fail,
                    "RoCoF estimate outside its band",
                    std::min(rocof - config.freq.rocof_min, config.freq.rocof_max - rocof));
            }
            const bool prev_active = rp.bus_on(g.bus, st.t - 1) && st.t >= 2;
            const double f_pre = prev_active && prev ? prev->f_hz : p.f_star;
            const double nadir = nadir_estimate(p, f_pre, dp);
            if (nadir < config.freq.nadir_min - kNumTol || nadir > config.freq.nadir_max + kNumTol) {
                add(out, st.t, "frequency", g.bus, Severity::fail,
                    "nadir estimate outside its band",
                    std::min(nadir - config.freq.nadir_min, config.freq.nadir_max - nadir));
            }
            // per-block uniformity: the GFMI frequency is its block frequency
            auto bf = st.block_f.find(
                feeder.blocks[static_cast<std::size_t>(feeder.block_of_bus(g.bus))].id);
            if (bf != st.block_f.end() && std::abs(bf->second - g.f_hz) > kNumTol) {
                add(out, st.t, "frequency", g.bus, Severity::fail,
                    "GFMI frequency differs from its block frequency",
                    std::abs(bf->second - g.f_hz));
            }
        }
        // matching across every closed switch
        for (const auto& l : feeder.lines) {
            if (!l.is_switch() || !rp.switch_closed(l.id, st.t)) continue;
            const std::string bi =
                feeder.blocks[static_cast<std::size_t>(feeder.block_of_bus(l.from))].id;
            const std::string bj =
                feeder.blocks[static_cast<std::size_t>(feeder.block_of_bus(l.to))].id;
            auto fi = st.block_f.find(bi);
            auto fj = st.block_f.find(bj);
            if (fi == st.block_f.end() || fj == st.block_f.end()) continue;
            const double gap = std::abs(fi->second - fj->second);
            if (gap > config.eps_freq_hz + kNumTol) {
                add(out, st.t, "frequency", l.id, Severity::fail,
                    "frequencies unmatched across a closed switch", config.eps_freq_hz - gap);
            }
        }
        // TG island pinned to 60 Hz
        if (st.tg_on && feeder.tg) {
            const std::string tgb =
                feeder.blocks[static_cast<std::size_t>(feeder.block_of_bus(feeder.tg->bus))].id;
            auto it = st.block_f.find(tgb);
            if (it != st.block_f.end() && std::abs(it->second - 60.0) > kNumTol) {
                add(out, st.t, "frequency", tgb, Severity::fail,
                    "TG block frequency not pinned to 60 Hz", std::abs(it->second - 60.0));
            }
        }
    }
    summarize(out, "frequency", mark);
    return out;
}

std::vector<Finding> check_energy_and_balance(const FeederModel& feeder,
                                              const RestorationPlan& plan,
                                              const PlanningConfig& config) {
    std::vector<Finding> out;
    const std::size_t mark = out.size();
    Replay rp(feeder, plan);
    const double dt_h = config.dt_min(feeder) / 60.0;
    const ClpuCoefficients clpu = config.clpu_coeffs(feeder);

    // SoC replay
    for (const auto& g : feeder.gfmis) {
        double soc = 1.0;
        for (const auto& st : plan.steps) {
            const GfmiState* gs = rp.gfmi_state(g.bus, st.t);
            if (!gs) continue;
            const double p_tot = gs->p_kw[0] + gs->p_kw[1] + gs->p_kw[2];
            soc = soc_step(g.params, std::clamp(soc, 0.0, 1.0), p_tot, dt_h).soc;
            if (std::abs(soc - gs->soc) > kSocTol) {
                add(out, st.t, "energy_balance", g.bus, Severity::fail,
                    "SoC diverges from the energy-balance replay", std::abs(soc - gs->soc));
                soc = gs->soc;  // resynchronize to keep later findings meaningful
            }
            if (gs->soc < config.soc_min - kNumTol || gs->soc > 1.0 + kNumTol) {
                add(out, st.t, "energy_balance", g.bus, Severity::fail,
                    "SoC outside [soc_min, 1]",
                    std::min(gs->soc - config.soc_min, 1.0 - gs->soc));
            }
        }
    }

    auto demand_kw = [&](const Load& d, int t) {
        const double pbar = d.profile[static_cast<std::size_t>(config.start_step + t - 1)];
        return clpu_active_demand(pbar, rp.load_status(d, t), rp.load_status(d, t - 1),
                                  rp.load_status(d, t - 2), rp.load_status(d, t - 3), clpu);
    };

    for (const auto& st : plan.steps) {
        const auto comp = rp.components(st.t);
        // per-component, per-phase net balance
        std::map<std::pair<int, int>, double> net_p, net_q, q_slack;
        std::set<int> tg_comp;
        for (const auto& [bus, cid] : comp) {
            for (int phi = 0; phi < 3; ++phi) {
                const Phase ph = static_cast<Phase>(phi);
                if (!feeder.bus(bus).phases.has(ph)) continue;
                double p = 0.0, q = 0.0, slack = 0.0;
                if (const GfmiUnit* g = feeder.gfmi_at(bus)) {
                    const GfmiState* gs = rp.gfmi_state(bus, st.t);
                    (void)g;
                    if (gs) {
                        p += gs->p_kw[static_cast<std::size_t>(phi)];
                        q += gs->q_kvar[static_cast<std::size_t>(phi)];
                    }
                }
                for (const auto& pv : feeder.pvs) {
                    if (pv.bus != bus || !pv.phases.has(ph)) continue;
                    const bool prev_on = rp.bus_on(bus, st.t - 1);
                    p += pv_output(pv, config.start_step + st.t - 1, prev_on) / pv.phases.count();
                    slack += pv_q_bounds(pv, prev_on).second / pv.phases.count();
                }
                for (const auto& d : feeder.loads) {
                    if (d.bus != bus || d.phase != ph) continue;
                    const double pd = demand_kw(d, st.t);
                    p -= pd;
                    q -= clpu_reactive_demand(pd, d.pf_angle);
                }
                net_p[{cid, phi}] += p;
                net_q[{cid, phi}] += q;
                q_slack[{cid, phi}] += slack;
                if (feeder.is_tg_bus(bus)) tg_comp.insert(cid);
            }
        }
        for (const auto& [key, p] : net_p) {
            const auto [cid, phi] = key;
            if (tg_comp.count(cid)) continue;  // TG import closes these
            if (std::abs(p) > kBalTol) {
                add(out, st.t, "energy_balance",
                    "component" + std::to_string(cid) + "." + phase_name(static_cast<Phase>(phi)),
                    Severity::fail, "active-power balance residual", std::abs(p));
            }
            const double q = net_q.at(key);
            const double qs = q_slack.at(key);
            if (std::abs(q) > qs + kBalTol) {
                add(out, st.t, "energy_balance",
                    "component" + std::to_string(cid) + "." + phase_name(static_cast<Phase>(phi)),
                    Severity::fail, "reactive balance residual beyond PV capability",
                    std::abs(q) - qs);
            }
        }
        // TG import within the substation rating (polygon outer tolerance)
        if (feeder.tg && st.tg_on) {
            auto it = comp.find(feeder.tg->bus);
            if (it != comp.end()) {
                double imp_p = 0.0, imp_q = 0.0;
                for (int phi = 0; phi < 3; ++phi) {
                    auto key = std::make_pair(it->second, phi);
                    if (net_p.count(key)) {
                        imp_p -= net_p[key];
                        imp_q -= net_q[key];
                    }
                }
                const double app = std::hypot(imp_p, std::max(0.0, std::abs(imp_q) - 0.0));
                const double limit = feeder.tg->ss_rat_kva * 1.02 + kBalTol;
                if (app > limit) {
                    add(out, st.t, "energy_balance", feeder.tg->bus, Severity::fail,
                        "TG import beyond the substation rating", limit - app);
                }
            }
        }
        // synchronizing instants carry near-zero flow across the SSW
        for (const auto& cl : st.closures) {
            if (!cl.sync) continue;
            const auto& l = feeder.line(cl.switch_id);
            // net injection of the side reachable from `from` without the switch
            std::set<std::string> side;
            std::vector<std::string> stack{l.from};
            while (!stack.empty()) {
                const std::string cur = stack.back();
                stack.pop_back();
                if (!side.insert(cur).second) continue;
                for (const auto& e : feeder.lines) {
                    if (e.id == l.id) continue;
                    bool closed = e.is_switch()
                                      ? rp.switch_closed(e.id, st.t)
                                      : rp.block_on(feeder.blocks[static_cast<std::size_t>(
                                                                      feeder.block_of_bus(e.from))]
                                                        .id,
                                                    st.t);
                    if (!closed) continue;
                    if (e.from == cur && rp.bus_on(e.to, st.t)) stack.push_back(e.to);
                    if (e.to == cur && rp.bus_on(e.from, st.t)) stack.push_back(e.from);
                }
            }
            bool side_has_tg = feeder.tg && side.count(feeder.tg->bus) && st.tg_on;
            if (side_has_tg) {
                // evaluate the other side instead
                std::set<std::string> other;
                for (const auto& [bus, cid] : comp) {
                    (void)cid;
                    if (!side.count(bus)) other.insert(bus);
                }
                side.swap(other);
            }
            double flow_p = 0.0, flow_q = 0.0, qs = 0.0;
            for (const auto& bus : side) {
                if (!comp.count(bus)) continue;
                for (int phi = 0; phi < 3; ++phi) {
                    const Phase ph = static_cast<Phase>(phi);
                    if (!feeder.bus(bus).phases.has(ph)) continue;
                    if (const GfmiState* gs = rp.gfmi_state(bus, st.t); gs && feeder.gfmi_at(bus)) {
                        flow_p += gs->p_kw[static_cast<std::size_t>(phi)];
                        flow_q += gs->q_kvar[static_cast<std::size_t>(phi)];
                    }
                    for (const auto& pv : feeder.pvs) {
                        if (pv.bus != bus || !pv.phases.has(ph)) continue;
                        const bool prev_on = rp.bus_on(bus, st.t - 1);
                        flow_p += pv_output(pv, config.start_step + st.t - 1, prev_on) /
                                  pv.phases.count();
                        qs += pv_q_bounds(pv, prev_on).second / pv.phases.count();
                    }
                    for (const auto& d : feeder.loads) {
                        if (d.bus != bus || d.phase != ph) continue;
                        const double pd = demand_kw(d, st.t);
                        flow_p -= pd;
                        flow_q -= clpu_reactive_demand(pd, d.pf_angle);
                    }
                }
            }
            const double lim_p = config.eps_flow_kw * static_cast<double>(l.phases.count());
            const double lim_q = config.eps_flow_kvar * static_cast<double>(l.phases.count());
            if (std::abs(flow_p) > lim_p + kBalTol) {
                add(out, st.t, "sync_instant", cl.switch_id, Severity::fail,
                    "active power across the SSW at its synchronizing instant",
                    lim_p - std::abs(flow_p));
            }
            if (std::abs(flow_q) > lim_q + qs + kBalTol) {
                add(out, st.t, "sync_instant", cl.switch_id, Severity::fail,
                    "reactive power across the SSW at its synchronizing instant",
                    lim_q + qs - std::abs(flow_q));
            }
        }
    }
    summarize(out, "energy_balance", mark);
    return out;
}

ValidationReport validate_plan(const FeederModel& feeder, const RestorationPlan& plan,
                               const PlanningConfig& config) {
    ValidationReport report;
    auto merge = [&](std::vector<Finding> f) {
        report.findings.insert(report.findings.end(), f.begin(), f.end());
    };
    merge(check_switch_legality(feeder, plan));
    merge(check_radiality(feeder, plan));
    merge(check_frequency_security(feeder, plan, config));
    merge(check_energy_and_balance(feeder, plan, config));
    std::stable_sort(report.findings.begin(), report.findings.end(),
                     [](const Finding& a, const Finding& b) {
                         if (a.step != b.step) return a.step < b.step;
                         if (a.check != b.check) return a.check < b.check;
                         return a.element < b.element;
                     });
    return report;
}

std::vector<FreqVerifyRow> verify_frequency_estimates(const GfmiParams& params,
                                                      const std::vector<double>& pickups_kw,
                                                      double duration_s, double dt_sim_s) {
    GfmiParams p = params;
    if (!p.t_lp) p.t_lp = recover_t_lp(p.h, p.d, p.kf, p.gamma);
    std::vector<FreqVerifyRow> rows;
    for (double dp : pickups_kw) {
        FreqVerifyRow row;
        row.pickup_kw = dp;
        row.estimated.f_qss = qss_frequency(p, dp);
        row.estimated.rocof = rocof_estimate(p, dp);
        row.estimated.f_nadir = nadir_estimate(p, p.f_star, dp);
        if (dp == 0.0) {
            row.measured = row.estimated;
            row.acc_rocof_pct = row.acc_nadir_pct = row.acc_qss_pct = 100.0;
            rows.push_back(row);
            continue;
        }
        const auto traj = simulate_vsg_step(p, 0.0, dp, duration_s, dt_sim_s);
        row.measured = extract_response(traj);
        auto accuracy = [](double est, double meas, double base) {
            const double dev = std::abs(meas - base);
            if (dev < 1e-12) return est == meas ? 100.0 : 0.0;
            return 100.0 * (1.0 - std::abs(est - meas) / dev);
        };
        row.acc_rocof_pct = accuracy(row.estimated.rocof, row.measured.rocof, 0.0);
        row.acc_nadir_pct = accuracy(row.estimated.f_nadir, row.measured.f_nadir, p.f_star);
        row.acc_qss_pct = accuracy(row.estimated.f_qss, row.measured.f_qss, p.f_star);
        rows.push_back(row);
    }
    return rows;
}

std::string report_to_json(const ValidationReport& report) {
    nlohmann::json j;
    j["verdict"] = report.passed() ? "pass" : "fail";
    j["fails"] = report.fail_count();
    j["warnings"] = report.warn_count();
    j["findings"] = nlohmann::json::array();
    for (const auto& f : report.findings) {
        const char* sev = f.severity == Severity::pass ? "pass"
                          : f.severity == Severity::warn ? "warn"
                                                         : "fail";
        j["findings"].push_back({{"step", f.step},
                                 {"check", f.check},
                                 {"element", f.element},
                                 {"severity", sev},
                                 {"message", f.message},
                                 {"slack", f.slack}});
    }
    return j.dump(2);
}

std::string report_to_text(const ValidationReport& report) {
    std::ostringstream os;
    for (const auto& f : report.findings) {
        const char* sev = f.severity == Severity::pass ? "PASS"
                          : f.severity == Severity::warn ? "WARN"
                                                         : "FAIL";
        os << sev << " step=" << f.step << " " << f.check << " [" << f.element << "] "
           << f.message;
        if (f.slack != 0.0) os << " (slack " << f.slack << ")";
        os << "\n";
    }
    os << (report.passed() ? "VERDICT: pass" : "VERDICT: fail") << "\n";
    return os.str();
}

}  // namespace restoplan
