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
// Model assembly. One constraint family per tag prefix:
//   f01 GFMI voltage/frequency links and QSS band
//   f02 GFMI per-phase thermal capability and activity gating
//   f03 SoC recursion
//   f04 RoCoF / nadir security screen
//   f05 cooperative synchronization frequency products
//   f06 grid-following PV reactive capability (one-step delay)
//   f07 load pickup statuses (monotone, bus-gated)
//   f08 energizing-switch state rules
//   f09 synchronizing-switch state rules, sync instant, near-zero flow
//   f10 frequency matching across closed switches
//   f11 bus-block activation, monotonicity, one-new-switch, frequency box
//   f12 linearized unbalanced branch flow with topology big-M
//   f13 lossless nodal balance
//   f14 TG interconnect caps and voltage/frequency pinning
//   f15 dynamic radiality (counting identity, root demotion, virtual flow)
//   f16 root/demotion-flag coordination
//   f17 objective
//   f18 initialization pins
//
// Bus and internal-line statuses are substituted by their block status;
// the per-step radiality identity is emitted in the equivalent folded form.

#include "restoplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace restoplan {

using milp::LinExpr;
using milp::VarId;
using milp::VarKind;

namespace {

std::string safe(const std::string& id) {
    std::string out = id;
    for (char& c : out) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) c = '_';
    }
    return out;
}

std::string at(const std::string& base, int t) { return base + "_" + std::to_string(t); }

struct Ctx {
    const FeederModel& f;
    const PlanningConfig& cfg;
    BuiltModel& built;
    int T;
    double dt_h;
    ClpuCoefficients clpu;
    int recovery;  // 0 when no TG
    double m_flow;
    int tg_block = -1;  // block index of the TG bus, -1 when absent

    milp::ModelIR& ir() { return built.ir; }

    VarId var(const std::string& name) const { return built.vars.get(name); }
    VarId decl(const std::string& name, VarKind kind, double lb = 0.0, double ub = 1.0,
               const std::string& tag = "") {
        const VarId v = built.ir.add_var(name, kind, lb, ub, tag);
        built.vars.by_name.emplace(name, v);
        return v;
    }

    bool tg_on(int t) const { return f.tg && recovery > 0 && t >= recovery; }

    // Bus energization status as an expression; step 0 reflects the
    // initialization (GFMI buses alive, everything else dark).
    LinExpr ybus(const std::string& bus, int t) const {
        LinExpr e;
        if (t <= 0) {
            e.add_constant(f.gfmi_at(bus) != nullptr ? 1.0 : 0.0);
            return e;
        }
        if (f.is_tg_bus(bus)) {
            e.add_constant(tg_on(t) ? 1.0 : 0.0);
            return e;
        }
        e.add(var(at("yBB_" + safe(f.blocks[static_cast<std::size_t>(f.block_of_bus(bus))].id), t)), 1.0);
        return e;
    }

    // Block status; for the TG block this is the availability schedule.
    LinExpr yblock(int block_idx, int t) const {
        LinExpr e;
        if (block_idx == tg_block) {
            e.add_constant(t >= 1 && tg_on(t) ? 1.0 : 0.0);
            return e;
        }
        e.add(var(at("yBB_" + safe(f.blocks[static_cast<std::size_t>(block_idx)].id), t)), 1.0);
        return e;
    }

    // Closed status of any line: switches own a variable, internal lines
    // follow their block.
    LinExpr yline(const Line& l, int t) const {
        LinExpr e;
        if (l.is_switch()) {
            e.add(var(at("yL_" + safe(l.id), t)), 1.0);
            return e;
        }
        return yblock(f.block_of_bus(l.from), t);
    }

    // Pickup status of a load (hard-wired loads follow their bus).
    LinExpr yload(const Load& d, int t) const {
        if (t <= 0) return LinExpr{0.0};
        if (d.switchable) {
            LinExpr e;
            e.add(var(at("yNL_" + safe(d.id()), t)), 1.0);
            return e;
        }
        return ybus(d.bus, t);
    }

    // CLPU staircase demand of one load at step t, as a linear expression
    // over the pickup statuses.
    LinExpr demand_kw(const Load& d, int t) const {
        const double pbar = d.profile[static_cast<std::size_t>(cfg.start_step + t - 1)];
        LinExpr e;
        e.add(yload(d, t), clpu.a1 + 1.0);
        e.add(yload(d, t - 1), clpu.a2 - clpu.a1);
        e.add(yload(d, t - 2), clpu.a3 - clpu.a2);
        e.add(yload(d, t - 3), -clpu.a3);
        LinExpr scaled;
        scaled.add(e, pbar);
        return scaled;
    }

    double pv_forecast(const PvUnit& pv, int t) const {
        return pv.profile[static_cast<std::size_t>(cfg.start_step + t - 1)];
    }
};

void declare_variables(Ctx& c) {
    const auto& f = c.f;
    const double F = c.cfg.delta_f_star_max;
    const double n_buses = static_cast<double>(f.buses.size()) + 1.0;

    // step-0 state: pinned to the initialization by f18, so the exhaustive
    // backend never branches on it
    for (std::size_t m = 0; m < f.blocks.size(); ++m) {
        if (static_cast<int>(m) == c.tg_block) continue;
        c.decl(at("yBB_" + safe(f.blocks[m].id), 0), VarKind::continuous, 0.0, 0.0);
    }
    for (const auto& g : f.gfmis) {
        c.decl(at("yES_" + safe(g.bus), 0), VarKind::continuous, 1.0, 1.0);
        c.decl(at("soc_" + safe(g.bus), 0), VarKind::continuous, 1.0, 1.0);
    }
    for (int li : f.switch_line_indices()) {
        c.decl(at("yL_" + safe(f.lines[static_cast<std::size_t>(li)].id), 0),
               VarKind::continuous, 0.0, 0.0);
    }

    for (int t = 1; t <= c.T; ++t) {
        for (std::size_t m = 0; m < f.blocks.size(); ++m) {
            if (static_cast<int>(m) == c.tg_block) continue;
            c.decl(at("yBB_" + safe(f.blocks[m].id), t), VarKind::binary);
        }
        for (int li : f.switch_line_indices()) {
            c.decl(at("yL_" + safe(f.lines[static_cast<std::size_t>(li)].id), t), VarKind::binary);
        }
        for (const auto& d : f.loads) {
            if (d.switchable) c.decl(at("yNL_" + safe(d.id()), t), VarKind::binary);
        }
        for (const auto& g : f.gfmis) {
            const std::string b = safe(g.bus);
            c.decl(at("yES_" + b, t), VarKind::binary);
            c.decl(at("delta_" + b, t), VarKind::continuous, 0.0, 1.0);
            c.decl(at("dfs_" + b, t), VarKind::continuous, -F, F);
            c.decl(at("soc_" + b, t), VarKind::continuous, c.cfg.soc_min, 1.0);
            c.decl(at("dvcc_" + b, t), VarKind::continuous, c.cfg.v_sq_lo - 1.0, c.cfg.v_sq_hi - 1.0);
            for (Phase ph : f.bus(g.bus).phases.list()) {
                const double cap = g.params.s_rat / 3.0;
                c.decl(at("pES_" + b + "_" + phase_name(ph), t), VarKind::continuous, -cap, cap);
                c.decl(at("qES_" + b + "_" + phase_name(ph), t), VarKind::continuous, -cap, cap);
            }
        }
        for (std::size_t m = 0; m < f.blocks.size(); ++m) {
            c.decl(at("f_" + safe(f.blocks[m].id), t), VarKind::continuous, 0.0, 61.0);
        }
        for (const auto& b : f.buses) {
            for (Phase ph : b.phases.list()) {
                c.decl(at("v_" + safe(b.id) + "_" + phase_name(ph), t), VarKind::continuous, 0.0,
                       c.cfg.v_sq_hi);
            }
        }
        for (const auto& l : f.lines) {
            for (Phase ph : l.phases.list()) {
                const std::string s = safe(l.id) + "_" + phase_name(ph);
                c.decl(at("P_" + s, t), VarKind::continuous, -c.m_flow, c.m_flow);
                c.decl(at("Q_" + s, t), VarKind::continuous, -c.m_flow, c.m_flow);
            }
            c.decl(at("g_" + safe(l.id), t), VarKind::continuous, -n_buses, n_buses);
            if (l.switch_kind == SwitchKind::ssw) {
                c.decl(at("z_" + safe(l.id), t), VarKind::continuous, 0.0, 1.0);
            }
        }
        for (std::size_t u = 0; u < f.pvs.size(); ++u) {
            const auto& pv = f.pvs[u];
            const double cap = 0.484 * pv.rated_kw / pv.phases.count();
            for (Phase ph : pv.phases.list()) {
                c.decl(at("qPV_" + safe(pv.bus) + "_" + phase_name(ph), t), VarKind::continuous,
                       -cap, cap);
            }
        }
        for (const auto& g : f.gfmis) {
            // virtual-flow source capacity at root buses
            c.decl(at("gsrc_" + safe(g.bus), t), VarKind::continuous, 0.0, n_buses);
        }
        if (f.tg) {
            for (Phase ph : f.bus(f.tg->bus).phases.list()) {
                const std::string s = safe(f.tg->bus) + "_" + phase_name(ph);
                c.decl(at("pTG_" + s, t), VarKind::continuous, -f.tg->ss_rat_kva, f.tg->ss_rat_kva);
                c.decl(at("qTG_" + s, t), VarKind::continuous, -f.tg->ss_rat_kva, f.tg->ss_rat_kva);
            }
            c.decl(at("gsrc_tg", t), VarKind::continuous, 0.0, c.tg_on(t) ? n_buses : 0.0);
        }
        // cooperative-sync McCormick products, one per (gfmi, demoting root)
        for (const auto& gi : f.gfmis) {
            for (const auto& gb : f.gfmis) {
                c.decl(at("w_" + safe(gi.bus) + "_" + safe(gb.bus), t), VarKind::continuous, -F, F);
            }
        }
    }
}

void emit_init(Ctx& c) {
    const auto& f = c.f;
    for (std::size_t m = 0; m < f.blocks.size(); ++m) {
        if (static_cast<int>(m) == c.tg_block) continue;
        LinExpr e;
        e.add(c.var(at("yBB_" + safe(f.blocks[m].id), 0)), 1.0);
        c.ir().add_eq(e, 0.0, "f18.ybb0[" + f.blocks[m].id + "]");
    }
    for (const auto& g : f.gfmis) {
        LinExpr e1;
        e1.add(c.var(at("yES_" + safe(g.bus), 0)), 1.0);
        c.ir().add_eq(e1, 1.0, "f18.yes0[" + g.bus + "]");
        LinExpr e2;
        e2.add(c.var(at("soc_" + safe(g.bus), 0)), 1.0);
        c.ir().add_eq(e2, 1.0, "f18.soc0[" + g.bus + "]");
    }
    for (int li : f.switch_line_indices()) {
        const auto& l = f.lines[static_cast<std::size_t>(li)];
        LinExpr e;
        e.add(c.var(at("yL_" + safe(l.id), 0)), 1.0);
        c.ir().add_eq(e, 0.0, "f18.yl0[" + l.id + "]");
    }
}

void emit_gfmi(Ctx& c, int t) {
    const auto& f = c.f;
    const std::string ts = std::to_string(t);
    for (const auto& g : f.gfmis) {
        const auto& p = g.params;
        const std::string b = safe(g.bus);
        const int mb = f.block_of_bus(g.bus);
        const LinExpr on = c.yblock(mb, t);
        const VarId on_var = on.terms().at(0).first;  // GFMI blocks are never the TG block

        // f01: v = (V*)^2 + dv_cc while the bus is alive
        const double m_v = c.cfg.v_sq_hi + p.v_star * p.v_star + 1.0;
        for (Phase ph : f.bus(g.bus).phases.list()) {
            LinExpr e;
            e.add(c.var(at("v_" + b + "_" + phase_name(ph), t)), 1.0);
            e.add(c.var(at("dvcc_" + b, t)), -1.0);
            e.add_constant(-p.v_star * p.v_star);
            c.ir().add_big_m_switchable(e, on_var, m_v,
                                        "f01.vlink[" + g.bus + "," + phase_name(ph) + "," + ts + "]");
        }

        // f01: block frequency equals the droop frequency plus the
        // cooperative perturbation while alive
        const double droop_coef = p.f_star / (p.s_rat * (p.d + p.kf));
        LinExpr fe;
        fe.add(c.var(at("f_" + safe(f.blocks[static_cast<std::size_t>(mb)].id), t)), 1.0);
        fe.add_constant(-p.f_star);
        for (Phase ph : f.bus(g.bus).phases.list()) {
            fe.add(c.var(at("pES_" + b + "_" + phase_name(ph), t)), droop_coef);
        }
        for (const auto& gb : f.gfmis) {
            fe.add(c.var(at("w_" + b + "_" + safe(gb.bus), t)), -1.0);
        }
        const double m_f = 61.0 + p.f_star / (p.d + p.kf) +
                           c.cfg.delta_f_star_max * static_cast<double>(f.gfmis.size()) + 1.0;
        c.ir().add_big_m_switchable(fe, on_var, m_f, "f01.flink[" + g.bus + "," + ts + "]");

        // f01: QSS band (lower bound released while dark)
        LinExpr qlo;
        qlo.add(c.var(at("f_" + safe(f.blocks[static_cast<std::size_t>(mb)].id), t)), 1.0);
        qlo.add(on, -c.cfg.freq.qss_lo);
        c.ir().add_ge(qlo, 0.0, "f01.qss_lo[" + g.bus + "," + ts + "]");
        LinExpr qhi;
        qhi.add(c.var(at("f_" + safe(f.blocks[static_cast<std::size_t>(mb)].id), t)), 1.0);
        c.ir().add_le(qhi, c.cfg.freq.qss_hi, "f01.qss_hi[" + g.bus + "," + ts + "]");

        // f02: per-phase loadability disk plus activity gating
        const double cap = p.s_rat / 3.0;
        for (Phase ph : f.bus(g.bus).phases.list()) {
            const std::string s = b + "_" + phase_name(ph);
            LinExpr pe, qe;
            pe.add(c.var(at("pES_" + s, t)), 1.0);
            qe.add(c.var(at("qES_" + s, t)), 1.0);
            c.ir().quad_capability(pe, qe, cap, c.cfg.thermal_mode, c.cfg.polygon_sides,
                                   "f02.cap[" + g.bus + "," + phase_name(ph) + "," + ts + "]");
            LinExpr ap;
            ap.add(c.var(at("pES_" + s, t)), 1.0);
            ap.add(on, -cap);
            c.ir().add_le(ap, 0.0, "f02.act_p_hi[" + g.bus + "," + phase_name(ph) + "," + ts + "]");
            LinExpr ap2;
            ap2.add(c.var(at("pES_" + s, t)), -1.0);
            ap2.add(on, -cap);
            c.ir().add_le(ap2, 0.0, "f02.act_p_lo[" + g.bus + "," + phase_name(ph) + "," + ts + "]");
            LinExpr aq;
            aq.add(c.var(at("qES_" + s, t)), 1.0);
            aq.add(on, -cap);
            c.ir().add_le(aq, 0.0, "f02.act_q_hi[" + g.bus + "," + phase_name(ph) + "," + ts + "]");
            LinExpr aq2;
            aq2.add(c.var(at("qES_" + s, t)), -1.0);
            aq2.add(on, -cap);
            c.ir().add_le(aq2, 0.0, "f02.act_q_lo[" + g.bus + "," + phase_name(ph) + "," + ts + "]");
        }

        // f03: SoC recursion
        LinExpr soc;
        soc.add(c.var(at("soc_" + b, t)), 1.0);
        soc.add(c.var(at("soc_" + b, t - 1)), -1.0);
        for (Phase ph : f.bus(g.bus).phases.list()) {
            soc.add(c.var(at("pES_" + b + "_" + phase_name(ph), t)), c.dt_h / p.c);
        }
        c.ir().add_eq(soc, 0.0, "f03.rec[" + g.bus + "," + ts + "]");

        // f04: step change of total output
        LinExpr dp;
        for (Phase ph : f.bus(g.bus).phases.list()) {
            dp.add(c.var(at("pES_" + b + "_" + phase_name(ph), t)), 1.0);
            if (t >= 2) dp.add(c.var(at("pES_" + b + "_" + phase_name(ph), t - 1)), -1.0);
        }
        LinExpr rocof;
        rocof.add(dp, -p.f_star / (2.0 * p.h * p.s_rat));
        c.ir().add_le(rocof, c.cfg.freq.rocof_max, "f04.rocof_hi[" + g.bus + "," + ts + "]");
        c.ir().add_ge(rocof, c.cfg.freq.rocof_min, "f04.rocof_lo[" + g.bus + "," + ts + "]");

        // pre-event frequency: the previous block frequency, or f* when the
        // bus was dark (fresh start)
        LinExpr fpre;
        if (t == 1) {
            fpre.add_constant(p.f_star);
        } else {
            fpre.add(c.var(at("f_" + safe(f.blocks[static_cast<std::size_t>(mb)].id), t - 1)), 1.0);
            fpre.add_constant(p.f_star);
            fpre.add(c.yblock(mb, t - 1), -p.f_star);
        }
        LinExpr nadir;
        nadir.add(fpre);
        nadir.add(dp, -(1.0 + p.gamma) * droop_coef);
        c.ir().add_le(nadir, c.cfg.freq.nadir_max, "f04.nadir_hi[" + g.bus + "," + ts + "]");
        c.ir().add_ge(nadir, c.cfg.freq.nadir_min, "f04.nadir_lo[" + g.bus + "," + ts + "]");

        // f05: w(i,b) = delta(b) * dfs(i), exact for a 0/1 delta
        for (const auto& gb : f.gfmis) {
            const VarId w = c.var(at("w_" + b + "_" + safe(gb.bus), t));
            const VarId dl = c.var(at("delta_" + safe(gb.bus), t));
            const VarId x = c.var(at("dfs_" + b, t));
            const double F = c.cfg.delta_f_star_max;
            const std::string tag = "f05.w[" + g.bus + "," + gb.bus + "," + ts + "]";
            LinExpr e1;
            e1.add(w, 1.0).add(dl, -F);
            c.ir().add_le(e1, 0.0, tag + ".ub_d");
            LinExpr e2;
            e2.add(w, 1.0).add(dl, F);
            c.ir().add_ge(e2, 0.0, tag + ".lb_d");
            LinExpr e3;
            e3.add(w, 1.0).add(x, -1.0).add(dl, F);
            c.ir().add_le(e3, F, tag + ".ub_x");
            LinExpr e4;
            e4.add(w, 1.0).add(x, -1.0).add(dl, -F);
            c.ir().add_ge(e4, -F, tag + ".lb_x");
        }

        // f16: delta fires exactly at the demotion step
        LinExpr de;
        de.add(c.var(at("delta_" + b, t)), 1.0);
        de.add(c.var(at("yES_" + b, t - 1)), -1.0);
        de.add(c.var(at("yES_" + b, t)), 1.0);
        c.ir().add_eq(de, 0.0, "f16.delta[" + g.bus + "," + ts + "]");
    }
}

void emit_pv_loads(Ctx& c, int t) {
    const auto& f = c.f;
    const std::string ts = std::to_string(t);
    for (const auto& pv : f.pvs) {
        const LinExpr prev = c.ybus(pv.bus, t - 1);
        const double cap = 0.484 * pv.rated_kw / pv.phases.count();
        for (Phase ph : pv.phases.list()) {
            const VarId q = c.var(at("qPV_" + safe(pv.bus) + "_" + phase_name(ph), t));
            LinExpr hi;
            hi.add(q, 1.0);
            hi.add(prev, -cap);
            c.ir().add_le(hi, 0.0, "f06.q_hi[" + pv.bus + "," + phase_name(ph) + "," + ts + "]");
            LinExpr lo;
            lo.add(q, -1.0);
            lo.add(prev, -cap);
            c.ir().add_le(lo, 0.0, "f06.q_lo[" + pv.bus + "," + phase_name(ph) + "," + ts + "]");
        }
    }
    for (const auto& d : f.loads) {
        if (!d.switchable) continue;
        const std::string id = safe(d.id());
        if (t >= 2) {
            LinExpr mono;
            mono.add(c.var(at("yNL_" + id, t)), 1.0);
            mono.add(c.var(at("yNL_" + id, t - 1)), -1.0);
            c.ir().add_ge(mono, 0.0, "f07.mono[" + d.id() + "," + ts + "]");
        }
        LinExpr gate;
        gate.add(c.var(at("yNL_" + id, t)), 1.0);
        gate.add(c.ybus(d.bus, t), -1.0);
        c.ir().add_le(gate, 0.0, "f07.on_bus[" + d.id() + "," + ts + "]");
    }
}

void emit_switches(Ctx& c, int t) {
    const auto& f = c.f;
    const std::string ts = std::to_string(t);
    for (int li : f.switch_line_indices()) {
        const auto& l = f.lines[static_cast<std::size_t>(li)];
        const std::string s = safe(l.id);
        const VarId y = c.var(at("yL_" + s, t));
        const VarId y_prev = c.var(at("yL_" + s, t - 1));
        const LinExpr bi = c.ybus(l.from, t - 1);
        const LinExpr bj = c.ybus(l.to, t - 1);
        const char* fam = l.switch_kind == SwitchKind::esw ? "f08" : "f09";

        LinExpr feas;
        feas.add(y, 1.0);
        feas.add(bi, -1.0);
        feas.add(bj, -1.0);
        c.ir().add_le(feas, 0.0, std::string(fam) + ".feas[" + l.id + "," + ts + "]");

        LinExpr mono;
        mono.add(y, 1.0);
        mono.add(y_prev, -1.0);
        c.ir().add_ge(mono, 0.0, std::string(fam) + ".mono[" + l.id + "," + ts + "]");

        if (l.switch_kind == SwitchKind::esw) {
            // no closure between two previously-alive buses
            LinExpr nox;
            nox.add(y, 1.0);
            nox.add(y_prev, -1.0);
            nox.add(bi, 1.0);
            nox.add(bj, 1.0);
            c.ir().add_le(nox, 2.0, "f08.nox[" + l.id + "," + ts + "]");
        } else {
            // synchronizing instant: z = dy * (ybus_i + ybus_j - y)
            const VarId z = c.var(at("z_" + s, t));
            LinExpr g;  // the gating expression
            g.add(bi, 1.0);
            g.add(bj, 1.0);
            g.add(y, -1.0);
            LinExpr z1;
            z1.add(z, 1.0).add(y, -1.0).add(y_prev, 1.0);
            c.ir().add_le(z1, 0.0, "f09.z_dy[" + l.id + "," + ts + "]");
            LinExpr z2;
            z2.add(z, 1.0);
            z2.add(g, -1.0);
            z2.add(y, 1.0);
            z2.add(y_prev, -1.0);
            c.ir().add_le(z2, 1.0, "f09.z_ub[" + l.id + "," + ts + "]");
            LinExpr z3;
            z3.add(z, 1.0);
            z3.add(g, -1.0);
            z3.add(y, -2.0);
            z3.add(y_prev, 2.0);
            c.ir().add_ge(z3, -2.0, "f09.z_lb[" + l.id + "," + ts + "]");

            // near-zero power across the switch at the synchronizing instant
            for (Phase ph : l.phases.list()) {
                const std::string lp = s + "_" + phase_name(ph);
                for (const char* pq : {"P", "Q"}) {
                    const VarId flow = c.var(at(std::string(pq) + "_" + lp, t));
                    const double eps = pq[0] == 'P' ? c.cfg.eps_flow_kw : c.cfg.eps_flow_kvar;
                    LinExpr hi;
                    hi.add(flow, 1.0);
                    hi.add(z, c.m_flow);
                    c.ir().add_le(hi, c.m_flow + eps, std::string("f09.sync_") + pq + "_hi[" +
                                                          l.id + "," + phase_name(ph) + "," + ts + "]");
                    LinExpr lo;
                    lo.add(flow, -1.0);
                    lo.add(z, c.m_flow);
                    c.ir().add_le(lo, c.m_flow + eps, std::string("f09.sync_") + pq + "_lo[" +
                                                          l.id + "," + phase_name(ph) + "," + ts + "]");
                }
            }
        }

        // f10: matching frequencies across any closed switch
        const int m_i = f.block_of_bus(l.from);
        const int m_j = f.block_of_bus(l.to);
        const double m_f = c.cfg.big_m_freq_hz;
        LinExpr diff;
        diff.add(c.var(at("f_" + safe(f.blocks[static_cast<std::size_t>(m_i)].id), t)), 1.0);
        diff.add(c.var(at("f_" + safe(f.blocks[static_cast<std::size_t>(m_j)].id), t)), -1.0);
        LinExpr hi;
        hi.add(diff);
        hi.add(y, m_f);
        c.ir().add_le(hi, c.cfg.eps_freq_hz + m_f, "f10.match_hi[" + l.id + "," + ts + "]");
        LinExpr lo;
        lo.add(diff, -1.0);
        lo.add(y, m_f);
        c.ir().add_le(lo, c.cfg.eps_freq_hz + m_f, "f10.match_lo[" + l.id + "," + ts + "]");
    }
}

void emit_blocks(Ctx& c, int t) {
    const auto& f = c.f;
    const std::string ts = std::to_string(t);
    for (std::size_t m = 0; m < f.blocks.size(); ++m) {
        const auto& blk = f.blocks[m];
        const bool is_tg = static_cast<int>(m) == c.tg_block;
        if (!is_tg) {
            const VarId ybb = c.var(at("yBB_" + safe(blk.id), t));
            for (const auto& sw : blk.boundary_switches) {
                LinExpr act;
                act.add(c.var(at("yL_" + safe(sw), t)), 1.0);
                act.add(ybb, -1.0);
                c.ir().add_le(act, 0.0, "f11.act[" + blk.id + "," + sw + "," + ts + "]");
            }
            LinExpr mono;
            mono.add(ybb, 1.0);
            mono.add(c.var(at("yBB_" + safe(blk.id), t - 1)), -1.0);
            c.ir().add_ge(mono, 0.0, "f11.mono[" + blk.id + "," + ts + "]");
        } else {
            // TG block activity is the availability schedule
            for (const auto& sw : blk.boundary_switches) {
                LinExpr act;
                act.add(c.var(at("yL_" + safe(sw), t)), 1.0);
                c.ir().add_le(act, c.tg_on(t) ? 1.0 : 0.0, "f11.act_tg[" + sw + "," + ts + "]");
            }
        }

        // one new boundary switch per step while the block was inactive
        LinExpr onsw;
        for (const auto& sw : blk.boundary_switches) {
            onsw.add(c.var(at("yL_" + safe(sw), t)), 1.0);
            onsw.add(c.var(at("yL_" + safe(sw), t - 1)), -1.0);
        }
        onsw.add(c.yblock(static_cast<int>(m), t - 1),
                 -static_cast<double>(blk.boundary_switches.size()));
        c.ir().add_le(onsw, 1.0, "f11.onsw[" + blk.id + "," + ts + "]");

        // frequency box: dark blocks hold f = 0
        if (!is_tg) {
            LinExpr fbox;
            fbox.add(c.var(at("f_" + safe(blk.id), t)), 1.0);
            fbox.add(c.yblock(static_cast<int>(m), t), -61.0);
            c.ir().add_le(fbox, 0.0, "f11.fbox[" + blk.id + "," + ts + "]");
        }
    }
}

void emit_flow(Ctx& c, int t) {
    const auto& f = c.f;
    const std::string ts = std::to_string(t);
    const double z_base = f.base.z_base_ohm();
    const double s_ph = f.base.s_phase_kva();

    for (const auto& l : f.lines) {
        const LinExpr yl = c.yline(l, t);
        const auto phases = l.phases.list();
        const FlowSensitivity sens = flow_sensitivity(l);
        for (std::size_t r = 0; r < phases.size(); ++r) {
            const std::string ln = safe(l.id) + "_" + phase_name(phases[r]);
            // voltage drop (relaxed when the line is open)
            LinExpr drop;
            drop.add(c.var(at("v_" + safe(l.to) + "_" + phase_name(phases[r]), t)), 1.0);
            drop.add(c.var(at("v_" + safe(l.from) + "_" + phase_name(phases[r]), t)), -1.0);
            double coef_mag = 0.0;
            for (std::size_t cc = 0; cc < phases.size(); ++cc) {
                const double kr = 2.0 * sens.rbar[r][cc] / (z_base * s_ph);
                const double kx = 2.0 * sens.xbar[r][cc] / (z_base * s_ph);
                const std::string lc = safe(l.id) + "_" + phase_name(phases[cc]);
                drop.add(c.var(at("P_" + lc, t)), kr);
                drop.add(c.var(at("Q_" + lc, t)), kx);
                coef_mag += (std::abs(kr) + std::abs(kx)) * c.m_flow;
            }
            const double m_drop = c.cfg.v_sq_hi + coef_mag + 0.1;
            // yline may be an expression (internal lines); inline the big-M pair
            LinExpr hi;
            hi.add(drop);
            hi.add(yl, m_drop);
            c.ir().add_le(hi, m_drop, "f12.vdrop_hi[" + l.id + "," + phase_name(phases[r]) + "," + ts + "]");
            LinExpr lo;
            lo.add(drop, -1.0);
            lo.add(yl, m_drop);
            c.ir().add_le(lo, m_drop, "f12.vdrop_lo[" + l.id + "," + phase_name(phases[r]) + "," + ts + "]");

            // flow only on closed lines
            for (const char* pq : {"P", "Q"}) {
                LinExpr cap_hi;
                cap_hi.add(c.var(at(std::string(pq) + "_" + ln, t)), 1.0);
                cap_hi.add(yl, -c.m_flow);
                c.ir().add_le(cap_hi, 0.0, std::string("f12.") + pq + "_hi[" + l.id + "," +
                                               phase_name(phases[r]) + "," + ts + "]");
                LinExpr cap_lo;
                cap_lo.add(c.var(at(std::string(pq) + "_" + ln, t)), -1.0);
                cap_lo.add(yl, -c.m_flow);
                c.ir().add_le(cap_lo, 0.0, std::string("f12.") + pq + "_lo[" + l.id + "," +
                                               phase_name(phases[r]) + "," + ts + "]");
            }
        }
    }

    // voltage box scaled by the bus status (TG bus pinned by f14 instead)
    for (const auto& b : f.buses) {
        if (f.is_tg_bus(b.id)) continue;
        const LinExpr yb = c.ybus(b.id, t);
        for (Phase ph : b.phases.list()) {
            const VarId v = c.var(at("v_" + safe(b.id) + "_" + phase_name(ph), t));
            LinExpr hi;
            hi.add(v, 1.0);
            hi.add(yb, -c.cfg.v_sq_hi);
            c.ir().add_le(hi, 0.0, "f12.vbox_hi[" + b.id + "," + phase_name(ph) + "," + ts + "]");
            LinExpr lo;
            lo.add(v, -1.0);
            lo.add(yb, c.cfg.v_sq_lo);
            c.ir().add_le(lo, 0.0, "f12.vbox_lo[" + b.id + "," + phase_name(ph) + "," + ts + "]");
        }
    }
}

void emit_balance(Ctx& c, int t) {
    const auto& f = c.f;
    const std::string ts = std::to_string(t);
    for (const auto& b : f.buses) {
        for (Phase ph : b.phases.list()) {
            LinExpr pbal, qbal;
            for (const auto& l : f.lines) {
                if (!l.phases.has(ph)) continue;
                const std::string ln = safe(l.id) + "_" + phase_name(ph);
                if (l.to == b.id) {
                    pbal.add(c.var(at("P_" + ln, t)), 1.0);
                    qbal.add(c.var(at("Q_" + ln, t)), 1.0);
                } else if (l.from == b.id) {
                    pbal.add(c.var(at("P_" + ln, t)), -1.0);
                    qbal.add(c.var(at("Q_" + ln, t)), -1.0);
                }
            }
            if (const GfmiUnit* g = f.gfmi_at(b.id)) {
                pbal.add(c.var(at("pES_" + safe(g->bus) + "_" + phase_name(ph), t)), 1.0);
                qbal.add(c.var(at("qES_" + safe(g->bus) + "_" + phase_name(ph), t)), 1.0);
            }
            for (const auto& pv : f.pvs) {
                if (pv.bus != b.id || !pv.phases.has(ph)) continue;
                const double share = c.pv_forecast(pv, t) / pv.phases.count();
                pbal.add(c.ybus(pv.bus, t - 1), share);
                qbal.add(c.var(at("qPV_" + safe(pv.bus) + "_" + phase_name(ph), t)), 1.0);
            }
            if (f.is_tg_bus(b.id)) {
                pbal.add(c.var(at("pTG_" + safe(b.id) + "_" + phase_name(ph), t)), 1.0);
                qbal.add(c.var(at("qTG_" + safe(b.id) + "_" + phase_name(ph), t)), 1.0);
            }
            for (const auto& d : f.loads) {
                if (d.bus != b.id || d.phase != ph) continue;
                const LinExpr dem = c.demand_kw(d, t);
                pbal.add(dem, -1.0);
                qbal.add(dem, -std::tan(d.pf_angle));
            }
            c.ir().add_eq(pbal, 0.0, "f13.p[" + b.id + "," + phase_name(ph) + "," + ts + "]");
            c.ir().add_eq(qbal, 0.0, "f13.q[" + b.id + "," + phase_name(ph) + "," + ts + "]");
        }
    }
}

void emit_tg(Ctx& c, int t) {
    const auto& f = c.f;
    if (!f.tg) return;
    const std::string ts = std::to_string(t);
    const double on = c.tg_on(t) ? 1.0 : 0.0;
    const auto& bus = f.bus(f.tg->bus);
    LinExpr psum, qsum;
    for (Phase ph : bus.phases.list()) {
        const std::string s = safe(f.tg->bus) + "_" + phase_name(ph);
        const VarId p = c.var(at("pTG_" + s, t));
        const VarId q = c.var(at("qTG_" + s, t));
        psum.add(p, 1.0);
        qsum.add(q, 1.0);
        LinExpr phi;
        phi.add(p, 1.0);
        c.ir().add_le(phi, f.tg->ss_rat_kva * on, "f14.p_hi[" + phase_name(ph) + "," + ts + "]");
        LinExpr plo;
        plo.add(p, -1.0);
        c.ir().add_le(plo, f.tg->ss_rat_kva * on, "f14.p_lo[" + phase_name(ph) + "," + ts + "]");
        LinExpr qhi;
        qhi.add(q, 1.0);
        c.ir().add_le(qhi, f.tg->ss_rat_kva * on, "f14.q_hi[" + phase_name(ph) + "," + ts + "]");
        LinExpr qlo;
        qlo.add(q, -1.0);
        c.ir().add_le(qlo, f.tg->ss_rat_kva * on, "f14.q_lo[" + phase_name(ph) + "," + ts + "]");
        // substation holds nominal voltage while the TG is alive
        LinExpr vpin;
        vpin.add(c.var(at("v_" + s, t)), 1.0);
        c.ir().add_eq(vpin, 1.0 * on, "f14.vpin[" + phase_name(ph) + "," + ts + "]");
    }
    c.ir().quad_capability(psum, qsum, f.tg->ss_rat_kva, c.cfg.thermal_mode, c.cfg.polygon_sides,
                           "f14.cap[" + ts + "]");
    LinExpr fpin;
    fpin.add(c.var(at("f_" + safe(f.blocks[static_cast<std::size_t>(c.tg_block)].id), t)), 1.0);
    c.ir().add_eq(fpin, 60.0 * on, "f14.fpin[" + ts + "]");
}

void emit_radiality(Ctx& c, int t) {
    const auto& f = c.f;
    const std::string ts = std::to_string(t);

    // Counting identity: closed lines = alive buses + alive TG - roots.
    // Blocks are internally radial, so the per-block internal terms fold to
    // |L(m)| - |B(m)| = -1; the TG bus and the TG root term cancel.
    LinExpr count;
    for (int li : f.switch_line_indices()) {
        count.add(c.var(at("yL_" + safe(f.lines[static_cast<std::size_t>(li)].id), t)), 1.0);
    }
    for (std::size_t m = 0; m < f.blocks.size(); ++m) {
        if (static_cast<int>(m) == c.tg_block) continue;
        const auto& blk = f.blocks[m];
        count.add(c.yblock(static_cast<int>(m), t),
                  static_cast<double>(blk.internal_lines.size()) -
                      static_cast<double>(blk.buses.size()));
    }
    for (const auto& g : f.gfmis) {
        count.add(c.var(at("yES_" + safe(g.bus), t)), 1.0);
    }
    c.ir().add_eq(count, 0.0, "f15.count[" + ts + "]");

    // roots never regain status
    for (const auto& g : f.gfmis) {
        LinExpr mono;
        mono.add(c.var(at("yES_" + safe(g.bus), t)), 1.0);
        mono.add(c.var(at("yES_" + safe(g.bus), t - 1)), -1.0);
        c.ir().add_le(mono, 0.0, "f15.root_mono[" + g.bus + "," + ts + "]");
    }

    // Single-commodity virtual flow: every alive bus draws one unit from an
    // alive root through closed lines, which upgrades the counting identity
    // to a true one-root-per-component forest.
    const double n = static_cast<double>(f.buses.size()) + 1.0;
    for (const auto& l : f.lines) {
        const VarId g = c.var(at("g_" + safe(l.id), t));
        const LinExpr yl = c.yline(l, t);
        LinExpr hi;
        hi.add(g, 1.0);
        hi.add(yl, -n);
        c.ir().add_le(hi, 0.0, "f15.g_hi[" + l.id + "," + ts + "]");
        LinExpr lo;
        lo.add(g, -1.0);
        lo.add(yl, -n);
        c.ir().add_le(lo, 0.0, "f15.g_lo[" + l.id + "," + ts + "]");
    }
    for (const auto& b : f.buses) {
        LinExpr bal;
        for (const auto& l : f.lines) {
            if (l.to == b.id) bal.add(c.var(at("g_" + safe(l.id), t)), 1.0);
            else if (l.from == b.id) bal.add(c.var(at("g_" + safe(l.id), t)), -1.0);
        }
        if (f.gfmi_at(b.id)) bal.add(c.var(at("gsrc_" + safe(b.id), t)), 1.0);
        if (f.is_tg_bus(b.id)) bal.add(c.var(at("gsrc_tg", t)), 1.0);
        bal.add(c.ybus(b.id, t), -1.0);
        c.ir().add_eq(bal, 0.0, "f15.g_bal[" + b.id + "," + ts + "]");
    }
    for (const auto& g : f.gfmis) {
        LinExpr cap;
        cap.add(c.var(at("gsrc_" + safe(g.bus), t)), 1.0);
        cap.add(c.var(at("yES_" + safe(g.bus), t)), -n);
        c.ir().add_le(cap, 0.0, "f15.src_cap[" + g.bus + "," + ts + "]");
    }
}

void emit_objective(Ctx& c) {
    const auto& f = c.f;
    LinExpr obj;
    for (int t = 1; t <= c.T; ++t) {
        for (const auto& d : f.loads) {
            obj.add(c.demand_kw(d, t), c.dt_h);
        }
        for (const auto& g : f.gfmis) {
            obj.add(c.var(at("yES_" + safe(g.bus), t)), -c.cfg.tie_break_eps);
        }
    }
    c.ir().set_objective(milp::ObjSense::maximize, obj);
}

void emit_rule_based(Ctx& c) {
    const auto& f = c.f;
    const std::vector<std::string> order = rule_based_order(f);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const int demote_at = c.recovery + static_cast<int>(k) + 1;
        for (int t = 1; t <= c.T; ++t) {
            const double val = t < demote_at ? 1.0 : 0.0;
            LinExpr e;
            e.add(c.var(at("yES_" + safe(order[k]), t)), 1.0);
            c.ir().add_eq(e, val, "rb.fix[" + order[k] + "," + std::to_string(t) + "]");
        }
    }
}

}  // namespace

std::vector<std::string> rule_based_order(const FeederModel& feeder) {
    if (!feeder.tg) {
        throw PlanningError("rule-based synchronization needs a TG interconnect");
    }
    // BFS over the block-adjacency graph from the TG block.
    const auto adj = block_adjacency(feeder);
    std::map<std::string, std::vector<std::string>> neighbors;
    for (const auto& [sw, pair] : adj) {
        (void)sw;
        neighbors[pair.first].push_back(pair.second);
        neighbors[pair.second].push_back(pair.first);
    }
    const std::string start = feeder.blocks[static_cast<std::size_t>(
                                                feeder.block_of_bus(feeder.tg->bus))]
                                  .id;
    std::map<std::string, int> dist;
    dist[start] = 0;
    std::vector<std::string> queue{start};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::string cur = queue[head];
        for (const auto& nb : neighbors[cur]) {
            if (!dist.count(nb)) {
                dist[nb] = dist[cur] + 1;
                queue.push_back(nb);
            }
        }
    }
    std::vector<std::pair<int, std::string>> order;
    for (const auto& g : feeder.gfmis) {
        const std::string home =
            feeder.blocks[static_cast<std::size_t>(feeder.block_of_bus(g.bus))].id;
        auto it = dist.find(home);
        if (it == dist.end()) {
            throw PlanningError("rule-based synchronization: block " + home +
                                " is not connected to the TG in the block graph");
        }
        order.emplace_back(it->second, g.bus);
    }
    std::sort(order.begin(), order.end());
    std::vector<std::string> out;
    out.reserve(order.size());
    for (const auto& [d, bus] : order) {
        (void)d;
        out.push_back(bus);
    }
    return out;
}

BuiltModel build_model(const FeederModel& feeder, const PlanningConfig& config) {
    BuiltModel built;
    const int T = config.steps(feeder);
    if (T < 1) throw PlanningError("horizon must cover at least one step");
    const int need = config.start_step + T;
    for (const auto& d : feeder.loads) {
        if (static_cast<int>(d.profile.size()) < need) {
            throw PlanningError("load " + d.id() + ": profile shorter than the planning window");
        }
    }
    for (const auto& pv : feeder.pvs) {
        if (static_cast<int>(pv.profile.size()) < need) {
            throw PlanningError("pv at " + pv.bus + ": profile shorter than the planning window");
        }
    }
    int recovery = 0;
    if (feeder.tg) {
        recovery = config.recovery_step(feeder);
        if (recovery < 1 || recovery > T) {
            throw PlanningError("TG recovery step " + std::to_string(recovery) +
                                " lies outside the horizon (1.." + std::to_string(T) + ")");
        }
    }
    if (feeder.gfmis.empty()) throw PlanningError("no blackstart GFMI in the feeder");

    double m_flow = config.big_m_flow_kw;
    if (m_flow <= 0.0) {
        m_flow = 0.0;
        for (const auto& g : feeder.gfmis) m_flow += g.params.s_rat;
        for (const auto& pv : feeder.pvs) m_flow += pv.rated_kw;
        if (feeder.tg) m_flow += feeder.tg->ss_rat_kva;
    }

    Ctx c{feeder, config, built,
          T,      config.dt_min(feeder) / 60.0,
          config.clpu_coeffs(feeder), recovery, m_flow,
          feeder.tg ? feeder.block_of_bus(feeder.tg->bus) : -1};

    declare_variables(c);
    emit_init(c);
    for (int t = 1; t <= T; ++t) {
        emit_gfmi(c, t);
        emit_pv_loads(c, t);
        emit_switches(c, t);
        emit_blocks(c, t);
        emit_flow(c, t);
        emit_balance(c, t);
        emit_tg(c, t);
        emit_radiality(c, t);
    }
    emit_objective(c);
    if (config.sync_mode == SyncMode::rule_based) emit_rule_based(c);
    built.ir.validate();
    return built;
}

VarId PlannerVars::get(const std::string& name) const {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw PlanningError("planner variable '" + name + "' not found");
    return it->second;
}

PlanningConfig parse_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw PlanningError(std::string("config: not valid JSON (") + e.what() + ")");
    }
    PlanningConfig c;
    auto num = [&](const char* key, double& slot) {
        if (j.contains(key)) slot = j[key].get<double>();
    };
    auto integer = [&](const char* key, int& slot) {
        if (j.contains(key)) slot = j[key].get<int>();
    };
    num("dt_minutes", c.dt_minutes);
    integer("horizon_steps", c.horizon_steps);
    integer("start_step", c.start_step);
    if (j.contains("sync_mode")) {
        const std::string mode = j["sync_mode"].get<std::string>();
        if (mode == "optimal") c.sync_mode = SyncMode::optimal;
        else if (mode == "rule_based" || mode == "rule-based") c.sync_mode = SyncMode::rule_based;
        else throw PlanningError("config.sync_mode: expected optimal or rule_based");
    }
    if (j.contains("freq_bounds")) {
        const auto& fb = j["freq_bounds"];
        auto fnum = [&](const char* key, double& slot) {
            if (fb.contains(key)) slot = fb[key].get<double>();
        };
        fnum("qss_lo", c.freq.qss_lo);
        fnum("qss_hi", c.freq.qss_hi);
        fnum("nadir_min", c.freq.nadir_min);
        fnum("nadir_max", c.freq.nadir_max);
        fnum("rocof_min", c.freq.rocof_min);
        fnum("rocof_max", c.freq.rocof_max);
    }
    if (!(c.freq.rocof_min < 0.0 && 0.0 < c.freq.rocof_max)) {
        throw PlanningError("config.freq_bounds: need rocof_min < 0 < rocof_max");
    }
    num("v_sq_lo", c.v_sq_lo);
    num("v_sq_hi", c.v_sq_hi);
    if (j.contains("clpu")) {
        ClpuCoefficients cc;
        cc.a1 = j["clpu"]["alpha1"].get<double>();
        cc.a2 = j["clpu"]["alpha2"].get<double>();
        cc.a3 = j["clpu"]["alpha3"].get<double>();
        cc.validate();
        c.clpu = cc;
    }
    num("soc_min", c.soc_min);
    num("delta_f_star_max", c.delta_f_star_max);
    num("big_m_flow_kw", c.big_m_flow_kw);
    num("big_m_freq_hz", c.big_m_freq_hz);
    num("eps_flow_kw", c.eps_flow_kw);
    num("eps_flow_kvar", c.eps_flow_kvar);
    num("eps_freq_hz", c.eps_freq_hz);
    if (j.contains("thermal_mode")) {
        const std::string mode = j["thermal_mode"].get<std::string>();
        if (mode == "polygon") c.thermal_mode = milp::CapabilityMode::polygon;
        else if (mode == "quadratic") c.thermal_mode = milp::CapabilityMode::quadratic;
        else throw PlanningError("config.thermal_mode: expected polygon or quadratic");
    }
    integer("polygon_sides", c.polygon_sides);
    num("tie_break_eps", c.tie_break_eps);
    integer("tg_recovery_step", c.tg_recovery_step);
    return c;
}

PlanningConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PlanningError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace restoplan
