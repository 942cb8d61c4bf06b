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
// Acceptance gate: one line per criterion, nonzero exit on any failure.
//
//   F1  closed-form frequency estimates reproduce the validation table
//   F2  reduced-order ODE vs estimates: >= 92% on all nine cells
//   O1  exhaustive planner == sequence-enumeration oracle on random toys
//   O2  optimal mode dominates the rule-based benchmark, monotone in outage
//   V1  planner/validator closure plus mutation sensitivity
//   V2  forest radiality with one root per component, counting identity
//   M1  McCormick binary-product exactness on grids
//   M2  embedded solver vs external MILP solver on emitted LP files
//   C1  CLPU staircase sequence
//   S1  synchronizing instants carry near-zero flow and matched frequencies

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "restoplan/milp/emit.hpp"
#include "restoplan/milp/solve.hpp"
#include "restoplan/planner.hpp"
#include "restoplan/validator.hpp"
#include "support/oracle.hpp"
#include "support/toys.hpp"

using namespace restoplan;

namespace {

int g_failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
    std::printf("[%s] %s  %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    if (!pass) ++g_failures;
}

void report_skip(const char* id, const std::string& detail) {
    std::printf("[SKIP] %s  %s\n", id, detail.c_str());
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
               .count() /
           1000.0;
}

GfmiParams table_unit() {
    GfmiParams p;
    p.s_rat = 20000.0;  // recovered by inverting the droop row of the table
    p.c = 4600.0;
    p.h = 4.0;
    p.d = 1.0;
    p.kf = 89.0;
    p.kv = 0.05;
    p.gamma = 0.093;
    return p;
}

// ---------------------------------------------------------------- F1
void criterion_f1() {
    const auto t0 = std::chrono::steady_clock::now();
    const GfmiParams p = table_unit();
    struct Row {
        double dp, f_qss, f_nadir;
    };
    const Row rows[] = {{1000.0, 59.9666, 59.9635},
                        {2000.0, 59.9333, 59.9272},
                        {10000.0, 59.6666, 59.6357}};
    bool ok = true;
    std::ostringstream d;
    for (const Row& r : rows) {
        const double fq = qss_frequency(p, r.dp);
        const double fn = nadir_estimate(p, 60.0, r.dp);
        if (std::abs(fq - r.f_qss) > 1e-3) {
            ok = false;
            d << " f_qss(" << r.dp << ")=" << fq;
        }
        if (std::abs(fn - r.f_nadir) > 2e-3) {
            ok = false;
            d << " f_nadir(" << r.dp << ")=" << fn;
        }
    }
    if (std::abs(rocof_estimate(p, 2000.0) - (-0.75)) > 1e-3) ok = false;
    if (std::abs(rocof_estimate(p, 10000.0) - (-3.75)) > 1e-3) ok = false;
    // documented discrepancy: the printed 1 MW cell reads -0.3780
    if (std::abs(rocof_estimate(p, 1000.0) - (-0.3780)) > 3e-2) ok = false;
    const double secs = elapsed_s(t0);
    if (secs >= 1.0) ok = false;
    d << " runtime " << secs << " s";
    report("F1", ok, "closed-form estimates vs published table" + d.str());
}

// ---------------------------------------------------------------- F2
void criterion_f2() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = verify_frequency_estimates(table_unit(), {1000.0, 2000.0, 10000.0});
    bool ok = rows.size() == 3;
    double worst = 100.0;
    for (const auto& r : rows) {
        for (double acc : {r.acc_rocof_pct, r.acc_nadir_pct, r.acc_qss_pct}) {
            worst = std::min(worst, acc);
            if (acc < 92.0) ok = false;
        }
    }
    const double secs = elapsed_s(t0);
    if (secs >= 10.0) ok = false;
    std::ostringstream d;
    d << "nine-cell accuracy floor " << worst << "%, runtime " << secs << " s";
    report("F2", ok, d.str());
}

// -------------------------------------------- O1/O2/V1/V2/S1 share plans
struct PlanRecord {
    FeederModel feeder;
    PlanningConfig config;
    RestorationPlan plan;
    std::string label;
};

std::vector<PlanRecord> g_plans;

void criterion_o1() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    int agreements = 0;
    std::ostringstream d;
    for (unsigned seed = 1; seed <= 20; ++seed) {
        const auto toy = toys::random_toy(seed);
        PlanningConfig cfg;
        const BuiltModel bm = build_model(toy.feeder, cfg);
        if (bm.ir.num_binaries() > 24) {
            ok = false;
            d << " seed" << seed << ":too-many-binaries";
            continue;
        }
        const auto oracle = oracle::enumerate_best(toy.feeder, cfg);
        double planner_kwh = -1.0;
        bool planner_feasible = true;
        try {
            const RestorationPlan plan =
                solve_plan(toy.feeder, cfg, milp::Backend::make_exhaustive());
            planner_kwh = plan.metrics.customer_hours_mwh * 1000.0;
            g_plans.push_back({toy.feeder, cfg, plan, "o1_seed" + std::to_string(seed)});
        } catch (const PlanningError&) {
            planner_feasible = false;
        }
        const bool agree =
            oracle.found
                ? planner_feasible && std::abs(planner_kwh - oracle.best_kwh) <=
                                          1e-6 * std::max(1.0, std::abs(oracle.best_kwh))
                : !planner_feasible;
        if (agree) ++agreements;
        else {
            ok = false;
            d << " seed" << seed << ": oracle=" << oracle.best_kwh << " planner=" << planner_kwh;
        }
    }
    const double secs = elapsed_s(t0);
    if (secs >= 300.0) ok = false;
    d << " (" << agreements << "/20 agree, " << secs << " s)";
    report("O1", ok, "exhaustive planner vs sequence-enumeration oracle" + d.str());
}

// O2 toy: a battery-rich island next to a battery-poor, heavily loaded
// island; merging early lets the pool carry the switchable pickup that the
// benchmark must defer to grid arrival.
FeederModel o2_toy(int steps, int recovery) {
    toys::ToySpec t(steps);
    t.bus("tgb", "tg_interconnect").bus("b1").bus("g1", "gfmi_root").bus("b2").bus("g2",
                                                                                   "gfmi_root");
    t.sw("tgb", "b1", "SSW");
    t.line("b1", "g1");
    t.sw("b1", "b2", "SSW");
    t.line("b2", "g2");
    t.gfmi("g1", 300.0, 320.0);
    t.gfmi("g2", 240.0, 70.0);
    t.load("b1", 10.0, false);
    t.load("b2", 35.0, false);
    t.load("g2", 30.0, true);
    t.tg("tgb", 2000.0, recovery);
    return t.build();
}

void criterion_o2() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    bool any_strict = false;
    std::ostringstream d;
    std::vector<double> improvements;
    for (int recovery : {2, 3}) {
        const FeederModel f = o2_toy(5, recovery);
        PlanningConfig opt;
        PlanningConfig rb;
        rb.sync_mode = SyncMode::rule_based;
        try {
            const RestorationPlan po = solve_plan(f, opt, milp::Backend::make_exhaustive(40));
            const RestorationPlan pr = solve_plan(f, rb, milp::Backend::make_exhaustive(40));
            g_plans.push_back({f, opt, po, "o2_opt_r" + std::to_string(recovery)});
            g_plans.push_back({f, rb, pr, "o2_rb_r" + std::to_string(recovery)});
            const double eo = po.metrics.customer_hours_mwh;
            const double er = pr.metrics.customer_hours_mwh;
            if (eo < er - 1e-9) ok = false;
            if (eo > er + 1e-9) any_strict = true;
            const double to = po.metrics.restoration_time_min;
            const double tr = pr.metrics.restoration_time_min;
            const bool both_restored = to >= 0.0 && tr >= 0.0;
            if (!both_restored || to > tr + 1e-9) ok = false;
            improvements.push_back(eo - er);
            d << " r" << recovery << ": opt " << eo * 1000 << "kWh/" << to << "min vs rb "
              << er * 1000 << "kWh/" << tr << "min;";
        } catch (const PlanningError& e) {
            ok = false;
            d << " r" << recovery << ": " << e.what() << ";";
        }
    }
    for (std::size_t i = 1; i < improvements.size(); ++i) {
        if (improvements[i] < improvements[i - 1] - 1e-9) ok = false;
    }
    if (!any_strict) ok = false;  // the comparison must not be vacuous
    d << " runtime " << elapsed_s(t0) << " s";
    report("O2", ok, "optimal vs rule-based synchronization" + d.str());
}

void criterion_v1() {
    bool ok = true;
    std::ostringstream d;
    int mutations = 0;
    for (const auto& rec : g_plans) {
        const ValidationReport rep = validate_plan(rec.feeder, rec.plan, rec.config);
        if (!rep.passed()) {
            ok = false;
            d << " " << rec.label << " failed validation;";
        }
    }
    // single-closure mutations into Table-I-illegal states must be caught
    for (const auto& rec : g_plans) {
        for (std::size_t si = 0; si < rec.plan.steps.size(); ++si) {
            for (std::size_t ci = 0; ci < rec.plan.steps[si].closures.size(); ++ci) {
                const SwitchClosure cl = rec.plan.steps[si].closures[ci];
                // state 1: retime the closure to step 1 when both endpoints
                // start dark (the step-1 closure sees the initialization)
                const Line& l = rec.feeder.line(cl.switch_id);
                const bool i0 = rec.feeder.gfmi_at(l.from) != nullptr;
                const bool j0 = rec.feeder.gfmi_at(l.to) != nullptr;
                if (!i0 && !j0 && si != 0) {
                    RestorationPlan bad = rec.plan;
                    bad.steps[si].closures.erase(bad.steps[si].closures.begin() +
                                                 static_cast<long>(ci));
                    bad.steps[0].closures.push_back(cl);
                    ++mutations;
                    if (validate_plan(rec.feeder, bad, rec.config).passed()) {
                        ok = false;
                        d << " state1 mutation missed (" << rec.label << "," << cl.switch_id
                          << ");";
                    }
                }
                // state 5: re-operating a closed switch
                if (si + 1 < rec.plan.steps.size()) {
                    RestorationPlan bad = rec.plan;
                    bad.steps[si + 1].closures.push_back(cl);
                    ++mutations;
                    if (validate_plan(rec.feeder, bad, rec.config).passed()) {
                        ok = false;
                        d << " state5 mutation missed (" << rec.label << "," << cl.switch_id
                          << ");";
                    }
                }
                // state 4 / kind legality: flip the declared kind
                {
                    RestorationPlan bad = rec.plan;
                    auto& mcl = bad.steps[si].closures[ci];
                    mcl.kind = mcl.kind == SwitchKind::esw ? SwitchKind::ssw : SwitchKind::esw;
                    ++mutations;
                    if (validate_plan(rec.feeder, bad, rec.config).passed()) {
                        ok = false;
                        d << " kind mutation missed (" << rec.label << "," << cl.switch_id << ");";
                    }
                }
                // synchronizing flag flips
                {
                    RestorationPlan bad = rec.plan;
                    bad.steps[si].closures[ci].sync = !cl.sync;
                    ++mutations;
                    if (validate_plan(rec.feeder, bad, rec.config).passed()) {
                        ok = false;
                        d << " sync-flag mutation missed (" << rec.label << "," << cl.switch_id
                          << ");";
                    }
                }
            }
        }
    }
    std::ostringstream s;
    s << g_plans.size() << " plans validated, " << mutations << " mutations caught" << d.str();
    report("V1", ok, s.str());
}

void criterion_v2() {
    bool ok = true;
    std::ostringstream d;
    for (const auto& rec : g_plans) {
        for (const Finding& fd : check_radiality(rec.feeder, rec.plan)) {
            if (fd.severity == Severity::fail) {
                ok = false;
                d << " " << rec.label << " step " << fd.step << ": " << fd.message << ";";
            }
        }
    }
    report("V2", ok, "forest radiality and counting identity on every produced plan" + d.str());
}

void criterion_s1() {
    bool ok = true;
    int sync_events = 0;
    std::ostringstream d;
    for (const auto& rec : g_plans) {
        for (const auto& st : rec.plan.steps) {
            for (const auto& cl : st.closures) sync_events += cl.sync ? 1 : 0;
        }
        for (const Finding& fd : check_energy_and_balance(rec.feeder, rec.plan, rec.config)) {
            if (fd.severity == Severity::fail && fd.check == "sync_instant") {
                ok = false;
                d << " " << rec.label << ": " << fd.message << ";";
            }
        }
        for (const Finding& fd : check_frequency_security(rec.feeder, rec.plan, rec.config)) {
            if (fd.severity == Severity::fail &&
                fd.message.find("unmatched") != std::string::npos) {
                ok = false;
                d << " " << rec.label << ": " << fd.message << ";";
            }
        }
    }
    if (sync_events == 0) {
        ok = false;
        d << " no synchronizing instant exercised;";
    }
    std::ostringstream s;
    s << sync_events << " synchronizing closures screened" << d.str();
    report("S1", ok, s.str());
}

// ---------------------------------------------------------------- M1
void criterion_m1() {
    bool ok = true;
    for (double xl : {-3.0, -1.0, 0.0, 2.0}) {
        const double xu = xl + 4.0;
        for (int delta = 0; delta <= 1; ++delta) {
            for (double x = xl; x <= xu + 1e-9; x += 0.1) {
                double wlo = std::max(xl * delta, x - xu * (1 - delta));
                double whi = std::min(xu * delta, x - xl * (1 - delta));
                if (std::abs(wlo - delta * x) > 1e-12 || std::abs(whi - delta * x) > 1e-12) {
                    ok = false;
                }
            }
        }
    }
    report("M1", ok, "binary-product envelope collapses to w = delta*x on the grid");
}

// ---------------------------------------------------------------- M2
milp::ModelIR random_milp(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    milp::ModelIR m("m2_" + std::to_string(seed));
    std::vector<milp::VarId> vars;
    for (int j = 0; j < 4; ++j) {
        vars.push_back(
            m.add_var("x" + std::to_string(j), milp::VarKind::continuous, 0.0, 10.0, "v"));
    }
    for (int j = 0; j < 3; ++j) {
        vars.push_back(m.add_binary("b" + std::to_string(j), "v"));
    }
    for (int i = 0; i < 4; ++i) {
        milp::LinExpr e;
        for (auto v : vars) e.add(v, coef(rng));
        m.add_le(e, 4.0 + std::abs(coef(rng)), "row.le" + std::to_string(i));
    }
    // one equality pairing a binary with a continuous variable
    milp::LinExpr eq;
    eq.add(vars[0], 1.0).add(vars[4], -2.0);
    m.add_eq(eq, 0.5, "row.eq");
    milp::LinExpr obj;
    for (auto v : vars) obj.add(v, coef(rng));
    m.set_objective(milp::ObjSense::maximize, obj);
    return m;
}

void criterion_m2() {
    std::string cmd;
    if (const char* env = std::getenv("RESTOPLAN_EXT_SOLVER"); env && *env) {
        cmd = env;
    } else if (std::system("python3 -c 'import scipy.optimize' >/dev/null 2>&1") == 0) {
        cmd = "python3 " + std::string(RESTOPLAN_TOOLS_DIR) +
              "/lp_solve_adapter.py {model} {solution}";
    }
    if (cmd.empty()) {
        report_skip("M2", "warning: no external MILP solver configured "
                          "(set RESTOPLAN_EXT_SOLVER or install scipy); criterion skipped");
        return;
    }
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    int agreements = 0;
    std::ostringstream d;
    const std::string dir = (std::filesystem::temp_directory_path() / "restoplan_m2").string();
    for (unsigned seed = 1; seed <= 20; ++seed) {
        const milp::ModelIR m = random_milp(seed);
        const milp::Solution mine = milp::solve(m, milp::Backend::make_exhaustive());
        const milp::Solution ext = milp::solve(m, milp::Backend::make_external(cmd, dir));
        const bool both_infeasible = mine.status == milp::SolveStatus::infeasible &&
                                     ext.status == milp::SolveStatus::infeasible;
        const bool both_solved = mine.status == milp::SolveStatus::optimal &&
                                 (ext.status == milp::SolveStatus::optimal ||
                                  ext.status == milp::SolveStatus::feasible);
        bool agree = both_infeasible;
        if (both_solved) {
            agree = std::abs(mine.objective - ext.objective) <=
                    1e-6 * std::max(1.0, std::abs(mine.objective));
        }
        if (agree) ++agreements;
        else {
            ok = false;
            d << " seed" << seed << ": mine=" << mine.objective << "(" << (int)mine.status
              << ") ext=" << ext.objective << "(" << (int)ext.status << ");";
        }
    }
    d << " (" << agreements << "/20 agree, " << elapsed_s(t0) << " s)";
    report("M2", ok, "embedded exhaustive vs external MILP on emitted LP files" + d.str());
}

// ---------------------------------------------------------------- C1
void criterion_c1() {
    const ClpuCoefficients c{0.8, 0.4, 0.15};
    LoadStatusHistory h;
    h.y = {0, 1, 1, 1, 1, 1};
    std::vector<double> profile(6, 100.0);
    const double expect[] = {180.0, 140.0, 115.0, 100.0, 100.0};
    bool ok = true;
    for (int k = 0; k < 5; ++k) {
        // exact up to one rounding of the double products
        if (std::abs(clpu_active_demand(profile, h, c, k + 1) - expect[k]) > 1e-9) ok = false;
    }
    report("C1", ok, "single-pickup demand sequence (180, 140, 115, 100, 100) kW");
}

}  // namespace

int main() {
    std::printf("restoplan acceptance criteria\n");
    criterion_f1();
    criterion_f2();
    criterion_o1();
    criterion_o2();
    criterion_v1();
    criterion_v2();
    criterion_m1();
    criterion_m2();
    criterion_c1();
    criterion_s1();
    std::printf("%d criterion failure(s)\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
