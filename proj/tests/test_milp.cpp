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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "restoplan/milp/emit.hpp"
#include "restoplan/milp/model.hpp"
#include "restoplan/milp/simplex.hpp"
#include "restoplan/milp/solve.hpp"

using namespace restoplan::milp;

namespace {

std::string golden_path(const std::string& name) {
    return std::string(RESTOPLAN_TEST_DIR) + "/golden/" + name;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 2-variable knapsack used for the golden emission files
ModelIR knapsack() {
    ModelIR m("knapsack");
    const VarId x = m.add_binary("x", "vars");
    const VarId y = m.add_binary("y", "vars");
    const VarId u = m.add_var("u", VarKind::continuous, 0.0, 2.5, "vars");
    LinExpr cap;
    cap.add(x, 3.0).add(y, 4.0).add(u, 1.0);
    m.add_le(cap, 6.0, "cap.weight");
    LinExpr tie;
    tie.add(x, 1.0).add(y, 1.0);
    m.add_le(tie, 1.0, "cap.choose_one");
    LinExpr obj;
    obj.add(x, 5.0).add(y, 4.0).add(u, 1.0);
    m.set_objective(ObjSense::maximize, obj);
    return m;
}

}  // namespace

TEST_CASE("milp: McCormick binary product is exact on a grid") {
    // bounds straddling zero
    for (double xl : {-2.0, 0.0, 1.0}) {
        const double xu = xl + 3.0;
        for (int delta = 0; delta <= 1; ++delta) {
            for (double xv = xl; xv <= xu + 1e-9; xv += 0.1) {
                // w box implied by the four inequalities at fixed (delta, x)
                double wlo = -1e30, whi = 1e30;
                whi = std::min(whi, xu * delta);
                wlo = std::max(wlo, xl * delta);
                whi = std::min(whi, xv - xl * (1 - delta));
                wlo = std::max(wlo, xv - xu * (1 - delta));
                CHECK(wlo == doctest::Approx(delta * xv).epsilon(1e-12));
                CHECK(whi == doctest::Approx(delta * xv).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("milp: McCormick product via the solver") {
    for (int fix_delta = 0; fix_delta <= 1; ++fix_delta) {
        ModelIR m("mc");
        const VarId d = m.add_binary("d", "v");
        const VarId x = m.add_var("x", VarKind::continuous, -1.5, 2.0, "v");
        const VarId w = m.mccormick_binary_product(d, x, "w", "mc.prod");
        LinExpr fd;
        fd.add(d, 1.0);
        m.add_eq(fd, fix_delta, "fix.delta");
        LinExpr fx;
        fx.add(x, 1.0);
        m.add_eq(fx, 1.25, "fix.x");
        LinExpr obj;
        obj.add(w, 1.0);
        m.set_objective(ObjSense::maximize, obj);
        const Solution s = solve(m, Backend::make_exhaustive());
        REQUIRE(s.status == SolveStatus::optimal);
        CHECK(s.value(w) == doctest::Approx(fix_delta * 1.25));
    }
}

TEST_CASE("milp: big-M switchable relaxation") {
    for (int fix = 0; fix <= 1; ++fix) {
        ModelIR m("bigm");
        const VarId y = m.add_binary("y", "v");
        const VarId x = m.add_var("x", VarKind::continuous, -10.0, 10.0, "v");
        LinExpr e;
        e.add(x, 1.0).add_constant(-2.0);  // expr = x - 2
        CHECK(m.add_big_m_switchable(e, y, 12.0, "sw.gate"));
        LinExpr fy;
        fy.add(y, 1.0);
        m.add_eq(fy, fix, "fix.y");
        LinExpr obj;
        obj.add(x, 1.0);
        m.set_objective(ObjSense::maximize, obj);
        const Solution s = solve(m, Backend::make_exhaustive());
        REQUIRE(s.status == SolveStatus::optimal);
        // y=1 pins x to 2; y=0 leaves x free to its bound
        CHECK(s.value(x) == doctest::Approx(fix ? 2.0 : 10.0));
    }
    // inadequate big-M is reported
    ModelIR m("bigm2");
    const VarId y = m.add_binary("y", "v");
    const VarId x = m.add_var("x", VarKind::continuous, -100.0, 100.0, "v");
    LinExpr e;
    e.add(x, 1.0);
    CHECK_FALSE(m.add_big_m_switchable(e, y, 5.0, "sw.small"));
}

TEST_CASE("milp: capability disk") {
    SUBCASE("polygon feasibility at and beyond the radius") {
        for (double target : {5.0, 5.0 * 1.01}) {
            ModelIR m("disk");
            const VarId p = m.add_var("p", VarKind::continuous, -10.0, 10.0, "v");
            const VarId q = m.add_var("q", VarKind::continuous, -10.0, 10.0, "v");
            LinExpr pe, qe;
            pe.add(p, 1.0);
            qe.add(q, 1.0);
            m.quad_capability(pe, qe, 5.0, CapabilityMode::polygon, 16, "cap.p");
            LinExpr fq;
            fq.add(q, 1.0);
            m.add_eq(fq, 0.0, "fix.q");
            LinExpr fp;
            fp.add(p, 1.0);
            m.add_ge(fp, target, "fix.p");
            LinExpr obj;
            obj.add(p, 1.0);
            m.set_objective(ObjSense::maximize, obj);
            const Solution s = solve(m, Backend::make_exhaustive());
            // the cut at angle 0 pins p <= r exactly, so r*1.01 is infeasible
            if (target > 5.0) CHECK(s.status == SolveStatus::infeasible);
            else CHECK(s.status == SolveStatus::optimal);
        }
    }
    SUBCASE("polygon over-approximation stays under 1/cos(pi/16)-1") {
        const double r = 5.0;
        const double worst = r / std::cos(3.14159265358979323846 / 16.0);
        for (int k = 0; k < 200; ++k) {
            const double a = 2.0 * 3.14159265358979323846 * k / 200.0;
            // maximal radius along direction a admitted by the 16 cuts
            double rad = 1e30;
            for (int c = 0; c < 16; ++c) {
                const double b = 2.0 * 3.14159265358979323846 * c / 16.0;
                const double proj = std::cos(a - b);
                if (proj > 1e-9) rad = std::min(rad, r / proj);
            }
            CHECK(rad >= r - 1e-9);
            CHECK(rad <= worst + 1e-9);
        }
    }
    SUBCASE("quadratic mode emits a convex row and blocks MPS") {
        ModelIR m("diskq");
        const VarId p = m.add_var("p", VarKind::continuous, -10.0, 10.0, "v");
        const VarId q = m.add_var("q", VarKind::continuous, -10.0, 10.0, "v");
        LinExpr pe, qe;
        pe.add(p, 1.0);
        qe.add(q, 1.0);
        m.quad_capability(pe, qe, 5.0, CapabilityMode::quadratic, 16, "cap.q");
        CHECK(m.has_quadratic());
        CHECK(emit_lp(m).find("[ p ^ 2 + q ^ 2 ] <= 25") != std::string::npos);
        CHECK_THROWS_AS(emit_mps(m), ModelError);
        const Solution s = solve(m, Backend::make_exhaustive());
        CHECK(s.status == SolveStatus::error);
    }
}

TEST_CASE("milp: LP and MPS golden files") {
    const ModelIR m = knapsack();
    CHECK(emit_lp(m) == read_file(golden_path("knapsack.lp")));
    CHECK(emit_mps(m) == read_file(golden_path("knapsack.mps")));
    // byte-identical across repeated emission
    CHECK(emit_lp(m) == emit_lp(knapsack()));
    CHECK(emit_mps(m) == emit_mps(knapsack()));
}

TEST_CASE("milp: empty model emits skeletons") {
    ModelIR m("empty");
    m.add_var("x0", VarKind::continuous, 0.0, 1.0, "v");
    const std::string lp = emit_lp(m);
    CHECK(lp.find("Minimize") != std::string::npos);
    CHECK(lp.find("End") != std::string::npos);
    const std::string mps = emit_mps(m);
    CHECK(mps.find("NAME") == 0);
    CHECK(mps.find("ENDATA") != std::string::npos);
    CHECK(mps.find("INTORG") == std::string::npos);  // markers only with binaries
}

TEST_CASE("milp: embedded simplex on hand LPs") {
    SUBCASE("bounded optimum") {
        LpProblem lp;
        lp.c = {3.0, 2.0};
        lp.lb = {0.0, 0.0};
        lp.ub = {2.0, kInf};
        lp.rows.push_back({{{0, 1.0}, {1, 1.0}}, ConKind::linear_le, 4.0});
        const LpResult r = solve_lp(lp);
        REQUIRE(r.status == SolveStatus::optimal);
        CHECK(r.objective == doctest::Approx(10.0));
        CHECK(r.x[0] == doctest::Approx(2.0));
        CHECK(r.x[1] == doctest::Approx(2.0));
    }
    SUBCASE("negative lower bounds and equalities") {
        LpProblem lp;
        lp.c = {1.0, -1.0};
        lp.lb = {-5.0, -kInf};
        lp.ub = {5.0, kInf};
        lp.rows.push_back({{{0, 1.0}, {1, 2.0}}, ConKind::linear_eq, 3.0});
        const LpResult r = solve_lp(lp);
        REQUIRE(r.status == SolveStatus::optimal);
        // x=5 -> y=-1 -> obj 6
        CHECK(r.objective == doctest::Approx(6.0));
    }
    SUBCASE("infeasible") {
        LpProblem lp;
        lp.c = {1.0};
        lp.lb = {0.0};
        lp.ub = {1.0};
        lp.rows.push_back({{{0, 1.0}}, ConKind::linear_eq, 2.0});
        CHECK(solve_lp(lp).status == SolveStatus::infeasible);
    }
    SUBCASE("unbounded") {
        LpProblem lp;
        lp.c = {1.0};
        lp.lb = {0.0};
        lp.ub = {kInf};
        const LpResult r = solve_lp(lp);
        CHECK(r.status == SolveStatus::unbounded);
    }
    SUBCASE("random LPs satisfy feasibility and optimality basics") {
        std::mt19937 rng(23);
        std::uniform_real_distribution<double> coef(-3.0, 3.0);
        for (int trial = 0; trial < 30; ++trial) {
            LpProblem lp;
            const int n = 6;
            for (int j = 0; j < n; ++j) {
                lp.c.push_back(coef(rng));
                lp.lb.push_back(0.0);
                lp.ub.push_back(4.0);
            }
            for (int i = 0; i < 4; ++i) {
                LpRow row;
                for (int j = 0; j < n; ++j) row.terms.push_back({j, coef(rng)});
                row.kind = ConKind::linear_le;
                row.rhs = 5.0 + std::abs(coef(rng));  // x=0 feasible
                lp.rows.push_back(row);
            }
            const LpResult r = solve_lp(lp);
            REQUIRE(r.status == SolveStatus::optimal);
            for (const auto& row : lp.rows) {
                double act = 0.0;
                for (const auto& [j, c] : row.terms) act += c * r.x[static_cast<std::size_t>(j)];
                CHECK(act <= row.rhs + 1e-6);
            }
            double obj0 = 0.0;  // origin is feasible, so optimum >= 0
            CHECK(r.objective >= obj0 - 1e-9);
        }
    }
}

TEST_CASE("milp: exhaustive backend") {
    SUBCASE("hand-enumerated 3-binary toy") {
        // max 4a + 3b + 2c - 2ab ... linearized via a pair constraint:
        // max 4a + 3b + 2c s.t. a + b <= 1, c <= a
        ModelIR m("toy");
        const VarId a = m.add_binary("a", "v");
        const VarId b = m.add_binary("b", "v");
        const VarId c = m.add_binary("c", "v");
        LinExpr e1;
        e1.add(a, 1.0).add(b, 1.0);
        m.add_le(e1, 1.0, "c.ab");
        LinExpr e2;
        e2.add(c, 1.0).add(a, -1.0);
        m.add_le(e2, 0.0, "c.ca");
        LinExpr obj;
        obj.add(a, 4.0).add(b, 3.0).add(c, 2.0);
        m.set_objective(ObjSense::maximize, obj);
        const Solution s = solve(m, Backend::make_exhaustive());
        REQUIRE(s.status == SolveStatus::optimal);
        CHECK(s.objective == doctest::Approx(6.0));  // a=1,c=1
        CHECK(s.value(a) == doctest::Approx(1.0));
        CHECK(s.value(b) == doctest::Approx(0.0));
        CHECK(s.value(c) == doctest::Approx(1.0));
    }
    SUBCASE("all variables fixed returns the fixed point") {
        ModelIR m("fixed");
        const VarId x = m.add_var("x", VarKind::continuous, 1.5, 1.5, "v");
        const VarId y = m.add_binary("y", "v");
        LinExpr fy;
        fy.add(y, 1.0);
        m.add_eq(fy, 1.0, "fix.y");
        LinExpr obj;
        obj.add(x, 1.0).add(y, 1.0);
        m.set_objective(ObjSense::maximize, obj);
        const Solution s = solve(m, Backend::make_exhaustive());
        REQUIRE(s.status == SolveStatus::optimal);
        CHECK(s.objective == doctest::Approx(2.5));
    }
    SUBCASE("lexicographic tie-break") {
        // both assignments of (a,b) with a+b=1 score the same; the
        // lexicographically smallest (a=0,b=1) must win
        ModelIR m("tie");
        const VarId a = m.add_binary("a", "v");
        const VarId b = m.add_binary("b", "v");
        LinExpr e;
        e.add(a, 1.0).add(b, 1.0);
        m.add_eq(e, 1.0, "c.pick");
        LinExpr obj;
        obj.add(a, 1.0).add(b, 1.0);
        m.set_objective(ObjSense::maximize, obj);
        const Solution s = solve(m, Backend::make_exhaustive());
        REQUIRE(s.status == SolveStatus::optimal);
        CHECK(s.value(a) == doctest::Approx(0.0));
        CHECK(s.value(b) == doctest::Approx(1.0));
    }
    SUBCASE("binary budget enforced") {
        ModelIR m("big");
        for (int i = 0; i < 25; ++i) m.add_binary("b" + std::to_string(i), "v");
        m.set_objective(ObjSense::maximize, LinExpr{});
        const Solution s = solve(m, Backend::make_exhaustive());
        CHECK(s.status == SolveStatus::error);
        CHECK(s.message.find("24") != std::string::npos);
    }
}

TEST_CASE("milp: external backend via a scripted solver") {
    ModelIR m("ext");
    const VarId x = m.add_var("x", VarKind::continuous, 0.0, 3.0, "v");
    LinExpr obj;
    obj.add(x, 2.0);
    m.set_objective(ObjSense::maximize, obj);
    const std::string dir = std::filesystem::temp_directory_path() / "restoplan_ext";
    // pretend solver: writes a name/value pair plus a status line
    const std::string cmd = "sh -c \"printf 'optimal\\nx 3\\n' > {solution} # {model}\"";
    const Solution s = solve(m, Backend::make_external(cmd, dir));
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.value(x) == doctest::Approx(3.0));
    CHECK(s.objective == doctest::Approx(6.0));

    // missing solver output surfaces as an error with diagnostics
    const Solution bad = solve(m, Backend::make_external("true # {model} {solution}", dir + "2"));
    CHECK(bad.status == SolveStatus::error);
    CHECK_FALSE(bad.message.empty());
}

TEST_CASE("milp: elastic diagnosis names the violated families") {
    ModelIR m("conflict");
    const VarId x = m.add_var("x", VarKind::continuous, 0.0, 1.0, "v");
    LinExpr lo;
    lo.add(x, 1.0);
    m.add_ge(lo, 3.0, "fam_a.lower");
    LinExpr hi;
    hi.add(x, 1.0);
    m.add_le(hi, 0.5, "fam_b.upper");
    m.set_objective(ObjSense::maximize, LinExpr{});
    REQUIRE(solve(m, Backend::make_exhaustive()).status == SolveStatus::infeasible);
    const auto report = elastic_diagnose(m);
    REQUIRE_FALSE(report.empty());
    CHECK(report.front().tag.rfind("fam_a", 0) == 0);
    CHECK(report.front().amount == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("milp: model validation") {
    ModelIR m("val");
    m.add_binary("b", "v");
    CHECK_THROWS_AS(m.add_binary("b", "v"), ModelError);
    LinExpr e;
    e.add(0, 1.0);
    m.add_le(e, 1.0, "tag1");
    m.add_le(e, 2.0, "tag1");  // duplicate tag
    CHECK_THROWS_AS(m.validate(), ModelError);
}

TEST_CASE("milp: census counts constraint families from tags") {
    ModelIR m = knapsack();
    const auto census = m.census();
    CHECK(census.at("cap") == 2);
    CHECK(census.at("f17") == 1);  // objective presence marker
}

TEST_CASE("milp: embedded simplex agrees with an external LP solver") {
    if (std::system("python3 -c 'import scipy.optimize' >/dev/null 2>&1") != 0) {
        MESSAGE("scipy unavailable; cross-check skipped");
        return;
    }
    const std::string cmd = "python3 " + std::string(RESTOPLAN_TEST_DIR) +
                            "/../tools/lp_solve_adapter.py {model} {solution}";
    const std::string dir = std::filesystem::temp_directory_path() / "restoplan_lpx";
    std::mt19937 rng(91);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (unsigned trial = 0; trial < 10; ++trial) {
        ModelIR m("lpx" + std::to_string(trial));
        std::vector<VarId> vars;
        for (int j = 0; j < 8; ++j) {
            vars.push_back(m.add_var("x" + std::to_string(j), VarKind::continuous, 0.0, 5.0, "v"));
        }
        for (int i = 0; i < 5; ++i) {
            LinExpr e;
            for (auto v : vars) e.add(v, coef(rng));
            m.add_le(e, 3.0 + std::abs(coef(rng)), "r" + std::to_string(i));
        }
        LinExpr obj;
        for (auto v : vars) obj.add(v, coef(rng));
        m.set_objective(ObjSense::maximize, obj);
        const Solution mine = solve(m, Backend::make_exhaustive());
        const Solution ext = solve(m, Backend::make_external(cmd, dir));
        REQUIRE(mine.status == SolveStatus::optimal);
        REQUIRE((ext.status == SolveStatus::optimal || ext.status == SolveStatus::feasible));
        CHECK(mine.objective ==
              doctest::Approx(ext.objective).epsilon(1e-6).scale(std::max(1.0, std::abs(ext.objective))));
    }
}
