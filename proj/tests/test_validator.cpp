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

#include "doctest.h"
#include "restoplan/validator.hpp"
#include "support/toys.hpp"

using namespace restoplan;

namespace {

bool has_fail(const std::vector<Finding>& findings, const std::string& check) {
    return std::any_of(findings.begin(), findings.end(), [&](const Finding& f) {
        return f.severity == Severity::fail && f.check == check;
    });
}

GfmiParams validation_unit() {
    GfmiParams p;
    p.s_rat = 20000.0;
    p.c = 4600.0;
    p.h = 4.0;
    p.d = 1.0;
    p.kf = 89.0;
    p.kv = 0.05;
    p.gamma = 0.093;
    return p;
}

}  // namespace

TEST_CASE("validator: planner output passes every check") {
    for (unsigned seed : {3u, 7u, 12u}) {
        const auto toy = toys::random_toy(seed);
        PlanningConfig cfg;
        const RestorationPlan plan = solve_plan(toy.feeder, cfg, milp::Backend::make_exhaustive());
        const ValidationReport rep = validate_plan(toy.feeder, plan, cfg);
        INFO(toy.description, "\n", report_to_text(rep));
        CHECK(rep.passed());
    }
}

TEST_CASE("validator: switch-state machine catches illegal closures") {
    const FeederModel f = toys::two_block(4);
    PlanningConfig cfg;
    const RestorationPlan plan = solve_plan(f, cfg, milp::Backend::make_exhaustive());

    SUBCASE("closing between two dark buses (state 1)") {
        RestorationPlan bad = plan;
        for (auto& st : bad.steps) st.closures.clear();
        bad.steps[0].closures.push_back({"b2-b3", SwitchKind::esw, false});
        // keep blocks as planned; the closure itself is the violation
        CHECK(has_fail(check_switch_legality(f, bad), "switch_legality"));
    }
    SUBCASE("re-operating a closed switch (state 5)") {
        RestorationPlan bad = plan;
        bad.steps[3].closures.push_back({"b2-b3", SwitchKind::esw, false});
        CHECK(has_fail(check_switch_legality(f, bad), "switch_legality"));
    }
    SUBCASE("kind flip") {
        RestorationPlan bad = plan;
        for (auto& st : bad.steps) {
            for (auto& cl : st.closures) cl.kind = SwitchKind::ssw;
        }
        CHECK(has_fail(check_switch_legality(f, bad), "switch_legality"));
    }
    SUBCASE("unknown switch") {
        RestorationPlan bad = plan;
        bad.steps[2].closures.push_back({"nope", SwitchKind::esw, false});
        CHECK(has_fail(check_switch_legality(f, bad), "switch_legality"));
    }
}

TEST_CASE("validator: live-live SSW closure needs the synchronizing flag") {
    const FeederModel f = toys::tg_two_island(4, 2);
    PlanningConfig cfg;
    const RestorationPlan plan = solve_plan(f, cfg, milp::Backend::make_exhaustive(28));
    REQUIRE(validate_plan(f, plan, cfg).passed());
    // find a sync closure and strip its flag
    RestorationPlan bad = plan;
    bool found = false;
    for (auto& st : bad.steps) {
        for (auto& cl : st.closures) {
            if (cl.sync) {
                cl.sync = false;
                found = true;
                break;
            }
        }
        if (found) break;
    }
    if (found) {
        CHECK(has_fail(check_switch_legality(f, bad), "switch_legality"));
    } else {
        // the optimum used only energizing closures; force a live-live one
        bad.steps[3].closures.push_back({"b1-b2", SwitchKind::ssw, false});
        CHECK(has_fail(check_switch_legality(f, bad), "switch_legality"));
    }
}

TEST_CASE("validator: radiality catches cycles, lost roots, and count breaks") {
    const FeederModel f = toys::tg_two_island(4, 2);
    PlanningConfig cfg;
    const RestorationPlan plan = solve_plan(f, cfg, milp::Backend::make_exhaustive(28));
    REQUIRE(check_radiality(f, plan).size() >= 1);
    REQUIRE(validate_plan(f, plan, cfg).passed());

    SUBCASE("undoing a demotion leaves two roots in one component") {
        RestorationPlan bad = plan;
        for (auto& st : bad.steps) {
            for (auto& g : st.gfmi) g.is_root = true;
        }
        CHECK(has_fail(check_radiality(f, bad), "radiality"));
    }
    SUBCASE("dropping an energized block breaks the counting identity") {
        RestorationPlan bad = plan;
        auto& blocks = bad.steps.back().blocks_on;
        REQUIRE_FALSE(blocks.empty());
        blocks.erase(blocks.begin());
        CHECK(has_fail(check_radiality(f, bad), "radiality"));
    }
    SUBCASE("root on a dark bus") {
        const FeederModel f2 = toys::two_block(3);
        RestorationPlan bad;
        for (int t = 1; t <= 3; ++t) {
            PlanStep st;
            st.t = t;
            GfmiState g;
            g.bus = "g1";
            g.is_root = true;  // but no block listed energized
            g.f_hz = 0.0;
            st.gfmi.push_back(g);
            st.block_f = {{"B1", 0.0}, {"B2", 0.0}};
            bad.steps.push_back(st);
        }
        CHECK(has_fail(check_radiality(f2, bad), "radiality"));
    }
}

TEST_CASE("validator: frequency security findings carry the violation slack") {
    // single-bus feeder around the published 20 MVA unit; a 10 MW pickup
    // lands at 59.6357 Hz, 64.3 mHz under a 59.7 Hz floor
    toys::ToySpec t(1);
    t.bus("g1", "gfmi_root");
    t.j["gfmis"].push_back({{"bus", "g1"},
                            {"s_rat_kva", 20000.0},
                            {"c_kwh", 4600.0},
                            {"h", 4.0},
                            {"d", 1.0},
                            {"kf", 89.0},
                            {"kv", 0.05},
                            {"gamma", 0.093}});
    t.load("g1", 10000.0, false);
    const FeederModel f = t.build();

    RestorationPlan plan;
    PlanStep st;
    st.t = 1;
    st.blocks_on = {"B1"};
    GfmiState g;
    g.bus = "g1";
    g.p_kw = {10000.0, 0.0, 0.0};
    g.soc = 1.0 - 10000.0 * 0.25 / 4600.0;
    g.f_hz = qss_frequency(validation_unit(), 10000.0);
    st.gfmi.push_back(g);
    st.block_f = {{"B1", g.f_hz}};
    plan.steps.push_back(st);

    PlanningConfig cfg;
    cfg.freq.nadir_min = 59.7;
    const auto findings = check_frequency_security(f, plan, cfg);
    bool seen = false;
    for (const auto& fd : findings) {
        if (fd.severity == Severity::fail && fd.message.find("nadir") != std::string::npos) {
            CHECK(fd.slack == doctest::Approx(-0.0643).epsilon(2e-3));
            seen = true;
        }
    }
    CHECK(seen);

    // widening the bands past the event clears the screen
    PlanningConfig relaxed;
    relaxed.freq.rocof_min = -4.0;
    CHECK_FALSE(has_fail(check_frequency_security(f, plan, relaxed), "frequency"));
}

TEST_CASE("validator: energy and balance replay") {
    const FeederModel f = toys::two_block(4);
    PlanningConfig cfg;
    const RestorationPlan plan = solve_plan(f, cfg, milp::Backend::make_exhaustive());
    REQUIRE_FALSE(has_fail(check_energy_and_balance(f, plan, cfg), "energy_balance"));

    SUBCASE("corrupting one SoC entry is caught at that step") {
        RestorationPlan bad = plan;
        bad.steps[2].gfmi[0].soc += 0.01;
        const auto findings = check_energy_and_balance(f, bad, cfg);
        bool seen = false;
        for (const auto& fd : findings) {
            if (fd.severity == Severity::fail && fd.step == 3) seen = true;
        }
        CHECK(seen);
    }
    SUBCASE("corrupting dispatch breaks island balance") {
        RestorationPlan bad = plan;
        bad.steps[1].gfmi[0].p_kw[0] += 5.0;
        CHECK(has_fail(check_energy_and_balance(f, bad, cfg), "energy_balance"));
    }
    SUBCASE("corrupting frequency breaks the droop law") {
        RestorationPlan bad = plan;
        bad.steps[1].gfmi[0].f_hz += 0.2;
        bad.steps[1].block_f["B1"] += 0.2;
        CHECK(has_fail(check_frequency_security(f, bad, cfg), "frequency"));
    }
}

TEST_CASE("validator: an empty network validates trivially") {
    const FeederModel f = toys::two_block(3);
    RestorationPlan idle;
    for (int t = 1; t <= 3; ++t) {
        PlanStep st;
        st.t = t;
        GfmiState g;
        g.bus = "g1";
        g.is_root = false;  // demoted at start; nothing runs
        g.f_hz = 0.0;
        st.gfmi.push_back(g);
        st.block_f = {{"B1", 0.0}, {"B2", 0.0}};
        idle.steps.push_back(st);
    }
    PlanningConfig cfg;
    const ValidationReport rep = validate_plan(f, idle, cfg);
    CHECK(rep.passed());
    const Metrics m = compute_metrics(f, cfg, idle);
    CHECK(m.customer_hours_mwh == 0.0);
    CHECK(m.restoration_time_min == -1.0);
}

TEST_CASE("validator: estimator verification table") {
    const GfmiParams p = validation_unit();
    const auto rows = verify_frequency_estimates(p, {1000.0, 2000.0, 10000.0});
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        INFO("pickup ", r.pickup_kw);
        CHECK(r.acc_rocof_pct >= 92.0);
        CHECK(r.acc_nadir_pct >= 92.0);
        CHECK(r.acc_qss_pct >= 92.0);
        // pickups always settle below the starting frequency
        CHECK(r.measured.f_nadir <= r.measured.f_qss + 1e-9);
        CHECK(r.measured.f_qss <= 60.0);
    }
    const auto zero = verify_frequency_estimates(p, {0.0});
    CHECK(zero[0].acc_qss_pct == 100.0);
    CHECK(zero[0].acc_rocof_pct == 100.0);
}

TEST_CASE("validator: report serialization") {
    const FeederModel f = toys::two_block(4);
    PlanningConfig cfg;
    const RestorationPlan plan = solve_plan(f, cfg, milp::Backend::make_exhaustive());
    const ValidationReport rep = validate_plan(f, plan, cfg);
    const std::string text = report_to_text(rep);
    CHECK(text.find("VERDICT: pass") != std::string::npos);
    const std::string json = report_to_json(rep);
    CHECK(json.find("\"verdict\": \"pass\"") != std::string::npos);
}
