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

#include <cmath>
#include <random>

#include "doctest.h"
#include "restoplan/der.hpp"
#include "restoplan/feeder.hpp"

using namespace restoplan;

namespace {

// 20 MVA unit with the published VSG constants; the rating is recovered by
// inverting the droop equation against the validation table.
GfmiParams table_unit() {
    GfmiParams p;
    p.s_rat = 20000.0;  // kVA
    p.c = 4600.0;
    p.h = 4.0;
    p.d = 1.0;
    p.kf = 89.0;
    p.kv = 0.05;
    p.gamma = 0.093;
    return p;
}

}  // namespace

TEST_CASE("der: QSS frequency droop") {
    const GfmiParams p = table_unit();
    CHECK(qss_frequency(p, 0.0) == doctest::Approx(60.0));
    CHECK(qss_frequency(p, 10000.0) == doctest::Approx(59.6666).epsilon(2e-5));
    CHECK(qss_frequency(p, 2000.0) == doctest::Approx(59.9333).epsilon(2e-5));
    CHECK(qss_frequency(p, 1000.0) == doctest::Approx(59.9666).epsilon(2e-5));
    CHECK_THROWS_AS(qss_frequency(p, 30000.0), std::domain_error);
}

TEST_CASE("der: RoCoF estimate") {
    const GfmiParams p = table_unit();
    CHECK(rocof_estimate(p, 0.0) == 0.0);
    CHECK(rocof_estimate(p, 10000.0) == doctest::Approx(-3.75));
    CHECK(rocof_estimate(p, 2000.0) == doctest::Approx(-0.75));
    // linearity
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(100.0, 9000.0);
    for (int i = 0; i < 20; ++i) {
        const double dp = dist(rng);
        CHECK(rocof_estimate(p, 2.0 * dp) == doctest::Approx(2.0 * rocof_estimate(p, dp)));
    }
}

TEST_CASE("der: nadir estimate") {
    const GfmiParams p = table_unit();
    CHECK(nadir_estimate(p, 60.0, 0.0) == doctest::Approx(60.0));
    CHECK(nadir_estimate(p, 60.0, 10000.0) == doctest::Approx(59.6357).epsilon(2e-5));
    CHECK(nadir_estimate(p, 60.0, 1000.0) == doctest::Approx(59.9636).epsilon(2e-5));
    // ordering for a pickup: nadir <= post-QSS <= pre
    const double post = qss_frequency(p, 5000.0);
    const double nad = nadir_estimate(p, 60.0, 5000.0);
    CHECK(nad <= post);
    CHECK(post <= 60.0);
}

TEST_CASE("der: gamma against the published constants") {
    const double t0 = recover_t_lp(4.0, 1.0, 89.0, 0.093);
    const GammaResult g = gamma_compute(4.0, 1.0, 89.0, t0);
    CHECK_FALSE(g.overdamped);
    CHECK(g.value == doctest::Approx(0.093).epsilon(1e-6));

    // critically-damped edge: tiny lag has no overshoot
    const GammaResult over = gamma_compute(4.0, 1.0, 89.0, 0.005);
    CHECK(over.overdamped);
    CHECK(over.value == 0.0);
}

TEST_CASE("der: gamma matches the simulated overshoot (including 2*T0)") {
    const double t0 = recover_t_lp(4.0, 1.0, 89.0, 0.093);
    for (double t_lp : {t0, 2.0 * t0}) {
        const GammaResult g = gamma_compute(4.0, 1.0, 89.0, t_lp);
        REQUIRE_FALSE(g.overdamped);
        GfmiParams p = table_unit();
        p.gamma = g.value;
        p.t_lp = t_lp;
        const auto traj = simulate_vsg_step(p, 0.0, 4000.0, 10.0, 5e-4);
        const FreqResponse meas = extract_response(traj);
        const double overshoot = (meas.f_qss - meas.f_nadir) / (60.0 - meas.f_qss);
        CHECK(overshoot == doctest::Approx(g.value).epsilon(0.05));
    }
}

TEST_CASE("der: terminal voltage droop decomposition") {
    GfmiParams p = table_unit();
    const TerminalVoltage v0 = terminal_voltage_sq(p, 0.0);
    CHECK(v0.v_sq == doctest::Approx(1.0));
    CHECK(v0.dv_cc == doctest::Approx(0.0));

    const TerminalVoltage v = terminal_voltage_sq(p, 0.5 * p.s_rat);
    CHECK(v.v_sq == doctest::Approx(0.950625));
    CHECK(v.v_sq == doctest::Approx(1.0 + v.dv_cc));

    // |dv_cc| <= 2 V* Kv + Kv^2 over q_pu in [-1, 1]
    const double bound = 2.0 * p.kv + p.kv * p.kv;
    for (double q = -1.0; q <= 1.0; q += 0.05) {
        CHECK(std::abs(terminal_voltage_sq(p, q * p.s_rat).dv_cc) <= bound + 1e-12);
    }
}

TEST_CASE("der: soc bookkeeping") {
    GfmiParams p = table_unit();
    CHECK(soc_step(p, 0.7, 0.0, 0.25).soc == doctest::Approx(0.7));
    p.c = 2000.0;
    const SocStep s = soc_step(p, 0.5, 1000.0, 0.25);
    CHECK(s.soc == doctest::Approx(0.375));
    CHECK(s.in_range);
    CHECK_FALSE(soc_step(p, 0.1, 1000.0, 0.25).in_range);

    // telescoping: many small steps equal one aggregate energy balance
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-400.0, 400.0);
    double soc = 0.5, energy = 0.0;
    for (int i = 0; i < 40; ++i) {
        const double pw = dist(rng) * 0.1;
        soc = soc_step(p, soc, pw, 0.05).soc;
        energy += pw * 0.05;
    }
    CHECK(soc == doctest::Approx(0.5 - energy / p.c).epsilon(1e-9));
}

TEST_CASE("der: grid-following PV delay") {
    PvUnit pv;
    pv.bus = "b1";
    pv.phases = PhaseSet::single(Phase::a);
    pv.rated_kw = 100.0;
    pv.profile = {50.0, 60.0, 70.0};
    CHECK(pv_output(pv, 0, false) == 0.0);
    CHECK(pv_output(pv, 1, true) == 60.0);
    CHECK(pv_q_bounds(pv, true) == std::pair<double, double>{-48.4, 48.4});
    CHECK(pv_q_bounds(pv, false) == std::pair<double, double>{0.0, 0.0});
}

TEST_CASE("der: simulator reproduces the closed-form QSS for random steps") {
    GfmiParams p = table_unit();
    p.t_lp = recover_t_lp(p.h, p.d, p.kf, p.gamma);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(500.0, 9000.0);
    for (int i = 0; i < 5; ++i) {
        const double dp = dist(rng);
        const auto traj = simulate_vsg_step(p, 0.0, dp, 8.0, 1e-3);
        const FreqResponse meas = extract_response(traj);
        CHECK(meas.f_qss == doctest::Approx(qss_frequency(p, dp)).epsilon(1e-3 / 60.0));
    }
    // zero step stays flat
    const auto flat = simulate_vsg_step(p, 0.0, 0.0, 2.0, 1e-3);
    for (const auto& s : flat) CHECK(s.f_hz == doctest::Approx(60.0));
}

TEST_CASE("der: simulator guards") {
    GfmiParams p = table_unit();
    CHECK_THROWS_AS(simulate_vsg_step(p, 0.0, 1000.0, 8.0, 1e-3), std::invalid_argument);
    p.t_lp = 0.05;
    p.gamma = gamma_compute(p.h, p.d, p.kf, 0.05).value;
    CHECK_THROWS_AS(simulate_vsg_step(p, 0.0, 1000.0, 8.0, 0.5), std::invalid_argument);
}

TEST_CASE("der: params validation") {
    GfmiParams p = table_unit();
    CHECK_NOTHROW(p.validate());
    p.t_lp = recover_t_lp(p.h, p.d, p.kf, 0.093);
    CHECK_NOTHROW(p.validate());
    p.gamma = 0.2;  // inconsistent with t_lp
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    GfmiParams bad = table_unit();
    bad.h = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("der: simulated 2 MW nadir lands near the published measurement") {
    // the published RMS measurement reads 59.9251 Hz; the reduced-order
    // model settles within a few millihertz of it
    GfmiParams p;
    p.s_rat = 20000.0;
    p.c = 4600.0;
    p.h = 4.0;
    p.d = 1.0;
    p.kf = 89.0;
    p.kv = 0.05;
    p.gamma = 0.093;
    p.t_lp = recover_t_lp(p.h, p.d, p.kf, p.gamma);
    const auto traj = simulate_vsg_step(p, 0.0, 2000.0, 8.0, 1e-3);
    const FreqResponse meas = extract_response(traj);
    CHECK(std::abs(meas.f_nadir - 59.9251) <= 5e-3);
    CHECK(std::abs(meas.f_nadir - 59.9272) <= 1e-3);  // and on the estimate itself
}
