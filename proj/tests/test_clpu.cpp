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

#include "doctest.h"
#include "restoplan/clpu.hpp"

using namespace restoplan;

namespace {
const ClpuCoefficients kDefault{0.8, 0.4, 0.15};
}

TEST_CASE("clpu: dead load draws nothing") {
    LoadStatusHistory h;
    h.y = {0, 0, 0, 0};
    std::vector<double> profile(4, 100.0);
    for (int t = 0; t < 4; ++t) {
        CHECK(clpu_active_demand(profile, h, kDefault, t) == 0.0);
    }
}

TEST_CASE("clpu: single pickup decays through the staircase") {
    // pickup at step 1 (0-based): 180, 140, 115, then the diversified 100
    LoadStatusHistory h;
    h.y = {0, 1, 1, 1, 1, 1};
    std::vector<double> profile(6, 100.0);
    CHECK(clpu_active_demand(profile, h, kDefault, 1) == doctest::Approx(180.0));
    CHECK(clpu_active_demand(profile, h, kDefault, 2) == doctest::Approx(140.0));
    CHECK(clpu_active_demand(profile, h, kDefault, 3) == doctest::Approx(115.0));
    CHECK(clpu_active_demand(profile, h, kDefault, 4) == doctest::Approx(100.0));
    CHECK(clpu_active_demand(profile, h, kDefault, 5) == doctest::Approx(100.0));
}

TEST_CASE("clpu: settled load draws exactly the diversified demand") {
    LoadStatusHistory h;
    h.y = {1, 1, 1, 1, 1};
    std::vector<double> profile{90, 80, 70, 60, 50};
    CHECK(clpu_active_demand(profile, h, kDefault, 4) == doctest::Approx(50.0));
}

TEST_CASE("clpu: multiplier sequence is non-increasing after a pickup") {
    LoadStatusHistory h;
    h.y = {1, 1, 1, 1, 1, 1};
    std::vector<double> profile(6, 1.0);
    double prev = 1e9;
    for (int t = 0; t < 6; ++t) {
        const double m = clpu_active_demand(profile, h, kDefault, t);
        CHECK(m <= prev + 1e-12);
        prev = m;
    }
    CHECK(clpu_active_demand(profile, h, kDefault, 0) == doctest::Approx(1.8));
}

TEST_CASE("clpu: energy premium equals alpha sum") {
    // total extra energy above diversified = Pbar (a1+a2+a3) dt per pickup
    LoadStatusHistory h;
    h.y = {0, 0, 1, 1, 1, 1, 1, 1};
    std::vector<double> profile(8, 50.0);
    double total = 0.0, diversified = 0.0;
    for (int t = 0; t < 8; ++t) {
        total += clpu_active_demand(profile, h, kDefault, t);
        diversified += 50.0 * h.at(t);
    }
    CHECK(total - diversified == doctest::Approx(50.0 * (0.8 + 0.4 + 0.15)));
}

TEST_CASE("clpu: reactive demand") {
    CHECK(clpu_reactive_demand(100.0, 0.0) == 0.0);
    const double theta = std::acos(0.9);
    CHECK(clpu_reactive_demand(100.0, theta) == doctest::Approx(48.4322).epsilon(1e-4));
    // homogeneity
    CHECK(clpu_reactive_demand(200.0, 0.3) == doctest::Approx(2.0 * clpu_reactive_demand(100.0, 0.3)));
    CHECK_THROWS_AS(clpu_reactive_demand(1.0, 1.5707963267948966), std::domain_error);
}

TEST_CASE("clpu: coefficient ordering enforced") {
    ClpuCoefficients bad{0.1, 0.4, 0.15};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_NOTHROW(kDefault.validate());
}
