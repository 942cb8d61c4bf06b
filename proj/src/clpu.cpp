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

#include "restoplan/clpu.hpp"

#include <cmath>

namespace restoplan {

void ClpuCoefficients::validate() const {
    if (!(a1 >= a2 && a2 >= a3 && a3 >= 0.0)) {
        throw std::invalid_argument("clpu: coefficients must satisfy a1 >= a2 >= a3 >= 0");
    }
}

double clpu_active_demand(double pbar_kw, int y_t, int y_tm1, int y_tm2, int y_tm3,
                          const ClpuCoefficients& c) {
    const double surge = c.a1 * (y_t - y_tm1) + c.a2 * (y_tm1 - y_tm2) + c.a3 * (y_tm2 - y_tm3);
    return pbar_kw * (surge + y_t);
}

double clpu_active_demand(const std::vector<double>& profile, const LoadStatusHistory& h,
                          const ClpuCoefficients& c, int t) {
    if (t < 0 || t >= static_cast<int>(profile.size())) {
        throw std::out_of_range("clpu: step outside profile");
    }
    return clpu_active_demand(profile[t], h.at(t), h.at(t - 1), h.at(t - 2), h.at(t - 3), c);
}

double clpu_reactive_demand(double p_actual_kw, double pf_angle_rad) {
    constexpr double half_pi = 1.57079632679489661923;
    if (!(std::abs(pf_angle_rad) < half_pi)) {
        throw std::domain_error("clpu: pf angle must lie strictly inside (-pi/2, pi/2)");
    }
    return p_actual_kw * std::tan(pf_angle_rad);
}

}  // namespace restoplan
