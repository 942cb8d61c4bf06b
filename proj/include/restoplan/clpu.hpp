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

#ifndef RESTOPLAN_CLPU_HPP
#define RESTOPLAN_CLPU_HPP

#include <stdexcept>
#include <vector>

namespace restoplan {

/// Staircase cold-load-pickup increments. The surge multiplier decays
/// (1+a1, 1+a2, 1+a3, 1, ...) over the three steps after a pickup.
struct ClpuCoefficients {
    double a1 = 0.8;
    double a2 = 0.4;
    double a3 = 0.15;

    void validate() const;  // a1 >= a2 >= a3 >= 0
    bool operator==(const ClpuCoefficients&) const = default;
};

/// Pickup status of one load over the horizon; index 0 is the first step.
/// Pre-horizon statuses are zero. Statuses are monotone non-decreasing.
struct LoadStatusHistory {
    std::vector<int> y;

    /// Status at 0-based step t; negative t (pre-horizon) yields 0.
    int at(int t) const {
        if (t < 0 || y.empty()) return 0;
        if (t >= static_cast<int>(y.size())) return y.back();
        return y[t];
    }
};

/// Actual demand at step t under the staircase CLPU model:
///   Pbar (a1 dy_t + a2 dy_{t-1} + a3 dy_{t-2} + y_t),   dy_t = y_t - y_{t-1}.
double clpu_active_demand(double pbar_kw, int y_t, int y_tm1, int y_tm2, int y_tm3,
                          const ClpuCoefficients& c);

/// Convenience overload over a diversified profile and a status history.
double clpu_active_demand(const std::vector<double>& profile, const LoadStatusHistory& h,
                          const ClpuCoefficients& c, int t);

/// Reactive demand from the actual active demand and the load power-factor
/// angle. Throws std::domain_error at +/- pi/2.
double clpu_reactive_demand(double p_actual_kw, double pf_angle_rad);

}  // namespace restoplan

#endif  // RESTOPLAN_CLPU_HPP
