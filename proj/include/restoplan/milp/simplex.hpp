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
// Dense two-phase primal simplex for the desk-scale LPs left after the
// exhaustive backend fixes every binary. Bland's rule, no presolve.

#ifndef RESTOPLAN_MILP_SIMPLEX_HPP
#define RESTOPLAN_MILP_SIMPLEX_HPP

#include <vector>

#include "restoplan/milp/model.hpp"

namespace restoplan::milp {

struct LpRow {
    std::vector<std::pair<int, double>> terms;  // column index -> coef
    ConKind kind = ConKind::linear_le;          // linear_le or linear_eq
    double rhs = 0.0;
};

struct LpProblem {
    // maximize c'x subject to rows, lb <= x <= ub (entries may be +/-inf)
    std::vector<double> c;
    std::vector<double> lb;
    std::vector<double> ub;
    std::vector<LpRow> rows;
};

struct LpResult {
    SolveStatus status = SolveStatus::error;
    std::vector<double> x;
    double objective = 0.0;
};

LpResult solve_lp(const LpProblem& lp);

}  // namespace restoplan::milp

#endif  // RESTOPLAN_MILP_SIMPLEX_HPP
