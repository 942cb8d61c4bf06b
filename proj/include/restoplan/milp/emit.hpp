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

#ifndef RESTOPLAN_MILP_EMIT_HPP
#define RESTOPLAN_MILP_EMIT_HPP

#include <string>

#include "restoplan/milp/model.hpp"

namespace restoplan::milp {

/// Deterministic CPLEX-LP text. Quadratic constraints use the bracketed
/// quadratic syntax. Byte-identical output for identical models.
std::string emit_lp(const ModelIR& model);

/// Fixed-field MPS with INTORG/INTEND integrality markers. Quadratic
/// constraints are rejected (ModelError); use emit_lp for those models.
std::string emit_mps(const ModelIR& model);

}  // namespace restoplan::milp

#endif  // RESTOPLAN_MILP_EMIT_HPP
