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

#ifndef RESTOPLAN_MILP_SOLVE_HPP
#define RESTOPLAN_MILP_SOLVE_HPP

#include <optional>
#include <string>
#include <vector>

#include "restoplan/milp/model.hpp"

namespace restoplan::milp {

/// Enumerates all binary assignments (bound-propagation pruned, depth-first
/// in declaration order) and solves the remaining LP with the embedded
/// simplex. Ties are broken toward the lexicographically smallest
/// assignment. Oracle-grade, desk scale only.
struct ExhaustiveBackend {
    int max_binaries = 24;
};

/// Writes the LP file, runs a solver command with {model} and {solution}
/// placeholders substituted, and parses `name value` line pairs from the
/// solution file.
struct ExternalBackend {
    std::string command_template;
    std::string work_dir;  // empty -> std::filesystem::temp_directory_path()
};

struct Backend {
    std::optional<ExhaustiveBackend> exhaustive;
    std::optional<ExternalBackend> external;

    static Backend make_exhaustive(int max_binaries = 24) {
        Backend b;
        b.exhaustive = ExhaustiveBackend{max_binaries};
        return b;
    }
    static Backend make_external(std::string cmd, std::string work_dir = "") {
        Backend b;
        b.external = ExternalBackend{std::move(cmd), std::move(work_dir)};
        return b;
    }
};

Solution solve(const ModelIR& model, const Backend& backend);

/// Feasibility tolerances shared by the backends and the bound checks.
constexpr double kFeasTol = 1e-6;
constexpr double kIntTol = 1e-5;

struct ElasticViolation {
    std::string tag;
    double amount = 0.0;
};

/// Re-solves with non-negative slacks on every row, minimizing total slack;
/// returns the tags with nonzero slack in the best relaxation. Used for
/// structured infeasibility reports. Exhaustive backend only.
std::vector<ElasticViolation> elastic_diagnose(const ModelIR& model, int max_binaries = 24);

}  // namespace restoplan::milp

#endif  // RESTOPLAN_MILP_SOLVE_HPP
