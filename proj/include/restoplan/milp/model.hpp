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
// Solver-agnostic mixed-integer model store with big-M / McCormick /
// capability-disk helpers. Every constraint carries a unique tag naming its
// constraint family; family censuses are computed from tags.

#ifndef RESTOPLAN_MILP_MODEL_HPP
#define RESTOPLAN_MILP_MODEL_HPP

#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace restoplan::milp {

class ModelError : public std::runtime_error {
  public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

constexpr double kInf = std::numeric_limits<double>::infinity();

using VarId = int;

enum class VarKind { continuous, binary };

struct VarDecl {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lb = -kInf;
    double ub = kInf;
    std::string tag;
};

/// Sparse linear expression: sum of coef*var plus a constant offset.
class LinExpr {
  public:
    LinExpr() = default;
    explicit LinExpr(double constant) : constant_(constant) {}

    LinExpr& add(VarId v, double coef);
    LinExpr& add(const LinExpr& other, double scale = 1.0);
    LinExpr& add_constant(double c) { constant_ += c; return *this; }

    double constant() const { return constant_; }
    /// Term list with duplicates merged, in first-seen order.
    const std::vector<std::pair<VarId, double>>& terms() const { return terms_; }

    LinExpr operator-() const;

  private:
    std::vector<std::pair<VarId, double>> terms_;
    std::unordered_map<VarId, std::size_t> pos_;
    double constant_ = 0.0;
};

enum class ConKind { linear_le, linear_eq, quad_le };

struct Constraint {
    ConKind kind = ConKind::linear_le;
    std::vector<std::pair<VarId, double>> terms;
    // (i, j, coef) with i <= j; only sums of squares are generated here so
    // the quadratic part stays positive semidefinite.
    std::vector<std::tuple<VarId, VarId, double>> quad_terms;
    double rhs = 0.0;
    std::string tag;
};

enum class ObjSense { minimize, maximize };

enum class SolveStatus { optimal, feasible, infeasible, unbounded, error };

struct Solution {
    SolveStatus status = SolveStatus::error;
    std::vector<double> values;  // indexed by VarId
    double objective = 0.0;
    std::string message;

    double value(VarId v) const { return values.at(static_cast<std::size_t>(v)); }
};

enum class CapabilityMode { quadratic, polygon };

class ModelIR {
  public:
    explicit ModelIR(std::string name = "model") : name_(std::move(name)) {}

    const std::string& name() const { return name_; }

    VarId add_var(const std::string& name, VarKind kind, double lb, double ub,
                  const std::string& tag = "");
    VarId add_binary(const std::string& name, const std::string& tag = "") {
        return add_var(name, VarKind::binary, 0.0, 1.0, tag);
    }

    void add_le(const LinExpr& expr, double rhs, const std::string& tag);
    void add_ge(const LinExpr& expr, double rhs, const std::string& tag);
    void add_eq(const LinExpr& expr, double rhs, const std::string& tag);
    /// expr + sum of square terms <= rhs.
    void add_quad_le(const LinExpr& expr, const std::vector<std::pair<VarId, double>>& squares,
                     double rhs, const std::string& tag);

    void set_objective(ObjSense sense, const LinExpr& expr);
    ObjSense objective_sense() const { return sense_; }
    const std::vector<std::pair<VarId, double>>& objective_terms() const { return obj_terms_; }
    double objective_constant() const { return obj_constant_; }

    const std::vector<VarDecl>& vars() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    VarId var_id(const std::string& name) const;
    bool has_var(const std::string& name) const { return var_idx_.count(name) != 0; }
    std::size_t num_binaries() const;
    bool has_quadratic() const;

    /// Relaxation pair -M(1-y) <= expr <= M(1-y). Warns (returns false)
    /// when big_m is smaller than the attainable |expr| bound implied by
    /// the current variable bounds; the constraints are still emitted.
    bool add_big_m_switchable(const LinExpr& expr, VarId indicator, double big_m,
                              const std::string& tag);

    /// Exact linearization of w = delta * x for a 0/1-valued delta and a
    /// bounded continuous x. Returns the product variable.
    VarId mccormick_binary_product(VarId delta, VarId x, const std::string& w_name,
                                   const std::string& tag);

    /// p^2 + q^2 <= radius^2 as one convex-quadratic row, or as n outer
    /// tangent cuts for pure-LP backends. p and q may be expressions.
    void quad_capability(const LinExpr& p, const LinExpr& q, double radius,
                         CapabilityMode mode, int polygon_sides, const std::string& tag);

    /// Number of constraints per family (tag text before the first '.').
    /// The objective is reported as family "f17" when it has terms.
    std::map<std::string, int> census() const;

    /// Checks tag uniqueness and bound sanity. Throws ModelError.
    void validate() const;

  private:
    void add_row(ConKind kind, const LinExpr& expr, double rhs, const std::string& tag,
                 std::vector<std::pair<VarId, double>> squares = {});

    std::string name_;
    std::vector<VarDecl> vars_;
    std::vector<Constraint> constraints_;
    std::unordered_map<std::string, VarId> var_idx_;
    ObjSense sense_ = ObjSense::minimize;
    std::vector<std::pair<VarId, double>> obj_terms_;
    double obj_constant_ = 0.0;
};

}  // namespace restoplan::milp

#endif  // RESTOPLAN_MILP_MODEL_HPP
