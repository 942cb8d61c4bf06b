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

#include "restoplan/milp/model.hpp"

#include <cmath>
#include <set>

namespace restoplan::milp {

LinExpr& LinExpr::add(VarId v, double coef) {
    if (coef == 0.0) return *this;
    auto it = pos_.find(v);
    if (it == pos_.end()) {
        pos_.emplace(v, terms_.size());
        terms_.emplace_back(v, coef);
    } else {
        terms_[it->second].second += coef;
    }
    return *this;
}

LinExpr& LinExpr::add(const LinExpr& other, double scale) {
    for (const auto& [v, c] : other.terms_) add(v, c * scale);
    constant_ += other.constant_ * scale;
    return *this;
}

LinExpr LinExpr::operator-() const {
    LinExpr out;
    out.add(*this, -1.0);
    return out;
}

VarId ModelIR::add_var(const std::string& name, VarKind kind, double lb, double ub,
                       const std::string& tag) {
    if (var_idx_.count(name)) throw ModelError("duplicate variable '" + name + "'");
    if (!(lb <= ub)) throw ModelError("variable '" + name + "': lower bound above upper bound");
    if (kind == VarKind::binary && (lb < 0.0 || ub > 1.0)) {
        throw ModelError("variable '" + name + "': binary bounds must lie in [0,1]");
    }
    const VarId id = static_cast<VarId>(vars_.size());
    vars_.push_back({name, kind, lb, ub, tag});
    var_idx_.emplace(name, id);
    return id;
}

void ModelIR::add_row(ConKind kind, const LinExpr& expr, double rhs, const std::string& tag,
                      std::vector<std::pair<VarId, double>> squares) {
    Constraint c;
    c.kind = kind;
    c.terms = expr.terms();
    c.rhs = rhs - expr.constant();
    c.tag = tag;
    for (const auto& [v, coef] : squares) {
        if (coef < 0.0) throw ModelError("quadratic row '" + tag + "': negative square coefficient");
        c.quad_terms.emplace_back(v, v, coef);
    }
    constraints_.push_back(std::move(c));
}

void ModelIR::add_le(const LinExpr& expr, double rhs, const std::string& tag) {
    add_row(ConKind::linear_le, expr, rhs, tag);
}

void ModelIR::add_ge(const LinExpr& expr, double rhs, const std::string& tag) {
    add_row(ConKind::linear_le, -expr, -rhs, tag);
}

void ModelIR::add_eq(const LinExpr& expr, double rhs, const std::string& tag) {
    add_row(ConKind::linear_eq, expr, rhs, tag);
}

void ModelIR::add_quad_le(const LinExpr& expr, const std::vector<std::pair<VarId, double>>& squares,
                          double rhs, const std::string& tag) {
    add_row(ConKind::quad_le, expr, rhs, tag, squares);
}

void ModelIR::set_objective(ObjSense sense, const LinExpr& expr) {
    sense_ = sense;
    obj_terms_ = expr.terms();
    obj_constant_ = expr.constant();
}

VarId ModelIR::var_id(const std::string& name) const {
    auto it = var_idx_.find(name);
    if (it == var_idx_.end()) throw ModelError("unknown variable '" + name + "'");
    return it->second;
}

std::size_t ModelIR::num_binaries() const {
    std::size_t n = 0;
    for (const auto& v : vars_) {
        if (v.kind == VarKind::binary) ++n;
    }
    return n;
}

bool ModelIR::has_quadratic() const {
    for (const auto& c : constraints_) {
        if (c.kind == ConKind::quad_le) return true;
    }
    return false;
}

bool ModelIR::add_big_m_switchable(const LinExpr& expr, VarId indicator, double big_m,
                                   const std::string& tag) {
    if (!std::isfinite(big_m)) throw ModelError("big-M must be finite (" + tag + ")");
    // attainable |expr| bound over the box of its variables
    double hi = expr.constant(), lo = expr.constant();
    bool bounded = true;
    for (const auto& [v, c] : expr.terms()) {
        const auto& d = vars_[static_cast<std::size_t>(v)];
        const double a = c * d.lb, b = c * d.ub;
        if (!std::isfinite(a) || !std::isfinite(b)) {
            bounded = false;
            break;
        }
        hi += std::max(a, b);
        lo += std::min(a, b);
    }
    const bool adequate = !bounded || (big_m >= std::max(std::abs(hi), std::abs(lo)) - 1e-9);

    // expr <= M (1 - y)  and  expr >= -M (1 - y)
    LinExpr upper;
    upper.add(expr);
    upper.add(indicator, big_m);
    add_le(upper, big_m, tag + ".hi");
    LinExpr lower;
    lower.add(expr);
    lower.add(indicator, -big_m);
    add_ge(lower, -big_m, tag + ".lo");
    return adequate;
}

VarId ModelIR::mccormick_binary_product(VarId delta, VarId x, const std::string& w_name,
                                        const std::string& tag) {
    const VarDecl& xd = vars_[static_cast<std::size_t>(x)];
    if (!std::isfinite(xd.lb) || !std::isfinite(xd.ub)) {
        throw ModelError("mccormick_binary_product: '" + xd.name + "' must have finite bounds");
    }
    const double xl = xd.lb, xu = xd.ub;
    const VarId w = add_var(w_name, VarKind::continuous, std::min(xl, 0.0), std::max(xu, 0.0), tag);

    LinExpr e1;  // w <= xu * delta
    e1.add(w, 1.0).add(delta, -xu);
    add_le(e1, 0.0, tag + ".ub_d");
    LinExpr e2;  // w >= xl * delta
    e2.add(w, 1.0).add(delta, -xl);
    add_ge(e2, 0.0, tag + ".lb_d");
    LinExpr e3;  // w <= x - xl (1 - delta)
    e3.add(w, 1.0).add(x, -1.0).add(delta, -xl);
    add_le(e3, -xl, tag + ".ub_x");
    LinExpr e4;  // w >= x - xu (1 - delta)
    e4.add(w, 1.0).add(x, -1.0).add(delta, -xu);
    add_ge(e4, -xu, tag + ".lb_x");
    return w;
}

void ModelIR::quad_capability(const LinExpr& p, const LinExpr& q, double radius,
                              CapabilityMode mode, int polygon_sides, const std::string& tag) {
    if (!(radius > 0.0)) throw ModelError("quad_capability: radius must be > 0 (" + tag + ")");
    if (mode == CapabilityMode::quadratic) {
        // p^2 + q^2 <= r^2 requires plain variables on the quadratic side;
        // fold single-variable expressions, otherwise introduce aliases.
        auto as_var = [&](const LinExpr& e, const char* which) -> VarId {
            if (e.terms().size() == 1 && e.terms()[0].second == 1.0 && e.constant() == 0.0) {
                return e.terms()[0].first;
            }
            const VarId alias = add_var(tag + "." + which, VarKind::continuous, -radius, radius, tag);
            LinExpr link;
            link.add(alias, 1.0);
            link.add(e, -1.0);
            add_eq(link, 0.0, tag + "." + which + ".link");
            return alias;
        };
        const VarId pv = as_var(p, "p_alias");
        const VarId qv = as_var(q, "q_alias");
        add_quad_le(LinExpr{}, {{pv, 1.0}, {qv, 1.0}}, radius * radius, tag + ".disk");
        return;
    }
    if (polygon_sides < 8) throw ModelError("quad_capability: polygon needs >= 8 sides (" + tag + ")");
    // Outer tangent cuts: cos(a) p + sin(a) q <= r. Over-approximates the
    // disk by a factor 1/cos(pi/n) at the polygon vertices.
    for (int k = 0; k < polygon_sides; ++k) {
        const double a = 2.0 * 3.14159265358979323846 * k / polygon_sides;
        LinExpr cut;
        cut.add(p, std::cos(a));
        cut.add(q, std::sin(a));
        add_le(cut, radius, tag + ".cut" + std::to_string(k));
    }
}

std::map<std::string, int> ModelIR::census() const {
    std::map<std::string, int> out;
    for (const auto& c : constraints_) {
        const auto dot = c.tag.find('.');
        out[c.tag.substr(0, dot)] += 1;
    }
    if (!obj_terms_.empty()) out["f17"] += 1;
    return out;
}

void ModelIR::validate() const {
    std::set<std::string> tags;
    for (const auto& c : constraints_) {
        if (c.tag.empty()) throw ModelError("constraint without a tag");
        if (!tags.insert(c.tag).second) throw ModelError("duplicate constraint tag '" + c.tag + "'");
        for (const auto& [v, coef] : c.terms) {
            (void)coef;
            if (v < 0 || v >= static_cast<VarId>(vars_.size())) {
                throw ModelError("constraint '" + c.tag + "' references an undeclared variable");
            }
        }
    }
    for (const auto& [v, coef] : obj_terms_) {
        (void)coef;
        if (v < 0 || v >= static_cast<VarId>(vars_.size())) {
            throw ModelError("objective references an undeclared variable");
        }
    }
}

}  // namespace restoplan::milp
