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

#include "restoplan/milp/emit.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace restoplan::milp {

namespace {

std::string num(double v) {
    if (v == static_cast<long long>(v) && std::abs(v) < 1e15) {
        return std::to_string(static_cast<long long>(v));
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

void append_terms(std::ostringstream& os, const std::vector<std::pair<VarId, double>>& terms,
                  const std::vector<VarDecl>& vars) {
    bool first = true;
    for (const auto& [v, c] : terms) {
        if (c == 0.0) continue;
        const double a = std::abs(c);
        os << (first ? (c < 0 ? "- " : "") : (c < 0 ? " - " : " + "));
        if (a != 1.0) os << num(a) << " ";
        os << vars[static_cast<std::size_t>(v)].name;
        first = false;
    }
    if (first) os << "0 " << vars.front().name;  // degenerate all-zero row
}

std::string row_name(std::size_t i) { return "c" + std::to_string(i); }

void check_names(const ModelIR& model) {
    std::set<std::string> seen;
    for (const auto& v : model.vars()) {
        if (v.name.empty() || !seen.insert(v.name).second) {
            throw ModelError("emit: variable name collision or empty name '" + v.name + "'");
        }
        for (char ch : v.name) {
            if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '(' ||
                  ch == ')')) {
                throw ModelError("emit: variable name '" + v.name + "' not solver-safe");
            }
        }
    }
}

}  // namespace

std::string emit_lp(const ModelIR& model) {
    check_names(model);
    const auto& vars = model.vars();
    std::ostringstream os;
    os << "\\ Problem: " << model.name() << "\n";
    os << (model.objective_sense() == ObjSense::maximize ? "Maximize\n" : "Minimize\n");
    os << " obj: ";
    if (model.objective_terms().empty()) {
        os << "0" << (vars.empty() ? "" : " " + vars.front().name);
    } else {
        append_terms(os, model.objective_terms(), vars);
    }
    os << "\nSubject To\n";
    const auto& cons = model.constraints();
    for (std::size_t i = 0; i < cons.size(); ++i) {
        const auto& c = cons[i];
        os << " " << row_name(i) << ": ";
        if (c.kind == ConKind::quad_le) {
            if (!c.terms.empty()) {
                append_terms(os, c.terms, vars);
                os << " + ";
            }
            os << "[ ";
            bool first = true;
            for (const auto& [vi, vj, coef] : c.quad_terms) {
                if (!first) os << " + ";
                if (coef != 1.0) os << num(coef) << " ";
                if (vi == vj) {
                    os << vars[static_cast<std::size_t>(vi)].name << " ^ 2";
                } else {
                    os << vars[static_cast<std::size_t>(vi)].name << " * "
                       << vars[static_cast<std::size_t>(vj)].name;
                }
                first = false;
            }
            os << " ] <= " << num(c.rhs) << "\n";
            continue;
        }
        append_terms(os, c.terms, vars);
        os << (c.kind == ConKind::linear_eq ? " = " : " <= ") << num(c.rhs) << "\n";
    }
    os << "Bounds\n";
    for (const auto& v : vars) {
        if (v.kind == VarKind::binary) continue;  // integrality section carries these
        const bool lb_inf = std::isinf(v.lb), ub_inf = std::isinf(v.ub);
        if (lb_inf && ub_inf) {
            os << " " << v.name << " free\n";
        } else if (v.lb == v.ub) {
            os << " " << v.name << " = " << num(v.lb) << "\n";
        } else {
            os << " " << (lb_inf ? "-inf" : num(v.lb)) << " <= " << v.name << " <= "
               << (ub_inf ? "+inf" : num(v.ub)) << "\n";
        }
    }
    bool any_bin = false;
    for (const auto& v : vars) {
        if (v.kind == VarKind::binary) {
            if (!any_bin) os << "Binaries\n";
            any_bin = true;
            os << " " << v.name << "\n";
        }
    }
    os << "End\n";
    return os.str();
}

std::string emit_mps(const ModelIR& model) {
    if (model.has_quadratic()) {
        throw ModelError("emit_mps: quadratic constraints are not representable; use emit_lp");
    }
    check_names(model);
    const auto& vars = model.vars();
    const auto& cons = model.constraints();
    std::ostringstream os;
    os << "NAME          " << model.name() << "\n";
    os << "ROWS\n";
    os << " N  COST\n";
    for (std::size_t i = 0; i < cons.size(); ++i) {
        os << " " << (cons[i].kind == ConKind::linear_eq ? "E" : "L") << "  " << row_name(i) << "\n";
    }

    // column-major coefficient table
    std::vector<std::vector<std::pair<std::string, double>>> col_entries(vars.size());
    for (const auto& [v, c] : model.objective_terms()) {
        // MPS has no explicit sense; emit a minimization objective.
        const double sign = model.objective_sense() == ObjSense::maximize ? -1.0 : 1.0;
        col_entries[static_cast<std::size_t>(v)].emplace_back("COST", sign * c);
    }
    for (std::size_t i = 0; i < cons.size(); ++i) {
        for (const auto& [v, c] : cons[i].terms) {
            col_entries[static_cast<std::size_t>(v)].emplace_back(row_name(i), c);
        }
    }

    auto field = [](const std::string& s) {
        std::string out = s;
        if (out.size() < 10) out.resize(10, ' ');
        return out;
    };

    os << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (std::size_t v = 0; v < vars.size(); ++v) {
        const bool is_bin = vars[v].kind == VarKind::binary;
        if (is_bin && !in_int) {
            os << "    MARKER" << std::string(17, ' ') << "'MARKER'" << std::string(17, ' ')
               << "'INTORG'\n";
            in_int = true;
            ++marker;
        } else if (!is_bin && in_int) {
            os << "    MARKER" << std::string(17, ' ') << "'MARKER'" << std::string(17, ' ')
               << "'INTEND'\n";
            in_int = false;
            ++marker;
        }
        if (col_entries[v].empty()) {
            // keep the column declared so bounds apply
            os << "    " << field(vars[v].name) << field("COST") << num(0.0) << "\n";
            continue;
        }
        for (const auto& [row, coef] : col_entries[v]) {
            os << "    " << field(vars[v].name) << field(row) << num(coef) << "\n";
        }
    }
    if (in_int) {
        os << "    MARKER" << std::string(17, ' ') << "'MARKER'" << std::string(17, ' ')
           << "'INTEND'\n";
    }

    os << "RHS\n";
    for (std::size_t i = 0; i < cons.size(); ++i) {
        if (cons[i].rhs != 0.0) {
            os << "    " << field("RHS") << field(row_name(i)) << num(cons[i].rhs) << "\n";
        }
    }
    os << "BOUNDS\n";
    for (const auto& v : vars) {
        if (v.kind == VarKind::binary) {
            // explicit bounds; readers disagree on integer-column defaults
            if (v.lb != 0.0) os << " LO " << field("BND") << field(v.name) << num(v.lb) << "\n";
            os << " UP " << field("BND") << field(v.name) << num(v.ub) << "\n";
            continue;
        }
        const bool lb_inf = std::isinf(v.lb), ub_inf = std::isinf(v.ub);
        if (lb_inf && ub_inf) {
            os << " FR " << field("BND") << field(v.name) << "\n";
        } else if (v.lb == v.ub) {
            os << " FX " << field("BND") << field(v.name) << num(v.lb) << "\n";
        } else {
            if (lb_inf) os << " MI " << field("BND") << field(v.name) << "\n";
            else if (v.lb != 0.0) os << " LO " << field("BND") << field(v.name) << num(v.lb) << "\n";
            if (!ub_inf) os << " UP " << field("BND") << field(v.name) << num(v.ub) << "\n";
        }
    }
    os << "ENDATA\n";
    return os.str();
}

}  // namespace restoplan::milp
