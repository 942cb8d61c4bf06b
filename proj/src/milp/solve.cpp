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

#include "restoplan/milp/solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "restoplan/milp/emit.hpp"
#include "restoplan/milp/simplex.hpp"

namespace restoplan::milp {

namespace {

struct Bounds {
    std::vector<double> lb;
    std::vector<double> ub;
};

struct Searcher {
    const ModelIR& model;
    std::vector<int> binaries;
    const double sense;  // +1 maximize, -1 minimize (objective kept as max of sense*obj)

    bool found = false;
    double best_obj = 0.0;  // in max convention
    std::vector<double> best_values;
    long long leaves = 0;

    explicit Searcher(const ModelIR& m)
        : model(m), sense(m.objective_sense() == ObjSense::maximize ? 1.0 : -1.0) {
        for (std::size_t i = 0; i < m.vars().size(); ++i) {
            if (m.vars()[i].kind == VarKind::binary) binaries.push_back(static_cast<int>(i));
        }
    }

    // Interval propagation over all rows. Returns false on a proven-empty
    // domain. Balance equalities over tree topologies converge to exact
    // values, so deep passes at a leaf decide most of the continuous part.
    bool propagate(Bounds& bd, int max_rounds) const {
        const auto& vars = model.vars();
        for (int round = 0; round < max_rounds; ++round) {
            bool changed = false;
            for (const auto& c : model.constraints()) {
                // treat eq as two inequalities
                for (int dir = 0; dir < (c.kind == ConKind::linear_eq ? 2 : 1); ++dir) {
                    const double sgn = dir == 0 ? 1.0 : -1.0;
                    const double rhs = sgn * c.rhs;
                    double min_act = 0.0;
                    bool min_finite = true;
                    for (const auto& [v, coef0] : c.terms) {
                        const double coef = sgn * coef0;
                        const double a = coef * bd.lb[static_cast<std::size_t>(v)];
                        const double b = coef * bd.ub[static_cast<std::size_t>(v)];
                        const double mn = std::min(a, b);
                        if (!std::isfinite(mn)) {
                            min_finite = false;
                            break;
                        }
                        min_act += mn;
                    }
                    if (!min_finite) continue;
                    if (min_act > rhs + kFeasTol) return false;
                    // Tighten each variable against the row. Bounds are
                    // padded outward so the box stays a sound superset of
                    // the feasible set even through small-coefficient
                    // equality loops; pruning can then never cut a feasible
                    // assignment.
                    auto pad = [](double v) { return 1e-7 + 1e-9 * std::abs(v); };
                    for (const auto& [v, coef0] : c.terms) {
                        const double coef = sgn * coef0;
                        const std::size_t vi = static_cast<std::size_t>(v);
                        const double own_min = std::min(coef * bd.lb[vi], coef * bd.ub[vi]);
                        const double slack = rhs - (min_act - own_min);
                        if (coef > kFeasTol) {
                            const double new_ub = slack / coef + pad(slack / coef);
                            if (new_ub < bd.ub[vi] - 1e-9) {
                                bd.ub[vi] = new_ub;
                                changed = true;
                                if (bd.lb[vi] > bd.ub[vi] + kFeasTol) return false;
                            }
                        } else if (coef < -kFeasTol) {
                            const double new_lb = slack / coef - pad(slack / coef);
                            if (new_lb > bd.lb[vi] + 1e-9) {
                                bd.lb[vi] = new_lb;
                                changed = true;
                                if (bd.lb[vi] > bd.ub[vi] + kFeasTol) return false;
                            }
                        }
                    }
                }
            }
            // snap binaries
            for (int v : binaries) {
                const std::size_t vi = static_cast<std::size_t>(v);
                if (bd.ub[vi] < 1.0 - kIntTol && bd.ub[vi] > kIntTol) {
                    bd.ub[vi] = 0.0;
                    changed = true;
                }
                if (bd.lb[vi] > kIntTol && bd.lb[vi] < 1.0 - kIntTol) {
                    bd.lb[vi] = 1.0;
                    changed = true;
                }
                if (bd.lb[vi] > bd.ub[vi] + kFeasTol) return false;
            }
            (void)vars;
            if (!changed) break;
        }
        return true;
    }

    double objective_upper(const Bounds& bd) const {
        double ub = model.objective_constant() * sense;
        for (const auto& [v, c0] : model.objective_terms()) {
            const double c = sense * c0;
            ub += std::max(c * bd.lb[static_cast<std::size_t>(v)], c * bd.ub[static_cast<std::size_t>(v)]);
        }
        return ub;
    }

    // Midpoint of a collapsed interval, snapped to the nearest integer
    // when within tolerance; keeps big-M rows from leaking through the
    // propagation padding.
    static double pinned_value(double lo, double hi) {
        const double mid = 0.5 * (lo + hi);
        const double snapped = std::round(mid);
        return std::abs(mid - snapped) <= 1e-6 ? snapped : mid;
    }

    // residual LP with a caller-chosen "is fixed" predicate
    bool solve_residual(const Bounds& bd, const std::vector<char>& fixed,
                        std::vector<double>& values, double& objective) const {
        const auto& vars = model.vars();
        const std::size_t n = vars.size();
        std::vector<int> col_of(n, -1);
        std::vector<std::size_t> free_vars;
        for (std::size_t i = 0; i < n; ++i) {
            if (!fixed[i]) {
                col_of[i] = static_cast<int>(free_vars.size());
                free_vars.push_back(i);
            }
        }
        LpProblem lp;
        lp.c.assign(free_vars.size(), 0.0);
        lp.lb.resize(free_vars.size());
        lp.ub.resize(free_vars.size());
        double obj_fixed = 0.0;
        for (const auto& [v, c] : model.objective_terms()) {
            const std::size_t vi = static_cast<std::size_t>(v);
            if (fixed[vi]) obj_fixed += sense * c * pinned_value(bd.lb[vi], bd.ub[vi]);
            else lp.c[static_cast<std::size_t>(col_of[vi])] = sense * c;
        }
        for (std::size_t k = 0; k < free_vars.size(); ++k) {
            // intersect with the declared box: propagation pads its working
            // bounds outward and those pads must never reach the LP
            const std::size_t vi = free_vars[k];
            lp.lb[k] = std::max(bd.lb[vi], vars[vi].lb);
            lp.ub[k] = std::min(bd.ub[vi], vars[vi].ub);
        }
        for (const auto& c : model.constraints()) {
            LpRow row;
            row.kind = c.kind;
            double rhs = c.rhs;
            bool any_free = false;
            for (const auto& [v, coef] : c.terms) {
                const std::size_t vi = static_cast<std::size_t>(v);
                if (fixed[vi]) rhs -= coef * pinned_value(bd.lb[vi], bd.ub[vi]);
                else {
                    row.terms.emplace_back(col_of[vi], coef);
                    any_free = true;
                }
            }
            if (!any_free) {
                const bool ok = c.kind == ConKind::linear_eq ? std::abs(rhs) <= 1e-5 : rhs >= -1e-5;
                if (!ok) return false;
                continue;
            }
            row.rhs = rhs;
            lp.rows.push_back(std::move(row));
        }
        objective = obj_fixed;
        values.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) values[i] = pinned_value(bd.lb[i], bd.ub[i]);
        if (!free_vars.empty()) {
            const LpResult res = solve_lp(lp);
            if (res.status == SolveStatus::unbounded) {
                throw ModelError("exhaustive: LP relaxation unbounded at a leaf");
            }
            if (res.status != SolveStatus::optimal) return false;
            objective += res.objective;
            for (std::size_t k = 0; k < free_vars.size(); ++k) values[free_vars[k]] = res.x[k];
        }
        return true;
    }

    bool verify(const std::vector<double>& values) const {
        for (const auto& c : model.constraints()) {
            double act = 0.0;
            for (const auto& [v, coef] : c.terms) act += coef * values[static_cast<std::size_t>(v)];
            const double viol =
                c.kind == ConKind::linear_eq ? std::abs(act - c.rhs) : act - c.rhs;
            if (viol > 1e-5) return false;
        }
        return true;
    }

    bool leaf(Bounds bd) {
        ++leaves;
        // deep propagation pins the bulk of the continuous part; the
        // delicate small-coefficient chains stay free thanks to the
        // padding and land in the residual LP
        if (!propagate(bd, 400)) return false;
        if (found && objective_upper(bd) <= best_obj + 1e-12) return false;

        const auto& vars = model.vars();
        const std::size_t n = vars.size();
        std::vector<char> fixed(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            fixed[i] = bd.ub[i] - bd.lb[i] <= 5e-7 ? 1 : 0;
        }
        std::vector<double> values;
        double objective = 0.0;
        bool ok = solve_residual(bd, fixed, values, objective);
        const bool first_pass_ok = ok && verify(values);
        if (!first_pass_ok) {
            // midpoint substitution drifted; redo with only the hard-fixed
            // variables substituted
            for (std::size_t i = 0; i < n; ++i) {
                fixed[i] = vars[i].kind == VarKind::binary || vars[i].lb == vars[i].ub ? fixed[i] : 0;
            }
            Bounds orig = bd;
            for (std::size_t i = 0; i < n; ++i) {
                if (!fixed[i]) {
                    orig.lb[i] = vars[i].lb;
                    orig.ub[i] = vars[i].ub;
                }
            }
            const bool was_rejected = !ok;
            ok = solve_residual(orig, fixed, values, objective) && verify(values);
            if (ok && was_rejected && std::getenv("RESTOPLAN_LEAF_DEBUG")) {
                std::fprintf(stderr, "leaf: first pass falsely rejected a feasible leaf\n");
            }
        }
        if (!ok) return false;
        if (!found || objective > best_obj + 1e-12) {
            found = true;
            best_obj = objective;
            best_values = std::move(values);
        }
        return true;
    }

    void dfs(Bounds bd, std::size_t depth) {
        if (!propagate(bd, 8)) return;
        if (found && objective_upper(bd) <= best_obj + 1e-12) return;
        // advance past binaries already fixed by propagation
        while (depth < binaries.size()) {
            const std::size_t vi = static_cast<std::size_t>(binaries[depth]);
            if (bd.ub[vi] - bd.lb[vi] < 0.5) {
                ++depth;
            } else {
                break;
            }
        }
        if (depth == binaries.size()) {
            bool all_fixed = true;
            for (int v : binaries) {
                const std::size_t vi = static_cast<std::size_t>(v);
                if (bd.ub[vi] - bd.lb[vi] >= 0.5) {
                    all_fixed = false;
                    break;
                }
            }
            if (all_fixed) {
                leaf(bd);
                return;
            }
        }
        // branch lexicographically: 0 first
        std::size_t pick = depth;
        for (; pick < binaries.size(); ++pick) {
            const std::size_t vi = static_cast<std::size_t>(binaries[pick]);
            if (bd.ub[vi] - bd.lb[vi] >= 0.5) break;
        }
        if (pick == binaries.size()) {
            leaf(bd);
            return;
        }
        const std::size_t vi = static_cast<std::size_t>(binaries[pick]);
        {
            Bounds zero = bd;
            zero.ub[vi] = 0.0;
            dfs(std::move(zero), pick + 1);
        }
        {
            Bounds one = std::move(bd);
            one.lb[vi] = 1.0;
            dfs(std::move(one), pick + 1);
        }
    }
};

Solution solve_exhaustive(const ModelIR& model, const ExhaustiveBackend& be) {
    Solution out;
    if (model.has_quadratic()) {
        out.status = SolveStatus::error;
        out.message = "exhaustive backend cannot handle quadratic constraints; "
                      "use the polygon capability mode";
        return out;
    }
    Searcher s(model);
    if (static_cast<int>(s.binaries.size()) > be.max_binaries) {
        out.status = SolveStatus::error;
        out.message = "exhaustive backend limited to " + std::to_string(be.max_binaries) +
                      " binaries (model has " + std::to_string(s.binaries.size()) + ")";
        return out;
    }
    Bounds bd;
    bd.lb.reserve(model.vars().size());
    bd.ub.reserve(model.vars().size());
    for (const auto& v : model.vars()) {
        bd.lb.push_back(v.lb);
        bd.ub.push_back(v.ub);
    }
    try {
        s.dfs(std::move(bd), 0);
    } catch (const ModelError& e) {
        out.status = SolveStatus::unbounded;
        out.message = e.what();
        return out;
    }
    if (!s.found) {
        out.status = SolveStatus::infeasible;
        out.message = "no feasible binary assignment";
        return out;
    }
    out.status = SolveStatus::optimal;
    out.values = s.best_values;
    out.objective = s.sense * s.best_obj;  // back to the declared sense
    return out;
}

std::string substitute(std::string tmpl, const std::string& key, const std::string& value) {
    for (std::size_t at = tmpl.find(key); at != std::string::npos; at = tmpl.find(key, at)) {
        tmpl.replace(at, key.size(), value);
        at += value.size();
    }
    return tmpl;
}

Solution solve_external(const ModelIR& model, const ExternalBackend& be) {
    namespace fs = std::filesystem;
    Solution out;
    fs::path dir = be.work_dir.empty() ? fs::temp_directory_path() : fs::path(be.work_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path model_path = dir / (model.name() + ".lp");
    const fs::path sol_path = dir / (model.name() + ".sol");
    fs::remove(sol_path, ec);
    {
        std::ofstream f(model_path);
        if (!f) {
            out.status = SolveStatus::error;
            out.message = "cannot write " + model_path.string();
            return out;
        }
        f << emit_lp(model);
    }
    std::string cmd = substitute(be.command_template, "{model}", model_path.string());
    cmd = substitute(cmd, "{solution}", sol_path.string());
    const int rc = std::system(cmd.c_str());
    std::ifstream sol(sol_path);
    if (!sol) {
        out.status = SolveStatus::error;
        out.message = "solver command failed (exit " + std::to_string(rc) + "), no solution file: " + cmd;
        return out;
    }
    out.values.assign(model.vars().size(), 0.0);
    std::string line;
    bool got_status = false, any_value = false;
    while (std::getline(sol, line)) {
        std::string lower = line;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (lower.find("infeasible") != std::string::npos) {
            out.status = SolveStatus::infeasible;
            got_status = true;
            continue;
        }
        if (lower.find("unbounded") != std::string::npos) {
            out.status = SolveStatus::unbounded;
            got_status = true;
            continue;
        }
        if (lower.find("optimal") != std::string::npos) {
            out.status = SolveStatus::optimal;
            got_status = true;
            continue;
        }
        std::istringstream ls(line);
        std::string name, value_str, extra;
        if (!(ls >> name >> value_str) || (ls >> extra)) continue;
        char* end = nullptr;
        const double v = std::strtod(value_str.c_str(), &end);
        if (end == value_str.c_str() || *end != '\0') continue;
        if (!model.has_var(name)) continue;
        out.values[static_cast<std::size_t>(model.var_id(name))] = v;
        any_value = true;
    }
    if (out.status == SolveStatus::infeasible || out.status == SolveStatus::unbounded) return out;
    if (!any_value) {
        out.status = SolveStatus::error;
        out.message = "solution file carried no `name value` pairs";
        return out;
    }
    if (!got_status) out.status = SolveStatus::feasible;
    double obj = model.objective_constant();
    for (const auto& [v, c] : model.objective_terms()) {
        obj += c * out.values[static_cast<std::size_t>(v)];
    }
    out.objective = obj;
    return out;
}

}  // namespace

Solution solve(const ModelIR& model, const Backend& backend) {
    model.validate();
    if (backend.external) return solve_external(model, *backend.external);
    if (backend.exhaustive) return solve_exhaustive(model, *backend.exhaustive);
    Solution out;
    out.status = SolveStatus::error;
    out.message = "no backend configured";
    return out;
}

std::vector<ElasticViolation> elastic_diagnose(const ModelIR& model, int max_binaries) {
    // Rebuild with a non-negative slack on every linear row and minimize the
    // total slack; nonzero slacks name the families that cannot be met.
    ModelIR elastic(model.name() + "_elastic");
    for (const auto& v : model.vars()) {
        elastic.add_var(v.name, v.kind, v.lb, v.ub, v.tag);
    }
    LinExpr penalty;
    std::vector<std::pair<std::string, VarId>> slacks;
    int k = 0;
    for (const auto& c : model.constraints()) {
        if (c.kind == ConKind::quad_le) continue;
        LinExpr e;
        for (const auto& [v, coef] : c.terms) e.add(v, coef);
        const VarId s = elastic.add_var("elastic_s" + std::to_string(k), VarKind::continuous, 0.0,
                                        kInf, "elastic");
        if (c.kind == ConKind::linear_le) {
            e.add(s, -1.0);
            elastic.add_le(e, c.rhs, c.tag);
        } else {
            const VarId s2 = elastic.add_var("elastic_t" + std::to_string(k), VarKind::continuous,
                                             0.0, kInf, "elastic");
            e.add(s, -1.0).add(s2, 1.0);
            elastic.add_eq(e, c.rhs, c.tag);
            penalty.add(s2, 1.0);
            slacks.emplace_back(c.tag, s2);
        }
        penalty.add(s, 1.0);
        slacks.emplace_back(c.tag, s);
        ++k;
    }
    elastic.set_objective(ObjSense::minimize, penalty);
    const Solution sol = solve(elastic, Backend::make_exhaustive(max_binaries));
    std::vector<ElasticViolation> out;
    if (sol.status != SolveStatus::optimal) return out;
    std::map<std::string, double> by_tag;
    for (const auto& [tag, var] : slacks) {
        const double v = sol.values[static_cast<std::size_t>(var)];
        if (v > 1e-6) by_tag[tag] += v;
    }
    for (const auto& [tag, amount] : by_tag) out.push_back({tag, amount});
    std::sort(out.begin(), out.end(),
              [](const ElasticViolation& a, const ElasticViolation& b) { return a.amount > b.amount; });
    return out;
}

}  // namespace restoplan::milp
