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

#include "restoplan/milp/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace restoplan::milp {

namespace {

constexpr double kPivTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasible = 1e-7;

// Internal standard form: min c'y, A y = b, y >= 0.
struct Standard {
    int n = 0;  // structural columns (post-substitution)
    std::vector<double> c;
    std::vector<std::vector<double>> a;  // dense rows
    std::vector<double> b;
    double obj_offset = 0.0;
    // mapping back: original var -> (col_plus, col_minus, shift, flip)
    struct Map {
        int col = -1;      // -1 when the variable is fixed
        int col_neg = -1;  // second column for free variables
        double shift = 0.0;
        bool flip = false;
        double fixed_value = 0.0;
    };
    std::vector<Map> map;
};

bool build_standard(const LpProblem& lp, Standard& st) {
    const int nvar = static_cast<int>(lp.c.size());
    st.map.resize(static_cast<std::size_t>(nvar));
    int col = 0;
    std::vector<std::pair<int, double>> upper_rows;  // (col, ub') for finite widths
    for (int j = 0; j < nvar; ++j) {
        auto& m = st.map[static_cast<std::size_t>(j)];
        const double lb = lp.lb[static_cast<std::size_t>(j)];
        const double ub = lp.ub[static_cast<std::size_t>(j)];
        if (lb > ub + kFeasible) return false;  // empty domain
        if (std::isfinite(lb) && std::isfinite(ub) && ub - lb <= kFeasible) {
            m.fixed_value = 0.5 * (lb + ub);
            continue;
        }
        if (std::isfinite(lb)) {
            m.col = col++;
            m.shift = lb;
            if (std::isfinite(ub)) upper_rows.emplace_back(m.col, ub - lb);
        } else if (std::isfinite(ub)) {
            m.col = col++;
            m.shift = ub;
            m.flip = true;  // x = ub - y
        } else {
            m.col = col++;
            m.col_neg = col++;
        }
    }
    st.n = col;
    st.c.assign(static_cast<std::size_t>(col), 0.0);
    for (int j = 0; j < nvar; ++j) {
        const auto& m = st.map[static_cast<std::size_t>(j)];
        const double cj = lp.c[static_cast<std::size_t>(j)];
        if (m.col < 0) {
            st.obj_offset += cj * m.fixed_value;
            continue;
        }
        st.obj_offset += cj * m.shift;
        st.c[static_cast<std::size_t>(m.col)] += m.flip ? -cj : cj;
        if (m.col_neg >= 0) st.c[static_cast<std::size_t>(m.col_neg)] -= cj;
    }

    auto expand_row = [&](const LpRow& row, std::vector<double>& dense, double& rhs) {
        dense.assign(static_cast<std::size_t>(st.n), 0.0);
        rhs = row.rhs;
        for (const auto& [j, coef] : row.terms) {
            const auto& m = st.map[static_cast<std::size_t>(j)];
            if (m.col < 0) {
                rhs -= coef * m.fixed_value;
                continue;
            }
            rhs -= coef * m.shift;
            dense[static_cast<std::size_t>(m.col)] += m.flip ? -coef : coef;
            if (m.col_neg >= 0) dense[static_cast<std::size_t>(m.col_neg)] -= coef;
        }
    };

    for (const auto& row : lp.rows) {
        std::vector<double> dense;
        double rhs = 0.0;
        expand_row(row, dense, rhs);
        bool all_zero = true;
        for (double v : dense) {
            if (std::abs(v) > kPivTol) {
                all_zero = false;
                break;
            }
        }
        if (all_zero) {
            // constant row; check directly
            if (row.kind == ConKind::linear_eq ? std::abs(rhs) > kFeasible : rhs < -kFeasible) {
                return false;
            }
            continue;
        }
        if (row.kind == ConKind::linear_le) {
            dense.push_back(1.0);  // slack (column appended below)
            st.c.push_back(0.0);
            for (auto& prev : st.a) prev.push_back(0.0);
            ++st.n;
        }
        st.a.push_back(std::move(dense));
        st.b.push_back(rhs);
        for (auto& r : st.a) r.resize(static_cast<std::size_t>(st.n), 0.0);
    }
    for (const auto& [colj, width] : upper_rows) {
        std::vector<double> dense(static_cast<std::size_t>(st.n), 0.0);
        dense[static_cast<std::size_t>(colj)] = 1.0;
        dense.push_back(1.0);
        st.c.push_back(0.0);
        for (auto& prev : st.a) prev.push_back(0.0);
        ++st.n;
        st.a.push_back(std::move(dense));
        st.b.push_back(width);
        for (auto& r : st.a) r.resize(static_cast<std::size_t>(st.n), 0.0);
    }
    // make rhs non-negative
    for (std::size_t i = 0; i < st.a.size(); ++i) {
        if (st.b[i] < 0.0) {
            st.b[i] = -st.b[i];
            for (auto& v : st.a[i]) v = -v;
        }
    }
    return true;
}

// Tableau simplex (min sense) with Bland's rule.
struct Tableau {
    int m = 0, n = 0;
    std::vector<std::vector<double>> t;  // m rows x (n + 1); last col = rhs
    std::vector<double> cost;            // reduced-cost row, n + 1 (last = -obj)
    std::vector<int> basis;

    void price_out(int row, int col) {
        const double piv = t[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
        auto& r = t[static_cast<std::size_t>(row)];
        for (auto& v : r) v /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = t[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)];
            if (f == 0.0) continue;
            auto& ri = t[static_cast<std::size_t>(i)];
            for (int j = 0; j <= n; ++j) ri[static_cast<std::size_t>(j)] -= f * r[static_cast<std::size_t>(j)];
        }
        const double f = cost[static_cast<std::size_t>(col)];
        if (f != 0.0) {
            for (int j = 0; j <= n; ++j) cost[static_cast<std::size_t>(j)] -= f * r[static_cast<std::size_t>(j)];
        }
        basis[static_cast<std::size_t>(row)] = col;
    }

    // returns: 0 optimal, 1 unbounded
    int iterate(const std::vector<bool>& allowed) {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < n; ++j) {
                if (!allowed[static_cast<std::size_t>(j)]) continue;
                if (cost[static_cast<std::size_t>(j)] < -kCostTol) {
                    enter = j;
                    break;  // Bland: first eligible index
                }
            }
            if (enter < 0) return 0;
            int leave = -1;
            double best = 0.0;
            for (int i = 0; i < m; ++i) {
                const double a = t[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
                if (a > kPivTol) {
                    const double ratio = t[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)] / a;
                    if (leave < 0 || ratio < best - 1e-12 ||
                        (std::abs(ratio - best) <= 1e-12 &&
                         basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                        leave = i;
                        best = ratio;
                    }
                }
            }
            if (leave < 0) return 1;
            price_out(leave, enter);
        }
    }
};

}  // namespace

LpResult solve_lp(const LpProblem& lp) {
    LpResult out;
    Standard st;
    if (!build_standard(lp, st)) {
        out.status = SolveStatus::infeasible;
        return out;
    }
    const int m = static_cast<int>(st.a.size());
    const int n_struct = st.n;

    if (m == 0) {
        // box-only problem: optimize each variable's sign independently
        out.status = SolveStatus::optimal;
        out.x.assign(lp.c.size(), 0.0);
        double obj = 0.0;
        for (std::size_t j = 0; j < lp.c.size(); ++j) {
            const double cj = lp.c[j];
            double v;
            if (cj > 0.0) v = lp.ub[j];
            else if (cj < 0.0) v = lp.lb[j];
            else v = std::isfinite(lp.lb[j]) ? lp.lb[j] : (std::isfinite(lp.ub[j]) ? lp.ub[j] : 0.0);
            if (cj != 0.0 && !std::isfinite(v)) {
                out.status = SolveStatus::unbounded;
                return out;
            }
            out.x[j] = v;
            obj += cj * v;
        }
        out.objective = obj;
        return out;
    }

    Tableau tb;
    tb.m = m;
    tb.n = n_struct + m;  // + artificials
    tb.t.assign(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(tb.n + 1), 0.0));
    tb.basis.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n_struct; ++j) {
            tb.t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = st.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        tb.t[static_cast<std::size_t>(i)][static_cast<std::size_t>(n_struct + i)] = 1.0;
        tb.t[static_cast<std::size_t>(i)][static_cast<std::size_t>(tb.n)] = st.b[static_cast<std::size_t>(i)];
        tb.basis[static_cast<std::size_t>(i)] = n_struct + i;
    }

    // Phase 1: minimize the artificial sum.
    tb.cost.assign(static_cast<std::size_t>(tb.n + 1), 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= tb.n; ++j) {
            tb.cost[static_cast<std::size_t>(j)] -= tb.t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    for (int i = 0; i < m; ++i) tb.cost[static_cast<std::size_t>(n_struct + i)] = 0.0;
    std::vector<bool> allowed(static_cast<std::size_t>(tb.n), true);
    tb.iterate(allowed);
    const double phase1 = -tb.cost[static_cast<std::size_t>(tb.n)];
    if (phase1 > kFeasible) {
        out.status = SolveStatus::infeasible;
        return out;
    }
    // Pivot remaining artificials out where possible; redundant rows keep a
    // zero-valued artificial that must never re-enter.
    for (int i = 0; i < m; ++i) {
        if (tb.basis[static_cast<std::size_t>(i)] >= n_struct) {
            for (int j = 0; j < n_struct; ++j) {
                if (std::abs(tb.t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) > kPivTol) {
                    tb.price_out(i, j);
                    break;
                }
            }
        }
    }

    // Phase 2: minimize -c (the caller maximizes).
    tb.cost.assign(static_cast<std::size_t>(tb.n + 1), 0.0);
    for (int j = 0; j < n_struct; ++j) tb.cost[static_cast<std::size_t>(j)] = -st.c[static_cast<std::size_t>(j)];
    for (int i = 0; i < m; ++i) {
        const int bj = tb.basis[static_cast<std::size_t>(i)];
        const double cb = tb.cost[static_cast<std::size_t>(bj)];
        if (cb == 0.0) continue;
        for (int j = 0; j <= tb.n; ++j) {
            tb.cost[static_cast<std::size_t>(j)] -= cb * tb.t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    for (int j = n_struct; j < tb.n; ++j) allowed[static_cast<std::size_t>(j)] = false;
    const int rc = tb.iterate(allowed);
    if (rc == 1) {
        out.status = SolveStatus::unbounded;
        return out;
    }

    std::vector<double> y(static_cast<std::size_t>(n_struct), 0.0);
    for (int i = 0; i < m; ++i) {
        const int bj = tb.basis[static_cast<std::size_t>(i)];
        if (bj < n_struct) y[static_cast<std::size_t>(bj)] = tb.t[static_cast<std::size_t>(i)][static_cast<std::size_t>(tb.n)];
    }
    out.x.assign(lp.c.size(), 0.0);
    double obj = st.obj_offset;
    for (std::size_t j = 0; j < lp.c.size(); ++j) {
        const auto& mp = st.map[j];
        double v;
        if (mp.col < 0) {
            v = mp.fixed_value;
        } else if (mp.col_neg >= 0) {
            v = y[static_cast<std::size_t>(mp.col)] - y[static_cast<std::size_t>(mp.col_neg)];
        } else if (mp.flip) {
            v = mp.shift - y[static_cast<std::size_t>(mp.col)];
        } else {
            v = mp.shift + y[static_cast<std::size_t>(mp.col)];
        }
        out.x[j] = v;
        obj += lp.c[j] * (v - (mp.col < 0 ? mp.fixed_value : mp.shift));
    }
    // obj accumulated via offsets above double-counts shifts; recompute plainly.
    obj = 0.0;
    for (std::size_t j = 0; j < lp.c.size(); ++j) obj += lp.c[j] * out.x[j];
    out.objective = obj;
    out.status = SolveStatus::optimal;
    return out;
}

}  // namespace restoplan::milp
