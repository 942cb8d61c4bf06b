#!/usr/bin/env python3
# Copyright 2026 The restoplan Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Reference external-solver adapter for the `--backend external:<cmd>` hook.

Reads a linear CPLEX-LP file (the planner's own emission dialect), solves it
with scipy's HiGHS-backed MILP interface, and writes a solution file of
`name value` pairs plus a status line -- the format the solution parser
expects.

Usage: lp_solve_adapter.py MODEL.lp SOLUTION.txt
"""

import re
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix


def tokenize_terms(text):
    """Yields (coef, name) pairs from a linear expression."""
    tokens = text.replace("+", " + ").replace("-", " - ").split()
    sign = 1.0
    coef = None
    for tok in tokens:
        if tok == "+":
            sign, coef = 1.0, None
        elif tok == "-":
            sign, coef = -1.0, None
        else:
            try:
                value = float(tok)
                coef = value if coef is None else coef * value
            except ValueError:
                yield (sign * (1.0 if coef is None else coef), tok)
                sign, coef = 1.0, None


def main():
    if len(sys.argv) != 3:
        print("usage: lp_solve_adapter.py MODEL.lp SOLUTION.txt", file=sys.stderr)
        return 2
    text = open(sys.argv[1]).read()
    if "[" in text:
        print("quadratic constraints unsupported by this adapter", file=sys.stderr)
        return 3

    section = None
    maximize = False
    objective = []
    rows = []  # (terms, op, rhs)
    bounds = {}
    binaries = set()
    pending = ""

    def flush_row(line):
        m = re.match(r"\s*\w+\s*:\s*(.*)", line)
        body = m.group(1) if m else line
        m = re.search(r"(<=|>=|=)\s*([-+0-9.eE]+)\s*$", body)
        if not m:
            return None
        return (list(tokenize_terms(body[: m.start()])), m.group(1), float(m.group(2)))

    for raw in text.splitlines():
        line = raw.split("\\")[0].strip()
        if not line:
            continue
        low = line.lower()
        if low in ("maximize", "minimize", "subject to", "bounds", "binaries", "end",
                   "general", "generals"):
            if section == "objective" and pending:
                objective = list(tokenize_terms(pending.split(":", 1)[-1]))
                pending = ""
            maximize = maximize or low == "maximize"
            section = {"maximize": "objective", "minimize": "objective",
                       "subject to": "rows", "bounds": "bounds",
                       "binaries": "binaries"}.get(low, "done")
            continue
        if section == "objective":
            pending += " " + line
        elif section == "rows":
            row = flush_row(line)
            if row:
                rows.append(row)
        elif section == "bounds":
            if line.endswith(" free"):
                bounds[line[:-5].strip()] = (-np.inf, np.inf)
            else:
                m = re.match(r"(\S+)\s*=\s*([-+0-9.eE]+)$", line)
                if m:
                    bounds[m.group(1)] = (float(m.group(2)), float(m.group(2)))
                    continue
                m = re.match(r"([-+0-9.eEinf]+)\s*<=\s*(\S+)\s*<=\s*([-+0-9.eEinf]+)$", line)
                if m:
                    lo = -np.inf if "inf" in m.group(1) else float(m.group(1))
                    hi = np.inf if "inf" in m.group(3) else float(m.group(3))
                    bounds[m.group(2)] = (lo, hi)
        elif section == "binaries":
            for name in line.split():
                binaries.add(name)
    if section == "objective" and pending:
        objective = list(tokenize_terms(pending.split(":", 1)[-1]))

    names = []
    index = {}

    def var(name):
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    for coef, name in objective:
        var(name)
    for terms, _, _ in rows:
        for coef, name in terms:
            var(name)
    for name in list(bounds) + list(binaries):
        var(name)

    n = len(names)
    c = np.zeros(n)
    for coef, name in objective:
        c[index[name]] += coef
    if maximize:
        c = -c

    lb = np.zeros(n)
    ub = np.full(n, np.inf)
    for name, (lo, hi) in bounds.items():
        lb[index[name]] = lo
        ub[index[name]] = hi
    integrality = np.zeros(n)
    for name in binaries:
        integrality[index[name]] = 1
        lb[index[name]] = 0.0
        ub[index[name]] = 1.0

    a = lil_matrix((len(rows), n))
    row_lb = np.full(len(rows), -np.inf)
    row_ub = np.full(len(rows), np.inf)
    for i, (terms, op, rhs) in enumerate(rows):
        for coef, name in terms:
            a[i, index[name]] += coef
        if op in ("<=", "="):
            row_ub[i] = rhs
        if op in (">=", "="):
            row_lb[i] = rhs

    constraints = LinearConstraint(a.tocsr(), row_lb, row_ub) if rows else ()
    res = milp(c, constraints=constraints, integrality=integrality,
               bounds=Bounds(lb, ub))

    with open(sys.argv[2], "w") as out:
        if res.status == 0:
            out.write("optimal\n")
            for j, name in enumerate(names):
                out.write(f"{name} {res.x[j]:.12g}\n")
        elif res.status == 2:
            out.write("infeasible\n")
        else:
            out.write(f"error status {res.status}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
