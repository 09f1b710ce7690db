#!/usr/bin/env python3
"""Solve a gridplan LP file with scipy's MILP interface (HiGHS).

Reads the CPLEX-style LP text written by the C++ exporter, solves it, and
writes a small key/value solution file:

    =status= OPTIMAL|FEASIBLE|INFEASIBLE|TIMELIMIT
    =bound= <best proven lower bound, including the objective constant>
    <variable> <value>          (one line per variable)

Exit code 0 covers every solved outcome, including INFEASIBLE; nonzero exits
mean the adapter itself failed.
"""

import argparse
import re
import sys

import numpy as np
from scipy import sparse
from scipy.optimize import LinearConstraint, Bounds, milp

TOKEN_RE = re.compile(
    r"[A-Za-z_][A-Za-z0-9_.]*|[0-9][0-9.]*(?:[eE][+-]?[0-9]+)?|\.[0-9]+(?:[eE][+-]?[0-9]+)?|<=|>=|=|\+|-|:"
)
SECTIONS = {
    "minimize", "maximize", "subject", "st", "bounds",
    "general", "generals", "binary", "binaries", "end",
}


class LpModel:
    def __init__(self):
        self.names = []          # declaration order
        self.index = {}
        self.lo = []
        self.hi = []
        self.integrality = []    # 0 continuous, 1 integer
        self.obj = {}            # var index -> coefficient
        self.obj_constant = 0.0
        self.rows = []           # (terms dict, sense, rhs)

    def var(self, name):
        if name in self.index:
            return self.index[name]
        idx = len(self.names)
        self.index[name] = idx
        self.names.append(name)
        self.lo.append(0.0)
        self.hi.append(np.inf)
        self.integrality.append(0)
        return idx


def tokenize(text):
    tokens = []
    for line in text.splitlines():
        body = line.split("\\", 1)[0]
        tokens.extend(TOKEN_RE.findall(body))
    return tokens


def is_number(tok):
    return tok[0].isdigit() or tok[0] == "."


def section_of(tokens, i):
    tok = tokens[i].lower()
    if tok in SECTIONS:
        return "subject to" if tok in ("subject", "st") else tok
    return None


def parse_lp(text):
    tokens = tokenize(text)
    model = LpModel()
    i = 0

    head = section_of(tokens, i)
    if head == "maximize":
        raise ValueError("Maximize models are not supported")
    if head != "minimize":
        raise ValueError("LP text must start with Minimize")
    i += 1

    def parse_expr(i):
        terms = {}
        constant = 0.0
        while i < len(tokens):
            if section_of(tokens, i):
                break
            if tokens[i] in ("<=", ">=", "="):
                break
            if i + 1 < len(tokens) and tokens[i + 1] == ":":
                break
            sign = 1.0
            while i < len(tokens) and tokens[i] in "+-":
                if tokens[i] == "-":
                    sign = -sign
                i += 1
            coef = 1.0
            saw_number = False
            if i < len(tokens) and is_number(tokens[i]):
                coef = float(tokens[i])
                saw_number = True
                i += 1
            if i < len(tokens) and tokens[i] not in ("<=", ">=", "=", "+", "-", ":") \
                    and not section_of(tokens, i):
                terms[model.var(tokens[i])] = terms.get(model.var(tokens[i]), 0.0) \
                    + sign * coef
                i += 1
            elif saw_number:
                constant += sign * coef
            else:
                raise ValueError(f"bad expression near token {i}: {tokens[i:i+4]}")
        return terms, constant, i

    # objective, optionally labelled
    if i + 1 < len(tokens) and tokens[i + 1] == ":":
        i += 2
    model.obj, model.obj_constant, i = parse_expr(i)

    if section_of(tokens, i) != "subject to":
        raise ValueError("expected Subject To")
    i += 2 if tokens[i].lower() == "subject" else 1

    while i < len(tokens) and not section_of(tokens, i):
        if i + 1 < len(tokens) and tokens[i + 1] == ":":
            i += 2  # row label
        terms, shift, i = parse_expr(i)
        if i >= len(tokens) or tokens[i] not in ("<=", ">=", "="):
            raise ValueError(f"row without relation near token {i}")
        sense = tokens[i]
        i += 1
        sign = 1.0
        while tokens[i] in "+-":
            if tokens[i] == "-":
                sign = -sign
            i += 1
        rhs = sign * float(tokens[i]) - shift
        i += 1
        model.rows.append((terms, sense, rhs))

    while i < len(tokens):
        sec = section_of(tokens, i)
        if sec is None:
            raise ValueError(f"unexpected token {tokens[i]!r}")
        i += 1
        if sec == "end":
            break
        if sec == "bounds":
            while i < len(tokens) and not section_of(tokens, i):
                sign = 1.0
                while tokens[i] in "+-":
                    if tokens[i] == "-":
                        sign = -sign
                    i += 1
                first = None
                if is_number(tokens[i]):
                    first = sign * float(tokens[i])
                    i += 2  # number '<='
                var = model.var(tokens[i])
                i += 1
                if first is not None:
                    model.lo[var] = first
                if i < len(tokens) and tokens[i].lower() == "free":
                    model.lo[var] = -np.inf
                    model.hi[var] = np.inf
                    i += 1
                    continue
                if i < len(tokens) and tokens[i] in ("<=", ">=", "="):
                    rel = tokens[i]
                    i += 1
                    vsign = 1.0
                    while tokens[i] in "+-":
                        if tokens[i] == "-":
                            vsign = -vsign
                        i += 1
                    value = vsign * float(tokens[i])
                    i += 1
                    if rel == "<=":
                        model.hi[var] = value
                    elif rel == ">=":
                        model.lo[var] = value
                    else:
                        model.lo[var] = model.hi[var] = value
        elif sec in ("generals", "general", "binaries", "binary"):
            binary = sec.startswith("b")
            while i < len(tokens) and not section_of(tokens, i):
                var = model.var(tokens[i])
                model.integrality[var] = 1
                if binary:
                    model.lo[var] = 0.0
                    model.hi[var] = 1.0
                i += 1
    return model


def solve(model, time_limit, gap):
    n = len(model.names)
    c = np.zeros(n)
    for var, coef in model.obj.items():
        c[var] = coef

    data, rows, cols, lb, ub = [], [], [], [], []
    for r, (terms, sense, rhs) in enumerate(model.rows):
        for var, coef in terms.items():
            rows.append(r)
            cols.append(var)
            data.append(coef)
        lb.append(rhs if sense in (">=", "=") else -np.inf)
        ub.append(rhs if sense in ("<=", "=") else np.inf)
    a = sparse.coo_matrix((data, (rows, cols)), shape=(len(model.rows), n))

    options = {"presolve": True}
    if time_limit and time_limit > 0:
        options["time_limit"] = time_limit
    if gap and gap > 0:
        options["mip_rel_gap"] = gap

    return milp(
        c,
        constraints=LinearConstraint(a, np.array(lb), np.array(ub)),
        integrality=np.array(model.integrality),
        bounds=Bounds(np.array(model.lo), np.array(model.hi)),
        options=options,
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lp", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--time-limit", type=float, default=600.0)
    ap.add_argument("--gap", type=float, default=0.0)
    args = ap.parse_args()

    with open(args.lp, "r", encoding="utf-8") as fh:
        model = parse_lp(fh.read())

    res = solve(model, args.time_limit, args.gap)

    if res.status == 0:
        status = "OPTIMAL"
    elif res.status == 1:
        status = "TIMELIMIT"
    elif res.status == 2:
        status = "INFEASIBLE"
    else:
        print(f"solver failed: status={res.status} message={res.message}",
              file=sys.stderr)
        return 3

    lines = [f"=status= {status}"]
    bound = getattr(res, "mip_dual_bound", None)
    if bound is not None and np.isfinite(bound):
        lines.append(f"=bound= {float(bound) + model.obj_constant!r}")
    if res.x is not None:
        for name, value in zip(model.names, res.x):
            lines.append(f"{name} {float(value)!r}")
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
