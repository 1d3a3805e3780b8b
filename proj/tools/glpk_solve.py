#!/usr/bin/env python3
"""Solve an LP file with GLPK (through cvxopt) and write `name value` lines.

Reads the CPLEX-LP subset written by `ivprp export --lp`: a minimised
objective, named rows, `lo <= name <= hi` bounds and a Binary section.

usage: glpk_solve.py MODEL.lp OUT.sol [TIME_LIMIT] [MIP_GAP]
"""
import re
import sys

from cvxopt import glpk, matrix, spmatrix

TOKEN = re.compile(r"[<>=]=?|[0-9.]+(?:[eE][+-]?[0-9]+)?|[A-Za-z_][A-Za-z0-9_.]*|[+-]")


def parse_expr(tokens):
    coefs, sign, coef = {}, 1.0, None
    for t in tokens:
        if t == "+":
            sign = 1.0
        elif t == "-":
            sign = -1.0
        elif t[0].isdigit() or t[0] == ".":
            coef = float(t)
        else:
            coefs[t] = coefs.get(t, 0.0) + sign * (1.0 if coef is None else coef)
            sign, coef = 1.0, None
    return coefs


def read_lp(path):
    sections = {"obj": [], "rows": [], "bounds": [], "binary": []}
    current, statements = None, []
    heads = {"minimize": "obj", "subject to": "rows", "bounds": "bounds", "binary": "binary"}
    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("\\"):
                continue
            key = line.strip().lower()
            if key in heads:
                current = heads[key]
                continue
            if key == "end":
                break
            if line.startswith("   ") and sections[current]:
                sections[current][-1] += " " + line.strip()
            else:
                sections[current].append(line.strip())
    objective = parse_expr(TOKEN.findall(" ".join(sections["obj"]).split(":", 1)[1]))
    rows = []
    for stmt in sections["rows"]:
        name, body = stmt.split(":", 1)
        toks = TOKEN.findall(body)
        at = max(i for i, t in enumerate(toks) if t[0] in "<>=")
        rhs = float("".join(toks[at + 1:]))
        sense = {"<": "<=", ">": ">=", "=<": "<=", "=>": ">="}.get(toks[at], toks[at])
        rows.append((name.strip(), parse_expr(toks[:at]), sense, rhs))
    bounds = {}
    for stmt in sections["bounds"]:
        lo, _, name, _, hi = stmt.split()
        bounds[name] = (float(lo), float(hi))
    binaries = " ".join(sections["binary"]).split()
    return objective, rows, bounds, binaries


def main(argv):
    if len(argv) < 3:
        sys.stderr.write(__doc__)
        return 1
    objective, rows, bounds, binaries = read_lp(argv[1])
    names = list(binaries) + [v for v in bounds if v not in set(binaries)]
    seen = set(names)
    for _, coefs, _, _ in rows:
        for v in coefs:
            if v not in seen:
                seen.add(v)
                names.append(v)
    index = {v: i for i, v in enumerate(names)}
    n = len(names)
    g_val, g_i, g_j, h = [], [], [], []
    a_val, a_i, a_j, b = [], [], [], []

    def add(vals, ii, jj, r, coefs, scale):
        for v, c in coefs.items():
            if c != 0:
                vals.append(scale * c)
                ii.append(r)
                jj.append(index[v])

    for _, coefs, sense, rhs in rows:
        if sense == "=":
            add(a_val, a_i, a_j, len(b), coefs, 1.0)
            b.append(rhs)
        elif sense == "<=":
            add(g_val, g_i, g_j, len(h), coefs, 1.0)
            h.append(rhs)
        else:
            add(g_val, g_i, g_j, len(h), coefs, -1.0)
            h.append(-rhs)
    for v, (lo, hi) in bounds.items():
        add(g_val, g_i, g_j, len(h), {v: 1.0}, 1.0)
        h.append(hi)
        add(g_val, g_i, g_j, len(h), {v: 1.0}, -1.0)
        h.append(-lo)
    c = matrix([objective.get(v, 0.0) for v in names])
    G = spmatrix(g_val, g_i, g_j, (len(h), n))
    A = spmatrix(a_val, a_i, a_j, (len(b), n)) if b else None
    opts = {"msg_lev": "GLP_MSG_OFF"}
    if len(argv) > 3:
        opts["tm_lim"] = int(float(argv[3]) * 1000)
    if len(argv) > 4:
        opts["mip_gap"] = float(argv[4])
    binary_idx = {index[v] for v in binaries}
    if A is None:
        status, x = glpk.ilp(c, G, matrix(h), I=set(), B=binary_idx, options=opts)
    else:
        status, x = glpk.ilp(c, G, matrix(h), A, matrix(b), I=set(), B=binary_idx, options=opts)
    if status == "optimal":
        tag = "optimal"
    elif status in ("feasible",):
        tag = "feasible"
    elif "infeasible" in status or "no primal feasible" in status:
        tag = "infeasible"
    else:
        tag = "timeout" if x is None else "feasible"
    with open(argv[2], "w") as out:
        out.write(f"# status: {tag}\n")
        if x is not None and tag in ("optimal", "feasible"):
            for v in names:
                val = x[index[v]]
                if abs(val - round(val)) < 1e-6:
                    val = round(val)
                out.write(f"{v} {val:.10g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
