#!/usr/bin/env python3
"""Measure how translation output sizes grow with input size, both directions.

Scales a negation-cycle program family and an implication-chain formula
family, prints the sizes, and fits the log-log slope.
"""

import math

from aspsigma.asp_to_logic import translate as to_formula
from aspsigma.logic_to_asp import translate as to_program
from aspsigma.parsing import parse_formula, parse_program
from aspsigma.syntax import Atom, formula_length


def chain_program(k):
    names = [f"p{i}" for i in range(k)]
    text = "\n".join(
        f"{names[i]} :- not {names[(i + 1) % k]}." for i in range(k)
    )
    return parse_program(text)


def chain_formula(m):
    return parse_formula(" -> ".join(["P(c)"] + [f"a{i}" for i in range(m)] + ["g"]))


def slope(points):
    (x0, y0), (x1, y1) = points[0], points[-1]
    return math.log(y1 / y0) / math.log(x1 / x0)


def main():
    asp_points = []
    for k in (5, 10, 20, 40):
        p = chain_program(k)
        size = sum(1 + len(c.body) for c in p.clauses)
        t = to_formula(p, Atom("omega"))
        out = formula_length(t.formula)
        asp_points.append((size, out))
        print(f"program size {size:4d} -> formula length {out}")
    print(f"program->formula log-log slope: {slope(asp_points):.2f}")

    logic_points = []
    for m in (3, 8, 18, 38):
        phi = chain_formula(m)
        size = formula_length(phi)
        t = to_program(phi, addr_len=2)
        out = sum(1 + len(c.body) for c in t.program.clauses)
        logic_points.append((size, out))
        print(f"formula size {size:4d} -> program atoms  {out}")
    print(f"formula->program log-log slope: {slope(logic_points):.2f}")


if __name__ == "__main__":
    main()
