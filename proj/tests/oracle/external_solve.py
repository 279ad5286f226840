#!/usr/bin/env python3
"""Solve an MPS file with an external solver and write `column value` lines.

usage: external_solve.py model.mps solution.txt
Prints "status <s>" and "objective <value>" on stdout. Uses HiGHS (highspy).
"""
import sys


def solve_highspy(path):
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("presolve", "on")
    if h.readModel(path) != highspy.HighsStatus.kOk:
        raise SystemExit("cannot read " + path)
    h.run()
    status = h.modelStatusToString(h.getModelStatus()).lower()
    lp = h.getLp()
    names = [lp.col_names_[j] for j in range(lp.num_col_)]
    values = list(h.getSolution().col_value)
    return status, h.getInfo().objective_function_value, names, values


def main():
    if len(sys.argv) != 3:
        raise SystemExit(__doc__)
    status, obj, names, values = solve_highspy(sys.argv[1])
    with open(sys.argv[2], "w") as f:
        for n, v in zip(names, values):
            f.write(f"{n} {v!r}\n")
    print("status", status)
    print("objective", repr(obj))


if __name__ == "__main__":
    main()
