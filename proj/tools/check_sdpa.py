#!/usr/bin/env python3
"""Re-solve SDPA exports with an independent solver (cvxpy + Clarabel).

Each file is read as: find Y >= 0 (block diagonal) with <F_i, Y> = c_i.
Negative block sizes are diagonal blocks. The objective matrix F_0 is ignored.
"""

import argparse
import re
import sys

import cvxpy as cp
import numpy as np


def read_sdpa(path):
    with open(path) as f:
        lines = [l.split("*")[0].split('"')[0].strip() for l in f]
    tokens = " ".join(l for l in lines if l)
    nums = re.split(r"[\s,{}()]+", tokens)
    nums = [t for t in nums if t]
    m, nb = int(nums[0]), int(nums[1])
    sizes = [int(float(t)) for t in nums[2:2 + nb]]
    c = np.array([float(t) for t in nums[2 + nb:2 + nb + m]])
    rest = nums[2 + nb + m:]
    entries = [(int(rest[k]), int(rest[k + 1]) - 1, int(rest[k + 2]) - 1, int(rest[k + 3]) - 1, float(rest[k + 4]))
               for k in range(0, len(rest), 5)]
    return sizes, c, entries


def solve(path):
    sizes, c, entries = read_sdpa(path)
    blocks, cons = [], []
    for s in sizes:
        if s > 0:
            blocks.append(cp.Variable((s, s), symmetric=True))
            cons.append(blocks[-1] >> 0)
        else:
            blocks.append(cp.Variable(-s))
            cons.append(blocks[-1] >= 0)
    rows = [0] * len(c)
    for con, b, i, j, v in entries:
        if con == 0:
            continue
        if sizes[b] < 0:
            term = v * blocks[b][i]
        else:
            term = (v if i == j else 2 * v) * blocks[b][i, j]
        rows[con - 1] = rows[con - 1] + term
    cons += [rows[k] == c[k] for k in range(len(c)) if not isinstance(rows[k], int)]
    if any(isinstance(rows[k], int) and c[k] != 0 for k in range(len(c))):
        return "infeasible"
    prob = cp.Problem(cp.Minimize(0), cons)
    prob.solve(solver=cp.CLARABEL)
    return prob.status


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("files", nargs="+")
    args = ap.parse_args()
    for path in args.files:
        print(f"{path}: {solve(path)}")


if __name__ == "__main__":
    sys.exit(main())
