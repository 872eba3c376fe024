#!/usr/bin/env python3
"""Writes hand-built augmented complexes (with their systems) under data/fixtures."""
import json
import pathlib
import sys

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/fixtures")
out.mkdir(parents=True, exist_ok=True)


def regular(n):
    # left regular action of the cyclic group on basis g0..g{n-1}; category_of_group names g0.. with g0 = e
    act = {}
    for a in range(1, n):
        act[f"g{a}"] = [[1 if (a + b) % n == r else 0 for b in range(n)] for r in range(n)]
    return act


def block_diag(m, copies):
    n = len(m)
    rows = [[0] * (n * copies) for _ in range(n * copies)]
    for c in range(copies):
        for i in range(n):
            for j in range(n):
                rows[c * n + i][c * n + j] = m[i][j]
    return rows


def free_cyclic(n, copies):
    return {"dims": {"*": n * copies}, "action": {k: block_diag(v, copies) for k, v in regular(n).items()}}


def unipotent_h1():
    # C2 -> 1 at p = 2: P_0 = kC2 -> k, P_1 = kC2^2 with d = (1+t, 0), P_2 = kC2 onto the first (1+t).
    # H_1 is the second kC2 summand, on which t acts by [[1,1],[0,1]] in the basis (1+t, 1).
    return {
        "prime": 2,
        "source": {"group": {"named": "C2"}},
        "target": {"group": {"named": "C1"}},
        "complex": {
            "terms": [free_cyclic(2, 1), free_cyclic(2, 2), free_cyclic(2, 1)],
            "boundaries": [
                {"*": [[1, 1, 0, 0], [1, 1, 0, 0]]},
                {"*": [[1, 1], [1, 1], [0, 0], [0, 0]]},
            ],
            "augmentation": {"target": {"dims": {"*": 1}, "action": {"g1": [[1]]}},
                             "map": {"*": [[1, 1]]}},
        },
    }


def cyclic_identity(n, p):
    # theta = id on B(C_n), n a power of p: 0 -> kC_n -> theta^*(kC_n) -> 0
    ident = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    return {
        "prime": p,
        "source": {"group": {"named": f"C{n}"}},
        "target": {"group": {"named": f"C{n}"}},
        "functor": {"homomorphism": list(range(n))},
        "complex": {
            "terms": [free_cyclic(n, 1)],
            "boundaries": [],
            "augmentation": {"target": free_cyclic(n, 1), "map": {"*": ident}},
        },
    }


fixtures = {
    "unipotent_h1_complex.json": unipotent_h1(),
    "cyclic4_identity_complex.json": cyclic_identity(4, 2),
}
for name, data in fixtures.items():
    (out / name).write_text(json.dumps(data, indent=1) + "\n")
