"""Smoke test for the abm_py extension module.

Build and run from the repository root:

    cargo build --release -p abm-python --features extension-module
    cp target/release/libabm_py.so python/abm_py.so
    python3 python/smoke_test.py
"""

import json
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import abm_py  # noqa: E402

CIRCLE6 = [
    [0.39, 0.89],
    [-0.54, 0.93],
    [-0.94, -0.20],
    [-0.58, -0.91],
    [0.38, -0.81],
    [0.82, -0.01],
]


def degree(exps):
    return sum(exps)


def main():
    g = abm_py.abm(CIRCLE6, 0.1)
    print(g)
    assert g.nvars == 2
    assert g.degree_counts(4) == [0, 0, 1, 2, 2], g.degree_counts(4)
    assert len(g) == 5
    assert [0, 0] in g.order_ideal

    # stored extents agree with re-evaluation
    for stored, fresh in zip(g.extents, g.evaluate(CIRCLE6)):
        assert abs(stored - fresh) <= 1e-10, (stored, fresh)
    assert all(e <= 0.1 for e in g.extents)

    # scaling: same configuration at 0.1 * X with threshold 0.01
    scaled = [[0.1 * a, 0.1 * b] for a, b in CIRCLE6]
    h = abm_py.abm(scaled, 0.01)
    assert h.degree_counts(4) == g.degree_counts(4)
    qg = dict((tuple(m), c) for m, c in g.polynomials[0])
    qh = dict((tuple(m), c) for m, c in h.polynomials[0])
    for m, c in qg.items():
        assert math.isclose(qh[m] * 0.1 ** (degree(m) - 1), c, rel_tol=1e-8), (m, c, qh[m])

    # json round trip
    back = abm_py.Basis.from_json(g.to_json())
    assert back.polynomials == g.polynomials
    assert json.loads(g.to_json())["order"] == "degrevlex"

    # gradient-weighted norm of x on the unit square corners: |grad x| = 2
    sq = [[0, 0], [1, 0], [0, 1], [1, 1]]
    assert abs(abm_py.gradient_weighted_norm([([1, 0], 1.0)], sq) - 2.0) < 1e-12

    pts = abm_py.preprocess(abm_py.sample("v1", 40, seed=3))
    assert len(pts) == 40 and len(pts[0]) == 2
    mean_norm = sum(math.hypot(*p) for p in pts) / len(pts)
    assert abs(mean_norm - 1.0) < 1e-12

    c = abm_py.abm(CIRCLE6, 0.1, mode="coeff")
    assert "coeff" in repr(c)

    try:
        abm_py.abm(CIRCLE6, 0.1, mode="bogus")
    except ValueError:
        pass
    else:
        raise AssertionError("bad mode accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
