"""Smoke test for the fracspec_py extension. Run after building it:

    pip install --no-build-isolation ./crates/py
    python3 python/smoke_test.py
"""

import math

import fracspec_py as fs

D_CANTOR = math.log(2) / math.log(3)


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def sequences():
    s = fs.EigenvalueSequence.two_slope(2.0, 1.0, 1_000_000)
    assert s.cap == 1_000_000
    r = s.analyze()
    close(r["ord"], 1.5, 0.05)
    c = s.c_bounds()
    close(c["lower"], 0.5, 0.05)
    close(c["upper"], 1.0, 0.05)

    h = fs.EigenvalueSequence.from_values([1.0 / n for n in range(1, 50_001)])
    close(h.get(10), 0.1, 1e-15)
    assert h.exhausted
    assert h.values(3) == [1.0, 0.5, 1.0 / 3.0]
    try:
        h.get(0)
    except IndexError:
        pass
    else:
        raise AssertionError("index 0 accepted")
    try:
        fs.EigenvalueSequence.from_values([1.0, -1.0])
    except fs.FracspecError:
        pass
    else:
        raise AssertionError("negative eigenvalue accepted")


def cantor():
    ifs = fs.Ifs.line_rational([("1/3", "0"), ("1/3", "2/3")])
    close(ifs.similarity_dimension(), D_CANTOR, 1e-12)
    slope, lo, hi = ifs.box_dimension(12)
    close(slope, D_CANTOR, 0.05)

    gaps = fs.GapTriple(ifs, 20_000)
    close(gaps.spectral_dimension()["value"], D_CANTOR, 0.01)

    pairs = fs.PairTriple(ifs, 2**20)
    close(pairs.critical_exponent(), D_CANTOR, 1e-12)
    close(pairs.spectral_dimension()["value"], D_CANTOR, 0.01)
    analytic, numeric, err = pairs.zeta_residue(D_CANTOR)
    close(numeric, analytic, max(1e-4, 3 * err))
    value, lo, hi = pairs.hausdorff_functional(fs.TestFunction.constant(1.0))
    assert lo <= value <= hi
    close(fs.TestFunction.affine([2.0], 1.0)([3.0]), 7.0, 1e-15)


if __name__ == "__main__":
    sequences()
    cantor()
    print("smoke test OK")
