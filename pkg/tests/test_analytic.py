from __future__ import annotations

import cmath
import math
import random
from fractions import Fraction as F

import mpmath
import pytest

from hypgeo.analytic import (
    ComplexPoint,
    DegenerateGridError,
    TailBoundError,
    disk_minimum,
    eval_derivative,
    eval_series,
    ks_star_evidence,
    series_for,
)
from hypgeo.series import CoefficientSequence, Kind, ParameterSet, build_sequence

from .oracles import mp_f, mp_partial_sum, random_tuple

LI2 = ParameterSet.of(1, 1, 1, 2, 2)
GEO = ParameterSet.of(F(3, 2), F(5, 2), 1, F(3, 2), F(5, 2))  # z/(1-z)
SMALL = (8, 32, F(95, 100))


def test_eval_at_origin():
    r = eval_series(series_for(LI2), 0)
    assert complex(r) == 0 and r.truncation_bound == 0
    d = eval_derivative(series_for(GEO), 0)
    assert complex(d) == 1 and d.truncation_bound == 0


def test_geometric_value():
    r = eval_series(series_for(GEO), F(3, 10))
    assert abs(complex(r) - 3 / 7) <= 1e-12
    assert abs(complex(r) - 3 / 7) <= r.truncation_bound + 1e-15


def test_dilogarithm():
    r = eval_series(series_for(LI2), F(1, 2))
    li2 = mpmath.pi**2 / 12 - mpmath.log(2) ** 2 / 2
    err = abs(mpmath.mpf(r.value.real.str(40, radius=False)) - li2)
    assert err <= 1e-12 and err <= r.truncation_bound


def test_derivative_examples():
    assert abs(complex(eval_derivative(series_for(GEO), F(1, 2))) - 4) <= 1e-12
    assert abs(complex(eval_derivative(series_for(LI2), F(1, 2))) - 2 * math.log(2)) <= 1e-12


def test_complex_point_agrees_with_mpmath():
    z = complex(0.3, -0.55)
    r = eval_series(series_for(LI2), z)
    assert abs(complex(r) - complex(mp_f(LI2, z))) <= r.truncation_bound + 1e-15


def test_odd_embedding_matches_mpmath():
    z = complex(-0.4, 0.5)
    p = ParameterSet.of(F(1, 2), 1, F(3, 2), 2, F(5, 2))
    r = eval_series(series_for(p, Kind.ODD), z)
    assert abs(complex(r) - complex(mp_f(p, z, odd=True))) <= r.truncation_bound + 1e-15


def test_finite_polynomial_sequence():
    s = CoefficientSequence.from_values([1, F(-1, 3), F(1, 5)])
    z = 0.5 + 0.25j
    want = z - z**2 / 3 + z**3 / 5
    assert abs(complex(eval_series(s, z)) - want) < 1e-15


def test_truncation_bound_dominates_longer_oracle():
    rng = random.Random(2024)
    for _ in range(20):
        p = random_tuple(rng)
        r_ = rng.uniform(0.05, 0.9)
        z = cmath.rect(r_, rng.uniform(0, 2 * math.pi))
        res = eval_series(series_for(p), z)
        long = build_sequence(p, 4 * res.terms_used)
        oracle = mp_partial_sum(long.values, complex(ComplexPoint.of(z)))
        assert abs(complex(res) - complex(oracle)) <= res.truncation_bound


def test_derivative_consistent_with_finite_difference():
    s = series_for(ParameterSet.of(F(1, 2), F(3, 4), 2, F(5, 2), 3))
    h = 1e-5
    for z in (0.3, 0.2 + 0.4j, -0.6j):
        fd = (complex(eval_series(s, z + h)) - complex(eval_series(s, z - h))) / (2 * h)
        assert abs(fd - complex(eval_derivative(s, z))) < 1e-8


def test_alexander_consistency():
    p = ParameterSet.of(F(1, 3), 2, F(5, 4), F(7, 2), 3)
    for z in (0.5, -0.3 + 0.6j):
        lam = eval_derivative(series_for(p, Kind.ALEXANDER), z)
        f = eval_series(series_for(p), z)
        zc = complex(ComplexPoint.of(z))
        assert abs(complex(lam) - complex(f) / zc) <= lam.truncation_bound + f.truncation_bound / abs(zc) + 1e-14


def test_tail_bound_error_near_boundary():
    with pytest.raises(TailBoundError):
        eval_series(series_for(LI2), F(999999, 1000000), tol=1e-15)


def test_point_outside_disk_rejected():
    with pytest.raises(ValueError):
        eval_series(series_for(LI2), 1)


def test_disk_minimum_identity_function():
    f = CoefficientSequence.from_values([1, 0])
    ev = disk_minimum(f, "ctc_log")
    assert abs(ev.min_value - 0.05) <= ev.error_budget + 1e-15
    assert ev.argmin_index == (64, 0) and ev.positive
    ev2 = disk_minimum(f, "ctc_log", (64, 40, F(95, 100)))
    assert abs(ev2.min_value - 0.05) <= 1e-15


def test_disk_minimum_geometric_functionals():
    s = series_for(GEO)
    for functional in ("ctc_log", "starlike"):
        ev = disk_minimum(s, functional, SMALL)
        assert abs(ev.min_value - 1 / 1.95) <= 1e-9
        assert ev.argmin_index == (8, 16) and ev.positive


def test_disk_minimum_is_worker_independent():
    s = series_for(ParameterSet.of(1, 2, F(1, 2), 3, F(5, 2)))
    a = disk_minimum(s, "starlike", SMALL, workers=1)
    b = disk_minimum(s, "starlike", SMALL, workers=3)
    assert (a.min_value, a.argmin_index, a.error_budget) == (b.min_value, b.argmin_index, b.error_budget)


def test_grid_refinement_monotone():
    s = series_for(LI2)
    coarse = disk_minimum(s, "ctc_log", (8, 32, F(9, 10)))
    fine = disk_minimum(s, "ctc_log", (16, 64, F(9, 10)))
    assert fine.min_value <= coarse.min_value + 2 * coarse.error_budget


@pytest.mark.parametrize("grid", [(0, 10, F(1, 2)), (4, 0, F(1, 2)), (4, 4, 1), (4, 4, F(995, 1000))])
def test_bad_grids_rejected(grid):
    with pytest.raises(ValueError):
        disk_minimum(series_for(LI2), "ctc_log", grid)


def test_unknown_functional():
    with pytest.raises(ValueError):
        disk_minimum(series_for(LI2), "convex", SMALL)


def test_starlike_all_nodes_skipped():
    # every node has |f| below 10*tol (but |z| above the origin cutoff)
    with pytest.raises(DegenerateGridError):
        disk_minimum(series_for(LI2), "starlike", (2, 4, F(1, 200)), tol=1e-2)


def test_ks_star_examples():
    for params, kind in ((GEO, Kind.NORMALIZED), (LI2, Kind.NORMALIZED), (GEO, Kind.ALEXANDER)):
        ctc, star = ks_star_evidence(params, kind, SMALL)
        assert ctc.positive and star.positive
    # Lambda of z/(1-z) is -log(1-z) and (1-z) Lambda' = 1 identically
    ctc, _ = ks_star_evidence(GEO, Kind.ALEXANDER, SMALL)
    assert abs(ctc.min_value - 1) <= 1e-12


def test_ks_star_rejects_odd():
    with pytest.raises(ValueError):
        ks_star_evidence(LI2, Kind.ODD, SMALL)
