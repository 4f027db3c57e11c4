import math

import numpy as np
import pytest
from scipy import integrate

from margauss.bodies import BodySpec, regular_simplex, sample_body
from margauss.core import ConstantsConfig, substream
from margauss.frames import (
    Frame,
    coordinate_frame,
    frame_functionals,
    haar_frame,
    walsh_frame,
)
from margauss.stein import (
    BoundReport,
    PairSpec,
    PairStatistics,
    conditional_checks,
    corollary_bounds,
    estimate_pair_terms,
    reflect_pair,
    theorem_bounds,
    transpose_pair,
)

RESIDUAL_TOL = 1e-10


def make_spec(kind, n, k, seed=0, frame_kind="haar"):
    body = BodySpec(kind, n)
    geom = regular_simplex(n) if kind == "simplex" else None
    if frame_kind == "walsh":
        frame = walsh_frame(n, k)
    else:
        frame = haar_frame(n, k, substream(seed, 777))
    return PairSpec(body=body, frame=frame, geom=geom)


def test_reflect_pair_hand_example():
    frame = Frame(np.array([[1.0, 1.0]]) / math.sqrt(2.0))
    w, wp = reflect_pair(np.array([1.0, 2.0]), 0, frame)
    assert (wp - w)[0] == pytest.approx(-math.sqrt(2.0), abs=1e-14)


def test_reflect_pair_fixes_zero_coordinate():
    frame = walsh_frame(4, 2)
    x = np.array([0.0, 1.0, 2.0, 3.0])
    w, wp = reflect_pair(x, 0, frame)
    assert np.allclose(w, wp)
    with pytest.raises(ValueError):
        reflect_pair(x, 4, frame)


def test_reflect_pair_exchangeable_moments():
    # Swapped mixed moments agree distributionally for a product body.
    frame = walsh_frame(16, 1)
    body = BodySpec("product-uniform", 16)
    pts = sample_body(body, substream(40, 0), 100_000).points
    idx = substream(40, 1).integers(0, 16, len(pts))
    w = pts @ frame.rows[0]
    wp = w - 2.0 * frame.rows[0][idx] * pts[np.arange(len(pts)), idx]
    fwd = w * wp**2
    bwd = wp * w**2
    diff = fwd - bwd
    m = (len(diff) // 20) * 20
    batch = diff[:m].reshape(20, -1).mean(axis=1)
    assert abs(batch.mean()) < 3 * batch.std(ddof=1) / math.sqrt(20)


def test_transpose_pair_orthogonal_point_fixed():
    geom = regular_simplex(4)
    frame = haar_frame(4, 2, substream(41, 0))
    u = geom.edge_direction(0, 1)
    x = substream(41, 1).normal(4)
    x -= (x @ u) * u
    w, wp = transpose_pair(x, 0, 1, geom, frame)
    assert np.max(np.abs(w - wp)) < 1e-12


def test_transpose_pair_triangle_vertex_fixed():
    geom = regular_simplex(2)
    frame = Frame(np.array([[1.0, 0.0]]))
    x = geom.scale * geom.vertices[0]
    w, wp = transpose_pair(x, 1, 2, geom, frame)
    assert np.max(np.abs(w - wp)) < 1e-12
    with pytest.raises(ValueError):
        transpose_pair(x, 1, 1, geom, frame)


def test_transposition_is_isometry():
    geom = regular_simplex(6)
    x = sample_body(BodySpec("simplex", 6), substream(42, 0), 1, geom=geom).points[0]
    u = geom.edge_direction(2, 5)
    x_prime = x - 2.0 * (x @ u) * u
    assert abs(np.linalg.norm(x_prime) - np.linalg.norm(x)) < 1e-12
    # The reflected point stays inside the simplex.
    inner = x_prime @ geom.vertices.T / geom.scale
    coords = (inner + 1.0 / 6) * 6 / 7
    assert coords.min() >= -1e-12


def test_pair_spec_validation():
    body = BodySpec("product-uniform", 8)
    frame = walsh_frame(8, 2)
    spec = PairSpec(body=body, frame=frame)
    assert spec.lam == pytest.approx(0.25)
    with pytest.raises(ValueError):
        PairSpec(body=body, frame=frame, lam=0.3)
    with pytest.raises(ValueError):
        PairSpec(body=body, frame=frame, geom=regular_simplex(8))
    with pytest.raises(ValueError):
        PairSpec(body=BodySpec("product-uniform", 9), frame=frame)
    simplex_spec = PairSpec(body=BodySpec("simplex", 8), frame=frame)
    assert simplex_spec.geom is not None


@pytest.mark.parametrize("kind", ["product-uniform", "simplex"])
@pytest.mark.parametrize("n,k", [(16, 3), (8, 2)])
def test_conditional_checks_exact(kind, n, k):
    spec = make_spec(kind, n, k, seed=n * 7 + k)
    pts = sample_body(spec.body, substream(43, n + k), 25, geom=spec.geom).points
    for x in pts:
        res = conditional_checks(x, spec)
        assert res.linearity_residual < RESIDUAL_TOL
        assert res.second_moment_residual < RESIDUAL_TOL


def test_conditional_checks_zero_point():
    spec = make_spec("product-uniform", 16, 3)
    res = conditional_checks(np.zeros(16), spec)
    assert res.linearity_residual == 0.0
    assert res.second_moment_residual == 0.0


def test_term_e_coordinate_frame_quadrature_oracle():
    # E_11 = (4/n)(X_1^2 - 1) for the first coordinate frame, so the
    # normalized term is 2 E|Z^2 - 1|; oracle by quadrature.
    oracle, _ = integrate.quad(
        lambda z: abs(z * z - 1) * math.exp(-z * z / 2) / math.sqrt(2 * math.pi), -12, 12
    )
    assert oracle == pytest.approx(4 * math.exp(-0.5) / math.sqrt(2 * math.pi), abs=1e-9)
    spec = PairSpec(body=BodySpec("product-gaussian", 16), frame=coordinate_frame(16, 1))
    stats = estimate_pair_terms(spec, 100_000, substream(44, 0))
    assert abs(stats.term_E - 2.0 * oracle) < 3 * stats.term_E_se


def test_estimate_pair_terms_requires_enough_samples():
    spec = make_spec("product-uniform", 16, 1)
    with pytest.raises(ValueError):
        estimate_pair_terms(spec, 100, substream(1, 0))


def test_condvar_proxy_only_for_k1():
    stats = estimate_pair_terms(make_spec("product-uniform", 16, 2), 20_000, substream(45, 0))
    assert stats.condvar_proxy is None
    stats1 = estimate_pair_terms(make_spec("product-uniform", 16, 1), 20_000, substream(45, 1))
    assert stats1.condvar_proxy is not None and stats1.condvar_proxy > 0


@pytest.mark.parametrize("n,k", [(32, 1), (32, 2)])
def test_proof_chain_product(n, k):
    spec = make_spec("product-uniform", n, k, frame_kind="walsh")
    stats = estimate_pair_terms(spec, 50_000, substream(46, n + k))
    fun = frame_functionals(spec.frame)
    assert stats.term_E <= 8 * math.sqrt(2) * fun.l4_sum + 3 * stats.term_E_se
    m3_bound = (12 * math.sqrt(2) / n) * fun.l3_sum**1.5
    assert stats.term_M3 <= m3_bound + 3 * stats.term_M3_se


@pytest.mark.parametrize("n,k", [(32, 1), (32, 2)])
def test_proof_chain_simplex(n, k):
    spec = make_spec("simplex", n, k, seed=n + k)
    stats = estimate_pair_terms(spec, 50_000, substream(47, n + k))
    fun = frame_functionals(spec.frame, spec.geom)
    q = fun.simplex_quartic
    assert stats.term_E <= 8 * math.sqrt(2) * q + 3 * stats.term_E_se
    m3_bound = (96 * math.sqrt(k) / (n + 1)) * q
    assert stats.term_M3 <= m3_bound + 3 * stats.term_M3_se


def test_theorem_bound_values():
    assert theorem_bounds(walsh_frame(256, 2)).d1_bound == pytest.approx(7.0)
    assert theorem_bounds(walsh_frame(64, 1)).d1_bound == pytest.approx(14 * 64**-0.25)
    geom = regular_simplex(2)
    frame = Frame(np.array([[1.0, 0.0]]))
    report = theorem_bounds(frame, geom, theorem="thm3")
    cubic = frame_functionals(frame, geom).simplex_cubic
    assert report.dtv_bound == pytest.approx(math.sqrt(cubic))
    with pytest.raises(ValueError):
        theorem_bounds(walsh_frame(4, 2), geom=None, theorem="thm3")
    with pytest.raises(ValueError):
        theorem_bounds(Frame(np.eye(2)), geom, theorem="thm3")


def test_theorem_bounds_scale_with_constants():
    constants = ConstantsConfig(C_tv_multi=3.0)
    base = theorem_bounds(walsh_frame(64, 2))
    scaled = theorem_bounds(walsh_frame(64, 2), constants=constants)
    assert scaled.dtv_bound == pytest.approx(3.0 * base.dtv_bound)
    assert scaled.d1_bound == pytest.approx(base.d1_bound)


def synthetic_stats(term_e, term_m3, k, n, condvar=None):
    return PairStatistics(
        term_E=term_e,
        term_E_se=0.0,
        term_M3=term_m3,
        term_M3_se=0.0,
        condvar_proxy=condvar,
        condvar_proxy_se=None if condvar is None else 0.0,
        count=10_000,
        k=k,
        n=n,
        lam=2.0 / n,
    )


def test_corollary_formula_substitution():
    a, b, n = 0.3, 0.02, 50
    lam = 2.0 / n
    stats = synthetic_stats(a, b, 1, n)
    report = corollary_bounds(stats, 1, lam)
    assert report.d1_bound == pytest.approx(a + math.sqrt(2 * b / (3 * lam)))
    assert report.dtv_bound == pytest.approx((a + b / lam) ** (1 / 3))


def test_corollary_tv_univ_formula_and_guards():
    n = 50
    lam = 2.0 / n
    stats = synthetic_stats(0.3, 0.02, 1, n, condvar=0.0004)
    report = corollary_bounds(stats, 1, lam, source="cor-tv-univ")
    assert report.dtv_bound == pytest.approx(math.sqrt(0.0004) / lam + 2 * math.sqrt(0.02 / lam))
    stats2 = synthetic_stats(0.3, 0.02, 2, n)
    with pytest.raises(ValueError):
        corollary_bounds(stats2, 2, lam, source="cor-tv-univ")
    with pytest.raises(ValueError):
        corollary_bounds(stats, 1, lam, source="prop-stein")
    with pytest.raises(ValueError):
        corollary_bounds(stats, 2, lam)


def test_prop_cm_d2_formula():
    n = 40
    lam = 2.0 / n
    stats = synthetic_stats(0.5, 0.01, 2, n)
    report = corollary_bounds(stats, 2, lam, source="prop-cm-d2")
    assert report.d2_bound == pytest.approx(0.5 + math.sqrt(2 * math.pi) / (24 * lam) * 0.01)


def test_gaussian_sanity_bound_positive():
    spec = PairSpec(
        body=BodySpec("product-gaussian", 32), frame=haar_frame(32, 2, substream(48, 0))
    )
    stats = estimate_pair_terms(spec, 20_000, substream(48, 1))
    report = corollary_bounds(stats, 2, spec.lam)
    assert np.isfinite(report.d1_bound) and report.d1_bound > 0


@pytest.mark.parametrize("kind,frame_kind", [("product-uniform", "walsh"), ("simplex", "haar")])
def test_corollary_below_theorem_d1(kind, frame_kind):
    spec = make_spec(kind, 64, 2, seed=5, frame_kind=frame_kind)
    stats = estimate_pair_terms(spec, 50_000, substream(49, 0))
    cor = corollary_bounds(stats, 2, spec.lam)
    thm = theorem_bounds(spec.frame, spec.geom)
    assert cor.d1_bound <= thm.d1_bound * (1 + 3 * stats.term_E_se / max(stats.term_E, 1e-12))


def test_tv_univ_bound_decreases_with_dimension():
    values = []
    ses = []
    for n in (50, 100, 200):
        spec = make_spec("simplex", n, 1, seed=n)
        stats = estimate_pair_terms(spec, 20_000, substream(50, n))
        report = corollary_bounds(stats, 1, spec.lam, source="cor-tv-univ")
        values.append(report.dtv_bound)
        ses.append(stats.term_M3_se + (stats.condvar_proxy_se or 0.0))
    assert values[1] < values[0] + 3 * (ses[0] + ses[1])
    assert values[2] < values[1] + 3 * (ses[1] + ses[2])


def test_bound_report_validation():
    with pytest.raises(ValueError):
        BoundReport(source="thm9")
    with pytest.raises(ValueError):
        BoundReport(source="thm1", d1_bound=-1.0)
    assert BoundReport(source="prop-stein").source == "prop-stein"
