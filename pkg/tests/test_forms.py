import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermricci import forms as F
from hermricci.catalog import parse_metric_id
from hermricci.jets import evaluate_jet, inverse_metric

from conftest import random_form, random_hpd


@st.composite
def bidegree_case(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    p = draw(st.integers(0, n))
    q = draw(st.integers(0, n))
    seed = draw(st.integers(0, 2**31 - 1))
    return n, p, q, np.random.default_rng(seed)


def test_unit_and_volume_normalisation(rng):
    h = random_hpd(rng, 3)
    w = F.kahler_form(h)
    one = F.scalar_form(np.array(1.0 + 0j), 3)
    assert np.allclose(F.wedge(w, one).coeffs, w.coeffs)
    G = inverse_metric(h)
    assert F.norm_sq(w, G) == pytest.approx(3)
    assert F.contract_lambda(w, G).coeffs == pytest.approx(3)
    assert F.trace_herm11(h, G) == pytest.approx(3)


def test_omega_squared_over_two_for_diagonal_metric():
    # brute-force expansion for n = 2: omega^2/2 = det(h) (i dz1 dzb1)(i dz2 dzb2)
    h = np.diag([2.0, 5.0]).astype(complex)
    w = F.kahler_form(h)
    sq = F.wedge(w, w).scale(0.5)
    e11 = np.zeros((2, 2), complex)
    e22 = np.zeros((2, 2), complex)
    e11[0, 0] = e22[1, 1] = 1j
    prod = F.wedge(F.PQForm(1, 1, 2, e11), F.PQForm(1, 1, 2, e22))
    assert np.allclose(sq.coeffs, np.linalg.det(h).real * prod.coeffs)
    assert np.allclose(F.volume_form(h).coeffs, sq.coeffs)


@settings(max_examples=60, deadline=None)
@given(bidegree_case(), st.integers(0, 4), st.integers(0, 4))
def test_graded_commutativity(case, p2, q2):
    n, p, q, rng = case
    if p + p2 > n or q + q2 > n:
        return
    a, b = random_form(rng, p, q, n), random_form(rng, p2, q2, n)
    sign = (-1) ** ((p + q) * (p2 + q2))
    assert np.allclose(F.wedge(a, b).coeffs, sign * F.wedge(b, a).coeffs)


@settings(max_examples=60, deadline=None)
@given(bidegree_case(max_n=3))
def test_wedge_associative(case):
    n, p, q, rng = case
    a = random_form(rng, p, q, n)
    b = random_form(rng, min(1, n - p), 0, n)
    c = random_form(rng, 0, min(1, n - q), n)
    left = F.wedge(F.wedge(a, b), c)
    right = F.wedge(a, F.wedge(b, c))
    assert np.allclose(left.coeffs, right.coeffs)


def test_fast_wedge_matches_shuffle_reference(rng):
    worst = 0.0
    for n in (1, 2, 3, 4):
        for ap, aq, bp, bq in itertools.product(range(3), repeat=4):
            if ap + bp > n or aq + bq > n:
                continue
            a = random_form(rng, ap, aq, n, (2,))
            b = random_form(rng, bp, bq, n, (3, 1, 1))
            diff = F.wedge(a, b).coeffs - F.wedge_reference(a, b).coeffs
            worst = max(worst, np.abs(diff).max())
    assert worst < 1e-12


@settings(max_examples=60, deadline=None)
@given(bidegree_case())
def test_positivity(case):
    n, p, q, rng = case
    a = random_form(rng, p, q, n)
    G = inverse_metric(random_hpd(rng, n))
    assert F.norm_sq(a, G) >= -1e-12
    assert abs(np.imag(F.inner(a, a, G))) < 1e-9 * max(1.0, F.norm_sq(a, G))


@settings(max_examples=60, deadline=None)
@given(bidegree_case())
def test_lefschetz_adjoint(case):
    n, p, q, rng = case
    if p == n or q == n:
        return
    h = random_hpd(rng, n)
    G = inverse_metric(h)
    a = random_form(rng, p, q, n)
    b = random_form(rng, p + 1, q + 1, n)
    lhs = F.inner(F.lefschetz(a, h), b, G)
    rhs = F.inner(a, F.contract_lambda(b, G), G)
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


@settings(max_examples=60, deadline=None)
@given(bidegree_case())
def test_lefschetz_commutator(case):
    n, p, q, rng = case
    h = random_hpd(rng, n)
    G = inverse_metric(h)
    a = random_form(rng, p, q, n)
    lam_l = F.contract_lambda(F.lefschetz(a, h), G).coeffs if p < n and q < n else 0
    l_lam = F.lefschetz(F.contract_lambda(a, G), h).coeffs if p and q else 0
    # [L, Lambda] a = (p + q - n) a
    comm = l_lam - lam_l
    assert np.allclose(comm, (p + q - n) * a.coeffs, atol=1e-10)


def test_lefschetz_of_one_and_omega(rng):
    h = random_hpd(rng, 3)
    w = F.kahler_form(h)
    assert np.allclose(F.lefschetz(F.scalar_form(np.array(1.0 + 0j), 3), h).coeffs, w.coeffs)
    assert np.allclose(F.lefschetz(w, h).coeffs, F.wedge(w, w).coeffs)


def test_trace_two_ways(rng):
    h = random_hpd(rng, 4)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    a = m + m.conj().T
    G = inverse_metric(h)
    # sum_ij h^{i jbar} a_{i jbar} = tr(h^{-1} a) with a[i, j] = a_{i jbar}
    via_matrix = np.trace(np.linalg.solve(h, a))
    assert F.trace_herm11(a, G) == pytest.approx(via_matrix, abs=1e-12)
    assert np.imag(F.trace_herm11(a, G)) == pytest.approx(0, abs=1e-12)


def test_herm11_round_trip(rng):
    h = random_hpd(rng, 3)
    assert np.allclose(F.form_to_herm11(F.herm11_to_form(h)), h)


def test_conjugate_is_involution(rng):
    a = random_form(rng, 2, 1, 3)
    b = a.conj()
    assert (b.p, b.q) == (1, 2)
    assert np.allclose(b.conj().coeffs, a.coeffs)


def test_bidegree_errors():
    with pytest.raises(F.FormError):
        F.PQForm(3, 0, 2, np.zeros((2, 2, 2)))
    with pytest.raises(F.FormError):
        F.wedge(F.basis_1_0(2).scale(np.ones(2)), F.PQForm(2, 0, 2, np.zeros((2, 2))))
    with pytest.raises(F.FormError):
        F.contract_lambda(F.basis_1_0(2), np.eye(2))


def _basis_route(f, hol, anti):
    """``sum dz^p ^ dzbar^q ^ F_pq`` with explicit basis forms; reference for the fast route."""
    n = f.n
    out = None
    if hol and anti:
        for p in range(n):
            for q in range(n):
                dz = F.PQForm(1, 0, n, np.eye(n, dtype=complex)[p])
                dzb = F.PQForm(0, 1, n, np.eye(n, dtype=complex)[q])
                piece = F.PQForm(f.p, f.q, n, f.coeffs[(Ellipsis, p, q) + (slice(None),) * f.degree])
                term = F.wedge(F.wedge(dz, dzb), piece)
                out = term if out is None else out + term
    else:
        for p in range(n):
            basis = (F.PQForm(1, 0, n, np.eye(n, dtype=complex)[p]) if hol
                     else F.PQForm(0, 1, n, np.eye(n, dtype=complex)[p]))
            piece = F.PQForm(f.p, f.q, n, f.coeffs[(Ellipsis, p) + (slice(None),) * f.degree])
            term = F.wedge(basis, piece)
            out = term if out is None else out + term
    return out


@pytest.mark.parametrize("metric_id,k", [("hopf:n=3", 1), ("random-poly:n=3,seed=3", 2),
                                          ("random-poly:n=2,seed=1", 1)])
def test_form_derivatives_against_basis_route(metric_id, k, rng):
    spec = parse_metric_id(metric_id)
    j = evaluate_jet(spec, spec.sample(rng, 3))
    wk = F.power_jet(F.kahler_form_jet(j), k)
    assert np.allclose(wk.ddbar_form().coeffs, _basis_route(wk.ddbar, True, True).coeffs, atol=1e-12)
    assert np.allclose(wk.d_hol().coeffs, _basis_route(wk.d, True, False).coeffs, atol=1e-12)
    assert np.allclose(wk.d_antihol().coeffs, _basis_route(wk.dbar, False, True).coeffs, atol=1e-12)


def test_top_coefficient_shortcuts(rng):
    spec = parse_metric_id("random-poly:n=3,seed=5")
    j = evaluate_jet(spec, spec.sample(rng, 4))
    wj = F.kahler_form_jet(j)
    vol = F.volume_form(j.h)
    assert np.allclose(F.volume_coefficient(j.h), F.top_coefficient(vol))
    a, b = wj.d_hol(), wj.d_antihol()
    assert np.allclose(F.wedge_top(a, b), F.top_coefficient(F.wedge(a, b)))
    sq = F.power_jet(wj, 2)
    assert np.allclose(F.prepend_top(sq.ddbar), F.top_coefficient(sq.ddbar_form()))
    assert np.allclose(F.top_density(vol, vol), 1)


def test_form_jet_wedge_matches_finite_difference(rng):
    # d of omega^2 from the Leibniz jet against central differences of omega^2
    spec = parse_metric_id("random-poly:n=2,seed=7")
    z = spec.sample(rng, 1)[0]
    j = evaluate_jet(spec, z)
    sq = F.power_jet(F.kahler_form_jet(j), 2)

    def value(w):
        return F.wedge(F.kahler_form(spec.metric(w)), F.kahler_form(spec.metric(w))).coeffs

    t = 1e-5
    for p in range(2):
        e = np.zeros(2, complex)
        e[p] = 1
        dx = (value(z + t * e) - value(z - t * e)) / (2 * t)
        dy = (value(z + 1j * t * e) - value(z - 1j * t * e)) / (2 * t)
        assert np.allclose(sq.d.coeffs[p], 0.5 * (dx - 1j * dy), atol=1e-7)
        assert np.allclose(sq.dbar.coeffs[p], 0.5 * (dx + 1j * dy), atol=1e-7)


def test_hopf_surface_is_pluriclosed(rng):
    spec = parse_metric_id("hopf:n=2")
    j = evaluate_jet(spec, spec.sample(rng, 10))
    ddw = F.kahler_form_jet(j).ddbar_form()
    assert np.abs(ddw.coeffs).max() < 1e-12
    assert np.abs(F.contract_lambda(ddw, inverse_metric(j)).coeffs).max() < 1e-12


@pytest.mark.parametrize("metric_id", ["hopf:n=3", "hopf:n=4"])
def test_hopf_is_gauduchon(metric_id, rng):
    spec = parse_metric_id(metric_id)
    j = evaluate_jet(spec, spec.sample(rng, 5))
    top = F.power_jet(F.kahler_form_jet(j), spec.n - 1).ddbar_form()
    assert np.abs(top.coeffs).max() < 1e-12


def test_antisymmetry_defect(rng):
    assert random_form(rng, 2, 2, 3).antisymmetry_defect() < 1e-14
