import numpy as np
import pytest

from hermricci import identities as I
from hermricci.catalog import default_ids, parse_metric_id
from hermricci.forms import trace_herm11

RICCI = {"lc-ricci-first", "lc-ricci-second", "chern-ricci-second", "hermitian-ricci", "riemannian-ricci"}
SCALAR = {"torsion-trace", "scalar-riemannian", "scalar-lc", "scalar-hermitian", "scalar-riemann-type",
          "scalar-combination", "torsion-vector-trace"}


@pytest.mark.parametrize("metric_id", default_ids())
def test_suite_analytic(metric_id):
    spec = parse_metric_id(metric_id)
    res = I.run_suite(spec, I.random_points(spec, 50, 1))
    assert RICCI | SCALAR <= set(res)
    worst = {k: float(v.max()) for k, v in res.items()}
    assert max(worst.values()) < I.ANALYTIC_TOL, worst


@pytest.mark.parametrize("metric_id", default_ids())
def test_suite_numeric(metric_id):
    spec = parse_metric_id(metric_id)
    res = I.run_suite(spec, I.random_points(spec, 10, 2), "numeric")
    worst = {k: float(v.max()) for k, v in res.items()}
    assert max(worst.values()) < I.NUMERIC_TOL, worst


def test_kahler_relations_only_on_kahler_entries():
    flat = I.run_suite(parse_metric_id("flat:n=2"), I.random_points(parse_metric_id("flat:n=2"), 3, 0))
    hopf = I.run_suite(parse_metric_id("hopf:n=2"), I.random_points(parse_metric_id("hopf:n=2"), 3, 0))
    assert "kahler-torsion" in flat and "kahler-torsion" not in hopf


@pytest.mark.parametrize("metric_id", ["hopf:n=2", "hopf:n=3", "random-poly:n=3,seed=2", "hopf:n=2~seed=5"])
def test_printed_second_chern_coefficient_is_off(metric_id):
    """The variant with (T.T + 3 T#T)/4 misses the second Chern-Ricci form on non-Kähler metrics."""
    spec = parse_metric_id(metric_id)
    z = I.random_points(spec, 10, 3)
    q = I.PointQuantities.of(spec, z)
    printed = I.printed_chern_second_rhs(q)
    miss = np.abs(q.ricci.chern2 - printed).max()
    assert miss > 1e-2
    # the difference is (T.T - T#T)/4, which is trace-free, so scalar relations are unaffected
    diff = (q.circ - q.box) / 4
    assert np.abs(q.ricci.chern2 - printed - (-diff)).max() < 1e-12
    assert np.abs(trace_herm11(diff, q.curv.G)).max() < 1e-12


def test_printed_variant_agrees_on_kahler():
    spec = parse_metric_id("fubini-study:n=3")
    q = I.PointQuantities.of(spec, I.random_points(spec, 5, 0))
    assert np.abs(q.ricci.chern2 - I.printed_chern_second_rhs(q)).max() < 1e-12


def test_hopf_surface_printed_gap_value():
    spec = parse_metric_id("hopf:n=2")
    q = I.PointQuantities.of(spec, np.array([[1, 0]], complex))
    gap = np.abs(q.ricci.chern2 - I.printed_chern_second_rhs(q)).max()
    assert gap == pytest.approx(np.abs((q.circ - q.box) / 4).max())
    assert gap > 0.1


@pytest.mark.parametrize("metric_id", ["hopf:n=2", "random-poly:n=3,seed=2", "hopf:n=3~seed=4,kind=hopf"])
def test_printed_ricci_sum_coefficient_is_off(metric_id):
    spec = parse_metric_id(metric_id)
    q = I.PointQuantities.of(spec, I.random_points(spec, 10, 4))
    lhs = q.ricci.lc1 + q.ricci.lc2
    gap = lhs - I.printed_ricci_sum_rhs(q)
    assert np.abs(gap).max() > 1e-2
    # same trace-free defect as the second Chern-Ricci coefficient
    assert np.abs(gap - (q.circ - q.box) / 4).max() < 1e-12
    assert I.run_suite(spec, I.random_points(spec, 10, 4), structural=False)["ricci-sum"].max() < 1e-12


def test_residual_normalisation():
    lhs = np.array([[1e6, 0.0], [0.5, 0.0]])
    rhs = np.array([[1e6 + 1.0, 0.0], [0.5 + 1e-3, 0.0]])
    r = I._res(lhs, rhs, 1)
    assert r[0] == pytest.approx(1e-6, rel=1e-3)
    assert r[1] == pytest.approx(1e-3)


def test_tolerance_defaults():
    assert I.tolerance("analytic") == 1e-8
    assert I.tolerance("numeric") == 1e-4


def test_random_points_reproducible():
    spec = parse_metric_id("hopf:n=3")
    assert np.array_equal(I.random_points(spec, 5, 7), I.random_points(spec, 5, 7))
