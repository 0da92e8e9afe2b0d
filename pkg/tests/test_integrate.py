import math

import numpy as np
import pytest

from hermricci import integrate as I
from hermricci.catalog import hopf_volume, parse_metric_id
from hermricci.jets import JetError


def test_flat_torus_volume_is_exact():
    for n in (1, 2, 3):
        est = I.volume(parse_metric_id(f"flat:n={n}"), 1000, 0)
        assert est.lhs == pytest.approx(2.0**n)
        assert est.stderr_lhs == pytest.approx(0, abs=1e-12)


def test_hopf_volume_small_run():
    est = I.volume(parse_metric_id("hopf:n=2"), 50_000, 3)
    assert abs(est.lhs - hopf_volume(2)) < 3.5 * est.stderr_lhs
    assert est.samples == 50_000 and est.seed == 3


def test_weighted_volume_has_no_closed_form():
    est = I.volume(parse_metric_id("hopf:n=2~seed=1,kind=hopf"), 2000, 0)
    assert math.isnan(est.rhs)


def test_worker_count_does_not_change_result():
    spec = parse_metric_id("hopf:n=2~seed=2,kind=hopf")
    a = I.integrate(spec, I.ddbar_omega_density, 6000, 5, partitions=8, workers=1)
    b = I.integrate(spec, I.ddbar_omega_density, 6000, 5, partitions=8, workers=3)
    assert a.values == b.values and a.stderr == b.stderr


def test_seed_consistency():
    spec = parse_metric_id("hopf:n=2")
    a = I.volume(spec, 20_000, 1)
    b = I.volume(spec, 20_000, 2)
    assert a.lhs != b.lhs
    assert abs(a.lhs - b.lhs) < 6 * math.hypot(a.stderr_lhs, b.stderr_lhs)


def test_stderr_scales_like_inverse_sqrt():
    spec = parse_metric_id("hopf:n=2")
    a = I.volume(spec, 10_000, 4)
    b = I.volume(spec, 40_000, 4)
    assert b.stderr_lhs / a.stderr_lhs == pytest.approx(0.5, rel=0.2)


def test_constant_chern_scalar_integral():
    spec = parse_metric_id("hopf:n=2")
    t = I.integrate(spec, lambda j: {**I.scalar_densities(j), "volume": np.ones(j.batch_shape)}, 20_000, 0)
    assert t.values["s_C"] == pytest.approx(0.5 * t.values["volume"], rel=1e-12)


def test_hopf_surface_norms_agree():
    est, t = I.check_ddbar_omega(parse_metric_id("hopf:n=2"), 50_000, 0)
    assert abs(est.lhs) < 1e-9
    assert t.values["d_omega_sq"] == pytest.approx(t.values["dstar_omega_sq"], rel=0.01)


def test_kahler_sides_vanish():
    spec = parse_metric_id("flat:n=3")
    for est, _ in (I.check_ddbar_omega(spec, 2000, 0), I.check_torsion_wedge(spec, 2000, 0),
                   I.check_power(spec, 1, 2000, 0), I.check_power(spec, 2, 2000, 0)):
        assert est.lhs == 0 and est.rhs == 0 and est.residual == 0


def test_power_and_torsion_wedge_are_consistent():
    spec = parse_metric_id("hopf:n=3")
    tw, _ = I.check_torsion_wedge(spec, 20_000, 0)
    for k in (1, 2):
        est, _ = I.check_power(spec, k, 20_000, 0)
        c = math.factorial(spec.n - 3) * k * (spec.n - k - 1)
        assert est.lhs == pytest.approx(-c * tw.lhs, abs=1e-9 * abs(tw.lhs))


def test_integration_by_parts_on_non_homogeneous_metric():
    spec = parse_metric_id("hopf:n=3~seed=4,kind=hopf")
    est, _ = I.check_ddbar_omega(spec, 50_000, 7)
    assert abs(est.lhs - est.rhs) < 4 * math.hypot(est.stderr_lhs, est.stderr_rhs)
    assert abs(est.lhs) > 10 * est.stderr_lhs  # the check is not trivially 0 = 0
    tw, _ = I.check_torsion_wedge(spec, 50_000, 7)
    assert abs(tw.lhs - tw.rhs) < 4 * math.hypot(tw.stderr_lhs, tw.stderr_rhs)


def test_hopf_family_ddbar_identity():
    est, _ = I.check_ddbar_omega(parse_metric_id("hopf-family:n=3,lambda=1"), 50_000, 0)
    assert est.residual < 0.02


def test_balanced_diagnostic_hopf_surface():
    d = I.balanced_diagnostic(parse_metric_id("hopf:n=2"), 20_000, 0)
    assert d["ratio_s_C_over_s_LC"] == pytest.approx(2, rel=0.02)
    assert not d["all_balanced_hold"] and not d["all_kahler_hold"]
    t = d["totals"]
    assert t["s"] == pytest.approx(2 * t["s_C"] - 0.5 * t["torsion_norm_sq"], rel=0.02)
    assert t["s_C"] == pytest.approx(0.5 * hopf_volume(2), rel=0.02)


def test_balanced_diagnostic_flat_torus():
    d = I.balanced_diagnostic(parse_metric_id("flat:n=2"), 2000, 0)
    assert d["all_balanced_hold"] and d["all_kahler_hold"]


def test_errors():
    with pytest.raises(JetError):
        I.check_power(parse_metric_id("hopf:n=3"), 3, 100, 0)
    with pytest.raises(JetError):
        I.check_torsion_wedge(parse_metric_id("hopf:n=2"), 100, 0)
    with pytest.raises(JetError):
        I.volume(parse_metric_id("fubini-study:n=2"), 100, 0)
    with pytest.raises(ValueError):
        I.volume(parse_metric_id("hopf:n=2"), 1, 0)


def test_estimate_serialises():
    est = I.volume(parse_metric_id("flat:n=2"), 100, 9)
    assert set(est.as_dict()) == {"identity", "lhs", "rhs", "stderr_lhs", "stderr_rhs", "residual",
                                  "samples", "seed"}


def test_chunk_size_shrinks_with_dimension():
    assert I.chunk_size(2) == I.chunk_size(3) == I.CHUNK
    assert I.chunk_size(4) < I.CHUNK and I.chunk_size(10) >= 256
