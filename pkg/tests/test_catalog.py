import math

import numpy as np
import pytest

from hermricci.catalog import (
    CATALOG,
    HopfAnnulus,
    TorusCell,
    default_ids,
    hopf_volume,
    parse_metric_id,
    predicted_scalar,
)
from hermricci.jets import JetError, evaluate_jet


@pytest.mark.parametrize("metric_id", default_ids())
def test_default_ids_parse_and_sample(metric_id, rng):
    spec = parse_metric_id(metric_id)
    z = spec.sample(rng, 8)
    assert z.shape == (8, spec.n)
    if spec.region is not None:
        assert spec.region(z).all()
    j = evaluate_jet(spec, z)
    assert np.linalg.eigvalsh(j.h).min() > 0


def test_families_listed():
    assert set(CATALOG) == {"hopf", "hopf-family", "flat", "fubini-study", "random-poly"}


def test_hopf_metric_at_unit_vector():
    for n in (2, 3, 4):
        z = np.zeros(n, complex)
        z[0] = 1
        assert np.allclose(parse_metric_id(f"hopf:n={n}").metric(z), 4 * np.eye(n))


def test_hopf_is_scale_covariant(rng):
    spec = parse_metric_id("hopf-family:n=3,lambda=0.4")
    z = spec.sample(rng, 5)
    # invariance under z -> 2z means h(2z) = h(z)/4 in these coordinates
    assert np.allclose(spec.metric(2 * z), spec.metric(z) / 4)


def test_fraction_parameters():
    a = parse_metric_id("hopf-family:n=2,lambda=-1/2")
    b = parse_metric_id("hopf-family:n=2,lambda=-0.5")
    assert a.params["lambda"] == b.params["lambda"] == -0.5


@pytest.mark.parametrize("bad", ["", "foo:n=2", "hopf:n=1", "hopf:n=x", "hopf:n2",
                                 "hopf-family:n=2,lambda=-1", "hopf-family:n=2,lambda=1/0",
                                 "flat:n=2~seed=1,kind=zz", "flat:n=2~seed=q"])
def test_bad_ids(bad):
    with pytest.raises(JetError):
        parse_metric_id(bad)


def test_weighted_and_product_ids(rng):
    w = parse_metric_id("hopf:n=2~seed=3,amp=0.1")
    assert w.params["weighted"] and w.domain is not None
    p = parse_metric_id("hopf:n=2*flat:n=1")
    assert p.n == 3 and p.params["family"] == "product"
    assert p.domain.lebesgue_volume == pytest.approx(HopfAnnulus(2).lebesgue_volume)
    assert not p.kahler
    assert parse_metric_id("flat:n=1*fubini-study:n=1").kahler


def test_domains_sample_inside(rng):
    z = HopfAnnulus(3).sample(rng, 1000)
    r = np.linalg.norm(z, axis=1)
    assert r.min() >= 1 and r.max() < 2
    x = TorusCell(2).sample(rng, 1000)
    assert (x.real >= 0).all() and (x.imag < 1).all()


def test_hopf_shell_radial_law(rng):
    # density proportional to r^(2n-1): P(r < rho) = (rho^(2n) - 1) / (2^(2n) - 1)
    n = 2
    r = np.linalg.norm(HopfAnnulus(n).sample(rng, 200_000), axis=1)
    rho = 1.5
    expect = (rho ** (2 * n) - 1) / (2 ** (2 * n) - 1)
    assert np.mean(r < rho) == pytest.approx(expect, abs=5e-3)


def test_hopf_volume_closed_form():
    assert hopf_volume(2) == pytest.approx(128 * math.pi**2 * math.log(2))


def test_predicted_scalar_landmarks():
    assert predicted_scalar(2, -0.75) == pytest.approx(0)
    assert predicted_scalar(2, -0.5) == pytest.approx(1)
    assert predicted_scalar(2, -7 / 8) == pytest.approx(-8)
    for n in (2, 3, 4):
        assert predicted_scalar(n, (1 - n) / n) == pytest.approx(n * n * (n - 1) / 4)


def test_sampler_is_seeded():
    spec = parse_metric_id("random-poly:n=2,seed=1")
    a = spec.sample(np.random.default_rng(3), 4)
    b = spec.sample(np.random.default_rng(3), 4)
    assert np.array_equal(a, b)
    assert parse_metric_id("random-poly:n=2,seed=1").metric(a[0]) == pytest.approx(spec.metric(a[0]))
