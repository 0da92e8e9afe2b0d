"""Second-order jets of Hermitian metrics in a holomorphic chart.

A metric is stored by its coefficient matrix ``h[..., i, j] = h_{i jbar}``.
Derivative arrays put the derivative indices first, then the two metric
indices:

``dh[..., p, i, j]          = d_p h_{i jbar}``
``ddbar_h[..., p, q, i, j]  = d_p dbar_q h_{i jbar}``
``dd_h[..., p, q, i, j]     = d_p d_q h_{i jbar}``

Antiholomorphic first derivatives are never stored; they follow from
Hermitian symmetry, ``dbar_q h_{i jbar} = conj(d_q h_{j ibar})``.  Every array
may carry arbitrary leading batch axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

Array = np.ndarray

STEPS = (1e-4, 5e-5)
# second differences divide by t^2, so they need larger steps to keep round-off down
SECOND_STEPS = (2e-3, 1e-3)
POSITIVITY_RATIO = 1e-10


class JetError(ValueError):
    """Raised when a metric cannot be evaluated at a point."""


@dataclass(frozen=True)
class MetricJet2:
    h: Array
    dh: Array
    ddbar_h: Array
    dd_h: Optional[Array] = None

    @property
    def n(self) -> int:
        return self.h.shape[-1]

    @property
    def batch_shape(self) -> tuple:
        return self.h.shape[:-2]

    @property
    def dbar_h(self) -> Array:
        """``dbar_q h_{i jbar}`` indexed ``[..., q, i, j]``."""
        return np.conj(np.swapaxes(self.dh, -1, -2))

    @property
    def dbdb_h(self) -> Array:
        """``dbar_p dbar_q h_{i jbar}`` indexed ``[..., p, q, i, j]``."""
        if self.dd_h is None:
            raise JetError("holomorphic second derivatives are not available")
        return np.conj(np.swapaxes(self.dd_h, -1, -2))


JetFn = Callable[[Array], tuple]
MetricFn = Callable[[Array], Array]
SamplerFn = Callable[[np.random.Generator, int], Array]
RegionFn = Callable[[Array], Array]


@dataclass(frozen=True)
class MetricSpec:
    """A Hermitian metric on a chart, optionally with closed-form jets.

    ``metric`` maps points of shape ``(..., n)`` to ``(..., n, n)``.  ``jet``,
    when present, returns ``(h, dh, ddbar_h, dd_h)``.  ``region`` returns a
    boolean mask of points inside the chart and ``sampler`` draws random
    chart points.  ``domain`` is the integration domain, if any.
    """

    name: str
    n: int
    metric: MetricFn
    jet: Optional[JetFn] = None
    region: Optional[RegionFn] = None
    sampler: Optional[SamplerFn] = None
    domain: object = None
    params: dict = field(default_factory=dict)
    kahler: bool = False

    def sample(self, rng: np.random.Generator, m: int) -> Array:
        if self.sampler is None:
            raise JetError(f"{self.name} has no point sampler")
        return self.sampler(rng, m)


def as_points(z, n: int) -> Array:
    z = np.asarray(z, dtype=complex)
    if z.shape[-1:] != (n,):
        raise JetError(f"expected points with trailing dimension {n}, got shape {z.shape}")
    return z


def inverse_metric(j: MetricJet2 | Array) -> Array:
    """Return ``G[..., i, l] = h^{i lbar}``, defined by ``h^{i lbar} h_{k lbar} = delta``."""
    h = j.h if isinstance(j, MetricJet2) else j
    return np.swapaxes(np.linalg.inv(h), -1, -2)


def check_positive(h: Array) -> None:
    if not np.all(np.isfinite(h)):
        raise JetError("metric is not finite at the requested point")
    ev = np.linalg.eigvalsh(0.5 * (h + np.conj(np.swapaxes(h, -1, -2))))
    lo, hi = ev[..., 0], ev[..., -1]
    if np.any(lo < POSITIVITY_RATIO * np.abs(hi)) or np.any(hi <= 0):
        raise JetError("metric is not positive definite at the requested point")


def _check_region(spec: MetricSpec, z: Array) -> None:
    if spec.region is not None and not np.all(spec.region(z)):
        raise JetError(f"point outside the chart of {spec.name}")


def _hermitize(a: Array) -> Array:
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


def _real_shifts(n: int) -> Array:
    """Unit displacements along x^1..x^n, y^1..y^n as complex vectors."""
    eye = np.eye(n, dtype=complex)
    return np.concatenate([eye, 1j * eye])


def _central(metric: MetricFn, z: Array, t: float, order: int):
    n = z.shape[-1]
    e = _real_shifts(n)
    m = 2 * n
    f0 = metric(z)
    plus = [metric(z + t * e[a]) for a in range(m)]
    minus = [metric(z - t * e[a]) for a in range(m)]
    d1 = np.stack([(plus[a] - minus[a]) / (2 * t) for a in range(m)], axis=-3)
    if order < 2:
        return d1, None
    rows = []
    for a in range(m):
        row = []
        for b in range(m):
            if a == b:
                row.append((plus[a] - 2 * f0 + minus[a]) / t**2)
            elif b < a:
                row.append(None)
            else:
                pp = metric(z + t * (e[a] + e[b]))
                pm = metric(z + t * (e[a] - e[b]))
                mp = metric(z - t * (e[a] - e[b]))
                mm = metric(z - t * (e[a] + e[b]))
                row.append((pp - pm - mp + mm) / (4 * t**2))
        rows.append(row)
    for a in range(m):
        for b in range(a):
            rows[a][b] = rows[b][a]
    d2 = np.stack([np.stack(r, axis=-3) for r in rows], axis=-4)
    return d1, d2


def _richardson(metric: MetricFn, z: Array, steps, order: int):
    big, small = steps
    ratio = (big / small) ** 2
    a = _central(metric, z, big, order)
    b = _central(metric, z, small, order)
    return [None if x is None else (ratio * y - x) / (ratio - 1) for x, y in zip(a, b)]


def numeric_jet(metric: MetricFn, z: Array, order: int = 2, steps=STEPS,
                second_steps=SECOND_STEPS) -> MetricJet2:
    """Richardson-combined central differences in the real coordinates."""
    d1, _ = _richardson(metric, z, steps, 1)
    n = z.shape[-1]
    dx, dy = d1[..., :n, :, :], d1[..., n:, :, :]
    dh = 0.5 * (dx - 1j * dy)
    h = _hermitize(metric(z))
    if order < 2:
        return MetricJet2(h, dh, np.zeros(dh.shape[:-3] + (n,) + dh.shape[-3:], dtype=complex))
    _, d2 = _richardson(metric, z, second_steps, 2)
    xx = d2[..., :n, :n, :, :]
    xy = d2[..., :n, n:, :, :]
    yx = d2[..., n:, :n, :, :]
    yy = d2[..., n:, n:, :, :]
    ddbar = 0.25 * (xx + 1j * xy - 1j * yx + yy)
    dd = 0.25 * (xx - 1j * xy - 1j * yx - yy)
    # restore the exact symmetries the differences only approximate
    ddbar = 0.5 * (ddbar + np.conj(np.swapaxes(np.swapaxes(ddbar, -3, -4), -1, -2)))
    dd = 0.5 * (dd + np.swapaxes(dd, -3, -4))
    return MetricJet2(h, dh, ddbar, dd)


def evaluate_jet(spec: MetricSpec, z, mode: str = "analytic", order: int = 2) -> MetricJet2:
    """Evaluate the 2-jet of ``spec`` at chart points ``z``.

    ``mode`` is ``"analytic"`` (closed forms, falling back to numeric when the
    spec has none) or ``"numeric"``.  Raises ``JetError`` outside the chart or
    where the metric fails the positivity test.
    """
    z = as_points(z, spec.n)
    _check_region(spec, z)
    if mode not in ("analytic", "numeric"):
        raise JetError(f"unknown jet mode {mode!r}")
    if mode == "analytic" and spec.jet is not None:
        h, dh, ddbar, dd = spec.jet(z)
        jet = MetricJet2(np.asarray(h, complex), np.asarray(dh, complex),
                         np.asarray(ddbar, complex), np.asarray(dd, complex))
    else:
        jet = numeric_jet(spec.metric, z, order=order)
    check_positive(jet.h)
    return jet


def jet_symmetry_defect(j: MetricJet2) -> float:
    """Largest violation of the symmetries every 2-jet must satisfy."""
    herm = np.abs(j.h - np.conj(np.swapaxes(j.h, -1, -2))).max()
    mixed = np.conj(np.swapaxes(np.swapaxes(j.ddbar_h, -3, -4), -1, -2))
    out = max(herm, np.abs(j.ddbar_h - mixed).max())
    if j.dd_h is not None:
        out = max(out, np.abs(j.dd_h - np.swapaxes(j.dd_h, -3, -4)).max())
    return float(out)
