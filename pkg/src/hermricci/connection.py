"""Levi-Civita connection induced on the holomorphic tangent bundle, and torsion.

Christoffel arrays are indexed with the upper index first:

``gamma[..., k, i, j]     = Gamma^k_{i j}``
``gamma_bar[..., k, i, j] = Gamma^k_{ibar j}``

with derivative arrays gaining one leading index for the direction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forms import PQForm
from .jets import Array, MetricJet2, MetricSpec, evaluate_jet, inverse_metric, numeric_jet


@dataclass(frozen=True)
class Christoffels:
    gamma: Array
    gamma_bar: Array


def christoffels(j: MetricJet2) -> Christoffels:
    G = inverse_metric(j)
    dh, dbh = j.dh, j.dbar_h
    gamma = 0.5 * np.einsum("...kl,...ijl->...kij", G, dh + np.swapaxes(dh, -3, -2))
    gamma_bar = 0.5 * np.einsum(
        "...kl,...ijl->...kij", G, dbh - np.einsum("...lji->...ijl", dbh)
    )
    return Christoffels(gamma, gamma_bar)


def inverse_derivatives(j: MetricJet2, G: Array):
    """``d_m h^{k lbar}`` and ``dbar_m h^{k lbar}``, both indexed ``[..., m, k, l]``."""
    d = -np.einsum("...kb,...mab,...al->...mkl", G, j.dh, G)
    db = -np.einsum("...kb,...mab,...al->...mkl", G, j.dbar_h, G)
    return d, db


def christoffel_derivatives(j: MetricJet2):
    """Return ``(dbar_gamma, d_gamma_bar)``.

    ``dbar_gamma[..., m, k, i, j] = dbar_m Gamma^k_{ij}`` and
    ``d_gamma_bar[..., m, k, i, j] = d_m Gamma^k_{ibar j}``.  Both need only
    the mixed second derivatives of the metric.
    """
    G = inverse_metric(j)
    dG, dbG = inverse_derivatives(j, G)
    dh, dbh, ddb = j.dh, j.dbar_h, j.ddbar_h
    sym = dh + np.swapaxes(dh, -3, -2)
    # dbar_m d_i h_{j lbar} = ddbar[i, m, j, l]
    dsym = np.einsum("...imjl->...mijl", ddb) + np.einsum("...jmil->...mijl", ddb)
    dbar_gamma = 0.5 * (np.einsum("...mkl,...ijl->...mkij", dbG, sym)
                        + np.einsum("...kl,...mijl->...mkij", G, dsym))
    skew = dbh - np.einsum("...lji->...ijl", dbh)
    # d_m dbar_i h_{j lbar} - d_m dbar_l h_{j ibar}
    dskew = ddb - np.einsum("...mlji->...mijl", ddb)
    d_gamma_bar = 0.5 * (np.einsum("...mkl,...ijl->...mkij", dG, skew)
                         + np.einsum("...kl,...mijl->...mkij", G, dskew))
    return dbar_gamma, d_gamma_bar


def holomorphic_christoffel_derivative(j: MetricJet2) -> Array:
    """``d_m Gamma^k_{ij}`` indexed ``[..., m, k, i, j]``; needs ``dd_h``."""
    G = inverse_metric(j)
    dG, _ = inverse_derivatives(j, G)
    dd = j.dd_h
    if dd is None:
        raise ValueError("holomorphic second derivatives required")
    sym = j.dh + np.swapaxes(j.dh, -3, -2)
    dsym = np.einsum("...imjl->...mijl", dd) + np.einsum("...jmil->...mijl", dd)
    return 0.5 * (np.einsum("...mkl,...ijl->...mkij", dG, sym)
                  + np.einsum("...kl,...mijl->...mkij", G, dsym))


def antiholomorphic_gamma_bar_derivative(j: MetricJet2) -> Array:
    """``dbar_m Gamma^k_{ibar j}`` indexed ``[..., m, k, i, j]``; needs ``dd_h``."""
    G = inverse_metric(j)
    _, dbG = inverse_derivatives(j, G)
    dbh, dbdb = j.dbar_h, j.dbdb_h
    skew = dbh - np.einsum("...lji->...ijl", dbh)
    dskew = dbdb - np.einsum("...mlji->...mijl", dbdb)
    return 0.5 * (np.einsum("...mkl,...ijl->...mkij", dbG, skew)
                  + np.einsum("...kl,...mijl->...mkij", G, dskew))


def torsion(j: MetricJet2) -> Array:
    """``T[..., k, i, j] = T^k_{ij}`` of the Chern connection."""
    G = inverse_metric(j)
    return np.einsum("...kl,...ijl->...kij", G, j.dh - np.swapaxes(j.dh, -3, -2))


def torsion_norm_sq(j: MetricJet2, T: Array | None = None) -> Array:
    T = torsion(j) if T is None else T
    G = inverse_metric(j)
    v = np.einsum("...mn,...ji,...lk,...mlj,...nki->...", j.h, G, G, T, np.conj(T))
    return np.real(v)


def torsion_box(j: MetricJet2, T: Array | None = None) -> Array:
    """Coefficients ``h^{p qbar} h_{k lbar} T^k_{ip} conj(T^l_{jq})`` as a herm11 matrix."""
    T = torsion(j) if T is None else T
    G = inverse_metric(j)
    return np.einsum("...pq,...kl,...kip,...ljq->...ij", G, j.h, T, np.conj(T))


def torsion_circ(j: MetricJet2, T: Array | None = None) -> Array:
    """Coefficients ``h^{p qbar} h^{s tbar} h_{k jbar} h_{i lbar} T^k_{sp} conj(T^l_{tq})``."""
    T = torsion(j) if T is None else T
    G = inverse_metric(j)
    return np.einsum("...pq,...st,...kj,...il,...ksp,...ltq->...ij",
                     G, G, j.h, j.h, T, np.conj(T), optimize=True)


def dstar_omega(j: MetricJet2, ch: Christoffels | None = None) -> Array:
    """Coefficients ``f_jbar`` of the (0,1)-form ``d^* omega = f_jbar dzbar^j``."""
    ch = christoffels(j) if ch is None else ch
    return -2j * np.einsum("...kjk->...j", ch.gamma_bar)


def dbarstar_omega(j: MetricJet2, ch: Christoffels | None = None) -> Array:
    """Coefficients of the (1,0)-form ``dbar^* omega``; the conjugate of ``d^* omega``."""
    return np.conj(dstar_omega(j, ch))


def dstar_norm_sq(j: MetricJet2) -> Array:
    f = dstar_omega(j)
    G = inverse_metric(j)
    return np.real(np.einsum("...kj,...j,...k->...", G, f, np.conj(f)))


def codiff_from_jet(j: MetricJet2) -> Array:
    """``(d d^* omega + dbar dbar^* omega) / 2`` as a herm11 matrix, from the 2-jet."""
    _, d_gamma_bar = christoffel_derivatives(j)
    D = np.einsum("...ikjk->...ij", d_gamma_bar)  # d_i Gamma^k_{jbar k}
    return -(D + np.conj(np.swapaxes(D, -1, -2)))


def codiff_second_order(spec: MetricSpec, z, mode: str = "analytic", step: float = 2e-3) -> Array:
    """``(d d^* omega + dbar dbar^* omega) / 2`` at ``z``.

    Analytic mode reads the mixed second derivatives of the metric.  Numeric
    mode differentiates the field ``d^* omega`` itself by Richardson-combined
    central differences, using first-order jets of the same mode.
    """
    z = np.asarray(z, dtype=complex)
    if mode == "analytic":
        return codiff_from_jet(evaluate_jet(spec, z, mode))
    n = spec.n

    evaluate_jet(spec, z, mode, order=1)  # region and positivity checks at the centre

    def field(w):
        return dstar_omega(numeric_jet(spec.metric, w, order=1))

    def deriv(t):
        cols = []
        for i in range(n):
            e = np.zeros(n, complex)
            e[i] = 1.0
            fx = (field(z + t * e) - field(z - t * e)) / (2 * t)
            fy = (field(z + 1j * t * e) - field(z - 1j * t * e)) / (2 * t)
            cols.append(0.5 * (fx - 1j * fy))
        return np.stack(cols, axis=-2)  # [..., i, j] = d_i f_jbar

    df = (4 * deriv(step / 2) - deriv(step)) / 3
    a = -1j * df  # herm11 of d(d^* omega)
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


def sharp(j: MetricJet2, f: Array) -> Array:
    """Vector ``v^i = h^{i sbar} f_sbar`` metric-dual to a (0,1)-form."""
    return np.einsum("...is,...s->...i", inverse_metric(j), f)


def flat(j: MetricJet2, v: Array) -> Array:
    """(0,1)-form ``f_sbar = h_{i sbar} v^i``; inverse of :func:`sharp`."""
    return np.einsum("...is,...i->...s", j.h, v)


def torsion_apply_vector(j: MetricJet2, v: Array, T: Array | None = None) -> Array:
    """The (1,1)-form ``h_{k jbar} T^k_{p i} v^p dz^i ^ dzbar^j`` as a herm11-normalised matrix."""
    T = torsion(j) if T is None else T
    c = np.einsum("...kj,...kpi,...p->...ij", j.h, T, v)
    return -1j * c


def dstar_vector(j: MetricJet2) -> Array:
    return sharp(j, dstar_omega(j))


def d_omega(j: MetricJet2) -> PQForm:
    """The (2,1)-form ``d omega``."""
    c = 1j * (j.dh - np.swapaxes(j.dh, -3, -2))
    return PQForm(2, 1, j.n, c)


def dbar_omega(j: MetricJet2) -> PQForm:
    """The (1,2)-form ``dbar omega``."""
    dbh = j.dbar_h  # [q, k, l]
    c = -1j * (np.einsum("...qkl->...kql", dbh) - np.einsum("...lkq->...kql", dbh))
    return PQForm(1, 2, j.n, c)


def d_dbarstar_omega(j: MetricJet2) -> PQForm:
    """The (2,0)-form ``d (dbar^* omega)``; needs ``dd_h``."""
    db_gb = antiholomorphic_gamma_bar_derivative(j)  # dbar_m Gamma^k_{ibar j}
    trace = np.einsum("...mkik->...mi", db_gb)       # dbar_m Gamma^k_{ibar k}
    dg = 2j * np.conj(trace)                         # d_m g_i, g_i = 2i conj(Gamma^k_{ibar k})
    return PQForm(2, 0, j.n, dg - np.swapaxes(dg, -1, -2))
