"""Chern, Levi-Civita and Riemannian curvature of a Hermitian metric.

Four-index tensors are stored as ``R[..., i, j, k, l] = R_{i jbar k lbar}``.
Ricci-type forms are herm11 matrices.

Besides the holomorphic-frame formulas, this module has an independent
route through real coordinates: the real metric ``g`` is rebuilt from ``h``,
its Riemann tensor is computed from ordinary Christoffel symbols, and the
result is complexified by a change of frame.  That route supplies the
components of mixed type (two holomorphic slots in the first pair), which
the holomorphic-frame formulas cannot produce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connection import (
    christoffel_derivatives,
    christoffels,
    inverse_derivatives,
)
from .jets import Array, MetricJet2, inverse_metric


def chern_curvature(j: MetricJet2) -> Array:
    G = inverse_metric(j)
    quad = np.einsum("...pq,...jpl,...ikq->...ijkl", G, j.dbar_h, j.dh)
    return -j.ddbar_h + quad


def lc_curvature_up(j: MetricJet2) -> Array:
    """``r[..., i, j, k, l] = rr^l_{i jbar k}`` of the induced Levi-Civita connection."""
    ch = christoffels(j)
    dbar_gamma, d_gamma_bar = christoffel_derivatives(j)
    t1 = np.einsum("...jlik->...ijkl", dbar_gamma)
    t2 = np.einsum("...iljk->...ijkl", d_gamma_bar)
    t3 = np.einsum("...sik,...ljs->...ijkl", ch.gamma, ch.gamma_bar)
    t4 = np.einsum("...sjk,...lsi->...ijkl", ch.gamma_bar, ch.gamma)
    return -(t1 - t2 + t3 - t4)


def lc_curvature(j: MetricJet2) -> Array:
    return np.einsum("...ijks,...sl->...ijkl", lc_curvature_up(j), j.h)


def riemann_complexified(j: MetricJet2, lc: Array | None = None) -> Array:
    """``R_{i jbar k lbar}`` of the Riemannian curvature, from the induced connection."""
    lc = lc_curvature(j) if lc is None else lc
    gb = christoffels(j).gamma_bar
    corr = np.einsum("...pl,...psi,...skj->...ijkl", j.h, gb, np.conj(gb))
    return lc + corr


def first_trace(G: Array, R: Array) -> Array:
    """``h^{k lbar} R_{i jbar k lbar}``."""
    return np.einsum("...kl,...ijkl->...ij", G, R)


def second_trace(G: Array, R: Array) -> Array:
    """``h^{k lbar} R_{k lbar i jbar}``."""
    return np.einsum("...kl,...klij->...ij", G, R)


def chern_ricci_logdet(j: MetricJet2) -> Array:
    """``-d_i dbar_j log det h`` from the jet."""
    G = inverse_metric(j)
    dG, _ = inverse_derivatives(j, G)
    return -(np.einsum("...ikl,...jkl->...ij", dG, j.dbar_h)
             + np.einsum("...kl,...ijkl->...ij", G, j.ddbar_h))


@dataclass(frozen=True)
class RicciSet:
    chern1: Array
    chern2: Array
    lc1: Array
    lc2: Array
    ric_h: Array
    ric_r: Array

    FIELDS = ("chern1", "chern2", "lc1", "lc2", "ric_h", "ric_r")

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.FIELDS}


@dataclass(frozen=True)
class ScalarSet:
    s: Array
    s_C: Array
    s_LC: Array
    s_H: Array
    s_R: Array

    FIELDS = ("s", "s_C", "s_LC", "s_H", "s_R")

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.FIELDS}


@dataclass(frozen=True)
class Curvatures:
    """All four-index tensors at once, so the expensive pieces are shared."""

    chern: Array
    lc: Array
    riemann: Array
    G: Array

    @classmethod
    def of(cls, j: MetricJet2) -> "Curvatures":
        lc = lc_curvature(j)
        return cls(chern_curvature(j), lc, riemann_complexified(j, lc), inverse_metric(j))

    def ricci(self) -> RicciSet:
        G, R = self.G, self.riemann
        ric_h = first_trace(G, R)
        ric_r = 2 * np.einsum("...kl,...kjil->...ij", G, R) - ric_h
        return RicciSet(
            first_trace(G, self.chern), second_trace(G, self.chern),
            first_trace(G, self.lc), second_trace(G, self.lc),
            ric_h, ric_r,
        )

    def scalars(self) -> ScalarSet:
        G, R = self.G, self.riemann
        s_h = np.einsum("...ij,...kl,...ijkl->...", G, G, R)
        s_r = np.einsum("...il,...kj,...ijkl->...", G, G, R)
        mixed = np.einsum("...ij,...kl,...ilkj->...", G, G, R)
        s = 2 * (2 * mixed - s_h)
        s_c = np.einsum("...ij,...kl,...ijkl->...", G, G, self.chern)
        s_lc = np.einsum("...ij,...kl,...ijkl->...", G, G, self.lc)
        return ScalarSet(*(np.real(x) for x in (s, s_c, s_lc, s_h, s_r)))


def ricci_set(j: MetricJet2) -> RicciSet:
    return Curvatures.of(j).ricci()


def scalar_set(j: MetricJet2) -> ScalarSet:
    return Curvatures.of(j).scalars()


# --- real-coordinate route -------------------------------------------------

def _wirtinger_rows(n: int) -> Array:
    """``W[a, p]``: coefficient of ``d_p`` in the real derivative ``d/dx^a``."""
    W = np.zeros((2 * n, n), complex)
    W[:n] = np.eye(n)
    W[n:] = 1j * np.eye(n)
    return W


def _real_from_h(a: Array) -> Array:
    """Real metric block matrix ``2 [[Re h, Im h], [-Im h, Re h]]`` on the last two axes."""
    A, B = a.real, a.imag
    top = np.concatenate([A, B], axis=-1)
    bot = np.concatenate([-B, A], axis=-1)
    return 2 * np.concatenate([top, bot], axis=-2)


def real_metric_jet(j: MetricJet2):
    """Real metric ``g`` with its first and second coordinate derivatives."""
    n = j.n
    W = _wirtinger_rows(n)
    Wc = np.conj(W)
    dh_r = np.einsum("ap,...pij->...aij", W, j.dh) + np.einsum("ap,...pij->...aij", Wc, j.dbar_h)
    ddb = j.ddbar_h
    d2 = (np.einsum("ap,bq,...pqij->...abij", W, W, j.dd_h)
          + np.einsum("ap,bq,...pqij->...abij", W, Wc, ddb)
          + np.einsum("ap,bq,...qpij->...abij", Wc, W, ddb)
          + np.einsum("ap,bq,...pqij->...abij", Wc, Wc, j.dbdb_h))
    return _real_from_h(j.h), _real_from_h(dh_r), _real_from_h(d2)


def real_riemann(j: MetricJet2):
    """``R(d_a, d_b, d_c, d_d) = g(R(d_a, d_b) d_c, d_d)`` in real coordinates, and ``g``."""
    g, dg, d2g = real_metric_jet(j)
    gi = np.linalg.inv(g)
    # first-kind symbols  [b c, d] = (d_b g_dc + d_c g_db - d_d g_bc) / 2
    first = 0.5 * (np.einsum("...bdc->...bcd", dg) + np.einsum("...cdb->...bcd", dg)
                   - np.einsum("...dbc->...bcd", dg))
    gam = np.einsum("...ad,...bcd->...abc", gi, first)
    dfirst = 0.5 * (np.einsum("...ebdc->...ebcd", d2g) + np.einsum("...ecdb->...ebcd", d2g)
                    - np.einsum("...edbc->...ebcd", d2g))
    dgi = -np.einsum("...ai,...eij,...jd->...ead", gi, dg, gi)
    dgam = (np.einsum("...ead,...bcd->...eabc", dgi, first)
            + np.einsum("...ad,...ebcd->...eabc", gi, dfirst))
    # R(d_a, d_b) d_c = (d_a Gam^e_bc - d_b Gam^e_ac + Gam^f_bc Gam^e_af - Gam^f_ac Gam^e_bf) d_e
    up = (np.einsum("...aebc->...abce", dgam) - np.einsum("...beac->...abce", dgam)
          + np.einsum("...fbc,...eaf->...abce", gam, gam)
          - np.einsum("...fac,...ebf->...abce", gam, gam))
    return np.einsum("...abce,...ed->...abcd", up, g), g


def complex_frame(n: int) -> Array:
    """``P[a, A]``: real components of ``d/dz^k`` (A = k) and ``d/dzbar^k`` (A = n + k)."""
    P = np.zeros((2 * n, 2 * n), complex)
    eye = np.eye(n)
    P[:n, :n] = 0.5 * eye
    P[n:, :n] = -0.5j * eye
    P[:n, n:] = 0.5 * eye
    P[n:, n:] = 0.5j * eye
    return P


def complexify(Rr: Array) -> Array:
    n = Rr.shape[-1] // 2
    P = complex_frame(n)
    return np.einsum("...abcd,aA,bB,cC,dD->...ABCD", Rr, P, P, P, P, optimize=True)


def real_ricci(Rr: Array, g: Array) -> Array:
    gi = np.linalg.inv(g)
    return np.einsum("...cd,...cabd->...ab", gi, Rr)


def real_scalar(Rr: Array, g: Array) -> Array:
    return np.einsum("...ab,...ab->...", np.linalg.inv(g), real_ricci(Rr, g))


def complex_structure(n: int) -> Array:
    """Matrix of ``J`` on real components: ``J d/dx^i = d/dy^i``."""
    J = np.zeros((2 * n, 2 * n))
    J[n:, :n] = np.eye(n)
    J[:n, n:] = -np.eye(n)
    return J


def star_ricci(j: MetricJet2, Rr: Array | None = None, g: Array | None = None) -> Array:
    """Matrix of ``Ric*(X, Y) = sum_a R(e_a, X, JY, J e_a)`` in real coordinates."""
    if Rr is None:
        Rr, g = real_riemann(j)
    J = complex_structure(j.n)
    gi = np.linalg.inv(g)
    return np.einsum("...cd,...caef,eb,fd->...ab", gi, Rr, J, J)


def star_ricci_complex(j: MetricJet2, X: Array, Y: Array, Rc: Array | None = None) -> Array:
    """``i h^{k lbar} R(d_k, d_lbar, X, JY)`` with ``X``, ``Y`` given by real components."""
    if Rc is None:
        Rc = complexify(real_riemann(j)[0])
    n = j.n
    J = complex_structure(n)
    JY = np.einsum("ab,...b->...a", J, Y)
    xc = _to_complex_components(X, n)
    yc = _to_complex_components(JY, n)
    G = inverse_metric(j)
    block = Rc[..., :n, n:, :, :]
    return 1j * np.einsum("...kl,...klAB,...A,...B->...", G, block, xc, yc)


def _to_complex_components(X: Array, n: int) -> Array:
    xi = X[..., :n] + 1j * X[..., n:]
    return np.concatenate([xi, np.conj(xi)], axis=-1)


def star_scalar(j: MetricJet2) -> Array:
    Rr, g = real_riemann(j)
    return np.einsum("...ab,...ab->...", np.linalg.inv(g), star_ricci(j, Rr, g))


def bianchi_defect(j: MetricJet2, R: Array | None = None, Rc: Array | None = None) -> Array:
    """Largest entry of ``R_{i jbar k lbar} + R_{i k lbar jbar} + R_{i lbar jbar k}``.

    The first term is the holomorphic-frame tensor; the mixed-type terms come
    from the real route.
    """
    R = riemann_complexified(j) if R is None else R
    Rc = complexify(real_riemann(j)[0]) if Rc is None else Rc
    n = j.n
    hol, anti = slice(0, n), slice(n, 2 * n)
    mixed = np.einsum("...iklj->...ijkl", Rc[..., hol, hol, anti, anti])
    third = np.einsum("...iljk->...ijkl", Rc[..., hol, anti, anti, hol])
    return np.abs(R + mixed + third).max(axis=(-1, -2, -3, -4))


def pair_symmetry_defect(R: Array) -> Array:
    return np.abs(R - np.einsum("...klij->...ijkl", R)).max(axis=(-1, -2, -3, -4))
