"""Pointwise identity residuals linking the curvature quantities.

Every residual is ``max |lhs - rhs| / max(1, max |lhs|, max |rhs|)`` per
point, so it is absolute for quantities of order one and relative for large
ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import forms as F
from .connection import (
    codiff_from_jet,
    codiff_second_order,
    dbar_omega,
    dstar_norm_sq,
    dstar_omega,
    dstar_vector,
    torsion,
    torsion_apply_vector,
    torsion_box,
    torsion_circ,
    torsion_norm_sq,
)
from .curvature import (
    Curvatures,
    bianchi_defect,
    chern_ricci_logdet,
    complex_frame,
    complex_structure,
    complexify,
    pair_symmetry_defect,
    real_ricci,
    real_riemann,
    real_scalar,
    star_ricci,
    star_ricci_complex,
)
from .jets import Array, MetricSpec, evaluate_jet

ANALYTIC_TOL = 1e-8
NUMERIC_TOL = 1e-4


def _res(lhs, rhs, batch_ndim: int) -> Array:
    lhs, rhs = np.broadcast_arrays(np.asarray(lhs), np.asarray(rhs))
    axes = tuple(range(batch_ndim, lhs.ndim))
    diff = np.abs(lhs - rhs).max(axis=axes) if axes else np.abs(lhs - rhs)
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    scale = scale.max(axis=axes) if axes else scale
    return diff / np.maximum(1.0, scale)


def herm(a: Array) -> Array:
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


@dataclass(frozen=True)
class PointQuantities:
    """Everything the suite compares, evaluated once per batch of points."""

    jet: object
    curv: Curvatures
    ricci: object
    scalars: object
    codiff: Array
    box: Array
    circ: Array
    lam_ddbar: Array
    torsion_vector: Array
    torsion_norm_sq: Array
    dstar_norm_sq: Array

    @classmethod
    def of(cls, spec: MetricSpec, z, mode: str = "analytic") -> "PointQuantities":
        j = evaluate_jet(spec, z, mode)
        cv = Curvatures.of(j)
        G = cv.G
        T = torsion(j)
        if mode == "numeric":
            codiff = codiff_second_order(spec, z, mode)
        else:
            codiff = codiff_from_jet(j)
        ddw = F.kahler_form_jet(j).ddbar_form()
        lam = F.form_to_herm11(F.contract_lambda(ddw, G).scale(1j)) if j.n >= 2 else np.zeros_like(j.h)
        return cls(j, cv, cv.ricci(), cv.scalars(), codiff,
                   torsion_box(j, T), torsion_circ(j, T), lam,
                   herm(torsion_apply_vector(j, dstar_vector(j), T)),
                   torsion_norm_sq(j, T), dstar_norm_sq(j))


def ricci_relations(q: PointQuantities) -> dict:
    """The Ricci-form relations, as (lhs, rhs) pairs of herm11 matrices."""
    r = q.ricci
    c1, C, box, circ, lam = r.chern1, q.codiff, q.box, q.circ, q.lam_ddbar
    return {
        "lc-ricci-first": (r.lc1, c1 - C),
        "lc-ricci-second": (r.lc2, c1 - C - circ / 4 + box / 4),
        "chern-ricci-second": (r.chern2, c1 - lam - 2 * C + box),
        "hermitian-ricci": (r.ric_h, c1 - C - circ / 4),
        "riemannian-ricci": (r.ric_r, c1 - lam - C + (2 * box + circ) / 4 + q.torsion_vector),
        # implied by the others; kept as an independent consistency residual
        "ricci-sum": (r.lc1 + r.lc2, c1 + r.chern2 + lam - (circ + 3 * box) / 4),
    }


def printed_chern_second_rhs(q: PointQuantities) -> Array:
    """Right side of the second Chern-Ricci relation with the coefficient ``(T.T + 3 T#T)/4``.

    Kept only to document that this coefficient does not reproduce the
    curvature of non-Kähler metrics; the suite uses ``T#T`` instead.
    """
    r = q.ricci
    return r.chern1 - q.lam_ddbar - 2 * q.codiff + (q.circ + 3 * q.box) / 4


def printed_ricci_sum_rhs(q: PointQuantities) -> Array:
    """Right side of the Ricci sum relation with the coefficient ``(T.T + T#T)/2``; see above."""
    r = q.ricci
    return r.chern1 + r.chern2 + q.lam_ddbar - (q.circ + q.box) / 2


def scalar_relations(q: PointQuantities) -> dict:
    G = q.curv.G
    s = q.scalars
    C2 = 2 * np.real(F.trace_herm11(q.codiff, G))
    T2, D2 = q.torsion_norm_sq, q.dstar_norm_sq
    lam_tr = np.real(F.trace_herm11(q.lam_ddbar, G))
    return {
        "torsion-trace": (T2, lam_tr + C2),
        "scalar-riemannian": (s.s, 2 * s.s_C + (C2 - 2 * D2) - T2 / 2),
        "scalar-lc": (s.s_LC, s.s_C - C2 / 2),
        "scalar-hermitian": (s.s_H, s.s_C - C2 / 2 - T2 / 4),
        "scalar-riemann-type": (s.s_R, s.s_C - D2 / 2 - T2 / 4),
        "scalar-combination": (s.s, 4 * s.s_R - 2 * s.s_H),
        "torsion-vector-trace": (np.real(F.trace_herm11(q.torsion_vector, G)), -D2),
    }


def structural_relations(q: PointQuantities, rng: np.random.Generator | None = None) -> dict:
    """Relations checked through the real-coordinate route, plus symmetries."""
    j = q.jet
    n = j.n
    Rr, g = real_riemann(j)
    Rc = complexify(Rr)
    P = complex_frame(n)
    ric_c = np.einsum("...ab,aA,bB->...AB", real_ricci(Rr, g), P, P)
    M = star_ricci(j, Rr, g)
    J = complex_structure(n)
    gi = np.linalg.inv(g)
    rng = np.random.default_rng(0) if rng is None else rng
    X = rng.standard_normal(q.jet.batch_shape + (2 * n,))
    Y = rng.standard_normal(q.jet.batch_shape + (2 * n,))
    ric_xy = np.einsum("...a,...ab,...b->...", X, M, Y)
    f = dstar_omega(j)
    from_forms = -1j * F.contract_lambda(dbar_omega(j), q.curv.G).coeffs
    zero = np.zeros(q.jet.batch_shape)
    return {
        "riemann-real-route": (q.curv.riemann, Rc[..., :n, n:, :n, n:]),
        "ricci-real-route": (q.ricci.ric_r, ric_c[..., :n, n:]),
        "scalar-real-route": (q.scalars.s, real_scalar(Rr, g)),
        "chern-ricci-logdet": (q.ricci.chern1, chern_ricci_logdet(j)),
        "bianchi": (bianchi_defect(j, q.curv.riemann, Rc), zero),
        "pair-symmetry": (pair_symmetry_defect(q.curv.riemann), zero),
        "star-scalar": (np.einsum("...ab,...ab->...", gi, M), 2 * q.scalars.s_H),
        "star-ricci-j-symmetry": (M, np.einsum("ba,...cb,cd->...ad", J, M, J)),
        "star-ricci-complex": (ric_xy, star_ricci_complex(j, X, Y, Rc)),
        "dstar-contraction": (f, from_forms),
    }


def kahler_relations(q: PointQuantities) -> dict:
    """For Kähler metrics: vanishing torsion and all six Ricci forms equal to the first Chern one."""
    r = q.ricci.as_dict()
    out = {"kahler-torsion": (torsion(q.jet), np.zeros_like(torsion(q.jet)))}
    for name in ("chern2", "lc1", "lc2", "ric_h", "ric_r"):
        out[f"kahler-{name.replace('_', '-')}-equals-chern1"] = (r[name], r["chern1"])
    return out


def run_suite(spec: MetricSpec, z, mode: str = "analytic", structural: bool = True) -> dict:
    """Residual per identity and point, for a batch of chart points ``z``.

    Kähler entries of the catalog additionally get :func:`kahler_relations`.
    """
    z = np.asarray(z, dtype=complex)
    q = PointQuantities.of(spec, z, mode)
    nb = z.ndim - 1
    pairs = {**ricci_relations(q), **scalar_relations(q)}
    if structural:
        pairs.update(structural_relations(q))
    if spec.kahler:
        pairs.update(kahler_relations(q))
    return {k: _res(a, b, nb) for k, (a, b) in pairs.items()}


def tolerance(mode: str) -> float:
    return ANALYTIC_TOL if mode == "analytic" else NUMERIC_TOL


def random_points(spec: MetricSpec, count: int, seed: int) -> Array:
    return spec.sample(np.random.default_rng(seed), count)
