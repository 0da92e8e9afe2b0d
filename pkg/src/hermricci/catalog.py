"""Named metrics with closed-form jets, and their known curvature values.

Metric ids look like ``hopf:n=2``, ``hopf-family:n=3,lambda=-0.5``,
``flat:n=2``, ``fubini-study:n=2`` or ``random-poly:n=3,seed=4``.  A
``~seed=3,amp=0.2`` suffix multiplies a metric by ``exp(f)`` for a random
smooth weight ``f`` (``kind=hopf`` picks a weight invariant under
``z -> 2z``), and ``*`` joins factors into a product metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jets import Array, JetError, MetricSpec

HOPF_R_MIN, HOPF_R_MAX = 1.0, 2.0


# --- integration domains ---------------------------------------------------

@dataclass(frozen=True)
class HopfAnnulus:
    """The shell ``1 <= |z| < 2`` in C^n, a fundamental domain of the Hopf quotient."""

    n: int

    @property
    def lebesgue_volume(self) -> float:
        d = 2 * self.n
        sphere = 2 * math.pi ** self.n / math.gamma(self.n)
        return sphere * (HOPF_R_MAX ** d - HOPF_R_MIN ** d) / d

    def sample(self, rng: np.random.Generator, m: int) -> Array:
        d = 2 * self.n
        x = rng.standard_normal((m, d))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        # radius with density proportional to r^(d-1) on [1, 2)
        u = rng.random(m)
        r = (HOPF_R_MIN ** d + u * (HOPF_R_MAX ** d - HOPF_R_MIN ** d)) ** (1.0 / d)
        x *= r[:, None]
        return x[:, : self.n] + 1j * x[:, self.n:]


@dataclass(frozen=True)
class TorusCell:
    """The unit cell ``[0, 1)^(2n)`` of the lattice ``Z^(2n)``."""

    n: int

    @property
    def lebesgue_volume(self) -> float:
        return 1.0

    def sample(self, rng: np.random.Generator, m: int) -> Array:
        x = rng.random((m, 2 * self.n))
        return x[:, : self.n] + 1j * x[:, self.n:]


@dataclass(frozen=True)
class ProductDomain:
    a: object
    b: object

    @property
    def n(self) -> int:
        return self.a.n + self.b.n

    @property
    def lebesgue_volume(self) -> float:
        return self.a.lebesgue_volume * self.b.lebesgue_volume

    def sample(self, rng: np.random.Generator, m: int) -> Array:
        return np.concatenate([self.a.sample(rng, m), self.b.sample(rng, m)], axis=-1)


# --- closed forms ----------------------------------------------------------

def _radial_jet(z: Array, a: float, c: float, s0: float):
    """Jet of ``h = a delta / s + c zbar^i z^j / s^2`` with ``s = |z|^2 + s0``."""
    n = z.shape[-1]
    zb = np.conj(z)
    s = np.sum(np.abs(z) ** 2, axis=-1) + s0
    S = s[..., None, None]
    eye = np.eye(n)
    phi, dphi, ddphi = 1 / S, -1 / S**2, 2 / S**3
    psi, dpsi, ddpsi = 1 / S**2, -2 / S**3, 6 / S**4
    zz = np.einsum("...i,...j->...ij", zb, z)
    h = a * eye * phi + c * zz * psi

    # d_p h_ij
    dh = (a * np.einsum("ij,...p->...pij", eye, zb) * (dphi[..., None])
          + c * np.einsum("...i,jp->...pij", zb, eye) * psi[..., None]
          + c * np.einsum("...i,...j,...p->...pij", zb, z, zb) * dpsi[..., None])

    P = lambda t: t[..., None]  # noqa: E731
    ddbar = (
        a * np.einsum("ij,...q,...p->...pqij", eye, z, zb) * P(ddphi[..., None])
        + a * np.einsum("ij,pq->pqij", eye, eye) * P(dphi[..., None])
        + c * np.einsum("jp,iq->pqij", eye, eye) * P(psi[..., None])
        + c * np.einsum("jp,...i,...q->...pqij", eye, zb, z) * P(dpsi[..., None])
        + c * np.einsum("iq,...j,...p->...pqij", eye, z, zb) * P(dpsi[..., None])
        + c * np.einsum("pq,...i,...j->...pqij", eye, zb, z) * P(dpsi[..., None])
        + c * np.einsum("...i,...j,...q,...p->...pqij", zb, z, z, zb) * P(ddpsi[..., None])
    )
    dd = (
        a * np.einsum("ij,...q,...p->...pqij", eye, zb, zb) * P(ddphi[..., None])
        + c * np.einsum("...i,jp,...q->...pqij", zb, eye, zb) * P(dpsi[..., None])
        + c * np.einsum("...i,...p,jq->...pqij", zb, zb, eye) * P(dpsi[..., None])
        + c * np.einsum("...i,...p,...j,...q->...pqij", zb, zb, z, zb) * P(ddpsi[..., None])
    )
    return h, dh, ddbar, dd


def _radial_metric(a: float, c: float, s0: float):
    def metric(z):
        return _radial_jet(z, a, c, s0)[0]
    return metric


def _shell_region(z: Array) -> Array:
    r = np.linalg.norm(z, axis=-1)
    return (r >= HOPF_R_MIN - 1e-12) & (r < HOPF_R_MAX + 1e-12)


def hopf_family(n: int, lam: float) -> MetricSpec:
    """``(4/|z|^2)((1+lam) delta - lam zbar^i z^j / |z|^2)`` on the Hopf shell."""
    if n < 2:
        raise JetError("Hopf metrics need n >= 2")
    if not lam > -1:
        raise JetError("the Hopf family needs lambda > -1")
    a, c = 4.0 * (1.0 + lam), -4.0 * lam
    dom = HopfAnnulus(n)
    return MetricSpec(
        name=f"hopf-family:n={n},lambda={_fmt(lam)}", n=n,
        metric=_radial_metric(a, c, 0.0),
        jet=lambda z: _radial_jet(z, a, c, 0.0),
        region=_shell_region, sampler=dom.sample, domain=dom,
        params={"family": "hopf-family", "n": n, "lambda": lam},
    )


def hopf_canonical(n: int) -> MetricSpec:
    spec = hopf_family(n, 0.0)
    return MetricSpec(
        name=f"hopf:n={n}", n=n, metric=spec.metric, jet=spec.jet,
        region=spec.region, sampler=spec.sampler, domain=spec.domain,
        params={"family": "hopf", "n": n, "lambda": 0.0},
    )


def fubini_study(n: int, radius: float = 1.5) -> MetricSpec:
    def sampler(rng, m):
        return _ball_sample(rng, m, n, radius)
    return MetricSpec(
        name=f"fubini-study:n={n}", n=n,
        metric=_radial_metric(1.0, -1.0, 1.0),
        jet=lambda z: _radial_jet(z, 1.0, -1.0, 1.0),
        sampler=sampler, params={"family": "fubini-study", "n": n}, kahler=True,
    )


def flat(n: int) -> MetricSpec:
    def jet(z):
        b = z.shape[:-1]
        h = np.broadcast_to(np.eye(n, dtype=complex), b + (n, n)).copy()
        return h, np.zeros(b + (n,) * 3, complex), np.zeros(b + (n,) * 4, complex), np.zeros(b + (n,) * 4, complex)
    dom = TorusCell(n)
    return MetricSpec(
        name=f"flat:n={n}", n=n, metric=lambda z: jet(z)[0], jet=jet,
        sampler=dom.sample, domain=dom, params={"family": "flat", "n": n}, kahler=True,
    )


def random_polynomial(n: int, seed: int, radius: float = 0.5) -> MetricSpec:
    """A generic Hermitian metric, quadratic in ``z`` and ``zbar``, positive on ``|z| <= radius``.

    Neither Kähler nor conformally flat; used as a control.
    """
    rng = np.random.default_rng(seed)
    cplx = lambda *s: rng.standard_normal(s) + 1j * rng.standard_normal(s)  # noqa: E731
    A = cplx(n, n)
    H0 = A @ A.conj().T / n + 2.0 * np.eye(n)
    L = 0.3 * cplx(n, n, n)          # coefficient of z^p, indexed [p, i, j]
    Q = 0.2 * cplx(n, n, n, n)       # coefficient of z^p zbar^q
    Q = 0.5 * (Q + np.conj(np.transpose(Q, (1, 0, 3, 2))))
    D = 0.2 * cplx(n, n, n, n)       # coefficient of z^p z^q
    D = 0.5 * (D + np.transpose(D, (1, 0, 2, 3)))
    LH = np.conj(np.transpose(L, (0, 2, 1)))
    DH = np.conj(np.transpose(D, (0, 1, 3, 2)))

    def jet(z):
        zb = np.conj(z)
        h = (H0 + np.einsum("...p,pij->...ij", z, L) + np.einsum("...p,pij->...ij", zb, LH)
             + np.einsum("...p,...q,pqij->...ij", z, zb, Q)
             + np.einsum("...p,...q,pqij->...ij", z, z, D)
             + np.einsum("...p,...q,pqij->...ij", zb, zb, DH))
        dh = (np.broadcast_to(L, z.shape[:-1] + L.shape)
              + np.einsum("...q,pqij->...pij", zb, Q)
              + 2 * np.einsum("...q,pqij->...pij", z, D))
        ddbar = np.broadcast_to(Q, z.shape[:-1] + Q.shape).copy()
        dd = np.broadcast_to(2 * D, z.shape[:-1] + D.shape).copy()
        return h, dh, ddbar, dd

    def region(z):
        return np.linalg.norm(z, axis=-1) <= radius + 1e-12

    def sampler(rng_, m):
        return _ball_sample(rng_, m, n, radius)

    return MetricSpec(
        name=f"random-poly:n={n},seed={seed}", n=n, metric=lambda z: jet(z)[0], jet=jet,
        region=region, sampler=sampler, params={"family": "random-poly", "n": n, "seed": seed},
    )


def _ball_sample(rng, m, n, radius):
    x = rng.standard_normal((m, 2 * n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    x *= radius * rng.random(m)[:, None] ** (1.0 / (2 * n))
    return x[:, :n] + 1j * x[:, n:]


# --- combinators -----------------------------------------------------------

@dataclass(frozen=True)
class Weight:
    """A real smooth function ``f = Re(a.z) + zbar^T B z + Re(z^T C z) + amp sin(Re(b.z))``."""

    a: Array
    B: Array
    C: Array
    b: Array
    amp: float

    @classmethod
    def random(cls, n: int, seed: int, scale: float = 0.2) -> "Weight":
        rng = np.random.default_rng(seed)
        cplx = lambda *s: rng.standard_normal(s) + 1j * rng.standard_normal(s)  # noqa: E731
        B = cplx(n, n)
        C = cplx(n, n)
        return cls(scale * cplx(n), scale * 0.5 * (B + B.conj().T),
                   scale * 0.5 * (C + C.T), cplx(n), scale)

    def jet(self, z: Array):
        """``f, d_p f, d_p dbar_q f, d_p d_q f``."""
        zb = np.conj(z)
        u = np.real(z @ self.b)
        f = (np.real(z @ self.a) + np.real(np.einsum("...i,ij,...j->...", zb, self.B, z))
             + np.real(np.einsum("...i,ij,...j->...", z, self.C, z)) + self.amp * np.sin(u))
        cu, su = np.cos(u)[..., None], np.sin(u)[..., None]
        df = (0.5 * self.a + zb @ self.B + z @ self.C + self.amp * cu * 0.5 * self.b)
        ddbar = (self.B.T - self.amp * su[..., None] * 0.25 * np.einsum("p,q->pq", self.b, np.conj(self.b)))
        dd = (self.C - self.amp * su[..., None] * 0.25 * np.einsum("p,q->pq", self.b, self.b))
        return f, df, ddbar, dd


@dataclass(frozen=True)
class ScaleInvariantWeight:
    """``f = amp (zbar^T B z / |z|^2 + sin(pi log|z|^2 / ln 2))``.

    Invariant under ``z -> 2z``, so ``exp(f)`` times a Hopf metric still
    descends to the Hopf quotient.
    """

    B: Array
    amp: float

    @classmethod
    def random(cls, n: int, seed: int, scale: float = 0.2) -> "ScaleInvariantWeight":
        rng = np.random.default_rng(seed)
        M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return cls(0.5 * (M + M.conj().T), scale)

    def jet(self, z: Array):
        zb = np.conj(z)
        r = np.sum(np.abs(z) ** 2, axis=-1)
        R = r[..., None]
        RR = R[..., None]
        q = np.real(np.einsum("...i,ij,...j->...", zb, self.B, z))
        qp = zb @ self.B                  # d_p q
        qb = np.conj(qp)                  # dbar_p q
        eye = np.eye(z.shape[-1])
        outer = lambda a, b: a[..., :, None] * b[..., None, :]  # noqa: E731
        g = q / r
        gp = qp / R - q[..., None] * zb / R**2
        gpq = (self.B.T / RR - outer(qp, z) / RR**2 - outer(zb, qb) / RR**2
               - q[..., None, None] * eye / RR**2 + 2 * q[..., None, None] * outer(zb, z) / RR**3)
        gpp = (-outer(qp, zb) - outer(zb, qp)) / RR**2 + 2 * q[..., None, None] * outer(zb, zb) / RR**3
        c = math.pi / math.log(2.0)
        L = np.log(r)
        Lp = zb / R
        Lpq = eye / RR - outer(zb, z) / RR**2
        Lpp = -outer(zb, zb) / RR**2
        sn, cs = np.sin(c * L), np.cos(c * L)
        S, Cs = sn[..., None, None], cs[..., None, None]
        f = g + sn
        fp = gp + c * cs[..., None] * Lp
        fpq = gpq - c * c * S * outer(Lp, np.conj(Lp)) + c * Cs * Lpq
        fpp = gpp - c * c * S * outer(Lp, Lp) + c * Cs * Lpp
        a = self.amp
        return a * f, a * fp, a * fpq, a * fpp


def conformal(spec: MetricSpec, w, tag: str = "") -> MetricSpec:
    """The metric ``exp(f) h``."""
    base_jet = spec.jet

    def metric(z):
        return np.exp(w.jet(z)[0])[..., None, None] * spec.metric(z)

    def jet(z):
        h, dh, ddbar, dd = base_jet(z)
        f, fp, fpq_bar, fpq = w.jet(z)
        fq_bar = np.conj(fp)
        dbh = np.conj(np.swapaxes(dh, -1, -2))
        e = np.exp(f)[..., None, None]
        E3, E4 = e[..., None], e[..., None, None]
        H = h[..., None, :, :]
        H2 = h[..., None, None, :, :]
        new_dh = E3 * (fp[..., :, None, None] * H + dh)
        new_ddbar = E4 * (
            (fp[..., :, None] * fq_bar[..., None, :] + fpq_bar)[..., None, None] * H2
            + fp[..., :, None, None, None] * dbh[..., None, :, :, :]
            + fq_bar[..., None, :, None, None] * dh[..., :, None, :, :]
            + ddbar)
        new_dd = E4 * (
            (fp[..., :, None] * fp[..., None, :] + fpq)[..., None, None] * H2
            + fp[..., :, None, None, None] * dh[..., None, :, :, :]
            + fp[..., None, :, None, None] * dh[..., :, None, :, :]
            + dd)
        return e * h, new_dh, new_ddbar, new_dd

    return MetricSpec(
        name=spec.name + (tag or "~weighted"), n=spec.n, metric=metric,
        jet=jet if base_jet is not None else None,
        region=spec.region, sampler=spec.sampler, domain=spec.domain,
        params={**spec.params, "weighted": True},
    )


def product(a: MetricSpec, b: MetricSpec) -> MetricSpec:
    n = a.n + b.n

    def split(z):
        return z[..., : a.n], z[..., a.n:]

    def metric(z):
        za, zb = split(z)
        out = np.zeros(z.shape[:-1] + (n, n), complex)
        out[..., : a.n, : a.n] = a.metric(za)
        out[..., a.n:, a.n:] = b.metric(zb)
        return out

    def jet(z):
        za, zb = split(z)
        ja, jb = a.jet(za), b.jet(zb)
        outs = []
        for k, (xa, xb) in enumerate(zip(ja, jb)):
            nd = k if k < 2 else 2
            arr = np.zeros(z.shape[:-1] + (n,) * (nd + 2), complex)
            sa = (Ellipsis,) + (slice(0, a.n),) * (nd + 2)
            sb = (Ellipsis,) + (slice(a.n, n),) * (nd + 2)
            arr[sa] = xa
            arr[sb] = xb
            outs.append(arr)
        return tuple(outs)

    def region(z):
        za, zb = split(z)
        ok = np.ones(z.shape[:-1], bool)
        for s, w in ((a, za), (b, zb)):
            if s.region is not None:
                ok &= s.region(w)
        return ok

    def sampler(rng, m):
        return np.concatenate([a.sample(rng, m), b.sample(rng, m)], axis=-1)

    dom = ProductDomain(a.domain, b.domain) if a.domain is not None and b.domain is not None else None
    return MetricSpec(
        name=f"{a.name}*{b.name}", n=n, metric=metric,
        jet=jet if a.jet is not None and b.jet is not None else None,
        region=region, sampler=sampler if a.sampler and b.sampler else None, domain=dom,
        params={"family": "product", "factors": [a.params, b.params]},
        kahler=a.kahler and b.kahler,
    )


# --- ids -------------------------------------------------------------------

FAMILIES = ("hopf", "hopf-family", "flat", "fubini-study", "random-poly")


def _fmt(x: float) -> str:
    return repr(float(x))


def _params(text: str) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise JetError(f"malformed parameter {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _number(v: str) -> float:
    if "/" in v:
        a, b = v.split("/", 1)
        return float(a) / float(b)
    return float(v)


def _factor(text: str) -> MetricSpec:
    weight = None
    if "~" in text:
        text, wtxt = text.split("~", 1)
        weight = _params(wtxt)
    name, _, ptxt = text.partition(":")
    p = _params(ptxt)
    try:
        n = int(p.get("n", "2"))
        if name == "hopf":
            spec = hopf_canonical(n)
        elif name == "hopf-family":
            spec = hopf_family(n, _number(p.get("lambda", "0")))
        elif name == "flat":
            spec = flat(n)
        elif name == "fubini-study":
            spec = fubini_study(n)
        elif name == "random-poly":
            spec = random_polynomial(n, int(p.get("seed", "0")))
        else:
            raise JetError(f"unknown metric family {name!r}")
    except JetError:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        raise JetError(f"bad parameters in {text!r}: {exc}") from exc
    if weight is not None:
        kind = weight.get("kind", "poly")
        wcls = {"poly": Weight, "hopf": ScaleInvariantWeight}.get(kind)
        if wcls is None:
            raise JetError(f"unknown weight kind {kind!r}")
        try:
            w = wcls.random(spec.n, int(weight.get("seed", "0")), float(weight.get("amp", "0.2")))
        except ValueError as exc:
            raise JetError(f"bad weight parameters {weight!r}: {exc}") from exc
        spec = conformal(spec, w, tag="~" + ",".join(f"{k}={v}" for k, v in weight.items()))
    return spec


def parse_metric_id(text: str) -> MetricSpec:
    """Build a :class:`MetricSpec` from an id string; raises ``JetError`` when malformed."""
    parts = [t.strip() for t in text.split("*") if t.strip()]
    if not parts:
        raise JetError("empty metric id")
    spec = _factor(parts[0])
    for t in parts[1:]:
        spec = product(spec, _factor(t))
    return spec


CATALOG = {
    "hopf": "canonical metric 4 delta/|z|^2 on the Hopf shell 1 <= |z| < 2 (n >= 2)",
    "hopf-family": "(4/|z|^2)((1+lambda) delta - lambda zbar z^T/|z|^2), lambda > -1",
    "flat": "Euclidean metric delta on the unit torus cell",
    "fubini-study": "d dbar log(1 + |z|^2) on the affine chart",
    "random-poly": "random quadratic Hermitian metric on |z| <= 0.5 (control)",
}


def default_ids() -> list[str]:
    """Ids exercised by the identity suite."""
    return [
        "flat:n=2", "fubini-study:n=2", "fubini-study:n=3",
        "hopf:n=2", "hopf:n=3", "hopf-family:n=2,lambda=-0.5", "hopf-family:n=3,lambda=1.5",
        "random-poly:n=2,seed=1", "random-poly:n=3,seed=2",
        "hopf:n=4", "hopf:n=2~seed=5", "hopf:n=3~seed=4,kind=hopf", "fubini-study:n=2~seed=6", "flat:n=3~seed=7",
        "hopf-family:n=2,lambda=0.5*flat:n=1", "hopf:n=2*fubini-study:n=1~seed=3",
    ]


# --- known closed forms ----------------------------------------------------

def log_radius_form(z: Array) -> Array:
    """herm11 matrix of ``i d dbar log |z|^2``."""
    zb = np.conj(z)
    r2 = np.sum(np.abs(z) ** 2, axis=-1)[..., None, None]
    n = z.shape[-1]
    return np.eye(n) / r2 - np.einsum("...i,...j->...ij", zb, z) / r2**2


def hopf_ricci_closed(z: Array) -> dict:
    """Ricci forms of the canonical Hopf metric."""
    n = z.shape[-1]
    L = log_radius_form(z)
    r2 = np.sum(np.abs(z) ** 2, axis=-1)[..., None, None]
    h = 4 * np.eye(n) / r2
    return {
        "chern1": n * L,
        "chern2": (n - 1) / 4 * h,
        "lc1": L,
        "lc2": (4 - n) / 4 * L + (n - 1) / 16 * h,
        "ric_h": L / 2,
        "ric_r": (n - 1) / 2 * L + (n - 1) / 8 * h,
    }


def hopf_scalars_closed(n: int) -> dict:
    return {
        "s": (2 * n - 1) * (n - 1) / 4,
        "s_C": n * (n - 1) / 4,
        "s_LC": (n - 1) / 4,
        "s_H": (n - 1) / 8,
        "s_R": (n * n - n) / 8,
    }


def hopf_family_closed(n: int, lam: float) -> dict:
    """Pointwise constants of the Hopf family."""
    t = 1.0 + lam
    return {
        "s_C": n * (n - 1) / (4 * t),
        "torsion_norm_sq": (n - 1) / (2 * t * t),
        "dstar_norm_sq": (n - 1) ** 2 / (4 * t * t),
        "codiff_trace": (n - 1) ** 2 / (2 * t * t),
        "s": predicted_scalar(n, lam),
    }


def hopf_family_forms_closed(z: Array, lam: float) -> dict:
    n = z.shape[-1]
    L = log_radius_form(z)
    return {
        "chern1": n * L,
        "codiff": (n - 1) / (1 + lam) * L,
        "lc1": (n - (n - 1) / (1 + lam)) * L,
    }


def predicted_scalar(n: int, lam: float) -> float:
    """Riemannian scalar curvature of the Hopf family as a function of lambda."""
    return n * (n - 1) / (2 * (1 + lam) ** 2) * (lam - (1 - 2 * n) / (2 * n))


def hopf_volume(n: int) -> float:
    """Volume of the Hopf shell for the canonical metric."""
    sphere = 2 * math.pi ** n / math.gamma(n)
    if n == 1:
        raise JetError("n >= 2")
    # density 8^n / r^(2n) against r^(2n-1) dr
    return 8.0 ** n * sphere * math.log(HOPF_R_MAX / HOPF_R_MIN)
