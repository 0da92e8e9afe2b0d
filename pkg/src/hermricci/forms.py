"""Complex differential forms at a point, and their first jets.

A (p,q)-form is stored by its antisymmetric coefficient array, with the
normalisation

    phi = 1/(p! q!) sum phi_{I Jbar} dz^I ^ dzbar^J,

holomorphic indices first.  Real (1,1)-forms are usually passed around as
``herm11`` matrices ``a[..., i, j]`` standing for ``i a_{i jbar} dz^i ^ dzbar^j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from functools import lru_cache
from math import factorial

import numpy as np

Array = np.ndarray


class FormError(ValueError):
    pass


def _perm_sign(perm) -> int:
    sign, seen = 1, list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            k = seen[i]
            seen[i], seen[k] = seen[k], seen[i]
            sign = -sign
    return sign


def antisymmetrize(a: Array, axes: tuple) -> Array:
    """Average of signed permutations of ``axes``."""
    k = len(axes)
    if k < 2:
        return a
    out = np.zeros_like(a)
    for perm in permutations(range(k)):
        order = list(range(a.ndim))
        for src, dst in zip(perm, range(k)):
            order[axes[dst]] = axes[src]
        out = out + _perm_sign(perm) * np.transpose(a, order)
    return out / factorial(k)


def _shuffle_sum(a: Array, start: int, k1: int, k2: int) -> Array:
    """Signed sum over (k1,k2)-shuffles of the block of axes at ``start``."""
    k = k1 + k2
    if k1 == 0 or k2 == 0:
        return a
    out = np.zeros_like(a)
    for first in combinations(range(k), k1):
        rest = [i for i in range(k) if i not in first]
        perm = list(first) + rest  # slot perm[s] receives source axis s
        order = list(range(a.ndim))
        inv = [0] * k
        for s, slot in enumerate(perm):
            inv[slot] = s
        for slot in range(k):
            order[start + slot] = start + inv[slot]
        out = out + _perm_sign(inv) * np.transpose(a, order)
    return out


@dataclass(frozen=True)
class PQForm:
    p: int
    q: int
    n: int
    coeffs: Array

    def __post_init__(self):
        if self.p > self.n or self.q > self.n or min(self.p, self.q) < 0:
            raise FormError(f"bidegree ({self.p},{self.q}) impossible in dimension {self.n}")
        if self.coeffs.shape[self.coeffs.ndim - self.p - self.q:] != (self.n,) * (self.p + self.q):
            raise FormError("coefficient array does not match bidegree")

    @property
    def degree(self) -> int:
        return self.p + self.q

    @property
    def batch_shape(self) -> tuple:
        return self.coeffs.shape[: self.coeffs.ndim - self.degree]

    def _axes(self):
        nd = self.coeffs.ndim
        hol = tuple(range(nd - self.degree, nd - self.q))
        anti = tuple(range(nd - self.q, nd))
        return hol, anti

    def __add__(self, other: "PQForm") -> "PQForm":
        _same(self, other)
        return PQForm(self.p, self.q, self.n, self.coeffs + other.coeffs)

    def __sub__(self, other: "PQForm") -> "PQForm":
        _same(self, other)
        return PQForm(self.p, self.q, self.n, self.coeffs - other.coeffs)

    def scale(self, c) -> "PQForm":
        c = np.asarray(c)
        c = c.reshape(c.shape + (1,) * self.degree)
        return PQForm(self.p, self.q, self.n, self.coeffs * c)

    def conj(self) -> "PQForm":
        """Complex conjugate, a (q,p)-form."""
        nd = self.coeffs.ndim
        hol, anti = self._axes()
        order = list(range(nd - self.degree)) + list(anti) + list(hol)
        c = np.conj(np.transpose(self.coeffs, order)) * (-1) ** (self.p * self.q)
        return PQForm(self.q, self.p, self.n, c)

    def antisymmetry_defect(self) -> float:
        hol, anti = self._axes()
        a = antisymmetrize(antisymmetrize(self.coeffs, hol), anti)
        return float(np.abs(a - self.coeffs).max(initial=0.0))


def _same(a: PQForm, b: PQForm) -> None:
    if (a.p, a.q, a.n) != (b.p, b.q, b.n):
        raise FormError("forms of different type")


def scalar_form(f, n: int) -> PQForm:
    return PQForm(0, 0, n, np.asarray(f, dtype=complex))


def from_tensor(p: int, q: int, t: Array) -> PQForm:
    """Form ``sum t_{I Jbar} dz^I ^ dzbar^J`` from an arbitrary coefficient tensor."""
    n = t.shape[-1]
    nd = t.ndim
    hol = tuple(range(nd - p - q, nd - q))
    anti = tuple(range(nd - q, nd))
    c = antisymmetrize(antisymmetrize(np.asarray(t, complex), hol), anti)
    return PQForm(p, q, n, c * factorial(p) * factorial(q))


def herm11_to_form(a: Array) -> PQForm:
    return PQForm(1, 1, a.shape[-1], 1j * np.asarray(a, dtype=complex))


def form_to_herm11(f: PQForm) -> Array:
    if (f.p, f.q) != (1, 1):
        raise FormError("not a (1,1)-form")
    return -1j * f.coeffs


def kahler_form(h: Array) -> PQForm:
    return herm11_to_form(h)


def _flat(idx, n: int) -> int:
    out = 0
    for i in idx:
        out = out * n + i
    return out


@lru_cache(maxsize=None)
def _scatter_plan(n: int, p: int, q: int):
    """Gather index and sign rebuilding a full antisymmetric tensor from increasing components."""
    hol = list(combinations(range(n), p))
    anti = list(combinations(range(n), q))
    where = {(I, J): k for k, (I, J) in enumerate((I, J) for I in hol for J in anti)}
    size = n ** (p + q)
    gather = np.zeros(size, dtype=np.intp)
    sign = np.zeros(size)
    for I in hol:
        for J in anti:
            for pi in permutations(range(p)):
                for pj in permutations(range(q)):
                    full = tuple(I[i] for i in pi) + tuple(J[j] for j in pj)
                    gather[_flat(full, n)] = where[(I, J)]
                    sign[_flat(full, n)] = _perm_sign(pi) * _perm_sign(pj)
    return hol, anti, gather, sign


@lru_cache(maxsize=None)
def _wedge_plan(n: int, ap: int, aq: int, bp: int, bq: int):
    hol, anti, gather, sign = _scatter_plan(n, ap + bp, aq + bq)
    ai, bi, rows, cols = [], [], [], []
    k = 0
    flip = (-1) ** (aq * bp)
    for I in hol:
        for J in anti:
            for S in combinations(range(ap + bp), ap):
                Sc = tuple(i for i in range(ap + bp) if i not in S)
                sh = _perm_sign(S + Sc)
                for T in combinations(range(aq + bq), aq):
                    Tc = tuple(i for i in range(aq + bq) if i not in T)
                    ai.append(_flat(tuple(I[i] for i in S) + tuple(J[i] for i in T), n))
                    bi.append(_flat(tuple(I[i] for i in Sc) + tuple(J[i] for i in Tc), n))
                    rows.append(len(rows))
                    cols.append((k, sh * _perm_sign(T + Tc) * flip))
            k += 1
    M = np.zeros((len(ai), k))
    for r, (c, sg) in zip(rows, cols):
        M[r, c] = sg
    return np.array(ai, dtype=np.intp), np.array(bi, dtype=np.intp), M, gather, sign


def wedge(a: PQForm, b: PQForm) -> PQForm:
    """Exterior product; batch axes broadcast.

    Only the strictly increasing components are computed, then scattered
    into the full antisymmetric coefficient array.
    """
    if a.n != b.n:
        raise FormError("dimension mismatch")
    n = a.n
    p, q = a.p + b.p, a.q + b.q
    if p > n or q > n:
        raise FormError(f"wedge would have bidegree ({p},{q}) > {n}")
    ai, bi, M, gather, sign = _wedge_plan(n, a.p, a.q, b.p, b.q)
    af = a.coeffs.reshape(a.coeffs.shape[: a.coeffs.ndim - a.degree] + (-1,))
    bf = b.coeffs.reshape(b.coeffs.shape[: b.coeffs.ndim - b.degree] + (-1,))
    comp = (af[..., ai] * bf[..., bi]) @ M
    full = comp[..., gather] * sign
    return PQForm(p, q, n, full.reshape(full.shape[:-1] + (n,) * (p + q)))


def wedge_reference(a: PQForm, b: PQForm) -> PQForm:
    """Exterior product by explicit signed shuffles of the full tensor product.

    Slow; kept as an independent route for :func:`wedge`.
    """
    if a.n != b.n:
        raise FormError("dimension mismatch")
    n = a.n
    p, q = a.p + b.p, a.q + b.q
    if p > n or q > n:
        raise FormError(f"wedge would have bidegree ({p},{q}) > {n}")
    da, db = a.degree, b.degree
    ca = a.coeffs.reshape(a.coeffs.shape + (1,) * db)
    cb = b.coeffs.reshape(b.coeffs.shape[: b.coeffs.ndim - db] + (1,) * da + b.coeffs.shape[b.coeffs.ndim - db:])
    t = ca * cb
    nd = t.ndim
    base = nd - da - db
    ah = list(range(base, base + a.p))
    aa = list(range(base + a.p, base + da))
    bh = list(range(base + da, base + da + b.p))
    ba = list(range(base + da + b.p, nd))
    t = np.transpose(t, list(range(base)) + ah + bh + aa + ba)
    t = _shuffle_sum(t, base, a.p, b.p)
    t = _shuffle_sum(t, base + p, a.q, b.q)
    return PQForm(p, q, n, t * (-1) ** (a.q * b.p))


def _raise(f: PQForm, G: Array) -> Array:
    """Contract every index of ``f`` with the inverse metric, as in the inner product."""
    c = f.coeffs
    hol, anti = f._axes()
    for ax in hol:
        c = np.moveaxis(_contract_last(np.moveaxis(c, ax, -1), G, transpose=True), -1, ax)
    for ax in anti:
        c = np.moveaxis(_contract_last(np.moveaxis(c, ax, -1), G, transpose=False), -1, ax)
    return c


def _contract_last(c: Array, G: Array, transpose: bool) -> Array:
    # G carries batch axes only; pad it against the extra form axes of c
    extra = c.ndim - 1 - (G.ndim - 2)
    Gx = G.reshape(G.shape[:-2] + (1,) * extra + G.shape[-2:])
    if transpose:
        return np.einsum("...i,...il->...l", c, Gx)
    return np.einsum("...j,...kj->...k", c, Gx)


def inner(a: PQForm, b: PQForm, G: Array) -> Array:
    """Pointwise Hermitian inner product induced by ``h``; ``G`` is the inverse metric."""
    _same(a, b)
    ra = _raise(a, G)
    axes = tuple(range(ra.ndim - a.degree, ra.ndim))
    s = np.sum(ra * np.conj(b.coeffs), axis=axes) if axes else ra * np.conj(b.coeffs)
    return s / (factorial(a.p) * factorial(a.q))


def norm_sq(a: PQForm, G: Array) -> Array:
    return np.real(inner(a, a, G))


def lefschetz(a: PQForm, h: Array) -> PQForm:
    return wedge(kahler_form(h), a)


def contract_lambda(b: PQForm, G: Array) -> PQForm:
    """Adjoint of the Lefschetz map, by contracting one index pair with ``G``."""
    if b.p == 0 or b.q == 0:
        raise FormError("contraction needs p, q >= 1")
    c = b.coeffs
    nd = c.ndim
    hol, anti = b._axes()
    c = np.moveaxis(c, [hol[0], anti[0]], [nd - 2, nd - 1])
    extra = c.ndim - G.ndim
    Gx = G.reshape(G.shape[:-2] + (1,) * extra + G.shape[-2:])
    r = np.sum(c * Gx, axis=(-1, -2))
    return PQForm(b.p - 1, b.q - 1, b.n, r * (-1j) * (-1) ** (b.p - 1))


def trace_herm11(a: Array, G: Array) -> Array:
    """``h^{i jbar} a_{i jbar}``, the trace of a real (1,1)-form against the metric."""
    return np.einsum("...ij,...ij->...", G, a)


def top_density(f: PQForm, volume: PQForm) -> Array:
    """Ratio of two top-degree forms, i.e. the scalar density of ``f``."""
    if (f.p, f.q) != (f.n, f.n) or (volume.p, volume.q) != (f.n, f.n):
        raise FormError("both forms must have top degree")
    idx = (Ellipsis,) + tuple(range(f.n)) * 2
    return f.coeffs[idx] / volume.coeffs[idx]


def top_coefficient(f: PQForm) -> Array:
    """The ``(1..n, 1..n)`` coefficient of a top-degree form."""
    if (f.p, f.q) != (f.n, f.n):
        raise FormError("form must have top degree")
    return f.coeffs[(Ellipsis,) + tuple(range(f.n)) * 2]


def _splits(n: int, k: int):
    for first in combinations(range(n), k):
        rest = tuple(i for i in range(n) if i not in first)
        yield first, rest, _perm_sign(first + rest)


def wedge_top(a: PQForm, b: PQForm) -> Array:
    """Top coefficient of ``a ^ b`` without building the full product."""
    n = a.n
    if (a.p + b.p, a.q + b.q) != (n, n) or b.n != n:
        raise FormError("wedge_top needs complementary bidegrees")
    out = 0
    for hs, hr, sh in _splits(n, a.p):
        for as_, ar, sa in _splits(n, a.q):
            out = out + sh * sa * a.coeffs[(Ellipsis,) + hs + as_] * b.coeffs[(Ellipsis,) + hr + ar]
    return out * (-1) ** (a.q * b.p)


@lru_cache(maxsize=None)
def _volume_constant(n: int) -> complex:
    return complex(top_coefficient(volume_form(np.eye(n, dtype=complex))))


def volume_coefficient(h: Array) -> Array:
    """Top coefficient of ``omega^n / n!``, proportional to ``det h``."""
    return _volume_constant(h.shape[-1]) * np.linalg.det(h)


def volume_form(h: Array) -> PQForm:
    """``omega^n / n!``."""
    n = h.shape[-1]
    w = kahler_form(h)
    v = w
    for _ in range(n - 1):
        v = wedge(w, v)
    return v.scale(1.0 / factorial(n))


def basis_1_0(n: int) -> PQForm:
    """``dz^p`` stacked along a leading axis p."""
    return PQForm(1, 0, n, np.eye(n, dtype=complex))


def basis_0_1(n: int) -> PQForm:
    return PQForm(0, 1, n, np.eye(n, dtype=complex))


@dataclass(frozen=True)
class FormJet:
    """A form field with value, first derivatives and mixed second derivatives.

    ``d`` carries ``d_p`` along a derivative axis placed just before the form
    axes, ``dbar`` likewise for ``dbar_q`` and ``ddbar`` carries ``d_p dbar_q``
    on two such axes.
    """

    val: PQForm
    d: PQForm
    dbar: PQForm
    ddbar: PQForm

    @property
    def n(self) -> int:
        return self.val.n

    def _lift(self, f: PQForm, k: int) -> PQForm:
        # insert k broadcast derivative axes before the form axes
        c = f.coeffs
        pos = c.ndim - f.degree
        c = c.reshape(c.shape[:pos] + (1,) * k + c.shape[pos:])
        return PQForm(f.p, f.q, f.n, c)

    def wedge(self, other: "FormJet") -> "FormJet":
        a, b = self, other
        val = wedge(a.val, b.val)
        d = wedge(a.d, b._lift(b.val, 1)) + wedge(a._lift(a.val, 1), b.d)
        dbar = wedge(a.dbar, b._lift(b.val, 1)) + wedge(a._lift(a.val, 1), b.dbar)
        ad, adb = _axis_form(a.d, -2), _axis_form(a.dbar, -1)
        bd, bdb = _axis_form(b.d, -2), _axis_form(b.dbar, -1)
        ddbar = (wedge(a.ddbar, b._lift(b.val, 2)) + wedge(ad, bdb)
                 + wedge(adb, bd) + wedge(a._lift(a.val, 2), b.ddbar))
        return FormJet(val, d, dbar, ddbar)

    def d_hol(self) -> PQForm:
        """``sum_p dz^p ^ d_p F``."""
        return _prepend(self.d, hol=True, anti=False)

    def d_antihol(self) -> PQForm:
        return _prepend(self.dbar, hol=False, anti=True)

    def ddbar_form(self) -> PQForm:
        """``d dbar F = sum dz^p ^ dzbar^q ^ d_p dbar_q F``."""
        return _prepend(self.ddbar, hol=True, anti=True)


def _prepend(f: PQForm, hol: bool, anti: bool) -> PQForm:
    """Wedge the coordinate differentials indexed by derivative axes onto ``f``.

    Equivalent to ``sum dz^p ^ dzbar^q ^ f_{p q}`` but moves the derivative
    axes into the form slots instead of materialising the basis forms.
    """
    c = f.coeffs
    nd = c.ndim
    base = nd - f.degree
    k = int(hol) + int(anti)
    axes = list(range(base - k))
    dq = base - 1 if anti else None
    dp = base - k if hol else None
    hol_axes = list(range(base, base + f.p))
    anti_axes = list(range(base + f.p, nd))
    order = axes + ([dp] if hol else []) + hol_axes + ([dq] if anti else []) + anti_axes
    t = np.transpose(c, order)
    start = base - k
    p, q = f.p + int(hol), f.q + int(anti)
    if hol:
        t = _shuffle_sum(t, start, 1, f.p)
    if anti:
        t = _shuffle_sum(t, start + p, 1, f.q)
    sign = (-1) ** f.p if anti else 1
    return PQForm(p, q, f.n, t * sign)


def prepend_top(f: PQForm, hol: bool = True, anti: bool = True) -> Array:
    """Top coefficient of :func:`_prepend`, for ``f`` one degree short of top in each slot used."""
    n = f.n
    c = f.coeffs
    k = int(hol) + int(anti)
    if (f.p + int(hol), f.q + int(anti)) != (n, n):
        raise FormError("prepend_top needs a result of top degree")
    out = 0
    hol_choices = [(s, tuple(i for i in range(n) if i != s)) for s in range(n)] if hol else [(None, tuple(range(n)))]
    anti_choices = [(t, tuple(i for i in range(n) if i != t)) for t in range(n)] if anti else [(None, tuple(range(n)))]
    for s, I in hol_choices:
        for t, J in anti_choices:
            lead = tuple(x for x in (s, t) if x is not None)
            sign = (-1) ** ((s or 0) + (t or 0))
            out = out + sign * c[(Ellipsis,) + lead + I + J]
    assert len(lead) == k
    return out * ((-1) ** f.p if anti else 1)


def _axis_form(f: PQForm, where: int) -> PQForm:
    # turn a single derivative axis into one of two, for the cross terms
    c = f.coeffs
    pos = c.ndim - f.degree
    if where == -2:
        c = c.reshape(c.shape[:pos] + (1,) + c.shape[pos:])
    else:
        c = c.reshape(c.shape[: pos - 1] + (1,) + c.shape[pos - 1:])
    return PQForm(f.p, f.q, f.n, c)


def kahler_form_jet(jet) -> FormJet:
    """The field ``omega`` and its derivatives, read from a metric 2-jet."""
    n = jet.n
    return FormJet(
        PQForm(1, 1, n, 1j * jet.h),
        PQForm(1, 1, n, 1j * jet.dh),
        PQForm(1, 1, n, 1j * jet.dbar_h),
        PQForm(1, 1, n, 1j * jet.ddbar_h),
    )


def power_jet(w: FormJet, k: int) -> FormJet:
    out = w
    for _ in range(k - 1):
        out = out.wedge(w)
    return out
