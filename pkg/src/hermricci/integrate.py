"""Monte Carlo integration of pointwise densities over compact quotients.

Samples are drawn uniformly in the Lebesgue measure of the fundamental
domain (the Hopf shell, a torus cell, or a product of these) and weighted by
the Riemannian volume density ``2^n det h``.  The sample budget is split into
a fixed number of partitions with seeds spawned from the master seed; each
partition is reduced to a sum and a sum of squares, and the partition
results are combined in index order.  Estimates therefore depend only on the
seed, the sample count and the partition count, never on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import forms as F
from .connection import d_omega, dstar_norm_sq, torsion_norm_sq
from .curvature import Curvatures
from .jets import Array, JetError, MetricJet2, MetricSpec, evaluate_jet

DEFAULT_SAMPLES = 1_000_000
DEFAULT_PARTITIONS = 64
CHUNK = 4096


def chunk_size(n: int) -> int:
    """Samples per vectorised batch; shrinks with the dimension to bound memory."""
    return max(256, CHUNK >> max(0, 2 * (n - 3)))

Density = Callable[[MetricJet2], dict]


@dataclass(frozen=True)
class IntegralEstimate:
    identity: str
    lhs: float
    rhs: float
    stderr_lhs: float
    stderr_rhs: float
    residual: float
    samples: int
    seed: int

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Totals:
    """Integral estimates of several densities over the same samples."""

    values: dict
    stderr: dict
    samples: int
    seed: int


def _partition_sizes(samples: int, partitions: int) -> list[int]:
    base, extra = divmod(samples, partitions)
    return [base + (1 if i < extra else 0) for i in range(partitions)]


def _run_partition(spec: MetricSpec, density: Density, m: int, seq: np.random.SeedSequence):
    rng = np.random.default_rng(seq)
    sums, sq = {}, {}
    done = 0
    chunk = chunk_size(spec.n)
    while done < m:
        k = min(chunk, m - done)
        z = spec.domain.sample(rng, k)
        j = evaluate_jet(spec, z)
        weight = (2.0 ** spec.n) * np.real(np.linalg.det(j.h))
        for name, val in density(j).items():
            w = np.real(val) * weight
            sums[name] = sums.get(name, 0.0) + float(np.sum(w))
            sq[name] = sq.get(name, 0.0) + float(np.sum(w * w))
        done += k
    return sums, sq


def integrate(spec: MetricSpec, density: Density, samples: int = DEFAULT_SAMPLES, seed: int = 0,
              partitions: int = DEFAULT_PARTITIONS, workers: int = 1) -> Totals:
    """Integrate every density returned by ``density(jet)`` against the volume form."""
    if spec.domain is None:
        raise JetError(f"{spec.name} has no compact fundamental domain to integrate over")
    if samples < 2:
        raise ValueError("need at least two samples")
    partitions = max(1, min(partitions, samples))
    seqs = np.random.SeedSequence(seed).spawn(partitions)
    sizes = _partition_sizes(samples, partitions)
    jobs = list(zip(sizes, seqs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _run_partition(spec, density, *a), jobs))
    else:
        parts = [_run_partition(spec, density, *a) for a in jobs]
    vol = spec.domain.lebesgue_volume
    values, errs = {}, {}
    for name in parts[0][0]:
        s = sum(p[0][name] for p in parts)
        s2 = sum(p[1][name] for p in parts)
        mean = s / samples
        var = max(s2 / samples - mean * mean, 0.0) * samples / (samples - 1)
        values[name] = vol * mean
        errs[name] = vol * math.sqrt(var / samples)
    return Totals(values, errs, samples, seed)


hopf_integrate = integrate


# --- densities -------------------------------------------------------------

def _volume_density(j: MetricJet2) -> dict:
    return {"volume": np.ones(j.batch_shape)}


def _omega_power(w: F.PQForm, k: int) -> F.PQForm | None:
    """``omega^k / k!``, or None for ``k = 0``."""
    if k == 0:
        return None
    out = w
    for _ in range(k - 1):
        out = F.wedge(w, out)
    return out.scale(1.0 / math.factorial(k))


def _top(rest: F.PQForm | None, f: F.PQForm, vol: Array) -> Array:
    top = F.top_coefficient(f) if rest is None else F.wedge_top(rest, f)
    return top / vol


def _norm_densities(j: MetricJet2) -> dict:
    G = np.swapaxes(np.linalg.inv(j.h), -1, -2)
    return {"d_omega_sq": F.norm_sq(d_omega(j), G), "dstar_omega_sq": dstar_norm_sq(j)}


def ddbar_omega_density(j: MetricJet2) -> dict:
    """``i d dbar omega ^ omega^(n-2)/(n-2)!`` and the two norm densities."""
    n = j.n
    wj = F.kahler_form_jet(j)
    vol = F.volume_coefficient(j.h)
    if n == 2:
        lhs = 1j * F.prepend_top(wj.ddbar) / vol
    else:
        lhs = _top(_omega_power(wj.val, n - 2), wj.ddbar_form().scale(1j), vol)
    return {"lhs": lhs, **_norm_densities(j)}


def torsion_wedge_density(j: MetricJet2) -> dict:
    """``i d omega ^ dbar omega ^ omega^(n-3)/(n-3)!``."""
    n = j.n
    wj = F.kahler_form_jet(j)
    vol = F.volume_coefficient(j.h)
    if n == 3:
        lhs = 1j * F.wedge_top(wj.d_hol(), wj.d_antihol()) / vol
    else:
        lhs = _top(_omega_power(wj.val, n - 3), F.wedge(wj.d_hol(), wj.d_antihol()).scale(1j), vol)
    return {"lhs": lhs, **_norm_densities(j)}


def power_density(k: int) -> Density:
    """``i omega^(n-k-1) ^ d dbar (omega^k)``."""
    def density(j: MetricJet2) -> dict:
        n = j.n
        wj = F.kahler_form_jet(j)
        vol = F.volume_coefficient(j.h)
        pk = F.power_jet(wj, k)
        if n - k - 1 == 0:
            lhs = 1j * F.prepend_top(pk.ddbar) / vol
        else:
            rest = _omega_power(wj.val, n - k - 1).scale(math.factorial(n - k - 1))
            lhs = _top(rest, pk.ddbar_form().scale(1j), vol)
        return {"lhs": lhs, **_norm_densities(j)}
    return density


def scalar_densities(j: MetricJet2) -> dict:
    sc = Curvatures.of(j).scalars()
    out = {k: v for k, v in sc.as_dict().items()}
    out["torsion_norm_sq"] = torsion_norm_sq(j)
    out["dstar_omega_sq"] = dstar_norm_sq(j)
    return out


# --- identities ------------------------------------------------------------

def _rel(lhs: float, rhs: float, scale: float) -> float:
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), scale)


def volume(spec: MetricSpec, samples: int = DEFAULT_SAMPLES, seed: int = 0, **kw) -> IntegralEstimate:
    """Riemannian volume of the fundamental domain; the right side is the closed form when known."""
    from .catalog import hopf_volume
    t = integrate(spec, _volume_density, samples, seed, **kw)
    v, e = t.values["volume"], t.stderr["volume"]
    fam = None if spec.params.get("weighted") else spec.params.get("family")
    exact = hopf_volume(spec.n) if fam == "hopf" else (
        2.0 ** spec.n if fam == "flat" else float("nan"))
    return IntegralEstimate("volume", v, exact, e, 0.0,
                            abs(v - exact) / abs(exact) if exact == exact else float("nan"),
                            samples, seed)


def check_ddbar_omega(spec: MetricSpec, samples: int = DEFAULT_SAMPLES, seed: int = 0, **kw):
    """``int i d dbar omega ^ omega^(n-2)/(n-2)! = |d omega|^2 - |d^* omega|^2``."""
    if spec.n < 2:
        raise JetError("needs n >= 2")
    t = integrate(spec, ddbar_omega_density, samples, seed, **kw)
    lhs = t.values["lhs"]
    rhs = t.values["d_omega_sq"] - t.values["dstar_omega_sq"]
    err_r = t.stderr["d_omega_sq"] + t.stderr["dstar_omega_sq"]
    scale = max(t.values["d_omega_sq"], t.values["dstar_omega_sq"], 1e-300)
    est = IntegralEstimate("ddbar-omega", lhs, rhs, t.stderr["lhs"], err_r,
                           _rel(lhs, rhs, scale), samples, seed)
    return est, t


def check_torsion_wedge(spec: MetricSpec, samples: int = DEFAULT_SAMPLES, seed: int = 0, **kw):
    """``int i d omega ^ dbar omega ^ omega^(n-3)/(n-3)! = |d^* omega|^2 - |d omega|^2``."""
    if spec.n < 3:
        raise JetError("needs n >= 3")
    t = integrate(spec, torsion_wedge_density, samples, seed, **kw)
    lhs = t.values["lhs"]
    rhs = t.values["dstar_omega_sq"] - t.values["d_omega_sq"]
    scale = max(t.values["d_omega_sq"], t.values["dstar_omega_sq"], 1e-300)
    est = IntegralEstimate("torsion-wedge", lhs, rhs, t.stderr["lhs"],
                           t.stderr["d_omega_sq"] + t.stderr["dstar_omega_sq"],
                           _rel(lhs, rhs, scale), samples, seed)
    return est, t


def check_power(spec: MetricSpec, k: int, samples: int = DEFAULT_SAMPLES, seed: int = 0, **kw):
    """``int i omega^(n-k-1) ^ d dbar omega^k = (n-3)! k (n-k-1) (|d omega|^2 - |d^* omega|^2)``."""
    n = spec.n
    if n < 3 or not 1 <= k <= n - 1:
        raise JetError("needs n >= 3 and 1 <= k <= n-1")
    t = integrate(spec, power_density(k), samples, seed, **kw)
    c = math.factorial(n - 3) * k * (n - k - 1)
    lhs = t.values["lhs"]
    rhs = c * (t.values["d_omega_sq"] - t.values["dstar_omega_sq"])
    scale = max(math.factorial(n - 3) * k * max(n - k - 1, 1)
                * max(t.values["d_omega_sq"], t.values["dstar_omega_sq"]), 1e-300)
    est = IntegralEstimate(f"omega-power:k={k}", lhs, rhs, t.stderr["lhs"],
                           c * (t.stderr["d_omega_sq"] + t.stderr["dstar_omega_sq"]),
                           _rel(lhs, rhs, scale), samples, seed)
    return est, t


B_RELATIONS = (("s", "2*s_C"), ("s_C", "s_R"), ("s_C", "s_H"), ("s_H", "s_LC"))
C_RELATIONS = (("s", "2*s_R"), ("s", "2*s_H"), ("s_C", "s_LC"), ("s_R", "s_H"))


def balanced_diagnostic(spec: MetricSpec, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                        rel_tol: float = 0.02, **kw) -> dict:
    """Totals of the five scalar curvatures and the two families of equalities between them.

    Each equality ``a = b`` is reported as holding when
    ``|a - b| <= max(3 sigma, rel_tol * max(|a|, |b|), 1e-9 * volume)``.
    """
    def dens(j):
        return {**scalar_densities(j), "volume": np.ones(j.batch_shape)}

    t = integrate(spec, dens, samples, seed, **kw)
    vals, errs = t.values, t.stderr

    def get(expr):
        if expr.startswith("2*"):
            return 2 * vals[expr[2:]], 2 * errs[expr[2:]]
        return vals[expr], errs[expr]

    def check(pairs):
        out = []
        for a, b in pairs:
            (va, ea), (vb, eb) = get(a), get(b)
            bound = max(3 * math.hypot(ea, eb), rel_tol * max(abs(va), abs(vb)), 1e-9 * vals["volume"])
            out.append({"lhs": a, "rhs": b, "lhs_value": va, "rhs_value": vb,
                        "holds": bool(abs(va - vb) <= bound)})
        return out

    b_rel, c_rel = check(B_RELATIONS), check(C_RELATIONS)
    ratio = vals["s_C"] / vals["s_LC"] if vals["s_LC"] != 0 else float("nan")
    return {
        "identity": "balanced-diagnostic",
        "totals": {k: vals[k] for k in ("s", "s_C", "s_LC", "s_H", "s_R", "torsion_norm_sq",
                                        "dstar_omega_sq", "volume")},
        "stderr": {k: errs[k] for k in ("s", "s_C", "s_LC", "s_H", "s_R", "torsion_norm_sq",
                                        "dstar_omega_sq", "volume")},
        "balanced_relations": b_rel,
        "kahler_relations": c_rel,
        "all_balanced_hold": all(r["holds"] for r in b_rel),
        "all_kahler_hold": all(r["holds"] for r in c_rel),
        "ratio_s_C_over_s_LC": ratio,
        "samples": samples,
        "seed": seed,
    }
