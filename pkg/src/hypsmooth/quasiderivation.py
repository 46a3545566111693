"""The canonical quasiderivation Δ(u_g) = Σ_i u_{s1…si} ⊗ u_{s(i+1)…sn} and its estimates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from hypsmooth.group_kernel import Group, RegeneratedGroup, Word
from hypsmooth.group_ring import (
    RingElement,
    TensorElement,
    absolute,
    convolve,
    i_t,
    tensor_mult_left,
    tensor_mult_right,
    worst_violation,
)
from hypsmooth.norms import SeminormSpec, evaluate, sobolev_minimal_bounds, ucnorm_bounds


class UnsupportedSpec(ValueError):
    pass


@dataclass(frozen=True)
class QuasiDerivation:
    group: Group
    delta: int = 1

    def __post_init__(self):
        if self.delta < 1:
            raise ValueError("delta must be >= 1")

    @classmethod
    def estimated(cls, group: Group, radius: int = 3) -> "QuasiDerivation":
        return cls(group, group.estimate_delta(radius))

    def __call__(self, a: RingElement) -> TensorElement:
        return delta_map(a)


def delta_terms(group: Group, g: Word) -> list[tuple[Word, Word]]:
    """(prefix, suffix) pairs of σ(g)."""
    return [(group.normalize(g[:i]), group.normalize(g[i:])) for i in range(len(g) + 1)]


def delta_map(a: RingElement) -> TensorElement:
    G = a.group
    return TensorElement(G, ((pq, c) for g, c in a.items() for pq in delta_terms(G, g)))


# ------------------------------------------------------------ Leibniz domination
@dataclass(frozen=True)
class DominationReport:
    holds: bool
    worst_key: tuple | None
    excess: float
    min_slack: float  # smallest RHS − LHS over the LHS support

    def __bool__(self):
        return self.holds


def leibniz_rhs(a: RingElement, b: RingElement, delta: int) -> TensorElement:
    """Σ_{l(t)<=δ} ( i_t(|Δa|)·|b| + |a|·i_t(|Δb|) )."""
    G = a.group
    da, db = absolute(delta_map(a)), absolute(delta_map(b))
    aa, ab = absolute(a), absolute(b)
    out = TensorElement(G)
    for t in G.ball(delta).elements:
        out = out + tensor_mult_right(i_t(t, da), ab) + tensor_mult_left(aa, i_t(t, db))
    return out


def leibniz_domination_check(a: RingElement, b: RingElement, delta: int) -> DominationReport:
    """Coefficientwise |Δ(ab)| <= Σ_t ( i_t(|Δa|)|b| + |a| i_t(|Δb|) )."""
    lhs = absolute(delta_map(convolve(a, b)))
    rhs = leibniz_rhs(a, b, delta)
    key, excess = worst_violation(lhs, rhs)
    slack = min((rhs[k].real - c.real for k, c in lhs.items()), default=math.inf)
    return DominationReport(key is None, key, excess, slack)


def monomial_leibniz_counts(group: Group, g: Word, h: Word, delta: int) -> list[int]:
    """RHS coefficient at each LHS term of |Δ(u_g u_h)| (the LHS coefficient is 1).

    The RHS coefficient at first leg x counts vertices p of σ(g) with d(p,x) <= δ
    plus vertices p' of σ(h) with d(g·p', x) <= δ.
    """
    gh = group.multiply(g, h)
    left = [g[:i] for i in range(len(g) + 1)]
    right = [group.normalize(g + h[:i]) for i in range(len(h) + 1)]
    counts = []
    for i in range(len(gh) + 1):
        x = gh[:i]
        lx = len(x)
        n = 0
        for v in left + right:
            if abs(len(v) - lx) <= delta and group.distance(v, x) <= delta:
                n += 1
        counts.append(n)
    return counts


def monomial_leibniz_holds(group: Group, g: Word, h: Word, delta: int) -> bool:
    gh = group.multiply(g, h)
    left = [g[:i] for i in range(len(g) + 1)]
    right = [group.normalize(g + h[:i]) for i in range(len(h) + 1)]
    cands = left + right
    for i in range(len(gh) + 1):
        x = gh[:i]
        lx = len(x)
        if x in cands:
            continue
        if not any(abs(len(v) - lx) <= delta and group.distance(v, x) <= delta for v in cands):
            return False
    return True


def exhaustive_leibniz(group: Group, radius: int, delta: int) -> tuple[int, list]:
    """Check every monomial pair from ball(radius); returns (pairs checked, failures)."""
    elems = group.ball(radius).elements
    fails = []
    for g in elems:
        for h in elems:
            if not monomial_leibniz_holds(group, g, h, delta):
                fails.append((g, h))
    return len(elems) ** 2, fails


# ------------------------------------------------------------------- constants
def c0_constant(spec: SeminormSpec, delta: int, group: Group) -> float:
    """C0 = Σ_{l(t)<=δ} ‖u_t‖·‖u_{t⁻¹}‖."""
    if delta < 1:
        raise ValueError("delta must be >= 1")
    return float(sum(spec.unit_norm(t) * spec.unit_norm(group.invert(t)) for t in group.ball(delta).elements))


def uc_exact_l1(T: TensorElement, specX: SeminormSpec, specY: SeminormSpec | None = None) -> float:
    """Exact uc-norm for ℓ¹-type legs: Σ |T_xy| w(x) w(y)."""
    specY = specY or specX
    if not (specX.is_l1_type and specY.is_l1_type):
        raise UnsupportedSpec("exact uc value needs ℓ¹-type legs")
    return float(sum(abs(c) * specX.unit_norm(x) * specY.unit_norm(y) for (x, y), c in T.items()))


@dataclass(frozen=True)
class QuasiLeibnizReport:
    lhs_upper: float
    rhs_upper: float
    rhs_floor: float
    c0: float
    verdict: str  # "verified", "consistent", "violated", "inconclusive"

    def __bool__(self):
        return self.verdict in ("verified", "consistent")


def quasi_leibniz_norm_check(a: RingElement, b: RingElement, spec: SeminormSpec, delta: int,
                             tol: float = 1e-9) -> QuasiLeibnizReport:
    G = a.group
    c0 = c0_constant(spec, delta, G)
    na, nb = evaluate(spec, a), evaluate(spec, b)
    if spec.is_l1_type:
        lhs = uc_exact_l1(delta_map(convolve(a, b)), spec)
        da, db = uc_exact_l1(delta_map(a), spec), uc_exact_l1(delta_map(b), spec)
        rhs = c0 * (da * nb + na * db)
        verdict = "verified" if lhs <= rhs + tol * max(1.0, rhs) else "violated"
        return QuasiLeibnizReport(lhs, rhs, rhs, c0, verdict)
    cl = ucnorm_bounds(delta_map(convolve(a, b)), spec, spec)
    ca, cb = ucnorm_bounds(delta_map(a), spec, spec), ucnorm_bounds(delta_map(b), spec, spec)
    rhs_up = c0 * (ca.upper * nb + na * cb.upper)
    rhs_lo = c0 * (ca.lower * nb + na * cb.lower)
    # certificate endpoints only: never "verified" outside ℓ¹-type specs
    if cl.lower > rhs_up + tol:
        verdict = "violated"
    elif cl.upper <= rhs_up + tol:
        verdict = "consistent"
    else:
        verdict = "inconclusive"
    return QuasiLeibnizReport(cl.upper, rhs_up, rhs_lo, c0, verdict)


# ------------------------------------------------------------------ graph norms
def graph_weights(group: Group, spec: SeminormSpec, delta: int, levels: int = 1) -> Callable[[Word], float]:
    """Weight W_k with ‖a‖_(k) = Σ |a_g| W_k(g) for the k-fold graph norm (k = levels)."""
    if not spec.is_l1_type:
        raise UnsupportedSpec("graph norms are exact only for ℓ¹-type specs")
    w: Callable[[Word], float] = spec.unit_norm
    for _ in range(levels):
        w = _next_level(group, w, delta)
    return w


def _next_level(group: Group, w, delta):
    c0 = sum(w(t) * w(group.invert(t)) for t in group.ball(delta).elements)
    cache: dict[Word, float] = {}

    def W(g: Word) -> float:
        hit = cache.get(g)
        if hit is None:
            hit = c0 * w(g) + sum(w(p) * w(q) for p, q in delta_terms(group, g))
            cache[g] = hit
        return hit

    W.c0 = c0  # type: ignore[attr-defined]
    return W


def graph_norm(a: RingElement, spec: SeminormSpec, delta: int) -> float:
    """C0·‖a‖ + ‖Δa‖_uc, exact for ℓ¹-type specs."""
    if not spec.is_l1_type:
        raise UnsupportedSpec("use graph_norm_bounds for this spec")
    c0 = c0_constant(spec, delta, a.group)
    return c0 * evaluate(spec, a) + uc_exact_l1(delta_map(a), spec)


def graph_norm_bounds(a: RingElement, spec: SeminormSpec, delta: int) -> tuple[float, float]:
    if spec.is_l1_type:
        v = graph_norm(a, spec, delta)
        return v, v
    c0 = c0_constant(spec, delta, a.group)
    cert = ucnorm_bounds(delta_map(a), spec, spec)
    base = c0 * evaluate(spec, a)
    return base + cert.lower, base + cert.upper


def iterate_graph_norm(a: RingElement, spec: SeminormSpec, delta: int, k: int) -> float:
    """Norm of the k-times iterated graph-norm completion, level constants recomputed per level."""
    if k == 0:
        return evaluate(spec, a)
    W = graph_weights(a.group, spec, delta, k)
    return float(sum(abs(c) * W(g) for g, c in a.items()))


# ----------------------------------------------------------------- Neumann series
@dataclass(frozen=True)
class NeumannReport:
    c0: float
    norm_a: float
    increments: list  # graph norm of a^n
    ratios: list
    partial_sums: list  # graph norm of Σ_{j<=n} a^j
    delta_norms: list  # ‖Δ(a^n)‖
    fitted_c: float  # max_n ‖Δ(a^n)‖ / (‖Δa‖ (C0‖a‖)^(n−1))

    @property
    def bound_ratio(self) -> float:
        return self.c0 * self.norm_a


def neumann_series_probe(a: RingElement, spec: SeminormSpec, delta: int, terms: int = 8) -> NeumannReport:
    G = a.group
    c0 = c0_constant(spec, delta, G)
    na = evaluate(spec, a)
    if not na < 1.0 / c0:
        raise ValueError(f"premise violated: ‖a‖ = {na} is not below 1/C0 = {1 / c0}")
    power = RingElement.monomial(G, ())
    partial = power
    incs, sums, dnorms = [], [graph_norm(partial, spec, delta)], []
    for _ in range(terms):
        power = convolve(power, a)
        partial = partial + power
        incs.append(graph_norm(power, spec, delta))
        sums.append(graph_norm(partial, spec, delta))
        dnorms.append(uc_exact_l1(delta_map(power), spec))
    ratios = [incs[i + 1] / incs[i] for i in range(len(incs) - 1) if incs[i] > 0]
    fitted = 0.0
    if dnorms and dnorms[0] > 0:
        fitted = max(dn / (dnorms[0] * (c0 * na) ** i) for i, dn in enumerate(dnorms))
    return NeumannReport(c0, na, incs, ratios, sums, dnorms, fitted)


# ------------------------------------------------------- generating set change
def delta_prime(regen: RegeneratedGroup, a: RingElement) -> TensorElement:
    """Δ for the enlarged generating set, with both legs as base-group elements."""
    G = a.group
    terms = []
    for g, c in a.items():
        w = regen.sigma_prime(g)
        for i in range(len(w) + 1):
            terms.append(((regen.evaluate(w[:i]), regen.evaluate(w[i:])), c))
    return TensorElement(G, terms)


@dataclass(frozen=True)
class GensetReport:
    rho: int | None
    c_double_prime: float | None
    cap: int
    per_element: dict = field(default_factory=dict)


def compare_generating_sets(group: Group, extra: Mapping[str, str], a: RingElement,
                            inverses: Mapping[str, str] | None = None, delta: int = 1,
                            cap: int | None = None, spec: SeminormSpec | None = None) -> GensetReport:
    """Smallest ρ with |Δ'(a)| <= Σ_{l(t)<=ρ} i_t(|Δ(a)|) coefficientwise."""
    cap = 2 * delta + 4 if cap is None else cap
    spec = spec or SeminormSpec.ell1()
    regen = group.with_generators(dict(extra), dict(inverses or {}))
    lhs = absolute(delta_prime(regen, a))
    base = absolute(delta_map(a))
    per = {}
    need = 0
    for g in a.keys():
        verts = [g[:i] for i in range(len(g) + 1)]
        w = regen.sigma_prime(g)
        r = 0
        for i in range(len(w) + 1):
            x = regen.evaluate(w[:i])
            r = max(r, min(group.distance(p, x) for p in verts))
        per[g] = r
        need = max(need, r)
    if need > cap:
        return GensetReport(None, None, cap, per)
    rhs = TensorElement(group)
    for t in group.ball(need).elements:
        rhs = rhs + i_t(t, base)
    key, _ = worst_violation(lhs, rhs)
    if key is not None:
        raise AssertionError("fast radius disagrees with the tensor comparison")
    return GensetReport(need, c0_constant_radius(spec, need, group), cap, per)


def c0_constant_radius(spec: SeminormSpec, rho: int, group: Group) -> float:
    return float(sum(spec.unit_norm(t) * spec.unit_norm(group.invert(t)) for t in group.ball(rho).elements))


# ------------------------------------------------------------------ special maps
@dataclass
class SpecialMapTable:
    """ψ on a finite domain: g -> ψ(u_g).  ``fn`` evaluates outside the stored table."""

    group: Group
    table: dict
    R: float
    fn: Callable[[Word], TensorElement] | None = None

    def __call__(self, g: Word) -> TensorElement:
        hit = self.table.get(g)
        if hit is None:
            if self.fn is None:
                raise KeyError(f"{self.group.fmt(g)} outside the domain of ψ")
            hit = self.fn(g)
        return hit

    def apply(self, a: RingElement) -> TensorElement:
        G = self.group
        return TensorElement(G, ((k, c * v) for g, c in a.items() for k, v in self(g).items()))

    @classmethod
    def from_delta(cls, group: Group, radius: int, R: float = 0) -> "SpecialMapTable":
        tab = {g: delta_map(RingElement.monomial(group, g)) for g in group.ball(radius).elements}
        return cls(group, tab, R, fn=lambda g: delta_map(RingElement.monomial(group, g)))

    @classmethod
    def identity_like(cls, group: Group, radius: int) -> "SpecialMapTable":
        def f(g):
            return TensorElement(group, {(g, ()): 1.0})

        return cls(group, {g: f(g) for g in group.ball(radius).elements}, 0, fn=f)


def special_violations(psi: SpecialMapTable) -> list[tuple[Word, str]]:
    G = psi.group
    out = []
    for g, T in psi.table.items():
        verts = G.path_vertices(g)
        for (x, y), c in T.items():
            if G.multiply(x, y) != g:
                out.append((g, "i"))
                break
            if abs(c) > 1 + 1e-12:
                out.append((g, "ii"))
                break
            if min(G.distance(v, x) for v in verts) > psi.R:
                out.append((g, "iii"))
                break
    return out


def check_special(psi: SpecialMapTable) -> bool:
    return not special_violations(psi)


@dataclass(frozen=True)
class GrowthReport:
    ms: list
    l1_ratios: list
    sobolev_ratios: list
    degree_l1: float
    degree_sobolev: float
    polynomial: bool


def _slope(ms, vals) -> float:
    x = np.log(np.asarray(ms, dtype=float))
    y = np.log(np.asarray(vals, dtype=float))
    if len(x) < 2 or np.ptp(x) == 0:
        return 0.0
    return float(np.polyfit(x, y, 1)[0])


def special_growth_probe(psi: SpecialMapTable, n: int, k: float, m_max: int,
                         base: RingElement | None = None, ambient: SeminormSpec | None = None) -> GrowthReport:
    """Growth of ψ(α^m) against α^m, as an ℓ¹ ratio and as a Sobolev-bound ratio."""
    G = psi.group
    ambient = ambient or SeminormSpec.ell1()
    if base is None:
        base = RingElement(G, {(i,): 1.0 / G.n_letters for i in range(G.n_letters)})
    ms, r1, rs = [], [], []
    power = RingElement.monomial(G, ())
    for m in range(1, m_max + 1):
        power = convolve(power, base)
        image = psi.apply(power)
        ms.append(m)
        r1.append(image.l1() / power.l1())
        up_t = sobolev_minimal_bounds(image, n, k, ambient).upper
        up_r = sobolev_minimal_bounds(power, n, k, ambient).upper
        rs.append(up_t / up_r)
    d1, ds = _slope(ms, r1), _slope(ms, rs)
    last = rs[-1] / rs[-2] if len(rs) > 1 else 1.0
    poly = len(ms) < 2 or last <= (ms[-1] / ms[-2]) ** (max(d1, ds) + 2)
    return GrowthReport(ms, r1, rs, d1, ds, poly)
