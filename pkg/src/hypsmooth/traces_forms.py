"""Class functions, traces through Φ, temperedness trends, and homogeneous form estimates."""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from hypsmooth.conjugacy import conjugacy_engine
from hypsmooth.group_kernel import Group, Word
from hypsmooth.group_ring import FormElement, RingElement, convolve, form_project, project_class
from hypsmooth.norms import SeminormSpec, minimal_norm_bounds


class UncertifiedClass(RuntimeError):
    pass


PARAMETRIC = ("constant", "exp_length", "power_length")


@dataclass(frozen=True)
class ClassFunction:
    """τ on conjugacy classes: finitely supported (keyed by class representative) or parametric in l(⟨x⟩)."""

    group: Group
    kind: str
    values: Mapping[Word, complex] = field(default_factory=dict)
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in ("finite",) + PARAMETRIC:
            raise ValueError(f"unknown class function kind {self.kind!r}")

    @classmethod
    def indicator(cls, group: Group, x) -> "ClassFunction":
        rep = _rep(group, group.element(x))
        return cls(group, "finite", {rep: 1.0})

    @classmethod
    def finite(cls, group: Group, values: Mapping) -> "ClassFunction":
        """``values`` maps any class members (words or strings) to values; keys are replaced by representatives."""
        out: dict[Word, complex] = {}
        for x, v in values.items():
            out[_rep(group, group.element(x))] = complex(v)
        return cls(group, "finite", out)

    @classmethod
    def parametric(cls, group: Group, kind: str, param: float = 0.0) -> "ClassFunction":
        return cls(group, kind, {}, param)

    def of_length(self, l: int) -> complex:
        if self.kind == "constant":
            return 1.0
        if self.kind == "exp_length":
            return self.param**l
        if self.kind == "power_length":
            return (1.0 + l) ** self.param
        raise ValueError("finite class functions are not functions of length")

    def at_rep(self, rep: Word) -> complex:
        if self.kind == "finite":
            return complex(self.values.get(rep, 0.0))
        return complex(self.of_length(len(rep)))

    def __call__(self, g) -> complex:
        return self.at_rep(_rep(self.group, self.group.element(g)))


def _rep(group: Group, g: Word) -> Word:
    r = conjugacy_engine(group).class_representative(g)
    if not r.certified:
        raise UncertifiedClass(f"class of {group.fmt(g)} is not certified")
    return r.representative


# ---------------------------------------------------------------------- traces
def phi_path(a: RingElement) -> RingElement:
    """Φ applied linearly, computed by iterating φ to its fixed point."""
    eng = conjugacy_engine(a.group)
    return RingElement(a.group, ((eng.big_phi(g)[1].value, c) for g, c in a.items()))


def trace_eval(tau: ClassFunction, a: RingElement, tol: float = 1e-9) -> complex:
    """τ'(a) = ℓ_τ(Φ(a)), cross-checked against Σ_g τ(⟨g⟩) a_g."""
    via_phi = sum(tau.at_rep(h) * c for h, c in phi_path(a).items())
    direct = sum(tau(g) * c for g, c in a.items())
    scale = max(1.0, sum(abs(c) for _, c in a.items()))
    if abs(via_phi - direct) > tol * scale:
        raise AssertionError(f"trace paths disagree: {via_phi} vs {direct}")
    return complex(via_phi)


def trace_commutator_gap(tau: ClassFunction, a: RingElement, b: RingElement) -> float:
    return abs(trace_eval(tau, convolve(a, b)) - trace_eval(tau, convolve(b, a)))


@dataclass(frozen=True)
class TemperedReport:
    tempered: bool | None  # definite only for finitely supported τ
    verdicts: dict  # k -> "convergent-looking" / "divergent-looking" / "tempered"
    partial_sums: dict  # k -> list over shells of cumulative sums
    shell_classes: list  # number of classes with representative length ℓ
    empirical: bool


def class_shells(group: Group, radius: int) -> dict[int, list[Word]]:
    """Class representatives by length, for every class meeting ball(radius)."""
    reps = {_rep(group, g) for g in group.ball(radius).elements}
    shells: dict[int, list[Word]] = defaultdict(list)
    for r in sorted(reps):
        shells[len(r)].append(r)
    return {l: shells.get(l, []) for l in range(radius + 1)}


def is_tempered(tau: ClassFunction, k_max: int, radius: int) -> TemperedReport:
    if tau.kind == "finite":
        return TemperedReport(True, {k: "tempered" for k in range(k_max + 1)}, {}, [], False)
    shells = class_shells(tau.group, radius)
    counts = [len(shells[l]) for l in range(radius + 1)]
    verdicts, sums = {}, {}
    for k in range(k_max + 1):
        contrib = [
            sum(abs(tau.at_rep(r)) ** 2 for r in shells[l]) * (1.0 + l) ** (-2 * k)
            for l in range(radius + 1)
        ]
        sums[k] = list(np.cumsum(contrib))
        verdicts[k] = _trend(contrib)
    return TemperedReport(None, verdicts, sums, counts, True)


def _trend(contrib: Sequence[float]) -> str:
    """Joint fit log c(l) = αl + β·log(1+l) + γ; exponential growth or β >= -1 reads as divergent."""
    ls = [l for l, c in enumerate(contrib) if c > 0 and l >= 1]
    if len(ls) < 4:
        return "convergent-looking"
    x = np.asarray(ls, dtype=float)
    A = np.column_stack([x, np.log1p(x), np.ones_like(x)])
    alpha, beta, _ = np.linalg.lstsq(A, np.log([contrib[l] for l in ls]), rcond=None)[0]
    if alpha > 0.05:
        return "divergent-looking"
    if alpha < -0.05:
        return "convergent-looking"
    return "convergent-looking" if beta < -1.0 else "divergent-looking"


# ---------------------------------------------------------------- restriction
@dataclass(frozen=True)
class RestrictionReport:
    rows: list  # (radius, samples, max ratio)
    max_ratio: float
    growth_flag: bool


def restriction_probe(x, n: int, ambient: SeminormSpec, samples: int, group: Group,
                      radii: Sequence[int] = (2, 3, 4), seed: int = 0) -> RestrictionReport:
    """max ‖m_⟨x⟩(a)‖₁ / upper(‖a‖_n) over random and adversarial samples, by support radius."""
    rng = np.random.default_rng(seed)
    G = group
    x = G.element(x)
    rows = []
    per = max(1, samples // max(1, len(radii)))
    for r in radii:
        elems = G.ball(r).elements
        worst = 0.0
        for _ in range(per):
            k = int(rng.integers(1, 6))
            idx = rng.choice(len(elems), size=min(k, len(elems)), replace=False)
            a = RingElement(G, [(elems[i], complex(rng.normal(), rng.normal())) for i in idx])
            worst = max(worst, _ratio(a, x, n, ambient))
        t = RingElement(G, {g: 1.0 / len(G.ball(n).elements) for g in G.ball(n).elements})
        p = RingElement.monomial(G, ())
        for _ in range(max(1, r // n)):
            p = convolve(p, t)
        worst = max(worst, _ratio(p, x, n, ambient))
        rows.append((r, per + 1, worst))
    ratios = [w for _, _, w in rows]
    flag = len(ratios) > 2 and all(b > 1.5 * a > 0 for a, b in zip(ratios, ratios[1:]))
    return RestrictionReport(rows, max(ratios, default=0.0), flag)


def _ratio(a: RingElement, x: Word, n: int, ambient: SeminormSpec) -> float:
    up = minimal_norm_bounds(a, n, ambient).upper
    return project_class(a, x).l1() / up if up > 0 else 0.0


# ---------------------------------------------------------------------- forms
def form_from_factors(factors: Sequence[RingElement]) -> FormElement:
    """a⁰ da¹ … daᵐ expanded over tuples (g0, …, gm)."""
    G = factors[0].group
    terms = []
    for combo in itertools.product(*(list(f.items()) for f in factors)):
        key = tuple(g for g, _ in combo)
        c = 1.0 + 0j
        for _, v in combo:
            c *= v
        terms.append((key, c))
    return FormElement(G, len(factors) - 1, terms)


def weighted_form_norm(w: FormElement, lam: float) -> float:
    return float(sum(abs(c) * lam ** sum(len(g) for g in key) for key, c in w.items()))


@dataclass(frozen=True)
class ChainReport:
    lhs: float
    rhs: float
    holds: bool


def form_norm_chain_check(factors: Sequence[RingElement], x, lam: float, n: int = 1,
                          tol: float = 1e-9) -> ChainReport:
    """‖π_⟨x⟩(a⁰da¹…daᵐ)‖_{ℓ¹_λ} <= ‖m_⟨x⟩(β₀⋯β_m)‖_{ℓ¹} with β_i = Σ |aⁱ_g| λ^{l(g)} u_g."""
    if lam <= 1:
        raise ValueError("lam must be > 1")
    G = factors[0].group
    x = G.element(x)
    lhs = weighted_form_norm(form_project(form_from_factors(factors), x), lam)
    betas = [RingElement(G, ((g, abs(c) * lam ** len(g)) for g, c in f.items())) for f in factors]
    prod = betas[0]
    for b in betas[1:]:
        prod = convolve(prod, b)
    rhs = project_class(prod, x).l1()
    return ChainReport(lhs, rhs, lhs <= rhs + tol * max(1.0, rhs))
