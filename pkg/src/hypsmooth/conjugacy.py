"""Conjugacy reduction: class representatives, minimal conjugators, the map μ and φ.

For g with class representative h and minimal conjugator u (so u⁻¹gu = h' is a
cyclic rotation of σ(h)) the rectangle has corners e, u, u·h', g and edges
a = σ(u), b = the rotation word of h', c = σ(u⁻¹) read from u·h', d = σ(g).
μ(g) is chosen by the six-case rule; φ(g) = μ(g)⁻¹ g μ(g).
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from hypsmooth.group_kernel import CapExceeded, Group, InvariantError, Word
from hypsmooth.group_ring import RingElement, TensorElement

CASES = ("i", "ii", "iii", "iv", "v", "vi")


@dataclass(frozen=True)
class ConjugacyConfig:
    delta: int | None = None  # None: 1 for free groups, estimate_delta(3) otherwise
    c10: float = 1.0
    slack: int = 2  # extra length allowed while searching a class
    conj_slack: int | None = 4  # extra length for intermediate conjugates; None disables pruning
    max_states: int = 200_000
    max_iterations: int = 64


@dataclass(frozen=True)
class ClassRep:
    representative: Word
    certified: bool
    certified_radius: int
    states: int

    @property
    def length(self) -> int:
        return len(self.representative)


@dataclass(frozen=True)
class Conjugator:
    u: Word
    h_prime: Word
    rotation: int  # h' is represented by σ(h)[m:] + σ(h)[:m]


@dataclass(frozen=True)
class PhiStep:
    source: Word
    case: str
    mu: Word
    target: Word


@dataclass
class PhiTrace:
    start: Word
    steps: list[PhiStep] = field(default_factory=list)
    accumulator: Word = ()
    iterations: int = 0

    @property
    def value(self) -> Word:
        return self.steps[-1].target if self.steps else self.start

    @property
    def cases(self) -> list[str]:
        return [s.case for s in self.steps]

    def to_json_obj(self, group: Group) -> dict:
        f = group.fmt
        return {
            "start": f(self.start),
            "value": f(self.value),
            "iterations": self.iterations,
            "accumulator": f(self.accumulator),
            "steps": [
                {"input": f(s.source), "case": s.case, "mu": f(s.mu), "output": f(s.target)}
                for s in self.steps
            ],
        }


class ConjugacyEngine:
    """All conjugacy computations for one group, with memoization."""

    def __init__(self, group: Group, config: ConjugacyConfig = ConjugacyConfig()):
        self.group = group
        self.config = config
        if config.delta is None:
            self.delta = 1 if group.spec.kind == "free" else group.estimate_delta(3)
        else:
            if config.delta < 1:
                raise ValueError("delta must be >= 1")
            self.delta = config.delta
        self._reps: dict[Word, ClassRep] = {}
        self._conj: dict[Word, Conjugator] = {}
        self._mu: dict[Word, tuple[Word, str]] = {}

    # --------------------------------------------------------------- classes
    def class_representative(self, g) -> ClassRep:
        G = self.group
        g = G.element(g)
        hit = self._reps.get(g)
        if hit is not None:
            return hit
        rep = self._search_class(g)
        self._reps[g] = rep
        return rep

    def class_key(self, g: Word) -> Word:
        return self.class_representative(g).representative

    def are_conjugate(self, g, h) -> bool:
        return self.class_key(self.group.element(g)) == self.class_key(self.group.element(h))

    def _search_class(self, g: Word) -> ClassRep:
        G = self.group
        cfg = self.config
        depth_cap = max(1, math.ceil(2 * cfg.c10 * len(g)))
        # greedy descent first, so the bounded-slack search starts near the minimum
        x, steps = g, 0
        while steps < depth_cap:
            best = min(
                ((len(y), y) for y in (G.conjugate(x, (s,)) for s in range(G.n_letters))),
                default=(len(x), x),
            )
            if best[0] >= len(x):
                break
            x = best[1]
            steps += 1
        best_len = len(x)
        seen = {x: steps}
        frontier = [x]
        depth = steps
        exhausted = True
        while frontier:
            if depth >= depth_cap:
                exhausted = False
                break
            nxt = []
            for y in frontier:
                if len(y) > best_len + cfg.slack:
                    continue
                for s in range(G.n_letters):
                    z = G.conjugate(y, (s,))
                    if z in seen or len(z) > best_len + cfg.slack:
                        continue
                    seen[z] = depth + 1
                    nxt.append(z)
                    if len(z) < best_len:
                        best_len = len(z)
            if len(seen) > cfg.max_states:
                exhausted = False
                break
            frontier = nxt
            depth += 1
        rep = min((len(y), y) for y in seen)[1]
        result = ClassRep(rep, exhausted, depth, len(seen))
        if exhausted:
            for y in seen:
                self._reps.setdefault(y, result)
        return result

    # ----------------------------------------------------------- conjugators
    def rotations(self, h: Word) -> dict[Word, int]:
        """Element of each rotation σ(h)[m:]+σ(h)[:m] -> largest such m in 0..n."""
        G = self.group
        out: dict[Word, int] = {}
        for m in range(len(h) + 1):
            out[G.normalize(h[m:] + h[:m])] = m
        return out

    def conjugator(self, g, prune: bool = True) -> Conjugator:
        G = self.group
        g = G.element(g)
        if prune:
            hit = self._conj.get(g)
            if hit is not None:
                return hit
        cfg = self.config
        h = self.class_key(g)
        rot = self.rotations(h)
        if g in rot:
            res = Conjugator((), g, rot[g])
        else:
            bound = None
            if prune and cfg.conj_slack is not None:
                # along a shortest conjugator the conjugates shrink by about two letters per step
                lg, lh, sl = len(g), len(h), cfg.conj_slack
                bound = lambda i: max(lg - 2 * i, lh) + sl  # noqa: E731
            depth_cap = max(1, math.ceil(2 * cfg.c10 * len(g)))
            res = self._conjugator_bfs(g, rot, bound, depth_cap)
        if prune:
            self._conj[g] = res
        return res

    def _conjugator_bfs(self, g, rot, bound, depth_cap) -> Conjugator:
        G = self.group
        frontier = [((), g)]
        visited = {()}
        for depth in range(depth_cap):
            nxt = []
            for v, x in frontier:
                for s in range(G.n_letters):
                    v2 = G.normalize(v + (s,))
                    if v2 in visited or len(v2) != depth + 1:
                        continue
                    visited.add(v2)
                    x2 = G.conjugate(x, (s,))
                    if bound is not None and len(x2) > bound(depth + 1):
                        continue
                    nxt.append((v2, x2))
            hits = [(v2, x2) for v2, x2 in nxt if x2 in rot]
            if hits:
                v2, x2 = min(hits)
                return Conjugator(v2, x2, rot[x2])
            if len(visited) > self.config.max_states:
                raise CapExceeded(f"conjugator search for {G.fmt(g)} exceeds {self.config.max_states} states")
            frontier = nxt
        raise CapExceeded(f"no conjugator for {G.fmt(g)} within length {depth_cap}")

    def minimal_conjugator(self, g) -> tuple[Word, Word]:
        c = self.conjugator(g)
        G = self.group
        u = c.u
        if len(u) > 2 * self.config.c10 * len(G.element(g)) + 1e-12:
            raise InvariantError("conjugator longer than the configured Gromov bound")
        return c.u, c.h_prime

    # ------------------------------------------------------------------- mu
    def mu(self, g) -> tuple[Word, str]:
        G = self.group
        g = G.element(g)
        hit = self._mu.get(g)
        if hit is not None:
            return hit
        res = self._mu_uncached(g)
        self._mu[g] = res
        return res

    def _mu_uncached(self, g: Word) -> tuple[Word, str]:
        G = self.group
        d = self.delta
        if not g:
            return (), "i"
        c = self.conjugator(g)
        h = self.class_key(g)
        u = c.u
        if not u:
            m = max(k for k in range(len(h) + 1) if G.normalize(h[k:] + h[:k]) == g)
            return G.normalize(h[m:]), "ii"
        if len(u) <= 2 * d:
            return u, "iii"
        if len(u) <= 24 * self.config.c10 * d:
            return u[: 2 * d], "iv"
        mid = g[: len(g) // 2]
        word_b = h[c.rotation :] + h[: c.rotation]
        edge_b = [G.normalize(u + word_b[:i]) for i in range(len(word_b) + 1)]
        near_b = [v for v in edge_b if G.distance(v, mid) <= 2 * d]
        if near_b:
            return min(near_b, key=lambda v: (len(v), v)), "v"
        edge_a = G.path_vertices(u)
        corner_c = G.normalize(u + c.h_prime)
        uinv = G.invert(u)
        edge_c = [G.normalize(corner_c + uinv[:i]) for i in range(len(uinv) + 1)]
        for edge in (edge_a, edge_c):
            near = [v for v in edge if G.distance(v, mid) <= 2 * d]
            if near:
                return min(near, key=lambda v: (len(v), v)), "vi"
        raise InvariantError(f"no case of μ applies to {G.fmt(g)}; the rectangle is thicker than 2δ")

    def phi(self, g) -> Word:
        G = self.group
        g = G.element(g)
        m, _ = self.mu(g)
        return G.conjugate(g, m)

    def psi(self, g) -> TensorElement:
        G = self.group
        g = G.element(g)
        m, _ = self.mu(g)
        return TensorElement(G, {(m, G.normalize(G.alphabet.invert_word(m) + g)): 1.0})

    def factorization_check(self, g) -> bool:
        from hypsmooth.group_ring import mult_tensor, swap

        G = self.group
        g = G.element(g)
        return mult_tensor(swap(self.psi(g))) == RingElement.monomial(G, self.phi(g))

    def psi_table(self, radius: int):
        from hypsmooth.quasiderivation import SpecialMapTable

        G = self.group
        table = {g: self.psi(g) for g in G.ball(radius).elements}
        return SpecialMapTable(G, table, R=2 * self.delta + 1)

    # ------------------------------------------------------------ iteration
    def big_phi(self, g) -> tuple[ClassRep, PhiTrace]:
        G = self.group
        g = G.element(g)
        trace = PhiTrace(g)
        cur, w = g, ()
        for it in range(self.config.max_iterations + 1):
            m, case = self.mu(cur)
            nxt = G.conjugate(cur, m)
            w = G.multiply(w, m)
            trace.steps.append(PhiStep(cur, case, m, nxt))
            if G.conjugate(g, w) != nxt:
                raise InvariantError(f"accumulator fails at step {it} for {G.fmt(g)}")
            if nxt == cur:
                trace.iterations = it
                trace.accumulator = w
                break
            cur = nxt
        else:
            trace.accumulator = w
            raise InvariantError(
                f"φ did not stabilize within {self.config.max_iterations} iterations for {G.fmt(g)}: {trace.cases}"
            )
        rep = self.class_representative(g)
        if cur != rep.representative:
            raise InvariantError(
                f"fixed point {G.fmt(cur)} differs from representative {G.fmt(rep.representative)}"
            )
        return rep, trace

    def phi_linear(self, a: RingElement) -> RingElement:
        return RingElement(a.group, ((self.phi(g), c) for g, c in a.items()))

    def big_phi_linear(self, a: RingElement) -> RingElement:
        return RingElement(a.group, ((self.class_key(g), c) for g, c in a.items()))

    # --------------------------------------------------------------- probes
    def gromov_probe(self, r: int, prune_slack: int | None = 2) -> "GromovReport":
        """Max l(u)/(l(g)+l(g')) over conjugate pairs in ball(r), u a shortest conjugator."""
        G = self.group
        elems = G.ball(r).elements
        classes: dict[Word, list[Word]] = defaultdict(list)
        for g in elems:
            classes[self.class_key(g)].append(g)
        worst, worst_pair, pairs = 0.0, None, 0
        depth_cap = 2 * r
        for members in classes.values():
            if len(members) < 2:
                continue
            targets = set(members)
            for g in members:
                lengths = self._conjugator_lengths(g, targets, depth_cap, prune_slack and 2 * r + prune_slack)
                for g2 in members:
                    if g2 == g:
                        continue
                    if g2 not in lengths:
                        raise CapExceeded(f"no conjugator {G.fmt(g)} -> {G.fmt(g2)} within {depth_cap}")
                    pairs += 1
                    ratio = lengths[g2] / (len(g) + len(g2))
                    if ratio > worst:
                        worst, worst_pair = ratio, (g, g2, lengths[g2])
        return GromovReport(r, worst, worst_pair, pairs, len(classes))

    def _conjugator_lengths(self, g, targets, depth_cap, bound) -> dict[Word, int]:
        G = self.group
        found = {g: 0} if g in targets else {}
        frontier = [((), g)]
        visited = {()}
        for depth in range(depth_cap):
            if len(found) == len(targets):
                break
            nxt = []
            for v, x in frontier:
                for s in range(G.n_letters):
                    v2 = G.normalize(v + (s,))
                    if v2 in visited or len(v2) != depth + 1:
                        continue
                    visited.add(v2)
                    x2 = G.conjugate(x, (s,))
                    if bound is not None and len(x2) > bound:
                        continue
                    if x2 in targets and x2 not in found:
                        found[x2] = depth + 1
                    nxt.append((v2, x2))
            frontier = nxt
        return found

    def convergence_profile(self, r: int | None = None, elements: Iterable[Word] | None = None) -> "ConvergenceProfile":
        G = self.group
        if elements is None:
            elements = G.ball(r).elements
        per_len: dict[int, int] = defaultdict(int)
        rows = []
        for g in elements:
            _, tr = self.big_phi(g)
            rows.append((len(g), tr.iterations))
            per_len[len(g)] = max(per_len[len(g)], tr.iterations)
        c11, c12 = fit_log_envelope(per_len)
        resid = max((it - (c11 * math.log2(1 + l) + c12) for l, it in per_len.items()), default=0.0)
        return ConvergenceProfile(rows, dict(sorted(per_len.items())), c11, c12, resid)


@dataclass(frozen=True)
class GromovReport:
    radius: int
    c10: float
    worst_pair: tuple | None
    pairs: int
    classes: int


@dataclass(frozen=True)
class ConvergenceProfile:
    rows: list
    max_by_length: dict
    c11: float
    c12: float
    worst_residual: float

    @property
    def max_iterations(self) -> int:
        return max(self.max_by_length.values(), default=0)


def fit_log_envelope(max_by_length: dict[int, int]) -> tuple[float, float]:
    """Smallest (in aggregate) C11, C12 >= 0 with it <= C11·log2(1+l) + C12 for every length."""
    from scipy.optimize import linprog

    if not max_by_length:
        return 0.0, 0.0
    ls = np.array(sorted(max_by_length), dtype=float)
    its = np.array([max_by_length[int(l)] for l in ls], dtype=float)
    x = np.log2(1 + ls)
    res = linprog(
        c=[x.sum(), len(x)],
        A_ub=np.column_stack([-x, -np.ones_like(x)]),
        b_ub=-its,
        bounds=[(0, None), (0, None)],
        method="highs",
    )
    if not res.success:
        return 0.0, float(its.max())
    return float(res.x[0]), float(res.x[1])


def conjugacy_engine(group: Group, config: ConjugacyConfig | None = None) -> ConjugacyEngine:
    """The shared engine for ``group`` (created on first use)."""
    eng = getattr(group, "_conj_engine", None)
    if config is not None and (eng is None or eng.config != config):
        eng = ConjugacyEngine(group, config)
        group._conj_engine = eng
    elif eng is None:
        eng = ConjugacyEngine(group)
        group._conj_engine = eng
    return eng


def free_cyclic_oracle(group: Group, g: Word) -> Word:
    """Shortlex-least rotation of the cyclic reduction (free groups only)."""
    inv = group.inv
    w = list(group.free_reduce(g))
    while len(w) >= 2 and w[0] == inv[w[-1]]:
        w = w[1:-1]
    if not w:
        return ()
    return min(tuple(w[k:] + w[:k]) for k in range(len(w)))
