"""Closed-form unconditional seminorms and certified bounds for norms defined by infima.

A :class:`BoundCertificate` carries an interval [lower, upper] together with
witnesses that can be replayed without trusting the search that produced them:

* the upper witness is a finite family of nonnegative products whose weighted
  sum dominates |target| coefficientwise, and whose cost is ``upper``;
* the lower witness is a nonnegative dual functional (or a closed-form witness
  norm) whose value on |target| is ``lower``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix

from hypsmooth.group_kernel import Group, Word
from hypsmooth.group_ring import RingElement, TensorElement, absolute, convolve, tensor

TAGS = ("ell1", "ell1_lambda", "ellinf", "sobolev2", "weighted_ell1")
THETA = 1.0 - 1e-12  # strict interiority factor for the open ball U
LEG_L1, LEG_L2, LEG_INF = "l1w", "l2w", "linf"


@dataclass(frozen=True)
class Weight:
    """Positive weight on Γ: ``exp_length`` b^l(g), ``poly_length`` (1+l(g))^p, or ``table``."""

    kind: str
    param: float = 1.0
    table: Mapping[Word, float] | None = None
    default: float = 1.0

    def __call__(self, g: Word) -> float:
        if self.kind == "exp_length":
            return self.param ** len(g)
        if self.kind == "poly_length":
            return (1.0 + len(g)) ** self.param
        if self.kind == "table":
            return float((self.table or {}).get(g, self.default))
        raise ValueError(f"unknown weight kind {self.kind!r}")


@dataclass(frozen=True)
class SeminormSpec:
    tag: str
    lam: float | None = None
    k: float | None = None
    weight: Callable[[Word], float] | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown seminorm tag {self.tag!r}")
        if self.tag == "ell1_lambda" and not (self.lam is not None and self.lam > 1):
            raise ValueError("ell1_lambda needs lam > 1")
        if self.tag == "sobolev2" and not (self.k is not None and self.k >= 0):
            raise ValueError("sobolev2 needs k >= 0")
        if self.tag == "weighted_ell1" and self.weight is None:
            raise ValueError("weighted_ell1 needs a weight")

    @classmethod
    def ell1(cls):
        return cls("ell1")

    @classmethod
    def ell1_lambda(cls, lam: float):
        return cls("ell1_lambda", lam=lam)

    @classmethod
    def ellinf(cls):
        return cls("ellinf")

    @classmethod
    def sobolev2(cls, k: float):
        return cls("sobolev2", k=k)

    @classmethod
    def weighted_ell1(cls, weight):
        return cls("weighted_ell1", weight=weight)

    @classmethod
    def parse(cls, text: str) -> "SeminormSpec":
        """``ell1``, ``ell1_lambda:1.5``, ``ellinf``, ``sobolev2:2``, ``l2`` (= sobolev2:0)."""
        tag, _, arg = text.partition(":")
        if tag == "l2":
            return cls.sobolev2(0)
        if tag == "ell1_lambda":
            return cls.ell1_lambda(float(arg))
        if tag == "sobolev2":
            return cls.sobolev2(float(arg or 0))
        if tag == "weighted_ell1":
            return cls.weighted_ell1(Weight("exp_length", float(arg or 1)))
        return cls(tag)

    @property
    def is_l1_type(self) -> bool:
        return self.tag in ("ell1", "ell1_lambda", "weighted_ell1")

    def unit_norm(self, g: Word) -> float:
        """‖u_g‖."""
        if self.tag == "ell1" or self.tag == "ellinf":
            return 1.0
        if self.tag == "ell1_lambda":
            return self.lam ** len(g)
        if self.tag == "sobolev2":
            return (1.0 + len(g)) ** self.k
        return float(self.weight(g))

    def leg(self, keys: Sequence[Word]) -> tuple[str, np.ndarray]:
        """Leg kind and per-coordinate weights for vectors indexed by ``keys``."""
        v = np.array([self.unit_norm(g) for g in keys], dtype=float)
        if self.tag == "ellinf":
            return LEG_INF, v
        if self.tag == "sobolev2":
            return LEG_L2, v
        return LEG_L1, v

    def label(self) -> str:
        if self.tag == "ell1_lambda":
            return f"ell1_lambda:{self.lam:g}"
        if self.tag == "sobolev2":
            return f"sobolev2:{self.k:g}"
        if self.tag == "weighted_ell1":
            w = self.weight
            if isinstance(w, Weight) and w.kind != "table":
                return f"weighted_ell1:{w.kind}:{w.param:g}"
            return "weighted_ell1"
        return self.tag


def leg_norm(kind: str, v: np.ndarray, x: np.ndarray) -> float:
    x = np.abs(x)
    if kind == LEG_L1:
        return float(np.dot(v, x))
    if kind == LEG_L2:
        return float(np.sqrt(np.dot(v * v, x * x)))
    return float(x.max(initial=0.0))


def leg_dual_norm(kind: str, v: np.ndarray, xi: np.ndarray) -> float:
    xi = np.abs(xi)
    if kind == LEG_L1:
        return float(np.max(xi / v, initial=0.0))
    if kind == LEG_L2:
        return float(np.sqrt(np.dot(xi * xi, 1.0 / (v * v))))
    return float(xi.sum())


def _best_response(kind: str, v: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Nonnegative ξ of dual norm <= 1 maximizing ξ·z for z >= 0."""
    if kind == LEG_L1:
        return v.copy()
    if kind == LEG_L2:
        s = math.sqrt(float(np.dot(v * v, z * z)))
        return v * v * z / s if s > 0 else np.zeros_like(z)
    out = np.zeros_like(z)
    if len(z):
        out[int(np.argmax(z))] = 1.0
    return out


def evaluate(spec: SeminormSpec, a) -> float:
    """Closed-form value of ``spec`` on a RingElement (or a coefficient map)."""
    items = a.items()
    if spec.tag == "ellinf":
        return float(max((abs(c) for _, c in items), default=0.0))
    if spec.tag == "sobolev2":
        return float(math.sqrt(sum(((1.0 + len(g)) ** spec.k * abs(c)) ** 2 for g, c in items)))
    return float(sum(spec.unit_norm(g) * abs(c) for g, c in items))


eval_norm = evaluate


def associated_unconditional_upper(a, raw_norm: Callable) -> float:
    """raw_norm(|a|): the β = |a| member of the infimum defining the associated unconditional seminorm."""
    return float(raw_norm(absolute(a)))


def trace_norm(matrix) -> float:
    return float(np.linalg.svd(np.asarray(matrix, dtype=complex), compute_uv=False).sum())


def projective_norm_l2(T: TensorElement) -> float:
    """Projective ℓ²⊗ℓ² norm = trace norm of the coefficient matrix."""
    if not T:
        return 0.0
    m, _, _ = T.to_matrix()
    return trace_norm(m)


# ------------------------------------------------------------------ certificates
@dataclass
class BoundCertificate:
    """Certified interval [lower, upper] for an intractable norm of ``target``.

    ``kind`` is ``"uc"`` (tensor cross-norm), ``"minimal"`` (‖·‖_n), ``"sobolev"``
    (‖·‖_{n,k} on CΓ) or ``"sobolev_tensor"`` (‖·‖_{n,k} on CΓ⊗CΓ).
    """

    kind: str
    target: object
    lower: float
    upper: float
    params: dict
    lower_witness: dict
    upper_witness: list
    flags: list = field(default_factory=list)

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float, tol: float = 1e-9) -> bool:
        return self.lower - tol <= x <= self.upper + tol

    def verify(self, tol: float = 1e-9) -> bool:
        return not self.problems(tol)

    def problems(self, tol: float = 1e-9) -> list[str]:
        out = []
        if self.lower > self.upper + tol:
            out.append(f"lower {self.lower} > upper {self.upper}")
        if self.kind == "uc":
            out += _verify_uc(self, tol)
        else:
            out += _verify_minimal(self, tol)
        return out

    def to_json_obj(self) -> dict:
        G = self.target.group
        f = G.fmt
        if self.kind == "uc":
            up = [
                {"c": c, "p": {f(x): val for x, val in p.items()}, "q": {f(y): val for y, val in q.items()}}
                for c, p, q in self.upper_witness
            ]
            lw = {
                "xi": {f(x): val for x, val in self.lower_witness["xi"].items()},
                "eta": {f(y): val for y, val in self.lower_witness["eta"].items()},
            }
        else:
            up = [
                {"c": c, "left": [f(b) for b in left], "right": [f(b) for b in right] if right is not None else None}
                for c, left, right in self.upper_witness
            ]
            lw = dict(self.lower_witness)
        from hypsmooth.group_ring import to_json_obj

        return {
            "kind": self.kind,
            "lower": self.lower,
            "upper": self.upper,
            "params": {k: (v.label() if isinstance(v, SeminormSpec) else v) for k, v in self.params.items()},
            "target": to_json_obj(self.target),
            "lower_witness": lw,
            "upper_witness": up,
            "flags": list(self.flags),
        }

    @classmethod
    def from_json_obj(cls, group: Group, obj: Mapping) -> "BoundCertificate":
        from hypsmooth.group_ring import from_json_obj

        params = {
            k: (SeminormSpec.parse(v) if k in ("specX", "specY", "ambient") else v)
            for k, v in obj["params"].items()
        }
        target = from_json_obj(group, obj["target"])
        P = group.parse
        if obj["kind"] == "uc":
            up = [
                (a["c"], {P(x): v for x, v in a["p"].items()}, {P(y): v for y, v in a["q"].items()})
                for a in obj["upper_witness"]
            ]
            lw = {
                "xi": {P(x): v for x, v in obj["lower_witness"]["xi"].items()},
                "eta": {P(y): v for y, v in obj["lower_witness"]["eta"].items()},
            }
        else:
            up = [
                (t["c"], tuple(P(b) for b in t["left"]), tuple(P(b) for b in t["right"]) if t["right"] is not None else None)
                for t in obj["upper_witness"]
            ]
            lw = dict(obj["lower_witness"])
        return cls(obj["kind"], target, obj["lower"], obj["upper"], params, lw, up, list(obj.get("flags", [])))


# -------------------------------------------------------------------- uc-norm
def _uc_setup(T: TensorElement, specX: SeminormSpec, specY: SeminormSpec):
    xs, ys = T.legs()
    M = np.abs(T.to_matrix(xs, ys)[0])
    kx, vx = specX.leg(xs)
    ky, vy = specY.leg(ys)
    return xs, ys, M, (kx, vx), (ky, vy)


def _uc_domination(M_shape, xs, ys, atoms):
    xi = {x: i for i, x in enumerate(xs)}
    yi = {y: j for j, y in enumerate(ys)}
    D = np.zeros(M_shape)
    for c, p, q in atoms:
        for x, pv in p.items():
            for y, qv in q.items():
                D[xi[x], yi[y]] += c * pv * qv
    return D


def ucnorm_bounds(T: TensorElement, specX: SeminormSpec, specY: SeminormSpec,
                  power_steps: int = 200, perron_atoms: int = 4) -> BoundCertificate:
    """Certified bounds for the largest unconditional cross-norm of T."""
    params = {"specX": specX, "specY": specY}
    if not T:
        return BoundCertificate("uc", T, 0.0, 0.0, params, {"xi": {}, "eta": {}}, [])
    xs, ys, M, (kx, vx), (ky, vy) = _uc_setup(T, specX, specY)
    lower, xi, eta = _uc_lower(M, (kx, vx), (ky, vy), power_steps)
    atoms = _uc_atoms(M, perron_atoms)
    costs = np.array([leg_norm(kx, vx, p) * leg_norm(ky, vy, q) for p, q in atoms])
    if kx == LEG_L1 and ky == LEG_L1:
        # rows already attain the positive dual value
        coef = np.zeros(len(atoms))
        coef[: M.shape[0]] = 1.0
    else:
        coef = _uc_lp(M, atoms, costs)
    chosen = [(float(c), p, q) for c, (p, q) in zip(coef, atoms) if c > 0]
    witness = [
        (c, {xs[i]: float(p[i]) for i in np.nonzero(p)[0]}, {ys[j]: float(q[j]) for j in np.nonzero(q)[0]})
        for c, p, q in chosen
    ]
    witness = _make_dominating(witness, M, xs, ys)
    upper = _uc_cost(witness, specX, specY)
    lw = {"xi": {xs[i]: float(xi[i]) for i in range(len(xs))}, "eta": {ys[j]: float(eta[j]) for j in range(len(ys))}}
    return BoundCertificate("uc", T, lower, max(upper, lower), params, lw, witness)


def _uc_cost(witness, specX, specY) -> float:
    total = 0.0
    for c, p, q in witness:
        px, vx = specX.leg(list(p))
        qy, vy = specY.leg(list(q))
        total += c * leg_norm(px, vx, np.array(list(p.values()))) * leg_norm(qy, vy, np.array(list(q.values())))
    return float(total)


def _make_dominating(witness, M, xs, ys):
    witness = [(c * (1 + 1e-12), p, q) for c, p, q in witness]
    for _ in range(5):
        D = _uc_domination(M.shape, xs, ys, witness)
        mask = M > 0
        if np.all(D[mask] >= M[mask]):
            return witness
        ratio = float(np.max(M[mask] / np.where(D[mask] > 0, D[mask], np.inf), initial=1.0))
        if not np.isfinite(ratio) or np.any(D[mask] == 0):
            raise RuntimeError("decomposition does not cover the support")
        witness = [(c * ratio * (1 + 1e-12), p, q) for c, p, q in witness]
    raise RuntimeError("could not make the decomposition dominate")


def _uc_atoms(M: np.ndarray, perron_atoms: int) -> list[tuple[np.ndarray, np.ndarray]]:
    nx, ny = M.shape
    atoms = []
    eye_x, eye_y = np.eye(nx), np.eye(ny)
    for i in range(nx):
        atoms.append((eye_x[i], M[i].copy()))
    for j in range(ny):
        atoms.append((M[:, j].copy(), eye_y[j]))
    for i, j in zip(*np.nonzero(M)):
        atoms.append((eye_x[i], eye_y[j]))
    for i in range(nx):
        atoms.append((eye_x[i], (M[i] > 0).astype(float)))
    for j in range(ny):
        atoms.append(((M[:, j] > 0).astype(float), eye_y[j]))
    if nx <= 4 and ny <= 4:
        for A in range(1, 2**nx):
            for B in range(1, 2**ny):
                p = np.array([(A >> i) & 1 for i in range(nx)], dtype=float)
                q = np.array([(B >> j) & 1 for j in range(ny)], dtype=float)
                atoms.append((p, q))
    R = M.copy()
    for _ in range(perron_atoms):
        if not np.any(R > 0):
            break
        u, s, vt = np.linalg.svd(R)
        p, q = np.abs(u[:, 0]), np.abs(vt[0])
        if s[0] <= 0:
            break
        atoms.append((p * s[0], q))
        R = np.maximum(R - s[0] * np.outer(p, q), 0.0)
    return [(p, q) for p, q in atoms if np.any(p) and np.any(q)]


def _uc_lp(M, atoms, costs) -> np.ndarray:
    rows_idx = list(zip(*np.nonzero(M)))
    ridx = {rc: k for k, rc in enumerate(rows_idx)}
    r, cidx, vals = [], [], []
    for j, (p, q) in enumerate(atoms):
        for i in np.nonzero(p)[0]:
            for jj in np.nonzero(q)[0]:
                k = ridx.get((i, jj))
                if k is not None:
                    r.append(k)
                    cidx.append(j)
                    vals.append(-p[i] * q[jj])
    A = coo_matrix((vals, (r, cidx)), shape=(len(rows_idx), len(atoms))).tocsr()
    b = -np.array([M[i, j] for i, j in rows_idx])
    res = linprog(costs, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError(f"uc LP failed: {res.message}")
    return np.maximum(res.x, 0.0)


def _uc_lower(M, legx, legy, steps):
    kx, vx = legx
    ky, vy = legy
    best = (-1.0, None, None)
    starts = [np.ones(M.shape[1])]
    if M.size:
        _, _, vt = np.linalg.svd(M)
        starts.append(np.abs(vt[0]))
    for eta in starts:
        eta = _best_response(ky, vy, eta)
        prev = -1.0
        for _ in range(steps):
            xi = _best_response(kx, vx, M @ eta)
            eta = _best_response(ky, vy, M.T @ xi)
            val = float(xi @ M @ eta)
            if abs(val - prev) <= 1e-12 * max(1.0, abs(val)):
                break
            prev = val
        val = float(xi @ M @ eta)
        if val > best[0]:
            best = (val, xi, eta)
    return best


def _verify_uc(cert: BoundCertificate, tol: float) -> list[str]:
    out = []
    T = cert.target
    specX, specY = cert.params["specX"], cert.params["specY"]
    if not T:
        return out if cert.upper <= tol else ["nonzero upper for zero tensor"]
    xs, ys, M, (kx, vx), (ky, vy) = _uc_setup(T, specX, specY)
    xi_idx = {x: i for i, x in enumerate(xs)}
    yi_idx = {y: j for j, y in enumerate(ys)}
    for c, p, q in cert.upper_witness:
        if c < 0 or any(v < 0 for v in p.values()) or any(v < 0 for v in q.values()):
            out.append("negative atom")
    allx = {x for _, p, _ in cert.upper_witness for x in p}
    ally = {y for _, _, q in cert.upper_witness for y in q}
    ext_x = list(xs) + sorted(allx - set(xs))
    ext_y = list(ys) + sorted(ally - set(ys))
    Mext = np.zeros((len(ext_x), len(ext_y)))
    Mext[: len(xs), : len(ys)] = M
    D = _uc_domination(Mext.shape, ext_x, ext_y, cert.upper_witness)
    if np.any(D < Mext):
        out.append(f"domination fails by {float(np.max(Mext - D))}")
    cost = _uc_cost(cert.upper_witness, specX, specY)
    if abs(cost - cert.upper) > tol * max(1.0, cost) and cost > cert.upper:
        out.append(f"upper witness costs {cost}, certificate says {cert.upper}")
    xi = np.zeros(len(xs))
    eta = np.zeros(len(ys))
    for x, v in cert.lower_witness["xi"].items():
        if v < 0:
            out.append("negative functional")
        xi[xi_idx[x]] = v
    for y, v in cert.lower_witness["eta"].items():
        if v < 0:
            out.append("negative functional")
        eta[yi_idx[y]] = v
    if leg_dual_norm(kx, vx, xi) > 1 + 1e-9 or leg_dual_norm(ky, vy, eta) > 1 + 1e-9:
        out.append("functional has dual norm > 1")
    val = float(xi @ M @ eta)
    if abs(val - cert.lower) > tol * max(1.0, abs(val)):
        out.append(f"dual value {val} differs from lower {cert.lower}")
    return out


# --------------------------------------------------------- minimal / Sobolev
def u_dual_sup(ambient: SeminormSpec, lam: float, n: int, group: Group) -> float:
    """sup{ℓ¹_λ(x) : ‖x‖_U <= 1, supp x ⊂ ball(n)} in closed form."""
    if ambient.tag == "ell1":
        return lam**n
    if ambient.tag == "ell1_lambda":
        return max(1.0, (lam / ambient.lam) ** n)
    sizes = _sphere_sizes(group, n)
    if ambient.tag == "ellinf":
        return float(sum(s * lam**l for l, s in enumerate(sizes)))
    if ambient.tag == "sobolev2":
        return float(math.sqrt(sum(s * lam ** (2 * l) / (1.0 + l) ** (2 * ambient.k) for l, s in enumerate(sizes))))
    return float(max(lam ** len(g) / ambient.weight(g) for g in group.ball(n).elements))


def _sphere_sizes(group: Group, n: int) -> list[int]:
    return group.ball(n).sphere_sizes()


def witness_D(ambient: SeminormSpec, lam: float, n: int, group: Group) -> float:
    """sup over T_n of ℓ¹_λ."""
    return n / (n + 1) * u_dual_sup(ambient, lam, n, group)


def _block_cost(ambient: SeminormSpec, n: int, b: Word) -> float:
    return (n + 1) / (n * THETA) * ambient.unit_norm(b)


def _best_split(group: Group, g: Word, n: int, ambient: SeminormSpec, k: float, min_blocks: int = 1):
    """Blocks of σ(g) (each of length 1..n) minimizing m^k · Π cost; returns (value, blocks, m)."""
    L = len(g)
    if L == 0:
        return _block_cost(ambient, n, ()), [()], 1
    INF = math.inf
    # dp[i][m]: best product for prefix of length i using m blocks
    dp = [dict() for _ in range(L + 1)]
    dp[0][0] = (1.0, None)
    for i in range(1, L + 1):
        for j in range(max(0, i - n), i):
            b = group.normalize(g[j:i])
            c = _block_cost(ambient, n, b)
            for m, (val, _) in dp[j].items():
                cand = val * c
                if cand < dp[i].get(m + 1, (INF,))[0]:
                    dp[i][m + 1] = (cand, j)
    best = (INF, None)
    for m, (val, _) in dp[L].items():
        if m < min_blocks:
            continue
        tot = (m**k if k else 1.0) * val
        if tot < best[0]:
            best = (tot, m)
    _, m = best
    blocks = []
    i, mm = L, m
    while i > 0:
        j = dp[i][mm][1]
        blocks.append(group.normalize(g[j:i]))
        i, mm = j, mm - 1
    blocks.reverse()
    return best[0], blocks, m


def _factor_product(group: Group, ambient: SeminormSpec, n: int, blocks: Sequence[Word]) -> RingElement:
    factors = [RingElement(group, {b: 1.0 / _block_cost(ambient, n, b)}) for b in blocks]
    return reduce(convolve, factors)


def _dominating_scalar(target_abs: float, product_coeff: float) -> float:
    lam = target_abs / product_coeff
    while lam * product_coeff < target_abs:
        lam = math.nextafter(lam, math.inf)
    return lam


def _sobolev_cost(m: int, k: float) -> float:
    return float(m**k) if k else 1.0


def _term_scalar(target_abs: float, product_coeff: float, mk: float) -> float:
    """Total term cost λ such that (λ / mk)·product_coeff >= target_abs in floating point."""
    lam = _dominating_scalar(target_abs, product_coeff) * mk
    while (lam / mk) * product_coeff < target_abs:
        lam = math.nextafter(lam, math.inf)
    return lam


def _lower_scan(group, ambient, n, weight_fn, c_of_D, grid: int = 64):
    """Best admissible witness ν = c·ℓ¹_λ (on ring or tensor) over a λ grid."""
    def D(lam):
        return witness_D(ambient, lam, n, group)

    lo, hi = 1.0, 1.0
    if D(1.0) <= 1.0:
        hi = 2.0
        while D(hi) <= 1.0 and hi < 1e6:
            hi *= 2
        a, b = 1.0, hi
        for _ in range(80):
            mid = 0.5 * (a + b)
            if D(mid) <= 1.0:
                a = mid
            else:
                b = mid
        hi = a
    best = (0.0, 0.0, 1.0, D(1.0))
    for lam in np.unique(np.concatenate([np.linspace(lo, hi, grid), [hi]])):
        d = D(float(lam))
        if d > 1.0 or d <= 0:
            continue
        c = c_of_D(d)
        val = c * weight_fn(float(lam))
        if val > best[0]:
            best = (val, c, float(lam), d)
    return best


def minimal_norm_bounds(a: RingElement, n: int, ambient: SeminormSpec) -> BoundCertificate:
    """Certified interval for ‖a‖_n (largest submultiplicative unconditional seminorm with ‖T_n‖ <= 1)."""
    return _ring_bounds(a, n, 0.0, ambient, kind="minimal")


def sobolev_minimal_bounds(a, n: int, k: float, ambient: SeminormSpec) -> BoundCertificate:
    """Certified interval for the Sobolev variant ‖a‖_{n,k} on CΓ or CΓ⊗CΓ."""
    if isinstance(a, TensorElement):
        return _tensor_bounds(a, n, k, ambient)
    return _ring_bounds(a, n, k, ambient, kind="sobolev")


def _ring_bounds(a: RingElement, n: int, k: float, ambient: SeminormSpec, kind: str) -> BoundCertificate:
    if n < 1:
        raise ValueError("n must be >= 1")
    G = a.group
    params = {"n": n, "k": k, "ambient": ambient}
    if not a:
        return BoundCertificate(kind, a, 0.0, 0.0, params, {"lam": 1.0, "c": 0.0, "D": 0.0}, [])
    terms = []
    upper = 0.0
    for g, c in sorted(a.items()):
        _, blocks, m = _best_split(G, g, n, ambient, k)
        prod = _factor_product(G, ambient, n, blocks)
        lam = _term_scalar(abs(c), prod[g].real, _sobolev_cost(m, k))
        terms.append((lam, tuple(blocks), None))
        upper += lam
    val, cc, lam, D = _lower_scan(
        G, ambient, n,
        lambda L: sum(abs(c) * L ** len(g) for g, c in a.items()),
        lambda d: 1.0 / d,
    )
    lw = {"lam": lam, "c": cc, "D": D}
    flags = [] if D <= 1.0 else ["no admissible witness norm; lower bound is trivial"]
    return BoundCertificate(kind, a, float(val), float(upper), params, lw, terms, flags)


def _tensor_bounds(T: TensorElement, n: int, k: float, ambient: SeminormSpec) -> BoundCertificate:
    if n < 1:
        raise ValueError("n must be >= 1")
    G = T.group
    params = {"n": n, "k": k, "ambient": ambient}
    if not T:
        return BoundCertificate("sobolev_tensor", T, 0.0, 0.0, params, {"lam": 1.0, "c": 0.0, "D": 0.0}, [])
    terms = []
    upper = 0.0
    for (g, h), c in sorted(T.items()):
        best = None
        left = {m1: _split_fixed(G, g, n, ambient, m1) for m1 in _split_counts(g, n)}
        right = {m2: _split_fixed(G, h, n, ambient, m2) for m2 in _split_counts(h, n)}
        for m1, (v1, b1) in left.items():
            for m2, (v2, b2) in right.items():
                tot = _sobolev_cost(m1 + m2, k) * v1 * v2
                if best is None or tot < best[0]:
                    best = (tot, b1, b2, m1 + m2)
        _, b1, b2, m = best
        p1 = _factor_product(G, ambient, n, b1)
        p2 = _factor_product(G, ambient, n, b2)
        coeff = p1[g].real * p2[h].real
        lam = _term_scalar(abs(c), coeff, _sobolev_cost(m, k))
        terms.append((lam, tuple(b1), tuple(b2)))
        upper += lam
    val, cc, lam, D = _lower_scan(
        G, ambient, n,
        lambda L: sum(abs(c) * L ** (len(g) + len(h)) for (g, h), c in T.items()),
        lambda d: (2.0**k) / (d * d),
    )
    lw = {"lam": lam, "c": cc, "D": D}
    flags = [] if D <= 1.0 else ["no admissible witness norm; lower bound is trivial"]
    return BoundCertificate("sobolev_tensor", T, float(val), float(upper), params, lw, terms, flags)


def _split_counts(g, n):
    L = len(g)
    if L == 0:
        return [1]
    return list(range(max(1, math.ceil(L / n)), L + 1))


def _split_fixed(G, g, n, ambient, m):
    """Cheapest split of σ(g) into exactly m blocks of length 1..n (the identity uses one empty block)."""
    L = len(g)
    if L == 0:
        return _block_cost(ambient, n, ()), [()]
    INF = math.inf
    dp = [[(INF, None)] * (m + 1) for _ in range(L + 1)]
    dp[0][0] = (1.0, None)
    for i in range(1, L + 1):
        for j in range(max(0, i - n), i):
            c = _block_cost(ambient, n, G.normalize(g[j:i]))
            for mm in range(1, m + 1):
                val = dp[j][mm - 1][0] * c
                if val < dp[i][mm][0]:
                    dp[i][mm] = (val, j)
    blocks, i, mm = [], L, m
    while i > 0:
        j = dp[i][mm][1]
        blocks.append(G.normalize(g[j:i]))
        i, mm = j, mm - 1
    blocks.reverse()
    return dp[L][m][0], blocks


def _verify_minimal(cert: BoundCertificate, tol: float) -> list[str]:
    out = []
    target = cert.target
    G = target.group
    n, k, ambient = cert.params["n"], cert.params["k"], cert.params["ambient"]
    if not target:
        return out
    is_tensor = cert.kind == "sobolev_tensor"
    dom = TensorElement(G) if is_tensor else RingElement(G)
    total = 0.0
    for lam, left, right in cert.upper_witness:
        if lam < 0:
            out.append("negative coefficient")
        for b in list(left) + list(right or ()):
            if len(b) > n:
                out.append(f"factor {G.fmt(b)} outside ball({n})")
            t_norm = ambient.unit_norm(b) / _block_cost(ambient, n, b)
            if not t_norm < n / (n + 1):
                out.append("factor not inside (n/(n+1))·U")
        m = len(left) + (len(right) if right is not None else 0)
        if cert.kind == "minimal":
            scal = lam
        else:
            scal = lam / _sobolev_cost(m, k)
        prod = _factor_product(G, ambient, n, left)
        if is_tensor:
            prod = tensor(prod, _factor_product(G, ambient, n, right))
        dom = dom + prod.scale(scal)
        total += lam
    tabs = absolute(target)
    for key, c in tabs.items():
        if dom[key].real < c.real:
            out.append(f"domination fails at {key}: {dom[key].real} < {c.real}")
            break
    if abs(total - cert.upper) > tol * max(1.0, total):
        out.append(f"upper witness sums to {total}, certificate says {cert.upper}")
    lw = cert.lower_witness
    lam, c = lw["lam"], lw["c"]
    if c == 0:
        if cert.lower != 0:
            out.append("zero witness with nonzero lower bound")
        return out
    D = witness_D(ambient, lam, n, G)
    if lam < 1:
        out.append("witness weight base < 1 is not submultiplicative")
    if D > 1 + 1e-12:
        out.append(f"witness norm not admissible: D = {D}")
    allowed = (2.0**k) / (D * D) if is_tensor else 1.0 / D
    if c > allowed * (1 + 1e-12):
        out.append("witness scale too large")
    if cert.kind == "minimal" and c < 1 - 1e-12:
        out.append("scaled witness below 1 is not submultiplicative")
    if is_tensor:
        val = c * sum(abs(v) * lam ** (len(g) + len(h)) for (g, h), v in target.items())
    else:
        val = c * sum(abs(v) * lam ** len(g) for g, v in target.items())
    if abs(val - cert.lower) > tol * max(1.0, abs(val)):
        out.append(f"witness value {val} differs from lower {cert.lower}")
    return out


def example26(group: Group | None = None):
    """The 2×2 matrices a = [[1,2],[2,0]] and b = [[1,2],[2,1]] as tensors over X = Y = {e, a}."""
    G = group or Group.from_tag("free:1")
    pts = [(), G.letters[0]]
    a = TensorElement.from_matrix(G, pts, pts, [[1, 2], [2, 0]])
    b = TensorElement.from_matrix(G, pts, pts, [[1, 2], [2, 1]])
    return G, a, b
