"""Finitely supported elements of CΓ, CΓ⊗CΓ and noncommutative forms.

All three element types are immutable sparse maps from canonical group data to
complex coefficients.  Coefficients of modulus <= ``PRUNE_TOL`` are dropped
after every operation.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Iterable, Mapping

from hypsmooth.group_kernel import Group, Word

PRUNE_TOL = 1e-12

Key = object


def _pruned(items: Iterable[tuple[Key, complex]]) -> dict:
    acc: dict = defaultdict(complex)
    for k, c in items:
        acc[k] += c
    return {k: complex(c) for k, c in acc.items() if abs(c) > PRUNE_TOL}


class _Sparse:
    """Shared arithmetic for the three sparse element kinds."""

    __slots__ = ("group", "_data")

    def __init__(self, group: Group, data: Mapping | Iterable = ()):
        self.group = group
        items = data.items() if isinstance(data, Mapping) else data
        self._data = MappingProxyType(_pruned(items))

    # the subclass decides how to rebuild itself with new data
    def _new(self, data) -> "_Sparse":
        raise NotImplementedError

    @property
    def data(self) -> Mapping:
        return self._data

    def items(self):
        return self._data.items()

    def keys(self):
        return self._data.keys()

    def __len__(self):
        return len(self._data)

    def __bool__(self):
        return bool(self._data)

    def __getitem__(self, key) -> complex:
        return self._data.get(key, 0j)

    def coeff(self, key) -> complex:
        return self._data.get(key, 0j)

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.group is not self.group:
            raise ValueError("elements live in different groups")

    def __add__(self, other):
        self._check(other)
        return self._new(list(self.items()) + list(other.items()))

    def __sub__(self, other):
        self._check(other)
        return self._new(list(self.items()) + [(k, -c) for k, c in other.items()])

    def __neg__(self):
        return self._new((k, -c) for k, c in self.items())

    def scale(self, c: complex):
        return self._new((k, c * v) for k, v in self.items())

    def __rmul__(self, c):
        if isinstance(c, (int, float, complex)):
            return self.scale(c)
        return NotImplemented

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.group is other.group and dict(self._data) == dict(other._data)

    def __hash__(self):
        return hash((type(self).__name__, frozenset(self._data.items())))

    def allclose(self, other, tol: float = 1e-9) -> bool:
        self._check(other)
        keys = set(self.keys()) | set(other.keys())
        return all(abs(self[k] - other[k]) <= tol for k in keys)

    def is_radial(self, tol: float = PRUNE_TOL) -> bool:
        return all(abs(c.imag) <= tol and c.real >= -tol for c in self._data.values())

    def map_keys(self, f: Callable):
        return self._new((f(k), c) for k, c in self.items())

    def l1(self) -> float:
        return float(sum(abs(c) for c in self._data.values()))


class RingElement(_Sparse):
    """a = Σ a_g u_g with canonical words g as keys."""

    __slots__ = ()

    def _new(self, data):
        return RingElement(self.group, data)

    @classmethod
    def zero(cls, group: Group) -> "RingElement":
        return cls(group)

    @classmethod
    def monomial(cls, group: Group, g, c: complex = 1.0) -> "RingElement":
        return cls(group, {group.element(g): complex(c)})

    @classmethod
    def from_terms(cls, group: Group, terms: Mapping) -> "RingElement":
        """Build from ``{"ab": 2, "e": 1j, (0, 2): 3}``."""
        return cls(group, [(group.element(g), complex(c)) for g, c in terms.items()])

    def support(self) -> list[Word]:
        return sorted(self.keys(), key=lambda g: (len(g), g))

    def __mul__(self, other):
        if isinstance(other, RingElement):
            return convolve(self, other)
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    def __repr__(self):
        if not self:
            return "0"
        fmt = self.group.fmt
        return " + ".join(f"{_c(c)}·u[{fmt(g)}]" for g, c in sorted(self.items()))


class TensorElement(_Sparse):
    """Σ T_{g,h} u_g⊗u_h."""

    __slots__ = ()

    def _new(self, data):
        return TensorElement(self.group, data)

    @classmethod
    def elementary(cls, group: Group, g, h, c: complex = 1.0) -> "TensorElement":
        return cls(group, {(group.element(g), group.element(h)): complex(c)})

    @classmethod
    def from_terms(cls, group: Group, terms: Mapping) -> "TensorElement":
        return cls(group, [((group.element(g), group.element(h)), complex(c)) for (g, h), c in terms.items()])

    @classmethod
    def from_matrix(cls, group: Group, rows: list, cols: list, matrix) -> "TensorElement":
        rows = [group.element(x) for x in rows]
        cols = [group.element(y) for y in cols]
        return cls(
            group,
            [((x, y), complex(matrix[i][j])) for i, x in enumerate(rows) for j, y in enumerate(cols)],
        )

    def legs(self) -> tuple[list[Word], list[Word]]:
        xs = sorted({k[0] for k in self.keys()}, key=lambda g: (len(g), g))
        ys = sorted({k[1] for k in self.keys()}, key=lambda g: (len(g), g))
        return xs, ys

    def to_matrix(self, rows=None, cols=None):
        import numpy as np

        if rows is None or cols is None:
            rows, cols = self.legs()
        ri = {x: i for i, x in enumerate(rows)}
        ci = {y: j for j, y in enumerate(cols)}
        m = np.zeros((len(rows), len(cols)), dtype=complex)
        for (x, y), c in self.items():
            m[ri[x], ci[y]] = c
        return m, rows, cols

    def __repr__(self):
        if not self:
            return "0"
        fmt = self.group.fmt
        return " + ".join(f"{_c(c)}·u[{fmt(g)}]⊗u[{fmt(h)}]" for (g, h), c in sorted(self.items()))


class FormElement(_Sparse):
    """Σ c·u_{g0} du_{g1} … du_{gn}, stored as (n+1)-tuples of canonical words."""

    __slots__ = ("degree",)

    def __init__(self, group: Group, degree: int, data: Mapping | Iterable = ()):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        self.degree = degree
        super().__init__(group, data)
        for k in self._data:
            if len(k) != degree + 1:
                raise ValueError(f"form of degree {degree} needs {degree + 1}-tuples")

    def _new(self, data):
        return FormElement(self.group, self.degree, data)

    def _check(self, other):
        super()._check(other)
        if other.degree != self.degree:
            raise ValueError("degrees differ")

    @classmethod
    def monomial(cls, group: Group, words: Iterable, c: complex = 1.0) -> "FormElement":
        key = tuple(group.element(w) for w in words)
        return cls(group, len(key) - 1, {key: complex(c)})

    def __eq__(self, other):
        if isinstance(other, FormElement) and other.degree != self.degree:
            return False
        return super().__eq__(other)

    __hash__ = _Sparse.__hash__

    def __repr__(self):
        if not self:
            return f"0 (degree {self.degree})"
        fmt = self.group.fmt
        return " + ".join(
            f"{_c(c)}·u[{fmt(k[0])}]" + "".join(f"du[{fmt(g)}]" for g in k[1:])
            for k, c in sorted(self.items())
        )


def _c(c: complex) -> str:
    if c.imag == 0:
        return f"{c.real:g}"
    return f"({c.real:g}{c.imag:+g}j)"


# ----------------------------------------------------------------- radial structure
def absolute(x: _Sparse) -> _Sparse:
    return x._new((k, abs(c)) for k, c in x.items())


def radial_leq(a: _Sparse, b: _Sparse, tol: float = 0.0) -> bool:
    """Coefficientwise a <= b for radial a, b (``tol`` allows float slack)."""
    if not (a.is_radial() and b.is_radial()):
        raise ValueError("radial_leq needs radial arguments")
    a._check(b)
    return all(c.real <= b[k].real + tol for k, c in a.items())


def worst_violation(a: _Sparse, b: _Sparse):
    """Key and excess of the largest coefficient with a_k > b_k, or (None, 0.0)."""
    worst, key = 0.0, None
    for k, c in a.items():
        excess = c.real - b[k].real
        if excess > worst:
            worst, key = excess, k
    return key, worst


# ------------------------------------------------------------------ multiplication
def convolve(a: RingElement, b: RingElement) -> RingElement:
    a._check(b)
    G = a.group
    return RingElement(G, ((G.multiply(g, h), x * y) for g, x in a.items() for h, y in b.items()))


def power(a: RingElement, m: int) -> RingElement:
    out = RingElement.monomial(a.group, ())
    for _ in range(m):
        out = convolve(out, a)
    return out


def tensor(a: RingElement, b: RingElement) -> TensorElement:
    a._check(b)
    return TensorElement(a.group, (((g, h), x * y) for g, x in a.items() for h, y in b.items()))


def swap(T: TensorElement) -> TensorElement:
    return T.map_keys(lambda k: (k[1], k[0]))


def act_left(t, T: TensorElement) -> TensorElement:
    G = T.group
    t = G.element(t)
    return T.map_keys(lambda k: (G.multiply(t, k[0]), k[1]))


def act_right(T: TensorElement, t) -> TensorElement:
    G = T.group
    t = G.element(t)
    return T.map_keys(lambda k: (k[0], G.multiply(k[1], t)))


def i_t(t, T: TensorElement) -> TensorElement:
    """u_g⊗u_h ↦ u_{g t⁻¹}⊗u_{t h}."""
    G = T.group
    t = G.element(t)
    tinv = G.invert(t)
    return T.map_keys(lambda k: (G.multiply(k[0], tinv), G.multiply(t, k[1])))


def tensor_mult_left(a: RingElement, T: TensorElement) -> TensorElement:
    G = T.group
    return TensorElement(
        G, (((G.multiply(g, x), y), c * d) for g, c in a.items() for (x, y), d in T.items())
    )


def tensor_mult_right(T: TensorElement, b: RingElement) -> TensorElement:
    G = T.group
    return TensorElement(
        G, (((x, G.multiply(y, h)), d * c) for (x, y), d in T.items() for h, c in b.items())
    )


def mult_tensor(T: TensorElement) -> RingElement:
    G = T.group
    return RingElement(G, ((G.multiply(x, y), c) for (x, y), c in T.items()))


# ------------------------------------------------------------ conjugacy classes
def _class_key(group: Group, g: Word):
    from hypsmooth.conjugacy import conjugacy_engine

    return conjugacy_engine(group).class_key(g)


def project_class(a: RingElement, x) -> RingElement:
    """Keep the coefficients of a at elements conjugate to x."""
    G = a.group
    target = _class_key(G, G.element(x))
    return RingElement(G, ((g, c) for g, c in a.items() if _class_key(G, g) == target))


def class_decomposition(a: RingElement) -> dict[Word, RingElement]:
    """Map class representative -> projection of a onto that class."""
    G = a.group
    buckets: dict = defaultdict(list)
    for g, c in a.items():
        buckets[_class_key(G, g)].append((g, c))
    return {k: RingElement(G, v) for k, v in buckets.items()}


def _ordered_product(G: Group, key: tuple[Word, ...]) -> Word:
    w: Word = ()
    for g in key:
        w = w + g
    return G.normalize(w)


def form_project(w: FormElement, x) -> FormElement:
    """Keep the tuples (g0,…,gn) whose product g0⋯gn is conjugate to x."""
    G = w.group
    target = _class_key(G, G.element(x))
    return w._new((k, c) for k, c in w.items() if _class_key(G, _ordered_product(G, k)) == target)


def form_classes(w: FormElement) -> dict[Word, FormElement]:
    G = w.group
    buckets: dict = defaultdict(list)
    for k, c in w.items():
        buckets[_class_key(G, _ordered_product(G, k))].append((k, c))
    return {r: w._new(v) for r, v in buckets.items()}


def hochschild_b(w: FormElement) -> FormElement:
    """b(a0⊗…⊗an) = Σ (−1)^i a0⊗…⊗a_i a_{i+1}⊗…⊗an + (−1)^n an a0⊗…⊗a_{n−1}."""
    n = w.degree
    if n < 1:
        raise ValueError("hochschild_b needs degree >= 1")
    G = w.group
    terms = []
    for k, c in w.items():
        for i in range(n):
            merged = k[:i] + (G.multiply(k[i], k[i + 1]),) + k[i + 2 :]
            terms.append((merged, c if i % 2 == 0 else -c))
        wrapped = (G.multiply(k[n], k[0]),) + k[1:n]
        terms.append((wrapped, c if n % 2 == 0 else -c))
    return FormElement(G, n - 1, terms)


# --------------------------------------------------------------- serialization
def to_json_obj(x: _Sparse) -> dict:
    fmt = x.group.fmt
    if isinstance(x, RingElement):
        rows = [[fmt(g), c.real, c.imag] for g, c in sorted(x.items())]
        return {"kind": "ring", "group": x.group.name, "terms": rows}
    if isinstance(x, TensorElement):
        rows = [[fmt(g), fmt(h), c.real, c.imag] for (g, h), c in sorted(x.items())]
        return {"kind": "tensor", "group": x.group.name, "terms": rows}
    rows = [[*(fmt(g) for g in k), c.real, c.imag] for k, c in sorted(x.items())]
    return {"kind": "form", "degree": x.degree, "group": x.group.name, "terms": rows}


def from_json_obj(group: Group, obj: Mapping) -> _Sparse:
    kind = obj["kind"]
    rows = obj["terms"]

    def key(words):
        return tuple(group.parse(s) for s in words)

    if kind == "ring":
        return RingElement(group, [(group.parse(r[0]), complex(r[1], r[2])) for r in rows])
    if kind == "tensor":
        return TensorElement(group, [(key(r[:2]), complex(r[2], r[3])) for r in rows])
    if kind == "form":
        d = int(obj["degree"])
        return FormElement(group, d, [(key(r[: d + 1]), complex(r[d + 1], r[d + 2])) for r in rows])
    raise ValueError(f"unknown element kind {kind!r}")


def dumps(x: _Sparse) -> str:
    return json.dumps(to_json_obj(x))


def loads(group: Group, text: str) -> _Sparse:
    return from_json_obj(group, json.loads(text))


@dataclass(frozen=True)
class RandomCorpus:
    """Seeded random elements with supports in a ball."""

    group: Group
    radius: int
    seed: int = 0
    max_terms: int = 4
    complex_coeffs: bool = True

    def rng(self):
        import numpy as np

        return np.random.default_rng(self.seed)

    def element(self, rng, radius: int | None = None, terms: int | None = None) -> RingElement:
        elems = self.group.ball(self.radius if radius is None else radius).elements
        k = terms if terms is not None else int(rng.integers(1, self.max_terms + 1))
        idx = rng.choice(len(elems), size=min(k, len(elems)), replace=False)
        coeffs = rng.normal(size=len(idx))
        if self.complex_coeffs:
            coeffs = coeffs + 1j * rng.normal(size=len(idx))
        return RingElement(self.group, [(elems[i], complex(c)) for i, c in zip(idx, coeffs)])

    def pairs(self, n: int):
        rng = self.rng()
        for _ in range(n):
            yield self.element(rng), self.element(rng)
