"""Finitely generated groups: canonical shortlex-geodesic words, balls, delta.

Group elements are plain tuples of letter indices (``Word``).  A word returned
by :meth:`Group.normalize` is the shortlex-least geodesic word of its element,
so equality of canonical words is equality in the group and ``len(word)`` is
the word length.  Letter indices follow the alphabet order, which makes the
built-in tuple ordering agree with lexicographic order on words.

Three backends are supported:

* ``free`` -- exact free reduction.
* ``dehn`` -- Dehn reduction followed by a search over the orbit of the word
  under length-preserving half-relator swaps.  For presentations whose
  geodesic bigons are ladders (e.g. surface groups, where pieces have length
  one) this orbit is exactly the set of geodesic words.
* ``table`` -- a finite group given by its multiplication table.
"""
from __future__ import annotations

import itertools
import math
import re
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Word = tuple[int, ...]
GroupElement = Word

DEFAULT_MAX_ELEMENTS = 200_000
DEFAULT_MAX_WORD_LENGTH = 96
DEFAULT_MAX_ORBIT = 200_000


class GroupError(ValueError):
    pass


class UnknownLetter(GroupError):
    pass


class CapExceeded(RuntimeError):
    """A configured size cap (ball size, word length, search depth) was hit."""


class DehnPropertyError(GroupError):
    pass


class InvariantError(RuntimeError):
    """An identity that must hold by construction failed at runtime."""


@dataclass(frozen=True)
class GeneratorAlphabet:
    """Ordered symmetric alphabet.  ``inverse[i]`` is the index of the inverse of letter i."""

    letters: tuple[str, ...]
    inverse: tuple[int, ...]

    def __post_init__(self):
        n = len(self.letters)
        if len(self.inverse) != n:
            raise GroupError("inverse map has wrong length")
        if len(set(self.letters)) != n:
            raise GroupError("duplicate letters")
        for i, j in enumerate(self.inverse):
            if not 0 <= j < n or self.inverse[j] != i:
                raise GroupError(f"involution is not self-inverse at {self.letters[i]!r}")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[str, str]], order: Sequence[str] | None = None):
        names: list[str] = []
        inv: dict[str, str] = {}
        for x, y in pairs:
            for z in (x, y):
                if z not in inv and z not in names:
                    names.append(z)
            inv[x] = y
            inv[y] = x
        if order is not None:
            if sorted(order) != sorted(names):
                raise GroupError("order must list every letter exactly once")
            names = list(order)
        index = {s: i for i, s in enumerate(names)}
        return cls(tuple(names), tuple(index[inv[s]] for s in names))

    def __len__(self):
        return len(self.letters)

    @property
    def index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.letters)}

    def parse(self, text: str) -> Word:
        """Parse ``"abA"``, ``"a b a^-1"`` or ``"a b a⁻¹"``; ``"e"``/``"1"``/``""`` is the identity."""
        text = text.strip()
        index = self.index
        if text in ("", "1") or (text == "e" and "e" not in index):
            return ()
        names = sorted(self.letters, key=len, reverse=True)
        pattern = re.compile(
            "|".join(re.escape(s) for s in names) + r"|\s+|\^-1|⁻¹|\^\{-1\}"
        )
        out: list[int] = []
        pos = 0
        while pos < len(text):
            m = pattern.match(text, pos)
            if m is None or m.end() == pos:
                raise UnknownLetter(f"cannot parse {text[pos:]!r} in {text!r}")
            tok = m.group()
            pos = m.end()
            if tok.isspace():
                continue
            if tok in ("^-1", "⁻¹", "^{-1}"):
                if not out:
                    raise UnknownLetter(f"dangling inverse marker in {text!r}")
                out[-1] = self.inverse[out[-1]]
                continue
            out.append(index[tok])
        return tuple(out)

    def format(self, word: Sequence[int]) -> str:
        if not word:
            return "e"
        sep = "" if all(len(s) == 1 for s in self.letters) else " "
        return sep.join(self.letters[i] for i in word)

    def invert_word(self, word: Sequence[int]) -> Word:
        inv = self.inverse
        return tuple(inv[i] for i in reversed(word))


def free_alphabet(rank: int) -> GeneratorAlphabet:
    if not 1 <= rank <= 26:
        raise GroupError("rank must be between 1 and 26")
    pairs = [(chr(ord("a") + i), chr(ord("A") + i)) for i in range(rank)]
    return GeneratorAlphabet.from_pairs(pairs)


@dataclass(frozen=True)
class GroupSpec:
    """Declarative description of a group.

    ``kind`` is ``"free"``, ``"dehn"`` or ``"table"``.  For ``table`` groups
    ``table[i][j]`` is the index of the product of elements i and j, element 0
    is the identity and ``generator_elements[k]`` is the element of letter k.
    """

    kind: str
    alphabet: GeneratorAlphabet
    relators: tuple[str, ...] = ()
    table: tuple[tuple[int, ...], ...] | None = None
    generator_elements: tuple[int, ...] | None = None
    max_elements: int = DEFAULT_MAX_ELEMENTS
    max_word_length: int = DEFAULT_MAX_WORD_LENGTH
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("free", "dehn", "table"):
            raise GroupError(f"unknown group kind {self.kind!r}")
        if self.max_elements <= 0 or self.max_word_length <= 0:
            raise GroupError("caps must be positive")

    @classmethod
    def free(cls, rank: int, **caps) -> "GroupSpec":
        return cls("free", free_alphabet(rank), name=f"free:{rank}", **caps)

    @classmethod
    def surface(cls, genus: int = 2, **caps) -> "GroupSpec":
        if genus < 2:
            raise GroupError("surface groups need genus >= 2 to be hyperbolic")
        alphabet = free_alphabet(2 * genus)
        rel = "".join(
            f"{alphabet.letters[4*i]}{alphabet.letters[4*i+2]}{alphabet.letters[4*i+1]}{alphabet.letters[4*i+3]}"
            for i in range(genus)
        )
        return cls("dehn", alphabet, relators=(rel,), name=f"surface:{genus}", **caps)

    @classmethod
    def from_tag(cls, tag: str, **caps) -> "GroupSpec":
        """``free:k``, ``surface:g`` or a path to a group specification file."""
        kind, _, arg = tag.partition(":")
        if kind == "free":
            return cls.free(int(arg or 2), **caps)
        if kind == "surface":
            return cls.surface(int(arg or 2), **caps)
        if kind == "file":
            return load_group_spec(arg, **caps)
        if Path(tag).exists():
            return load_group_spec(tag, **caps)
        raise GroupError(f"unknown group tag {tag!r}")


def load_group_spec(path: str | Path, **caps) -> GroupSpec:
    """Read the plain-text ``key = value`` group format (see README)."""
    return parse_group_spec(Path(path).read_text(), name=str(path), **caps)


def parse_group_spec(text: str, name: str = "", **caps) -> GroupSpec:
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise GroupError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        fields[key.lower()] = value
    kind = fields.get("kind", "").lower()
    if kind == "free" and "generators" not in fields:
        return GroupSpec.free(int(fields.get("rank", "2")), **_caps(fields, caps))
    if kind == "dehn_presentation":
        kind = "dehn"
    gens = fields.get("generators", "").split()
    if not gens:
        raise GroupError("missing 'generators'")
    if "inverses" in fields:
        invs = fields["inverses"].split()
        if len(invs) != len(gens):
            raise GroupError("'inverses' must match 'generators' in length")
        pairs = list(zip(gens, invs))
    elif "involution" in fields:
        pairs = [tuple(p.split(":")) for p in fields["involution"].split()]
    else:
        raise GroupError("need 'inverses' or 'involution'")
    order = fields["order"].split() if "order" in fields else None
    alphabet = GeneratorAlphabet.from_pairs(pairs, order)
    caps = _caps(fields, caps)
    if kind == "free":
        return GroupSpec("free", alphabet, name=name, **caps)
    if kind == "dehn":
        rels = tuple(r for r in re.split(r"[,;]", fields.get("relators", "")) if r.strip())
        return GroupSpec("dehn", alphabet, relators=tuple(r.strip() for r in rels), name=name, **caps)
    if kind == "table":
        rows = [r for r in fields.get("table", "").split(";") if r.strip()]
        table = tuple(tuple(int(x) for x in r.split()) for r in rows)
        gmap = dict(p.split(":") for p in fields.get("generator_elements", "").split())
        ge = tuple(int(gmap[s]) for s in alphabet.letters)
        return GroupSpec("table", alphabet, table=table, generator_elements=ge, name=name, **caps)
    raise GroupError(f"unknown kind {kind!r}")


def _caps(fields: dict[str, str], overrides: dict) -> dict:
    caps = {}
    for key in ("max_elements", "max_word_length"):
        if key in fields:
            caps[key] = int(fields[key])
    caps.update(overrides)
    return caps


@dataclass(frozen=True)
class BallTable:
    """All elements of word length <= radius, in shortlex order of their canonical words.

    ``adjacency[i, s]`` is the index of ``elements[i] * s`` or -1 when that
    product leaves the ball.
    """

    radius: int
    elements: tuple[Word, ...]
    adjacency: np.ndarray
    index: dict[Word, int] = field(repr=False, compare=False)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g) -> bool:
        return g in self.index

    def sphere(self, r: int) -> list[Word]:
        return [g for g in self.elements if len(g) == r]

    def sphere_sizes(self) -> list[int]:
        sizes = [0] * (self.radius + 1)
        for g in self.elements:
            sizes[len(g)] += 1
        return sizes


class Group:
    """A finitely generated group with canonical shortlex-geodesic normal forms."""

    def __init__(self, spec: GroupSpec, *, check_dehn_radius: int = 4):
        self.spec = spec
        self.alphabet = spec.alphabet
        self.inv = spec.alphabet.inverse
        self.n_letters = len(spec.alphabet)
        self._cache: dict[Word, Word] = {}
        self._balls: dict[int, BallTable] = {}
        self._engine = None
        self.letters: tuple[Word, ...] = tuple((i,) for i in range(self.n_letters))
        if spec.kind == "dehn":
            self._setup_dehn()
            if check_dehn_radius:
                bad = self.dehn_spot_check(check_dehn_radius)
                if bad:
                    raise DehnPropertyError(
                        f"presentation fails the Dehn spot check, e.g. {self.fmt(bad[0])!r} = e"
                    )
        elif spec.kind == "table":
            self._setup_table()

    # ------------------------------------------------------------------ naming
    @classmethod
    def from_tag(cls, tag: str, **caps) -> "Group":
        return cls(GroupSpec.from_tag(tag, **caps))

    @property
    def name(self) -> str:
        return self.spec.name or self.spec.kind

    def __repr__(self):
        return f"Group({self.name!r})"

    identity: Word = ()

    def parse(self, text: str) -> Word:
        return self.normalize(self.alphabet.parse(text))

    def fmt(self, g: Sequence[int]) -> str:
        return self.alphabet.format(g)

    def element(self, x) -> Word:
        """Coerce a string or letter sequence into a canonical element."""
        if isinstance(x, str):
            return self.parse(x)
        return self.normalize(tuple(x))

    # ------------------------------------------------------------ word problem
    def free_reduce(self, word: Iterable[int]) -> Word:
        inv = self.inv
        out: list[int] = []
        for x in word:
            if out and out[-1] == inv[x]:
                out.pop()
            else:
                out.append(x)
        return tuple(out)

    def normalize(self, word: Sequence[int]) -> Word:
        """Canonical shortlex-geodesic word of the element represented by ``word``."""
        word = tuple(word)
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        n = self.n_letters
        for x in word:
            if not (0 <= x < n):
                raise UnknownLetter(f"letter index {x} out of range")
        kind = self.spec.kind
        if kind == "free":
            out = self.free_reduce(word)
        elif kind == "dehn":
            if len(word) > self.spec.max_word_length:
                raise CapExceeded(
                    f"word of length {len(word)} exceeds max_word_length={self.spec.max_word_length}"
                )
            out = self._dehn_normal_form(word)
        else:
            out = self._table_words[self._table_eval(word)]
        if len(self._cache) > 2_000_000:
            self._cache.clear()
        self._cache[word] = out
        return out

    def multiply(self, a: Word, b: Word) -> Word:
        return self.normalize(a + b)

    def invert(self, a: Word) -> Word:
        # the inverse of a geodesic is geodesic but not necessarily shortlex-least
        return self.normalize(self.alphabet.invert_word(a))

    def word_length(self, a: Word) -> int:
        return len(self.normalize(a))

    def distance(self, g: Word, h: Word) -> int:
        return len(self.normalize(self.alphabet.invert_word(g) + h))

    def conjugate(self, g: Word, v: Word) -> Word:
        """``v^-1 g v``."""
        return self.normalize(self.alphabet.invert_word(v) + g + v)

    def geodesic_prefix(self, g: Word, i: int) -> Word:
        if not 0 <= i <= len(g):
            raise IndexError(f"prefix index {i} out of range 0..{len(g)}")
        return g[:i]

    def path_vertices(self, g: Word) -> list[Word]:
        """Vertices of the canonical geodesic from e to g."""
        return [g[:i] for i in range(len(g) + 1)]

    # ----------------------------------------------------------------- dehn
    def _setup_dehn(self):
        alpha = self.alphabet
        self.relator_words = [self.free_reduce(alpha.parse(r)) for r in self.spec.relators]
        cyclic: set[Word] = set()
        for r in self.relator_words:
            if not r:
                raise GroupError("empty relator")
            if r[0] == self.inv[r[-1]]:
                raise GroupError(f"relator {alpha.format(r)!r} is not cyclically reduced")
            for w in (r, alpha.invert_word(r)):
                for k in range(len(w)):
                    cyclic.add(w[k:] + w[:k])
        self._long_rules: dict[Word, Word] = {}
        self._half_rules: dict[Word, set[Word]] = {}
        lengths_long: set[int] = set()
        for w in cyclic:
            L = len(w)
            for k in range(L // 2 + 1, L + 1):
                sub, comp = w[:k], w[k:]
                rep = alpha.invert_word(comp)
                old = self._long_rules.get(sub)
                if old is None or (len(rep), rep) < (len(old), old):
                    self._long_rules[sub] = rep
                lengths_long.add(k)
            if L % 2 == 0:
                sub, comp = w[: L // 2], w[L // 2 :]
                rep = alpha.invert_word(comp)
                if rep != sub:
                    self._half_rules.setdefault(sub, set()).add(rep)
        self._long_lengths = sorted(lengths_long, reverse=True)
        self._half_lengths = sorted({len(k) for k in self._half_rules})

    def dehn_reduce(self, word: Sequence[int]) -> Word:
        """Free reduction plus Dehn's algorithm (replace any >half relator subword)."""
        w = self.free_reduce(word)
        rules = self._long_rules
        lengths = self._long_lengths
        changed = True
        while changed:
            changed = False
            n = len(w)
            for k in lengths:
                if k > n:
                    continue
                for i in range(n - k + 1):
                    rep = rules.get(w[i : i + k])
                    if rep is not None:
                        w = self.free_reduce(w[:i] + rep + w[i + k :])
                        changed = True
                        break
                if changed:
                    break
        return w

    def _has_long(self, w: Word) -> bool:
        rules = self._long_rules
        n = len(w)
        for k in self._long_lengths:
            for i in range(n - k + 1):
                if w[i : i + k] in rules:
                    return True
        return False

    def _dehn_normal_form(self, word: Word) -> Word:
        w = self.dehn_reduce(word)
        cap = DEFAULT_MAX_ORBIT
        while True:
            seen = {w}
            queue = deque([w])
            shorter = None
            while queue and shorter is None:
                cur = queue.popleft()
                n = len(cur)
                for k in self._half_lengths:
                    for i in range(n - k + 1):
                        reps = self._half_rules.get(cur[i : i + k])
                        if not reps:
                            continue
                        for rep in reps:
                            raw = cur[:i] + rep + cur[i + k :]
                            red = self.free_reduce(raw)
                            if len(red) < n or self._has_long(red):
                                shorter = self.dehn_reduce(red)
                                break
                            if red not in seen:
                                seen.add(red)
                                queue.append(red)
                                if len(seen) > cap:
                                    raise CapExceeded("geodesic orbit exceeds cap")
                        if shorter is not None:
                            break
                    if shorter is not None:
                        break
            if shorter is None:
                return min(seen)
            w = shorter

    def dehn_spot_check(self, max_len: int) -> list[Word]:
        """Cyclically reduced words of length <= max_len with no >half relator subword
        (read cyclically) that nevertheless represent the identity.  Empty means pass."""
        bad = []
        inv = self.inv
        for n in range(1, max_len + 1):
            for w in self._reduced_words(n):
                if w[0] == inv[w[-1]]:
                    continue
                if self._has_long(w + w[: n - 1]):
                    continue
                if not self._dehn_normal_form(w):
                    bad.append(w)
        return bad

    def _reduced_words(self, n: int):
        inv = self.inv
        stack: list[Word] = [()]
        while stack:
            w = stack.pop()
            if len(w) == n:
                yield w
                continue
            for s in range(self.n_letters - 1, -1, -1):
                if w and inv[w[-1]] == s:
                    continue
                stack.append(w + (s,))

    # ----------------------------------------------------------------- table
    def _setup_table(self):
        table = np.asarray(self.spec.table, dtype=np.int64)
        n = table.shape[0]
        if table.shape != (n, n):
            raise GroupError("multiplication table must be square")
        gens = self.spec.generator_elements
        if gens is None or len(gens) != self.n_letters:
            raise GroupError("table groups need one element per letter")
        for i, j in enumerate(self.inv):
            if table[gens[i], gens[j]] != 0:
                raise GroupError("letter images do not respect the involution")
        self._table = table
        self._gen_elems = gens
        words: list[Word | None] = [None] * n
        words[0] = ()
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for s in range(self.n_letters):
                    y = int(table[x, gens[s]])
                    if words[y] is None:
                        words[y] = words[x] + (s,)
                        nxt.append(y)
            # frontier processed in shortlex order keeps first discoveries shortlex-least
            nxt.sort(key=lambda y: words[y])
            frontier = nxt
        if any(w is None for w in words):
            raise GroupError("letters do not generate the table group")
        self._table_words = words

    def _table_eval(self, word: Word) -> int:
        x = 0
        t, g = self._table, self._gen_elems
        for s in word:
            x = int(t[x, g[s]])
        return x

    # ------------------------------------------------------------------ balls
    def ball(self, r: int) -> BallTable:
        if r < 0:
            raise ValueError("radius must be >= 0")
        hit = self._balls.get(r)
        if hit is not None:
            return hit
        cap = self.spec.max_elements
        if self.spec.kind == "free":
            k = self.n_letters // 2
            size = 1 + sum(2 * k * (2 * k - 1) ** (j - 1) for j in range(1, r + 1)) if k else 1
            if self.n_letters % 2 == 0 and size > cap:
                raise CapExceeded(f"ball({r}) would have {size} elements > cap {cap}")
        elements: list[Word] = [()]
        seen = {()}
        layer = [()]
        for _ in range(r):
            nxt = []
            for g in layer:
                for s in range(self.n_letters):
                    h = self.normalize(g + (s,))
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
                        if len(seen) > cap:
                            raise CapExceeded(f"ball({r}) exceeds cap {cap}")
            nxt.sort()
            elements.extend(nxt)
            layer = nxt
        index = {g: i for i, g in enumerate(elements)}
        adj = np.full((len(elements), self.n_letters), -1, dtype=np.int64)
        for i, g in enumerate(elements):
            for s in range(self.n_letters):
                j = index.get(self.normalize(g + (s,)))
                if j is not None:
                    adj[i, s] = j
        table = BallTable(r, tuple(elements), adj, index)
        self._balls[r] = table
        return table

    # ------------------------------------------------------------------ delta
    def triangle_slimness(self, a: Word, b: Word, stop_at: int | None = None) -> int:
        """Slimness of the geodesic triangle (e, a, b) whose sides are canonical paths.

        Only vertices are used.  With ``stop_at`` the scan returns early once the
        value is known to be at most ``stop_at``; the result is then a lower bound
        that is correct whenever it exceeds ``stop_at``.
        """
        ab = self.normalize(self.alphabet.invert_word(a) + b)
        s1 = self.path_vertices(a)
        s2 = self.path_vertices(b)
        s3 = [self.normalize(a + p) for p in self.path_vertices(ab)]
        sides = (s1, s2, s3)
        sets = [set(s) for s in sides]
        worst = 0
        floor = stop_at if stop_at is not None else -1
        for k in range(3):
            others = [v for j in range(3) if j != k for v in sides[j]]
            oset = sets[(k + 1) % 3] | sets[(k + 2) % 3]
            for u in sides[k]:
                if u in oset:
                    continue
                lu = len(u)
                best = math.inf
                for v in sorted(others, key=lambda v: abs(len(v) - lu)):
                    if abs(len(v) - lu) >= best:
                        break
                    d = self.distance(u, v)
                    if d < best:
                        best = d
                        if best <= max(worst, floor):
                            break
                if best > worst:
                    worst = int(best)
        return worst

    def estimate_delta(self, r: int) -> int:
        """max(1, ceil(slimness)) over triangles (e, a, b) with a, b in ball(r)."""
        if r < 2:
            raise ValueError("estimate_delta needs r >= 2")
        return max(1, self.raw_slimness(r))

    def raw_slimness(self, r: int) -> int:
        elems = self.ball(r).elements
        worst = 0
        for i, a in enumerate(elems):
            for b in elems[i + 1 :]:
                s = self.triangle_slimness(a, b, stop_at=worst)
                if s > worst:
                    worst = s
        return worst

    # -------------------------------------------------------------- helpers
    def words_of_length(self, n: int) -> Iterable[Word]:
        """All freely reduced words of length n (not normalized)."""
        return self._reduced_words(n)

    def with_generators(self, extra: dict[str, str], inverses: dict[str, str] | None = None) -> "RegeneratedGroup":
        return RegeneratedGroup(self, extra, inverses)


class RegeneratedGroup:
    """The same group viewed through an enlarged generating set S' = S u {new letters}.

    Elements are canonical words of the base group; ``sigma_prime`` gives the
    shortlex-least S'-geodesic word, found by breadth-first search in the
    Cayley graph of (group, S').
    """

    def __init__(self, base: Group, extra: dict[str, str], inverses: dict[str, str] | None = None):
        self.base = base
        names = list(base.alphabet.letters)
        values = [(i,) for i in range(base.n_letters)]
        inverses = dict(inverses or {})
        for name, word in extra.items():
            if name in names:
                raise GroupError(f"letter {name!r} already exists")
            names.append(name)
            values.append(base.parse(word))
        for name, inv_name in list(inverses.items()):
            inverses.setdefault(inv_name, name)
        inv_idx = []
        for i, name in enumerate(names):
            if i < base.n_letters:
                inv_idx.append(base.inv[i])
                continue
            partner = inverses.get(name)
            if partner is None:
                raise GroupError(f"no inverse given for {name!r}")
            inv_idx.append(names.index(partner))
        self.alphabet = GeneratorAlphabet(tuple(names), tuple(inv_idx))
        self.values = tuple(base.normalize(v) for v in values)
        for i, j in enumerate(inv_idx):
            if base.multiply(self.values[i], self.values[j]) != ():
                raise GroupError(f"{names[i]!r} and {names[j]!r} are not inverse")
        self._sigma: dict[Word, Word] = {(): ()}
        self._layer: list[Word] = [()]
        self._radius = 0

    def evaluate(self, word: Sequence[int]) -> Word:
        return self.base.normalize(tuple(itertools.chain.from_iterable(self.values[i] for i in word)))

    def sigma_prime(self, g: Word, max_radius: int = 32) -> Word:
        while g not in self._sigma:
            if self._radius >= max_radius:
                raise CapExceeded(f"S'-geodesic of {self.base.fmt(g)} not found within radius {max_radius}")
            self._grow()
        return self._sigma[g]

    def _grow(self):
        nxt = []
        for h in self._layer:
            w = self._sigma[h]
            for s in range(len(self.alphabet)):
                x = self.base.multiply(h, self.values[s])
                if x not in self._sigma:
                    self._sigma[x] = w + (s,)
                    nxt.append(x)
        nxt.sort(key=lambda x: self._sigma[x])
        self._layer = nxt
        self._radius += 1
        if len(self._sigma) > self.base.spec.max_elements:
            raise CapExceeded("S' ball exceeds cap")
