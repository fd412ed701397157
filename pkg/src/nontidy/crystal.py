"""Exact model of the deck group of the flat manifolds X̄ₙ.

Group elements act on ℝⁿ on the left, ``u_i -> s_i * u_i + c_i``, with
translation parts ``c_i`` in (1/2)ℤ.  The sign pattern is not free data: it
is derived from the translation parts by the rule

    s_1 = +1,    s_i = +1  iff  c_{i-1} is an integer   (i >= 2)

and the parity (odd/even class of the double cover Xₙ -> X̄ₙ) is the
non-integrality of the last coordinate.  Composition reads in application
order: ``(g * h)(u) = g(h(u))``.  Right actions ``x·g`` used elsewhere in the
literature correspond to ``g⁻¹(x)`` here; parity, orders and fixed sets are
unaffected by that switch.

Half-integers are stored as twice their value so every decision is an
integer bit test.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

INFINITE = math.inf

Rational = Fraction | int


@dataclass(frozen=True, order=True)
class Dyadic:
    """A half-integer ``c`` stored as ``twice_value = 2c``."""

    twice_value: int

    @classmethod
    def of(cls, value) -> "Dyadic":
        q = Fraction(value) * 2
        if q.denominator != 1:
            raise ValueError(f"{value} is not a multiple of 1/2")
        return cls(int(q))

    def is_integral(self) -> bool:
        return self.twice_value % 2 == 0

    def as_fraction(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    def __add__(self, other: "Dyadic") -> "Dyadic":
        return Dyadic(self.twice_value + other.twice_value)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        return Dyadic(self.twice_value - other.twice_value)

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.twice_value)

    def scaled(self, sign: int) -> "Dyadic":
        return Dyadic(sign * self.twice_value)

    def __str__(self) -> str:
        return str(self.as_fraction())


def _signs_from_twice(twice: Sequence[int]) -> tuple[int, ...]:
    signs = [1]
    for t in twice[:-1]:
        signs.append(1 if t % 2 == 0 else -1)
    return tuple(signs)


@dataclass(frozen=True)
class GammaElement:
    """Element of Γₙ in normal form; ``twice[i]`` is ``2 * c_{i+1}``."""

    twice: tuple[int, ...]
    signs: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        twice = tuple(int(t) for t in self.twice)
        if not twice:
            raise ValueError("GammaElement needs dimension >= 1")
        object.__setattr__(self, "twice", twice)
        object.__setattr__(self, "signs", _signs_from_twice(twice))

    @classmethod
    def identity(cls, dim: int) -> "GammaElement":
        return cls((0,) * dim)

    @classmethod
    def from_values(cls, values: Iterable) -> "GammaElement":
        return cls(tuple(Dyadic.of(v).twice_value for v in values))

    @property
    def dim(self) -> int:
        return len(self.twice)

    @property
    def c(self) -> tuple[Dyadic, ...]:
        return tuple(Dyadic(t) for t in self.twice)

    @property
    def translation(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(t, 2) for t in self.twice)

    def is_identity(self) -> bool:
        return not any(self.twice)

    def is_translation(self) -> bool:
        return all(s == 1 for s in self.signs)

    @property
    def parity(self) -> int:
        return self.twice[-1] % 2

    def __mul__(self, other: "GammaElement") -> "GammaElement":
        return compose(self, other)

    def inverse(self) -> "GammaElement":
        # g^{-1}(u) = s*(u - c); the sign pattern is unchanged
        return GammaElement(tuple(-s * t for s, t in zip(self.signs, self.twice)))

    def power(self, k: int) -> "GammaElement":
        base = self if k >= 0 else self.inverse()
        out = GammaElement.identity(self.dim)
        for _ in range(abs(k)):
            out = compose(out, base)
        return out

    def act(self, x: Sequence[Rational]) -> tuple[Fraction, ...]:
        return act(self, x)

    def act_scaled(self, coords: Sequence[int], scale: int) -> tuple[int, ...]:
        """Act on integer coordinates measured in units of ``1/scale`` (scale even)."""
        half = scale // 2
        return tuple(s * u + t * half for s, u, t in zip(self.signs, coords, self.twice))

    def to_affine(self) -> "AffineMap":
        return AffineMap(self.signs, self.translation)

    def to_json(self) -> str:
        return json.dumps(list(self.twice))

    @classmethod
    def from_json(cls, text: str) -> "GammaElement":
        data = json.loads(text)
        if not isinstance(data, list) or not all(isinstance(t, int) for t in data):
            raise ValueError("expected a JSON array of integers")
        return cls(tuple(data))

    def __str__(self) -> str:
        return "(" + ", ".join(str(Fraction(t, 2)) for t in self.twice) + ")"


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise ValueError(f"dimension mismatch: {a} != {b}")


def compose(g: GammaElement, h: GammaElement) -> GammaElement:
    """Return ``g * h``, the map ``u -> g(h(u))``."""
    _check_dims(g.dim, h.dim)
    return GammaElement(tuple(s * th + tg for s, th, tg in zip(g.signs, h.twice, g.twice)))


def act(g: GammaElement, x: Sequence[Rational]) -> tuple[Fraction, ...]:
    _check_dims(g.dim, len(x))
    return tuple(s * Fraction(xi) + Fraction(t, 2) for s, xi, t in zip(g.signs, x, g.twice))


def parity(g: GammaElement) -> int:
    return g.parity


def connecting_element(p: Sequence[Rational], q: Sequence[Rational]) -> GammaElement | None:
    """The unique ``g`` in Γₙ with ``g(p) = q``, or None if p, q lie in different orbits."""
    _check_dims(len(p), len(q))
    twice = []
    sign = 1
    for pi, qi in zip(p, q):
        d = 2 * (Fraction(qi) - sign * Fraction(pi))
        if d.denominator != 1:
            return None
        t = int(d)
        twice.append(t)
        sign = 1 if t % 2 == 0 else -1
    return GammaElement(tuple(twice))


def connecting_element_scaled(p: Sequence[int], q: Sequence[int], scale: int) -> GammaElement | None:
    half = scale // 2
    twice = []
    sign = 1
    for pi, qi in zip(p, q):
        t, r = divmod(qi - sign * pi, half)
        if r:
            return None
        twice.append(t)
        sign = 1 if t % 2 == 0 else -1
    return GammaElement(tuple(twice))


# --- general diagonal-sign affine maps -------------------------------------


@dataclass(frozen=True)
class AffineMap:
    """``u -> D u + v`` with ``D`` diagonal ±1 and exact rational ``v``."""

    signs: tuple[int, ...]
    v: tuple[Fraction, ...]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        v = tuple(Fraction(x) for x in self.v)
        if len(signs) != len(v):
            raise ValueError("signs and translation have different lengths")
        if any(s not in (1, -1) for s in signs):
            raise ValueError("diagonal entries must be +1 or -1")
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "v", v)

    @classmethod
    def identity(cls, dim: int) -> "AffineMap":
        return cls((1,) * dim, (Fraction(0),) * dim)

    @property
    def dim(self) -> int:
        return len(self.signs)

    def __call__(self, x: Sequence[Rational]) -> tuple[Fraction, ...]:
        _check_dims(self.dim, len(x))
        return tuple(s * Fraction(xi) + vi for s, xi, vi in zip(self.signs, x, self.v))

    def __mul__(self, other: "AffineMap") -> "AffineMap":
        _check_dims(self.dim, other.dim)
        return AffineMap(
            tuple(a * b for a, b in zip(self.signs, other.signs)),
            tuple(s * w + vi for s, w, vi in zip(self.signs, other.v, self.v)),
        )

    def inverse(self) -> "AffineMap":
        return AffineMap(self.signs, tuple(-s * vi for s, vi in zip(self.signs, self.v)))

    def power(self, k: int) -> "AffineMap":
        base = self if k >= 0 else self.inverse()
        out = AffineMap.identity(self.dim)
        for _ in range(abs(k)):
            out = out * base
        return out

    def is_identity(self) -> bool:
        return all(s == 1 for s in self.signs) and not any(self.v)

    def __str__(self) -> str:
        terms = []
        for i, (s, vi) in enumerate(zip(self.signs, self.v), start=1):
            t = f"{'-' if s < 0 else ''}u{i}"
            if vi:
                t += f" {'+' if vi > 0 else '-'} {abs(vi)}"
            terms.append(t)
        return "u -> (" + ", ".join(terms) + ")"


def element_order(g: GammaElement | AffineMap) -> float:
    """Order of ``g``: 1, 2 or INFINITE.

    Diagonal ±1 linear parts square to the identity, so ``g**2`` is a pure
    translation and no finite order above 2 is possible.
    """
    if isinstance(g, GammaElement):
        if g.is_identity():
            return 1
        sq = compose(g, g)
        assert sq.is_translation(), "square of a deck element must be a translation"
        return 2 if sq.is_identity() else INFINITE
    m = AffineMap(g.signs, g.v)
    assert (m * m).signs == (1,) * m.dim
    power = AffineMap.identity(m.dim)
    for k in range(1, 2 * m.dim + 1):
        power = power * m
        if power.is_identity():
            return k
    return INFINITE


@dataclass(frozen=True)
class FixedSet:
    """Fixed locus of a diagonal-sign affine map.

    ``pinned[i]`` is None for a free coordinate, otherwise its forced value.
    """

    empty: bool
    pinned: tuple[Fraction | None, ...] = ()

    def contains(self, x: Sequence[Rational]) -> bool:
        if self.empty:
            return False
        return all(p is None or Fraction(xi) == p for p, xi in zip(self.pinned, x))

    def dimension(self) -> int:
        return -1 if self.empty else sum(p is None for p in self.pinned)

    def sample(self, free_values: Sequence[Rational]) -> tuple[Fraction, ...]:
        if self.empty:
            raise ValueError("empty fixed set has no points")
        it = iter(free_values)
        return tuple(Fraction(next(it)) if p is None else p for p in self.pinned)


def fixed_points(m: AffineMap | GammaElement) -> FixedSet:
    if isinstance(m, GammaElement):
        m = m.to_affine()
    pinned: list[Fraction | None] = []
    for s, vi in zip(m.signs, m.v):
        if s == 1:
            if vi != 0:
                return FixedSet(True, ())
            pinned.append(None)
        else:
            pinned.append(vi / 2)
    return FixedSet(False, tuple(pinned))


def average_orbit(m: AffineMap | GammaElement, x: Sequence[Rational], k: int) -> tuple[Fraction, ...]:
    """Barycentre ``(1/k) * sum_{i=1..k} m^i(x)`` of the first k orbit points."""
    if k < 1:
        raise ValueError("k must be positive")
    if isinstance(m, GammaElement):
        m = m.to_affine()
    total = [Fraction(0)] * m.dim
    point = tuple(Fraction(xi) for xi in x)
    for _ in range(k):
        point = m(point)
        total = [a + b for a, b in zip(total, point)]
    y = tuple(a / k for a in total)
    if m.power(k).is_identity():
        assert m(y) == y, "barycentre of a finite orbit must be fixed"
    return y


# --- structure of Γₙ --------------------------------------------------------


def lattice_and_point_group(dim: int) -> tuple[list[GammaElement], list[GammaElement]]:
    """Translation lattice basis and coset representatives of Γₙ / L.

    L is spanned by e_1, ..., e_{n-1} and e_n / 2; the representatives put
    1/2 in a subset of the first n-1 slots, giving a point group (Z/2)^{n-1}.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    basis = []
    for i in range(dim):
        twice = [0] * dim
        twice[i] = 1 if i == dim - 1 else 2
        basis.append(GammaElement(tuple(twice)))
    reps = []
    for bits in itertools.product((0, 1), repeat=dim - 1):
        reps.append(GammaElement(tuple(bits) + (0,)))
    return basis, reps


class GammaGroup:
    """Γₙ packaged for the complex builder (lattice periods, point group, orbit solving)."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self.basis, self.point_reps = lattice_and_point_group(dim)
        self.periods = tuple(b.twice[i] for i, b in enumerate(self.basis))

    def identity(self) -> GammaElement:
        return GammaElement.identity(self.dim)

    def act_scaled(self, g: GammaElement, coords: Sequence[int], scale: int) -> tuple[int, ...]:
        return g.act_scaled(coords, scale)

    def between_scaled(self, p: Sequence[int], q: Sequence[int], scale: int) -> GammaElement | None:
        return connecting_element_scaled(p, q, scale)

    def compose(self, g: GammaElement, h: GammaElement) -> GammaElement:
        return compose(g, h)

    def inverse(self, g: GammaElement) -> GammaElement:
        return g.inverse()

    def parity(self, g: GammaElement) -> int:
        return g.parity

    def __repr__(self) -> str:
        return f"GammaGroup({self.dim})"


def coindex_one_witness(dim: int) -> GammaElement:
    """Canonical odd element (0, ..., 0, 1/2); lifts to an equivariant circle in Xₙ."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    w = GammaElement((0,) * (dim - 1) + (1,))
    assert w.parity == 1
    return w


# --- involutions and torsion ------------------------------------------------

# Allowed values for one translation coordinate, as subsets of (1/2)Z.
ZERO = "{0}"
INTEGERS = "Z"
HALF_ODD = "1/2+Z"
ALL_HALVES = "(1/2)Z"
EMPTY = "empty"

_MEET = {
    (ALL_HALVES, ALL_HALVES): ALL_HALVES,
    (ALL_HALVES, INTEGERS): INTEGERS,
    (ALL_HALVES, HALF_ODD): HALF_ODD,
    (ZERO, ALL_HALVES): ZERO,
    (ZERO, INTEGERS): ZERO,
    (ZERO, HALF_ODD): EMPTY,
}

# a nonzero representative in each domain (ZERO has none)
_NONZERO_TWICE = {INTEGERS: 2, HALF_ODD: 1, ALL_HALVES: 1}


@dataclass(frozen=True)
class PropagationStep:
    coord: int  # 1-based
    from_square: str
    from_sign_rule: str
    result: str

    def as_dict(self) -> dict:
        return {
            "coord": self.coord,
            "from_square": self.from_square,
            "from_sign_rule": self.from_sign_rule,
            "result": self.result,
        }


@dataclass(frozen=True)
class PatternEntry:
    pattern: tuple[int, ...]
    steps: tuple[PropagationStep, ...]
    outcome: str  # "contradiction" | "identity" | "nontrivial"
    contradiction_at: int | None = None
    example: GammaElement | None = None

    @property
    def constraints(self) -> list[str]:
        out = []
        for st in self.steps:
            out.append(f"c{st.coord} in {st.from_square} (square is identity)")
            if st.from_sign_rule != ALL_HALVES:
                out.append(f"c{st.coord} in {st.from_sign_rule} (sign rule, s{st.coord + 1})")
        return out

    def as_dict(self) -> dict:
        return {
            "pattern": list(self.pattern),
            "constraints": self.constraints,
            "steps": [s.as_dict() for s in self.steps],
            "outcome": self.outcome,
            "contradiction_at": self.contradiction_at,
            "example": None if self.example is None else list(self.example.twice),
        }


def _square_domain(sign: int) -> str:
    # g*g = id  <=>  2 c_i = 0 wherever s_i = +1
    return ZERO if sign == 1 else ALL_HALVES


def _sign_rule_domain(pattern: Sequence[int], i: int) -> str:
    # s_{i+1} = +1 iff c_i integral; the last coordinate is unconstrained
    if i + 1 >= len(pattern):
        return ALL_HALVES
    return INTEGERS if pattern[i + 1] == 1 else HALF_ODD


def propagate_pattern(pattern: Sequence[int]) -> PatternEntry:
    """Solve ``g*g = id`` among elements with the given sign pattern."""
    pattern = tuple(pattern)
    if not pattern or pattern[0] != 1:
        raise ValueError("admissible patterns start with +1")
    steps = []
    domains = []
    contradiction_at = None
    for i, s in enumerate(pattern):
        a = _square_domain(s)
        b = _sign_rule_domain(pattern, i)
        r = _MEET[(a, b)]
        steps.append(PropagationStep(i + 1, a, b, r))
        domains.append(r)
        if r == EMPTY and contradiction_at is None:
            contradiction_at = i + 1
    if contradiction_at is not None:
        return PatternEntry(pattern, tuple(steps), "contradiction", contradiction_at)
    if all(d == ZERO for d in domains):
        return PatternEntry(pattern, tuple(steps), "identity", None, GammaElement.identity(len(pattern)))
    twice = [0 if d in (ZERO, ALL_HALVES) else _NONZERO_TWICE[d] for d in domains]
    if not any(twice):
        j = next(i for i, d in enumerate(domains) if d != ZERO)
        twice[j] = _NONZERO_TWICE[domains[j]]
    return PatternEntry(pattern, tuple(steps), "nontrivial", None, GammaElement(tuple(twice)))


def admissible_patterns(dim: int) -> Iterator[tuple[int, ...]]:
    for rest in itertools.product((1, -1), repeat=dim - 1):
        yield (1,) + rest


@dataclass(frozen=True)
class TorsionCertificate:
    dim: int
    entries: tuple[PatternEntry, ...]
    verdict: str  # "torsion-free" | "has torsion"
    counterexample: GammaElement | AffineMap | None = None
    method: str = "sign-pattern propagation"

    def as_dict(self) -> dict:
        if isinstance(self.counterexample, GammaElement):
            ce = {"twice": list(self.counterexample.twice)}
        elif isinstance(self.counterexample, AffineMap):
            ce = {"signs": list(self.counterexample.signs), "v": [str(x) for x in self.counterexample.v]}
        else:
            ce = None
        return {
            "dim": self.dim,
            "method": self.method,
            "verdict": self.verdict,
            "counterexample": ce,
            "patterns": [e.as_dict() for e in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


class AffineGroup:
    """Group generated by diagonal-sign affine maps with declared parities.

    Only used for control inputs.  Element enumeration is by word length, so
    a found witness is exact while absence is only up to ``max_length``.
    """

    def __init__(self, generators: Sequence[tuple[AffineMap, int]]):
        if not generators:
            raise ValueError("need at least one generator")
        dims = {g.dim for g, _ in generators}
        if len(dims) != 1:
            raise ValueError("generators have different dimensions")
        self.dim = dims.pop()
        self.generators = [(g, p % 2) for g, p in generators]

    def elements(self, max_length: int = 4) -> Iterator[tuple[AffineMap, int]]:
        letters = []
        for g, p in self.generators:
            letters.append((g, p))
            letters.append((g.inverse(), p))
        seen = {AffineMap.identity(self.dim): 0}
        yield AffineMap.identity(self.dim), 0
        frontier = deque([(AffineMap.identity(self.dim), 0, 0)])
        while frontier:
            m, p, length = frontier.popleft()
            if length == max_length:
                continue
            for g, q in letters:
                m2, p2 = m * g, p ^ q
                if m2 in seen:
                    if seen[m2] != p2:
                        raise ValueError("declared parities do not define a homomorphism")
                    continue
                seen[m2] = p2
                yield m2, p2
                frontier.append((m2, p2, length + 1))


def find_odd_involution(group: int | AffineGroup, max_length: int = 4):
    """An odd element squaring to the identity, or None.

    For Γₙ (an int argument) this is an exact decision by propagating the
    square and sign-rule constraints through every admissible sign pattern.
    """
    if isinstance(group, AffineGroup):
        for m, p in group.elements(max_length):
            if p == 1 and (m * m).is_identity():
                return m
        return None
    dim = int(group)
    if dim < 1:
        raise ValueError("dim must be >= 1")
    for pattern in admissible_patterns(dim):
        entry = propagate_pattern(pattern)
        if entry.outcome == "contradiction":
            continue
        last = entry.steps[-1].result
        if last in (HALF_ODD, ALL_HALVES):
            twice = list(entry.example.twice)
            twice[-1] = 1
            alpha = GammaElement(tuple(twice))
            if alpha.signs == pattern and compose(alpha, alpha).is_identity():
                return alpha
    return None


def torsion_free_certificate(group: int | AffineGroup, max_length: int = 4) -> TorsionCertificate:
    if isinstance(group, AffineGroup):
        for m, _ in group.elements(max_length):
            if not m.is_identity() and (m * m).is_identity():
                return TorsionCertificate(group.dim, (), "has torsion", m, "bounded word search")
        return TorsionCertificate(group.dim, (), "torsion-free", None, "bounded word search")
    dim = int(group)
    if dim < 1:
        raise ValueError("dim must be >= 1")
    entries = tuple(propagate_pattern(p) for p in admissible_patterns(dim))
    bad = [e for e in entries if e.outcome == "nontrivial"]
    if bad:
        return TorsionCertificate(dim, entries, "has torsion", bad[0].example)
    return TorsionCertificate(dim, entries, "torsion-free")


def replay_certificate(cert: TorsionCertificate) -> bool:
    """Independently re-check every step of a certificate.  Raises on any defect."""
    if cert.method == "bounded word search":
        m = cert.counterexample
        if cert.verdict == "has torsion":
            if m is None or m.is_identity() or not (m * m).is_identity():
                raise AssertionError("counterexample is not a non-trivial involution")
        return True
    n = cert.dim
    patterns = [e.pattern for e in cert.entries]
    if sorted(patterns) != sorted(admissible_patterns(n)) or len(set(patterns)) != 2 ** (n - 1):
        raise AssertionError("certificate does not cover every admissible sign pattern")
    nontrivial = []
    for e in cert.entries:
        if len(e.steps) != n:
            raise AssertionError(f"pattern {e.pattern}: wrong number of steps")
        first_empty = None
        results = []
        for i, st in enumerate(e.steps):
            if st.coord != i + 1:
                raise AssertionError(f"pattern {e.pattern}: steps out of order")
            if st.from_square != (ZERO if e.pattern[i] == 1 else ALL_HALVES):
                raise AssertionError(f"pattern {e.pattern}, c{i + 1}: wrong square constraint")
            expect = ALL_HALVES if i == n - 1 else (INTEGERS if e.pattern[i + 1] == 1 else HALF_ODD)
            if st.from_sign_rule != expect:
                raise AssertionError(f"pattern {e.pattern}, c{i + 1}: wrong sign-rule constraint")
            a, b = st.from_square, st.from_sign_rule
            meet = a if b == ALL_HALVES else b if a == ALL_HALVES else (ZERO if b == INTEGERS else EMPTY)
            if st.result != meet:
                raise AssertionError(f"pattern {e.pattern}, c{i + 1}: wrong intersection")
            if meet == EMPTY and first_empty is None:
                first_empty = i + 1
            results.append(meet)
        if first_empty is not None:
            if e.outcome != "contradiction" or e.contradiction_at != first_empty:
                raise AssertionError(f"pattern {e.pattern}: contradiction misreported")
        elif all(r == ZERO for r in results):
            if e.outcome != "identity":
                raise AssertionError(f"pattern {e.pattern}: expected identity only")
        else:
            g = e.example
            if e.outcome != "nontrivial" or g is None:
                raise AssertionError(f"pattern {e.pattern}: missing torsion example")
            if g.signs != e.pattern or g.is_identity() or not compose(g, g).is_identity():
                raise AssertionError(f"pattern {e.pattern}: example is not an involution")
            nontrivial.append(e)
    verdict = "has torsion" if nontrivial else "torsion-free"
    if verdict != cert.verdict:
        raise AssertionError("overall verdict does not follow from the entries")
    return True
