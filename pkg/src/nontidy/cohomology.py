"""Mod-2 cohomology of Δ-complex models: Betti numbers, cup products,
Stiefel-Whitney height of the double cover, and loop parities."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Sequence

from nontidy.gf2 import BitVector, kernel_basis, rank, solve_in_span
from nontidy.simplicial import DeltaComplex, QuotientModel, holonomy_cocycle


class NotACocycle(ValueError):
    pass


@dataclass(frozen=True)
class Cochain:
    degree: int
    vector: BitVector

    @classmethod
    def zero(cls, K: DeltaComplex, degree: int) -> "Cochain":
        return cls(degree, BitVector(K.count(degree)))

    @classmethod
    def unit(cls, K: DeltaComplex) -> "Cochain":
        return cls(0, BitVector.ones(K.count(0)))

    def __add__(self, other: "Cochain") -> "Cochain":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return Cochain(self.degree, self.vector ^ other.vector)

    def is_zero(self) -> bool:
        return self.vector.is_zero()


def betti_mod2(K: DeltaComplex) -> list[int]:
    ranks = [rank(K.boundary_matrix(k)) for k in range(K.dim + 2)]
    return [K.count(k) - ranks[k + 1] - ranks[k] for k in range(K.dim + 1)]


def coboundary(u: Cochain, K: DeltaComplex) -> Cochain:
    d = K.boundary_matrix(u.degree + 1)
    return Cochain(u.degree + 1, d.right_apply(u.vector))


def is_cocycle(u: Cochain, K: DeltaComplex) -> bool:
    if u.vector.length != K.count(u.degree):
        raise ValueError("cochain length does not match the complex")
    return coboundary(u, K).is_zero()


def is_coboundary(u: Cochain, K: DeltaComplex) -> bool:
    """True iff ``u`` lies in the image of δ."""
    if u.vector.length != K.count(u.degree):
        raise ValueError("cochain length does not match the complex")
    if u.is_zero():
        return True
    if u.degree == 0:
        return False
    # im δ_{k-1} is spanned by the columns of ∂_k
    return solve_in_span(K.boundary_matrix(u.degree).transpose(), u.vector) is not None


def cup(u: Cochain, v: Cochain, K: DeltaComplex, check: bool = True) -> Cochain:
    """Front-face/back-face cup product of cocycles."""
    if check:
        for c in (u, v):
            if not is_cocycle(c, K):
                raise NotACocycle(f"degree-{c.degree} cochain is not a cocycle")
    p, q = u.degree, v.degree
    k = p + q
    n = K.count(k)
    ub, vb = u.vector.bits, v.vector.bits
    bits = 0
    for i in range(n):
        if (ub >> K.front_face(k, i, p)) & 1 and (vb >> K.back_face(k, i, q)) & 1:
            bits |= 1 << i
    return Cochain(k, BitVector(n, bits))


def cocycle_basis(K: DeltaComplex, degree: int) -> list[Cochain]:
    """A basis of the cocycle space Z^k (not of cohomology)."""
    d = K.boundary_matrix(degree + 1)
    return [Cochain(degree, x) for x in kernel_basis(d.transpose())]


@dataclass
class HeightReport:
    dim: int
    betti: list[int]
    height: int
    powers: list[tuple[int, bool]] = field(default_factory=list)
    pairing: int = 0

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "betti": list(self.betti),
            "height": self.height,
            "powers": [{"k": k, "is_coboundary": c} for k, c in self.powers],
            "pairing": self.pairing,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


def class_height(K: DeltaComplex, w: Cochain) -> tuple[int, list[tuple[int, bool]], int]:
    """Largest k <= dim+1 with w^k not a coboundary (0 if none), the per-power
    verdicts, and the pairing of w^dim with the sum of all top simplices."""
    n = K.dim
    powers = []
    power = w
    height = 0
    top = None
    for k in range(1, n + 2):
        if k > 1:
            power = cup(power, w, K, check=False)
        zero = is_coboundary(power, K)
        powers.append((k, zero))
        if not zero:
            if height != k - 1:
                raise AssertionError("cup powers vanished and then reappeared")
            height = k
        if k == n:
            top = power
    pairing = top.vector.weight() % 2 if top is not None else 0
    return height, powers, pairing


def sw_height(m: QuotientModel, w1: Cochain | None = None) -> HeightReport:
    """Stiefel-Whitney height of the double cover encoded by ``m``.

    ``w1`` overrides the holonomy representative (it must be a cocycle).
    """
    K = m.complex
    if w1 is None:
        w1 = Cochain(1, holonomy_cocycle(m))
    elif not is_cocycle(w1, K):
        raise NotACocycle("w1 override is not a cocycle")
    height, powers, pairing = class_height(K, w1)
    return HeightReport(m.dim, betti_mod2(K), height, powers, pairing)


def _walk(m: QuotientModel, base: int, loop: Sequence[int]) -> list[bool]:
    """Traversal directions (True = tail to head) of an edge loop at ``base``."""
    K = m.complex
    cur = base
    dirs = []
    for e in loop:
        if not 0 <= e < K.count(1):
            raise ValueError(f"no edge {e}")
        a, b = K.simplices[1][e]
        if cur == a:
            dirs.append(True)
            cur = b
        elif cur == b:
            dirs.append(False)
            cur = a
        else:
            raise ValueError(f"edge {e} does not start at vertex {cur}")
    if cur != base:
        raise ValueError("edge path is not closed")
    return dirs


def path_lift_parity(m: QuotientModel, base: int, loop: Sequence[int]) -> int:
    """Lift the loop to ℝⁿ point by point and read off the parity of the deck
    element carrying the start of the lift to its end."""
    g, s = m.group, m.scale
    dirs = _walk(m, base, loop)
    p = m.lifts[base][1]
    for e, forward in zip(loop, dirs):
        seg = m.simplex_lifts[1][e]
        start, end = (seg[0][1], seg[1][1]) if forward else (seg[1][1], seg[0][1])
        h = g.between_scaled(start, p, s)
        p = g.act_scaled(h, end, s)
    delta = g.between_scaled(m.lifts[base][1], p, s)
    if delta is None:
        raise AssertionError("lifted loop does not end over its base vertex")
    return g.parity(delta)


def loop_parity(m: QuotientModel, base: int, loop: Sequence[int]) -> int:
    """Image of an edge loop under π₁(X̄) -> Z/2: the sum of its edge holonomies."""
    _walk(m, base, loop)
    w = holonomy_cocycle(m)
    bit = 0
    for e in loop:
        bit ^= w[e]
    assert bit == path_lift_parity(m, base, loop), "edge holonomy disagrees with path lifting"
    return bit


def random_loop(m: QuotientModel, base: int, length: int, rng: random.Random) -> list[int]:
    """Random walk of ``length`` edges from ``base``, closed up along a BFS path."""
    K = m.complex
    incident: list[list[int]] = [[] for _ in range(K.count(0))]
    for e, (a, b) in enumerate(K.simplices[1]):
        incident[a].append(e)
        if b != a:
            incident[b].append(e)
    loop, cur = [], base
    for _ in range(length):
        e = rng.choice(incident[cur])
        a, b = K.simplices[1][e]
        cur = b if cur == a else a
        loop.append(e)
    # BFS back to base
    prev = {cur: None}
    queue = [cur]
    for v in queue:
        if v == base:
            break
        for e in incident[v]:
            a, b = K.simplices[1][e]
            w = b if v == a else a
            if w not in prev:
                prev[w] = (v, e)
                queue.append(w)
    back = []
    v = base
    while prev[v] is not None:
        u, e = prev[v]
        back.append(e)
        v = u
    loop.extend(reversed(back))
    return loop


def verify_height_shift(m_low: QuotientModel, m_high: QuotientModel) -> bool:
    """Height goes up by exactly one from the lower model to the higher one."""
    return sw_height(m_high).height == sw_height(m_low).height + 1


def random_coboundary(K: DeltaComplex, degree: int, rng: random.Random) -> Cochain:
    b = BitVector.random(K.count(degree - 1), rng)
    return coboundary(Cochain(degree - 1, b), K)
