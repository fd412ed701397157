"""Independent reference computations used to freeze expected values.

Nothing here imports the code under test except for plain data types.
"""

from __future__ import annotations

import math
from fractions import Fraction


def affine_compose(f, g):
    """(signs, v) pairs with exact Fractions; returns f∘g."""
    fs, fv = f
    gs, gv = g
    return (
        tuple(a * b for a, b in zip(fs, gs)),
        tuple(s * w + v for s, w, v in zip(fs, gv, fv)),
    )


def affine_apply(f, x):
    s, v = f
    return tuple(si * Fraction(xi) + vi for si, xi, vi in zip(s, x, v))


def deck_affine(twice):
    """Sign rule written out directly from the construction, as an affine pair."""
    signs = [1] + [1 if t % 2 == 0 else -1 for t in twice[:-1]]
    return tuple(signs), tuple(Fraction(t, 2) for t in twice)


def mod2_abelianization_rank(n: int) -> int:
    """dim over Z/2 of Γₙ / (commutators, squares), computed in the finite
    quotient by the normal subgroup of translations in (2Z)^n."""
    import itertools

    def mul(g, h):
        signs = [1] + [1 if t % 2 == 0 else -1 for t in g[:-1]]
        return tuple((s * b + a) % 4 for s, a, b in zip(signs, g, h))

    def inv(g):
        signs = [1] + [1 if t % 2 == 0 else -1 for t in g[:-1]]
        return tuple((-s * a) % 4 for s, a in zip(signs, g))

    elements = list(itertools.product(range(4), repeat=n))
    gens = {mul(g, g) for g in elements}
    for g in elements:
        for h in elements:
            gens.add(mul(mul(g, h), mul(inv(g), inv(h))))
    identity = (0,) * n
    sub = {identity}
    frontier = [identity]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = mul(x, g)
            if y not in sub:
                sub.add(y)
                frontier.append(y)
    index = len(elements) // len(sub)
    return int(math.log2(index))


def dense_rank_gf2(rows: list[list[int]]) -> int:
    """Textbook elimination on lists of 0/1."""
    m = [list(r) for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                m[i] = [a ^ b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank
