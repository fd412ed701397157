"""Finite Δ-complex models of the flat manifolds X̄ₙ = ℝⁿ/Γₙ.

Pipeline:

1. cubical grid of spacing ``r`` on a fundamental box of the translation
   lattice L;
2. reflected Kuhn ("Union Jack") triangulation of every cube: each simplex
   is a chain starting at the cube corner with all-even grid coordinates,
   so the number of odd grid coordinates strictly increases along it;
3. barycentric subdivision only while the point group F = Γₙ/L fails to act
   regularly on the torus model ℝⁿ/L (rarely needed, capped);
4. quotient by Γₙ, remembering for each quotient vertex one lift in ℝⁿ and
   for each edge the deck element connecting the lifts of its endpoints.

Points are integer tuples in units of ``1/scale``.  Every lifted vertex also
carries a *rank* (odd-coordinate count, or face dimension after
subdivision).  Ranks are Γₙ-invariant and strictly increase along every
simplex, which fixes the vertex order that the cup product needs.

The quotient is a Δ-complex, not a simplicial complex: two edges may share
both endpoints.  Face maps are therefore stored explicitly.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from nontidy.crystal import GammaGroup
from nontidy.gf2 import BitMatrix, BitVector

Point = tuple[int, ...]
Vertex = tuple[int, Point]  # (rank, coords)
Lifted = tuple[Vertex, ...]


class ComplexBuildError(RuntimeError):
    pass


class IntegrityError(RuntimeError):
    pass


@dataclass
class DeltaComplex:
    """Ordered Δ-complex.

    ``simplices[k][i]`` is the vertex tuple of the i-th k-simplex and
    ``faces[k][i][j]`` the index of its face opposite vertex ``j``.
    """

    simplices: list[list[tuple[int, ...]]]
    faces: list[list[tuple[int, ...]]]

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def count(self, k: int) -> int:
        if 0 <= k < len(self.simplices):
            return len(self.simplices[k])
        return 0

    def cells_per_dim(self) -> list[int]:
        return [len(s) for s in self.simplices]

    def euler(self) -> int:
        return sum((-1) ** k * len(s) for k, s in enumerate(self.simplices))

    def face(self, k: int, i: int, j: int) -> int:
        return self.faces[k][i][j]

    def front_face(self, k: int, i: int, p: int) -> int:
        """Index of the p-simplex spanned by the first p+1 vertices."""
        for d in range(k, p, -1):
            i = self.faces[d][i][d]
        return i

    def back_face(self, k: int, i: int, q: int) -> int:
        """Index of the q-simplex spanned by the last q+1 vertices."""
        for d in range(k, q, -1):
            i = self.faces[d][i][0]
        return i

    def boundary_matrix(self, k: int) -> BitMatrix:
        """∂ₖ with rows indexed by k-simplices and columns by (k-1)-simplices."""
        if k == 0:
            return BitMatrix(self.count(0), 0)
        if k > self.dim:
            return BitMatrix(0, self.count(k - 1))
        rows = []
        for fs in self.faces[k]:
            r = 0
            for f in fs:
                r ^= 1 << f
            rows.append(r)
        return BitMatrix(len(rows), self.count(k - 1), rows)

    def check(self) -> None:
        """Raise if faces are missing or inconsistent."""
        for k in range(1, self.dim + 1):
            for i, (verts, fs) in enumerate(zip(self.simplices[k], self.faces[k])):
                if len(verts) != k + 1 or len(fs) != k + 1:
                    raise IntegrityError(f"{k}-simplex {i} has wrong arity")
                for j, f in enumerate(fs):
                    if not 0 <= f < self.count(k - 1):
                        raise IntegrityError(f"{k}-simplex {i}: face {j} missing")
                    if self.simplices[k - 1][f] != verts[:j] + verts[j + 1:]:
                        raise IntegrityError(f"{k}-simplex {i}: face {j} has wrong vertices")
            for i, fs in enumerate(self.faces[k]):
                # simplicial identity d_i d_j = d_{j-1} d_i for i < j
                if k >= 2:
                    for a in range(k + 1):
                        for b in range(a + 1, k + 1):
                            if self.faces[k - 1][fs[b]][a] != self.faces[k - 1][fs[a]][b - 1]:
                                raise IntegrityError(f"{k}-simplex {i}: face identities fail")

    def coface_counts(self, k: int) -> list[int]:
        counts = [0] * self.count(k)
        if k + 1 <= self.dim:
            for fs in self.faces[k + 1]:
                for f in fs:
                    counts[f] += 1
        return counts

    def is_closed_pseudomanifold(self) -> bool:
        n = self.dim
        if n == 0:
            return True
        return all(c == 2 for c in self.coface_counts(n - 1))


def boundary_matrices(K: DeltaComplex) -> list[BitMatrix]:
    return [K.boundary_matrix(k) for k in range(K.dim + 1)]


# --- lifted triangulations ---------------------------------------------------


def _parse_resolution(resolution) -> Fraction:
    r = Fraction(resolution)
    if r <= 0 or r.numerator != 1 or r.denominator & (r.denominator - 1):
        raise ValueError(f"resolution must be 1/2^k, got {resolution}")
    if r.denominator < 4:
        raise ValueError("resolution must be at most 1/4 so deck translations are even grid steps")
    return r


def union_jack_simplices(dim: int, shape: Sequence[int]) -> list[Lifted]:
    """Reflected Kuhn triangulation of the grid cubes ``0 <= k_i < shape[i]``.

    Coordinates are grid units (scale 1).
    """
    out = []
    for cube in itertools.product(*(range(s) for s in shape)):
        base = [k if k % 2 == 0 else k + 1 for k in cube]
        step = [1 if k % 2 == 0 else -1 for k in cube]
        for perm in itertools.permutations(range(dim)):
            p = list(base)
            chain = [(0, tuple(p))]
            for j, axis in enumerate(perm, start=1):
                p[axis] += step[axis]
                chain.append((j, tuple(p)))
            out.append(tuple(chain))
    return out


def barycentric_subdivision(top: Sequence[Lifted], scale: int) -> tuple[list[Lifted], int]:
    """Subdivide every lifted top simplex; returns (new simplices, new scale).

    New vertices are barycentres of faces, ranked by face dimension.
    """
    if not top:
        return [], scale
    n = len(top[0]) - 1
    mult = math.lcm(*range(1, n + 2))
    out = []
    for simplex in top:
        pts = [[c * mult for c in v[1]] for v in simplex]
        for perm in itertools.permutations(range(n + 1)):
            acc = [0] * len(pts[0])
            chain = []
            for j, idx in enumerate(perm):
                acc = [a + b for a, b in zip(acc, pts[idx])]
                chain.append((j, tuple(a // (j + 1) for a in acc)))
            out.append(tuple(chain))
    return out, scale * mult


# --- torus model and point-group action -----------------------------------


class _Torus:
    """ℝⁿ/L with the diagonal lattice L given by ``periods`` (in units of 1/scale)."""

    def __init__(self, periods: Sequence[int]):
        self.periods = tuple(periods)

    def reduce(self, x: Point) -> Point:
        return tuple(a % p for a, p in zip(x, self.periods))

    def canonical(self, simplex: Lifted) -> Lifted:
        x0 = simplex[0][1]
        shift = [-(a - a % p) for a, p in zip(x0, self.periods)]
        return tuple((r, tuple(a + s for a, s in zip(x, shift))) for r, x in simplex)


def _close_under_faces(top: Iterable[Lifted], canon) -> list[set[Lifted]]:
    top = {canon(s) for s in top}
    n = len(next(iter(top))) - 1
    levels: list[set[Lifted]] = [set() for _ in range(n + 1)]
    levels[n] = top
    for k in range(n, 0, -1):
        for s in levels[k]:
            for j in range(k + 1):
                levels[k - 1].add(canon(s[:j] + s[j + 1:]))
    return levels


def _sort_key(s: Lifted):
    return tuple((r, x) for r, x in s)


def _assemble(levels: list[set[Lifted]], canon, vertex_id) -> tuple[DeltaComplex, list[list[Lifted]]]:
    ordered = [sorted(level, key=_sort_key) for level in levels]
    index = [{s: i for i, s in enumerate(level)} for level in ordered]
    simplices, faces = [], []
    for k, level in enumerate(ordered):
        simplices.append([tuple(vertex_id(v) for v in s) for s in level])
        if k == 0:
            faces.append([() for _ in level])
        else:
            faces.append([
                tuple(index[k - 1][canon(s[:j] + s[j + 1:])] for j in range(k + 1)) for s in level
            ])
    return DeltaComplex(simplices, faces), ordered


@dataclass
class GroupActionOnComplex:
    """Point-group representatives and the vertex/simplex permutations they induce."""

    elements: list[Any]
    vertex_perms: list[list[int]]
    simplex_perms: list[list[list[int]]]


@dataclass
class RegularityReport:
    ok: bool
    problems: list[str] = field(default_factory=list)


def torus_action(group, torus: _Torus, K: DeltaComplex, lifted: list[list[Lifted]], scale: int):
    """Permutations of the torus cells induced by the point-group reps.

    Returns (action, problems); problems lists every cell whose image is not
    an equally ordered cell.
    """
    index = [{s: i for i, s in enumerate(level)} for level in lifted]
    rank_at = {x: r for (r, x), in lifted[0]}
    problems = []
    vperms, sperms = [], []
    for g in group.point_reps:
        per_dim = []
        for k, level in enumerate(lifted):
            perm = []
            for s in level:
                image = []
                for r, x in s:
                    y = torus.reduce(group.act_scaled(g, x, scale))
                    if rank_at.get(y) != r:
                        problems.append(f"{g}: vertex rank not preserved at {x}")
                    image.append((r, group.act_scaled(g, x, scale)))
                j = index[k].get(torus.canonical(tuple(image)))
                if j is None:
                    problems.append(f"{g}: image of {k}-cell {s} is not a cell")
                    j = -1
                perm.append(j)
            per_dim.append(perm)
        sperms.append(per_dim)
        vperms.append(per_dim[0])
    return GroupActionOnComplex(list(group.point_reps), vperms, sperms), problems


def check_regularity(action: GroupActionOnComplex, K: DeltaComplex, problems: Sequence[str] = ()) -> RegularityReport:
    """Verify that F permutes ordered cells, freely, with adjacent vertices in distinct orbits."""
    out = list(problems)
    for idx, (g, per_dim) in enumerate(zip(action.elements, action.simplex_perms)):
        if idx == 0:
            # the first representative is the identity
            continue
        for k, perm in enumerate(per_dim):
            if any(j == i for i, j in enumerate(perm)):
                out.append(f"{g} maps a {k}-cell to itself")
                break
        if sorted(per_dim[0]) != list(range(len(per_dim[0]))):
            out.append(f"{g} does not permute vertices")
    orbit = list(range(K.count(0)))
    for perm in action.vertex_perms:
        for v, w in enumerate(perm):
            if w >= 0:
                orbit[v] = min(orbit[v], w)
    for a, b in (K.simplices[1] if K.dim >= 1 else []):
        if orbit[a] == orbit[b]:
            out.append(f"adjacent vertices {a}, {b} lie in one orbit")
            break
    return RegularityReport(not out, out)


# --- quotient ----------------------------------------------------------------


@dataclass
class QuotientModel:
    complex: DeltaComplex
    dim: int
    resolution: Fraction
    scale: int
    group: Any
    lifts: list[Vertex]
    simplex_lifts: list[list[Lifted]]
    edge_elements: list[Any]
    lift_rule: str = "least"
    subdivisions: int = 0
    torus_cells: list[int] = field(default_factory=list)

    def edge_parity(self, e: int) -> int:
        return self.group.parity(self.edge_elements[e])

    def summary(self) -> dict:
        return {
            "dim": self.dim,
            "resolution": str(self.resolution),
            "cells_per_dim": self.complex.cells_per_dim(),
            "euler": self.complex.euler(),
        }


class _OrbitSolver:
    def __init__(self, group, torus: _Torus, scale: int):
        self.group = group
        self.torus = torus
        self.scale = scale
        self._cache: dict[Point, tuple[Point, ...]] = {}

    def box_lifts(self, x: Point) -> tuple[Point, ...]:
        """All orbit points in the fundamental box of L, sorted."""
        hit = self._cache.get(x)
        if hit is None:
            g = self.group
            hit = tuple(sorted({self.torus.reduce(g.act_scaled(f, x, self.scale)) for f in g.point_reps}))
            self._cache[x] = hit
        return hit

    def to_least(self, x: Point):
        rep = self.box_lifts(x)[0]
        return rep, self.group.between_scaled(x, rep, self.scale)

    def canonical(self, simplex: Lifted) -> Lifted:
        _, g = self.to_least(simplex[0][1])
        return tuple((r, self.group.act_scaled(g, x, self.scale)) for r, x in simplex)


def build_quotient_model(
    dim: int,
    resolution=Fraction(1, 4),
    *,
    group=None,
    lift_rule: str = "least",
    subdivisions: int = 0,
    max_subdivisions: int = 3,
) -> QuotientModel:
    """Δ-complex model of ℝⁿ/``group`` (default Γₙ) with lifts and edge holonomy.

    ``subdivisions`` forces that many barycentric subdivisions up front;
    further ones are added only while the point-group action is irregular.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if lift_rule not in ("least", "greatest"):
        raise ValueError(f"unknown lift rule {lift_rule!r}")
    r = _parse_resolution(resolution)
    if group is None:
        group = GammaGroup(dim)
    if group.dim != dim:
        raise ValueError("group dimension does not match")

    grid = r.denominator  # grid points per unit length
    shape = [p * grid // 2 for p in group.periods]
    top = union_jack_simplices(dim, shape)
    scale = grid
    done = 0
    for _ in range(subdivisions):
        top, scale = barycentric_subdivision(top, scale)
        done += 1

    while True:
        torus = _Torus([p * scale // 2 for p in group.periods])
        levels = _close_under_faces(top, torus.canonical)
        vertex_index: dict[Point, int] = {}
        for i, ((_, x),) in enumerate(sorted(levels[0], key=_sort_key)):
            vertex_index[x] = i
        T, lifted = _assemble(levels, torus.canonical, lambda v: vertex_index[torus.reduce(v[1])])
        action, problems = torus_action(group, torus, T, lifted, scale)
        report = check_regularity(action, T, problems)
        if report.ok:
            break
        if done >= max_subdivisions:
            raise ComplexBuildError(
                f"point-group action still irregular after {done} subdivisions: {report.problems[:3]}"
            )
        top, scale = barycentric_subdivision(top, scale)
        done += 1

    solver = _OrbitSolver(group, torus, scale)
    qlevels = _close_under_faces(top, solver.canonical)
    qverts = sorted(levels_v[0] for levels_v in qlevels[0])
    qindex = {x: i for i, (_, x) in enumerate(qverts)}

    def vid(v: Vertex) -> int:
        return qindex[solver.to_least(v[1])[0]]

    K, qlifted = _assemble(qlevels, solver.canonical, vid)
    if lift_rule == "least":
        lifts = list(qverts)
    else:
        lifts = [(rk, solver.box_lifts(x)[-1]) for rk, x in qverts]

    edge_elements = []
    for (a, b), seg in zip(K.simplices[1], qlifted[1]):
        ga = group.between_scaled(lifts[a][1], seg[0][1], scale)
        gb = group.between_scaled(lifts[b][1], seg[1][1], scale)
        edge_elements.append(group.compose(group.inverse(ga), gb))

    nf = len(group.point_reps)
    for k in range(dim + 1):
        if K.count(k) * nf != T.count(k):
            raise ComplexBuildError(f"quotient has {K.count(k)} {k}-cells, torus {T.count(k)}, |F| = {nf}")

    model = QuotientModel(
        complex=K,
        dim=dim,
        resolution=r,
        scale=scale,
        group=group,
        lifts=lifts,
        simplex_lifts=qlifted,
        edge_elements=edge_elements,
        lift_rule=lift_rule,
        subdivisions=done,
        torus_cells=T.cells_per_dim(),
    )
    return model


def holonomy_cocycle(m: QuotientModel) -> BitVector:
    """Edge parities of the connecting deck elements: a cocycle representing w₁."""
    K, g, s = m.complex, m.group, m.scale
    bits = 0
    for e, ((a, b), seg, elem) in enumerate(zip(K.simplices[1], m.simplex_lifts[1], m.edge_elements)):
        ga = g.between_scaled(m.lifts[a][1], seg[0][1], s)
        if ga is None:
            raise IntegrityError(f"edge {e}: tail lift is not over vertex {a}")
        head = g.act_scaled(elem, m.lifts[b][1], s)
        if g.act_scaled(ga, head, s) != seg[1][1]:
            raise IntegrityError(f"edge {e}: connecting element does not reach the head lift")
        if g.parity(elem):
            bits |= 1 << e
    w = BitVector(K.count(1), bits)
    if K.dim >= 2:
        d2 = K.boundary_matrix(2)
        if not d2.right_apply(w).is_zero():
            raise IntegrityError("holonomy labels violate the cocycle condition")
    return w


def triangle_consistency(m: QuotientModel) -> bool:
    """Check g(v0v1) * g(v1v2) == g(v0v2) exactly on every 2-simplex."""
    K, g = m.complex, m.group
    if K.dim < 2:
        return True
    for f in K.faces[2]:
        e12, e02, e01 = f
        lhs = g.compose(m.edge_elements[e01], m.edge_elements[e12])
        if lhs != m.edge_elements[e02]:
            return False
    return True


class TranslationGroup:
    """ℤⁿ acting by translations (a flat torus), for control models.

    The double cover is chosen by ``odd_axes``: a translation is odd iff
    the sum of its components along those axes is odd.
    """

    def __init__(self, dim: int, odd_axes: Sequence[int] = ()):
        self.dim = dim
        self.odd_axes = tuple(odd_axes)
        self.periods = (2,) * dim
        self.point_reps = [(0,) * dim]

    def act_scaled(self, g, coords, scale):
        half = scale // 2
        return tuple(u + t * half for u, t in zip(coords, g))

    def between_scaled(self, p, q, scale):
        out = []
        for a, b in zip(p, q):
            t, rem = divmod(b - a, scale)
            if rem:
                return None
            out.append(2 * t)
        return tuple(out)

    def compose(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inverse(self, g):
        return tuple(-a for a in g)

    def parity(self, g) -> int:
        return sum(g[i] // 2 for i in self.odd_axes) % 2


# --- text / JSON export ------------------------------------------------------


def export_text(m: QuotientModel) -> str:
    K = m.complex
    lines = []
    for k, level in enumerate(K.simplices):
        for verts in level:
            lines.append("simplex " + " ".join(str(x) for x in (k, *verts)))
    w = holonomy_cocycle(m)
    for e, (a, b) in enumerate(K.simplices[1] if K.dim >= 1 else []):
        lines.append(f"holonomy {a} {b} {w[e]}")
    return "\n".join(lines) + "\n"


def parse_text(text: str) -> tuple[list[list[tuple[int, ...]]], list[tuple[int, int, int]]]:
    simplices: list[list[tuple[int, ...]]] = []
    holonomy = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "simplex":
            k, verts = int(parts[1]), tuple(int(v) for v in parts[2:])
            if len(verts) != k + 1:
                raise ValueError(f"line {lineno}: {k}-simplex needs {k + 1} vertices")
            while len(simplices) <= k:
                simplices.append([])
            simplices[k].append(verts)
        elif parts[0] == "holonomy" and len(parts) == 4:
            a, b, bit = (int(p) for p in parts[1:])
            holonomy.append((a, b, bit))
        else:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")
    return simplices, holonomy


def summary_json(m: QuotientModel) -> str:
    return json.dumps(m.summary())
