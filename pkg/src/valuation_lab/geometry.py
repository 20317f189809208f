"""Exact convex polytope kernel.

Polytopes are stored by their vertices in lexicographic order together with an
irredundant list of facet halfspaces. Both directions of the V/H conversion go
through one double description routine operating on primitive integer rows, so
no rational ever has to be normalised inside the inner loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from . import linalg as la
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    EmptyOrDegenerateIntersection,
    InvalidSlab,
    NonConvexUnion,
    OriginNotInterior,
    SingularMap,
)
from .linalg import LinearMap, Vector, mpq

__all__ = [
    "Halfspace",
    "Polytope",
    "Simplex",
    "convex_hull",
    "facet_enumeration",
    "contains_origin_interior",
    "polar",
    "apply_linear_map",
    "intersect",
    "union_if_convex",
    "triangulate_fan",
    "split_by_slab",
    "polytope_equal",
    "vertices_from_halfspaces",
    "hyperplane_section",
    "cube",
    "box",
    "cross_polytope",
    "scale",
]


# ---------------------------------------------------------------------------
# double description
# ---------------------------------------------------------------------------

def extreme_rays(rows: Sequence[Sequence[int]], d: int) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone ``{y in Z^d : row . y >= 0 for all rows}``.

    Incremental double description with the combinatorial adjacency test.
    Rays are returned as primitive integer vectors. Returns an empty list when
    the cone is ``{0}``. Raises DegenerateInput if the rows do not have rank d
    (the cone would contain a line).
    """
    rows = [tuple(r) for r in rows]
    basis: list[int] = []
    for i, r in enumerate(rows):
        if la.rank([rows[j] for j in basis] + [r]) > len(basis):
            basis.append(i)
            if len(basis) == d:
                break
    if len(basis) < d:
        raise DegenerateInput("constraint system is not pointed")

    inv = la.inverse(la.matrix(rows[i] for i in basis))
    rays: list[tuple[int, ...]] = []
    zero: list[int] = []
    full = 0
    for i in basis:
        full |= 1 << i
    for j in range(d):
        col = [inv[k][j] for k in range(d)]
        rays.append(la.integer_row(col))
        zero.append(full & ~(1 << basis[j]))

    processed = full
    for i, h in enumerate(rows):
        if (processed >> i) & 1:
            continue
        bit = 1 << i
        vals = [sum(a * b for a, b in zip(h, r)) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        if not neg:
            for k, v in enumerate(vals):
                if v == 0:
                    zero[k] |= bit
            processed |= bit
            continue
        new_rays: list[tuple[int, ...]] = []
        new_zero: list[int] = []
        for k, v in enumerate(vals):
            if v > 0:
                new_rays.append(rays[k])
                new_zero.append(zero[k])
            elif v == 0:
                new_rays.append(rays[k])
                new_zero.append(zero[k] | bit)
        for p in pos:
            for q in neg:
                common = zero[p] & zero[q]
                if common.bit_count() < d - 2:
                    continue
                if any(
                    k != p and k != q and (zero[k] & common) == common
                    for k in range(len(rays))
                ):
                    continue
                sp, sq = vals[p], vals[q]
                combo = la.primitive([sp * b - sq * a for a, b in zip(rays[p], rays[q])])
                new_rays.append(combo)
                new_zero.append(common | bit)
        rays, zero = new_rays, new_zero
        processed |= bit
        if not rays:
            return []
    return rays


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Halfspace:
    """``{x : normal . x <= offset}``."""

    normal: Vector
    offset: mpq

    def __post_init__(self):
        if all(a == 0 for a in self.normal):
            raise DegenerateInput("halfspace normal must be nonzero")

    def slack(self, x: Sequence) -> mpq:
        return self.offset - la.dot(self.normal, x)

    def contains(self, x: Sequence) -> bool:
        return self.slack(x) >= 0


def _normalized(normal: Sequence, offset) -> Halfspace:
    normal = la.vector(normal)
    offset = la.rational(offset)
    if offset != 0:
        s = abs(offset)
    else:
        s = abs(next(a for a in normal if a != 0))
    return Halfspace(tuple(a / s for a in normal), offset / s)


@dataclass(frozen=True)
class Simplex:
    vertices: tuple

    def __post_init__(self):
        n = len(self.vertices) - 1
        if any(len(v) != n for v in self.vertices):
            raise DimensionMismatch("a simplex in R^n needs n+1 vertices of length n")
        if self.signed_det() == 0:
            raise DegenerateInput("simplex vertices are affinely dependent")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def signed_det(self) -> mpq:
        v0 = self.vertices[0]
        return la.det([la.vsub(v, v0) for v in self.vertices[1:]])

    def volume(self) -> mpq:
        return abs(self.signed_det()) / math.factorial(self.dim)


class Polytope:
    """Full-dimensional convex polytope in exact V- and H-representation.

    Build instances with :func:`convex_hull` or the helpers below; the
    constructor trusts its arguments.
    """

    __slots__ = ("dim", "vertices", "facets", "_incidence", "_faces", "_affdim", "_boundary", "_polar")

    def __init__(self, dim: int, vertices: tuple, facets: tuple):
        self.dim = dim
        self.vertices = vertices
        self.facets = facets
        self._incidence = None
        self._faces = {}
        self._affdim = {}
        self._boundary = None
        self._polar = None

    def __eq__(self, other):
        return isinstance(other, Polytope) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        vs = ", ".join("(" + ", ".join(la.fmt(x) for x in v) + ")" for v in self.vertices)
        return f"Polytope(dim={self.dim}, vertices=[{vs}])"

    @property
    def incidence(self) -> tuple[int, ...]:
        """Bitmask of tight vertex indices, one per facet."""
        if self._incidence is None:
            masks = []
            for h in self.facets:
                m = 0
                for i, v in enumerate(self.vertices):
                    if h.slack(v) == 0:
                        m |= 1 << i
                masks.append(m)
            self._incidence = tuple(masks)
        return self._incidence

    def _affine_dim(self, mask: int) -> int:
        got = self._affdim.get(mask)
        if got is None:
            idx = [i for i in range(len(self.vertices)) if (mask >> i) & 1]
            v0 = self.vertices[idx[0]]
            got = la.rank([la.vsub(self.vertices[i], v0) for i in idx[1:]])
            self._affdim[mask] = got
        return got

    def _triangulate_face(self, mask: int, k: int) -> list[tuple[int, ...]]:
        # Pull from the lexicographically smallest vertex of the face.
        key = (mask, k)
        got = self._faces.get(key)
        if got is not None:
            return got
        apex = (mask & -mask).bit_length() - 1
        if k == 0:
            out = [(apex,)]
        else:
            subfaces = set()
            for f in self.incidence:
                s = mask & f
                if s == mask or (s >> apex) & 1 or not s:
                    continue
                if self._affine_dim(s) == k - 1:
                    subfaces.add(s)
            out = [(apex,) + t for s in sorted(subfaces) for t in self._triangulate_face(s, k - 1)]
        self._faces[key] = out
        return out

    def boundary_triangulation(self) -> list[tuple[int, ...]]:
        """(n-1)-simplices, as vertex index tuples, triangulating every facet."""
        if self._boundary is None:
            cells = []
            for f in self.incidence:
                cells.extend(self._triangulate_face(f, self.dim - 1))
            self._boundary = cells
        return self._boundary

    def cells(self) -> list[tuple]:
        """Full-dimensional simplices (as vertex tuples) triangulating the polytope.

        Coned from the origin when it is interior, otherwise pulled from the
        first vertex.
        """
        if contains_origin_interior(self):
            origin = la.zeros(self.dim)
            return [(origin,) + tuple(self.vertices[i] for i in c) for c in self.boundary_triangulation()]
        out = []
        for c in self.boundary_triangulation():
            if 0 in c:
                continue
            out.append((self.vertices[0],) + tuple(self.vertices[i] for i in c))
        return out


# ---------------------------------------------------------------------------
# conversions
# ---------------------------------------------------------------------------

def _dedupe(points: Iterable[Sequence]) -> list[Vector]:
    pts = sorted({la.vector(p) for p in points})
    if not pts:
        raise DegenerateInput("no points")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise DimensionMismatch("points of mixed dimension")
    return pts


def _is_full_dimensional(points: Sequence[Vector]) -> bool:
    n = len(points[0])
    v0 = points[0]
    return la.rank([la.vsub(p, v0) for p in points[1:]]) == n


def _facets_of_points(points: Sequence[Vector]) -> list[Halfspace]:
    n = len(points[0])
    rows = [la.integer_row((mpq(1),) + tuple(-x for x in p)) for p in points]
    out = []
    for r in extreme_rays(rows, n + 1):
        out.append(_normalized(r[1:], r[0]))
    return sorted(out, key=lambda h: (h.normal, h.offset))


def _extreme_points(points: Sequence[Vector], facets: Sequence[Halfspace]) -> tuple:
    n = len(points[0])
    out = []
    for p in points:
        tight = [h.normal for h in facets if h.slack(p) == 0]
        if len(tight) >= n and la.rank(tight) == n:
            out.append(p)
    return tuple(out)


def convex_hull(points: Iterable[Sequence]) -> Polytope:
    """Canonical polytope spanned by ``points`` (interior and duplicate points dropped)."""
    pts = _dedupe(points)
    n = len(pts[0])
    if len(pts) < n + 1 or not _is_full_dimensional(pts):
        raise DegenerateInput("points do not span a full-dimensional polytope")
    facets = _facets_of_points(pts)
    return Polytope(n, _extreme_points(pts, facets), tuple(facets))


def vertices_from_halfspaces(halfspaces: Sequence[Halfspace], n: int) -> list[Vector]:
    """Vertices of the bounded polyhedron cut out by ``halfspaces``.

    Returns an empty list if it is empty. Raises DegenerateInput if unbounded.
    """
    rows = [la.integer_row((h.offset,) + tuple(-a for a in h.normal)) for h in halfspaces]
    rows.append((1,) + (0,) * n)
    pts = set()
    for r in extreme_rays(rows, n + 1):
        t = r[0]
        if t == 0:
            raise DegenerateInput("halfspaces describe an unbounded region")
        pts.add(tuple(mpq(x, t) for x in r[1:]))
    return sorted(pts)


def _from_halfspaces(halfspaces: Sequence[Halfspace], n: int) -> Polytope | None:
    pts = vertices_from_halfspaces(halfspaces, n)
    if len(pts) < n + 1 or not _is_full_dimensional(pts):
        return None
    facets = set()
    for h in halfspaces:
        mask = [p for p in pts if h.slack(p) == 0]
        if len(mask) >= n:
            v0 = mask[0]
            if la.rank([la.vsub(p, v0) for p in mask[1:]]) == n - 1:
                facets.add(_normalized(h.normal, h.offset))
    facets = sorted(facets, key=lambda h: (h.normal, h.offset))
    return Polytope(n, tuple(pts), tuple(facets))


def facet_enumeration(P: Polytope) -> list[Halfspace]:
    return list(P.facets)


def contains_origin_interior(P: Polytope) -> bool:
    return all(h.offset > 0 for h in P.facets)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def polar(P: Polytope) -> Polytope:
    """``{y : v . y <= 1 for every vertex v}``.

    The polar's vertices are the facet normals scaled to offset 1 and its
    facets are the vertices of ``P``, so no hull computation is needed.
    """
    if P._polar is not None:
        return P._polar
    if not contains_origin_interior(P):
        raise OriginNotInterior("polar needs the origin in the interior")
    verts = tuple(sorted(tuple(a / h.offset for a in h.normal) for h in P.facets))
    facets = tuple(sorted((Halfspace(v, mpq(1)) for v in P.vertices), key=lambda h: h.normal))
    Q = Polytope(P.dim, verts, facets)
    Q._polar = P
    P._polar = Q
    return Q


def apply_linear_map(phi: LinearMap, P: Polytope) -> Polytope:
    if phi.n != P.dim:
        raise DimensionMismatch(f"{phi.n}x{phi.n} map applied to a polytope in R^{P.dim}")
    if phi.det == 0:
        raise SingularMap("linear image under a singular map is not full-dimensional")
    verts = tuple(sorted(phi(v) for v in P.vertices))
    inv_t = phi.transpose_inverse()
    facets = sorted((_normalized(inv_t(h.normal), h.offset) for h in P.facets), key=lambda h: (h.normal, h.offset))
    return Polytope(P.dim, verts, tuple(facets))


def scale(r, P: Polytope) -> Polytope:
    r = la.rational(r)
    return apply_linear_map(LinearMap.diagonal([r] * P.dim), P)


def intersect(P: Polytope, Q: Polytope) -> Polytope:
    if P.dim != Q.dim:
        raise DimensionMismatch("intersection of polytopes of different dimension")
    if P == Q:
        return P
    R = _from_halfspaces(P.facets + Q.facets, P.dim)
    if R is None:
        raise EmptyOrDegenerateIntersection("intersection has empty interior")
    return R


def _volume(P: Polytope) -> mpq:
    # Local copy of the simplex volume sum so the kernel does not import functionals.
    n = P.dim
    total = mpq(0)
    for cell in P.cells():
        v0 = cell[0]
        total += abs(la.det([la.vsub(v, v0) for v in cell[1:]]))
    return total / math.factorial(n)


def union_if_convex(P: Polytope, Q: Polytope) -> Polytope:
    """``P u Q`` when it is convex, decided by the exact volume identity."""
    if P.dim != Q.dim:
        raise DimensionMismatch("union of polytopes of different dimension")
    if P == Q:
        return P
    H = convex_hull(P.vertices + Q.vertices)
    try:
        common = _volume(intersect(P, Q))
    except EmptyOrDegenerateIntersection:
        common = mpq(0)
    if _volume(H) != _volume(P) + _volume(Q) - common:
        raise NonConvexUnion("the union of the two polytopes is not convex")
    return H


def triangulate_fan(P: Polytope) -> list[Simplex]:
    if not contains_origin_interior(P):
        raise OriginNotInterior("fan triangulation needs the origin in the interior")
    return [Simplex(c) for c in P.cells()]


def split_by_slab(P: Polytope, direction: Sequence, lo, hi) -> tuple[Polytope, Polytope]:
    """``(P n {d.x <= hi}, P n {d.x >= lo})`` with all four bodies origin-interior."""
    d = la.vector(direction)
    lo, hi = la.rational(lo), la.rational(hi)
    if len(d) != P.dim:
        raise DimensionMismatch("slab direction has the wrong length")
    if all(a == 0 for a in d):
        raise InvalidSlab("slab direction must be nonzero")
    if not lo < 0 < hi:
        raise InvalidSlab("need lo < 0 < hi")
    values = [la.dot(d, v) for v in P.vertices]
    if not min(values) < lo or not hi < max(values):
        raise InvalidSlab("cut plane misses the interior of the polytope")
    if not contains_origin_interior(P):
        raise InvalidSlab("polytope does not contain the origin in its interior")
    K = intersect(P, _single(Halfspace(d, hi)))
    L = intersect(P, _single(Halfspace(la.vscale(-1, d), -lo)))
    inter = intersect(K, L)
    for body in (K, L, inter):
        if not contains_origin_interior(body):
            raise InvalidSlab("a piece of the split lost the origin from its interior")
    return K, L


def _single(h: Halfspace) -> Polytope:
    # A polytope-shaped carrier for one extra constraint; only facets are read by intersect.
    return Polytope(len(h.normal), (), (h,))


def polytope_equal(P: Polytope, Q: Polytope) -> bool:
    return P.dim == Q.dim and P.vertices == Q.vertices


def hyperplane_section(P: Polytope) -> Polytope | None:
    """``P n {x_n = 0}`` as a polytope in R^{n-1}, or None if not (n-1)-dimensional."""
    n = P.dim
    if n < 2:
        raise DimensionMismatch("section needs n >= 2")
    hs = []
    for h in P.facets:
        a = h.normal[:-1]
        if all(x == 0 for x in a):
            if h.offset < 0:
                return None
            continue
        hs.append(Halfspace(a, h.offset))
    try:
        return _from_halfspaces(hs, n - 1)
    except DegenerateInput:
        return None


# ---------------------------------------------------------------------------
# standard bodies
# ---------------------------------------------------------------------------

def box(lows: Sequence, highs: Sequence) -> Polytope:
    lows, highs = la.vector(lows), la.vector(highs)
    if len(lows) != len(highs) or any(a >= b for a, b in zip(lows, highs)):
        raise DegenerateInput("box needs lows < highs componentwise")
    n = len(lows)
    verts = [tuple(highs[i] if (m >> i) & 1 else lows[i] for i in range(n)) for m in range(2 ** n)]
    return convex_hull(verts)


def cube(n: int, r=1) -> Polytope:
    r = la.rational(r)
    return box([-r] * n, [r] * n)


def cross_polytope(n: int, r=1) -> Polytope:
    r = la.rational(r)
    verts = []
    for i in range(n):
        for s in (r, -r):
            verts.append(tuple(s if j == i else mpq(0) for j in range(n)))
    return convex_hull(verts)
