"""Filtered simplicial complexes, their homology and induced maps over F_p.

``diagram_from_filtration`` turns a filtration into a chain Diagram of
homology spaces.  ``persistent_betti_oracle`` counts persistent classes by
the classical column reduction of the full boundary matrix and shares no
code with the induced-map route, so the two can check each other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path

import numpy as np

from .diagram import Diagram, chain_diagram
from .errors import (DuplicateSimplex, FaceClosureError, InputError, InternalCheckFailure,
                     NoSolution, PrimeMismatch, SchemaError)
from .linalg import (PrimeFieldMatrix, hstack, image_basis, is_prime, kernel_basis,
                     rref, solve_preimage)

Simplex = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class FilteredComplex:
    simplices: tuple[tuple[Simplex, int], ...]
    max_level: int
    prime: int = 2

    def __post_init__(self):
        if not is_prime(self.prime):
            raise PrimeMismatch(f"{self.prime} is not prime")
        seen: dict[Simplex, int] = {}
        for verts, level in self.simplices:
            if verts in seen:
                raise DuplicateSimplex(f"simplex {list(verts)} listed twice")
            if level < 0 or level > self.max_level:
                raise SchemaError(f"level {level} of {list(verts)} outside [0, {self.max_level}]")
            seen[verts] = level
        for verts, level in self.simplices:
            if len(verts) < 2:
                continue
            for face in combinations(verts, len(verts) - 1):
                if face not in seen:
                    raise FaceClosureError(f"simplex {list(verts)} is missing its face {list(face)}")
                if seen[face] > level:
                    raise FaceClosureError(
                        f"face {list(face)} appears at level {seen[face]}, after "
                        f"{list(verts)} at level {level}")
        ordered = sorted(self.simplices, key=lambda s: (s[1], len(s[0]), s[0]))
        object.__setattr__(self, "simplices", tuple(ordered))

    @classmethod
    def build(cls, simplices, prime: int = 2, max_level: int | None = None) -> "FilteredComplex":
        items = []
        for verts, level in simplices:
            vs = tuple(sorted(int(v) for v in verts))
            if not vs or len(set(vs)) != len(vs):
                raise SchemaError(f"simplex {list(verts)} must list distinct vertices")
            items.append((vs, int(level)))
        top = max((lv for _, lv in items), default=0)
        return cls(tuple(items), top if max_level is None else max_level, prime)

    @property
    def levels(self) -> range:
        return range(self.max_level + 1)

    def simplices_at(self, level: int, k: int) -> list[Simplex]:
        """k-simplices present at ``level``, ordered by (level, vertices)."""
        if k < 0:
            return []
        return [s for s, lv in sorted(self.simplices, key=lambda x: (x[1], x[0]))
                if lv <= level and len(s) == k + 1]

    @cached_property
    def dimension(self) -> int:
        return max((len(s) - 1 for s, _ in self.simplices), default=-1)


def load_filtration(document: str | bytes | dict | Path) -> FilteredComplex:
    """Parse a filtration from JSON or from ``level v0 v1 ...`` lines."""
    if isinstance(document, Path):
        document = document.read_text()
    if isinstance(document, bytes):
        document = document.decode()
    if isinstance(document, str) and document.lstrip().startswith("{"):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    if isinstance(document, dict):
        return _from_json(document)
    items = []
    for lineno, raw in enumerate(document.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            nums = [int(t) for t in line.split()]
        except ValueError as exc:
            raise SchemaError(f"line {lineno}: expected integers, got {raw.strip()!r}") from exc
        if len(nums) < 2:
            raise SchemaError(f"line {lineno}: need a level and at least one vertex")
        items.append((nums[1:], nums[0]))
    return FilteredComplex.build(items)


def _from_json(doc: dict) -> FilteredComplex:
    prime = doc.get("prime", 2)
    if not isinstance(prime, int):
        raise SchemaError("'prime' must be an integer")
    simplices = doc.get("simplices")
    if not isinstance(simplices, list):
        raise SchemaError("'simplices' must be a list")
    items = []
    for i, s in enumerate(simplices):
        if not isinstance(s, dict) or not isinstance(s.get("level"), int) \
                or not isinstance(s.get("verts"), list):
            raise SchemaError(f"simplices[{i}] needs integer 'level' and list 'verts'")
        items.append((s["verts"], s["level"]))
    return FilteredComplex.build(items, prime, doc.get("max_level"))


def boundary_matrix(fc: FilteredComplex, level: int, k: int) -> PrimeFieldMatrix:
    """∂_k from k-simplices to (k-1)-simplices present at ``level``."""
    p = fc.prime
    cols = fc.simplices_at(level, k)
    rows = fc.simplices_at(level, k - 1)
    row_of = {s: i for i, s in enumerate(rows)}
    out = np.zeros((len(rows), len(cols)), dtype=np.int64)
    if k > 0:
        for j, s in enumerate(cols):
            for t in range(len(s)):
                out[row_of[s[:t] + s[t + 1:]], j] = (-1) ** t
    return PrimeFieldMatrix.reduce(out, p)


@dataclass(frozen=True)
class HomologyBasis:
    cycles: PrimeFieldMatrix          # columns span ker ∂_k
    boundaries: PrimeFieldMatrix      # columns span im ∂_{k+1}
    representatives: PrimeFieldMatrix # cycles chosen as the homology basis
    quotient_map: PrimeFieldMatrix    # chain coordinates -> homology coordinates (on cycles)

    @property
    def dim(self) -> int:
        return self.representatives.cols


def homology_basis(fc: FilteredComplex, level: int, k: int) -> HomologyBasis:
    p = fc.prime
    n_k = len(fc.simplices_at(level, k))
    z = kernel_basis(boundary_matrix(fc, level, k))
    b = image_basis(boundary_matrix(fc, level, k + 1))
    # the cycle columns that stay independent after the boundaries are the representatives
    _, piv = rref(hstack([b, z]))
    reps = PrimeFieldMatrix(z.data[:, [c - b.cols for c in piv if c >= b.cols]], p)
    # invert [B | R | completion] to read off homology coordinates
    br = hstack([b, reps])
    _, piv_full = rref(hstack([br, PrimeFieldMatrix.identity(n_k, p)]))
    extra = [c - br.cols for c in piv_full if c >= br.cols]
    basis = hstack([br, PrimeFieldMatrix(np.eye(n_k, dtype=np.int64)[:, extra], p)])
    inv = _inverse(basis)
    q = PrimeFieldMatrix(inv.data[b.cols:b.cols + reps.cols, :], p)
    return HomologyBasis(z, b, reps, q)


def _inverse(m: PrimeFieldMatrix) -> PrimeFieldMatrix:
    n = m.rows
    r, piv = rref(hstack([m, PrimeFieldMatrix.identity(n, m.prime)]))
    if piv[:n] != list(range(n)):
        raise InternalCheckFailure("basis completion is singular")
    return PrimeFieldMatrix(r[:, n:], m.prime)


def betti(fc: FilteredComplex, level: int, k: int) -> int:
    return homology_basis(fc, level, k).dim


def induced_map(fc: FilteredComplex, level_i: int, level_j: int, k: int) -> PrimeFieldMatrix:
    """H_k(X_i) -> H_k(X_j) induced by inclusion, in the fixed homology bases."""
    if level_i > level_j:
        raise InputError(f"need level_i <= level_j, got {level_i} > {level_j}")
    p = fc.prime
    hi, hj = homology_basis(fc, level_i, k), homology_basis(fc, level_j, k)
    n_j = len(fc.simplices_at(level_j, k))
    # k-simplices at level_i are a prefix of those at level_j
    emb = np.zeros((n_j, hi.dim), dtype=np.int64)
    emb[: hi.representatives.rows] = hi.representatives.data
    target = hstack([hj.boundaries, hj.representatives])
    cols = []
    for c in range(hi.dim):
        try:
            y = solve_preimage(target, emb[:, c])
        except NoSolution as exc:
            raise InternalCheckFailure("included cycle is not a cycle at the later level") from exc
        cols.append(y[hj.boundaries.cols:])
    data = np.stack(cols, axis=1) if cols else np.zeros((hj.dim, 0), dtype=np.int64)
    return PrimeFieldMatrix(data.reshape(hj.dim, hi.dim), p)


def diagram_from_filtration(fc: FilteredComplex, k: int) -> Diagram:
    """Chain diagram H_k(X_0) -> H_k(X_1) -> ... -> H_k(X_N)."""
    dims = [betti(fc, lv, k) for lv in fc.levels]
    maps = [induced_map(fc, lv, lv + 1, k) for lv in fc.levels[:-1]]
    return chain_diagram(maps, dims, fc.prime, labels=[f"H{k}(level {lv})" for lv in fc.levels])


@dataclass(frozen=True)
class Reduction:
    order: tuple[tuple[Simplex, int], ...]
    pairs: dict[int, int]    # birth index -> death index
    positive: frozenset[int]


def reduce_filtration(fc: FilteredComplex) -> Reduction:
    """Standard left-to-right column reduction of the full boundary matrix."""
    p = fc.prime
    order = fc.simplices
    index = {s: i for i, (s, _) in enumerate(order)}
    cols: list[dict[int, int]] = []
    for s, _ in order:
        col = {}
        if len(s) > 1:
            for t in range(len(s)):
                col[index[s[:t] + s[t + 1:]]] = (-1) ** t % p
        cols.append(col)
    low_owner: dict[int, int] = {}
    pairs = {}
    positive = set()
    for j, col in enumerate(cols):
        while col:
            low = max(col)
            if low not in low_owner:
                break
            other = cols[low_owner[low]]
            factor = col[low] * pow(other[low], -1, p) % p
            for r, v in other.items():
                nv = (col.get(r, 0) - factor * v) % p
                if nv:
                    col[r] = nv
                else:
                    col.pop(r, None)
        if col:
            low = max(col)
            low_owner[low] = j
            pairs[low] = j
        else:
            positive.add(j)
    return Reduction(order, pairs, frozenset(positive))


def persistent_betti_oracle(fc: FilteredComplex, i: int, j: int, k: int) -> int:
    """Number of degree-k classes born by level i and still alive at level j."""
    if i > j:
        raise InputError(f"need i <= j, got {i} > {j}")
    red = reduce_filtration(fc)
    count = 0
    for b in red.positive:
        s, level = red.order[b]
        if len(s) != k + 1 or level > i:
            continue
        d = red.pairs.get(b)
        if d is None or red.order[d][1] > j:
            count += 1
    return count


def euler_characteristic(fc: FilteredComplex, level: int) -> tuple[int, int]:
    """(alternating sum of Betti numbers, alternating simplex count)."""
    top = max(fc.dimension, 0)
    by_betti = sum((-1) ** k * betti(fc, level, k) for k in range(top + 1))
    by_count = sum((-1) ** k * len(fc.simplices_at(level, k)) for k in range(top + 1))
    return by_betti, by_count


def circle_then_fill() -> FilteredComplex:
    """Triangle boundary at level 0, filled at level 1."""
    edges = [((0, 1), 0), ((0, 2), 0), ((1, 2), 0)]
    return FilteredComplex.build([((v,), 0) for v in range(3)] + edges + [((0, 1, 2), 1)])


def two_circles_one_fills() -> FilteredComplex:
    """Two triangle boundaries joined at vertex 0; the first is filled at level 2."""
    verts = [((v,), 0) for v in range(5)]
    edges = [((0, 1), 0), ((0, 2), 0), ((1, 2), 0), ((0, 3), 1), ((0, 4), 1), ((3, 4), 1)]
    return FilteredComplex.build(verts + edges + [((0, 1, 2), 2)])


def merging_components() -> FilteredComplex:
    """Two vertices at level 0 joined by an edge at level 1."""
    return FilteredComplex.build([((0,), 0), ((1,), 0), ((0, 1), 1)])
