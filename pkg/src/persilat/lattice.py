"""Finite lattices: completion of a poset, meet/join tables, order checks.

Elements are addressed by string ids at the public surface and by integer
indices internally.  Orders are stored as boolean ``leq`` matrices with
``leq[a, b]`` meaning ``a <= b``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, InputError, UnknownElement

DEFAULT_ELEMENT_BUDGET = 4096
DEFAULT_SEED = 0


class Provenance(str, Enum):
    ORIGINAL = "original"
    LIMIT = "limit"
    COLIMIT = "colimit"
    CUT = "cut"


@dataclass(frozen=True, eq=False)
class FinitePoset:
    ids: tuple[str, ...]
    leq: np.ndarray

    def __post_init__(self):
        leq = np.array(self.leq, dtype=bool)
        n = len(self.ids)
        if leq.shape != (n, n):
            raise InputError(f"order matrix has shape {leq.shape}, expected {(n, n)}")
        if len(set(self.ids)) != n:
            raise InputError("element ids must be unique")
        check_partial_order(leq)
        leq.flags.writeable = False
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "leq", leq)

    @classmethod
    def from_relations(cls, ids: Sequence[str], pairs: Sequence[tuple[str, str]]) -> "FinitePoset":
        """Reflexive-transitive closure of the given ``(lower, upper)`` pairs."""
        idx = {x: i for i, x in enumerate(ids)}
        leq = np.eye(len(ids), dtype=bool)
        for a, b in pairs:
            if a not in idx or b not in idx:
                raise UnknownElement(f"relation ({a}, {b}) names an unknown element")
            leq[idx[a], idx[b]] = True
        return cls(tuple(ids), transitive_closure(leq))

    def __len__(self):
        return len(self.ids)


def transitive_closure(leq: np.ndarray) -> np.ndarray:
    r = np.array(leq, dtype=bool) | np.eye(len(leq), dtype=bool)
    while True:
        nxt = r | ((r.astype(np.int64) @ r.astype(np.int64)) > 0)
        if np.array_equal(nxt, r):
            return r
        r = nxt


def check_partial_order(leq: np.ndarray):
    n = len(leq)
    if not np.all(np.diag(leq)):
        raise InputError("order is not reflexive")
    if np.any(leq & leq.T & ~np.eye(n, dtype=bool)):
        raise InputError("order is not antisymmetric")
    li = leq.astype(np.int64)
    if np.any(((li @ li) > 0) & ~leq):
        raise InputError("order is not transitive")


def cover_matrix(leq: np.ndarray) -> np.ndarray:
    """``cov[a, b]`` iff b covers a (a < b with nothing strictly between)."""
    strict = leq & ~np.eye(len(leq), dtype=bool)
    si = strict.astype(np.int64)
    return strict & ~((si @ si) > 0)


def _extremum(mask: np.ndarray, leq: np.ndarray, greatest: bool) -> int | None:
    """Index of the greatest (least) element of ``mask`` or None."""
    cand = np.nonzero(mask)[0]
    if cand.size == 0:
        return None
    for c in cand:
        col = leq[cand, c] if greatest else leq[c, cand]
        if col.all():
            return int(c)
    return None


@dataclass(frozen=True, eq=False)
class Lattice:
    ids: tuple[str, ...]
    leq: np.ndarray
    meet_table: np.ndarray
    join_table: np.ndarray
    bottom: int
    top: int
    provenance: tuple[Provenance, ...]
    labels: tuple[str, ...]

    @classmethod
    def from_order(cls, ids: Sequence[str], leq: np.ndarray,
                   provenance: Sequence[Provenance] | None = None,
                   labels: Sequence[str] | None = None) -> "Lattice":
        """Tabulate meets and joins of a finite order; raises if it is not a lattice."""
        ids = tuple(ids)
        leq = np.array(leq, dtype=bool)
        n = len(ids)
        if n == 0:
            raise InputError("a lattice needs at least one element")
        check_partial_order(leq)
        down_size = leq.sum(axis=0)
        up_size = leq.sum(axis=1)
        meet = np.empty((n, n), dtype=np.int64)
        join = np.empty((n, n), dtype=np.int64)
        for a in range(n):
            lower = leq[:, a][:, None] & leq            # lower[x, b]: x <= a and x <= b
            upper = leq[a, :][:, None] & leq.T          # upper[x, b]: a <= x and b <= x
            g = np.where(lower, down_size[:, None], -1).argmax(axis=0)
            l = np.where(upper, up_size[:, None], -1).argmax(axis=0)
            if not lower[g, np.arange(n)].all() or np.any(lower & ~leq[:, g]):
                b = int(np.nonzero(~lower[g, np.arange(n)] | np.any(lower & ~leq[:, g], axis=0))[0][0])
                raise InputError(f"{ids[a]} and {ids[b]} have no greatest lower bound")
            if not upper[l, np.arange(n)].all() or np.any(upper & ~leq.T[:, l]):
                b = int(np.nonzero(~upper[l, np.arange(n)] | np.any(upper & ~leq.T[:, l], axis=0))[0][0])
                raise InputError(f"{ids[a]} and {ids[b]} have no least upper bound")
            meet[a] = g
            join[a] = l
        bottom = _reduce(meet, range(n))
        top = int(_reduce(join, range(n)))
        for arr in (leq, meet, join):
            arr.flags.writeable = False
        prov = tuple(provenance) if provenance is not None else (Provenance.ORIGINAL,) * n
        labs = tuple(labels) if labels is not None else ids
        return cls(ids, leq, meet, join, bottom, top, prov, labs)

    def __len__(self):
        return len(self.ids)

    def index(self, a: str | int) -> int:
        if isinstance(a, (int, np.integer)):
            if not 0 <= a < len(self.ids):
                raise UnknownElement(f"element index {a} out of range")
            return int(a)
        try:
            return self._index[a]
        except KeyError:
            raise UnknownElement(f"unknown element {a!r}") from None

    @property
    def _index(self) -> dict[str, int]:
        cached = self.__dict__.get("_index_cache")
        if cached is None:
            cached = {x: i for i, x in enumerate(self.ids)}
            object.__setattr__(self, "_index_cache", cached)
        return cached

    def le(self, a, b) -> bool:
        return bool(self.leq[self.index(a), self.index(b)])

    def meet_idx(self, a: int, b: int) -> int:
        return int(self.meet_table[a, b])

    def join_idx(self, a: int, b: int) -> int:
        return int(self.join_table[a, b])

    def meet_all(self, elems) -> int:
        return _reduce(self.meet_table, elems, self.top)

    def join_all(self, elems) -> int:
        return _reduce(self.join_table, elems, self.bottom)

    def covers(self) -> np.ndarray:
        return cover_matrix(self.leq)

    def provenance_counts(self) -> dict[str, int]:
        counts = {p.value: 0 for p in Provenance}
        for p in self.provenance:
            counts[p.value] += 1
        return counts

    def relabel(self, mapping: dict[str, str]) -> "Lattice":
        ids = tuple(mapping.get(x, x) for x in self.ids)
        if len(set(ids)) != len(ids):
            raise InputError("relabelling would merge elements")
        labels = tuple(mapping.get(x, lab) for x, lab in zip(self.ids, self.labels))
        return Lattice(ids, self.leq, self.meet_table, self.join_table, self.bottom,
                       self.top, self.provenance, labels)


def _reduce(table: np.ndarray, elems, start: int | None = None) -> int:
    acc = start
    for e in elems:
        acc = int(e) if acc is None else int(table[acc, e])
    if acc is None:
        raise InputError("empty reduction without a neutral element")
    return acc


def meet(l: Lattice, a, b) -> str:
    return l.ids[l.meet_table[l.index(a), l.index(b)]]


def join(l: Lattice, a, b) -> str:
    return l.ids[l.join_table[l.index(a), l.index(b)]]


# --------------------------------------------------------------------------
# completion


def _glb(leq: np.ndarray, a: int, b: int) -> int | None:
    return _extremum(leq[:, a] & leq[:, b], leq, greatest=True)


def _lub(leq: np.ndarray, a: int, b: int) -> int | None:
    return _extremum(leq[a, :] & leq[b, :], leq, greatest=False)


def _close_upward(leq: np.ndarray, up: np.ndarray) -> np.ndarray:
    # add glb(c, d) for every pair already in the up-set, then up-close
    while True:
        grown = up.copy()
        members = np.nonzero(up)[0]
        for c, d in itertools.combinations(members, 2):
            g = _glb(leq, c, d)
            if g is not None and not grown[g]:
                grown |= leq[g, :]
        if np.array_equal(grown, up):
            return up
        up = grown


def _close_downward(leq: np.ndarray, down: np.ndarray) -> np.ndarray:
    while True:
        grown = down.copy()
        members = np.nonzero(down)[0]
        for c, d in itertools.combinations(members, 2):
            l = _lub(leq, c, d)
            if l is not None and not grown[l]:
                grown |= leq[:, l]
        if np.array_equal(grown, down):
            return down
        down = grown


def _next_candidate(leq: np.ndarray) -> tuple[str, int, int] | None:
    n = len(leq)
    cov = cover_matrix(leq)
    ci = cov.astype(np.int64)
    common_cover_above = (ci @ ci.T) > 0     # a and b covered by a common element
    common_cover_below = (ci.T @ ci) > 0     # a and b cover a common element
    incomparable = ~(leq | leq.T)
    for a in range(n):
        for b in range(a + 1, n):
            if incomparable[a, b] and common_cover_above[a, b] and _glb(leq, a, b) is None:
                return ("meet", a, b)
    for a in range(n):
        for b in range(a + 1, n):
            if incomparable[a, b] and common_cover_below[a, b] and _lub(leq, a, b) is None:
                return ("join", a, b)
    return None


def saturate(poset: FinitePoset, element_budget: int = DEFAULT_ELEMENT_BUDGET
             ) -> tuple[np.ndarray, list[Provenance], list[tuple[str, int, int]]]:
    """Adjoin formal pullbacks and pushouts until every cospan of covers has a
    greatest lower bound and every span of covers a least upper bound.

    A formal pullback of ``a, b`` sits below everything above ``a`` or ``b``
    and above every common lower bound; a formal pushout is the dual.  Both
    respect every meet and join that already exists.  Returns the enlarged
    order, the provenance per element and the generating pair per new element.
    """
    leq = np.array(poset.leq, dtype=bool)
    prov = [Provenance.ORIGINAL] * len(leq)
    made: list[tuple[str, int, int]] = []
    while True:
        cand = _next_candidate(leq)
        if cand is None:
            return leq, prov, made
        if len(leq) >= element_budget:
            raise BudgetExceeded(f"saturation exceeded {element_budget} elements")
        kind, a, b = cand
        if kind == "meet":
            down = leq[:, a] & leq[:, b]
            up = _close_upward(leq, leq[a, :] | leq[b, :])
        else:
            up = leq[a, :] & leq[b, :]
            down = _close_downward(leq, leq[:, a] | leq[:, b])
        n = len(leq)
        grown = np.zeros((n + 1, n + 1), dtype=bool)
        grown[:n, :n] = leq
        grown[:n, n] = down
        grown[n, :n] = up
        grown[n, n] = True
        leq = grown
        prov.append(Provenance.LIMIT if kind == "meet" else Provenance.COLIMIT)
        made.append(cand)


def cut_extents(leq: np.ndarray, element_budget: int = DEFAULT_ELEMENT_BUDGET) -> list[int]:
    """All Dedekind-MacNeille extents (lower sets A with A = L(U(A))) as bitmasks.

    Extents are exactly the intersections of principal ideals, the empty
    intersection being the whole set.
    """
    n = len(leq)
    full = (1 << n) - 1
    ideals = [sum(1 << x for x in np.nonzero(leq[:, u])[0]) for u in range(n)]
    family = {full}
    for ideal in ideals:
        fresh = {e & ideal for e in family} - family
        family |= fresh
        if len(family) > element_budget:
            raise BudgetExceeded(f"completion exceeded {element_budget} cuts")
    return sorted(family, key=lambda e: (bin(e).count("1"), e))


def _element_names(ids: Sequence[str], leq: np.ndarray, prov: Sequence[Provenance],
                   n_orig: int) -> list[str]:
    names = list(ids)
    taken = set(ids)
    orig = np.arange(n_orig)
    for x in range(n_orig, len(prov)):
        if prov[x] is Provenance.LIMIT:
            above = orig[leq[x, :n_orig]]
            keep = [o for o in above if not any(leq[p, o] and p != o for p in above)]
            base = "P{" + ",".join(ids[o] for o in keep) + "}"
        else:
            below = orig[leq[:n_orig, x]]
            keep = [o for o in below if not any(leq[o, p] and p != o for p in below)]
            base = "Q{" + ",".join(ids[o] for o in keep) + "}"
        name, k = base, 2
        while name in taken:
            name, k = f"{base}#{k}", k + 1
        taken.add(name)
        names.append(name)
    return names


def dm_completion(poset: FinitePoset, *, saturate_limits: bool = True,
                  element_budget: int = DEFAULT_ELEMENT_BUDGET) -> Lattice:
    """Complete a finite poset to a lattice.

    With ``saturate_limits`` the poset is first enlarged by formal pullbacks
    and pushouts (see :func:`saturate`), which is what a diagram of vector
    spaces produces; the Dedekind-MacNeille cut completion then fills in
    whatever is still missing, including a bottom and top.  With
    ``saturate_limits=False`` this is the plain Dedekind-MacNeille completion.
    """
    if len(poset) == 0:
        raise InputError("cannot complete an empty poset")
    n_orig = len(poset)
    if saturate_limits:
        leq, prov, _ = saturate(poset, element_budget)
    else:
        leq, prov = np.array(poset.leq, dtype=bool), [Provenance.ORIGINAL] * n_orig
    names = _element_names(poset.ids, leq, prov, n_orig)
    n = len(leq)
    extents = cut_extents(leq, element_budget)
    principal = {sum(1 << x for x in np.nonzero(leq[:, u])[0]): u for u in range(n)}
    m = len(extents)
    ext_leq = np.array([[(e & f) == e for f in extents] for e in extents], dtype=bool)
    ids, provs = [], []
    taken = set(names)
    orig_bits = (1 << n_orig) - 1
    for e in extents:
        u = principal.get(e)
        if u is not None:
            ids.append(names[u])
            provs.append(prov[u])
            continue
        provs.append(Provenance.CUT)
        if e == 0:
            name = "bot"
        elif e == (1 << n) - 1:
            name = "top"
        else:
            members = [x for x in range(n_orig) if (e & orig_bits) >> x & 1]
            maximal = [x for x in members if not any(leq[x, y] and x != y for y in members)]
            name = "C{" + ",".join(names[x] for x in maximal) + "}"
        base, k = name, 2
        while name in taken:
            name, k = f"{base}#{k}", k + 1
        taken.add(name)
        ids.append(name)
    return Lattice.from_order(ids, ext_leq, provs)


def originals(l: Lattice) -> list[int]:
    return [i for i, p in enumerate(l.provenance) if p is Provenance.ORIGINAL]


# --------------------------------------------------------------------------
# order-theoretic checks


def _all_triples(l: Lattice, chunk: int = 64):
    n = len(l)
    for start in range(0, n, chunk):
        xs = np.arange(start, min(n, start + chunk))
        yield xs[:, None, None], np.arange(n)[None, :, None], np.arange(n)[None, None, :]


def is_distributive(l: Lattice) -> tuple[bool, tuple[str, str, str] | None]:
    """Check x∧(y∨z) = (x∧y)∨(x∧z) on all triples; also cross-check the
    equivalent forms x∨(y∧z) = (x∨y)∧(x∨z) and the median identity."""
    M, J = l.meet_table, l.join_table
    verdicts = []
    witness = None
    for form in ("4a", "4b", "4c"):
        ok = True
        for x, y, z in _all_triples(l):
            if form == "4a":
                lhs, rhs = M[x, J[y, z]], J[M[x, y], M[x, z]]
            elif form == "4b":
                lhs, rhs = J[x, M[y, z]], M[J[x, y], J[x, z]]
            else:
                lhs = M[M[J[x, y], J[x, z]], J[y, z]]
                rhs = J[J[M[x, y], M[x, z]], M[y, z]]
            bad = np.argwhere(lhs != rhs)
            if bad.size:
                ok = False
                if form == "4a" and witness is None:
                    i, j, k = bad[0]
                    witness = (l.ids[int(x.ravel()[i])], l.ids[int(j)], l.ids[int(k)])
                break
        verdicts.append(ok)
    if len(set(verdicts)) != 1:
        from .errors import InternalCheckFailure
        raise InternalCheckFailure(f"distributivity forms disagree: {verdicts}")
    return verdicts[0], witness


def _subset_joins(l: Lattice, elems: np.ndarray, mapped: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # joins of all subsets of ``elems`` (bitmask order) and of their images
    k = len(elems)
    J = l.join_table
    plain = np.empty(1 << k, dtype=np.int64)
    image = np.empty((len(mapped), 1 << k), dtype=np.int64)
    plain[0] = l.bottom
    image[:, 0] = l.bottom
    for bit in range(k):
        lo, hi = 1 << bit, 1 << (bit + 1)
        plain[lo:hi] = J[plain[:lo], elems[bit]]
        image[:, lo:hi] = J[image[:, :lo], mapped[:, bit][:, None]]
    return plain, image


def infinite_distributivity_check(l: Lattice, subset_budget: int = 16,
                                  seed: int = DEFAULT_SEED, samples: int = 1000) -> bool:
    """x ∧ ⋁S = ⋁{x ∧ s : s ∈ S} for every x and every subset S.

    Exhaustive when ``len(l) <= subset_budget``; otherwise all subsets of size
    at most three (two above 64 elements) plus ``samples`` random larger
    subsets drawn with ``seed``.
    """
    n = len(l)
    M, J = l.meet_table, l.join_table
    xs = np.arange(n)
    if n <= subset_budget:
        elems = np.arange(n)
        mapped = M[xs[:, None], elems[None, :]]
        plain, image = _subset_joins(l, elems, mapped)
        return bool(np.array_equal(M[xs[:, None], plain[None, :]], image))
    for size in range(0, 4 if n <= 64 else 3):
        for S in itertools.combinations(range(n), size):
            js = l.join_all(S)
            rhs = np.full(n, l.bottom)
            for s in S:
                rhs = J[rhs, M[xs, s]]
            if not np.array_equal(M[xs, js], rhs):
                return False
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        size = int(rng.integers(4, n + 1))
        S = rng.choice(n, size=size, replace=False)
        js = l.join_all(S)
        rhs = np.full(n, l.bottom)
        for s in S:
            rhs = J[rhs, M[xs, s]]
        if not np.array_equal(M[xs, js], rhs):
            return False
    return True


def join_irreducibles(l: Lattice) -> set[str]:
    """Elements other than ⊥ that are not the join of two strictly smaller ones."""
    cov = l.covers()
    # in a finite lattice: join-irreducible iff exactly one lower cover
    return {l.ids[a] for a in range(len(l)) if a != l.bottom and cov[:, a].sum() == 1}


def join_irreducibles_bruteforce(l: Lattice) -> set[str]:
    n = len(l)
    out = set()
    for a in range(n):
        if a == l.bottom:
            continue
        if all(a in (b, c) for b in range(n) for c in range(n) if l.join_table[b, c] == a):
            out.add(l.ids[a])
    return out


def hasse_dot(l: Lattice, name: str = "lattice") -> str:
    """Covering relations as a DOT digraph, lines ordered by element id."""
    cov = l.covers()
    order = sorted(range(len(l)), key=lambda i: l.ids[i])
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i in order:
        lines.append(f'  "{l.ids[i]}" [label="{l.labels[i]}", provenance="{l.provenance[i].value}"];')
    edges = sorted((l.ids[a], l.ids[b]) for a, b in zip(*np.nonzero(cov)))
    for a, b in edges:
        lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def chain_poset(n: int, prefix: str = "X") -> FinitePoset:
    ids = [f"{prefix}{i}" for i in range(n)]
    idx = np.arange(n)
    return FinitePoset(tuple(ids), idx[:, None] <= idx[None, :])


def m3_lattice() -> Lattice:
    """The diamond M3: ⊥, three pairwise incomparable atoms, ⊤."""
    ids = ["bot", "a", "b", "c", "top"]
    return Lattice.from_order(ids, FinitePoset.from_relations(
        ids, [("bot", x) for x in "abc"] + [(x, "top") for x in "abc"]).leq)


def order_isomorphism(l1: Lattice, l2: Lattice, fixed: dict[str, str] | None = None
                      ) -> dict[str, str] | None:
    """An order isomorphism l1 -> l2 (as id mapping) extending ``fixed``, or None."""
    import networkx as nx
    from networkx.algorithms import isomorphism

    def graph(l: Lattice, pins: dict[str, str]):
        g = nx.DiGraph()
        cov = l.covers()
        for i, x in enumerate(l.ids):
            g.add_node(x, pin=pins.get(x))
        g.add_edges_from((l.ids[a], l.ids[b]) for a, b in zip(*np.nonzero(cov)))
        return g

    fixed = fixed or {}
    if len(l1) != len(l2):
        return None
    g1 = graph(l1, {a: a for a in fixed})
    g2 = graph(l2, {b: a for a, b in fixed.items()})
    gm = isomorphism.DiGraphMatcher(g1, g2, node_match=lambda u, v: u["pin"] == v["pin"])
    for mapping in gm.isomorphisms_iter():
        return dict(mapping)
    return None
