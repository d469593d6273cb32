"""Brute-force reference implementations used only by the tests.

Nothing here imports the package's algorithms: vector spaces are enumerated
point by point, cuts are found from all subsets, and lattice operations are
read off the order relation with plain loops.
"""

import itertools
import math

import numpy as np


# -- vector spaces by enumeration ------------------------------------------------

def vectors(dim, p):
    return [np.array(v, dtype=np.int64) for v in itertools.product(range(p), repeat=dim)]


def image_size(mat, p):
    mat = np.asarray(mat, dtype=np.int64)
    rows, cols = mat.shape
    return len({tuple((mat @ v) % p) for v in vectors(cols, p)}) if rows else 1


def rank_by_enumeration(mat, p):
    return round(math.log(image_size(mat, p), p))


def kernel_size(mat, p):
    mat = np.asarray(mat, dtype=np.int64)
    return sum(1 for v in vectors(mat.shape[1], p) if not ((mat @ v) % p).any())


def pullback_size(f, g, p):
    f, g = np.asarray(f, dtype=np.int64), np.asarray(g, dtype=np.int64)
    imgs_b = {}
    for b in vectors(g.shape[1], p):
        key = tuple((g @ b) % p)
        imgs_b[key] = imgs_b.get(key, 0) + 1
    return sum(imgs_b.get(tuple((f @ a) % p), 0) for a in vectors(f.shape[1], p))


def span_size(cols, p):
    """Size of the span of the columns of ``cols``."""
    cols = np.asarray(cols, dtype=np.int64)
    return image_size(cols, p)


# -- orders --------------------------------------------------------------------------

def closure_count(leq):
    """Number of Dedekind-MacNeille cuts: distinct sets L(U(A)) over all subsets A."""
    n = leq.shape[0]
    cuts = set()
    for mask in range(1 << n):
        a = [i for i in range(n) if mask >> i & 1]
        upper = [u for u in range(n) if all(leq[x, u] for x in a)]
        lower = frozenset(d for d in range(n) if all(leq[d, u] for u in upper))
        cuts.add(lower)
    return len(cuts)


def glb(leq, a, b):
    n = leq.shape[0]
    lows = [x for x in range(n) if leq[x, a] and leq[x, b]]
    best = [x for x in lows if all(leq[y, x] for y in lows)]
    return best[0] if best else None


def lub(leq, a, b):
    n = leq.shape[0]
    ups = [x for x in range(n) if leq[a, x] and leq[b, x]]
    best = [x for x in ups if all(leq[x, y] for y in ups)]
    return best[0] if best else None


def distributive_by_loops(leq):
    n = leq.shape[0]
    for x, y, z in itertools.product(range(n), repeat=3):
        if glb(leq, x, lub(leq, y, z)) != lub(leq, glb(leq, x, y), glb(leq, x, z)):
            return False
    return True


def implication_by_loops(leq, a, b):
    """Greatest x with x ∧ a <= b, or None when there is no greatest one."""
    n = leq.shape[0]
    ok = [x for x in range(n) if leq[glb(leq, x, a), b]]
    best = [x for x in ok if all(leq[y, x] for y in ok)]
    return best[0] if best else None


def join_irreducible_by_loops(leq):
    n = leq.shape[0]
    bottom = next(x for x in range(n) if all(leq[x, y] for y in range(n)))
    out = set()
    for a in range(n):
        if a == bottom:
            continue
        if all(a in (b, c) for b in range(n) for c in range(n) if lub(leq, b, c) == a):
            out.add(a)
    return out


# -- elimination over F_p with plain lists ----------------------------------------

def _echelon(rows, p):
    """Row-reduce a list of lists mod p; returns (reduced rows, pivot columns)."""
    m = [[x % p for x in r] for r in rows]
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        hit = next((i for i in range(r, len(m)) if m[i][c]), None)
        if hit is None:
            continue
        m[r], m[hit] = m[hit], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                k = m[i][c]
                m[i] = [(x - k * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank_mod_p(mat, p):
    rows = np.asarray(mat, dtype=np.int64).tolist()
    return len(_echelon(rows, p)[1]) if rows and rows[0] else 0


def nullspace_mod_p(mat, p):
    """Columns spanning {x : mat x = 0}, as an (ncols x d) array."""
    mat = np.asarray(mat, dtype=np.int64)
    ncols = mat.shape[1]
    red, pivots = _echelon(mat.tolist(), p) if mat.shape[0] else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(red, pivots):
            v[pc] = -row[f] % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).T.reshape(ncols, len(free))
