"""Hypothesis strategies and the catalogue of canonical lattices."""

import numpy as np
from hypothesis import strategies as st

from persilat.linalg import PrimeFieldMatrix
from persilat.shapes import chain_lattice, grid_lattice, zigzag_lattice

primes = st.sampled_from([2, 3])


@st.composite
def matrices(draw, prime=None, max_dim=5, rows=None, cols=None):
    p = draw(primes) if prime is None else prime
    r = draw(st.integers(0, max_dim)) if rows is None else rows
    c = draw(st.integers(0, max_dim)) if cols is None else cols
    data = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return PrimeFieldMatrix(np.array(data, dtype=np.int64).reshape(r, c), p)


def random_matrix(rng, rows, cols, p):
    return PrimeFieldMatrix(rng.integers(0, p, size=(rows, cols)), p)


def shape_lattices():
    """Every canonical lattice the suites exercise, keyed by a readable name."""
    out = {f"chain{n}": chain_lattice(n) for n in range(1, 9)}
    out.update({f"grid{m}x{n}": grid_lattice(m, n) for m in range(1, 5) for n in range(1, 5)})
    out.update({f"zigzag{n}": zigzag_lattice(n) for n in range(1, 6)})
    return out


SHAPES = shape_lattices()
