"""Print the implication values for the grid, chain and zig-zag examples.

Each value comes from the brute-force implication; where a closed form
exists it is printed next to it.
"""

import argparse

from persilat.heyting import eval_formula, heyting, implication, is_valid, law_suite
from persilat.shapes import (X, GridIndex, chain_lattice, grid_id, grid_implies, grid_lattice,
                             implication_filtration, zigzag_diagnostics, zigzag_lattice)


def grid_section(m: int, n: int):
    h = heyting(grid_lattice(m, n))
    bot = h.ids[h.bottom]
    print(f"grid {m}x{n} ({len(h)} elements)")
    pairs = [("X01", "X31"), ("X31", "X01"), ("X02", "X11"), ("X11", "X02"),
             ("X03", bot), ("X30", bot), ("X20", bot), ("X11", bot)]
    for a, b in pairs:
        ga, gb = (GridIndex(int(x[1]), int(x[2])) for x in (a, b))
        closed = grid_id(*grid_implies(m, n, ga, gb), m, n)
        print(f"  {a} => {b} = {implication(h, a, b)}   closed form {closed}")


def zigzag_section(n: int):
    h = heyting(zigzag_lattice(n))
    print(f"zig-zag of length {n} ({len(h)} elements)")
    for i in range(n):
        print(f"  X{i} => X{i + 1} = {implication(h, f'X{i}', f'X{i + 1}')}")
    print(f"  X0 => X{n} = {implication(h, 'X0', f'X{n}')}; X{n} => X0 = {implication(h, f'X{n}', 'X0')}")
    chain = implication_filtration(n, X(0), X(1), h)
    print("  filtration from X0 & X1 up to X0 => X1:", " -> ".join(e.id(n) for e in chain))
    if n >= 3:
        env = {"a": "X0", "b": "X1", "c": "X2", "d": "X3", "p": "P01"}
        for f in ("a -> (c & d)", "p -> d", "(a -> d) -> ((b -> d) -> ((a | b) -> d))"):
            print(f"  {f} = {eval_formula(h, f, env)}")
    for d in zigzag_diagnostics(n, h):
        print(f"  flagged [{d.key}] {d.detail}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--zigzag", type=int, default=3, help="zig-zag length")
    args = ap.parse_args()
    grid_section(3, 3)
    print()
    zigzag_section(args.zigzag)
    print()
    for n in (2, 3, 4):
        print(f"chain {n}: {law_suite(heyting(chain_lattice(n))).summary()}")
    v = is_valid(heyting(chain_lattice(3)), "p | !p")
    print(f"p | !p on chain 3: {'valid' if v else f'invalid at {v.counter_valuation}'}")


if __name__ == "__main__":
    main()
