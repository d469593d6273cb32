"""Complete generic zig-zag diagrams and compare them with the interval lattice."""

import argparse
import time

from persilat import diagram as dg
from persilat.lattice import Provenance, hasse_dot, order_isomorphism
from persilat.shapes import ZigzagModule, zigzag_diagram_relabel, zigzag_lattice


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-length", type=int, default=5)
    ap.add_argument("--dim", type=int, default=1, help="dimension of every space")
    ap.add_argument("--prime", type=int, default=2)
    ap.add_argument("--dot", type=int, metavar="N", help="print the Hasse diagram for length N")
    args = ap.parse_args()

    print(f"{'n':>2} {'elements':>8} {'orig':>5} {'limit':>5} {'colim':>5} {'cut':>4} "
          f"{'(n+1)^2':>8} {'iso':>4} {'secs':>6}")
    for n in range(1, args.max_length + 1):
        t = time.perf_counter()
        completed = dg.complete(ZigzagModule.generic(n, args.dim, args.prime).to_diagram())
        pins = {x: x for x, p in zip(completed.ids, completed.provenance)
                if p is Provenance.ORIGINAL}
        iso = order_isomorphism(completed, zigzag_lattice(n), pins)
        c = completed.provenance_counts()
        print(f"{n:>2} {len(completed):>8} {c['original']:>5} {c['limit']:>5} {c['colimit']:>5} "
              f"{c['cut']:>4} {(n + 1) ** 2:>8} {'yes' if iso else 'no':>4} "
              f"{time.perf_counter() - t:>6.2f}")

    if args.dot:
        completed = dg.complete(ZigzagModule.generic(args.dot).to_diagram())
        print(hasse_dot(completed.relabel(zigzag_diagram_relabel(completed, args.dot)),
                        f"zigzag{args.dot}"))


if __name__ == "__main__":
    main()
