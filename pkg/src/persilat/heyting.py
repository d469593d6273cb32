"""Heyting implication, pseudo-complement and the internal propositional logic.

Implication on a finite distributive lattice is the join of every ``x`` with
``x ∧ a <= b``.  :class:`HeytingAlgebra` tabulates it once; calling
:func:`implication` with a bare :class:`~persilat.lattice.Lattice` instead
runs the full element scan, which serves as the oracle for the tables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .errors import (FormulaSyntaxError, InternalCheckFailure, NonDistributiveLattice,
                     UnassignedVariable, VarBudgetExceeded)
from .lattice import Lattice, is_distributive


# --------------------------------------------------------------------------
# algebra


def _implication_scan(l: Lattice, a: int, b: int) -> int:
    ok = l.leq[l.meet_table[:, a], b]
    return l.join_all(np.nonzero(ok)[0])


@dataclass(frozen=True, eq=False)
class HeytingAlgebra:
    lattice: Lattice
    implication_table: np.ndarray
    negation_table: np.ndarray

    @classmethod
    def from_lattice(cls, l: Lattice) -> "HeytingAlgebra":
        ok, witness = is_distributive(l)
        if not ok:
            raise NonDistributiveLattice(
                f"lattice is not distributive; witness (x, y, z) = {witness}", witness)
        n = len(l)
        # ok[x, a, b] = (x ∧ a <= b); implication is the join over admissible x
        admissible = l.leq[l.meet_table[:, :, None], np.arange(n)[None, None, :]]
        # the greatest admissible x: largest down-set, checked to dominate the rest
        down_size = l.leq.sum(axis=0)
        imp = np.where(admissible, down_size[:, None, None], -1).argmax(axis=0)
        if np.any(admissible & ~l.leq[:, imp]):
            raise InternalCheckFailure("admissible set has no greatest element")
        neg = imp[:, l.bottom].copy()
        imp.flags.writeable = False
        neg.flags.writeable = False
        return cls(l, imp, neg)

    def __len__(self):
        return len(self.lattice)

    @property
    def ids(self):
        return self.lattice.ids

    @property
    def top(self) -> int:
        return self.lattice.top

    @property
    def bottom(self) -> int:
        return self.lattice.bottom

    def imp(self, a: int, b: int) -> int:
        return int(self.implication_table[a, b])

    def neg(self, a: int) -> int:
        return int(self.negation_table[a])


def heyting(l: Lattice) -> HeytingAlgebra:
    return HeytingAlgebra.from_lattice(l)


def implication(h: HeytingAlgebra | Lattice, a, b) -> str:
    """``a ⇒ b``: table lookup on an algebra, full scan on a bare lattice.

    A bare lattice must be distributive; otherwise :class:`NonDistributiveLattice`.
    """
    if isinstance(h, HeytingAlgebra):
        l = h.lattice
        return l.ids[h.implication_table[l.index(a), l.index(b)]]
    ok, witness = is_distributive(h)
    if not ok:
        raise NonDistributiveLattice("implication refused on a non-distributive lattice", witness)
    return h.ids[_implication_scan(h, h.index(a), h.index(b))]


def implication_diagnostic(l: Lattice, a, b) -> tuple[str, bool]:
    """``⋁{x : x∧a <= b}`` on any finite lattice, with a flag saying whether the
    adjunction actually holds for this pair (False marks a non-Heyting value)."""
    ai, bi = l.index(a), l.index(b)
    c = _implication_scan(l, ai, bi)
    adj = np.array_equal(l.leq[l.meet_table[:, ai], bi], l.leq[:, c])
    return l.ids[c], bool(adj)


def pseudo_complement(h: HeytingAlgebra | Lattice, a) -> str:
    l = h.lattice if isinstance(h, HeytingAlgebra) else h
    return implication(h, a, l.ids[l.bottom])


def is_boolean(h: HeytingAlgebra) -> bool:
    neg = h.negation_table
    return bool(np.array_equal(neg[neg], np.arange(len(h))))


def is_complemented(l: Lattice) -> bool:
    n = len(l)
    comp = (l.meet_table == l.bottom) & (l.join_table == l.top)
    return bool(comp.any(axis=1).all()) if n else True


# --------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    arg: "Formula"


Formula = Union[Var, Bottom, Top, And, Or, Implies, Not]


def variables(f: Formula) -> list[str]:
    """Free variables in order of first appearance."""
    out: list[str] = []

    def walk(g):
        match g:
            case Var(name):
                if name not in out:
                    out.append(name)
            case And(x, y) | Or(x, y) | Implies(x, y):
                walk(x)
                walk(y)
            case Not(x):
                walk(x)

    walk(f)
    return out


def to_text(f: Formula) -> str:
    match f:
        case Var(name):
            return name
        case Bottom():
            return "bot"
        case Top():
            return "top"
        case Not(x):
            return f"!{to_text(x)}" if isinstance(x, (Var, Bottom, Top, Not)) else f"!({to_text(x)})"
        case And(x, y):
            return f"({to_text(x)} & {to_text(y)})"
        case Or(x, y):
            return f"({to_text(x)} | {to_text(y)})"
        case Implies(x, y):
            return f"({to_text(x)} -> {to_text(y)})"
    raise TypeError(f"not a formula: {f!r}")


_TOKEN = re.compile(r"\s*(?:(->)|([&|!()])|([a-z][a-zA-Z0-9_]*))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        out.append(m.group(m.lastindex))
        pos = m.end()
    return out


def parse_formula(text: str) -> Formula:
    """Parse ``!`` > ``&`` > ``|`` > ``->`` (right-associative); ``bot``/``top`` constants."""
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise FormulaSyntaxError(f"expected {expected or 'a token'} at token {pos}, got {tok!r}")
        pos += 1
        return tok

    def implication_level():
        left = disjunction()
        if peek() == "->":
            take()
            return Implies(left, implication_level())
        return left

    def disjunction():
        left = conjunction()
        while peek() == "|":
            take()
            left = Or(left, conjunction())
        return left

    def conjunction():
        left = unary()
        while peek() == "&":
            take()
            left = And(left, unary())
        return left

    def unary():
        tok = peek()
        if tok == "!":
            take()
            return Not(unary())
        if tok == "(":
            take()
            inner = implication_level()
            take(")")
            return inner
        if tok is None or tok in "&|)" or tok == "->":
            raise FormulaSyntaxError(f"unexpected {tok!r} at token {pos}")
        take()
        if tok == "bot":
            return Bottom()
        if tok == "top":
            return Top()
        return Var(tok)

    f = implication_level()
    if pos != len(toks):
        raise FormulaSyntaxError(f"trailing input at token {pos}: {toks[pos]!r}")
    return f


def _eval_indices(h: HeytingAlgebra, f: Formula, env: Mapping[str, np.ndarray | int]):
    # works elementwise on integer arrays so all valuations evaluate at once
    match f:
        case Var(name):
            if name not in env:
                raise UnassignedVariable(name)
            return env[name]
        case Bottom():
            return h.bottom
        case Top():
            return h.top
        case And(x, y):
            return h.lattice.meet_table[_eval_indices(h, x, env), _eval_indices(h, y, env)]
        case Or(x, y):
            return h.lattice.join_table[_eval_indices(h, x, env), _eval_indices(h, y, env)]
        case Implies(x, y):
            return h.implication_table[_eval_indices(h, x, env), _eval_indices(h, y, env)]
        case Not(x):
            return h.implication_table[_eval_indices(h, x, env), h.bottom]
    raise TypeError(f"not a formula: {f!r}")


def eval_formula(h: HeytingAlgebra, f: Formula | str, v: Mapping[str, str]) -> str:
    """Value of ``f`` under the valuation ``v`` (variable -> element id)."""
    if isinstance(f, str):
        f = parse_formula(f)
    env = {name: h.lattice.index(e) for name, e in v.items()}
    return h.ids[int(_eval_indices(h, f, env))]


@dataclass(frozen=True)
class Validity:
    valid: bool
    counter_valuation: dict[str, str] | None = None
    value: str | None = None

    def __bool__(self):
        return self.valid


def is_valid(h: HeytingAlgebra, f: Formula | str, var_budget: int = 3) -> Validity:
    """Exhaustive check that every valuation sends ``f`` to ⊤."""
    if isinstance(f, str):
        f = parse_formula(f)
    names = variables(f)
    if len(names) > var_budget:
        raise VarBudgetExceeded(f"{len(names)} variables exceed the budget of {var_budget}")
    n = len(h)
    grids = np.meshgrid(*[np.arange(n)] * len(names), indexing="ij") if names else []
    env = {name: g.ravel() for name, g in zip(names, grids)}
    vals = np.broadcast_to(np.asarray(_eval_indices(h, f, env)), (n ** len(names),))
    bad = np.nonzero(vals != h.top)[0]
    if bad.size == 0:
        return Validity(True)
    k = int(bad[0])
    counter = {name: h.ids[int(env[name][k])] for name in names}
    return Validity(False, counter, h.ids[int(vals[k])])


# constructive-logic axiom schemes; the disjunction-introduction pair is the
# standard p -> p|q and q -> p|q
CL_AXIOMS: dict[str, str] = {
    "CL1": "p -> (q -> p)",
    "CL2": "(p -> (q -> r)) -> ((p -> q) -> (p -> r))",
    "CL3": "(p & q) -> p",
    "CL4": "(p & q) -> q",
    "CL5": "p -> (p | q)",
    "CL6": "q -> (p | q)",
    "CL7": "(p -> r) -> ((q -> r) -> ((p | q) -> r))",
    "CL8": "bot -> p",
}

# variant readings of the two disjunction schemes; the
# second one is not intuitionistically valid and is kept only as a probe
CL_AS_PRINTED: dict[str, str] = {
    "CL5": "(p -> p) | q",
    "CL6": "(q -> p) | q",
}


# --------------------------------------------------------------------------
# law suite


@dataclass
class LawResult:
    law: str
    status: str                      # "pass" | "fail" | "expected-fail"
    witness: tuple[str, ...] | None = None
    note: str = ""


@dataclass
class LawReport:
    results: list[LawResult] = field(default_factory=list)
    cl_results: dict[str, Validity] = field(default_factory=dict)

    def by_law(self) -> dict[str, LawResult]:
        return {r.law: r for r in self.results}

    def numbered_laws_passing(self) -> tuple[int, int]:
        """(passing, 20) with law 16 counted as passing only if both halves do."""
        d = self.by_law()
        ok = 0
        for k in range(1, 21):
            if k == 16:
                ok += d["16a"].status == "pass" and d["16b"].status == "pass"
            else:
                ok += d[str(k)].status == "pass"
        return ok, 20

    @property
    def hard_failures(self) -> list[LawResult]:
        return [r for r in self.results if r.status == "fail"]

    def cl_all_valid(self) -> bool:
        return all(v.valid for v in self.cl_results.values())

    def summary(self) -> str:
        ok, total = self.numbered_laws_passing()
        parts = [f"{ok}/{total} pass"]
        for r in self.results:
            if r.status == "expected-fail":
                parts.append(f"({r.law}) expected-fail with witness {r.witness}")
            elif r.status == "fail":
                parts.append(f"({r.law}) FAIL with witness {r.witness}")
        cl_bad = [k for k, v in self.cl_results.items() if not v.valid]
        parts.append("CL1-CL8 valid" if not cl_bad else f"CL invalid: {cl_bad}")
        return "; ".join(parts)


def law_suite(h: HeytingAlgebra, var_budget: int = 3) -> LawReport:
    """Check the numbered Heyting laws exhaustively and CL1-CL8 by validity."""
    l = h.lattice
    n = len(h)
    M, J, I, N = l.meet_table, l.join_table, h.implication_table, h.negation_table
    leq = l.leq
    top, bot = h.top, h.bottom
    a = np.arange(n)
    A2, B2 = np.meshgrid(a, a, indexing="ij")
    A3, B3, C3 = np.meshgrid(a, a, a, indexing="ij")
    ids = l.ids

    def witness(mask, *arrays):
        idx = np.argwhere(~mask)
        if idx.size == 0:
            return None
        pos = tuple(idx[0])
        return tuple(ids[int(arr[pos])] for arr in arrays)

    checks: list[tuple[str, np.ndarray, tuple]] = [
        ("1", I[a, a] == top, (a,)),
        ("2", M[A2, I[A2, B2]] == M[A2, B2], (A2, B2)),
        ("3", M[B2, I[A2, B2]] == B2, (A2, B2)),
        ("4", I[A3, M[B3, C3]] == M[I[A3, B3], I[A3, C3]], (A3, B3, C3)),
        ("5", leq[A2, I[B2, A2]] & leq[N[A2], I[A2, B2]], (A2, B2)),
        ("6", leq[I[A3, I[B3, C3]], I[I[A3, B3], I[A3, C3]]], (A3, B3, C3)),
        ("7", leq[I[A3, C3], I[I[B3, C3], I[J[A3, B3], C3]]], (A3, B3, C3)),
        ("8", leq[I[A2, B2], I[I[A2, N[B2]], N[A2]]], (A2, B2)),
        ("9", I[M[A3, B3], C3] == I[A3, I[B3, C3]], (A3, B3, C3)),
        ("10", I[A2, I[B2, J[A2, B2]]] == top, (A2, B2)),
        ("11", (I[A2, J[A2, B2]] == top) & (I[B2, J[A2, B2]] == top), (A2, B2)),
        ("12", I[I[A3, C3], I[I[B3, C3], I[J[A3, B3], C3]]] == top, (A3, B3, C3)),
        ("13", I[bot, a] == top, (a,)),
        ("14", ~((I[A2, B2] == top) & (I[B2, A2] == top)) | (A2 == B2), (A2, B2)),
        ("15", ~(I[top, a] == top) | (a == top), (a,)),
        ("16a", M[a, N[a]] == bot, (a,)),
        ("16b", J[a, N[a]] == top, (a,)),
        ("17", ~leq[A2, B2] | leq[N[B2], N[A2]], (A2, B2)),
        ("18", leq[a, N[N[a]]] & (N[a] == N[N[N[a]]]), (a,)),
        ("19", ~((M[A2, B2] == bot) & (J[A2, B2] == top)) | (B2 == N[A2]), (A2, B2)),
    ]
    report = LawReport()
    for law, mask, arrays in checks:
        mask = np.broadcast_to(mask, np.shape(arrays[0]))
        w = witness(mask, *arrays)
        if w is None:
            report.results.append(LawResult(law, "pass"))
        elif law == "16b":
            report.results.append(LawResult(
                law, "expected-fail", w, "excluded middle is not a Heyting law"))
        else:
            report.results.append(LawResult(law, "fail", w))
    # (20): Boolean in the ¬¬a = a sense iff every element has a complement
    boolean, complemented = is_boolean(h), is_complemented(l)
    report.results.append(LawResult("20", "pass" if boolean == complemented else "fail",
                                    None if boolean == complemented else (str(boolean),),
                                    f"boolean={boolean}"))
    report.results.sort(key=lambda r: (int(re.match(r"\d+", r.law).group()), r.law))
    for name, text in CL_AXIOMS.items():
        report.cl_results[name] = is_valid(h, text, var_budget)
    return report
