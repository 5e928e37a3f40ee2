"""Sparse exact integer multivariate polynomials and reduced forms.

Variables are beta_1..beta_{n-1} (index 0 is reserved for the collapsed
single beta), the marker t, and x_{ij} for 1 <= i < j <= n.  Coefficients
are Python ints, so arbitrary precision comes for free.

The reduced form of a reduction tree sums, over all leaves, the x-monomial
of the leaf times one beta_i per middle step on its path (i = the smaller
vertex of the first reduced edge).  Specializations cover everything the
identities need: x -> 1, the t-marking of the (1,n) edge, beta collapsing,
and the +-1 shifts.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from .redtree import TreeNode, ReductionTree, iter_nodes

Var = tuple
Monomial = tuple  # sorted tuple of (Var, exponent)


def var_beta(i: int) -> Var:
    return ("b", i)


VAR_T: Var = ("t",)


def var_x(i: int, j: int) -> Var:
    return ("x", i, j)


def _mono(pairs: Iterable[tuple[Var, int]]) -> Monomial:
    return tuple(sorted((v, e) for v, e in pairs if e))


ONE_MONO: Monomial = ()


class Polynomial:
    """Immutable-by-convention sparse polynomial with int coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict] = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls()

    @classmethod
    def const(cls, c: int) -> "Polynomial":
        return cls({ONE_MONO: c})

    @classmethod
    def variable(cls, v: Var, exp: int = 1) -> "Polynomial":
        return cls({_mono([(v, exp)]): 1})

    @classmethod
    def monomial(cls, pairs: Iterable[tuple[Var, int]], coeff: int = 1) -> "Polynomial":
        return cls({_mono(pairs): coeff})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Polynomial.const(other)
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def key(self) -> frozenset:
        return frozenset(self.terms.items())

    def __add__(self, other) -> "Polynomial":
        if isinstance(other, int):
            other = Polynomial.const(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        if isinstance(other, int):
            other = Polynomial.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, int):
            return Polynomial({m: c * other for m, c in self.terms.items()})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _merge_monos(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.const(1)
        for _ in range(k):
            result = result * self
        return result

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def coefficient(self, mono: Monomial) -> int:
        return self.terms.get(mono, 0)

    def substitute(self, var: Var, replacement: "Polynomial") -> "Polynomial":
        """Exact substitution var -> replacement, expanding powers."""
        out = Polynomial.zero()
        for m, c in self.terms.items():
            exp = dict(m).get(var, 0)
            rest = _mono((v, e) for v, e in m if v != var)
            term = Polynomial({rest: c})
            if exp:
                term = term * replacement**exp
            out = out + term
        return out

    def eval_all_one(self, kind: str) -> "Polynomial":
        """Set every variable whose tag matches `kind` to 1."""
        out: dict = {}
        for m, c in self.terms.items():
            kept = _mono((v, e) for v, e in m if v[0] != kind)
            out[kept] = out.get(kept, 0) + c
        return Polynomial(out)

    def canonical_terms(self) -> list[tuple[Monomial, int]]:
        """Graded lexicographic order over beta_1 < ... < t < x_12 < x_13 < ..."""
        allvars = sorted(self.variables())

        def key(item):
            m, _ = item
            d = dict(m)
            return (sum(d.values()), tuple(d.get(v, 0) for v in allvars))

        return sorted(self.terms.items(), key=key)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.canonical_terms():
            factors = [] if c != 1 or not m else []
            if c != 1 or not m:
                factors.append(str(c))
            for v, e in m:
                name = _var_name(v)
                factors.append(name if e == 1 else f"{name}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)


def _merge_monos(m1: Monomial, m2: Monomial) -> Monomial:
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return _mono(d.items())


def _var_name(v: Var) -> str:
    if v[0] == "b":
        return "b" if v[1] == 0 else f"b{v[1]}"
    if v[0] == "t":
        return "t"
    return f"x{v[1]},{v[2]}"


def x_monomial(graph) -> Polynomial:
    pairs = Counter((e.src, e.dst) for e in graph.edges)
    return Polynomial.monomial([(var_x(i, j), m) for (i, j), m in pairs.items()])


def reduced_form(tree: ReductionTree | TreeNode) -> Polynomial:
    """Q(b; x) = sum over all leaves of x(L) * prod of beta_i over middle steps."""
    root = tree.root if isinstance(tree, ReductionTree) else tree
    out = Polynomial.zero()
    stack = [(root, ())]
    while stack:
        node, betas = stack.pop()
        if node.is_leaf:
            out = out + Polynomial.monomial(Counter(betas).items()) * x_monomial(node.graph)
            continue
        left, mid, right = node.children
        i = node.pair[0].src
        stack.append((left, betas))
        stack.append((mid, betas + (var_beta(i),)))
        stack.append((right, betas))
    return out


def set_x_to_one(p: Polynomial) -> Polynomial:
    return p.eval_all_one("x")


def mark_t_edge(p: Polynomial, n: int) -> Polynomial:
    """x_{1,n} -> t, every other x -> 1 (n = the root's vertex count)."""
    p = p.substitute(var_x(1, n), Polynomial.variable(VAR_T))
    return p.eval_all_one("x")


def collapse_beta(p: Polynomial) -> Polynomial:
    """All beta_i -> the single beta (index 0)."""
    out: dict = {}
    for m, c in p.terms.items():
        total = sum(e for v, e in m if v[0] == "b")
        rest = [(v, e) for v, e in m if v[0] != "b"]
        if total:
            rest.append((var_beta(0), total))
        key = _mono(rest)
        out[key] = out.get(key, 0) + c
    return Polynomial(out)


def shift_beta(p: Polynomial, delta: int) -> Polynomial:
    """Every beta_i -> beta_i + delta (binomial expansion, exact)."""
    for v in sorted(p.variables()):
        if v[0] == "b":
            p = p.substitute(v, Polynomial.variable(v) + delta)
    return p


SPECIALIZE_RULES = ("x_to_one", "x_to_t", "beta_uniform", "beta_down", "beta_up")


def specialize(p: Polynomial, rule: str, n: Optional[int] = None) -> Polynomial:
    if rule == "x_to_one":
        return set_x_to_one(p)
    if rule == "x_to_t":
        if n is None:
            raise ValueError("x_to_t needs the root vertex count n")
        return mark_t_edge(p, n)
    if rule == "beta_uniform":
        return collapse_beta(p)
    if rule == "beta_down":
        return shift_beta(p, -1)
    if rule == "beta_up":
        return shift_beta(p, +1)
    raise ValueError(f"unknown rule {rule!r}; expected one of {SPECIALIZE_RULES}")


@dataclass
class C7Expansion:
    """Q(b-1, t) grouped by beta monomial (c_I) and by total beta degree (c_k)."""

    source: Polynomial
    by_multiset: dict[tuple, Polynomial]
    by_degree: dict[int, Polynomial]

    def reassemble(self) -> Polynomial:
        """Sum of (1+beta)^I * c_I(t); must reproduce the source polynomial."""
        out = Polynomial.zero()
        for multiset, c in self.by_multiset.items():
            factor = Polynomial.const(1)
            for i in multiset:
                factor = factor * (Polynomial.variable(var_beta(i)) + 1)
            out = out + factor * c
        return out


@dataclass
class C7Verdict:
    holds: bool
    witnesses: list  # (beta multiset or degree, t exponent, coefficient)


def expand_in_one_plus_beta(p: Polynomial) -> C7Expansion:
    """Write p (in betas and t only) as sum over I of (1+beta)^I c_I(t)."""
    bad = [v for v in p.variables() if v[0] == "x"]
    if bad:
        raise ValueError(f"polynomial still contains x variables: {sorted(bad)}")
    shifted = shift_beta(p, -1)
    by_multiset: dict[tuple, Polynomial] = {}
    for m, c in shifted.terms.items():
        betas = []
        rest = []
        for v, e in m:
            if v[0] == "b":
                betas.extend([v[1]] * e)
            else:
                rest.append((v, e))
        key = tuple(sorted(betas))
        by_multiset.setdefault(key, Polynomial.zero())
        by_multiset[key] = by_multiset[key] + Polynomial.monomial(rest, c)
    by_degree: dict[int, Polynomial] = {}
    for key, c in by_multiset.items():
        k = len(key)
        by_degree[k] = by_degree.get(k, Polynomial.zero()) + c
    return C7Expansion(source=p, by_multiset=by_multiset, by_degree=by_degree)


def check_c7(p: Polynomial) -> C7Verdict:
    """Kirillov-style nonnegativity of the c_k(t) in the (1+beta)^k expansion."""
    exp = expand_in_one_plus_beta(p)
    witnesses = []
    for k in sorted(exp.by_degree):
        for m, c in exp.by_degree[k].canonical_terms():
            if c < 0:
                witnesses.append((k, dict(m).get(VAR_T, 0), c))
    return C7Verdict(holds=not witnesses, witnesses=witnesses)


def check_c7_multiparameter(p: Polynomial) -> C7Verdict:
    """Nonnegativity of every c_I(t) in the multiparameter expansion."""
    exp = expand_in_one_plus_beta(p)
    witnesses = []
    for key in sorted(exp.by_multiset):
        for m, c in exp.by_multiset[key].canonical_terms():
            if c < 0:
                witnesses.append((key, dict(m).get(VAR_T, 0), c))
    return C7Verdict(holds=not witnesses, witnesses=witnesses)


def poly_to_obj(p: Polynomial) -> list[dict]:
    out = []
    for m, c in p.canonical_terms():
        d = dict(m)
        entry = {"coeff": c, "beta": {}, "t": d.get(VAR_T, 0), "x": {}}
        for v, e in m:
            if v[0] == "b":
                entry["beta"][str(v[1])] = e
            elif v[0] == "x":
                entry["x"][f"{v[1]},{v[2]}"] = e
        out.append(entry)
    return out


def poly_from_obj(obj: list[dict]) -> Polynomial:
    out = Polynomial.zero()
    for entry in obj:
        pairs = [(var_beta(int(i)), e) for i, e in entry.get("beta", {}).items()]
        if entry.get("t"):
            pairs.append((VAR_T, entry["t"]))
        for ij, e in entry.get("x", {}).items():
            i, j = ij.split(",")
            pairs.append((var_x(int(i), int(j)), e))
        out = out + Polynomial.monomial(pairs, entry["coeff"])
    return out
