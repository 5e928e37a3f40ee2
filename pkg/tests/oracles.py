"""Independent oracles used by the test suite.

These deliberately avoid the tree machinery: the reduced-form oracle is a
plain string-rewriting calculator on x-monomials, and the facet oracle
compares leaf pairs directly.  Agreement between these and the production
code is the point of the tests, so keep them decoupled.
"""

from collections import Counter

from redforge.multigraph import MultiGraph, graph
from redforge.poly import Polynomial, var_beta, var_x


def _term_graph(xs: Counter, n: int) -> MultiGraph:
    pairs = []
    for (i, j), m in xs.items():
        pairs.extend([(i, j)] * m)
    return graph(n, pairs)


def _order_O_triple(xs: Counter, n: int):
    """The (i,j,k) the order O would reduce in a term with x-support xs."""
    for v in range(1, n + 1):
        ins = sorted(i for (i, j) in xs for _ in range(xs[(i, j)]) if j == v)
        outs = sorted(j for (i, j) in xs for _ in range(xs[(i, j)]) if i == v)
        if ins and outs:
            return ins[0], v, outs[-1]
    return None


def rewrite_reduced_form(n: int, pairs) -> Polynomial:
    """Reduced form via literal substitution x_ij x_jk -> x_ik x_ij + x_jk x_ik + b_i x_ik,
    applying the order-O choice of (i,j,k) to each term until none is reducible."""
    start_x = Counter(tuple(p) for p in pairs)
    terms = Counter({(frozenset(), tuple(sorted(start_x.items()))): 1})
    done: Counter = Counter()
    while terms:
        (betas, xs_t), coeff = next(iter(terms.items()))
        del terms[(betas, xs_t)]
        xs = Counter(dict(xs_t))
        triple = _order_O_triple(xs, n)
        if triple is None:
            done[(betas, xs_t)] += coeff
            continue
        i, j, k = triple
        base = xs.copy()
        base[(i, j)] -= 1
        base[(j, k)] -= 1
        base += Counter()  # drop zeros
        for extra_x, extra_b in (
            (Counter({(i, k): 1, (i, j): 1}), None),
            (Counter({(j, k): 1, (i, k): 1}), None),
            (Counter({(i, k): 1}), i),
        ):
            new_x = base + extra_x
            new_b = Counter(dict(betas))
            if extra_b is not None:
                new_b[extra_b] += 1
            key = (frozenset(new_b.items()), tuple(sorted(new_x.items())))
            terms[key] += coeff
    out = Polynomial.zero()
    for (betas, xs_t), coeff in done.items():
        mono = [(var_beta(i), m) for i, m in betas] + [
            (var_x(i, j), m) for (i, j), m in xs_t
        ]
        out = out + Polynomial.monomial(mono, coeff)
    return out
