"""Symbolic census of the scalar component equations of the intertwining identity.

Expanding the 27x27 intertwining identity componentwise over a generic
PT-symmetric nineteen-vertex ansatz (all fourteen amplitudes independent
per leg) yields 3^6 scalar equations, most identically zero.  The
survivors, deduplicated up to an overall scalar, are the model's
functional relations; this module performs the expansion, buckets the
distinct equations by their number of triple-product monomials, reduces
them by the two-term gauge identifications, and cross-checks the
zero/nonzero component pattern numerically.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .operators import VERTEX_PLACEMENTS as NINETEEN_VERTEX
from .relations import canonical_terms, catalog

# Fully asymmetric two-state ice-rule ansatz (six amplitudes).
SIX_VERTEX = (
    ("a+", 1, 1, 1, 1), ("a-", 2, 2, 2, 2),
    ("b+", 1, 1, 2, 2), ("b-", 2, 2, 1, 1),
    ("c", 1, 2, 2, 1), ("ct", 2, 1, 1, 2),
)

_ANSATZE = {"nineteen-vertex": (NINETEEN_VERTEX, 3),
            "six-vertex": (SIX_VERTEX, 2)}


@dataclass(frozen=True)
class CensusEquation:
    id: str
    components: tuple          # (a1,a2,a3,b1,b2,b3) index tuples, 1-based
    terms: tuple               # ((name0, name1, name2), int coeff) pairs

    @property
    def n_triple_products(self):
        return len(self.terms)


@dataclass(frozen=True)
class CensusReport:
    """Distinct component equations bucketed by triple-product count."""

    counts: dict
    total: int
    nonzero_components: int
    equations: tuple = field(repr=False, default=())
    gauged_counts: dict = field(default_factory=dict)
    gauged_total: int = 0

    def as_json(self):
        return {"counts": {str(k): v for k, v in sorted(self.counts.items())},
                "total": self.total,
                "nonzero_components": self.nonzero_components,
                "gauged_counts": {str(k): v for k, v
                                  in sorted(self.gauged_counts.items())},
                "gauged_total": self.gauged_total}


def _slot_table(placements):
    table = {}
    for nm, x, y, u, v in placements:
        table.setdefault((x, y, u, v), []).append(nm)
    return table


def expand_components(ansatz="nineteen-vertex"):
    """Symbolic componentwise expansion of the intertwining identity.

    Returns a dict mapping each nonzero component index tuple
    (a1,a2,a3,b1,b2,b3) to a Counter of {(name0,name1,name2): coeff}.
    """
    placements, n = _ANSATZE[ansatz]
    table = _slot_table(placements)
    states = range(1, n + 1)
    out = {}
    for a1 in states:
        for a2 in states:
            for a3 in states:
                for b1 in states:
                    for b2 in states:
                        for b3 in states:
                            cnt = Counter()
                            for g1 in states:
                                for g2 in states:
                                    for g3 in states:
                                        r = table.get((a1, g1, a2, g2))
                                        l1 = table.get((g1, b1, a3, g3))
                                        l2 = table.get((g2, b2, g3, b3))
                                        if r and l1 and l2:
                                            for n0 in r:
                                                for n1 in l1:
                                                    for n2 in l2:
                                                        cnt[(n0, n1, n2)] += 1
                                        r = table.get((g1, b1, g2, b2))
                                        l1 = table.get((a1, g1, g3, b3))
                                        l2 = table.get((a2, g2, a3, g3))
                                        if r and l1 and l2:
                                            for n0 in r:
                                                for n1 in l1:
                                                    for n2 in l2:
                                                        cnt[(n0, n1, n2)] -= 1
                            cnt = Counter({k: v for k, v in cnt.items() if v})
                            if cnt:
                                out[(a1, a2, a3, b1, b2, b3)] = cnt
    return out


def _canon_raw(cnt):
    items = sorted(cnt.items())
    norm = Fraction(items[0][1])
    return tuple((m, Fraction(c) / norm) for m, c in items)


def gauge_terms(cnt):
    """Apply the two-term gauge (ct -> c, dt -> psi*d) to a raw equation.

    Returns the canonical (psi_power, slots) term form, or () when the
    equation collapses to a triviality.
    """
    acc = Counter()
    for (n0, n1, n2), coeff in cnt.items():
        power = 0
        names = []
        for nm in (n0, n1, n2):
            if nm in ("ct+", "ct-"):
                nm = "c" + nm[2:]
            elif nm == "ct":
                nm = "c"
            elif nm == "dt":
                nm = "d"
                power += 1
            names.append(nm)
        acc[(power, tuple(names))] += coeff
    terms = [(c, p, s) for (p, s), c in acc.items() if c]
    return canonical_terms(terms)


def ybe_census(ansatz="nineteen-vertex", include_equations=False):
    """Census of the distinct component equations of the identity.

    Two components count as the same equation when their monomial
    multisets agree up to one overall scalar.  ``counts`` buckets the
    distinct raw equations by triple-product count; ``gauged_counts``
    does the same after the two-term gauge reduction (trivialized
    equations dropped).
    """
    comps = expand_components(ansatz)
    grouped = defaultdict(list)
    for comp, cnt in comps.items():
        grouped[_canon_raw(cnt)].append(comp)
    equations = []
    for i, (key, members) in enumerate(sorted(grouped.items())):
        equations.append(CensusEquation(
            id=f"c{i+1:03d}", components=tuple(sorted(members)),
            terms=tuple((m, int(c)) for m, c in key)))
    counts = Counter(eq.n_triple_products for eq in equations)
    gauged = set()
    for eq in equations:
        g = gauge_terms(Counter(dict(eq.terms)))
        if g:
            gauged.add(g)
    gauged_counts = Counter(len({s for (_p, s), _c in g}) for g in gauged)
    return CensusReport(
        counts=dict(sorted(counts.items())),
        total=len(equations),
        nonzero_components=len(comps),
        equations=tuple(equations) if include_equations else (),
        gauged_counts=dict(sorted(gauged_counts.items())),
        gauged_total=len(gauged))


def numeric_component_pattern(ansatz="nineteen-vertex", seed=20108,
                              tol=1e-10):
    """Nonzero component index set from a random numeric evaluation.

    Draws one generic (non-integrable) value per amplitude and leg,
    builds the residual tensor of the identity, and returns the set of
    component indices with magnitude above ``tol`` times the tensor
    scale.  Matches the symbolic expansion's nonzero set exactly.
    """
    placements, n = _ANSATZE[ansatz]
    rng = np.random.default_rng(seed)
    names = sorted({p[0] for p in placements})
    vals = {(nm, leg): complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5))
            for nm in names for leg in range(3)}

    def tensor(leg):
        t = np.zeros((n, n, n, n), dtype=complex)
        for nm, x, y, u, v in placements:
            t[x - 1, y - 1, u - 1, v - 1] += vals[(nm, leg)]
        return t

    r, l1, l2 = tensor(0), tensor(1), tensor(2)
    lhs = np.einsum("ipjq,plkr,qmrn->ijklmn", r, l1, l2)
    rhs = np.einsum("jqkr,iprn,plqm->ijklmn", l2, l1, r)
    res = np.abs(lhs - rhs)
    cut = tol * max(np.max(np.abs(lhs)), 1.0)
    return {tuple(int(i) + 1 for i in idx)
            for idx in zip(*np.nonzero(res > cut))}


def census_catalog_diff():
    """Structural diff between the gauged census and the stored catalog.

    Returns (census_only, catalog_only) sets of canonical term forms;
    both empty exactly when the stored consolidated catalog is the gauge
    reduction of the component census.
    """
    comps = expand_components("nineteen-vertex")
    grouped = defaultdict(list)
    for comp, cnt in comps.items():
        grouped[_canon_raw(cnt)].append(comp)
    gauged = set()
    for key in grouped:
        g = gauge_terms(Counter({m: int(c) for m, c in key}))
        if g:
            gauged.add(g)
    cat = {canonical_terms(rel.terms)
           for rel in catalog() if rel.group != "TwoTerm"}
    return gauged - cat, cat - gauged


def census_equations_json():
    """All raw census equations as plain dicts (CLI dump format)."""
    report = ybe_census(include_equations=True)
    return [{"id": eq.id,
             "components": [list(c) for c in eq.components],
             "terms": [{"slots": list(m), "coeff": c} for m, c in eq.terms]}
            for eq in report.equations]
