"""Catalog and numerical evaluation of the weight functional relations.

Commutativity of the transfer-matrix family reduces to a finite list of
relations between triple products of vertex amplitudes on three "legs":
leg 0 carries the intertwiner weights, legs 1 and 2 the two operators it
intertwines.  This module stores the consolidated list of relations (the
gauge c~ = c and the proportionality d~ = Psi d already used), evaluates
their residuals on concrete weight sets, and provides the canonical form
used to compare relations structurally.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

GROUPS = ("TwoTerm", "G1", "G2", "G3", "G4", "G5", "G6", "G7", "G8",
          "FiveTerm", "Branching")


class WeightSlot(NamedTuple):
    """One amplitude reference: short weight name and leg index 0..2."""

    name: str
    leg: int


class Term(NamedTuple):
    """One signed monomial: sign * psi^psi_power * slot0*slot1*slot2."""

    sign: int
    psi_power: int
    slots: tuple


@dataclass(frozen=True)
class FunctionalRelation:
    id: str
    group: str
    terms: tuple

    def weight_slots(self):
        return [WeightSlot(nm, leg) for t in self.terms
                for leg, nm in enumerate(t.slots)]


# Relation table.  Slot names ending in P/M are charge placeholders: P
# becomes the relation's sign, M the opposite, and each such relation
# splits into a "+" and a "-" entry.  Entries without placeholders are
# single relations.
_TABLE = [
    # -- relations with two distinct triple products (pre-gauge form,
    #    written with the independent tilde amplitudes)
    ("eq9e84", "TwoTerm", [(+1, 0, ("cP", "ctP", "cP")),
                           (-1, 0, ("ctP", "cP", "ctP"))]),
    ("eq15e76", "TwoTerm", [(+1, 0, ("d", "dt", "cP")),
                            (-1, 0, ("dt", "d", "ctP"))]),
    ("eq33e57", "TwoTerm", [(+1, 0, ("cP", "dt", "d")),
                            (-1, 0, ("ctP", "d", "dt"))]),
    # -- three triple products
    ("eq2e120", "G1", [(+1, 0, ("bP", "cP", "cP")), (+1, 0, ("cP", "aP", "bP")),
                       (-1, 0, ("cP", "bP", "aP"))]),
    ("eq1e88", "G1", [(+1, 0, ("bP", "cP", "bP")), (+1, 0, ("cP", "aP", "cP")),
                      (-1, 0, ("aP", "cP", "aP"))]),
    ("eq8e89", "G1", [(+1, 0, ("cP", "cP", "bP")), (+1, 0, ("bP", "aP", "cP")),
                      (-1, 0, ("aP", "bP", "cP"))]),
    ("eq7e114", "G2", [(+1, 0, ("d", "bP", "bP")), (+1, 0, ("f", "d", "cP")),
                       (-1, 0, ("d", "f", "aP"))]),
    ("eq6e82", "G2", [(+1, 0, ("f", "d", "bP")), (+1, 0, ("d", "bP", "cP")),
                      (-1, 0, ("bP", "d", "aP"))]),
    ("eq22e75", "G2", [(+1, 1, ("d", "d", "bM")), (+1, 0, ("f", "bP", "cM")),
                       (-1, 0, ("bP", "f", "cM"))]),
    ("eq56e40", "G3", [(+1, 0, ("bP", "bP", "d")), (+1, 0, ("cP", "d", "f")),
                       (-1, 0, ("aP", "f", "d"))]),
    ("eq43e38", "G3", [(+1, 0, ("cP", "bP", "d")), (+1, 0, ("bP", "d", "f")),
                       (-1, 0, ("aP", "d", "bP"))]),
    ("eq95e21", "G3", [(+1, 1, ("bP", "d", "d")), (+1, 0, ("cP", "bM", "f")),
                       (-1, 0, ("cP", "f", "bM"))]),
    # -- four triple products
    ("eq14e83", "G4", [(-1, 0, ("cP", "cP", "bP")), (+1, 1, ("d", "d", "bP")),
                       (+1, 0, ("g", "bP", "cP")), (-1, 0, ("bP", "g", "cP"))]),
    ("eq44e71", "G4", [(-1, 0, ("bP", "cP", "cP")), (+1, 1, ("bP", "d", "d")),
                       (-1, 0, ("cP", "g", "bP")), (+1, 0, ("cP", "bP", "g"))]),
    ("eq20e62", "G4", [(-1, 0, ("d", "bM", "cP")), (+1, 0, ("cM", "bP", "d")),
                       (-1, 0, ("g", "d", "bP")), (+1, 0, ("bM", "d", "g"))]),
    ("eq80", "G5", [(+1, 0, ("h", "b-", "b+")), (-1, 0, ("h", "b+", "b-")),
                    (+1, 0, ("d", "d", "c+")), (-1, 0, ("d", "d", "c-"))]),
    ("eq113", "G5", [(+1, 0, ("b+", "h", "b+")), (-1, 0, ("b-", "h", "b-")),
                     (-1, 0, ("c-", "c+", "c-")), (+1, 0, ("c+", "c-", "c+"))]),
    ("eq99", "G5", [(+1, 0, ("b+", "b-", "h")), (-1, 0, ("b-", "b+", "h")),
                    (+1, 0, ("c+", "d", "d")), (-1, 0, ("c-", "d", "d"))]),
    ("eq112e81", "G5", [(-1, 0, ("d", "d", "bM")), (+1, 0, ("cP", "cM", "bP")),
                        (-1, 0, ("h", "bP", "cM")), (+1, 0, ("bP", "h", "cP"))]),
    ("eq101e111", "G5", [(+1, 0, ("cP", "h", "bP")), (+1, 0, ("bP", "cM", "cP")),
                         (-1, 0, ("bM", "d", "d")), (-1, 0, ("cM", "bP", "h"))]),
    ("eq94e127", "G5", [(+1, 0, ("aP", "h", "aP")), (-1, 0, ("d", "cP", "d")),
                        (-1, 0, ("f", "h", "f")), (-1, 0, ("h", "aP", "h"))]),
    ("eq50", "G6", [(+1, 0, ("ht", "b+", "b-")), (-1, 0, ("ht", "b-", "b+")),
                    (+1, 2, ("d", "d", "c-")), (-1, 2, ("d", "d", "c+"))]),
    ("eq17", "G6", [(+1, 0, ("b-", "ht", "b-")), (-1, 0, ("b+", "ht", "b+")),
                    (+1, 0, ("c-", "c+", "c-")), (-1, 0, ("c+", "c-", "c+"))]),
    ("eq31", "G6", [(-1, 0, ("b+", "b-", "ht")), (+1, 0, ("b-", "b+", "ht")),
                    (+1, 2, ("c-", "d", "d")), (-1, 2, ("c+", "d", "d"))]),
    ("eq49e18", "G6", [(+1, 2, ("d", "d", "bM")), (-1, 0, ("cP", "cM", "bP")),
                       (-1, 0, ("bP", "ht", "cP")), (+1, 0, ("ht", "bP", "cM"))]),
    ("eq19e29", "G6", [(-1, 0, ("cP", "ht", "bP")), (-1, 0, ("bP", "cM", "cP")),
                       (+1, 2, ("bM", "d", "d")), (+1, 0, ("cM", "bP", "ht"))]),
    ("eq3e36", "G6", [(-1, 0, ("aP", "ht", "aP")), (+1, 0, ("f", "ht", "f")),
                      (+1, 2, ("d", "cP", "d")), (+1, 0, ("ht", "aP", "ht"))]),
    ("eq25e105", "G7", [(+1, 2, ("d", "cP", "d")), (-1, 0, ("d", "cP", "d")),
                        (+1, 0, ("ht", "h", "ht")), (-1, 0, ("h", "ht", "h"))]),
    ("eq26e85", "G7", [(+1, 1, ("h", "d", "bP")), (+1, 0, ("d", "bP", "cP")),
                       (-1, 1, ("cP", "bP", "d")), (-1, 0, ("bP", "d", "ht"))]),
    ("eq45e104", "G7", [(-1, 0, ("ht", "d", "bP")), (-1, 1, ("d", "bP", "cP")),
                        (+1, 0, ("cP", "bP", "d")), (+1, 1, ("bP", "d", "h"))]),
    ("eq28e125", "G7", [(+1, 0, ("h", "f", "aP")), (-1, 0, ("h", "aP", "f")),
                        (-1, 1, ("d", "cP", "d")), (-1, 0, ("f", "h", "ht"))]),
    ("eq5e102", "G7", [(-1, 0, ("ht", "f", "aP")), (+1, 0, ("ht", "aP", "f")),
                       (+1, 1, ("d", "cP", "d")), (+1, 0, ("f", "ht", "h"))]),
    ("eq23e39", "G7", [(+1, 0, ("h", "ht", "f")), (+1, 1, ("d", "cP", "d")),
                       (+1, 0, ("f", "aP", "ht")), (-1, 0, ("aP", "f", "ht"))]),
    ("eq91e107", "G7", [(-1, 0, ("ht", "h", "f")), (-1, 1, ("d", "cP", "d")),
                        (-1, 0, ("f", "aP", "h")), (+1, 0, ("aP", "f", "h"))]),
    ("eq4e69", "G8", [(-1, 1, ("cP", "d", "aP")), (+1, 0, ("f", "ht", "d")),
                      (+1, 1, ("d", "cP", "g")), (+1, 1, ("ht", "aP", "d"))]),
    ("eq61e126", "G8", [(+1, 0, ("cP", "d", "aP")), (-1, 0, ("h", "aP", "d")),
                        (-1, 0, ("d", "cP", "g")), (-1, 1, ("f", "h", "d"))]),
    ("eq93e119", "G8", [(+1, 0, ("aP", "d", "cP")), (-1, 0, ("g", "cP", "d")),
                        (-1, 1, ("d", "h", "f")), (-1, 0, ("d", "aP", "h"))]),
    ("eq11e37", "G8", [(+1, 0, ("d", "ht", "f")), (-1, 1, ("aP", "d", "cP")),
                       (+1, 1, ("g", "cP", "d")), (+1, 1, ("d", "aP", "ht"))]),
    ("eq77e34", "G8", [(+1, 0, ("h", "cM", "f")), (-1, 0, ("cP", "f", "cM")),
                       (+1, 1, ("d", "g", "d")), (+1, 0, ("f", "cP", "ht"))]),
    ("eq96e53", "G8", [(+1, 0, ("cP", "f", "cM")), (-1, 1, ("d", "g", "d")),
                       (-1, 0, ("ht", "cM", "f")), (-1, 0, ("f", "cP", "h"))]),
    ("eqbranch", "Branching", [(+1, 2, ("d", "c+", "d")), (-1, 2, ("d", "c-", "d")),
                               (-1, 0, ("d", "c+", "d")), (+1, 0, ("d", "c-", "d"))]),
    # -- five triple products
    ("eqg12e70", "FiveTerm", [(+1, 0, ("bP", "cP", "bP")), (-1, 0, ("d", "ht", "d")),
                              (-1, 0, ("g", "cP", "g")), (+1, 0, ("cP", "g", "cP")),
                              (-1, 2, ("d", "aP", "d"))]),
    ("eqg60e118", "FiveTerm", [(+1, 0, ("bP", "cP", "bP")), (-1, 2, ("d", "h", "d")),
                               (-1, 0, ("g", "cP", "g")), (+1, 0, ("cP", "g", "cP")),
                               (-1, 0, ("d", "aP", "d"))]),
    ("eqg24e72", "FiveTerm", [(+1, 1, ("bP", "bP", "d")), (+1, 0, ("cP", "d", "ht")),
                              (-1, 0, ("d", "cP", "g")), (-1, 1, ("f", "aP", "d")),
                              (-1, 0, ("h", "ht", "d"))]),
    ("eqg58e106", "FiveTerm", [(+1, 0, ("bP", "bP", "d")), (+1, 1, ("cP", "d", "h")),
                               (-1, 1, ("d", "cP", "g")), (-1, 0, ("f", "aP", "d")),
                               (-1, 1, ("ht", "h", "d"))]),
    ("eqg13e103", "FiveTerm", [(+1, 1, ("d", "bP", "bP")), (-1, 1, ("d", "aP", "f")),
                               (-1, 0, ("g", "cP", "d")), (-1, 0, ("d", "ht", "h")),
                               (+1, 0, ("ht", "d", "cP"))]),
    ("eqg27e117", "FiveTerm", [(+1, 0, ("d", "bP", "bP")), (-1, 0, ("d", "aP", "f")),
                               (-1, 1, ("g", "cP", "d")), (-1, 1, ("d", "h", "ht")),
                               (+1, 1, ("h", "d", "cP"))]),
    ("eqg100e79", "FiveTerm", [(+1, 0, ("bP", "cM", "bP")), (+1, 0, ("cP", "h", "cP")),
                               (-1, 0, ("f", "cM", "f")), (-1, 0, ("h", "cP", "h")),
                               (-1, 0, ("d", "g", "d"))]),
    ("eqg30e51", "FiveTerm", [(+1, 0, ("bM", "cP", "bM")), (+1, 0, ("cM", "ht", "cM")),
                              (-1, 0, ("f", "cP", "f")), (-1, 0, ("ht", "cM", "ht")),
                              (-1, 2, ("d", "g", "d"))]),
    ("eqg63e52", "FiveTerm", [(+1, 1, ("d", "bP", "bM")), (+1, 1, ("g", "d", "cM")),
                              (-1, 0, ("f", "cP", "d")), (-1, 1, ("d", "g", "g")),
                              (-1, 1, ("ht", "cM", "d"))]),
    ("eqg78e67", "FiveTerm", [(+1, 0, ("d", "bP", "bM")), (+1, 0, ("g", "d", "cM")),
                              (-1, 1, ("f", "cP", "d")), (-1, 0, ("d", "g", "g")),
                              (-1, 0, ("h", "cM", "d"))]),
    ("eqg98e66", "FiveTerm", [(+1, 0, ("bP", "bM", "d")), (-1, 1, ("d", "cM", "f")),
                              (+1, 0, ("cP", "d", "g")), (-1, 0, ("g", "g", "d")),
                              (-1, 0, ("d", "cP", "h"))]),
    ("eqg32e64", "FiveTerm", [(+1, 1, ("bM", "bP", "d")), (-1, 0, ("d", "cP", "f")),
                              (+1, 1, ("cM", "d", "g")), (-1, 1, ("g", "g", "d")),
                              (-1, 1, ("d", "cM", "ht"))]),
]


def _resolve(slot, sign):
    if slot.endswith("P"):
        return slot[:-1] + ("+" if sign > 0 else "-")
    if slot.endswith("M"):
        return slot[:-1] + ("-" if sign > 0 else "+")
    return slot


def _has_placeholder(terms):
    return any(s.endswith(("P", "M")) for _c, _p, slots in terms for s in slots)


def catalog():
    """All consolidated functional relations, charge variants expanded.

    Relations whose slots carry a charge placeholder appear twice, with
    ids suffixed "+" and "-".  Returns 99 FunctionalRelation entries:
    6 two-term, 18 three-term, 51 four-term (one of them the branching
    relation), 24 five-term.
    """
    out = []
    for rid, group, terms in _TABLE:
        if _has_placeholder(terms):
            for sign in (+1, -1):
                out.append(FunctionalRelation(
                    rid + ("+" if sign > 0 else "-"), group,
                    tuple(Term(c, p, tuple(_resolve(s, sign) for s in slots))
                          for c, p, slots in terms)))
        else:
            out.append(FunctionalRelation(
                rid, group,
                tuple(Term(c, p, slots) for c, p, slots in terms)))
    return out


def evaluate_relation(rel, w0, w1, w2, psi):
    """Scale-free residual of one relation on a weight-set triple.

    The raw sum of monomials is divided by the largest monomial magnitude
    so the tolerance is independent of the overall weight normalization.
    """
    legs = (w0, w1, w2)
    total = 0.0 + 0j
    biggest = 0.0
    for sign, power, slots in rel.terms:
        mon = psi ** power
        for leg in range(3):
            mon = mon * legs[leg].slot(slots[leg])
        total += sign * mon
        biggest = max(biggest, abs(mon))
    if biggest == 0.0:
        return 0.0
    return abs(total) / biggest


def evaluate_relations(w0, w1, w2, psi):
    """Residual magnitude of every catalog relation; id -> residual map.

    ``w0`` must sit at the difference of the spectral points of ``w1``
    and ``w2`` for an integrable family to give all-zero residuals.
    """
    return {rel.id: evaluate_relation(rel, w0, w1, w2, psi)
            for rel in catalog()}


def canonical_terms(terms):
    """Canonical form of a term multiset for structural comparison.

    Collects coefficients per (psi_power, slots), shifts the minimal psi
    power to zero, sorts, and normalizes so the first term has
    coefficient +1.  Two relations are the same equation exactly when
    their canonical forms coincide.
    """
    acc = {}
    for sign, power, slots in terms:
        key = (power, tuple(slots))
        acc[key] = acc.get(key, 0) + sign
    acc = {k: v for k, v in acc.items() if v != 0}
    if not acc:
        return ()
    shift = min(p for p, _s in acc)
    items = sorted(((p - shift, s), Fraction(c)) for (p, s), c in acc.items())
    norm = items[0][1]
    return tuple((k, c / norm) for k, c in items)


_CONJ_NAME = {"a+": "a-", "a-": "a+", "b+": "b-", "b-": "b+",
              "c+": "c-", "c-": "c+", "ct+": "ct-", "ct-": "ct+",
              "f": "f", "g": "g", "h": "ht", "ht": "h"}


def charge_conjugate_terms(terms):
    """Image of a term list under the charge-conjugation map.

    Swaps the two charge sectors, exchanges h with h_tilde, and maps each
    d slot to psi*d (the conjugate of the d amplitude) while inverting
    the overall psi bookkeeping; the result is returned in canonical form.
    """
    mapped = []
    for sign, power, slots in terms:
        new_power = -power
        new_slots = []
        for s in slots:
            if s == "d":
                new_power += 1
                new_slots.append("d")
            elif s == "dt":
                new_slots.append("d")
            else:
                new_slots.append(_CONJ_NAME[s])
        mapped.append(Term(sign, new_power, tuple(new_slots)))
    return canonical_terms(mapped)


def catalog_as_json():
    """Catalog serialized to plain dicts for the CLI dump."""
    return [{"id": r.id, "group": r.group,
             "terms": [{"sign": t.sign, "psi_power": t.psi_power,
                        "slots": list(t.slots)} for t in r.terms]}
            for r in catalog()]
