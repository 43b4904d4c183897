"""Weight construction, invariants, constraints, reconstruction."""

import numpy as np
import pytest

from vlab.errors import DegenerateWeightError, PoleError
from vlab.weights import (Branch, BranchParams, branch_d_alignment,
                          check_elimination_identities,
                          check_invariant_constraints, compute_invariants,
                          conic_residual, effective_gamma, make_weights,
                          parameterize_conic, reconstruct_dependent_weights,
                          reference_invariants)

RNG = np.random.default_rng(7)

ALL_BRANCHES = ["1A", "1B", "2A", "2B", "1S", "2S"]
FAMILIES = ["1A", "1B", "2A", "2B"]
FAMILY_OF = {"1A": "branch1", "1B": "branch1", "1S": "branch1",
             "2A": "branch2", "2B": "branch2", "2S": "branch2"}


def random_lambda():
    return complex(RNG.uniform(-1, 1), RNG.uniform(-1, 1))


def param_grid(branch):
    eps2_vals = (1, -1) if branch in ("2A", "2B") else (1,)
    for eps1 in (1, -1):
        for eps2 in eps2_vals:
            for d_sign in (1, -1):
                yield BranchParams(gamma=RNG.uniform(0.2, 1.5),
                                   epsilon1=eps1, epsilon2=eps2,
                                   d_sign=d_sign)


def inv_distance(inv, ref):
    worst = 0.0
    for name in vars(ref):
        want = complex(getattr(ref, name))
        got = complex(getattr(inv, name))
        worst = max(worst, abs(got - want) / max(1.0, abs(want)))
    return worst


def test_branch_parse():
    assert Branch.parse("2b") is Branch.B2B
    assert Branch.parse("B1A") is Branch.B1A
    assert Branch.parse("1S") is Branch.S1S
    with pytest.raises(ValueError):
        Branch.parse("3C")


def test_bad_signs_rejected():
    with pytest.raises(ValueError):
        BranchParams(epsilon1=2)


def test_permutation_point_1a():
    w = make_weights("1A", BranchParams(gamma=0.7, epsilon1=1), 0.0)
    assert w.a_plus == w.a_minus == 1
    assert w.b_plus == w.b_minus == 0
    assert abs(w.c_plus - 1) < 1e-15 and abs(w.c_minus - 1) < 1e-15
    assert w.d == w.d_tilde == 0
    assert w.f == 0
    assert abs(w.g - 1) < 1e-15
    assert abs(w.h - 1) < 1e-15 and abs(w.h_tilde - 1) < 1e-15


def test_2b_sign_structure():
    for eps2 in (1, -1):
        p = BranchParams(epsilon1=1, epsilon2=eps2)
        w = make_weights("2B", p, 0.42 + 0.1j)
        assert w.b_minus == -w.b_plus
        assert abs(w.d_tilde - (-np.exp(1j * np.pi * eps2 / 3)) * w.d) < 1e-15
        # charge conjugation is violated only through the b amplitudes
        assert w.a_minus == w.a_plus and w.c_minus == w.c_plus


def test_1a_charge_symmetric():
    w = make_weights("1A", BranchParams(gamma=0.9, epsilon1=-1), 0.3 + 0.4j)
    assert w.a_plus == w.a_minus
    assert w.b_plus == w.b_minus
    assert w.c_plus == w.c_minus


@pytest.mark.parametrize("branch", ALL_BRANCHES)
def test_invariants_match_reference_tables(branch):
    # lambda-independence and table agreement over >= 10 spectral points
    for params in param_grid(branch):
        ref = reference_invariants(branch, params)
        taken = 0
        while taken < 10:
            try:
                w = make_weights(branch, params, random_lambda())
                inv = compute_invariants(w)
            except (PoleError, DegenerateWeightError):
                continue
            taken += 1
            assert inv_distance(inv, ref) < 1e-10


def test_invariants_1a_column():
    gamma = 0.83
    p = BranchParams(gamma=gamma, epsilon1=1)
    inv = compute_invariants(make_weights("1A", p, 0.37 + 0.21j))
    dp = 2 * np.cosh(gamma)
    assert abs(inv.delta_p - dp) < 1e-12
    assert abs(inv.delta_m - dp) < 1e-12
    assert abs(inv.psi - 1) < 1e-12
    assert abs(inv.omega) < 1e-12
    assert abs(inv.lambda_p - 1) < 1e-12


def test_invariants_2b_column():
    p = BranchParams(epsilon1=1, epsilon2=1)
    inv = compute_invariants(make_weights("2B", p, 0.29 - 0.13j))
    om = np.exp(1j * np.pi / 3)
    assert abs(inv.delta_p - np.sqrt(3)) < 1e-12
    assert abs(inv.gamma_p - 1 / np.sqrt(3)) < 1e-12
    assert abs(inv.theta_p) < 1e-12
    assert abs(inv.psi + om) < 1e-12


def test_psi_is_one_when_d_tilde_equals_d():
    w = make_weights("1B", BranchParams(gamma=1.1), 0.4)
    assert abs(compute_invariants(w).psi - 1) < 1e-14


def test_reference_1b_delta_minus():
    p = BranchParams(gamma=0.5, epsilon1=1)
    dp = 2 * np.cosh(0.5)
    ref = reference_invariants("1B", p)
    want = (-dp + np.sqrt(3) * np.sqrt(complex(4 - dp ** 2))) / 2
    assert abs(ref.delta_m - want) < 1e-14


def test_reference_2a_psi():
    p = BranchParams(gamma=0.77, epsilon1=-1, epsilon2=-1)
    dp = 2 * np.cosh(0.77)
    ref = reference_invariants("2A", p)
    want = (2 - dp ** 2 - dp * np.sqrt(complex(dp ** 2 - 4))) / 2
    assert abs(ref.psi - want) < 1e-14


def test_reference_2s_point():
    for sign in (1, -1):
        ref = reference_invariants("2S", BranchParams(epsilon1=sign))
        assert ref.delta_p == sign * 2
        assert ref.lambda_p == -1
        assert ref.psi == -1


def test_constraints_vanish_on_reference_sets():
    for branch in ALL_BRANCHES:
        for params in param_grid(branch):
            ref = reference_invariants(branch, params)
            res = check_invariant_constraints(ref, family=FAMILY_OF[branch])
            assert max(res.values()) < 1e-10, (branch, params, res)


def test_constraints_detect_perturbation():
    from dataclasses import replace
    ref = reference_invariants("1A", BranchParams(gamma=0.8))
    broken = replace(ref, psi=ref.psi + 0.1)
    res = check_invariant_constraints(broken)
    assert res["lambda_product"] > 0.1


def test_elimination_identities_vanish():
    for branch in ALL_BRANCHES:
        for params in param_grid(branch):
            ref = reference_invariants(branch, params)
            res = check_elimination_identities(ref)
            assert max(res.values()) < 1e-10, (branch, params, res)


def test_elimination_identities_exact_rational_point():
    # 1A invariants at rational delta_plus stay rational, so the cubic
    # coefficients can be checked in exact arithmetic
    from fractions import Fraction

    dp = Fraction(5, 2)
    e1 = 1
    inv = {
        "dp": dp, "lp": Fraction(1), "psi": Fraction(1), "om": Fraction(0),
        "gp": dp + e1, "gm": dp + e1,
    }
    lp, psi, om, gp, gm = (inv["lp"], inv["psi"], inv["om"], inv["gp"],
                           inv["gm"])
    dpq = inv["dp"]
    b1 = psi * (lp ** 2 * gm * (-dpq + gp)
                + lp * psi * (dpq * gp + gm * gp - gp ** 2 + dpq * om
                              + gm * om - gp * om)
                - psi ** 2 * (gp + om) ** 2)
    b3 = (-lp ** 3 * (dpq + gm - gp)
          + lp ** 2 * psi * (gm + dpq ** 2 * gm - gp - dpq * gm * gp + 2 * om)
          + lp * psi ** 2 * (dpq + 2 * gm - 2 * gp - dpq ** 2 * gp
                             - 2 * dpq * gm * gp + dpq * gp ** 2 - om
                             - gm * gp * om + dpq * om ** 2 + gm * om ** 2
                             - gp * om ** 2)
          + psi ** 3 * (2 * dpq * gp ** 2 - 3 * om + 4 * dpq * gp * om
                        + gp ** 2 * om - dpq * om ** 2 + 2 * gp * om ** 2
                        - 2 * om ** 3))
    gam = gm - psi / lp * (gp + om)
    assert b1 == 0 and b3 == 0 and gam == 0


def test_elimination_detects_bad_gamma_minus():
    from dataclasses import replace
    ref = reference_invariants("1B", BranchParams(gamma=0.65))
    broken = replace(ref, gamma_m=ref.gamma_m + 0.2)
    res = check_elimination_identities(broken)
    assert res["cubic_a3"] > 1e-3
    assert res["gamma_minus"] > 0.1


@pytest.mark.parametrize("branch", FAMILIES)
def test_reconstruction_is_identity(branch):
    for params in param_grid(branch):
        w = make_weights(branch, params, 0.37 + 0.18j)
        inv = compute_invariants(w)
        dep = reconstruct_dependent_weights(w.a_plus, w.b_plus, w.c_plus,
                                            inv, d_sign=params.d_sign)
        pairs = [("a_minus", w.a_minus), ("b_minus", w.b_minus),
                 ("c_minus", w.c_minus), ("d", w.d), ("f", w.f),
                 ("g", w.g), ("h", w.h), ("h_tilde", w.h_tilde)]
        for key, want in pairs:
            got = dep[key]
            assert abs(got - want) <= 1e-10 * max(1.0, abs(want)), \
                (branch, params, key)


def test_reconstruction_branch2_ratios():
    p = BranchParams(epsilon1=1, epsilon2=-1)
    w = make_weights("2B", p, 0.5 + 0.1j)
    assert abs(w.a_minus / w.a_plus - 1) < 1e-14
    assert abs(w.c_minus / w.c_plus - 1) < 1e-14


def test_d_amplitude_squared_matches_closed_forms():
    # the canonical-root d must square to the closed-form branch d
    sinh, cosh, exp = np.sinh, np.cosh, np.exp
    lam = 0.41 + 0.23j
    for branch in FAMILIES:
        for params in param_grid(branch):
            e1, e2 = params.epsilon1, params.epsilon2
            gamma = effective_gamma(branch, params)
            den = sinh(lam + gamma)
            if branch == "1A":
                gb = 1j * np.pi * (1 - e1) / 4
                d_ref = sinh(gamma) * sinh(lam) / (
                    sinh(lam + gamma / 2 + gb) * den)
            elif branch == "1B":
                g0 = 1j * np.pi * e1 / 3
                d_ref = np.sqrt(sinh(gamma) * sinh(gamma - g0) + 0j) \
                    * sinh(lam) / (sinh(lam + gamma - g0) * den)
            elif branch == "2A":
                gb = 1j * np.pi * (1 - e1) / 4
                d_ref = -exp(e2 * gamma) * sinh(gamma) * sinh(lam) / (
                    cosh(lam + 3 * gamma / 2 + gb) * den)
            else:
                om = np.exp(1j * np.pi * e2 / 3)
                d_ref = e1 * e2 * om * sinh(lam) / (
                    2 * cosh(lam - 2 * gamma) * cosh(lam))
            w = make_weights(branch, params, lam)
            assert abs(w.d ** 2 - d_ref ** 2) < 1e-12 * max(1, abs(d_ref) ** 2)


def test_d_alignment_signs():
    # canonical root equals the closed form for 1A/2A/2B and its negative
    # for 1B; the alignment feeds the coupling-table sign convention
    assert branch_d_alignment("1A", BranchParams(gamma=0.8)) == 1
    assert branch_d_alignment("2A", BranchParams(gamma=0.8)) == 1
    assert branch_d_alignment("2B", BranchParams()) == 1
    assert branch_d_alignment("1B", BranchParams(gamma=0.8)) == -1
    assert branch_d_alignment("1B", BranchParams(gamma=1.2, epsilon1=-1)) == -1


def test_conic_parameterization_on_curve():
    for _ in range(10):
        gamma = RNG.uniform(0.1, 2.0)
        lam = random_lambda()
        x, y = parameterize_conic(lam, gamma)
        assert abs(conic_residual(x, y, 2 * np.cosh(gamma))) < 1e-12


def test_conic_point_values():
    assert conic_residual(1.0, 0.0, 1.7) == 0.0
    assert abs(conic_residual(2.0, 0.0, 1.7) - 3.0) < 1e-15


def test_additivity_bookkeeping():
    # invariants agree at lam1, lam2 and at the difference point
    p = BranchParams(gamma=0.66, epsilon1=-1)
    l1, l2 = 0.42 + 0.2j, -0.17 + 0.08j
    invs = [compute_invariants(make_weights("1B", p, el))
            for el in (l1, l2, l1 - l2)]
    for other in invs[1:]:
        assert inv_distance(other, invs[0]) < 1e-11


def test_pole_rejection():
    p = BranchParams(gamma=0.8)
    with pytest.raises(PoleError):
        make_weights("1A", p, -0.8)  # sinh(lam+gamma) = 0


def test_special_branch_weights_need_no_gamma():
    # 1S/2S are parameter-free points; full weight sets still come out
    for branch in ("1S", "2S"):
        for sign in (1, -1):
            p = BranchParams(epsilon1=sign)
            w = make_weights(branch, p, 0.37 + 0.12j)
            ref = reference_invariants(branch, p)
            assert inv_distance(compute_invariants(w), ref) < 1e-10


def test_degenerate_weight_error():
    w = make_weights("1A", BranchParams(gamma=0.8), 0.31)
    from dataclasses import replace
    broken = replace(w, d=0.0, d_tilde=0.0)
    with pytest.raises(DegenerateWeightError):
        compute_invariants(broken)
