"""Acceptance criteria, one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import math

import numpy as np
import pytest

from faraday_edr.edr import (
    disturbance_bias_coefficient,
    disturbance_mean,
    edr_point_at,
    square_disturbance_numeric,
)
from faraday_edr.faraday import (
    build_workspace,
    context_at,
    heisenberg_bx,
    heisenberg_bx_closed_form,
    heisenberg_sy,
    heisenberg_sy_closed_form,
)
from faraday_edr.linalg import SPIN_STATE_LABELS, expectation, sigma_x, spin_state
from faraday_edr.meter import SqueezeSpec, predicted_moments, stokes_moments
from faraday_edr.psa import PsaConfig, eps2_psa, eta2_psa, eta2_wia, eps2_wia, \
    gaussian_oracle, wia_hak_product
from faraday_edr.relations import evaluate_bounds
from faraday_edr.cli import main

from conftest import acceptance_g_grid

ALPHA2_VALUES = (2.0, 6.0, 12.0)
TAIL_TOL = 1e-12


@pytest.fixture(scope="session")
def workspaces():
    return {a2: build_workspace(math.sqrt(a2), tail_tol=TAIL_TOL) for a2 in ALPHA2_VALUES}


@pytest.fixture(scope="session")
def coherent_sweeps(workspaces):
    """criterion-1 sample set: 60 g-points per amplitude, tail_tol = 1e-12"""
    grid = acceptance_g_grid()
    return {
        a2: [edr_point_at(ws, float(g), a2, 0.0) for g in grid]
        for a2, ws in workspaces.items()
    }


def test_criterion_1_closed_form_reproduction(coherent_sweeps):
    worst = 0.0
    count = 0
    for a2, points in coherent_sweeps.items():
        for pt in points:
            assert not pt.singular
            err_e = abs(pt.eps2 - pt.eps2_analytic) / pt.eps2_analytic
            err_d = abs(pt.eta2 - pt.eta2_analytic) / pt.eta2_analytic
            worst = max(worst, err_e, err_d)
            count += 1
    assert worst <= 1e-6
    print(f"\nACCEPTANCE 1 PASS: eps2/eta2 match closed forms on {count} samples, "
          f"max rel err {worst:.3e} <= 1e-6")


def test_criterion_2_minimum_error(workspaces):
    worst = 0.0
    for a2, ws in workspaces.items():
        pt = edr_point_at(ws, math.pi / 4, a2, 0.0)
        worst = max(worst, abs(pt.eps2 - 1.0 / a2) * a2)
    assert worst <= 1e-8
    print(f"\nACCEPTANCE 2 PASS: eps2(pi/4) = 1/alpha2, max rel err {worst:.3e} <= 1e-8")


def test_criterion_3_quantum_revival(workspaces):
    worst = 0.0
    psi = spin_state("y+")
    for ws in workspaces.values():
        worst = max(worst, square_disturbance_numeric(context_at(ws, math.pi), psi))
    assert worst <= 1e-10
    print(f"\nACCEPTANCE 3 PASS: eta2(pi) <= {worst:.3e} <= 1e-10 for all alpha2")


def test_criterion_4_bch_oracle():
    worst = 0.0
    g_values = (0.1, 0.5, math.pi / 4, 1.3, math.pi / 2, 2.5, math.pi)
    for cutoff in (8, 16, 24):
        ws = build_workspace(0.0, cutoff=cutoff)
        for g in g_values:
            ctx = context_at(ws, g)
            sy_err = np.abs(heisenberg_sy(ctx).matrix
                            - heisenberg_sy_closed_form(ctx).matrix).max()
            bx_err = np.abs(heisenberg_bx(ctx).matrix
                            - heisenberg_bx_closed_form(ctx).matrix).max()
            worst = max(worst, float(sy_err), float(bx_err))
    assert worst <= 1e-10
    print(f"\nACCEPTANCE 4 PASS: spectral evolution = closed forms, "
          f"max entry err {worst:.3e} <= 1e-10")


def test_criterion_5_unbiasedness(coherent_sweeps, workspaces):
    worst_noise = max(pt.bias_noise for pts in coherent_sweeps.values() for pt in pts
                      if not pt.singular)
    assert worst_noise <= 1e-10

    worst_bias = 0.0
    ws = workspaces[6.0]
    sx = sigma_x()
    for g in acceptance_g_grid()[::6]:
        ctx = context_at(ws, float(g))
        coef = disturbance_bias_coefficient(float(g), 6.0)
        for label in SPIN_STATE_LABELS:
            psi = spin_state(label)
            expected = expectation(sx, psi).real * coef
            worst_bias = max(worst_bias, abs(disturbance_mean(ctx, psi) - expected))
    assert worst_bias <= 1e-8
    print(f"\nACCEPTANCE 5 PASS: |<N>| <= {worst_noise:.3e} (tol 1e-10); disturbance "
          f"bias law err {worst_bias:.3e} <= 1e-8")


def test_criterion_6_squeezed_moments():
    worst_vz = worst_mx = worst_vy = 0.0
    for alpha2, r in ((9.0, 0.3), (25.0, 0.2)):
        ws = build_workspace(math.sqrt(alpha2), SqueezeSpec(r), tail_tol=TAIL_TOL)
        mom = stokes_moments(ws.meter_state, ws.stokes)
        pred = predicted_moments(alpha2, r)
        worst_vz = max(worst_vz, abs(mom.var_sz - pred.var_sz) / pred.var_sz)
        worst_mx = max(worst_mx, abs(mom.mean_sx - alpha2) / alpha2)
        # the numerically verified Sy-variance formula: alpha2 e^{-2r} + sinh^2(2r)
        worst_vy = max(worst_vy, abs(mom.var_sy - pred.var_sy) / pred.var_sy)
    assert worst_vz <= 1e-4
    assert worst_mx <= 1e-8
    assert worst_vy <= 1e-4
    print(f"\nACCEPTANCE 6 PASS: var_Sz rel err {worst_vz:.3e} <= 1e-4, <Sx> rel err "
          f"{worst_mx:.3e} <= 1e-8; Sy variance follows alpha2*e^(-2r)+sinh^2(2r) "
          f"(rel err {worst_vy:.3e})")


def test_criterion_7_psa_quadrature_oracle():
    worst = 0.0
    for sigma in np.linspace(0.5, 2.0, 10):
        for galpha in np.linspace(0.05, 1.0, 10):
            cfg = PsaConfig(g=float(galpha), alpha_mag=1.0, sigma=float(sigma))
            mom = gaussian_oracle(cfg)
            chi2 = cfg.chi * cfg.chi
            worst = max(worst,
                        abs(mom.q2_mean - sigma ** 2) / sigma ** 2,
                        abs(mom.cos_mean - math.exp(-2.0 * chi2)) / math.exp(-2.0 * chi2))
    assert worst <= 1e-9
    print(f"\nACCEPTANCE 7 PASS: quadrature matches closed forms on the 10x10 grid, "
          f"max rel err {worst:.3e} <= 1e-9")


def test_criterion_8_uncertainty_relation_claims(coherent_sweeps, workspaces):
    min_bot = math.inf
    min_ozawa = math.inf
    hak_values = []
    for points in coherent_sweeps.values():
        for pt in points:
            rec = evaluate_bounds(pt.eps2, pt.eta2, pt.sigma_a, pt.sigma_b, pt.c_ab)
            min_bot = min(min_bot, rec.bot_lhs)
            min_ozawa = min(min_ozawa, rec.ozawa_lhs)
            hak_values.append(rec.hak)
    # the criterion-7 psa grid, expressed through chi
    for sigma in np.linspace(0.5, 2.0, 10):
        for galpha in np.linspace(0.05, 1.0, 10):
            chi = float(galpha / sigma)
            rec = evaluate_bounds(eps2_psa(chi), eta2_psa(chi))
            min_bot = min(min_bot, rec.bot_lhs)
            min_ozawa = min(min_ozawa, rec.ozawa_lhs)
            hak_values.append(rec.hak)
    assert min_bot >= 1.0 - 1e-9
    assert min_ozawa >= 1.0 - 1e-9
    assert any(h < 1.0 for h in hak_values)  # HAK violation exists

    # the headline sample, evaluated exactly at g = pi/4
    pt = edr_point_at(workspaces[6.0], math.pi / 4, 6.0, 0.0)
    hak_quarter = evaluate_bounds(pt.eps2, pt.eta2).hak
    assert abs(hak_quarter - 0.332507) <= 1e-5

    import warnings

    from faraday_edr.psa import WiaValidityWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WiaValidityWarning)
        for chi in np.linspace(0.05, 2.0, 50):
            rec = evaluate_bounds(eps2_wia(float(chi)), eta2_wia(float(chi)),
                                  hak_value=wia_hak_product())
            assert rec.hak == 1.0
    print(f"\nACCEPTANCE 8 PASS: bot_lhs >= 1 - 1e-9 (min {min_bot:.9f}), Ozawa >= 1 "
          f"(min {min_ozawa:.6f}), HAK violated on {sum(h < 1 for h in hak_values)} "
          f"samples incl. hak(pi/4, 6) = {hak_quarter:.6f}, WIA hak = 1 exactly")


def test_criterion_9_determinism(tmp_path):
    pairs = []
    for name, args in (
        ("g", ["sweep-g", "--alpha2", "6", "--steps", "30", "--start", "0.05",
               "--stop", "pi"]),
        ("chi", ["sweep-chi", "--model", "psa", "--steps", "30", "--start", "0.05",
                 "--stop", "2.0"]),
    ):
        a, b = tmp_path / f"{name}_a.csv", tmp_path / f"{name}_b.csv"
        assert main(args + ["-o", str(a)]) == 0
        assert main(args + ["-o", str(b)]) == 0
        pairs.append((a.read_bytes(), b.read_bytes()))
    assert all(x == y for x, y in pairs)
    print("\nACCEPTANCE 9 PASS: repeated sweep invocations are byte-identical")