import numpy as np
import pytest

from symlab import (
    counting_compare,
    eval_Q,
    gen_spectrum,
    hp_error_order,
    jacobi_perron,
    multi_index,
    orthogonality_second_kind,
    orthogonality_with_psi_zeros,
    psi_zeros,
    ratio_rate,
    second_kind_scale,
    solve_branches,
    strong_limit_check,
    widom_psi,
    widom_psi_scaled,
    zeros_Q,
    bnk,
)
from symlab.asymptotics import ToeplitzSection
from symlab.errors import TailDivergence

PROBES = [10 + 5j, -20 + 3j, 2 - 8j, -9 - 2j]


def test_widom_l0_is_Q(can, cheb):
    for sym in (can, cheb):
        for n in (0, 1, 5, 12, 20):
            for lam in PROBES:
                got = widom_psi(sym, n, 0, lam)
                want = eval_Q(sym, n, lam)
                assert got == pytest.approx(want, rel=1e-9)


def test_widom_top_level_closed_form(can):
    # at l = p the sum collapses to a single branch power
    for n in (2, 4, 8):
        for lam in PROBES:
            z2 = solve_branches(can, lam).z[2]
            want = -1.0 / (3.0 * z2 ** (n + 1))
            assert widom_psi(can, n, 2, lam) == pytest.approx(want, rel=1e-12)


def test_widom_scaled_finite_at_large_n(can):
    # the scaled variant divides out the geometric factor so it stays O(1)
    lam = 10 + 5j
    vals = [abs(widom_psi_scaled(can, n, 1, lam)) for n in (10, 40, 160)]
    assert max(vals) < 1e3 and min(vals) > 1e-3


def test_strong_limit(can):
    res = strong_limit_check(can, 0, 10 + 5j, range(1, 8))
    assert res.deviation < 1e-8
    assert res.values.shape == (7,)
    assert res.limit == pytest.approx(0.07989193500965129 - 0.0515630574997816j, rel=1e-9)


def test_hp_error_orders(can):
    grid = np.geomspace(1e3, 1e6, 10)
    for n in (4, 7):
        comps = multi_index(n, 2).components
        for j in (1, 2):
            slope = hp_error_order(can, n, j, grid)
            assert slope == pytest.approx(-(comps[j - 1] + 1), abs=0.05)


def test_ratio_rate_bounded_by_phi(can, can_struct):
    from symlab import conformal_map

    probe = 10 + 5j
    rate = ratio_rate(can, 2, [probe], 40)
    assert rate[0] <= abs(conformal_map(can_struct.cut(1), probe)) + 0.02


def test_psi_zeros_frozen(can, can_sys):
    zs6 = psi_zeros(can, can_sys, 6)
    np.testing.assert_allclose(
        zs6, [-81.68703885, -10.28337883, -5.57126475], atol=1e-6
    )
    zs10 = psi_zeros(can, can_sys, 10)
    assert zs10.size == 5
    np.testing.assert_allclose(
        zs10,
        [-200.78601193, -23.081499, -9.36969971, -6.1145826, -5.18987352],
        atol=1e-6,
    )


def test_psi_zeros_count_matches_tail_index(can, can_sys):
    for n in (6, 8, 12):
        want = sum(multi_index(n, 2).components[1:])
        assert psi_zeros(can, can_sys, n).size == want


def test_gen_spectrum_k0_is_zeros(can):
    rep = gen_spectrum(can, 6, 0)
    np.testing.assert_array_equal(rep.roots, zeros_Q(can, 6))
    assert rep.k == 0 and rep.n == 6


def test_gen_spectrum_k1_frozen(can, can_struct, can_sys):
    rep = gen_spectrum(can, 10, 1, struct=can_struct, sys=can_sys)
    np.testing.assert_allclose(
        rep.roots, [-42.21537375, -11.6480291, -6.55574882, -5.25703881], atol=1e-6
    )
    assert rep.hausdorff_to_cut == pytest.approx(15.2606823, abs=1e-5)


def test_gen_spectrum_k1_count_and_interlace(can, can_struct, can_sys):
    for n in (10, 12):
        rep = gen_spectrum(can, n, 1, struct=can_struct, sys=can_sys)
        want = sum(multi_index(n, 2).components[1:]) - 1
        assert rep.roots.size == want
        zs = psi_zeros(can, can_sys, n, struct=can_struct)
        # each root sits strictly between consecutive second-kind zeros
        for i, r in enumerate(rep.roots):
            assert zs[i] < r < zs[i + 1]


def test_first_shifted_section_is_constant(can):
    # the 1x1 shifted section is the entry a_1, so P_{2,1} has no roots
    sec = ToeplitzSection(n=1, k=1, sym=can)
    assert sec.det(-10.0) == pytest.approx(7.0)
    assert sec.det(-30.0) == pytest.approx(7.0)


def test_section_determinant_complex(can):
    sec = ToeplitzSection(n=4, k=1, sym=can)
    v = sec.det(-12.0 + 1.0j)
    assert isinstance(v, complex) and abs(v.imag) > 0


def test_bnk_proportional_to_section(can, can_sys):
    # B_{n,1} = c * P_{n,1} with c = -integral of mu_1 = -1, fixed sign
    # convention checked through the ratio
    for n in (2, 4, 6):
        sec = ToeplitzSection(n=n - 1, k=1, sym=can)
        vals = []
        for lam in (-12.0, -30.0, -7.5):
            vals.append(bnk(can, can_sys, n, 1, lam) / sec.det(lam))
        vals = np.asarray(vals)
        np.testing.assert_allclose(vals, 1.0, rtol=1e-9)


def test_orthogonality_second_kind_small(can, can_sys):
    # integrals against the flat second-cut weight die for low powers
    for nu in (0, 1):
        resid = orthogonality_second_kind(can, can_sys, 6, 1, 2, nu)
        scale = second_kind_scale(can, can_sys, 6, 1, 2, nu)
        assert resid < 1e-9 * scale


def test_orthogonality_second_kind_tail_divergence(can, can_sys):
    # at the balanced index the nu = n_2 probe integrand genuinely
    # diverges at infinity; the error is the contract, not a fallback
    with pytest.raises(TailDivergence):
        orthogonality_second_kind(can, can_sys, 6, 1, 2, 3)


def test_orthogonality_with_psi_zeros(can, can_sys):
    for nu in range(3):
        resid, scale = orthogonality_with_psi_zeros(can, can_sys, 6, nu)
        assert resid < 1e-10 * scale


def test_counting_compare_frozen(cheb):
    rep = gen_spectrum(cheb, 60, 0)
    assert counting_compare(rep, cheb) == pytest.approx(0.01642531, abs=1e-6)


def test_counting_compare_decreases(cheb):
    d20 = counting_compare(gen_spectrum(cheb, 20, 0), cheb)
    d60 = counting_compare(gen_spectrum(cheb, 60, 0), cheb)
    assert d60 < d20


def test_jacobi_perron_matches_branch_powers(can):
    for lam in (10 + 5j, -30 + 2j):
        z0 = solve_branches(can, lam).z[0]
        got = jacobi_perron(can, lam, 80)
        assert got[0] == pytest.approx(z0, rel=1e-9)
        assert got[1] == pytest.approx(z0 * z0, rel=1e-9)
