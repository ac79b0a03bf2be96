import numpy as np
import pytest

from nonlocal_lwr import (
    DomainError,
    check_assumption4,
    check_assumption5,
    flux_from_name,
)

ALL_FLUXES = [("lf", 2.0), ("godunov", 2.0), ("mlf", 2.0)]


def finite_difference_partials(flux, point, step=1e-6):
    out = []
    for i in range(4):
        hi = list(point)
        lo = list(point)
        hi[i] += step
        lo[i] -= step
        out.append((flux.eval(*hi) - flux.eval(*lo)) / (2.0 * step))
    return out


def test_eval_godunov_example():
    g = flux_from_name("godunov")
    assert g.eval(0.5, 0.9, 0.1, 0.2) == pytest.approx(0.4, abs=1e-15)


@pytest.mark.parametrize("name,alpha", ALL_FLUXES)
def test_eval_consistency_point(name, alpha):
    f = flux_from_name(name, alpha)
    assert f.eval(0.4, 0.4, 0.4, 0.4) == pytest.approx(0.24, abs=1e-15)


def test_eval_lf_hand_value():
    f = flux_from_name("lf", 2.0)
    assert f.eval(0.1, 0.6, 0.2, 0.5) == pytest.approx(-0.31, abs=1e-15)


def test_partials_godunov():
    f = flux_from_name("godunov")
    th = f.partials(0.3, 0.9, 0.2, 0.7)
    assert (th.theta1, th.theta2, th.theta3, th.theta4) == pytest.approx((0.3, 0.0, 0.0, -0.3))
    fd = finite_difference_partials(f, (0.3, 0.9, 0.2, 0.7))
    assert fd == pytest.approx([1.0 - 0.7, 0.0, 0.0, -0.3], abs=1e-9)


def test_partials_lf_at_origin():
    th = flux_from_name("lf", 2.0).partials(0.0, 0.0, 0.0, 0.0)
    assert (th.theta1, th.theta2, th.theta3, th.theta4) == (1.5, -0.5, 0.0, 0.0)


def test_partials_mlf():
    th = flux_from_name("mlf", 2.0).partials(0.3, 0.5, 0.1, 0.4)
    assert th.theta3 == 0.0
    assert th.theta4 == pytest.approx(-0.4, abs=1e-15)


@pytest.mark.parametrize("name,alpha", ALL_FLUXES)
def test_partials_match_finite_differences_everywhere(name, alpha):
    f = flux_from_name(name, alpha)
    rng = np.random.default_rng(11)
    for point in rng.random((1000, 4)):
        analytic = np.array(f.partials(*point).as_tuple(), dtype=float)
        numeric = np.array(finite_difference_partials(f, point))
        scale = np.maximum(1.0, np.abs(analytic))
        assert np.all(np.abs(analytic - numeric) <= 1e-8 * scale)


@pytest.mark.parametrize("name,alpha", ALL_FLUXES)
def test_quadratic_reconstruction_from_gamma(name, alpha):
    # Second-order expansion from any base point reproduces eval exactly.
    f = flux_from_name(name, alpha)
    gamma = f.gamma
    rng = np.random.default_rng(3)
    for _ in range(200):
        base = rng.random(4)
        x = rng.random(4)
        d = x - base
        grad = np.array(f.partials(*base).as_tuple(), dtype=float)
        taylor = f.eval(*base) + grad @ d + 0.5 * d @ gamma @ d
        assert taylor == pytest.approx(f.eval(*x), abs=1e-12)


@pytest.mark.parametrize("name,alpha", ALL_FLUXES)
def test_third_differences_vanish(name, alpha):
    f = flux_from_name(name, alpha)
    rng = np.random.default_rng(5)
    for _ in range(100):
        base = rng.random(4)
        direction = rng.random(4) - 0.5
        vals = [f.eval(*(base + t * direction)) for t in range(4)]
        third = vals[3] - 3.0 * vals[2] + 3.0 * vals[1] - vals[0]
        assert abs(third) <= 1e-12


@pytest.mark.parametrize("name,alpha", ALL_FLUXES)
def test_consistency_identity_on_grid(name, alpha):
    f = flux_from_name(name, alpha)
    for r in np.linspace(0.0, 1.0, 21):
        for q in np.linspace(0.0, 1.0, 21):
            assert abs(f.eval(r, r, q, q) - r * (1.0 - q)) <= 1e-14


@pytest.mark.parametrize("name,alpha", ALL_FLUXES)
def test_gamma_structure(name, alpha):
    g = flux_from_name(name, alpha).gamma
    assert g[0, 0] == g[0, 1] == g[1, 1] == 0.0
    assert g[2, 2] == g[2, 3] == g[3, 3] == 0.0
    cross = [g[0, 2], g[1, 2], g[0, 3], g[1, 3]]
    assert all(c <= 0.0 for c in cross)
    assert sum(cross) == -1.0
    np.testing.assert_array_equal(g, g.T)


@pytest.mark.parametrize("name,alpha", ALL_FLUXES)
def test_local_restriction_is_monotone(name, alpha):
    # With q identified with rho, the two-point flux is monotone:
    # nondecreasing in rho_L, nonincreasing in rho_R.
    f = flux_from_name(name, alpha)
    for rl in (0.0, 1.0):
        for rr in (0.0, 1.0):
            th = f.partials(rl, rr, rl, rr)
            assert th.theta1 + th.theta3 >= -1e-15
            assert th.theta2 + th.theta4 <= 1e-15


@pytest.mark.parametrize("name,alpha", ALL_FLUXES)
def test_assumption4_passes_for_reference_fluxes(name, alpha):
    report = check_assumption4(flux_from_name(name, alpha))
    assert report.ok, report.failed()


def test_assumption4_flags_small_viscosity():
    report = check_assumption4(flux_from_name("lf", 0.5))
    failed = {c.name for c in report.failed()}
    assert "theta2_nonpos" in failed
    witnesses = [c.witness for c in report.failed() if c.name == "theta2_nonpos"]
    assert witnesses[0] is not None and witnesses[0][3] == 0.0  # q_R = 0 witness


def test_assumption4_flags_viscosity_below_two():
    report = check_assumption4(flux_from_name("lf", 1.5))
    assert not report.ok
    report = check_assumption4(flux_from_name("mlf", 1.5))
    assert not report.ok


def test_assumption5_examples():
    assert check_assumption5(flux_from_name("lf", 2.0), 0.25) == (True, 0.125)
    assert check_assumption5(flux_from_name("godunov"), 0.25) == (True, 0.5)
    ok, margin = check_assumption5(flux_from_name("lf", 2.0), 2.0 / 7.0)
    assert not ok
    assert margin == pytest.approx(0.0, abs=1e-15)


def test_assumption5_sup_norms_match_grid_sampling():
    rng = np.random.default_rng(13)
    pts = rng.random((4000, 4))
    for name, alpha in ALL_FLUXES:
        f = flux_from_name(name, alpha)
        sampled = np.zeros(4)
        for p in pts:
            sampled = np.maximum(sampled, np.abs(np.array(f.partials(*p).as_tuple(), dtype=float)))
        sup = np.array(f.theta_sup_norms())
        assert np.all(sup >= sampled - 1e-12)
        assert np.all(sup <= sampled + 0.05)  # affine partials: corners dominate


def test_mlf_margin():
    assert check_assumption5(flux_from_name("mlf", 2.0), 0.25) == (True, 0.125)


def test_negative_viscosity_rejected():
    with pytest.raises(DomainError):
        flux_from_name("lf", -0.1)
    with pytest.raises(DomainError):
        flux_from_name("roe")


def test_theta_separation():
    # theta1/theta2 depend only on (q_L, q_R); theta3/theta4 only on (rho_L, rho_R).
    rng = np.random.default_rng(17)
    for name, alpha in ALL_FLUXES:
        f = flux_from_name(name, alpha)
        for _ in range(50):
            rl, rr, ql, qr = rng.random(4)
            rl2, rr2, ql2, qr2 = rng.random(4)
            a = f.partials(rl, rr, ql, qr)
            b = f.partials(rl2, rr2, ql, qr)
            assert (a.theta1, a.theta2) == (b.theta1, b.theta2)
            c = f.partials(rl, rr, ql2, qr2)
            assert (a.theta3, a.theta4) == (c.theta3, c.theta4)
