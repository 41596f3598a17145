import numpy as np
import pytest

from holomaplab import (
    DomainSpec,
    DurenRudin,
    Harris,
    Henon,
    Identity,
    Linear,
    MembershipCertificate,
    NewtonConfig,
    NotFound,
    dilate,
    evaluate,
    inscribed_lower_bound,
    landau_estimate,
    parse,
    rescaled_growth,
    solve_membership,
)
from holomaplab.errors import CenterNotInImage

BALL2 = DomainSpec.ball(2, 1.0)
POLY2 = DomainSpec.polydisc(2, 1.0)
CFG = NewtonConfig(tolerance=1e-8, domain_margin_min=1e-4, rng_seed=5)


def random_unitary(rng):
    q, r = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestSolveMembership:
    def test_identity(self):
        cert = solve_membership(Identity(2), [0.3, 0.4], BALL2, CFG)
        assert isinstance(cert, MembershipCertificate)
        assert np.allclose(cert.preimage, [0.3, 0.4], atol=1e-12)
        assert cert.residual <= CFG.tolerance

    def test_henon_origin_fixed(self):
        cert = solve_membership(Henon(0.5), [0, 0], BALL2, CFG)
        assert np.allclose(cert.preimage, [0, 0], atol=1e-10)

    def test_henon_inverse_of_eval_example(self):
        cert = solve_membership(Henon(0.5), [0.09, 0.2], BALL2, CFG)
        assert np.allclose(cert.preimage, [0.2, 0.1], atol=1e-8)

    def test_target_outside_image_not_found(self):
        missing = solve_membership(Identity(2), [2.0, 0.0], BALL2, CFG)
        assert isinstance(missing, NotFound)

    def test_continuation_from_known_pair(self):
        m = parse("compose(henon(b=0.5), expcoord(c=0.1, k=2))")
        b0 = evaluate(m, [0.3, 0.2])
        b1 = evaluate(m, [0.32, 0.21])
        cert = solve_membership(m, b1, BALL2, CFG, known=[(b0, np.array([0.3, 0.2]))])
        assert isinstance(cert, MembershipCertificate)
        assert np.allclose(cert.preimage, [0.32, 0.21], atol=1e-6)


class TestInscribedLowerBound:
    def test_identity_ball(self):
        est = inscribed_lower_bound(Identity(2), np.zeros(2), BALL2, CFG,
                                    direction_count=64, growth_factor=1.01)
        assert est.r_lo >= 0.99
        assert est.r_lo < 1.0
        assert est.r_lo <= est.r_hi
        assert est.directions_tested == 64

    def test_linear_sigma_min(self):
        est = inscribed_lower_bound(Linear(np.diag([2.0, 0.5])), np.zeros(2), BALL2, CFG,
                                    direction_count=256, growth_factor=1.01)
        assert abs(est.r_lo - 0.5) <= 0.01

    def test_durenrudin_bounded_by_delta(self):
        est = inscribed_lower_bound(DurenRudin(1.0), np.zeros(2), POLY2, CFG,
                                    direction_count=128, growth_factor=1.02)
        assert est.r_lo <= 1.0

    def test_certificates_reverify(self):
        m = parse("compose(henon(b=0.5), expcoord(c=0.1, k=2))")
        center = evaluate(m, np.zeros(2))
        est = inscribed_lower_bound(m, center, BALL2, CFG,
                                    direction_count=32, growth_factor=1.05)
        assert est.certificates
        for cert in est.certificates:
            residual = np.linalg.norm(evaluate(m, cert.preimage) - cert.target)
            assert residual <= CFG.tolerance
            assert BALL2.margin(cert.preimage) >= CFG.domain_margin_min
            assert np.linalg.norm(cert.target - est.center) <= est.r_lo + 1e-12

    def test_center_not_in_image(self):
        with pytest.raises(CenterNotInImage):
            inscribed_lower_bound(Identity(2), np.array([5.0, 0.0]), BALL2, CFG,
                                  direction_count=16)

    def test_shell_history_is_monotone_prefix(self):
        est = inscribed_lower_bound(Identity(2), np.zeros(2), BALL2, CFG,
                                    direction_count=32, growth_factor=1.05)
        flags = [ok for _, ok in est.shell_history]
        assert all(flags[:-1])
        assert flags[-1] is False or est.r_hi == np.inf


class TestLandauEstimate:
    def test_identity(self):
        est = landau_estimate(Identity(2), BALL2, CFG, center_candidates=1,
                              direction_count=64, growth_factor=1.01,
                              center_refine_steps=0)
        assert est.r_lo >= 0.99
        assert est.r_hi_label == "heuristic"

    def test_linear_sigma_min_within_two_percent(self):
        rng = np.random.default_rng(77)
        for _ in range(3):
            smax = 0.5 + rng.random()
            s = np.array([smax, smax / (1 + 60 * rng.random())])
            A = random_unitary(rng) @ np.diag(s) @ random_unitary(rng).conj().T
            smin = np.linalg.svd(A, compute_uv=False)[-1]
            est = landau_estimate(Linear(A), BALL2, CFG, center_candidates=1,
                                  direction_count=256, growth_factor=1.01,
                                  center_refine_steps=0)
            assert abs(est.r_lo - smin) <= 0.02 * smin

    def test_harris_bounded_and_certified(self):
        est = landau_estimate(Harris(3), POLY2, CFG, center_candidates=3,
                              direction_count=128, growth_factor=1.02,
                              center_refine_steps=1)
        assert est.r_lo <= np.sqrt(2.0 / 3.0) + 0.05
        assert est.r_hi == pytest.approx(np.sqrt(2.0 / 3.0), rel=1e-12)
        assert est.r_hi_label == "certified"
        assert est.r_lo <= est.r_hi

    def test_durenrudin_certified_upper_bound(self):
        est = landau_estimate(DurenRudin(1.0), POLY2, CFG, center_candidates=2,
                              direction_count=96, growth_factor=1.02,
                              center_refine_steps=0)
        assert est.r_hi == 1.0
        assert est.r_hi_label == "certified"
        assert est.r_lo <= 1.0

    def test_more_directions_never_loosen_the_bound(self):
        # each radius must certify for every direction, so enlarging the
        # (prefix-stable) direction set can only tighten r_lo
        A = Linear(np.diag([2.0, 0.5]))
        kwargs = dict(center_candidates=1, growth_factor=1.02, center_refine_steps=0)
        r64 = landau_estimate(A, BALL2, CFG, direction_count=64, **kwargs).r_lo
        r128 = landau_estimate(A, BALL2, CFG, direction_count=128, **kwargs).r_lo
        assert r128 <= r64 * (1 + 1e-12)

    def test_more_centers_never_shrink_the_bound(self):
        m = parse("expcoord(c=0.4, k=2)")
        kwargs = dict(direction_count=64, growth_factor=1.02, center_refine_steps=0)
        r1 = landau_estimate(m, BALL2, CFG, center_candidates=1, **kwargs).r_lo
        r4 = landau_estimate(m, BALL2, CFG, center_candidates=4, **kwargs).r_lo
        assert r4 >= r1


class TestRescaledGrowth:
    def test_identity_linear_growth(self):
        series = rescaled_growth(Identity(2), [1, 2, 4], CFG, center_candidates=1,
                                 direction_count=64, growth_factor=1.005)
        for R, value in series:
            assert value == pytest.approx(R, rel=0.01)

    def test_linear_sigma_scaling(self):
        series = rescaled_growth(Linear(np.diag([2.0, 0.5])), [1, 2], CFG,
                                 center_candidates=1, direction_count=128,
                                 growth_factor=1.01)
        assert series[0][1] == pytest.approx(0.5, rel=0.02)
        assert series[1][1] == pytest.approx(1.0, rel=0.02)

    def test_expcoord_series_nondecreasing(self):
        series = rescaled_growth(parse("expcoord(c=0.1, k=2)"), [1, 2], CFG,
                                 center_candidates=1, direction_count=64,
                                 growth_factor=1.01)
        values = [v for _, v in series]
        assert values[0] <= values[1]

    def test_dilate_consistency(self):
        # the series value at R equals R times the unit-ball estimate of dilate(m, R)
        m = Identity(2)
        series = rescaled_growth(m, [2], CFG, center_candidates=1,
                                 direction_count=32, growth_factor=1.05)
        est = landau_estimate(dilate(m, 2.0), BALL2, CFG, center_candidates=1,
                              direction_count=32, growth_factor=1.05,
                              center_refine_steps=1)
        assert series[0][1] == pytest.approx(2.0 * est.r_lo, rel=1e-12)
