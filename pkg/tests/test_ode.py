"""Normal form extraction, the affine pullback oracle, solution transport."""

from fractions import Fraction

import pytest

from odecubic import (AffineMap, NormalizeError, Probe, evaluate,
                      is_identically_zero, normalize_to_cubic, ode_equal,
                      parse_expression, pullback_affine)
from odecubic.expr import sub
from odecubic.ode import OdeCubic, swap_xy

PR = Probe()


def expr_equal(a, b, probe=PR):
    return is_identically_zero(sub(a, parse_expression(b)), probe)


class TestNormalize:
    def test_explicit_polynomial(self):
        ode = normalize_to_cubic("y'' = 6*y^2")
        assert expr_equal(ode.P, "6*y^2")
        for c in (ode.Q, ode.R, ode.S):
            assert is_identically_zero(c, PR)

    def test_implicit_with_parameter(self):
        ode = normalize_to_cubic("y*y'' + a*(y'^2 + 1) = 0", {"a": Fraction(2)})
        assert expr_equal(ode.P, "-2/y")
        assert is_identically_zero(ode.Q, PR)
        assert expr_equal(ode.R, "-2/(3*y)")
        assert is_identically_zero(ode.S, PR)

    def test_mixed_slope_terms(self):
        ode = normalize_to_cubic("y'' = y'/y - y'^2/y")
        assert is_identically_zero(ode.P, PR)
        assert expr_equal(ode.Q, "1/(3*y)")
        assert expr_equal(ode.R, "-1/(3*y)")
        assert is_identically_zero(ode.S, PR)

    def test_y_prime_alias(self):
        via_alias = normalize_to_cubic("y'' = y'*y")
        via_p = normalize_to_cubic("y'' = p*y")
        assert ode_equal(via_alias, via_p, PR)

    def test_not_linear_in_second_derivative(self):
        with pytest.raises(NormalizeError) as err:
            normalize_to_cubic("y''^2 = y")
        assert err.value.code == "not-linear-in-ypp"

    def test_degree_exceeds_three(self):
        with pytest.raises(NormalizeError) as err:
            normalize_to_cubic("y'' = y'^4")
        assert err.value.code == "degree-in-p-exceeds-3"

    def test_residual_dependence(self):
        with pytest.raises(NormalizeError) as err:
            normalize_to_cubic("y'' = exp(y')")
        assert err.value.code == "residual-p-dependence"
        with pytest.raises(NormalizeError) as err:
            normalize_to_cubic("y'' = 1/(1 + y')")
        assert err.value.code == "residual-p-dependence"

    def test_vanishing_leading_coefficient(self):
        with pytest.raises(NormalizeError) as err:
            normalize_to_cubic("0*y'' + y = 0")
        assert err.value.code == "leading-coefficient-identically-zero"
        with pytest.raises(NormalizeError):
            normalize_to_cubic("(x - x)*y'' = y")

    def test_unbound_parameter_rejected(self):
        from odecubic import ParseError
        with pytest.raises(ParseError):
            normalize_to_cubic("y'' = a*y^3")

    def test_print_normalize_round_trip(self):
        for eq in ("y'' = 6*y^2", "y'' = y'/y - y'^2/y",
                   "2*y*y'' - y'^2 + 1 = 0"):
            ode = normalize_to_cubic(eq)
            again = normalize_to_cubic(str(ode))
            assert ode_equal(ode, again, PR)


class TestAffinePullback:
    def test_identity(self):
        ode = normalize_to_cubic("y'' = y^3 + 3*y*y' - y'^3")
        assert ode_equal(pullback_affine(ode, AffineMap()), ode, PR)

    def test_linear_family_is_closed(self):
        ode = normalize_to_cubic("y'' = 0")
        mapped = pullback_affine(ode, AffineMap(alpha=Fraction(1, 2), beta=1,
                                                gamma=3, delta=1))
        for c in mapped.coefficients():
            assert is_identically_zero(c, PR)

    def test_doubling_y_quarters_cube(self):
        ode = normalize_to_cubic("y'' = y^3")
        mapped = pullback_affine(ode, AffineMap(gamma=2))
        assert expr_equal(mapped.P, "y^3/4")

    def test_invertibility_required(self):
        with pytest.raises(ValueError):
            AffineMap(alpha=0)

    def test_round_trip_through_inverse(self):
        ode = normalize_to_cubic("y'' = y^2/2 + x*y")
        m = AffineMap(alpha=3, beta=1, gamma=Fraction(1, 2), delta=1)
        inv = AffineMap(alpha=Fraction(1, 3), beta=Fraction(-1, 3),
                        gamma=2, delta=-2)
        assert ode_equal(pullback_affine(pullback_affine(ode, m), inv), ode, PR)


def _rk4_trajectory(ode: OdeCubic, x0, y0, yp0, h, steps):
    """Integrate y'' = P + 3Qp + 3Rp^2 + Sp^3 as a first-order system."""
    def rhs(x, y, p):
        vals = [evaluate(c, (x, y)) for c in ode.coefficients()]
        return vals[0] + 3 * vals[1] * p + 3 * vals[2] * p * p + vals[3] * p ** 3

    xs, ys, ps = [x0], [y0], [yp0]
    x, y, p = x0, y0, yp0
    for _ in range(steps):
        k1y, k1p = p, rhs(x, y, p)
        k2y, k2p = p + h / 2 * k1p, rhs(x + h / 2, y + h / 2 * k1y, p + h / 2 * k1p)
        k3y, k3p = p + h / 2 * k2p, rhs(x + h / 2, y + h / 2 * k2y, p + h / 2 * k2p)
        k4y, k4p = p + h * k3p, rhs(x + h, y + h * k3y, p + h * k3p)
        y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        x += h
        xs.append(x)
        ys.append(y)
        ps.append(p)
    return xs, ys, ps


@pytest.mark.parametrize("equation", [
    "y'' = 6*y^2",                            # P only
    "y'' = y^3",
    "y'' = y'/y - y'^2/y",                    # Q and R
    "y'' = exp(y)",
    "2*x*y'' + y'^3 + y' = 0",                # Q and S
    "y'' = -3*y^3/4 - 3*y*y' - y'^2/y",       # P, Q, R
])
def test_pullback_solution_transport(equation):
    """A mapped solution of the original equation satisfies the pulled-back
    equation to finite-difference accuracy."""
    ode = normalize_to_cubic(equation)
    m = AffineMap(alpha=2, beta=1, gamma=Fraction(1, 2), delta=1)
    mapped = pullback_affine(ode, m)
    # step chosen so the mapped grid has the 1e-3 spacing the residual
    # tolerance is calibrated for
    h = 5e-4
    xs, ys, _ = _rk4_trajectory(ode, 1.0, 1.1, 0.2, h, 100)
    xt = [float(m.alpha) * x + float(m.beta) for x in xs]
    yt = [float(m.gamma) * y + float(m.delta) for y in ys]
    ht = float(m.alpha) * h
    worst = 0.0
    for i in range(1, len(xt) - 1):
        d1 = (yt[i + 1] - yt[i - 1]) / (2 * ht)
        d2 = (yt[i + 1] - 2 * yt[i] + yt[i - 1]) / (ht * ht)
        vals = [evaluate(c, (xt[i], yt[i])) for c in mapped.coefficients()]
        rhs = vals[0] + 3 * vals[1] * d1 + 3 * vals[2] * d1 ** 2 + vals[3] * d1 ** 3
        worst = max(worst, abs(d2 - rhs))
    assert worst < 1e-5


def test_swap_is_involutive():
    ode = normalize_to_cubic("y'' = y^2/2 + x*y + 3*y'*x")
    assert ode_equal(swap_xy(swap_xy(ode)), ode, PR)
