"""Closed-form solution families for the two worked systems, and the
classical-limit reference they collapse to.

The four-coordinate system (right-derivative form of the second example
Lagrangian) decouples triangularly:

    D_a^alpha q^2 = 0          ->  q^2 = C1 (t-a)^(alpha-1)
    D_a^alpha q^4 = -q^2       ->  q^4 = C2 (t-a)^(alpha-1) - C1 G(a)/G(2a) (t-a)^(2 alpha - 1)
    D_b^alpha q^3 = q^4        ->  q^3 = C3 (b-t)^(alpha-1) + I_b^alpha q^4
    D_b^alpha q^1 = -q^3       ->  q^1 = C4 (b-t)^(alpha-1) - I_b^alpha q^3

where I_b^alpha is the right fractional integral.  The q^4 coefficient comes
from closing the convolution of two left kernels with the Beta identity
B(alpha, alpha) / Gamma(alpha) = Gamma(alpha) / Gamma(2 alpha), which keeps
q^2 and q^4 exactly in the atom class.  The nested multiple integrals for
q^3 and q^1 are realized by composing the right integral with the already
constructed lower coordinates - mathematically identical, O(N^2) instead of
O(N^4), and it reuses the tested operators.

The homogeneous constants multiply the bare kernels exactly as written
above; no alternative normalization (such as dividing by Gamma(alpha)) is
introduced.  Endpoint values are not enforced: for alpha < 1 every family
member is unbounded at an endpoint, so C1..C4 are the family parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fracops import (
    AtomSum,
    FnRepr,
    Interval,
    PowerAtom,
    Side,
    UniformGrid,
    check_order,
    fn_add,
    fn_scale,
    left_rl_derivative,
    right_rl_derivative,
    right_rl_integral,
)
from .lagrangian import Trajectory
from .specfun import gamma

__all__ = [
    "ClassicalConstants",
    "ExampleBConstants",
    "classical_constant_map",
    "classical_reference",
    "example_a_solution",
    "example_b_solution",
]


@dataclass(frozen=True)
class ExampleBConstants:
    """Free constants of the four-coordinate solution family."""

    c1: float
    c2: float
    c3: float
    c4: float


@dataclass(frozen=True)
class ClassicalConstants:
    """Constants of the integer-order polynomial solutions on [0, 1]."""

    c1p: float
    c2p: float
    c3p: float
    c4p: float


def example_a_solution(q1: FnRepr, alpha: float, grid: UniformGrid) -> Trajectory:
    """Solution family of the three-coordinate system, driven by a free q^1.

    The stationarity conditions collapse to q^2 = q^1 and
    q^3 = (-D_a^alpha + D_b^alpha) q^1; the third coordinate mixes both
    operator sides, so it is analytic only in special cases.
    """
    alpha = check_order(alpha)
    q3 = fn_add(
        fn_scale(left_rl_derivative(q1, alpha, grid), -1.0),
        right_rl_derivative(q1, alpha, grid),
    )
    return Trajectory((q1, q1, q3), grid)


def example_b_solution(
    c: ExampleBConstants, alpha: float, grid: UniformGrid
) -> Trajectory:
    """Four-coordinate solution family for given constants and order."""
    alpha = check_order(alpha)
    iv = grid.interval
    kernel = alpha - 1.0
    q2 = AtomSum(iv, (PowerAtom(Side.LEFT, c.c1, kernel),))
    q4 = AtomSum(
        iv,
        (
            PowerAtom(Side.LEFT, c.c2, kernel),
            PowerAtom(Side.LEFT, -c.c1 * gamma(alpha) / gamma(2.0 * alpha), 2.0 * alpha - 1.0),
        ),
    )
    q3 = fn_add(
        AtomSum(iv, (PowerAtom(Side.RIGHT, c.c3, kernel),)),
        right_rl_integral(q4, alpha, grid),
    )
    q1 = fn_add(
        AtomSum(iv, (PowerAtom(Side.RIGHT, c.c4, kernel),)),
        fn_scale(right_rl_integral(q3, alpha, grid), -1.0),
    )
    return Trajectory((q1, q2, q3, q4), grid)


def classical_constant_map(c: ExampleBConstants) -> ClassicalConstants:
    """Affine redefinition under which the family meets the polynomial limit."""
    return ClassicalConstants(
        c1p=c.c4 - c.c3 - c.c2 / 2 + c.c1 / 3,
        c2p=-c.c1 / 2 + c.c2 + c.c3,
        c3p=c.c2,
        c4p=c.c1,
    )


def classical_reference(cp: ClassicalConstants, grid: UniformGrid) -> Trajectory:
    """Integer-order polynomial solutions on [0, 1].

    q^1 = C4' t^3/6 - C3' t^2/2 + C2' t + C1',  q^2 = C4',
    q^3 = C4' t^2/2 - C3' t + C2',              q^4 = -C4' t + C3'.
    """
    if grid.interval != Interval(0.0, 1.0):
        raise ValueError("classical reference is defined on the interval [0, 1]")
    iv = grid.interval

    def poly(*coeffs: tuple[float, float]) -> AtomSum:
        return AtomSum(iv, tuple(PowerAtom(Side.LEFT, cf, ex) for cf, ex in coeffs))

    q1 = poly((cp.c4p / 6.0, 3.0), (-cp.c3p / 2.0, 2.0), (cp.c2p, 1.0), (cp.c1p, 0.0))
    q2 = poly((cp.c4p, 0.0))
    q3 = poly((cp.c4p / 2.0, 2.0), (-cp.c3p, 1.0), (cp.c2p, 0.0))
    q4 = poly((-cp.c4p, 1.0), (cp.c3p, 0.0))
    return Trajectory((q1, q2, q3, q4), grid)
