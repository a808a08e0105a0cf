"""Lagrangians linear in velocities and their fractional Euler-Lagrange residuals.

The class handled here is L = a_j(q) qdot^j - V(q) with affine coefficients
a(q) = A q + b and quadratic potential V(q) = q^T M q / 2 + c.q + d.  That
is enough to cover both worked systems in this package while keeping
da_j/dq^k = A_jk constant, so residual assembly is plain matrix algebra and
the discretized equations stay linear.

Two one-parameter fractional generalizations replace the velocity: one uses
the derivative anchored at the lower limit inside L, the other the upper
one.  Their stationarity conditions mix both operators:

    left form:   A_jk (D_a^alpha q^j) + D_b^alpha(a_k(q)) - dV/dq^k = 0
    right form:  A_jk (D_b^alpha q^j) + D_a^alpha(a_k(q)) + dV/dq^k = 0

where D_a / D_b are the left/right Riemann-Liouville derivatives.  Residual
index k corresponds to variation with respect to q^k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fracops import (
    AtomSum,
    FnRepr,
    GridFn,
    Side,
    UniformGrid,
    check_order,
    fn_add,
    fn_scale,
    left_rl_derivative,
    right_rl_derivative,
    sample,
    trimmed_sup_norm,
)

__all__ = [
    "FractionalForm",
    "LinearVelocityLagrangian",
    "ResidualReport",
    "Trajectory",
    "el_residual",
    "example_a_lagrangian",
    "example_b_lagrangian",
    "lagrangian_value",
]


def _frozen_array(x, shape) -> np.ndarray:
    arr = np.asarray(x, dtype=float).reshape(shape)
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LinearVelocityLagrangian:
    """L = a_j(q) qdot^j - V(q), a(q) = A q + bvec, V = q.M.q/2 + cvec.q + d.

    M is symmetrized on construction; its asymmetric part would not survive
    the quadratic form anyway.
    """

    A: np.ndarray
    bvec: np.ndarray
    M: np.ndarray
    cvec: np.ndarray
    d: float = 0.0

    def __post_init__(self) -> None:
        bvec = np.atleast_1d(np.asarray(self.bvec, dtype=float))
        n = bvec.shape[0]
        if n < 1:
            raise ValueError("need dimension >= 1")
        A = _frozen_array(self.A, (n, n))
        M = np.asarray(self.M, dtype=float).reshape(n, n)
        M = _frozen_array((M + M.T) / 2.0, (n, n))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "bvec", _frozen_array(bvec, (n,)))
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "cvec", _frozen_array(self.cvec, (n,)))
        object.__setattr__(self, "d", float(self.d))

    @property
    def dim(self) -> int:
        return self.bvec.shape[0]

    def velocity_coefficients(self, q: np.ndarray) -> np.ndarray:
        """a(q) = A q + bvec for a point or an array of points (dim, ...)."""
        q = np.asarray(q, dtype=float)
        return np.tensordot(self.A, q, axes=(1, 0)) + self.bvec.reshape((self.dim,) + (1,) * (q.ndim - 1))

    def potential(self, q: np.ndarray) -> np.ndarray:
        """V(q) for a point or an array of points (dim, ...)."""
        q = np.asarray(q, dtype=float)
        mq = np.tensordot(self.M, q, axes=(1, 0))
        return 0.5 * np.sum(q * mq, axis=0) + np.tensordot(self.cvec, q, axes=(0, 0)) + self.d


@dataclass(frozen=True)
class FractionalForm:
    """Which one-sided derivative replaces the velocity, and at what order."""

    variant: Side
    alpha: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", check_order(self.alpha))


@dataclass(frozen=True)
class Trajectory:
    """One function representation per coordinate, on a shared grid."""

    coords: tuple[FnRepr, ...]
    grid: UniformGrid

    def __post_init__(self) -> None:
        coords = tuple(self.coords)
        for q in coords:
            if q.interval != self.grid.interval:
                raise ValueError("all coordinates must live on the grid's interval")
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class ResidualReport:
    """Sampled Euler-Lagrange residuals and their trimmed sup norms."""

    per_equation: tuple[GridFn, ...]
    trimmed_norms: tuple[float, ...]
    trim: float


def _zero(grid: UniformGrid) -> GridFn:
    return GridFn(grid, np.zeros(grid.n_nodes))


def _linear_combination(
    coords: tuple[FnRepr, ...], weights: np.ndarray, const: float, interval
) -> FnRepr:
    acc: FnRepr = AtomSum(interval)
    for w, q in zip(weights, coords):
        if w != 0.0:
            acc = fn_add(acc, fn_scale(q, w))
    if const != 0.0:
        acc = fn_add(acc, const)
    return acc


def el_residual(
    L: LinearVelocityLagrangian,
    form: FractionalForm,
    q: Trajectory,
    trim: float = 0.05,
) -> ResidualReport:
    """Evaluate the Euler-Lagrange residual of every coordinate equation.

    Terms are kept analytic whenever they stay inside the same-sided atom
    class and sampled otherwise; the returned residuals are always sampled.
    """
    if q.dim != L.dim:
        raise ValueError(f"trajectory has {q.dim} coordinates, Lagrangian needs {L.dim}")
    if not 0.0 <= trim < 0.5:
        raise ValueError(f"need 0 <= trim < 0.5, got {trim!r}")
    grid = q.grid
    interval = grid.interval
    alpha = form.alpha
    if form.variant is Side.LEFT:
        d_velocity, d_coeff = left_rl_derivative, right_rl_derivative
        v_sign = -1.0
    else:
        d_velocity, d_coeff = right_rl_derivative, left_rl_derivative
        v_sign = 1.0

    dq = [
        d_velocity(q.coords[j], alpha, grid) if np.any(L.A[j] != 0.0) else None
        for j in range(L.dim)
    ]
    per_equation = []
    norms = []
    zero = _zero(grid)
    for k in range(L.dim):
        r: FnRepr = AtomSum(interval)
        for j in range(L.dim):
            if L.A[j, k] != 0.0:
                r = fn_add(r, fn_scale(dq[j], L.A[j, k]))
        a_k = _linear_combination(q.coords, L.A[k], L.bvec[k], interval)
        r = fn_add(r, d_coeff(a_k, alpha, grid))
        grad_v_k = _linear_combination(q.coords, v_sign * L.M[k], v_sign * L.cvec[k], interval)
        r = fn_add(r, grad_v_k)
        sampled = sample(r, grid)
        per_equation.append(sampled)
        norms.append(trimmed_sup_norm(sampled, zero, trim))
    return ResidualReport(tuple(per_equation), tuple(norms), trim)


def lagrangian_value(
    L: LinearVelocityLagrangian, form: FractionalForm, q: Trajectory
) -> GridFn:
    """Pointwise value of the fractional Lagrangian along a trajectory.

    Products of coordinates leave the atom class, so this is evaluated on
    samples throughout (it is a diagnostic, not part of the residuals).
    """
    if q.dim != L.dim:
        raise ValueError(f"trajectory has {q.dim} coordinates, Lagrangian needs {L.dim}")
    grid = q.grid
    d_velocity = left_rl_derivative if form.variant is Side.LEFT else right_rl_derivative
    coord_samples = [sample(c, grid) for c in q.coords]
    deriv_samples = [sample(d_velocity(c, form.alpha, grid), grid) for c in q.coords]
    mask = (
        any(s.singular_mask[0] for s in coord_samples + deriv_samples),
        any(s.singular_mask[1] for s in coord_samples + deriv_samples),
    )
    qv = np.stack([s.values for s in coord_samples])
    dv = np.stack([s.values for s in deriv_samples])
    a_vals = L.velocity_coefficients(qv)
    kinetic = np.sum(a_vals * dv, axis=0)
    if form.variant is Side.LEFT:
        values = kinetic - L.potential(qv)
    else:
        values = -kinetic - L.potential(qv)
    return GridFn(grid, values, mask)


def example_a_lagrangian() -> LinearVelocityLagrangian:
    """Three coordinates, L = qdot^1 q^2 - qdot^2 q^1 - (q^1 - q^2) q^3.

    The potential couples the first two coordinates to the third, which acts
    as a multiplier enforcing q^1 = q^2.
    """
    A = np.zeros((3, 3))
    A[0, 1] = 1.0
    A[1, 0] = -1.0
    M = np.zeros((3, 3))
    M[0, 2] = M[2, 0] = 1.0
    M[1, 2] = M[2, 1] = -1.0
    return LinearVelocityLagrangian(A=A, bvec=np.zeros(3), M=M, cvec=np.zeros(3))


def example_b_lagrangian() -> LinearVelocityLagrangian:
    """Four coordinates, L = qdot^1 q^2 + qdot^3 q^4 - V, V = -[(q^4)^2 - 2 q^2 q^3]/2."""
    A = np.zeros((4, 4))
    A[0, 1] = 1.0
    A[2, 3] = 1.0
    M = np.zeros((4, 4))
    M[3, 3] = -1.0
    M[1, 2] = M[2, 1] = 1.0
    return LinearVelocityLagrangian(A=A, bvec=np.zeros(4), M=M, cvec=np.zeros(4))
