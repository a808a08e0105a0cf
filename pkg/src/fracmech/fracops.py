"""Left/right Riemann-Liouville operators on power atoms and grid samples.

Two function representations close the calculus:

* :class:`AtomSum` - finite sums of power atoms ``c (t-a)^nu`` and
  ``c (b-t)^nu``.  Same-sided fractional differentiation/integration maps
  this class to itself exactly via the power rule.
* :class:`GridFn` - samples on a uniform grid, the numeric fallback.
  Derivatives use the Grunwald-Letnikov history sum, integrals a product
  trapezoid rule with exact moments of the ``(t - tau)^(alpha-1)`` kernel.

Cross-sided analytic results are deliberately not attempted (they need
incomplete Beta functions); such terms are sampled and pushed through
quadrature instead.  Sums of analytic and sampled parts are kept split in a
:class:`MixedFn` so singular atoms are never flattened to samples: the
endpoint kernels ``(t-a)^(alpha-1)`` cannot be recovered from samples, and
differencing them numerically degrades convergence to O(h^alpha).

Operator values are generically unbounded at the anchor node (a derivative
of order alpha < 1 of a function that does not vanish there behaves like
``(t-a)^(-alpha)``), so numeric derivatives mask that node and comparisons
go through :func:`trimmed_sup_norm`.

All values are immutable and all operations pure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

from .specfun import gamma, gl_weights, reciprocal_gamma

__all__ = [
    "AtomSum",
    "EXPONENT_TOL",
    "FnRepr",
    "GridFn",
    "Interval",
    "MixedFn",
    "PowerAtom",
    "Side",
    "UniformGrid",
    "check_order",
    "left_rl_derivative",
    "left_rl_integral",
    "power_rule_left",
    "power_rule_right",
    "right_rl_derivative",
    "right_rl_integral",
    "sample",
    "trimmed_sup_norm",
]

# Exponents closer than this are merged as like terms; values this close to a
# non-positive integer count as exact poles in the power rule.
EXPONENT_TOL = 1e-12


def check_order(alpha: float) -> float:
    """Validate a fractional order, returning it as a float."""
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"order must satisfy 0 < alpha <= 1, got {alpha!r}")
    return alpha


class Side(enum.Enum):
    """Anchor of a power atom or operator: the lower or the upper limit."""

    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class Interval:
    """Closed interval [a, b] with a < b."""

    a: float
    b: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not self.a < self.b:
            raise ValueError(f"need a < b, got [{self.a!r}, {self.b!r}]")

    @property
    def span(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class UniformGrid:
    """N + 1 equispaced nodes t_i = a + i h on an interval, h = (b - a)/N."""

    interval: Interval
    n_cells: int

    def __post_init__(self) -> None:
        if self.n_cells < 8:
            raise ValueError(f"need at least 8 cells, got {self.n_cells!r}")

    @property
    def h(self) -> float:
        return self.interval.span / self.n_cells

    @cached_property
    def nodes(self) -> np.ndarray:
        t = np.linspace(self.interval.a, self.interval.b, self.n_cells + 1)
        t.setflags(write=False)
        return t

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1


@dataclass(frozen=True)
class PowerAtom:
    """One term ``coeff * (t-a)^exponent`` (LEFT) or ``coeff * (b-t)^exponent`` (RIGHT).

    Exponents must stay above -1 so the atom remains integrable against the
    fractional kernels.
    """

    side: Side
    coeff: float
    exponent: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeff", float(self.coeff))
        object.__setattr__(self, "exponent", float(self.exponent))
        if not self.exponent > -1.0:
            raise ValueError(f"atom exponent must exceed -1, got {self.exponent!r}")


@dataclass(frozen=True)
class AtomSum:
    """Canonical finite sum of power atoms over a shared interval.

    Canonical form: exponent-zero atoms are constants and normalized to the
    LEFT side, terms matching in side and exponent (within
    ``EXPONENT_TOL``) are merged, zero coefficients dropped, and terms sorted
    by (side, exponent).  The empty sum is the zero function.
    """

    interval: Interval
    terms: tuple[PowerAtom, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", _canonicalize(self.terms))

    def __add__(self, other: "FnRepr | float") -> "FnRepr":
        return fn_add(self, other)

    __radd__ = __add__

    def __sub__(self, other: "FnRepr | float") -> "FnRepr":
        return fn_add(self, fn_scale(_as_fn(other, self.interval), -1.0))

    def __mul__(self, c: float) -> "AtomSum":
        return fn_scale(self, c)

    __rmul__ = __mul__

    def __neg__(self) -> "AtomSum":
        return fn_scale(self, -1.0)

    @property
    def is_zero(self) -> bool:
        return not self.terms


def _canonicalize(terms: tuple[PowerAtom, ...]) -> tuple[PowerAtom, ...]:
    merged: list[PowerAtom] = []
    for term in sorted(terms, key=lambda s: (s.side.value, s.exponent)):
        if term.coeff == 0.0:
            continue
        exponent = 0.0 if abs(term.exponent) <= EXPONENT_TOL else term.exponent
        side = Side.LEFT if exponent == 0.0 else term.side
        term = PowerAtom(side, term.coeff, exponent)
        if (
            merged
            and merged[-1].side is term.side
            and abs(merged[-1].exponent - term.exponent) <= EXPONENT_TOL
        ):
            coeff = merged[-1].coeff + term.coeff
            last = PowerAtom(term.side, coeff, merged[-1].exponent)
            merged[-1] = last
        else:
            merged.append(term)
    return tuple(t for t in merged if t.coeff != 0.0)


@dataclass(frozen=True, eq=False)
class GridFn:
    """Samples on a uniform grid, with optional singular endpoint flags.

    ``singular_mask`` marks the first/last node as unusable (stored as NaN);
    masked nodes are excluded from norms and never fed to quadrature.
    """

    grid: UniformGrid
    values: np.ndarray
    singular_mask: tuple[bool, bool] = (False, False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"expected {self.grid.n_nodes} values, got shape {values.shape}"
            )
        if any(self.singular_mask):
            values = values.copy()
            if self.singular_mask[0]:
                values[0] = np.nan
            if self.singular_mask[1]:
                values[-1] = np.nan
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def interval(self) -> Interval:
        return self.grid.interval

    def __add__(self, other: "FnRepr | float") -> "FnRepr":
        return fn_add(self, other)

    __radd__ = __add__

    def __sub__(self, other: "FnRepr | float") -> "FnRepr":
        return fn_add(self, fn_scale(_as_fn(other, self.interval), -1.0))

    def __mul__(self, c: float) -> "GridFn":
        return fn_scale(self, c)

    __rmul__ = __mul__

    def __neg__(self) -> "GridFn":
        return fn_scale(self, -1.0)


@dataclass(frozen=True)
class MixedFn:
    """Sum of an analytic atom part and a sampled remainder.

    Produced whenever an operator maps some terms analytically and the rest
    numerically; keeping the split preserves singular endpoint structure that
    samples cannot represent.
    """

    atoms: AtomSum
    grid_part: GridFn

    def __post_init__(self) -> None:
        if self.atoms.interval != self.grid_part.interval:
            raise ValueError("atom part and grid part live on different intervals")

    @property
    def interval(self) -> Interval:
        return self.atoms.interval

    @property
    def grid(self) -> UniformGrid:
        return self.grid_part.grid

    def __add__(self, other: "FnRepr | float") -> "FnRepr":
        return fn_add(self, other)

    __radd__ = __add__

    def __sub__(self, other: "FnRepr | float") -> "FnRepr":
        return fn_add(self, fn_scale(_as_fn(other, self.interval), -1.0))

    def __mul__(self, c: float) -> "MixedFn":
        return fn_scale(self, c)

    __rmul__ = __mul__

    def __neg__(self) -> "MixedFn":
        return fn_scale(self, -1.0)


FnRepr = Union[AtomSum, GridFn, MixedFn]


def constant(interval: Interval, c: float) -> AtomSum:
    """The constant function c as an atom sum."""
    return AtomSum(interval, (PowerAtom(Side.LEFT, c, 0.0),))


def _as_fn(value: "FnRepr | float", interval: Interval) -> FnRepr:
    if isinstance(value, (int, float)):
        return constant(interval, float(value))
    return value


def fn_add(f: FnRepr, g: "FnRepr | float") -> FnRepr:
    """Pointwise sum; atoms and samples are kept split, never flattened."""
    g = _as_fn(g, f.interval)
    if f.interval != g.interval:
        raise ValueError("cannot add functions on different intervals")
    atoms: list[PowerAtom] = []
    grids: list[GridFn] = []
    for part in (f, g):
        if isinstance(part, AtomSum):
            atoms.extend(part.terms)
        elif isinstance(part, GridFn):
            grids.append(part)
        else:
            atoms.extend(part.atoms.terms)
            grids.append(part.grid_part)
    return _combine(f.interval, atoms, grids)


def fn_scale(f: FnRepr, c: float):
    """Pointwise scalar multiple."""
    c = float(c)
    if isinstance(f, AtomSum):
        return AtomSum(f.interval, tuple(PowerAtom(t.side, c * t.coeff, t.exponent) for t in f.terms))
    if isinstance(f, GridFn):
        return GridFn(f.grid, c * f.values, f.singular_mask)
    return MixedFn(fn_scale(f.atoms, c), fn_scale(f.grid_part, c))


def _add_grids(grids: list[GridFn]) -> GridFn:
    grid = grids[0].grid
    for g in grids[1:]:
        if g.grid != grid:
            raise ValueError("cannot combine samples on different grids")
    mask = (
        any(g.singular_mask[0] for g in grids),
        any(g.singular_mask[1] for g in grids),
    )
    total = np.zeros(grid.n_nodes)
    for g in grids:
        vals = g.values
        if any(g.singular_mask):
            vals = np.nan_to_num(vals, nan=0.0)
        total += vals
    return GridFn(grid, total, mask)


def _combine(interval: Interval, atoms: list[PowerAtom], grids: list[GridFn]) -> FnRepr:
    atom_sum = AtomSum(interval, tuple(atoms))
    if not grids:
        return atom_sum
    grid_fn = _add_grids(grids)
    if atom_sum.is_zero:
        return grid_fn
    return MixedFn(atom_sum, grid_fn)


# --------------------------------------------------------------------------
# sampling and comparison


def sample(f: FnRepr, grid: UniformGrid) -> GridFn:
    """Materialize any representation as samples on ``grid``.

    Atom sums are evaluated pointwise; an endpoint node where some atom has a
    negative exponent and a vanishing base is marked singular.  Sampled
    inputs must already live on ``grid`` (resampling between grids is an
    error, never an interpolation).
    """
    if isinstance(f, GridFn):
        if f.grid != grid:
            raise ValueError("grid mismatch: resampling is not supported")
        return f
    if isinstance(f, MixedFn):
        return _add_grids([sample(f.atoms, grid), sample(f.grid_part, grid)])
    if f.interval != grid.interval:
        raise ValueError("atom sum and grid live on different intervals")
    t = grid.nodes
    total = np.zeros(grid.n_nodes)
    mask_left = False
    mask_right = False
    with np.errstate(divide="ignore", invalid="ignore"):
        for term in f.terms:
            if term.side is Side.LEFT:
                base = t - grid.interval.a
            else:
                base = grid.interval.b - t
            total += term.coeff * base ** term.exponent
            if term.exponent < 0.0:
                if term.side is Side.LEFT:
                    mask_left = True
                else:
                    mask_right = True
    return GridFn(grid, total, (mask_left, mask_right))


def trimmed_sup_norm(f: GridFn, g: GridFn, trim: float = 0.05) -> float:
    """max |f - g| over nodes inside the trimmed window.

    The window keeps t in [a + trim*(b-a), b - trim*(b-a)]; singular-masked
    endpoints of either argument are excluded as well.
    """
    if f.grid != g.grid:
        raise ValueError("grid mismatch")
    if not 0.0 <= trim < 0.5:
        raise ValueError(f"need 0 <= trim < 0.5, got {trim!r}")
    n = f.grid.n_cells
    lo = math.ceil(trim * n - 1e-9)
    hi = math.floor((1.0 - trim) * n + 1e-9)
    lo = max(lo, 1 if (f.singular_mask[0] or g.singular_mask[0]) else 0)
    hi = min(hi, n - 1 if (f.singular_mask[1] or g.singular_mask[1]) else n)
    if hi < lo:
        raise ValueError("trimmed window is empty")
    return float(np.max(np.abs(f.values[lo : hi + 1] - g.values[lo : hi + 1])))


# --------------------------------------------------------------------------
# exact calculus on atoms


def _power_rule(atom: PowerAtom, p: float) -> PowerAtom:
    # aD^p c (t-a)^nu = c Gamma(nu+1)/Gamma(nu-p+1) (t-a)^(nu-p); p < 0 is
    # integration of order -p.  The coefficient collapses to an exact zero
    # whenever nu - p + 1 lands on a pole of Gamma.
    nu = atom.exponent
    s = nu - p + 1.0
    nearest = round(s)
    if nearest <= 0 and abs(s - nearest) <= EXPONENT_TOL:
        return PowerAtom(atom.side, 0.0, 0.0)
    coeff = atom.coeff * gamma(nu + 1.0) * reciprocal_gamma(s)
    if coeff == 0.0:
        return PowerAtom(atom.side, 0.0, 0.0)
    exponent = nu - p
    if exponent <= -1.0:
        raise ValueError(
            f"result exponent {exponent!r} leaves the representable class (needs > -1)"
        )
    return PowerAtom(atom.side, coeff, exponent)


def power_rule_left(atom: PowerAtom, p: float) -> PowerAtom:
    """Order-``p`` derivative (``p < 0``: integral) of a left-anchored atom."""
    if atom.side is not Side.LEFT:
        raise ValueError("power_rule_left needs a left-anchored atom")
    return _power_rule(atom, p)


def power_rule_right(atom: PowerAtom, p: float) -> PowerAtom:
    """Mirror of :func:`power_rule_left` for right-anchored atoms."""
    if atom.side is not Side.RIGHT:
        raise ValueError("power_rule_right needs a right-anchored atom")
    return _power_rule(atom, p)


def _integer_cross_atoms(term: PowerAtom, op_side: Side, p: float, interval: Interval) -> list[PowerAtom]:
    """Order-1 operators are local, so cross-anchored atoms stay in class.

    Derivative (p = 1): the left operator is d/dt and the right one -d/dt.
    Integral (p = -1): an anchored antiderivative, which for a cross atom
    contributes a constant plus an atom of raised exponent.
    """
    nu, c = term.exponent, term.coeff
    atom_sign = -1.0 if term.side is Side.RIGHT else 1.0  # d/dt of the base
    op_sign = -1.0 if op_side is Side.RIGHT else 1.0
    if p == 1.0:
        if nu == 0.0:
            return []
        exponent = nu - 1.0
        if exponent <= -1.0:
            raise ValueError(
                f"result exponent {exponent!r} leaves the representable class (needs > -1)"
            )
        return [PowerAtom(term.side, op_sign * atom_sign * c * nu, exponent)]
    # p == -1: left op integrates from a, right op from t to b
    span_pow = interval.span ** (nu + 1.0)
    if op_side is Side.LEFT:
        # int_a^t c (b-tau)^nu dtau = c [ (b-a)^(nu+1) - (b-t)^(nu+1) ] / (nu+1)
        return [
            PowerAtom(Side.LEFT, c * span_pow / (nu + 1.0), 0.0),
            PowerAtom(Side.RIGHT, -c / (nu + 1.0), nu + 1.0),
        ]
    # int_t^b c (tau-a)^nu dtau = c [ (b-a)^(nu+1) - (t-a)^(nu+1) ] / (nu+1)
    return [
        PowerAtom(Side.LEFT, c * span_pow / (nu + 1.0), 0.0),
        PowerAtom(Side.LEFT, -c / (nu + 1.0), nu + 1.0),
    ]


# --------------------------------------------------------------------------
# numeric kernels


def _gl_sum_left(values: np.ndarray, alpha: float, h: float) -> np.ndarray:
    # D^alpha f(t_i) ~ h^-alpha sum_{k<=i} w_k f(t_{i-k}); exact backward
    # difference at alpha = 1
    w = gl_weights(alpha, len(values) - 1).w
    return np.convolve(w, values)[: len(values)] * h**-alpha


def _pt_weights(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    # product-trapezoid weights: I^alpha f(t_i) = h^alpha/Gamma(alpha+2) *
    # [ edge_i f_0 + sum_{j=1..i} d_{i-j} f_j ], from integrating the
    # piecewise-linear interpolant exactly against (t - tau)^(alpha-1)
    ap1 = alpha + 1.0
    m = np.arange(1, n + 1, dtype=float)
    d = np.empty(n)
    if n >= 1:
        d[0] = 1.0
        mm = m[:-1]
        d[1:] = (mm + 1.0) ** ap1 - 2.0 * mm**ap1 + (mm - 1.0) ** ap1
    edge = np.empty(n + 1)
    edge[0] = 0.0
    edge[1:] = (m - 1.0) ** ap1 - m**alpha * (m - alpha - 1.0)
    return d, edge


def _pt_integral_left(values: np.ndarray, alpha: float, h: float) -> np.ndarray:
    n = len(values) - 1
    out = np.zeros(n + 1)
    if n >= 1:
        d, edge = _pt_weights(alpha, n)
        conv = np.convolve(d, values[1:])[:n]
        out[1:] = (conv + edge[1:] * values[0]) * h**alpha / gamma(alpha + 2.0)
    return out


def _masked_filled(f: GridFn) -> np.ndarray:
    if any(f.singular_mask):
        return np.nan_to_num(f.values, nan=0.0)
    return f.values


def _numeric_op(f: GridFn, alpha: float, op_side: Side, derivative: bool) -> GridFn:
    m_anchor, m_far = f.singular_mask if op_side is Side.LEFT else f.singular_mask[::-1]
    if m_anchor:
        kind = "derivative" if derivative else "integral"
        raise ValueError(
            f"numeric {op_side.value} {kind}: input is singular at the anchor "
            "endpoint, which every history sum would touch; use the analytic "
            "representation instead"
        )
    values = _masked_filled(f)
    if op_side is Side.RIGHT:
        values = values[::-1]
    h = f.grid.h
    if derivative:
        out = _gl_sum_left(values, alpha, h)
        # the anchor node itself is generically singular for the operator
        mask_fwd = (True, m_far)
    else:
        out = _pt_integral_left(values, alpha, h)
        mask_fwd = (False, m_far)
    if op_side is Side.RIGHT:
        out = out[::-1]
        mask = mask_fwd[::-1]
    else:
        mask = mask_fwd
    return GridFn(f.grid, out, mask)


# --------------------------------------------------------------------------
# operator dispatch


def _same_sided(term: PowerAtom, op_side: Side) -> bool:
    # constants belong to both one-sided classes
    return term.side is op_side or term.exponent == 0.0


def _apply_operator(
    f: FnRepr, alpha: float, grid: UniformGrid, op_side: Side, derivative: bool
) -> FnRepr:
    alpha = check_order(alpha)
    if f.interval != grid.interval:
        raise ValueError("function and grid live on different intervals")
    p = alpha if derivative else -alpha

    if isinstance(f, MixedFn):
        if f.grid != grid:
            raise ValueError("grid mismatch: resampling is not supported")
        atom_result = _apply_operator(f.atoms, alpha, grid, op_side, derivative)
        grid_result = _apply_operator(f.grid_part, alpha, grid, op_side, derivative)
        return fn_add(atom_result, grid_result)

    if isinstance(f, GridFn):
        if f.grid != grid:
            raise ValueError("grid mismatch: resampling is not supported")
        return _numeric_op(f, alpha, op_side, derivative)

    analytic: list[PowerAtom] = []
    cross: list[PowerAtom] = []
    for term in f.terms:
        if _same_sided(term, op_side):
            anchored = term if term.side is op_side else PowerAtom(op_side, term.coeff, term.exponent)
            analytic.append(_power_rule(anchored, p))
        elif alpha == 1.0:
            analytic.extend(_integer_cross_atoms(term, op_side, p, f.interval))
        else:
            cross.append(term)
    grids: list[GridFn] = []
    if cross:
        sampled = sample(AtomSum(f.interval, tuple(cross)), grid)
        grids.append(_numeric_op(sampled, alpha, op_side, derivative))
    return _combine(f.interval, analytic, grids)


def left_rl_derivative(f: FnRepr, alpha: float, grid: UniformGrid) -> FnRepr:
    """Fractional derivative of order ``alpha`` anchored at the lower limit."""
    return _apply_operator(f, alpha, grid, Side.LEFT, derivative=True)


def right_rl_derivative(f: FnRepr, alpha: float, grid: UniformGrid) -> FnRepr:
    """Fractional derivative of order ``alpha`` anchored at the upper limit."""
    return _apply_operator(f, alpha, grid, Side.RIGHT, derivative=True)


def left_rl_integral(f: FnRepr, alpha: float, grid: UniformGrid) -> FnRepr:
    """Fractional integral of order ``alpha`` from the lower limit (zero at t = a)."""
    return _apply_operator(f, alpha, grid, Side.LEFT, derivative=False)


def right_rl_integral(f: FnRepr, alpha: float, grid: UniformGrid) -> FnRepr:
    """Fractional integral of order ``alpha`` up to the upper limit (zero at t = b)."""
    return _apply_operator(f, alpha, grid, Side.RIGHT, derivative=False)
