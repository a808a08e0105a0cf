"""Independent discrete oracle for the four-coordinate stationarity system.

The left/right fractional derivatives become triangular Toeplitz matrices
built from the Grunwald-Letnikov weights.  Stacking the four coupled
equations gives a block system whose unpinned form has a four-dimensional
null space (one free constant per coordinate chain, the discrete analogue of
the closed-form family).  Pinning one interior node value per coordinate
selects a member; the pinned system is solved in least squares with the pin
rows weighted so they bind.

Operator rows are assembled only at nodes where the history sum is
meaningful: a left-anchored derivative has no usable row at the first node,
a right-anchored one none at the last.  Each operator block therefore
contributes N rows for N + 1 unknowns, which is exactly where the
four-dimensional null space comes from.

Pinning is a construction of this oracle, not part of the underlying
variational problem; reports should label pinned values as such.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .fracops import GridFn, UniformGrid, check_order
from .lagrangian import Trajectory
from .specfun import gl_weights

__all__ = [
    "BlockSystem",
    "MatrixKind",
    "OperatorMatrix",
    "Pin",
    "RankDeficiencyError",
    "assemble_example_b",
    "default_pins",
    "gl_matrix",
    "solve",
]

DEFAULT_PIN_FRACTIONS = (0.2, 0.4, 0.6, 0.8)


class RankDeficiencyError(RuntimeError):
    """The pinned system lost more rank than the expected free constants."""


class MatrixKind(enum.Enum):
    LEFT_GL = "left-gl"
    RIGHT_GL = "right-gl"
    IDENTITY = "identity"


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense matrix whose action on samples matches a grid operator."""

    kind: MatrixKind
    alpha: float
    grid: UniformGrid
    dense: np.ndarray

    def __post_init__(self) -> None:
        self.dense.setflags(write=False)


def gl_matrix(kind: MatrixKind, alpha: float, grid: UniformGrid) -> OperatorMatrix:
    """Grunwald-Letnikov derivative as a triangular Toeplitz matrix.

    The left variant is lower triangular with first column h^-alpha w; the
    right variant is its transpose.  Row i applied to samples reproduces the
    corresponding numeric derivative at node i.
    """
    alpha = check_order(alpha)
    n = grid.n_cells
    w = gl_weights(alpha, n).w * grid.h**-alpha
    i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    lower = np.where(i >= j, np.concatenate([w, [0.0]])[np.clip(i - j, 0, n)], 0.0)
    if kind is MatrixKind.LEFT_GL:
        dense = lower
    elif kind is MatrixKind.RIGHT_GL:
        dense = lower.T.copy()
    else:
        raise ValueError(f"gl_matrix builds operator matrices, not {kind!r}")
    return OperatorMatrix(kind=kind, alpha=alpha, grid=grid, dense=dense)


@dataclass(frozen=True)
class Pin:
    """Fix coordinate ``coord`` (0-based) to ``value`` at interior node ``node``."""

    coord: int
    node: int
    value: float


def default_pins(trajectory: Trajectory, fractions=DEFAULT_PIN_FRACTIONS) -> list[Pin]:
    """One pin per coordinate, at the nodes nearest the given span fractions.

    Values are read off the given trajectory.  Fractions are cycled over the
    coordinates in order, so the default pins q^1..q^4 at 0.2, 0.4, 0.6, 0.8
    of the span.
    """
    from .fracops import sample  # local import to keep module deps one-way

    grid = trajectory.grid
    pins = []
    for coord, frac in enumerate(fractions):
        node = int(round(frac * grid.n_cells))
        node = min(max(node, 1), grid.n_cells - 1)
        values = sample(trajectory.coords[coord % trajectory.dim], grid).values
        pins.append(Pin(coord % trajectory.dim, node, float(values[node])))
    return pins


@dataclass(frozen=True, eq=False)
class BlockSystem:
    """Stacked operator rows (anchor rows dropped) plus pin constraints."""

    blocks: tuple[tuple[object, ...], ...]
    matrix: np.ndarray
    rhs: np.ndarray
    pins: tuple[Pin, ...]
    grid: UniformGrid
    alpha: float
    dim: int

    def __post_init__(self) -> None:
        self.matrix.setflags(write=False)
        self.rhs.setflags(write=False)


def assemble_example_b(alpha: float, grid: UniformGrid, pins) -> BlockSystem:
    """Discretize the four coupled stationarity equations.

    Block rows, in equation order:

        [D_a] q2           = 0     (rows at nodes 1..N)
        [D_b] q1 + q3      = 0     (rows at nodes 0..N-1)
        [D_a] q4 + q2      = 0     (rows at nodes 1..N)
        [D_b] q3 - q4      = 0     (rows at nodes 0..N-1)

    Requires at least four pins (the solution family has four free
    constants) at interior, non-singular nodes.
    """
    alpha = check_order(alpha)
    pins = tuple(Pin(int(p[0]), int(p[1]), float(p[2])) if not isinstance(p, Pin) else p for p in pins)
    if len(pins) < 4:
        raise ValueError(f"need at least 4 pins, got {len(pins)}")
    n = grid.n_cells
    for p in pins:
        if not 0 <= p.coord < 4:
            raise ValueError(f"pin coordinate out of range: {p!r}")
        if not 1 <= p.node <= n - 1:
            raise ValueError(f"pin node must be interior and non-singular: {p!r}")
    left = gl_matrix(MatrixKind.LEFT_GL, alpha, grid)
    right = gl_matrix(MatrixKind.RIGHT_GL, alpha, grid)
    eye = np.eye(n + 1)
    zero = np.zeros((n + 1, n + 1))
    blocks = (
        (None, left, None, None),
        (right, None, 1.0, None),
        (None, 1.0, None, left),
        (None, None, right, -1.0),
    )

    def block_array(entry) -> np.ndarray:
        if entry is None:
            return zero
        if isinstance(entry, OperatorMatrix):
            return entry.dense
        return float(entry) * eye

    rows = []
    # left-anchored rows start at node 1, right-anchored ones end at N-1
    row_slices = (slice(1, None), slice(None, -1), slice(1, None), slice(None, -1))
    for block_row, rs in zip(blocks, row_slices):
        rows.append(np.hstack([block_array(e) for e in block_row])[rs])
    matrix = np.vstack(rows)
    rhs = np.zeros(matrix.shape[0])
    return BlockSystem(
        blocks=blocks,
        matrix=matrix,
        rhs=rhs,
        pins=pins,
        grid=grid,
        alpha=alpha,
        dim=4,
    )


def solve(system: BlockSystem) -> Trajectory:
    """Least-squares solve with pin rows weighted by N so they bind.

    Returns sampled coordinates with both endpoint nodes masked (the family
    is generically singular there).  Raises :class:`RankDeficiencyError` if
    the pinned system is rank deficient, which signals a bad grid or order.
    """
    grid = system.grid
    n = grid.n_cells
    n_nodes = grid.n_nodes
    n_unknowns = system.dim * n_nodes
    weight = float(n)
    pin_rows = np.zeros((len(system.pins), n_unknowns))
    pin_rhs = np.empty(len(system.pins))
    for i, p in enumerate(system.pins):
        pin_rows[i, p.coord * n_nodes + p.node] = weight
        pin_rhs[i] = weight * p.value
    stacked = np.vstack([system.matrix, pin_rows])
    rhs = np.concatenate([system.rhs, pin_rhs])
    solution, _, rank, _ = np.linalg.lstsq(stacked, rhs, rcond=None)
    if rank < n_unknowns:
        raise RankDeficiencyError(
            f"pinned system has rank {rank} < {n_unknowns}; "
            "the pins do not resolve the free constants"
        )
    coords = tuple(
        GridFn(grid, solution[k * n_nodes : (k + 1) * n_nodes], (True, True))
        for k in range(system.dim)
    )
    return Trajectory(coords, grid)
