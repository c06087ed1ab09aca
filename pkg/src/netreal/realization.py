"""Block-partitioned state-space realizations and their certificates.

A realization ``(A, B, C, D)`` paired with :class:`~netreal.graphs.NodeDims`
stores states, inputs and outputs node-major.  Block ``(i, j)`` of a matrix
means the rows belonging to node ``i`` and the columns belonging to node
``j``.  The update law is the discrete-time recursion

    x[t+1] = A x[t] + B u[t],      y[t] = C x[t] + D u[t]

and "stable" always means spectral radius below one.

A realization is *compatible* with a graph when A and C vanish on every
block off the edge set and B and D are block-diagonal; the *edge-sparse*
mode additionally admits direct-term blocks on edges.  A compatible,
stabilizable and detectable realization is a *witness* that its transfer
matrix is realizable on the network.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError, NumericalError, PoleError
from .graphs import NetworkGraph, NodeDims

#: Evaluation of C (zI - A)^{-1} B refuses condition numbers at or above this.
POLE_COND_LIMIT = 1e12

_EPS = float(np.finfo(float).eps)


class DMode(enum.Enum):
    """How the direct term may be structured in a compatibility check."""

    #: D must be block-diagonal.
    STRICT = "strict"
    #: D blocks also allowed wherever the graph has an edge.
    EDGE_SPARSE = "edge"


def _as_matrix(value, shape: tuple[int, int], name: str) -> np.ndarray:
    if value is None:
        arr = np.zeros(shape)
    else:
        try:
            arr = np.array(value, dtype=float)
        except (TypeError, ValueError) as exc:
            raise InputError(f"{name} is not a numeric matrix") from exc
        if arr.size == shape[0] * shape[1] and arr.ndim != 2:
            arr = arr.reshape(shape)
        if arr.shape != shape:
            raise InputError(f"{name} must have shape {shape}, got {arr.shape}")
    if arr.size and not np.isfinite(arr).all():
        raise InputError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BlockRealization:
    """State-space matrices with a node partition.

    Matrices may be passed as ``None`` (filled with zeros), nested lists,
    or arrays.  They are copied and frozen; instances are safe to share.

    Parameters
    ----------
    dims : NodeDims
        Per-node state/input/output counts.
    A, B, C, D : array_like, optional
        ``A`` is ``n x n``, ``B`` is ``n x m``, ``C`` is ``p x n`` and
        ``D`` is ``p x m`` where ``n``, ``m``, ``p`` are the totals of
        ``dims``.
    """

    dims: NodeDims
    A: Optional[np.ndarray] = None
    B: Optional[np.ndarray] = None
    C: Optional[np.ndarray] = None
    D: Optional[np.ndarray] = None

    def __post_init__(self):
        if not isinstance(self.dims, NodeDims):
            raise InputError("dims must be a NodeDims instance")
        n, m, p = self.dims.n_total, self.dims.m_total, self.dims.p_total
        object.__setattr__(self, "A", _as_matrix(self.A, (n, n), "A"))
        object.__setattr__(self, "B", _as_matrix(self.B, (n, m), "B"))
        object.__setattr__(self, "C", _as_matrix(self.C, (p, n), "C"))
        object.__setattr__(self, "D", _as_matrix(self.D, (p, m), "D"))

    @property
    def n(self) -> int:
        return self.dims.n_total

    @property
    def m(self) -> int:
        return self.dims.m_total

    @property
    def p(self) -> int:
        return self.dims.p_total

    @property
    def num_nodes(self) -> int:
        return self.dims.num_nodes

    def a_block(self, i: int, j: int) -> np.ndarray:
        return self.A[self.dims.state_slice(i), self.dims.state_slice(j)]

    def b_block(self, i: int, j: int) -> np.ndarray:
        return self.B[self.dims.state_slice(i), self.dims.input_slice(j)]

    def c_block(self, i: int, j: int) -> np.ndarray:
        return self.C[self.dims.output_slice(i), self.dims.state_slice(j)]

    def d_block(self, i: int, j: int) -> np.ndarray:
        return self.D[self.dims.output_slice(i), self.dims.input_slice(j)]


@dataclass(frozen=True)
class Violation:
    """One structurally forbidden block carrying a nonzero entry."""

    matrix: str
    block: tuple[int, int]
    max_abs: float


@dataclass(frozen=True)
class CompatibilityReport:
    ok: bool
    violations: tuple[Violation, ...]


def check_compatibility(
    real: BlockRealization,
    graph: NetworkGraph,
    mode: DMode = DMode.STRICT,
    zero_tol: float = 0.0,
) -> CompatibilityReport:
    """Test the block-sparsity rules of a realization against a graph.

    A and C blocks must vanish off the edge set; B must be block-diagonal.
    In strict mode D must be block-diagonal too; in edge-sparse mode D
    blocks are additionally allowed on edges.  Entries with absolute value
    at most ``zero_tol`` (default exactly zero) count as zero.

    Returns a report listing every offending block with its largest
    magnitude; ``ok`` is True iff there are none.
    """
    dims = real.dims
    if dims.num_nodes != graph.num_nodes:
        raise InputError(
            f"realization has {dims.num_nodes} nodes, graph has {graph.num_nodes}")
    if zero_tol < 0:
        raise InputError(f"zero_tol must be nonnegative, got {zero_tol}")

    violations: list[Violation] = []

    def scan(name, block_of, allowed):
        for i in range(dims.num_nodes):
            for j in range(dims.num_nodes):
                if allowed(i, j):
                    continue
                blk = block_of(i, j)
                if blk.size == 0:
                    continue
                worst = float(np.max(np.abs(blk)))
                if worst > zero_tol:
                    violations.append(Violation(name, (i, j), worst))

    edge_ok = graph.has_edge
    if mode is DMode.STRICT:
        d_ok = lambda i, j: i == j
    elif mode is DMode.EDGE_SPARSE:
        d_ok = lambda i, j: i == j or graph.has_edge(i, j)
    else:
        raise InputError(f"unknown D mode {mode!r}")

    scan("A", real.a_block, edge_ok)
    scan("B", real.b_block, lambda i, j: i == j)
    scan("C", real.c_block, edge_ok)
    scan("D", real.d_block, d_ok)
    return CompatibilityReport(not violations, tuple(violations))


@dataclass(frozen=True)
class OffendingMode:
    """An eigenvalue on or outside the unit circle that fails a rank test."""

    eigenvalue: complex
    test: str
    deficiency: int


@dataclass(frozen=True)
class PbhTestResult:
    passed: bool
    test: str
    offending: tuple[OffendingMode, ...]


@dataclass(frozen=True)
class PbhReport:
    stabilizable: bool
    detectable: bool
    offending_modes: tuple[OffendingMode, ...]


def _eigenvalues(a: np.ndarray) -> np.ndarray:
    if a.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc


def _rank(pencil: np.ndarray, tol: float) -> int:
    sv = np.linalg.svd(pencil, compute_uv=False)
    if sv.size == 0:
        return 0
    cutoff = sv[0] * max(max(pencil.shape) * _EPS, tol)
    return int(np.count_nonzero(sv > cutoff))


def _pbh_scan(a: np.ndarray, other: np.ndarray, stack_rows: bool,
              test: str, tol: float) -> PbhTestResult:
    n = a.shape[0]
    offending = []
    for lam in _eigenvalues(a):
        if abs(lam) < 1.0 - tol:
            continue
        shifted = a - lam * np.eye(n)
        pencil = np.vstack([shifted, other]) if stack_rows else np.hstack([shifted, other])
        rank = _rank(pencil, tol)
        if rank < n:
            offending.append(OffendingMode(complex(lam), test, n - rank))
    return PbhTestResult(not offending, test, tuple(offending))


def pbh_stabilizable(real: BlockRealization, tol: float = 1e-9) -> PbhTestResult:
    """Rank test ``[A - lambda I, B]`` at every eigenvalue with ``|lambda| >= 1 - tol``.

    Singular values below ``smax * max(max(shape) * eps, tol)`` count as zero.
    """
    return _pbh_scan(real.A, real.B, False, "stabilizable", tol)


def pbh_detectable(real: BlockRealization, tol: float = 1e-9) -> PbhTestResult:
    """Rank test ``[A - lambda I; C]`` at every eigenvalue with ``|lambda| >= 1 - tol``."""
    return _pbh_scan(real.A, real.C, True, "detectable", tol)


@dataclass(frozen=True)
class CertificationResult:
    ok: bool
    compatibility: CompatibilityReport
    pbh: PbhReport


def certify_witness(
    real: BlockRealization,
    graph: NetworkGraph,
    mode: DMode = DMode.STRICT,
    tol: float = 1e-9,
    zero_tol: float = 0.0,
) -> CertificationResult:
    """Full witness certificate: compatibility plus both PBH tests."""
    compat = check_compatibility(real, graph, mode, zero_tol)
    stab = pbh_stabilizable(real, tol)
    det = pbh_detectable(real, tol)
    pbh = PbhReport(stab.passed, det.passed, stab.offending + det.offending)
    return CertificationResult(compat.ok and stab.passed and det.passed, compat, pbh)


def spectral_radius(real: BlockRealization) -> float:
    """Largest eigenvalue magnitude of A; zero for a static system."""
    eigs = _eigenvalues(real.A)
    return float(np.max(np.abs(eigs))) if eigs.size else 0.0


def eval_transfer(real: BlockRealization, z: complex) -> np.ndarray:
    """Evaluate ``C (zI - A)^{-1} B + D`` at one complex frequency.

    Uses a linear solve, never an explicit inverse.  Raises
    :class:`~netreal.errors.PoleError` when ``zI - A`` has condition
    number at or above ``POLE_COND_LIMIT``.
    """
    d = real.D.astype(complex)
    if real.n == 0:
        return d
    shifted = z * np.eye(real.n, dtype=complex) - real.A
    cond = np.linalg.cond(shifted)
    if not np.isfinite(cond) or cond >= POLE_COND_LIMIT:
        raise PoleError(
            f"z = {z} is too close to a pole: cond(zI - A) = {cond:.3e}")
    states = np.linalg.solve(shifted, real.B.astype(complex))
    return real.C @ states + d


def scaled_deviation(left: np.ndarray, right: np.ndarray) -> float:
    """Largest entrywise gap under a mixed absolute/relative scale.

    Each entry's gap is divided by ``max(1, |left|, |right|)``, so the
    result reads as an absolute error for small values and a relative
    one for large values.
    """
    if left.size == 0:
        return 0.0
    scale = np.maximum(1.0, np.maximum(np.abs(left), np.abs(right)))
    return float(np.max(np.abs(left - right) / scale))


@dataclass(frozen=True)
class TransferComparison:
    equal: bool
    max_deviation: float
    num_points: int
    radius: float


_MAX_RESAMPLES = 8


def transfer_equal(
    r1: BlockRealization,
    r2: BlockRealization,
    num_points: int = 16,
    rel_tol: float = 1e-8,
) -> TransferComparison:
    """Compare two transfer matrices on a circle of sample frequencies.

    Samples ``num_points`` points on the circle of radius
    ``2 (1 + max spectral radius)``, which encloses every pole of both
    systems.  A point that still trips the pole guard is pushed outward
    and retried.  Equality holds when the worst
    :func:`scaled_deviation` over all points is at most ``rel_tol``.
    """
    if (r1.p, r1.m) != (r2.p, r2.m):
        raise InputError(
            f"cannot compare a {r1.p}x{r1.m} transfer with a {r2.p}x{r2.m} one")
    if num_points < 1:
        raise InputError(f"num_points must be positive, got {num_points}")
    radius = 2.0 * (1.0 + max(spectral_radius(r1), spectral_radius(r2)))
    worst = 0.0
    for k in range(num_points):
        z = radius * np.exp(2j * np.pi * k / num_points)
        for _ in range(_MAX_RESAMPLES):
            try:
                g1 = eval_transfer(r1, z)
                g2 = eval_transfer(r2, z)
                break
            except PoleError:
                z *= 1.37
        else:
            raise NumericalError(
                f"no pole-free sample point found near radius {radius:.3e}")
        worst = max(worst, scaled_deviation(g1, g2))
    return TransferComparison(worst <= rel_tol, worst, num_points, radius)
