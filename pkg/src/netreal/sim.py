"""Discrete-time simulation with a fixed block evaluation order.

Every update accumulates per-node contributions in ascending node order,
left to right within each block row.  A locality-enforced run can
therefore reproduce the centralized recursion exactly (array equality,
not tolerance): skipping a structurally zero block only ever drops an
exact-zero contribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graphs import NetworkGraph
from .realization import BlockRealization, DMode, check_compatibility


@dataclass(frozen=True, eq=False)
class SignalTrajectory:
    """A finite signal: one stacked, node-major vector per step.

    ``values`` has shape ``(length, width)`` where ``width`` is the sum
    of ``partition``; node ``i`` owns the ``partition[i]`` columns at
    its node-major offset.
    """

    values: np.ndarray
    partition: tuple[int, ...]
    name: str = "signal"

    def __post_init__(self):
        partition = tuple(int(w) for w in self.partition)
        if any(w < 0 for w in partition):
            raise InputError(f"partition must be nonnegative, got {partition}")
        try:
            values = np.array(self.values, dtype=float)
        except (TypeError, ValueError) as exc:
            raise InputError("trajectory values are not numeric") from exc
        width = sum(partition)
        if values.ndim == 1 and values.size == 0:
            values = values.reshape(0, width)
        if values.ndim != 2:
            raise InputError(f"trajectory values must be 2-D, got shape {values.shape}")
        if values.shape[1] != width:
            raise InputError(
                f"trajectory width {values.shape[1]} does not match partition total {width}")
        if values.size and not np.isfinite(values).all():
            raise InputError("trajectory contains non-finite entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "partition", partition)

    @classmethod
    def zeros(cls, partition, length: int, name: str = "signal") -> "SignalTrajectory":
        partition = tuple(int(w) for w in partition)
        return cls(np.zeros((int(length), sum(partition))), partition, name)

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def node_slice(self, i: int) -> slice:
        if not 0 <= i < len(self.partition):
            raise InputError(f"node index {i} out of range")
        start = sum(self.partition[:i])
        return slice(start, start + self.partition[i])


def _coerce_input(real: BlockRealization, u) -> SignalTrajectory:
    if isinstance(u, SignalTrajectory):
        if u.partition != real.dims.inputs:
            raise InputError(
                f"input partition {u.partition} does not match system inputs "
                f"{real.dims.inputs}")
        return u
    return SignalTrajectory(u, real.dims.inputs, "u")


def _coerce_state(real: BlockRealization, x0) -> np.ndarray:
    if x0 is None:
        return np.zeros(real.n)
    x = np.array(x0, dtype=float).reshape(-1)
    if x.size != real.n:
        raise InputError(f"initial state must have {real.n} entries, got {x.size}")
    if x.size and not np.isfinite(x).all():
        raise InputError("initial state contains non-finite entries")
    return x


def _blocks(matrix: np.ndarray, row_counts, col_counts) -> list[list[np.ndarray]]:
    """Contiguous copies of every block, indexed [row node][col node]."""
    row_slices = _partition_slices(row_counts)
    col_slices = _partition_slices(col_counts)
    return [
        [np.ascontiguousarray(matrix[rs, cs]) for cs in col_slices]
        for rs in row_slices
    ]


def _partition_slices(counts) -> list[slice]:
    slices = []
    start = 0
    for w in counts:
        slices.append(slice(start, start + w))
        start += w
    return slices


def simulate_lti(
    real: BlockRealization, u, x0=None
) -> tuple[SignalTrajectory, SignalTrajectory]:
    """Run the state recursion; returns the output and state trajectories.

    Row ``t`` of the state trajectory is the state at step ``t`` (so row
    0 is the initial state), aligned with the output ``y[t]`` it produced.
    Contributions accumulate over column blocks in ascending node order,
    matching :func:`simulate_distributed` exactly.
    """
    u = _coerce_input(real, u)
    x = _coerce_state(real, x0)
    dims = real.dims
    count = dims.num_nodes
    a_blk = _blocks(real.A, dims.states, dims.states)
    b_blk = _blocks(real.B, dims.states, dims.inputs)
    c_blk = _blocks(real.C, dims.outputs, dims.states)
    d_blk = _blocks(real.D, dims.outputs, dims.inputs)
    state_slices = _partition_slices(dims.states)
    out_slices = _partition_slices(dims.outputs)
    in_slices = _partition_slices(dims.inputs)

    steps = u.length
    ys = np.zeros((steps, real.p))
    xs = np.zeros((steps, real.n))
    x_seg = [np.ascontiguousarray(x[s]) for s in state_slices]
    for t in range(steps):
        u_seg = [np.ascontiguousarray(u.values[t, s]) for s in in_slices]
        for i in range(count):
            xs[t, state_slices[i]] = x_seg[i]
            acc = np.zeros(dims.outputs[i])
            for j in range(count):
                acc += c_blk[i][j] @ x_seg[j]
            for j in range(count):
                acc += d_blk[i][j] @ u_seg[j]
            ys[t, out_slices[i]] = acc
        nxt = []
        for i in range(count):
            acc = np.zeros(dims.states[i])
            for j in range(count):
                acc += a_blk[i][j] @ x_seg[j]
            for j in range(count):
                acc += b_blk[i][j] @ u_seg[j]
            nxt.append(acc)
        x_seg = nxt
    return (
        SignalTrajectory(ys, dims.outputs, "y"),
        SignalTrajectory(xs, dims.states, "x"),
    )


def simulate_distributed(
    real: BlockRealization,
    graph: NetworkGraph,
    u,
    x0=None,
    access_log: list | None = None,
) -> tuple[SignalTrajectory, SignalTrajectory, int]:
    """Per-node simulation that only moves state along declared edges.

    Each step every node receives a mailbox holding exactly the states of
    its in-neighbors (a read outside the neighbor set is impossible by
    construction; pass ``access_log`` to record the ``(step, reader,
    source)`` reads actually performed).  Requires strict compatibility.
    Outputs equal :func:`simulate_lti` under array equality, and the
    returned message count is ``steps * number of non-self edges``.
    """
    report = check_compatibility(real, graph, DMode.STRICT)
    if not report.ok:
        worst = ", ".join(
            f"{v.matrix}{v.block}" for v in report.violations[:4])
        raise InputError(
            f"realization is not strictly compatible with the graph ({worst})")
    u = _coerce_input(real, u)
    x = _coerce_state(real, x0)
    dims = real.dims
    count = dims.num_nodes
    neighbors = [
        [j for j in range(count) if graph.has_edge(i, j)] for i in range(count)
    ]
    a_loc = [
        {j: np.ascontiguousarray(real.a_block(i, j)) for j in neighbors[i]}
        for i in range(count)
    ]
    c_loc = [
        {j: np.ascontiguousarray(real.c_block(i, j)) for j in neighbors[i]}
        for i in range(count)
    ]
    b_own = [np.ascontiguousarray(real.b_block(i, i)) for i in range(count)]
    d_own = [np.ascontiguousarray(real.d_block(i, i)) for i in range(count)]
    state_slices = _partition_slices(dims.states)
    out_slices = _partition_slices(dims.outputs)
    in_slices = _partition_slices(dims.inputs)

    steps = u.length
    ys = np.zeros((steps, real.p))
    xs = np.zeros((steps, real.n))
    x_seg = [np.ascontiguousarray(x[s]) for s in state_slices]
    messages = 0
    for t in range(steps):
        mailboxes = []
        for i in range(count):
            box = {j: x_seg[j].copy() for j in neighbors[i]}
            messages += sum(1 for j in neighbors[i] if j != i)
            mailboxes.append(box)
        u_seg = [np.ascontiguousarray(u.values[t, s]) for s in in_slices]
        nxt = []
        for i in range(count):
            xs[t, state_slices[i]] = x_seg[i]
            y_acc = np.zeros(dims.outputs[i])
            x_acc = np.zeros(dims.states[i])
            for j in neighbors[i]:
                if access_log is not None:
                    access_log.append((t, i, j))
                incoming = mailboxes[i][j]
                y_acc += c_loc[i][j] @ incoming
                x_acc += a_loc[i][j] @ incoming
            y_acc += d_own[i] @ u_seg[i]
            x_acc += b_own[i] @ u_seg[i]
            ys[t, out_slices[i]] = y_acc
            nxt.append(x_acc)
        x_seg = nxt
    return (
        SignalTrajectory(ys, dims.outputs, "y"),
        SignalTrajectory(xs, dims.states, "x"),
        messages,
    )


def simulate_imc_loop(
    plant: BlockRealization,
    model: BlockRealization,
    q: BlockRealization,
    reference,
    output_disturbance=None,
) -> tuple[SignalTrajectory, SignalTrajectory, SignalTrajectory]:
    """Closed-loop run of the internal-model structure.

    The controller carries its own copy of ``model`` and the design
    parameter ``q``; the actuation is ``u = q(r + model(u) - y)`` where
    ``y`` is the (possibly disturbed) plant output.  Both plant and
    model must be strictly proper, which breaks the algebraic loop.

    Returns ``(u, y, prediction_error)`` where the prediction error is
    the model output minus the measured output.  With ``model`` equal to
    ``plant`` and no disturbance it is identically zero.
    """
    if plant.num_nodes != model.num_nodes:
        raise InputError(
            f"plant has {plant.num_nodes} nodes, model has {model.num_nodes}")
    if plant.dims.inputs != model.dims.inputs or plant.dims.outputs != model.dims.outputs:
        raise InputError("plant and model must share per-node channel counts")
    if np.any(plant.D) or np.any(model.D):
        raise InputError("plant and model must be strictly proper (zero direct terms)")
    if q.dims.inputs != model.dims.outputs or q.dims.outputs != model.dims.inputs:
        raise InputError(
            "design parameter must map output-sized signals to input-sized ones")
    if not isinstance(reference, SignalTrajectory):
        reference = SignalTrajectory(reference, model.dims.outputs, "r")
    if reference.partition != model.dims.outputs:
        raise InputError(
            f"reference partition {reference.partition} does not match outputs "
            f"{model.dims.outputs}")
    steps = reference.length
    if output_disturbance is None:
        output_disturbance = SignalTrajectory.zeros(model.dims.outputs, steps, "d")
    elif not isinstance(output_disturbance, SignalTrajectory):
        output_disturbance = SignalTrajectory(
            output_disturbance, model.dims.outputs, "d")
    if output_disturbance.partition != model.dims.outputs:
        raise InputError("disturbance partition does not match outputs")
    if output_disturbance.length != steps:
        raise InputError(
            f"disturbance length {output_disturbance.length} does not match "
            f"reference length {steps}")

    x = np.zeros(plant.n)
    x_hat = np.zeros(model.n)
    xi = np.zeros(q.n)
    us = np.zeros((steps, plant.m))
    ys = np.zeros((steps, plant.p))
    errs = np.zeros((steps, plant.p))
    for t in range(steps):
        y = plant.C @ x + output_disturbance.values[t]
        y_hat = model.C @ x_hat
        prediction = y_hat - y
        v = reference.values[t] + prediction
        u = q.C @ xi + q.D @ v
        us[t] = u
        ys[t] = y
        errs[t] = prediction
        x = plant.A @ x + plant.B @ u
        x_hat = model.A @ x_hat + model.B @ u
        xi = q.A @ xi + q.B @ v
    return (
        SignalTrajectory(us, plant.dims.inputs, "u"),
        SignalTrajectory(ys, plant.dims.outputs, "y"),
        SignalTrajectory(errs, plant.dims.outputs, "prediction_error"),
    )
