"""Internal-model controller construction.

The controller wraps a copy of the plant model: for a strictly proper
plant ``(A, B, C)`` and a design parameter ``(E, F, G, H)`` mapping the
predicted-output mismatch to actuation, the loop ``u = q(w + model(u))``
driven by ``w = r - y`` is realized with per-node state pairs
``(model copy, parameter state)``:

    x'[t+1] = (A + B H C) x' + B G xi + B H w
    xi[t+1] = F C x' + E xi + F w
    u       = H C x' + G xi + H w

When B, F and H are block-diagonal and A, C, E, G carry the graph's
sparsity, every nonzero product lands on an edge block, so the
controller passes the strict compatibility check; in all cases the
checker decides.  Blocks with no contributing term come out exactly
zero.
"""

from __future__ import annotations

import numpy as np

from .algebra import multiply, node_major_indices
from .errors import InputError
from .graphs import NodeDims
from .realization import BlockRealization


def _check_imc_pair(plant: BlockRealization, q: BlockRealization) -> None:
    if plant.num_nodes != q.num_nodes:
        raise InputError(
            f"plant has {plant.num_nodes} nodes, design parameter has {q.num_nodes}")
    if np.any(plant.D):
        raise InputError("plant must be strictly proper (zero direct term)")
    if q.dims.inputs != plant.dims.outputs:
        raise InputError(
            "design parameter input counts must match plant output counts, "
            f"got {q.dims.inputs} vs {plant.dims.outputs}")
    if q.dims.outputs != plant.dims.inputs:
        raise InputError(
            "design parameter output counts must match plant input counts, "
            f"got {q.dims.outputs} vs {plant.dims.inputs}")


def imc_controller(plant: BlockRealization, q: BlockRealization) -> BlockRealization:
    """Controller realization of ``Q (I - P Q)^{-1}`` driven by ``r - y``.

    ``q`` maps plant-output-sized signals to plant-input-sized signals.
    Node ``k`` of the result holds ``(plant-model state, parameter state)``;
    its input is the per-node reference error and its output the per-node
    actuation.
    """
    _check_imc_pair(plant, q)
    a, b, c = plant.A, plant.B, plant.C
    e, f, g, h = q.A, q.B, q.C, q.D
    bh = b @ h
    n1, n2 = plant.n, q.n

    a_new = np.zeros((n1 + n2, n1 + n2))
    a_new[:n1, :n1] = a + bh @ c
    a_new[:n1, n1:] = b @ g
    a_new[n1:, :n1] = f @ c
    a_new[n1:, n1:] = e
    b_new = np.vstack([bh, f])
    c_new = np.hstack([h @ c, g])
    d_new = h

    perm = node_major_indices(plant.dims.states, q.dims.states)
    dims = NodeDims(
        tuple(x + y for x, y in zip(plant.dims.states, q.dims.states)),
        plant.dims.outputs,
        plant.dims.inputs,
    )
    return BlockRealization(
        dims, a_new[np.ix_(perm, perm)], b_new[perm, :], c_new[:, perm], d_new)


def ideal_maps(
    plant: BlockRealization, q: BlockRealization
) -> tuple[BlockRealization, BlockRealization]:
    """Exact-model closed-loop maps ``(r -> u, r -> y)``.

    With the model matching the plant the loop collapses: the reference
    drives the actuation through ``q`` alone and the output through the
    series system, so the maps are ``q`` itself and ``plant . q``.
    """
    _check_imc_pair(plant, q)
    return q, multiply(plant, q)
