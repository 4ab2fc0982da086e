"""Cluster-state protocols with lossy memory transfers.

Every transfer of a qumode into or out of a memory is modelled as a beam
splitter of transmissivity ``1 - delta_eta`` with a vacuum ancilla
(:func:`lossy_coupling`).  Cluster nodes may carry a frame rotation: the
cluster quadratures of a node are ``R(frame) (q, p)`` of its physical mode, so
that nullifiers read ``p_i - sum_j A_ij q_j`` in those quadratures.

Two CZ roles appear throughout.  The *stored* qumode is the one that reaches
the first memory earlier; the *field* qumode arrives later.  Three memories
implement the gate:

* memory 1 stores the stored qumode, couples it to the field qumode, releases it;
* memory 2 stores the field qumode, squeezes it against the stored one, releases it;
* memory 3 stores the stored qumode, couples it to the field qumode, and
  releases the field qumode (the output ports are exchanged).

Each memory therefore contributes one lossy transfer before and one after its
interaction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence, Union

import numpy as np

from .cz import cz_sequence
from .gaussian import (
    GaussianState,
    apply,
    db_to_r,
    displacement,
    fidelity,
    homodyne,
    lossy_coupling,
    reduced,
    rotation,
    squeezed_vacuum,
    tensor,
    trace_out,
    vacuum,
)
from .lattice import lattice_links, site_nodes
from .raman import RamanBS, RamanTMS, op_symplectic

# frame of a read-out qumode of a two-mode squeezed pair
READOUT_FRAME = np.pi / 2
MAX_LATTICE_MODES = 256

# (transfer in, transfer out) per memory; 0 = field qumode, 1 = stored qumode
CZ_TRANSFERS = ((1, 1), (0, 0), (1, 0))


@dataclass(frozen=True)
class ClusterGraph:
    """Weighted undirected graph over hashable node labels."""

    nodes: tuple
    adjacency: np.ndarray

    def __post_init__(self):
        nodes = tuple(self.nodes)
        adj = np.array(self.adjacency, dtype=float).reshape(len(nodes), len(nodes))
        if len(set(nodes)) != len(nodes):
            raise ValueError("Node labels must be unique")
        if not np.allclose(adj, adj.T):
            raise ValueError("Adjacency matrix must be symmetric")
        adj.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def empty(cls, nodes: Sequence[Hashable] = ()) -> "ClusterGraph":
        return cls(tuple(nodes), np.zeros((len(nodes), len(nodes))))

    def index(self, node) -> int:
        try:
            return self.nodes.index(node)
        except ValueError:
            raise KeyError(f"Unknown node {node!r}") from None

    def with_nodes(self, *nodes) -> "ClusterGraph":
        n_old = len(self.nodes)
        adj = np.zeros((n_old + len(nodes),) * 2)
        adj[:n_old, :n_old] = self.adjacency
        return ClusterGraph(self.nodes + tuple(nodes), adj)

    def with_edge(self, u, v, weight: float = 1.0) -> "ClusterGraph":
        i, j = self.index(u), self.index(v)
        if i == j:
            raise ValueError("Self loops are not allowed")
        adj = self.adjacency.copy()
        adj[i, j] += weight
        adj[j, i] += weight
        return ClusterGraph(self.nodes, adj)

    def edges(self) -> list[tuple]:
        i, j = np.nonzero(np.triu(self.adjacency))
        return [(self.nodes[a], self.nodes[b], float(self.adjacency[a, b])) for a, b in zip(i, j)]

    def relabel(self, order: Sequence[Hashable]) -> "ClusterGraph":
        idx = [self.index(v) for v in order]
        return ClusterGraph(tuple(order), self.adjacency[np.ix_(idx, idx)])


@dataclass(frozen=True)
class ProtocolResult:
    """A Gaussian state together with the cluster graph it encodes.

    ``mode_map`` sends each graph node to its mode in ``state`` and ``frames``
    gives each node's frame rotation.
    """

    state: GaussianState
    graph: ClusterGraph
    mode_map: Mapping[Hashable, int]
    frames: Mapping[Hashable, float] = field(default_factory=dict)

    def __post_init__(self):
        modes = sorted(self.mode_map.values())
        if modes != list(range(self.state.n_modes)):
            raise ValueError("mode_map must be a bijection onto the state's modes")
        if set(self.mode_map) != set(self.graph.nodes):
            raise ValueError("mode_map keys must match the graph nodes")
        frames = {v: float(self.frames.get(v, 0.0)) for v in self.graph.nodes}
        object.__setattr__(self, "mode_map", dict(self.mode_map))
        object.__setattr__(self, "frames", frames)

    def mode(self, node) -> int:
        try:
            return self.mode_map[node]
        except KeyError:
            raise KeyError(f"Unknown node {node!r}") from None

    def cluster_frame_state(self) -> GaussianState:
        """State in cluster quadratures, modes ordered as ``graph.nodes``."""
        order = [self.mode(v) for v in self.graph.nodes]
        state = reduced(self.state, order)
        for k, v in enumerate(self.graph.nodes):
            if self.frames[v]:
                state = apply(state, rotation(self.frames[v]), [k])
        return state

    def canonical(self, order: Sequence[Hashable] | None = None) -> "ProtocolResult":
        """Same result with modes permuted into ``order`` (default: graph order)."""
        order = list(self.graph.nodes if order is None else order)
        state = reduced(self.state, [self.mode(v) for v in order])
        return ProtocolResult(
            state, self.graph.relabel(order), {v: k for k, v in enumerate(order)}, self.frames
        )


def _check_delta_eta(delta_eta: float) -> float:
    delta_eta = float(delta_eta)
    if not 0.0 <= delta_eta <= 1.0:
        raise ValueError(f"delta_eta must lie in [0, 1], got {delta_eta}")
    return delta_eta


def _check_r(r: float) -> float:
    r = float(r)
    if not np.isfinite(r) or r < 0:
        raise ValueError(f"Squeezing must be finite and non-negative, got {r}")
    return r


# ---------------------------------------------------------------------------
# two-qumode cluster


def two_mode_squeezed(r: float) -> GaussianState:
    return apply(vacuum(2), op_symplectic(RamanTMS(r, 0.0)), [0, 1])


def two_qumode_cluster(r: float, delta_eta: float = 0.0, nodes=("a", "b")) -> ProtocolResult:
    """Two-mode squeezed pair whose memory half is read out with loss.

    Args:
        r: squeezing parameter of the Raman two-mode squeezer.
        delta_eta: read-out inefficiency of the memory.
        nodes: labels of the field qumode and the read-out qumode.

    Returns:
        A two-node cluster. The read-out node carries a pi/2 frame.
    """
    r = _check_r(r)
    delta_eta = _check_delta_eta(delta_eta)
    state = lossy_coupling(two_mode_squeezed(r), 1, delta_eta)
    graph = ClusterGraph.empty(nodes).with_edge(nodes[0], nodes[1])
    return ProtocolResult(state, graph, {nodes[0]: 0, nodes[1]: 1}, {nodes[1]: READOUT_FRAME})


def two_qumode_fidelity_closed_form(db: float, delta_eta: float) -> float:
    """Fidelity between the lossy and the lossless two-qumode cluster."""
    r = db_to_r(db)
    tau = np.sqrt(1.0 - _check_delta_eta(delta_eta))
    return float(4.0 / (1.0 + tau + (1.0 - tau) * np.cosh(2 * r)) ** 2)


def two_qumode_fidelity(db: float, delta_eta: float) -> float:
    r = db_to_r(db)
    return fidelity(two_qumode_cluster(r, delta_eta).state, two_qumode_cluster(r, 0.0).state)


# ---------------------------------------------------------------------------
# CZ gate through three memories


def _per_memory(delta_eta) -> np.ndarray:
    losses = np.broadcast_to(np.asarray(delta_eta, dtype=float), (3,)).copy()
    for x in losses:
        _check_delta_eta(x)
    return losses


def apply_cz(
    result: ProtocolResult,
    field_node,
    stored_node,
    delta_eta: Union[float, Sequence[float]] = 0.0,
) -> ProtocolResult:
    """Entangle two nodes with a memory-synthesized CZ.

    Args:
        result: the current cluster.
        field_node: the qumode arriving later, coupled to each memory as a field.
        stored_node: the qumode stored first.
        delta_eta: transfer inefficiency, either shared or one value per memory.

    Returns:
        The updated cluster with an edge of weight one between the nodes.
    """
    if field_node == stored_node:
        raise ValueError("CZ needs two distinct nodes")
    losses = _per_memory(delta_eta)
    modes = (result.mode(field_node), result.mode(stored_node))
    frames = (result.frames[field_node], result.frames[stored_node])
    seq = cz_sequence(frames)
    state = result.state
    for op, (m_in, m_out), loss in zip(seq.raman_ops, CZ_TRANSFERS, losses):
        if loss:
            state = lossy_coupling(state, modes[m_in], loss)
        state = apply(state, op_symplectic(op), modes)
        if loss:
            state = lossy_coupling(state, modes[m_out], loss)
    return ProtocolResult(
        state, result.graph.with_edge(field_node, stored_node), result.mode_map, result.frames
    )


def cz_test_inputs(r: float) -> ProtocolResult:
    """Product input for the CZ fidelity benchmark: a p-squeezed field qumode
    and a q-squeezed stored qumode."""
    state = tensor(squeezed_vacuum(r), squeezed_vacuum(-r))
    return ProtocolResult(state, ClusterGraph.empty(("field", "stored")), {"field": 0, "stored": 1})


def cz_fidelity(db: float, delta_eta: float) -> float:
    r = db_to_r(db)
    inputs = cz_test_inputs(r)
    lossy = apply_cz(inputs, "field", "stored", delta_eta)
    ideal = apply_cz(inputs, "field", "stored", 0.0)
    return fidelity(lossy.state, ideal.state)


def cz_fidelity_closed_form(db: float, delta_eta: float) -> float:
    """Closed form of :func:`cz_fidelity`."""
    r = db_to_r(db)
    de = _check_delta_eta(delta_eta)
    if de == 0.0:
        # the polynomial cancels to 1 only up to rounding
        return 1.0
    t = 1.0 - de
    s = np.sqrt(t)
    ch, sh = np.cosh(2 * r), np.sinh(2 * r)
    x = (
        -(-2 * t**1.5 + 2 * t**5 + t**3 + t**2 + 2 * s - 1) * t
        - ((t**2 - 6 * t + 2 * s - 2) * t + 1) * t * sh
        + (-2 * t**2.5 + 2 * t**6 + t**4 - de + 3) * ch
        + 3
    )
    y = (
        -2 * t**1.5
        + 2 * t**3.5
        - 2 * t**6
        - t**5
        - t**3
        + t**2
        + ((t**2 - 2 * t + 2 * s - 6) * t + 1) * t**2 * sh
        + (-2 * t**3.5 + 2 * t**6 + t**5 + t**2 + 2) * ch
        + 3
    )
    return float(4.0 / np.sqrt(x * y))


# ---------------------------------------------------------------------------
# lattices


def build_2d_cluster(d: int, n: int, r: float, delta_eta: float = 0.0) -> ProtocolResult:
    """Time-frequency square lattice of two-qumode clusters.

    Site ``(f, t)`` holds the nodes ``(f, t, 0)`` (field) and ``(f, t, 1)``
    (read out of memory); sites are linked by CZ gates in the order given by
    :func:`lattice_links`.

    Args:
        d: number of frequency channels.
        n: number of time sites per channel.
        r: squeezing of each site's two-mode squeezer.
        delta_eta: inefficiency of every memory transfer.
    """
    if int(d) != d or int(n) != n or d < 1 or n < 1:
        raise ValueError(f"d and n must be positive integers, got {d}, {n}")
    if 2 * d * n > MAX_LATTICE_MODES:
        raise ValueError(f"Lattice of {2 * d * n} modes exceeds the limit of {MAX_LATTICE_MODES}")
    r = _check_r(r)
    delta_eta = _check_delta_eta(delta_eta)
    pair = two_qumode_cluster(r, delta_eta).state
    nodes = [v for f in range(d) for t in range(n) for v in site_nodes(f, t)]
    state = tensor(*([pair] * (d * n)))
    graph = ClusterGraph.empty(nodes)
    for f in range(d):
        for t in range(n):
            graph = graph.with_edge(*site_nodes(f, t))
    frames = {v: READOUT_FRAME for v in nodes if v[2] == 1}
    result = ProtocolResult(state, graph, {v: k for k, v in enumerate(nodes)}, frames)
    for link in lattice_links(d, n):
        result = apply_cz(result, link.field, link.stored, delta_eta)
    return result


def nullifier_variances(result: ProtocolResult) -> np.ndarray:
    """Variances of ``p_i - sum_j A_ij q_j`` for every node, in graph order."""
    cov = result.cluster_frame_state().cov
    adj = result.graph.adjacency
    n = len(result.graph.nodes)
    out = np.empty(n)
    for i in range(n):
        vec = np.zeros(2 * n)
        vec[2 * i + 1] = 1.0
        vec[0::2] -= adj[i]
        out[i] = vec @ cov @ vec
    return out


# ---------------------------------------------------------------------------
# measurement helpers


def pi_phase_route_with_memory(state: GaussianState, mode: int) -> tuple[GaussianState, GaussianState]:
    """Pass ``mode`` through an empty memory with a pi beam splitter.

    Returns:
        The state with ``mode`` sign-flipped, and the memory state afterwards.
    """
    extended = tensor(state, vacuum(1))
    memory = extended.n_modes - 1
    out = apply(extended, op_symplectic(RamanBS(np.pi, 0.0)), [mode, memory])
    return trace_out(out, [memory]), reduced(out, [memory])


def pi_phase_route(state: GaussianState, mode: int) -> GaussianState:
    return pi_phase_route_with_memory(state, mode)[0]


def cz_teleport(
    input_state: GaussianState, r: float, outcome: float, delta_eta: float = 0.0
) -> GaussianState:
    """One-bit teleportation through a CZ with a p-squeezed ancilla.

    The input's ``p`` is measured with result ``outcome`` and the ancilla is
    displaced by ``-outcome`` in ``q``.  Ideally this maps the input to its
    Fourier transform, ``rotation(pi/2)`` applied to the input.
    """
    if input_state.n_modes != 1:
        raise ValueError("cz_teleport expects a single-mode input")
    state = tensor(input_state, squeezed_vacuum(_check_r(r)))
    inputs = ProtocolResult(state, ClusterGraph.empty(("in", "out")), {"in": 0, "out": 1})
    entangled = apply_cz(inputs, "in", "out", delta_eta)
    conditioned = homodyne(entangled.state, 0, np.pi / 2, outcome)
    return apply(conditioned, displacement(-outcome, 0.0), [0])


def fourier_target(input_state: GaussianState) -> GaussianState:
    return apply(input_state, rotation(np.pi / 2), [0])
