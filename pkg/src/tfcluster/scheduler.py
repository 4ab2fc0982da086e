"""Lowering of a time-frequency lattice to a chain of Raman memories.

Memories are numbered in chain order.  Ids ``0 .. d-1`` create the two-qumode
clusters of channel ``f`` (stage a).  Each time link of channel ``f`` is served
by the triple ``d + 3f + (0, 1, 2)`` (stage b), and each frequency link
between channels ``f`` and ``f + 1`` by ``4d + 3f + (0, 1, 2)`` (stage c).
Every memory sees the stream only after all earlier memories have acted on it.

Site ``(f, t)`` is created at bin ``period * t`` of channel ``f`` (odd channels
one bin later); its memory half is released ``readout_offset`` bins later.  A
CZ moves both of its qumodes to later bins, found greedily as the first free
plaquette.  The two qumodes of a frequency link exchange channels.

Measurement tags, if requested, are issued by one extra memory per channel
(ids from ``7d - 3`` on) that do not count towards the chain.
"""

from __future__ import annotations

import json
import math
import warnings
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .cz import cz_sequence
from .gaussian import apply, lossy_coupling, tensor
from .lattice import STAGE_FREQUENCY, STAGE_TIME, lattice_links, site_nodes
from .protocols import (
    MAX_LATTICE_MODES,
    READOUT_FRAME,
    ClusterGraph,
    ProtocolResult,
    pi_phase_route,
    two_mode_squeezed,
)
from .raman import RamanBS, RamanTMS, op_symplectic

FORMAT_VERSION = 1
DEFAULT_PERIOD = 6
DEFAULT_READOUT_OFFSET = 5
DEFAULT_COHERENCE_MARGIN = 10.0
# above this fraction of the time-bandwidth bound compile warns
BANDWIDTH_WARNING_FRACTION = 0.5

FULL_TRANSFER = np.pi / 2


class ScheduleError(ValueError):
    """A lattice that cannot be scheduled under the given constraints."""


class OpKind(str, Enum):
    TMS_CREATE = "TMS_CREATE"
    BS_READIN = "BS_READIN"
    BS_READOUT = "BS_READOUT"
    BS_COUPLE = "BS_COUPLE"
    BS_PASSTHROUGH_HOLD = "BS_PASSTHROUGH_HOLD"
    PI_PHASE_MEASURE_TAG = "PI_PHASE_MEASURE_TAG"


@dataclass(frozen=True)
class Plaquette:
    """A time-frequency tile of duration ``dt`` and bandwidth ``dw``."""

    freq_index: int
    time_bin: int
    dt: float
    dw: float

    def __post_init__(self):
        if self.freq_index < 0 or self.time_bin < 0:
            raise ValueError(f"Plaquette indices must be non-negative: {self}")
        if self.dt <= 0 or self.dw <= 0:
            raise ValueError("Plaquette dt and dw must be positive")
        if self.dt * self.dw < 0.5 * (1 - 1e-12):
            raise ValueError(f"dt*dw = {self.dt * self.dw} violates dt*dw >= 1/2")


@dataclass(frozen=True)
class ScheduleEntry:
    """One memory operation.  ``param`` is a beam splitter angle or a
    squeezing parameter; ``None`` marks the cluster squeezing, which is only
    fixed when the schedule is executed."""

    memory_id: int
    op_kind: OpKind
    target: Plaquette
    param: Optional[float] = None
    phase: float = 0.0

    @property
    def time_bin(self) -> int:
        return self.target.time_bin

    @property
    def freq_index(self) -> int:
        return self.target.freq_index

    def record(self) -> dict:
        return {
            "memory_id": self.memory_id,
            "time_bin": self.time_bin,
            "op": self.op_kind.value,
            "freq_index": self.freq_index,
            "param": self.param,
            "phase": self.phase,
        }


@dataclass(frozen=True)
class ArchitectureConstraints:
    """Memory coherence time ``t_mem`` (s) and accessible bandwidth ``delta_full`` (rad/s)."""

    t_mem: float
    delta_full: float
    coherence_margin: float = DEFAULT_COHERENCE_MARGIN

    def __post_init__(self):
        for name in ("t_mem", "delta_full", "coherence_margin"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class MemoryRole:
    memory_id: int
    stage: str
    channel: int
    position: int = 0


@dataclass(frozen=True)
class Schedule:
    d: int
    n: int
    dt: float
    dw: float
    constraints: ArchitectureConstraints
    entries: tuple
    period: int = DEFAULT_PERIOD
    readout_offset: int = DEFAULT_READOUT_OFFSET

    @property
    def memory_ids(self) -> set[int]:
        return {e.memory_id for e in self.entries}

    @property
    def chain_memory_ids(self) -> set[int]:
        return {m for m in self.memory_ids if m < memory_count(self.d)}

    @property
    def n_bins(self) -> int:
        return 1 + max(e.time_bin for e in self.entries) if self.entries else 0

    def by_memory(self) -> dict[int, list[ScheduleEntry]]:
        grouped: dict[int, list[ScheduleEntry]] = defaultdict(list)
        for e in self.entries:
            grouped[e.memory_id].append(e)
        return {m: sorted(es, key=lambda e: e.time_bin) for m, es in sorted(grouped.items())}

    # -- serialization -----------------------------------------------------

    def header(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "d": self.d,
            "n": self.n,
            "dt": self.dt,
            "dw": self.dw,
            "period": self.period,
            "readout_offset": self.readout_offset,
            "constraints": asdict(self.constraints),
            "conventions": {
                "vacuum_variance": 0.5,
                "quadrature_order": "q1,p1,q2,p2,...",
                "bs_param": "phi (rad), control phase theta",
                "tms_param": "r, control phase psi; null means the cluster squeezing",
            },
        }

    def to_json(self) -> str:
        doc = {"header": self.header(), "entries": [e.record() for e in self.entries]}
        return json.dumps(doc, indent=2)

    def to_jsonl(self) -> str:
        lines = [json.dumps({"header": self.header()})]
        lines += [json.dumps(e.record()) for e in self.entries]
        return "\n".join(lines) + "\n"

    @classmethod
    def _from_parts(cls, header: dict, records: Sequence[dict]) -> "Schedule":
        if header.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"Unsupported schedule format {header.get('format_version')!r}")
        dt, dw = float(header["dt"]), float(header["dw"])
        entries = tuple(
            ScheduleEntry(
                int(r["memory_id"]),
                OpKind(r["op"]),
                Plaquette(int(r["freq_index"]), int(r["time_bin"]), dt, dw),
                None if r["param"] is None else float(r["param"]),
                float(r["phase"]),
            )
            for r in records
        )
        return cls(
            int(header["d"]),
            int(header["n"]),
            dt,
            dw,
            ArchitectureConstraints(**header["constraints"]),
            entries,
            int(header["period"]),
            int(header["readout_offset"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "Schedule":
        doc = json.loads(text)
        return cls._from_parts(doc["header"], doc["entries"])

    @classmethod
    def from_jsonl(cls, text: str) -> "Schedule":
        lines = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not lines or "header" not in lines[0]:
            raise ValueError("Line-delimited schedule must start with a header record")
        return cls._from_parts(lines[0]["header"], lines[1:])

    def save(self, path, fmt: str = "jsonl") -> Path:
        path = Path(path)
        if fmt == "jsonl":
            path.write_text(self.to_jsonl())
        elif fmt == "json":
            path.write_text(self.to_json())
        else:
            raise ValueError(f"Unknown schedule format {fmt!r}")
        return path

    @classmethod
    def load(cls, path) -> "Schedule":
        path = Path(path)
        text = path.read_text()
        return cls.from_jsonl(text) if path.suffix == ".jsonl" else cls.from_json(text)


# ---------------------------------------------------------------------------
# memory budget


def _check_positive_int(name: str, value) -> int:
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def stage_memory_counts(d: int) -> tuple[int, int, int]:
    d = _check_positive_int("d", d)
    return d, 3 * d, 3 * (d - 1)


def memory_count(d: int) -> int:
    """Memories in the chain for ``d`` frequency channels: ``7d - 3``."""
    return sum(stage_memory_counts(d))


def memory_roles(d: int) -> list[MemoryRole]:
    roles = [MemoryRole(f, "site", f) for f in range(d)]
    roles += [MemoryRole(d + 3 * f + k, STAGE_TIME, f, k) for f in range(d) for k in range(3)]
    roles += [
        MemoryRole(4 * d + 3 * f + k, STAGE_FREQUENCY, f, k) for f in range(d - 1) for k in range(3)
    ]
    return roles


def bandwidth_bound(constraints: ArchitectureConstraints, dt: float) -> int:
    # tolerate rounding in products such as 0.1 * 30
    return int(math.floor(constraints.delta_full * dt + 1e-9))


def hold_limit(constraints: ArchitectureConstraints, dt: float) -> int:
    """Longest storage in bins allowed by the coherence time."""
    return int(math.floor(constraints.t_mem / dt + 1e-9))


# ---------------------------------------------------------------------------
# compilation


def channel_offset(f: int) -> int:
    """Odd channels lag by one bin so that frequency-linked qumodes differ in time."""
    return f % 2


class _Stream:
    """Occupancy of the plaquettes as seen by the memory currently compiling."""

    def __init__(self):
        self.cell: dict[tuple[int, int], tuple] = {}
        self.where: dict[tuple, tuple[int, int]] = {}

    def put(self, node, channel: int, time_bin: int):
        if (channel, time_bin) in self.cell:
            raise ScheduleError(f"Plaquette ({channel}, {time_bin}) is already occupied")
        self.cell[(channel, time_bin)] = node
        self.where[node] = (channel, time_bin)

    def take(self, node) -> tuple[int, int]:
        pos = self.where.pop(node)
        del self.cell[pos]
        return pos

    def first_free(self, channel: int, after: int) -> int:
        b = after + 1
        while (channel, b) in self.cell:
            b += 1
        return b


class _Compiler:
    def __init__(self, d, n, dt, dw, period, readout_offset):
        self.d, self.n = d, n
        self.dt, self.dw = dt, dw
        self.period, self.readout_offset = period, readout_offset
        self.stream = _Stream()
        self.entries: list[ScheduleEntry] = []
        self.frames = {}

    def _emit(self, memory, kind, channel, time_bin, param=None, phase=0.0):
        plaquette = Plaquette(channel, time_bin, self.dt, self.dw)
        self.entries.append(ScheduleEntry(memory, kind, plaquette, param, float(phase)))

    def _holds(self, memory, channel, start, stop):
        for b in range(start + 1, stop):
            self._emit(memory, OpKind.BS_PASSTHROUGH_HOLD, channel, b, 0.0)

    def sites(self, f: int):
        for t in range(self.n):
            field_node, memory_node = site_nodes(f, t)
            b0 = self.period * t + channel_offset(f)
            b1 = b0 + self.readout_offset
            self._emit(f, OpKind.TMS_CREATE, f, b0)
            self.stream.put(field_node, f, b0)
            self._holds(f, f, b0, b1)
            self._emit(f, OpKind.BS_READOUT, f, b1, FULL_TRANSFER)
            self.stream.put(memory_node, f, b1)
            self.frames[field_node] = 0.0
            self.frames[memory_node] = READOUT_FRAME

    def interaction(self, memory, stored, partner, op, exchange, last_bin):
        """Store ``stored``, act with ``op`` on ``partner`` and release a qumode."""
        channel, b_in = self.stream.where[stored]
        partner_channel, b_act = self.stream.where[partner]
        if b_in <= last_bin:
            raise ScheduleError(f"Memory {memory} is still busy at bin {b_in}")
        if b_act <= b_in:
            raise ScheduleError(
                f"Memory {memory}: stored qumode {stored} (bin {b_in}) must precede "
                f"{partner} (bin {b_act})"
            )
        self.stream.take(stored)
        self._emit(memory, OpKind.BS_READIN, channel, b_in, FULL_TRANSFER)
        self._holds(memory, channel, b_in, b_act)
        if isinstance(op, RamanTMS):
            self._emit(memory, OpKind.TMS_CREATE, partner_channel, b_act, op.r, op.psi)
        else:
            self._emit(memory, OpKind.BS_COUPLE, partner_channel, b_act, op.phi, op.theta)
        released = stored
        if exchange:
            self.stream.take(partner)
            self.stream.put(stored, partner_channel, b_act)
            released = partner
        b_out = self.stream.first_free(channel, b_act)
        self._holds(memory, channel, b_act, b_out)
        self._emit(memory, OpKind.BS_READOUT, channel, b_out, FULL_TRANSFER)
        self.stream.put(released, channel, b_out)
        return b_out

    def triple(self, first_memory: int, links):
        seqs = [cz_sequence((self.frames[l.field], self.frames[l.stored])) for l in links]
        # memory 1 stores the stored qumode, memory 2 the field qumode, memory 3
        # the stored qumode again and releases the field qumode
        for k in range(3):
            memory = first_memory + k
            last_bin = -1
            for link, seq in zip(links, seqs):
                stored, partner = (link.field, link.stored) if k == 1 else (link.stored, link.field)
                last_bin = self.interaction(
                    memory, stored, partner, seq.raman_ops[k], k == 2, last_bin
                )

    def measurement_tags(self):
        base = memory_count(self.d)
        for (channel, b), node in sorted(self.stream.cell.items(), key=lambda kv: kv[0][::-1]):
            self._emit(base + channel, OpKind.PI_PHASE_MEASURE_TAG, channel, b, np.pi, 0.0)


def compile(
    d: int,
    n: int,
    constraints: ArchitectureConstraints,
    dt: float,
    *,
    period: int = DEFAULT_PERIOD,
    readout_offset: int = DEFAULT_READOUT_OFFSET,
    measure: bool = False,
) -> Schedule:
    """Compile a ``d`` by ``n`` lattice into a memory-chain schedule.

    Args:
        d: number of frequency channels.
        n: number of time sites per channel.
        constraints: memory coherence time and bandwidth.
        dt: plaquette duration in seconds; the bandwidth is ``1/(2 dt)``.
        period: bins between consecutive sites of one channel.
        readout_offset: bins between a site's field qumode and its read-out.
        measure: also tag every final qumode for pi-phase measurement routing.

    Returns:
        A validated :class:`Schedule`.

    Raises:
        ScheduleError: if a constraint is violated; the message names the bound.
    """
    d = _check_positive_int("d", d)
    n = _check_positive_int("n", n)
    if not (np.isfinite(dt) and dt > 0):
        raise ScheduleError(f"dt must be positive, got {dt}")
    bound = bandwidth_bound(constraints, dt)
    if d > bound:
        raise ScheduleError(
            f"d = {d} exceeds the time-bandwidth bound floor(delta_full * dt) = {bound}"
        )
    if d > BANDWIDTH_WARNING_FRACTION * bound:
        warnings.warn(
            f"d = {d} is above half the time-bandwidth bound {bound}", RuntimeWarning, stacklevel=2
        )
    if dt * constraints.coherence_margin > constraints.t_mem * (1 + 1e-12):
        raise ScheduleError(
            f"dt = {dt} violates dt <= t_mem / {constraints.coherence_margin:g} "
            f"= {constraints.t_mem / constraints.coherence_margin}"
        )
    if not 1 <= readout_offset < period:
        raise ScheduleError("Layout requires 1 <= readout_offset < period")

    comp = _Compiler(d, n, dt, 1.0 / (2.0 * dt), period, readout_offset)
    for f in range(d):
        comp.sites(f)
    links = lattice_links(d, n)
    for role in memory_roles(d):
        if role.stage == "site" or role.position:
            continue
        group = [l for l in links if l.stage == role.stage and l.channel == role.channel]
        if group:
            comp.triple(role.memory_id, group)
        else:
            # a triple with nothing to link still belongs to the chain
            for k in range(3):
                comp._emit(role.memory_id + k, OpKind.BS_PASSTHROUGH_HOLD, role.channel, 0, 0.0)
    if measure:
        comp.measurement_tags()

    schedule = Schedule(d, n, dt, comp.dw, constraints, tuple(comp.entries), period, readout_offset)
    report = validate(schedule)
    if not report:
        raise ScheduleError("Compiled schedule failed validation: " + "; ".join(report.diagnostics))
    return schedule


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationResult:
    valid: bool
    diagnostics: tuple = field(default_factory=tuple)

    def __bool__(self):
        return self.valid


def validate(schedule: Schedule) -> ValidationResult:
    """Replay occupancy of memories and plaquettes.

    Checks that a memory never holds two qumodes, issues at most one
    operation per bin and never stores longer than the coherence time; that no
    qumode is released into an occupied plaquette or read from an empty one;
    and that the chain uses exactly ``7d - 3`` memories.
    """
    diag: list[str] = []
    try:
        expected = memory_count(schedule.d)
    except ValueError as exc:
        return ValidationResult(False, (str(exc),))
    limit = hold_limit(schedule.constraints, schedule.dt)

    chain = schedule.chain_memory_ids
    if len(chain) != expected or chain != set(range(expected)):
        diag.append(f"count: chain uses {len(chain)} memories, expected 7d-3 = {expected}")

    occupied: set[tuple[int, int]] = set()
    for memory, entries in schedule.by_memory().items():
        bins = [e.time_bin for e in entries]
        if len(set(bins)) != len(bins):
            diag.append(f"memory {memory}: several operations in one time bin")
        held: Optional[int] = None
        creating = memory < schedule.d
        for e in entries:
            cell = (e.freq_index, e.time_bin)
            kind = e.op_kind
            if kind == OpKind.BS_READIN:
                if held is not None:
                    diag.append(
                        f"occupancy: memory {memory} reads in at bin {e.time_bin} while holding a qumode"
                    )
                if cell not in occupied:
                    diag.append(f"memory {memory}: reads in from empty plaquette {cell}")
                occupied.discard(cell)
                held = e.time_bin
            elif kind == OpKind.TMS_CREATE and held is None:
                if not creating:
                    diag.append(f"memory {memory}: creates a pair outside stage a")
                if cell in occupied:
                    diag.append(f"collision: memory {memory} creates into occupied plaquette {cell}")
                occupied.add(cell)
                held = e.time_bin
            elif kind in (OpKind.TMS_CREATE, OpKind.BS_COUPLE):
                if held is None:
                    diag.append(f"memory {memory}: interaction at bin {e.time_bin} while empty")
                if cell not in occupied:
                    diag.append(f"memory {memory}: interaction with empty plaquette {cell}")
            elif kind == OpKind.BS_READOUT:
                if held is None:
                    diag.append(f"memory {memory}: read-out at bin {e.time_bin} while empty")
                else:
                    if e.time_bin - held > limit:
                        diag.append(
                            f"hold: memory {memory} stores {e.time_bin - held} bins, "
                            f"limit t_mem/dt = {limit}"
                        )
                if cell in occupied:
                    diag.append(f"collision: memory {memory} reads out into occupied plaquette {cell}")
                occupied.add(cell)
                held = None
            elif kind == OpKind.PI_PHASE_MEASURE_TAG:
                if held is not None:
                    diag.append(f"memory {memory}: measurement tag while holding a qumode")
                if cell not in occupied:
                    diag.append(f"memory {memory}: measurement tag on empty plaquette {cell}")
        if held is not None:
            diag.append(f"occupancy: memory {memory} still holds a qumode at the end")
    return ValidationResult(not diag, tuple(diag))


# ---------------------------------------------------------------------------
# execution


def execute(schedule: Schedule, r: float, delta_eta: float = 0.0) -> ProtocolResult:
    """Replay a schedule on Gaussian states.

    Memories act in chain order.  Stage-a pair creation uses squeezing ``r``;
    every read-in and read-out is a lossy transfer with inefficiency
    ``delta_eta``; interactions use the parameters stored in the schedule.
    The third memory of each CZ triple releases the qumode it met in the
    field, leaving its stored qumode in that plaquette.
    """
    report = validate(schedule)
    if not report:
        raise ScheduleError("Cannot execute an invalid schedule: " + "; ".join(report.diagnostics))
    if 2 * schedule.d * schedule.n > MAX_LATTICE_MODES:
        raise ValueError(
            f"Lattice of {2 * schedule.d * schedule.n} modes exceeds the limit of {MAX_LATTICE_MODES}"
        )
    if not 0.0 <= delta_eta <= 1.0:
        raise ValueError(f"delta_eta must lie in [0, 1], got {delta_eta}")
    roles = {role.memory_id: role for role in memory_roles(schedule.d)}

    state = None
    nodes: list = []
    edges: list = []
    frames: dict = {}
    cell: dict[tuple[int, int], tuple] = {}
    created = defaultdict(int)

    def mode(node):
        return nodes.index(node)

    for memory, entries in schedule.by_memory().items():
        role = roles.get(memory)
        held = None
        for e in entries:
            pos = (e.freq_index, e.time_bin)
            kind = e.op_kind
            if kind == OpKind.TMS_CREATE and held is None:
                t = created[memory]
                created[memory] += 1
                field_node, held = site_nodes(role.channel, t)
                pair = two_mode_squeezed(r)
                state = pair if state is None else tensor(state, pair)
                nodes += [field_node, held]
                edges.append((field_node, held))
                frames[held] = READOUT_FRAME
                cell[pos] = field_node
            elif kind == OpKind.BS_READIN:
                held = cell.pop(pos)
                state = lossy_coupling(state, mode(held), delta_eta)
            elif kind in (OpKind.TMS_CREATE, OpKind.BS_COUPLE):
                partner = cell[pos]
                op = RamanTMS(e.param, e.phase) if kind == OpKind.TMS_CREATE else RamanBS(e.param, e.phase)
                state = apply(state, op_symplectic(op), [mode(partner), mode(held)])
                if role.position == 0:
                    edges.append((partner, held))
                if role.position == 2:
                    cell[pos], held = held, partner
            elif kind == OpKind.BS_READOUT:
                state = lossy_coupling(state, mode(held), delta_eta)
                cell[pos] = held
                held = None
            elif kind == OpKind.PI_PHASE_MEASURE_TAG:
                state = pi_phase_route(state, mode(cell[pos]))

    graph = ClusterGraph.empty(nodes)
    for u, v in edges:
        graph = graph.with_edge(u, v)
    return ProtocolResult(state, graph, {v: k for k, v in enumerate(nodes)}, frames)


def final_positions(schedule: Schedule) -> dict[tuple, tuple[int, int]]:
    """Plaquette ``(freq_index, time_bin)`` of every qumode once the chain is done."""
    roles = {role.memory_id: role for role in memory_roles(schedule.d)}
    cell: dict[tuple[int, int], tuple] = {}
    created = defaultdict(int)
    for memory, entries in schedule.by_memory().items():
        role = roles.get(memory)
        held = None
        for e in entries:
            pos = (e.freq_index, e.time_bin)
            if e.op_kind == OpKind.TMS_CREATE and held is None:
                field_node, held = site_nodes(role.channel, created[memory])
                created[memory] += 1
                cell[pos] = field_node
            elif e.op_kind == OpKind.BS_READIN:
                held = cell.pop(pos)
            elif e.op_kind == OpKind.BS_COUPLE and role.position == 2:
                cell[pos], held = held, cell[pos]
            elif e.op_kind == OpKind.BS_READOUT:
                cell[pos], held = held, None
    return {node: pos for pos, node in cell.items()}
