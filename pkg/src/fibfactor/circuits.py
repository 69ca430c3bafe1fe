"""Classical reversible circuits over NOT/CNOT/CCNOT/SWAP.

A circuit is an ordered gate list over a fixed set of wires, i.e. a
permutation of basis states.  Simulation acts on single basis states only;
there is no amplitude tracking.  Gates are stored packed into an
``array('q')`` (2 bits of kind + three 10-bit operand fields) so that
multi-million-gate circuits stay compact and the simulation loop stays
tight.
"""
from __future__ import annotations

import random
from array import array
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

NOT, CNOT, CCNOT, SWAP = 0, 1, 2, 3
KIND_NAMES = ("NOT", "CNOT", "CCNOT", "SWAP")
KIND_IDS = {name: i for i, name in enumerate(KIND_NAMES)}
_ARITY = (1, 2, 3, 2)

MAX_WIDTH = 16383  # operands are packed into 14-bit fields

ROLES = ("input", "output", "clean_ancilla", "dirty_ancilla")


class CircuitError(ValueError):
    pass


def pack_gate(kind: int, a: int, b: int = 0, c: int = 0) -> int:
    return kind | (a << 2) | (b << 16) | (c << 30)


def unpack_gate(g: int) -> tuple[int, int, int, int]:
    return g & 3, (g >> 2) & 16383, (g >> 16) & 16383, (g >> 30) & 16383


@dataclass(frozen=True)
class Gate:
    """One reversible gate; operands are wire indices, pairwise distinct.

    Operand order: NOT(target); CNOT(control, target);
    CCNOT(control, control, target); SWAP(a, b).
    """

    kind: str
    operands: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in KIND_IDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if len(self.operands) != _ARITY[KIND_IDS[self.kind]]:
            raise CircuitError(f"{self.kind} expects {_ARITY[KIND_IDS[self.kind]]} operands")
        if len(set(self.operands)) != len(self.operands):
            raise CircuitError(f"{self.kind} operands must be pairwise distinct")

    def packed(self) -> int:
        ops = self.operands
        return pack_gate(KIND_IDS[self.kind], *ops)


@dataclass(frozen=True)
class Register:
    """Named contiguous wire range with a declared role."""

    name: str
    start: int
    size: int
    role: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise CircuitError(f"unknown register role {self.role!r}")

    @property
    def wires(self) -> list[int]:
        return list(range(self.start, self.start + self.size))


@dataclass(frozen=True)
class ResourceReport:
    gate_count_by_kind: dict[str, int]
    total_gates: int
    qubit_high_water: int
    clean_ancilla: int
    dirty_ancilla: int


class ReversibleCircuit:
    """Immutable gate sequence over ``width`` wires plus a register map."""

    __slots__ = ("width", "_gates", "registers", "checkpoints")

    def __init__(self, width: int, gates: array | Iterable[int] = (),
                 registers: dict[str, Register] | None = None,
                 checkpoints: list[tuple[int, str, object]] | None = None):
        if width > MAX_WIDTH:
            raise CircuitError(f"width {width} exceeds supported maximum {MAX_WIDTH}")
        self.width = width
        self._gates = gates if isinstance(gates, array) else array("q", gates)
        self.registers = dict(registers or {})
        # (gate_offset, label, payload) markers used by instrumented simulation
        self.checkpoints = list(checkpoints or [])
        self._validate()

    def _validate(self):
        for name, reg in self.registers.items():
            if reg.start < 0 or reg.start + reg.size > self.width:
                raise CircuitError(f"register {name} out of range")
        spans = sorted((r.start, r.start + r.size) for r in self.registers.values())
        for (s0, e0), (s1, e1) in zip(spans, spans[1:]):
            if s1 < e0:
                raise CircuitError("register ranges overlap")

    def __len__(self) -> int:
        return len(self._gates)

    def gates(self) -> Iterator[Gate]:
        for g in self._gates:
            k, a, b, c = unpack_gate(g)
            yield Gate(KIND_NAMES[k], (a, b, c)[: _ARITY[k]])

    def packed(self) -> array:
        return self._gates

    def gate_counts(self) -> dict[str, int]:
        counts = dict.fromkeys(KIND_NAMES, 0)
        for g in self._gates:
            counts[KIND_NAMES[g & 3]] += 1
        return counts

    def register(self, name: str) -> Register:
        return self.registers[name]


def compose(a: ReversibleCircuit, b: ReversibleCircuit) -> ReversibleCircuit:
    """Concatenate two circuits: simulating the result runs ``a`` then ``b``."""
    if a.width != b.width:
        raise CircuitError(f"width mismatch: {a.width} != {b.width}")
    for name in a.registers.keys() & b.registers.keys():
        if a.registers[name] != b.registers[name]:
            raise CircuitError(f"register {name!r} differs between operands")
    gates = array("q", a._gates)
    gates.extend(b._gates)
    marks = list(a.checkpoints) + [(off + len(a._gates), lab, pl) for off, lab, pl in b.checkpoints]
    return ReversibleCircuit(a.width, gates, {**a.registers, **b.registers}, marks)


def inverse(c: ReversibleCircuit) -> ReversibleCircuit:
    """Reverse the gate list; every supported gate is self-inverse."""
    gates = array("q", c._gates)
    gates.reverse()
    return ReversibleCircuit(c.width, gates, c.registers)


def simulate(c: ReversibleCircuit, state: Sequence[int],
             on_checkpoint: Callable[[str, list[int], object], None] | None = None) -> list[int]:
    """Apply the circuit's gates in order to one basis state.

    ``state`` is a 0/1 sequence of length ``c.width``; a fresh list is
    returned.  ``on_checkpoint`` (debug instrumentation) is called with
    (label, bits, payload) at every recorded checkpoint; production runs
    leave it ``None`` and pay nothing for it.
    """
    if len(state) != c.width:
        raise CircuitError(f"state length {len(state)} != width {c.width}")
    bl = [1 if b else 0 for b in state]
    if on_checkpoint is None:
        _run(c._gates, bl)
        return bl
    gates = c._gates
    pos = 0
    for off, label, payload in sorted(c.checkpoints, key=lambda t: t[0]):
        _run(gates[pos:off], bl)
        pos = off
        on_checkpoint(label, bl, payload)
    _run(gates[pos:], bl)
    return bl


def _run(gates: array, bl: list[int]) -> None:
    # hot loop: branch order roughly by gate frequency in built circuits
    for g in gates:
        k = g & 3
        if k == 2:
            if bl[(g >> 2) & 16383] and bl[(g >> 16) & 16383]:
                bl[(g >> 30) & 16383] ^= 1
        elif k == 1:
            if bl[(g >> 2) & 16383]:
                bl[(g >> 16) & 16383] ^= 1
        elif k == 0:
            bl[(g >> 2) & 16383] ^= 1
        else:
            a = (g >> 2) & 16383
            b = (g >> 16) & 16383
            if bl[a] != bl[b]:
                bl[a] ^= 1
                bl[b] ^= 1


def measure_resources(c: ReversibleCircuit) -> ResourceReport:
    counts = c.gate_counts()
    clean = sum(r.size for r in c.registers.values() if r.role == "clean_ancilla")
    dirty = sum(r.size for r in c.registers.values() if r.role == "dirty_ancilla")
    return ResourceReport(
        gate_count_by_kind=counts,
        total_gates=sum(counts.values()),
        qubit_high_water=c.width,
        clean_ancilla=clean,
        dirty_ancilla=dirty,
    )


def dump_netlist(c: ReversibleCircuit) -> str:
    """Text dump: ``width=<w>`` header, then one ``KIND b0 [b1 [b2]]`` per line."""
    lines = [f"width={c.width}"]
    for g in c.gates():
        lines.append(" ".join([g.kind, *map(str, g.operands)]))
    return "\n".join(lines) + "\n"


def random_state(width: int, rng: random.Random) -> list[int]:
    return [rng.getrandbits(1) for _ in range(width)]


def int_from_bits(bl: Sequence[int], wires: Sequence[int]) -> int:
    """Read wires as a little-endian integer (wires[0] is the low bit)."""
    v = 0
    for i in reversed(wires):
        v = (v << 1) | bl[i]
    return v


def set_bits(bl: list[int], wires: Sequence[int], value: int) -> None:
    for i, w in enumerate(wires):
        bl[w] = (value >> i) & 1


class CircuitBuilder:
    """Gate-emitting arena for constructing circuits.

    Wires are allocated from a monotone arena; freed clean wires are reused
    by later allocations, so the final width equals the peak number of
    simultaneously live wires.  Emission helpers also maintain incremental
    per-kind gate counters that tests compare against a recount.
    """

    def __init__(self, lower_swaps: bool = False):
        self.gates = array("q")
        self._free: list[int] = []
        self._width = 0
        self.lower_swaps = lower_swaps
        self.counts = dict.fromkeys(KIND_NAMES, 0)
        self.registers: dict[str, Register] = {}
        self.checkpoints: list[tuple[int, str, object]] = []
        self._cache: dict[object, array] = {}

    @property
    def width(self) -> int:
        return self._width

    # -- wire management ---------------------------------------------------

    def alloc(self, size: int, name: str | None = None, role: str = "clean_ancilla") -> list[int]:
        """Allocate ``size`` wires, contiguous when registered under a name."""
        if name is not None:
            # registers must be contiguous ranges
            start = self._width
            self._width += size
            if self._width > MAX_WIDTH:
                raise CircuitError("circuit exceeds maximum supported width")
            self.registers[name] = Register(name, start, size, role)
            return list(range(start, start + size))
        wires = []
        while self._free and len(wires) < size:
            wires.append(self._free.pop())
        while len(wires) < size:
            wires.append(self._width)
            self._width += 1
        if self._width > MAX_WIDTH:
            raise CircuitError("circuit exceeds maximum supported width")
        return sorted(wires)

    def free(self, wires: Iterable[int]) -> None:
        """Return scratch wires (caller guarantees they are clean again)."""
        self._free.extend(wires)

    # -- emission ----------------------------------------------------------

    def emit_not(self, a: int) -> None:
        self.gates.append(a << 2)
        self.counts["NOT"] += 1

    def emit_cnot(self, a: int, b: int) -> None:
        if a == b:
            raise CircuitError("CNOT operands must differ")
        self.gates.append(1 | (a << 2) | (b << 16))
        self.counts["CNOT"] += 1

    def emit_ccnot(self, a: int, b: int, c: int) -> None:
        if a == b or a == c or b == c:
            raise CircuitError("CCNOT operands must be pairwise distinct")
        self.gates.append(2 | (a << 2) | (b << 16) | (c << 30))
        self.counts["CCNOT"] += 1

    def emit_swap(self, a: int, b: int) -> None:
        if a == b:
            raise CircuitError("SWAP operands must differ")
        if self.lower_swaps:
            self.emit_cnot(a, b)
            self.emit_cnot(b, a)
            self.emit_cnot(a, b)
        else:
            self.gates.append(3 | (a << 2) | (b << 16))
            self.counts["SWAP"] += 1

    def emit_packed(self, packed: array) -> None:
        self.gates.extend(packed)
        for g in packed:
            self.counts[KIND_NAMES[g & 3]] += 1

    def inline(self, circuit: ReversibleCircuit, wire_map: Sequence[int],
               invert: bool = False, cache_key: object = None) -> None:
        """Splice another circuit's gates in, remapping its wires.

        ``wire_map[i]`` is the wire in this builder playing the role of wire
        ``i`` of ``circuit``.  Remapped gate blocks are cached under
        ``cache_key`` so repeated splices of the same binding cost one
        array extend.
        """
        key = None if cache_key is None else (cache_key, tuple(wire_map), invert)
        if key is not None and key in self._cache:
            self.emit_packed(self._cache[key])
            return
        remapped = array("q")
        src = circuit.packed()
        for g in (reversed(src) if invert else src):
            k = g & 3
            a = wire_map[(g >> 2) & 16383]
            b = wire_map[(g >> 16) & 16383]
            c = wire_map[(g >> 30) & 16383]
            remapped.append(k | (a << 2) | (b << 16) | (c << 30))
        if key is not None:
            self._cache[key] = remapped
        self.emit_packed(remapped)

    def checkpoint(self, label: str, payload: object = None) -> None:
        self.checkpoints.append((len(self.gates), label, payload))

    def mark_register(self, name: str, wires: Sequence[int], role: str) -> None:
        """Register a contiguous, already-allocated wire range under a name."""
        ws = list(wires)
        if ws != list(range(ws[0], ws[0] + len(ws))):
            raise CircuitError("registers must cover a contiguous wire range")
        self.registers[name] = Register(name, ws[0], len(ws), role)

    def finish(self) -> ReversibleCircuit:
        c = ReversibleCircuit(self._width, self.gates, self.registers, self.checkpoints)
        assert c.gate_counts() == self.counts, "incremental gate counters out of sync"
        return c
