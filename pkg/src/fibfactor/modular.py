"""Reversible modular arithmetic circuits.

Constructions: compiled combinational netlists, in-place modular addition
and doubling, the schoolbook multiply-accumulate ``(a,b,t) -> (a,b,(t+ab) mod N)``
with two clean ancilla bits, out-of-place reduction mod N, and the generic
macc built from any out-of-place modular multiplier.

Constant arithmetic inside these circuits borrows idle registers as dirty
helpers and restores them; the standalone doubling circuit, whose interface
leaves nothing to borrow, falls back to the zero-dirty constant adder.
Behaviour on unreduced inputs is unspecified throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import arithmetic as ar
from .circuits import CircuitBuilder, CircuitError, ReversibleCircuit


@dataclass(frozen=True)
class Modulus:
    """An n-bit modulus with 2^(n-1) <= N < 2^n."""

    N: int
    n: int

    def __post_init__(self):
        if self.N < 3:
            raise ValueError("modulus must be >= 3")
        if not (1 << (self.n - 1)) <= self.N < (1 << self.n):
            raise ValueError(f"N={self.N} is not an {self.n}-bit modulus")

    @classmethod
    def of(cls, N: int) -> "Modulus":
        return cls(N, N.bit_length())

    @property
    def odd(self) -> bool:
        return self.N % 2 == 1

    def require_odd(self):
        if not self.odd:
            raise ValueError("construction requires an odd modulus")


# ---------------------------------------------------------------------------
# classical netlists and their compilation


@dataclass(frozen=True)
class NetGate:
    kind: str  # "NOT" or "AND"
    inputs: tuple[int, ...]
    output: int


@dataclass
class ClassicalNetlist:
    """Combinational NOT/AND netlist; every wire is written exactly once."""

    wires: int
    gates: list[NetGate]
    inputs: list[int]
    outputs: list[int]

    def validate(self) -> None:
        written = set(self.inputs)
        if len(written) != len(self.inputs):
            raise CircuitError("duplicate input wires")
        for g in self.gates:
            if g.kind not in ("NOT", "AND"):
                raise CircuitError(f"bad netlist gate {g.kind}")
            if len(g.inputs) != (1 if g.kind == "NOT" else 2):
                raise CircuitError("netlist gate arity mismatch")
            for w in g.inputs:
                if w not in written:
                    raise CircuitError(f"wire {w} read before it is driven (cyclic netlist?)")
            if g.output in written:
                raise CircuitError(f"wire {g.output} multiply driven")
            written.add(g.output)
        for w in self.outputs:
            if w not in written:
                raise CircuitError(f"output wire {w} never driven")
        if len(written) != self.wires:
            raise CircuitError("wire count does not match driven wires")

    def evaluate(self, x: int) -> int:
        """Classical evaluation oracle: input bits packed little-endian."""
        val = {}
        for i, w in enumerate(self.inputs):
            val[w] = (x >> i) & 1
        for g in self.gates:
            if g.kind == "NOT":
                val[g.output] = 1 - val[g.inputs[0]]
            else:
                val[g.output] = val[g.inputs[0]] & val[g.inputs[1]]
        out = 0
        for i, w in enumerate(self.outputs):
            out |= val[w] << i
        return out


class NetlistBuilder:
    """Helper for writing combinational netlists (XOR/OR built from NOT/AND)."""

    def __init__(self, n_inputs: int):
        self.wires = n_inputs
        self.gates: list[NetGate] = []
        self.inputs = list(range(n_inputs))

    def _new(self) -> int:
        w = self.wires
        self.wires += 1
        return w

    def n_not(self, a: int) -> int:
        w = self._new()
        self.gates.append(NetGate("NOT", (a,), w))
        return w

    def n_and(self, a: int, b: int) -> int:
        w = self._new()
        self.gates.append(NetGate("AND", (a, b), w))
        return w

    def n_or(self, a: int, b: int) -> int:
        return self.n_not(self.n_and(self.n_not(a), self.n_not(b)))

    def n_xor(self, a: int, b: int) -> int:
        # (a & ~b) | (~a & b)
        return self.n_or(self.n_and(a, self.n_not(b)), self.n_and(self.n_not(a), b))

    def finish(self, outputs: Sequence[int]) -> ClassicalNetlist:
        net = ClassicalNetlist(self.wires, self.gates, self.inputs, list(outputs))
        net.validate()
        return net


def compile_classical(net: ClassicalNetlist) -> ReversibleCircuit:
    """Compile a netlist into a compute-copy-uncompute reversible circuit.

    Maps (x, 0^(G+n_o-n_i)) -> (x, 0^(G-n_i), f(x)) where G is the wire
    count; every internal wire is restored to 0.
    """
    net.validate()
    n_i, n_o = len(net.inputs), len(net.outputs)
    bld = CircuitBuilder()
    in_wires = bld.alloc(n_i, "x", role="input")
    internal = bld.alloc(net.wires - n_i, "scratch", role="clean_ancilla")
    out_wires = bld.alloc(n_o, "f", role="output")
    qubit_of = {}
    for net_w, q in zip(net.inputs, in_wires):
        qubit_of[net_w] = q
    spare = iter(internal)
    for g in net.gates:
        qubit_of[g.output] = next(spare)

    def forward():
        for g in net.gates:
            if g.kind == "NOT":
                bld.emit_cnot(qubit_of[g.inputs[0]], qubit_of[g.output])
                bld.emit_not(qubit_of[g.output])
            elif g.inputs[0] == g.inputs[1]:  # AND(a, a) = a
                bld.emit_cnot(qubit_of[g.inputs[0]], qubit_of[g.output])
            else:
                bld.emit_ccnot(qubit_of[g.inputs[0]], qubit_of[g.inputs[1]], qubit_of[g.output])

    forward()
    for net_w, q in zip(net.outputs, out_wires):
        bld.emit_cnot(qubit_of[net_w], q)
    ar.reversed_emission(bld, forward)
    return bld.finish()


# ---------------------------------------------------------------------------
# in-place modular addition / doubling


def emit_add_modN(bld: CircuitBuilder, m: Modulus, x: Sequence[int], y: Sequence[int],
                  f: int, c0: int, pool_x: Sequence[int], pool_y: Sequence[int],
                  ctrl: int | None = None) -> None:
    """y <- (x + y) mod N for reduced x, y; f and c0 are clean and restored.

    Layout of the computation: offset x by 2^n - N, record the would-be
    reduction in f, add, conditionally fold the offset into y, then erase f
    by comparing the result against x (result < x iff a reduction happened).
    ``pool_x``/``pool_y`` are dirty helpers disjoint from x resp. y.
    """
    w = len(x)
    assert len(y) == w == m.n
    h = (1 << w) - m.N
    ar.add_const(bld, x, h, c0, pool_x)
    ar.carry_toggle(bld, x, y, c0, f, ctrl)
    ar.sub_const(bld, x, h, c0, pool_x)
    ar.ripple_add(bld, x, y, c0, ctrl)
    ar.add_const(bld, y, h, c0, pool_y, ctrl=f)
    ar.gt_toggle(bld, x, y, c0, f, ctrl)


def build_add_modN(m: Modulus) -> ReversibleCircuit:
    """(x, y, 0, 0) -> (x, (x+y) mod N, 0, 0) with two clean ancilla bits."""
    bld = CircuitBuilder()
    x = bld.alloc(m.n, "x", role="input")
    y = bld.alloc(m.n, "y", role="input")
    anc = bld.alloc(2, "anc", role="clean_ancilla")
    f, c0 = anc
    emit_add_modN(bld, m, x, y, f, c0, pool_x=y + [f], pool_y=x)
    return bld.finish()


def emit_double_modN(bld: CircuitBuilder, m: Modulus, x: Sequence[int], f: int, c0: int,
                     pool: Sequence[int] | None = None, invert: bool = False) -> None:
    """x <- 2x mod N (odd N) using ancilla bits f, c0, both restored.

    Works in the halved frame: subtract (N+1)/2 recording the borrow, undo
    the subtraction when it borrowed, then rotate the flag in as the new low
    bit.  With ``pool`` given the constant arithmetic borrows it; otherwise
    the zero-dirty expansion is used (standalone interface).
    """
    m.require_odd()
    w = len(x)
    K = (m.N + 1) // 2

    def forward():
        ext = list(x) + [f]
        if pool is None:
            ar.sub_const_zero_dirty(bld, ext, K, [c0])
            ar.add_const_zero_dirty(bld, x, K, [c0], ctrl=f)
        else:
            ar.sub_const(bld, ext, K, c0, pool)
            ar.add_const(bld, x, K, c0, pool, ctrl=f)
        bld.emit_not(f)
        for j in range(w):
            bld.emit_swap(f, x[j])

    if invert:
        ar.reversed_emission(bld, forward)
    else:
        forward()


def build_double_modN(m: Modulus) -> ReversibleCircuit:
    """(x, 0, 0) -> (2x mod N, 0, 0); N must be odd."""
    m.require_odd()
    bld = CircuitBuilder()
    x = bld.alloc(m.n, "x", role="input")
    anc = bld.alloc(2, "anc", role="clean_ancilla")
    f, c0 = anc
    emit_double_modN(bld, m, x, f, c0, pool=None)
    return bld.finish()


# ---------------------------------------------------------------------------
# multiply-accumulate circuits


@dataclass
class MaccCircuit:
    """Reversible (a, b, t, 0^S) -> (a, b, (t+ab) mod N, 0^S)."""

    circuit: ReversibleCircuit
    modulus: Modulus
    a: list[int]
    b: list[int]
    t: list[int]
    clean: list[int]

    @property
    def S(self) -> int:
        return len(self.clean)

    @property
    def G(self) -> int:
        return len(self.circuit)

    def wire_order(self) -> list[int]:
        return self.a + self.b + self.t + self.clean


def emit_schoolbook_macc(bld: CircuitBuilder, m: Modulus, a: Sequence[int],
                         b: Sequence[int], t: Sequence[int], f: int, c0: int) -> None:
    """Shift-and-add macc: t += a_i * (2^i b) with b doubled in place."""
    m.require_odd()
    n = m.n
    for i in range(n):
        others = [w for w in a if w != a[i]]
        emit_add_modN(bld, m, b, t, f, c0, pool_x=list(t) + others,
                      pool_y=list(b), ctrl=a[i])
        emit_double_modN(bld, m, b, f, c0, pool=list(a) + list(t))
    for _ in range(n):
        emit_double_modN(bld, m, b, f, c0, pool=list(a) + list(t), invert=True)


def build_schoolbook_macc(m: Modulus) -> MaccCircuit:
    m.require_odd()
    bld = CircuitBuilder()
    a = bld.alloc(m.n, "a", role="input")
    b = bld.alloc(m.n, "b", role="input")
    t = bld.alloc(m.n, "t", role="input")
    anc = bld.alloc(2, "anc", role="clean_ancilla")
    emit_schoolbook_macc(bld, m, a, b, t, anc[0], anc[1])
    return MaccCircuit(bld.finish(), m, a, b, t, anc)


# ---------------------------------------------------------------------------
# out-of-place multipliers and reduction mod N

# An integer multiplier widget emits gates computing out = x*y into an
# initially-zero register of width >= len(x) + len(y).
MultWidget = Callable[[CircuitBuilder, Sequence[int], Sequence[int], Sequence[int], int], None]


def schoolbook_mult_widget(bld: CircuitBuilder, x: Sequence[int], y: Sequence[int],
                           out: Sequence[int], c0: int) -> None:
    """out = x * y over the integers (out starts as zero)."""
    assert len(out) >= len(x) + len(y)
    for i, xb in enumerate(x):
        ar.ripple_add(bld, y, out[i : i + len(y)], c0, ctrl=xb, carry_out=out[i + len(y)])


def emit_reduce_core(bld: CircuitBuilder, m: Modulus, c: Sequence[int], res: Sequence[int],
                     mult: MultWidget, c0: int) -> None:
    """res <- c mod N out of place (c is 2n bits); compute-copy-uncompute.

    Uses the precomputed reciprocal r with r/2^(2n) < 1/N < (r+1)/2^(2n) to
    form q = floor(c*r / 2^(2n)); then c - N*q lies in (0, 2N) and one
    conditional subtraction finishes the job.
    """
    n = m.n
    w = len(c)
    assert w == 2 * n and len(res) == n
    b = 2 * n
    r = ((1 << b) // m.N)
    if (1 << b) % m.N == 0:
        r -= 1  # keep r/2^b strictly below 1/N
    r_wires = bld.alloc(r.bit_length())
    cr = bld.alloc(w + len(r_wires) + 1)
    nq_w = bld.alloc(n)
    q = cr[b:]
    nq = bld.alloc(n + len(q) + 1)
    u = bld.alloc(b + 2)

    def forward():
        ar.write_const(bld, r_wires, r)
        mult(bld, r_wires, c, cr, c0)           # cr = r*c ; q = cr >> 2n
        ar.write_const(bld, nq_w, m.N)
        mult(bld, q, nq_w, nq, c0)              # nq = N*q
        ar.copy_register(bld, c, u[:b])
        # N*q < 2^2n, so truncating nq to u's width drops only zero wires
        ar.ripple_sub(bld, nq[: len(u)], u, c0)  # u = c - N*q in [0, 2N)
        # if u >= N, subtract N; borrow flag lands in u[n+1] and stays for
        # the uncompute pass (it cannot be erased from the reduced value)
        ar.sub_const(bld, u[: n + 2], m.N, c0, cr[: n + 2])
        ar.add_const(bld, u[: n + 1], m.N, c0, cr[: n + 1], ctrl=u[n + 1])

    forward()
    ar.copy_register(bld, u[:n], res)
    ar.reversed_emission(bld, forward)
    for ws in (u, nq, cr, nq_w, r_wires):
        bld.free(ws)


def build_reduce_modN(m: Modulus, mult: MultWidget = schoolbook_mult_widget) -> ReversibleCircuit:
    """(c, 0^n, 0...) -> (c, c mod N, 0...) for a 2n-bit input c."""
    bld = CircuitBuilder()
    c = bld.alloc(2 * m.n, "c", role="input")
    res = bld.alloc(m.n, "res", role="output")
    c0 = bld.alloc(1, "anc", role="clean_ancilla")[0]
    emit_reduce_core(bld, m, c, res, mult, c0)
    scratch = list(range(c0 + 1, bld.width))
    if scratch:
        bld.mark_register("scratch", scratch, role="clean_ancilla")
    return bld.finish()


@dataclass
class OutOfPlaceMultiplier:
    """Circuit mapping (a, b, 0^n, 0^S0) -> (a, b, ab mod N, 0^S0)."""

    circuit: ReversibleCircuit
    modulus: Modulus
    a: list[int]
    b: list[int]
    out: list[int]
    clean: list[int]

    @property
    def S0(self) -> int:
        return len(self.clean)

    def wire_order(self) -> list[int]:
        return self.a + self.b + self.out + self.clean


def build_mult_modN(m: Modulus, mult: MultWidget = schoolbook_mult_widget) -> OutOfPlaceMultiplier:
    """Out-of-place modular multiplier: integer multiply, reduce, uncompute."""
    bld = CircuitBuilder()
    a = bld.alloc(m.n, "a", role="input")
    b = bld.alloc(m.n, "b", role="input")
    out = bld.alloc(m.n, "out", role="output")
    c0 = bld.alloc(1)[0]
    prod = bld.alloc(2 * m.n)

    def fwd():
        mult(bld, a, b, prod, c0)

    fwd()
    emit_reduce_core(bld, m, prod, out, mult, c0)
    ar.reversed_emission(bld, fwd)
    scratch = [w for w in range(bld.width) if w not in set(a + b + out)]
    bld.mark_register("scratch", scratch, role="clean_ancilla")
    circ = bld.finish()
    return OutOfPlaceMultiplier(circ, m, a, b, out, scratch)


def multiplier_from_netlist(net: ClassicalNetlist, m: Modulus) -> OutOfPlaceMultiplier:
    """Adapt a compiled (a,b) -> ab mod N netlist to the multiplier contract."""
    if len(net.inputs) != 2 * m.n or len(net.outputs) != m.n:
        raise CircuitError("netlist shape does not match an n-bit modular multiplier")
    circ = compile_classical(net)
    xr = circ.register("x")
    scratch = circ.register("scratch")
    out = circ.register("f")
    return OutOfPlaceMultiplier(circ, m, xr.wires[: m.n], xr.wires[m.n :],
                                out.wires, scratch.wires)


def build_macc_from_mult(mult: OutOfPlaceMultiplier, m: Modulus) -> MaccCircuit:
    """Generic macc: multiply out of place, add mod N in place, unmultiply.

    Needs S0 >= 2 so the modular addition can borrow its two ancilla bits
    from the multiplier's clean block; the result has S = S0 + n.
    """
    if mult.S0 < 2:
        raise CircuitError("multiplier must provide at least 2 clean ancillas")
    if mult.modulus != m:
        raise CircuitError("multiplier modulus mismatch")
    bld = CircuitBuilder()
    a = bld.alloc(m.n, "a", role="input")
    b = bld.alloc(m.n, "b", role="input")
    t = bld.alloc(m.n, "t", role="input")
    prod = bld.alloc(m.n, "prod", role="clean_ancilla")
    sub_clean = bld.alloc(mult.S0, "sub_clean", role="clean_ancilla")
    wire_map = {}
    for src, dst in zip(mult.wire_order(), a + b + prod + sub_clean):
        wire_map[src] = dst
    full_map = [wire_map.get(i, 0) for i in range(mult.circuit.width)]
    assert len(wire_map) == mult.circuit.width, "multiplier has unmapped wires"
    f, c0 = sub_clean[0], sub_clean[1]
    bld.inline(mult.circuit, full_map, cache_key="mult")
    emit_add_modN(bld, m, prod, t, f, c0, pool_x=list(t) + list(a),
                  pool_y=list(prod) + list(a))
    bld.inline(mult.circuit, full_map, invert=True, cache_key="mult")
    return MaccCircuit(bld.finish(), m, a, b, t, prod + sub_clean)
