"""Fibonacci-exponent modular exponentiation circuits.

The pieces, bottom up:

- greedy Zeckendorf decomposition (host side and as a reversible circuit);
- in-place multiplication by a classical constant that borrows a dirty
  register, three macc calls;
- psi-pair multiplication ``psi(a), psi(b) -> psi(a), psi(ab)`` where
  ``psi(x)`` is the register pair (x, x^-1 mod N), four macc calls plus two
  inverse calls and register swaps;
- Fibonacci multi-exponentiation over two psi accumulators;
- the small-base product  prod a_i^{t_i} mod N  emitted directly from the
  algebraic normal form of its truth table (the bases are tiny);
- the full exponentiation oracle  |z> -> |prod a_i^{z_i + D/2} mod N>|junk>,
  which recomputes each round's base product on the fly and borrows idle
  exponent bits as dirty workspace;
- a single-base  |psi(a)>|z> -> |psi(a)>|z>|a^z>  circuit;
- a closed-form qubit-budget predictor mirroring the oracle's layout.

Exponent coordinates are stored in log2(D) bits two's complement, so the
D/2 offset is a single NOT on the top bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import arithmetic as ar
from .circuits import CircuitBuilder, CircuitError, ReversibleCircuit
from .modular import MaccCircuit, Modulus

LOG2_PHI = math.log2((1 + math.sqrt(5)) / 2)


def fib(k: int) -> int:
    """F_k with F_0 = 0, F_1 = 1."""
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def fib_upto(limit: int) -> list[int]:
    """[F_1, F_2, ...] up to the largest F_k <= limit."""
    out = []
    a, b = 1, 1
    while a <= limit:
        out.append(a)
        a, b = b, a + b
    return out


def max_fib_index(limit: int) -> int:
    """Largest K with F_K <= limit (limit >= 1)."""
    return len(fib_upto(limit))


def zeckendorf_decompose(t0: int, K: int) -> list[int]:
    """Greedy bits (z_1..z_K, index j at position j-1) with sum z_j F_j = t0.

    Scans j = K..1 taking F_j whenever it fits; requires t0 < F_{K+1}.
    The spent representation always reaches 0, so ties between F_1 and F_2
    resolve toward the larger index.
    """
    if t0 < 0:
        raise ValueError("t0 must be nonnegative")
    if t0 >= fib(K + 1):
        raise ValueError(f"t0={t0} needs Fibonacci indices above {K}")
    fibs = [fib(j) for j in range(K + 1)]
    bits = [0] * K
    t = t0
    for j in range(K, 0, -1):
        if t >= fibs[j]:
            bits[j - 1] = 1
            t -= fibs[j]
    assert t == 0
    return bits


def _ceil_mul_sqrt(A: Fraction, n: int) -> int:
    """ceil(A * sqrt(n)) exactly for positive rational A."""
    p, q = A.numerator, A.denominator
    t = p * p * n
    m = max(1, math.isqrt(t) // q)
    while m * m * q * q >= t and m > 1:
        m -= 1
    while m * m * q * q < t:
        m += 1
    return m


def _pow2_at_least(x_sq_times_4: int) -> int:
    """Smallest k with (2^k)^2 >= x_sq_times_4 (i.e. 2^k >= 2*sqrt(x))."""
    k = 0
    while (1 << (2 * k)) < x_sq_times_4:
        k += 1
    return k


@dataclass(frozen=True)
class FibParams:
    """Parameters of the exponentiation oracle for one modulus.

    D is pinned to the smallest power of two at least 2*sqrt(d)*R with
    R = 2^ceil(A*sqrt(n)); that lands inside the required window
    [2 sqrt(d) R, 4 sqrt(d) R].  K is maximal with F_K <= D.
    """

    modulus: Modulus
    bases: tuple[int, ...]
    a: tuple[int, ...]
    d: int
    A: Fraction
    log_R: int
    log_D: int
    K: int
    a_inv: tuple[int, ...]
    prod_a_inv: int

    @property
    def N(self) -> int:
        return self.modulus.N

    @property
    def n(self) -> int:
        return self.modulus.n

    @property
    def D(self) -> int:
        return 1 << self.log_D

    @classmethod
    def create(cls, N: int, bases: Sequence[int], A: Fraction | int | str,
               d: int | None = None) -> "FibParams":
        m = Modulus.of(N)
        A = Fraction(A)
        if A <= 0:
            raise ValueError("A must be positive")
        bases = tuple(bases)
        if d is None:
            d = math.isqrt(m.n)
        if d != len(bases):
            raise ValueError(f"expected {d} bases, got {len(bases)}")
        for b in bases:
            if math.gcd(b, N) != 1:
                raise ValueError(f"base {b} shares a factor with N")
        a = tuple(b * b % N for b in bases)
        log_R = _ceil_mul_sqrt(A, m.n)
        log_D = _pow2_at_least(4 * d * (1 << (2 * log_R)))
        K = max_fib_index(1 << log_D)
        assert fib(K) <= (1 << log_D) < fib(K + 1)
        a_inv = tuple(pow(x, -1, N) for x in a)
        prod_a_inv = math.prod(a_inv) % N
        return cls(m, bases, a, d, A, log_R, log_D, K, a_inv, prod_a_inv)

    def exponent_of(self, z: Sequence[int]) -> int:
        """Direct oracle value prod a_i^(z_i + D/2) mod N (host-side oracle)."""
        out = 1
        for ai, zi in zip(self.a, z):
            if not -self.D // 2 <= zi < self.D // 2:
                raise ValueError("z coordinate out of range")
            out = out * pow(ai, zi + self.D // 2, self.N) % self.N
        return out


# ---------------------------------------------------------------------------
# macc inlining helper


def inline_macc(bld: CircuitBuilder, macc: MaccCircuit, a: Sequence[int], b: Sequence[int],
                t: Sequence[int], clean: Sequence[int], invert: bool = False) -> None:
    targets = list(a) + list(b) + list(t) + list(clean)
    order = macc.wire_order()
    assert len(order) == macc.circuit.width == len(targets)
    wire_map = [0] * macc.circuit.width
    for src, dst in zip(order, targets):
        wire_map[src] = dst
    bld.inline(macc.circuit, wire_map, invert=invert, cache_key=("macc", id(macc.circuit)))


# ---------------------------------------------------------------------------
# Zeckendorf circuit


def emit_zeckendorf_row(bld: CircuitBuilder, t: Sequence[int], K: int, e: int, c0: int,
                        pool: Sequence[int], bits: Sequence[int]) -> None:
    """Greedy decomposition of the value in t (< F_{K+1}) into ``bits``.

    For each j = K..1: subtract F_j on the extended register (borrow lands
    in e), record the take-bit, then undo the subtraction when it borrowed.
    Consumes t down to zero.
    """
    ext = list(t) + [e]
    for j in range(K, 0, -1):
        Fj = fib(j)
        ar.sub_const(bld, ext, Fj, c0, pool)
        bld.emit_not(e)
        bld.emit_cnot(e, bits[j - 1])
        bld.emit_cnot(bits[j - 1], e)
        bld.emit_not(bits[j - 1])
        ar.add_const(bld, t, Fj, c0, pool, ctrl=bits[j - 1])
        bld.emit_not(bits[j - 1])


@dataclass
class ZeckendorfCircuit:
    circuit: ReversibleCircuit
    params: FibParams
    z_rows: list[list[int]]  # input wires per coordinate (two's complement)
    bit_wires: list[list[int]]  # bit_wires[i][j-1] holds z_{i,j}


def build_zeckendorf_circuit(p: FibParams) -> ZeckendorfCircuit:
    """|z>|0...> -> |z_{i,j}>|0...> overwriting the exponent wires.

    Each coordinate's register is freed once its greedy pass drains it, and
    the freed wires are reused for later coordinates' bit rows.
    """
    bld = CircuitBuilder()
    w = p.log_D
    z = bld.alloc(p.d * w, "z", role="input")
    rows = [z[i * w : (i + 1) * w] for i in range(p.d)]
    scratch = bld.alloc(2, "anc", role="clean_ancilla")
    pool = bld.alloc(w + 1, "pool", role="clean_ancilla")
    e, c0 = scratch
    bit_wires = []
    for i in range(p.d):
        t = rows[i]
        bits = bld.alloc(p.K)
        bld.emit_not(t[-1])  # two's complement -> offset binary (adds D/2)
        emit_zeckendorf_row(bld, t, p.K, e, c0, pool, bits)
        bld.free(t)
        bit_wires.append(bits)
    return ZeckendorfCircuit(bld.finish(), p, rows, bit_wires)


# ---------------------------------------------------------------------------
# constant multiplication and psi-pair multiplication


def emit_mult_const_inplace(bld: CircuitBuilder, macc: MaccCircuit, a_const: int,
                            x: Sequence[int], g: Sequence[int], scratch: Sequence[int],
                            clean: Sequence[int]) -> None:
    """x <- a*x mod N and g <- (-a^-1 g) mod N; scratch returns to zero.

    Three macc invocations with the constant (and minus its inverse) written
    into ``scratch``; the dirty register g is transformed, not restored.
    """
    N = macc.modulus.N
    if math.gcd(a_const, N) != 1:
        raise ValueError("constant must be coprime to the modulus")
    a_inv = pow(a_const, -1, N)
    neg_a_inv = (N - a_inv) % N
    ar.write_const(bld, scratch, a_const)
    inline_macc(bld, macc, a=x, b=scratch, t=g, clean=clean)
    ar.write_const(bld, scratch, a_const ^ neg_a_inv)
    inline_macc(bld, macc, a=g, b=scratch, t=x, clean=clean)
    ar.write_const(bld, scratch, neg_a_inv ^ a_const)
    inline_macc(bld, macc, a=x, b=scratch, t=g, clean=clean)
    ar.write_const(bld, scratch, a_const)
    ar.swap_registers(bld, x, g)


def build_mult_const_inplace(a_const: int, macc: MaccCircuit) -> ReversibleCircuit:
    """|x>|0^(S+n)>|g> -> |ax mod N>|0^(S+n)>|(-a^-1 g) mod N>."""
    m = macc.modulus
    bld = CircuitBuilder()
    x = bld.alloc(m.n, "x", role="input")
    scratch = bld.alloc(m.n, "scratch", role="clean_ancilla")
    clean = bld.alloc(macc.S, "clean", role="clean_ancilla")
    g = bld.alloc(m.n, "g", role="dirty_ancilla")
    emit_mult_const_inplace(bld, macc, a_const, x, g, scratch, clean)
    return bld.finish()


def emit_psi_mult(bld: CircuitBuilder, macc: MaccCircuit,
                  a_val: Sequence[int], a_inv: Sequence[int],
                  b_val: Sequence[int], b_inv: Sequence[int],
                  g: Sequence[int], clean: Sequence[int]) -> None:
    """psi(a), psi(b) -> psi(a), psi(ab); dirty g fully restored.

    Four macc calls, two inverse macc calls, then two register swaps.
    """
    inline_macc(bld, macc, a=a_val, b=b_val, t=g, clean=clean)            # g += ab
    inline_macc(bld, macc, a=a_inv, b=g, t=b_val, clean=clean, invert=True)  # b -> -a^-1 g
    inline_macc(bld, macc, a=a_val, b=b_val, t=g, clean=clean)            # g -> ab
    inline_macc(bld, macc, a=a_inv, b=b_inv, t=b_val, clean=clean)        # b += (ab)^-1
    inline_macc(bld, macc, a=a_val, b=b_val, t=b_inv, clean=clean, invert=True)  # binv -> g
    inline_macc(bld, macc, a=a_inv, b=b_inv, t=b_val, clean=clean)        # b -> (ab)^-1
    ar.swap_registers(bld, b_val, g)
    ar.swap_registers(bld, b_inv, g)


def build_psi_mult(macc: MaccCircuit) -> ReversibleCircuit:
    m = macc.modulus
    bld = CircuitBuilder()
    a_val = bld.alloc(m.n, "a_val", role="input")
    a_inv = bld.alloc(m.n, "a_inv", role="input")
    b_val = bld.alloc(m.n, "b_val", role="input")
    b_inv = bld.alloc(m.n, "b_inv", role="input")
    g = bld.alloc(m.n, "g", role="dirty_ancilla")
    clean = bld.alloc(macc.S, "clean", role="clean_ancilla")
    emit_psi_mult(bld, macc, a_val, a_inv, b_val, b_inv, g, clean)
    return bld.finish()


# ---------------------------------------------------------------------------
# Fibonacci multi-exponentiation (two-accumulator loop)


@dataclass
class MultiexpCircuit:
    circuit: ReversibleCircuit
    K: int
    c_regs: list[tuple[list[int], list[int]]]
    x1: tuple[list[int], list[int]]
    x2: tuple[list[int], list[int]]


def build_fib_multiexp(K: int, macc: MaccCircuit, instrument: bool = False) -> MultiexpCircuit:
    """|psi(c_1)..psi(c_K)>|0..> -> append psi(prod c_j^F_{j-1}), psi(prod c_j^F_j).

    The accumulator pair starts at psi(1), psi(1); each round j = K..1 does
    x1 <- x1*x2, x1 <- x1*c_j, swap(x1, x2).
    """
    m = macc.modulus
    n = m.n
    bld = CircuitBuilder()
    c_regs = []
    for j in range(1, K + 1):
        cv = bld.alloc(n, f"c{j}_val", role="input")
        ci = bld.alloc(n, f"c{j}_inv", role="input")
        c_regs.append((cv, ci))
    x1v = bld.alloc(n, "x1_val", role="output")
    x1i = bld.alloc(n, "x1_inv", role="output")
    x2v = bld.alloc(n, "x2_val", role="output")
    x2i = bld.alloc(n, "x2_inv", role="output")
    g = bld.alloc(n, "g", role="clean_ancilla")
    clean = bld.alloc(macc.S, "clean", role="clean_ancilla")
    for w in (x1v, x1i, x2v, x2i):
        bld.emit_not(w[0])  # psi(1)
    for j in range(K, 0, -1):
        cv, ci = c_regs[j - 1]
        emit_psi_mult(bld, macc, x2v, x2i, x1v, x1i, g, clean)
        emit_psi_mult(bld, macc, cv, ci, x1v, x1i, g, clean)
        ar.swap_registers(bld, x1v, x2v)
        ar.swap_registers(bld, x1i, x2i)
        if instrument:
            bld.checkpoint("fib_round", {"j": j, "x1": (x1v, x1i), "x2": (x2v, x2i)})
    return MultiexpCircuit(bld.finish(), K, c_regs, (x1v, x1i), (x2v, x2i))


# ---------------------------------------------------------------------------
# small-base product


def small_product_table(N: int, a: Sequence[int], invert: bool) -> list[int]:
    d = len(a)
    table = []
    for x in range(1 << d):
        v = 1
        for i, ai in enumerate(a):
            e = (x >> i) & 1
            if invert:
                e = 1 - e
            if e:
                v = v * ai % N
        table.append(v)
    return table


def emit_small_product(bld: CircuitBuilder, N: int, a: Sequence[int],
                       controls: Sequence[int], out: Sequence[int], invert: bool) -> None:
    """out ^= prod a_i^{t_i} mod N (exponents 1-t_i when invert is set).

    Emitted from the XOR (algebraic normal form) expansion of the truth
    table: one multi-controlled NOT per nonzero ANF coefficient bit.  The
    out register supplies borrowable wires for the decompositions.
    """
    d = len(controls)
    anf = small_product_table(N, a, invert)
    for i in range(d):
        step = 1 << i
        for x in range(1 << d):
            if x & step:
                anf[x] ^= anf[x ^ step]
    for x in range(1 << d):
        coeff = anf[x]
        if coeff == 0:
            continue
        ctl = [controls[i] for i in range(d) if (x >> i) & 1]
        for j in range(len(out)):
            if (coeff >> j) & 1:
                free = [w for w in out if w != out[j]]
                ar.toffoli_multi(bld, ctl, out[j], free)


def build_small_product(p: FibParams, invert: bool = False) -> ReversibleCircuit:
    bld = CircuitBuilder()
    t = bld.alloc(p.d, "t", role="input")
    out = bld.alloc(p.n, "out", role="output")
    emit_small_product(bld, p.N, p.a, t, out, invert)
    return bld.finish()


# ---------------------------------------------------------------------------
# the full oracle (Algorithm 2 shape)


def oracle_layout(p: FibParams, S: int) -> dict[str, int]:
    """Exact wire budget of the oracle builder, by ledger item.

    ``psi_constant_pair`` includes the n wires that double as the scratch
    register of the constant-multiplication step (time-shared), matching
    the space ledger's remark that n of the 2n psi(c_j) wires are reused
    multiplication ancillas.  ``zeckendorf_working`` is the one exponent
    register that cannot hand its wires to a later row (the greedy passes
    overlap their own bit rows).
    """
    n, d = p.n, p.d
    shortfall = max(0, (n - 1) - d * (p.K - 1))
    return {
        "zeckendorf_bits": d * p.K,
        "zeckendorf_working": p.log_D,
        "accumulators": 4 * n,
        "psi_constant_pair": 2 * n,
        "mult_clean": S,
        "dirty_pool_clean_bit": 1,
        "dirty_pool_shortfall": shortfall,
    }


def predicted_oracle_qubits(p: FibParams, S: int) -> int:
    return sum(oracle_layout(p, S).values())


@dataclass
class OracleCircuit:
    circuit: ReversibleCircuit
    params: FibParams
    z_rows: list[list[int]]
    output: list[int]
    layout: dict[str, int]
    bit_wires: list[list[int]] = field(repr=False, default_factory=list)
    x1: tuple[list[int], list[int]] | None = None
    x2: tuple[list[int], list[int]] | None = None

    def input_state(self, z: Sequence[int]) -> list[int]:
        """Basis state with z written two's complement, everything else 0."""
        p = self.params
        state = [0] * self.circuit.width
        for row, zi in zip(self.z_rows, z):
            if not -p.D // 2 <= zi < p.D // 2:
                raise ValueError("z coordinate out of range")
            for k, w in enumerate(row):
                state[w] = (zi >> k) & 1 if zi >= 0 else ((zi + p.D) >> k) & 1
        return state

    def output_value(self, state: Sequence[int]) -> int:
        from .circuits import int_from_bits

        return int_from_bits(state, self.output)


def build_regev_oracle(p: FibParams, macc: MaccCircuit, instrument: bool = False) -> OracleCircuit:
    """|z>|0^M> -> |prod a_i^{z_i+D/2} mod N> |junk> (output register x2_val).

    Round structure per exponent index j = K..1: assemble an n-wire dirty
    register from one clean bit (as the top bit, keeping its value reduced)
    plus idle z_{i,j'} bits with j' != j, update x1 <- x1*x2, prepare
    psi(c_j) by computing prod a_i^{1-z_{i,j}}, multiplying in the constant
    prod a_i^{-1}, and computing c_j itself, update x1 <- x1*c_j, uncompute
    psi(c_j) (which also restores the borrowed dirty bits), and swap the
    accumulators.
    """
    if macc.modulus != p.modulus:
        raise CircuitError("macc modulus does not match parameters")
    n, d, K, S = p.n, p.d, p.K, macc.S
    layout = oracle_layout(p, S)
    bld = CircuitBuilder()
    w = p.log_D
    z = bld.alloc(d * w, "z", role="input")
    z_rows = [z[i * w : (i + 1) * w] for i in range(d)]
    x1v = bld.alloc(n, "x1_val", role="clean_ancilla")
    x1i = bld.alloc(n, "x1_inv", role="clean_ancilla")
    x2v = bld.alloc(n, "x2_val", role="output")
    x2i = bld.alloc(n, "x2_inv", role="clean_ancilla")
    u = bld.alloc(n, "cj_inv", role="clean_ancilla")      # will hold c_j^-1
    v = bld.alloc(n, "cj_val", role="clean_ancilla")      # doubles as Lemma-6 scratch
    clean = bld.alloc(S, "mult_clean", role="clean_ancilla")
    top = bld.alloc(1, "pool_top", role="clean_ancilla")[0]
    shortfall = layout["dirty_pool_shortfall"]
    extra_pool = bld.alloc(shortfall, "pool_extra", role="clean_ancilla") if shortfall else []

    # phase 1: Zeckendorf bits (borrow accumulator wires for the constant ops)
    e, c0 = clean[0], clean[1]
    zpool = x1v + x1i + x2v + x2i
    assert len(zpool) >= w + 1, "accumulators too narrow for exponent arithmetic"
    bit_wires = []
    for i in range(d):
        t = z_rows[i]
        bits = bld.alloc(K)
        bld.emit_not(t[-1])
        emit_zeckendorf_row(bld, t, K, e, c0, zpool, bits)
        bld.free(t)
        bit_wires.append(bits)

    # phase 2: accumulators at psi(1)
    for reg in (x1v, x1i, x2v, x2i):
        bld.emit_not(reg[0])

    # phase 3: rounds
    all_bits = [(i, j) for i in range(d) for j in range(1, K + 1)]
    for j in range(K, 0, -1):
        col = [bit_wires[i][j - 1] for i in range(d)]
        borrow = [bit_wires[i][jp - 1] for (i, jp) in all_bits if jp != j]
        g = borrow[: n - 1 - shortfall] + list(extra_pool) + [top]
        assert len(g) == n
        if instrument:
            bld.checkpoint("round_start", {"j": j, "pool": list(g), "col": col})
        emit_psi_mult(bld, macc, x2v, x2i, x1v, x1i, g, clean)

        def prepare(col=col, g=g):
            emit_small_product(bld, p.N, p.a, col, u, invert=True)
            emit_mult_const_inplace(bld, macc, p.prod_a_inv, u, g, v, clean)
            emit_small_product(bld, p.N, p.a, col, v, invert=False)

        prepare()
        if instrument:
            bld.checkpoint("cj_ready", {"j": j, "col": col, "cj": (v, u)})
        emit_psi_mult(bld, macc, v, u, x1v, x1i, g, clean)
        ar.reversed_emission(bld, prepare)
        ar.swap_registers(bld, x1v, x2v)
        ar.swap_registers(bld, x1i, x2i)
        if instrument:
            bld.checkpoint("round_end", {"j": j, "pool": list(g),
                                         "x1": (x1v, x1i), "x2": (x2v, x2i)})

    circ = bld.finish()
    assert circ.width == predicted_oracle_qubits(p, S), "layout drifted from predictor"
    return OracleCircuit(circ, p, z_rows, x2v, layout, bit_wires, (x1v, x1i), (x2v, x2i))


# ---------------------------------------------------------------------------
# single-base modular exponentiation


@dataclass
class ModexpCircuit:
    circuit: ReversibleCircuit
    a_regs: tuple[list[int], list[int]]
    z_wires: list[int]
    output: list[int]


def build_modexp(z_width: int, macc: MaccCircuit) -> ModexpCircuit:
    """|psi(a)>|z>|0^M> -> |psi(a)>|z>|a^z mod N>|0^(M-n)>.

    The exponent is decomposed into Fibonacci bits on a working copy; each
    round's psi(c_j) is psi(a) or psi(1) selected by the bit, built with
    conditional copies.  Everything except the copied-out result is
    uncomputed.
    """
    m = macc.modulus
    n = m.n
    K = max_fib_index((1 << z_width) - 1) if z_width > 0 else 0
    bld = CircuitBuilder()
    a_val = bld.alloc(n, "a_val", role="input")
    a_inv = bld.alloc(n, "a_inv", role="input")
    z = bld.alloc(z_width, "z", role="input")
    out = bld.alloc(n, "out", role="output")
    x1v = bld.alloc(n, "x1_val", role="clean_ancilla")
    x1i = bld.alloc(n, "x1_inv", role="clean_ancilla")
    x2v = bld.alloc(n, "x2_val", role="clean_ancilla")
    x2i = bld.alloc(n, "x2_inv", role="clean_ancilla")
    cv = bld.alloc(n, "c_val", role="clean_ancilla")
    ci = bld.alloc(n, "c_inv", role="clean_ancilla")
    g = bld.alloc(n, "g", role="clean_ancilla")
    clean = bld.alloc(macc.S, "clean", role="clean_ancilla")
    tcopy = bld.alloc(z_width, "zcopy", role="clean_ancilla")
    zbits = bld.alloc(K, "zbits", role="clean_ancilla")
    e, c0 = clean[0], clean[1]
    pool = x1v + x1i + x2v + x2i

    def forward():
        ar.copy_register(bld, z, tcopy)
        emit_zeckendorf_row(bld, tcopy, K, e, c0, pool, zbits)
        for reg in (x1v, x1i, x2v, x2i):
            bld.emit_not(reg[0])
        for j in range(K, 0, -1):
            zb = zbits[j - 1]
            emit_psi_mult(bld, macc, x2v, x2i, x1v, x1i, g, clean)
            # c_j = a if z_j else 1, via conditional copy into (cv, ci)
            for src, dst in ((a_val, cv), (a_inv, ci)):
                bld.emit_not(dst[0])
                bld.emit_cnot(zb, dst[0])
                for k in range(n):
                    bld.emit_ccnot(zb, src[k], dst[k])
            emit_psi_mult(bld, macc, cv, ci, x1v, x1i, g, clean)
            for src, dst in ((a_val, cv), (a_inv, ci)):
                for k in range(n):
                    bld.emit_ccnot(zb, src[k], dst[k])
                bld.emit_cnot(zb, dst[0])
                bld.emit_not(dst[0])
            ar.swap_registers(bld, x1v, x2v)
            ar.swap_registers(bld, x1i, x2i)

    forward()
    ar.copy_register(bld, x2v, out)
    ar.reversed_emission(bld, forward)
    circ = bld.finish()
    return ModexpCircuit(circ, (a_val, a_inv), z, out)


# ---------------------------------------------------------------------------
# resource prediction


@dataclass(frozen=True)
class ResourcePrediction:
    """Closed-form qubit budget for the exponentiation oracle.

    ``ledger`` itemizes this implementation's exact small-n bookkeeping
    (component values sum to ``total_qubits``); ``leading_coefficient`` is
    the asymptotic qubits-per-n figure A/log2(phi) + 6 that the exact total
    approaches as n grows, on top of the flat S term.
    """

    n: int
    d: int
    S: int
    G: int
    A: Fraction
    log_D: int
    K: int
    ledger: dict[str, int]
    total_qubits: int
    leading_coefficient: float

    @property
    def gate_budget_hint(self) -> str:
        return f"O(sqrt(n)*G + n^1.5) with G={self.G}"


def predict_resources(n: int, S: int, G: int, A: Fraction | int | str,
                      d: int | None = None) -> ResourcePrediction:
    """Analytic qubit budget of the oracle at bit length n (no circuit build)."""
    if n <= 0:
        raise ValueError("n must be positive")
    A = Fraction(A)
    if d is None:
        d = max(1, math.isqrt(n))
    log_R = _ceil_mul_sqrt(A, n)
    log_D = _pow2_at_least(4 * d * (1 << (2 * log_R)))
    K = max_fib_index(1 << log_D)
    shortfall = max(0, (n - 1) - d * (K - 1))
    ledger = {
        "zeckendorf_bits": d * K,
        "zeckendorf_working": log_D,
        "accumulators": 4 * n,
        "psi_constant_pair": 2 * n,
        "mult_clean": S,
        "dirty_pool_clean_bit": 1,
        "dirty_pool_shortfall": shortfall,
    }
    total = sum(ledger.values())
    coeff = float(A) / LOG2_PHI + 6
    return ResourcePrediction(n, d, S, G, A, log_D, K, ledger, total, coeff)
