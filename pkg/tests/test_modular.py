import itertools
import random

import pytest

from fibfactor.circuits import int_from_bits, inverse, random_state, set_bits, simulate
from fibfactor.modular import (
    ClassicalNetlist,
    Modulus,
    NetGate,
    NetlistBuilder,
    build_add_modN,
    build_double_modN,
    build_macc_from_mult,
    build_mult_modN,
    build_reduce_modN,
    build_schoolbook_macc,
    compile_classical,
    multiplier_from_netlist,
    schoolbook_mult_widget,
)

MODULI = [7, 15, 77, 101, 3127]


def run_registers(circ, **regs):
    state = [0] * circ.width
    for name, value in regs.items():
        set_bits(state, circ.register(name).wires, value)
    out = simulate(circ, state)
    return out


def reg_val(circ, state, name):
    return int_from_bits(state, circ.register(name).wires)


# ---------------------------------------------------------------------------
# compile_classical


def test_compile_not_netlist():
    net = ClassicalNetlist(2, [NetGate("NOT", (0,), 1)], inputs=[0], outputs=[1])
    circ = compile_classical(net)
    out = run_registers(circ, x=1)
    assert reg_val(circ, out, "f") == 0
    assert reg_val(circ, out, "scratch") == 0
    out = run_registers(circ, x=0)
    assert reg_val(circ, out, "f") == 1


def test_compile_and_netlist():
    net = ClassicalNetlist(3, [NetGate("AND", (0, 1), 2)], inputs=[0, 1], outputs=[2])
    circ = compile_classical(net)
    out = run_registers(circ, x=3)
    assert reg_val(circ, out, "f") == 1
    out = run_registers(circ, x=1)
    assert reg_val(circ, out, "f") == 0


def random_netlist(rng, n_inputs, n_gates):
    nb = NetlistBuilder(n_inputs)
    live = list(range(n_inputs))
    for _ in range(n_gates):
        if rng.random() < 0.4:
            live.append(nb.n_not(rng.choice(live)))
        else:
            live.append(nb.n_and(rng.choice(live), rng.choice(live)))
    outs = rng.sample(live, min(3, len(live)))
    return nb.finish(outs)


@pytest.mark.parametrize("seed", range(6))
def test_compile_random_netlists_match_classical_eval(seed):
    rng = random.Random(seed)
    n_i = rng.randint(2, 6)
    net = random_netlist(rng, n_i, 20)
    circ = compile_classical(net)
    for x in range(1 << n_i):
        out = run_registers(circ, x=x)
        assert reg_val(circ, out, "f") == net.evaluate(x)
        assert reg_val(circ, out, "scratch") == 0
        assert reg_val(circ, out, "x") == x


def test_netlist_validation_rejects_bad_wiring():
    bad = ClassicalNetlist(2, [NetGate("NOT", (1,), 1)], inputs=[0], outputs=[1])
    with pytest.raises(Exception):
        compile_classical(bad)


# ---------------------------------------------------------------------------
# modular addition / doubling


def test_add_modN_examples():
    m = Modulus.of(7)
    circ = build_add_modN(m)
    out = run_registers(circ, x=3, y=5)
    assert reg_val(circ, out, "y") == 1
    assert reg_val(circ, out, "x") == 3
    assert reg_val(circ, out, "anc") == 0
    out = run_registers(circ, x=0, y=4)
    assert reg_val(circ, out, "y") == 4
    circ15 = build_add_modN(Modulus.of(15))
    out = run_registers(circ15, x=14, y=14)
    assert reg_val(circ15, out, "y") == 13


def test_double_modN_examples():
    circ = build_double_modN(Modulus.of(7))
    out = run_registers(circ, x=5)
    assert reg_val(circ, out, "x") == 3
    out = run_registers(circ, x=0)
    assert reg_val(circ, out, "x") == 0
    halved = inverse(circ)
    out = run_registers(halved, x=3)
    assert reg_val(halved, out, "x") == 5


def test_double_modN_rejects_even_modulus():
    with pytest.raises(ValueError):
        build_double_modN(Modulus.of(10))


@pytest.mark.parametrize("N", MODULI)
def test_add_modN_random(N):
    m = Modulus.of(N)
    circ = build_add_modN(m)
    rng = random.Random(N)
    trials = 200 if N > 100 else 60
    for _ in range(trials):
        x, y = rng.randrange(N), rng.randrange(N)
        out = run_registers(circ, x=x, y=y)
        assert reg_val(circ, out, "x") == x
        assert reg_val(circ, out, "y") == (x + y) % N
        assert reg_val(circ, out, "anc") == 0


@pytest.mark.parametrize("N", [N for N in MODULI if N % 2])
def test_double_modN_random(N):
    m = Modulus.of(N)
    circ = build_double_modN(m)
    rng = random.Random(N + 1)
    trials = 200 if N > 100 else 60
    for _ in range(trials):
        x = rng.randrange(N)
        out = run_registers(circ, x=x)
        assert reg_val(circ, out, "x") == (2 * x) % N
        assert reg_val(circ, out, "anc") == 0


# ---------------------------------------------------------------------------
# macc circuits


def test_schoolbook_macc_examples():
    macc = build_schoolbook_macc(Modulus.of(15))
    circ = macc.circuit
    out = run_registers(circ, a=7, b=8, t=4)
    assert reg_val(circ, out, "t") == 0  # (4 + 56) mod 15
    out = run_registers(circ, a=0, b=9, t=11)
    assert reg_val(circ, out, "t") == 11
    macc101 = build_schoolbook_macc(Modulus.of(101))
    out = run_registers(macc101.circuit, a=13, b=57, t=100)
    assert reg_val(macc101.circuit, out, "t") == 33
    assert macc101.S == 2


@pytest.mark.parametrize("N", [N for N in MODULI if N % 2])
def test_schoolbook_macc_random_and_inverse(N):
    m = Modulus.of(N)
    macc = build_schoolbook_macc(m)
    circ = macc.circuit
    inv = inverse(circ)
    rng = random.Random(N + 2)
    trials = 200 if N >= 77 else 60
    for _ in range(trials):
        a, b, t = (rng.randrange(N) for _ in range(3))
        out = run_registers(circ, a=a, b=b, t=t)
        assert reg_val(circ, out, "a") == a
        assert reg_val(circ, out, "b") == b
        assert reg_val(circ, out, "t") == (t + a * b) % N
        assert reg_val(circ, out, "anc") == 0
        # subtractive inverse mapping
        back = simulate(inv, out)
        assert reg_val(circ, back, "t") == t


@pytest.mark.parametrize("N", [7, 101, 3127])
def test_macc_reversibility_on_arbitrary_states(N):
    macc = build_schoolbook_macc(Modulus.of(N))
    circ = macc.circuit
    inv = inverse(circ)
    rng = random.Random(N + 3)
    for _ in range(100):
        s = random_state(circ.width, rng)
        assert simulate(inv, simulate(circ, s)) == s


# ---------------------------------------------------------------------------
# reduction and the generic macc construction


def test_reduce_modN_examples():
    circ = build_reduce_modN(Modulus.of(7))
    out = run_registers(circ, c=30)
    assert reg_val(circ, out, "res") == 2
    assert reg_val(circ, out, "c") == 30
    out = run_registers(circ, c=0)
    assert reg_val(circ, out, "res") == 0
    circ101 = build_reduce_modN(Modulus.of(101))
    out = run_registers(circ101, c=10200)
    assert reg_val(circ101, out, "res") == 100
    assert reg_val(circ101, out, "scratch") == 0


@pytest.mark.parametrize("N", [7, 15, 77, 101])
def test_reduce_modN_random(N):
    m = Modulus.of(N)
    circ = build_reduce_modN(m)
    rng = random.Random(N + 4)
    for _ in range(80):
        c = rng.randrange(1 << (2 * m.n))
        out = run_registers(circ, c=c)
        assert reg_val(circ, out, "res") == c % N, c
        assert reg_val(circ, out, "c") == c
        assert reg_val(circ, out, "scratch") == 0


@pytest.mark.parametrize("N", [7, 77, 101])
def test_mult_modN_out_of_place(N):
    m = Modulus.of(N)
    mult = build_mult_modN(m)
    rng = random.Random(N + 5)
    for _ in range(60):
        a, b = rng.randrange(N), rng.randrange(N)
        out = run_registers(mult.circuit, a=a, b=b)
        assert reg_val(mult.circuit, out, "out") == (a * b) % N
        assert reg_val(mult.circuit, out, "scratch") == 0


def test_macc_from_mult_matches_schoolbook():
    m = Modulus.of(77)
    generic = build_macc_from_mult(build_mult_modN(m), m)
    school = build_schoolbook_macc(m)
    assert generic.S == 77 .bit_length() + build_mult_modN(m).S0
    rng = random.Random(99)
    for _ in range(50):
        a, b, t = (rng.randrange(77) for _ in range(3))
        for macc in (generic, school):
            out = run_registers(macc.circuit, a=a, b=b, t=t)
            assert reg_val(macc.circuit, out, "t") == (t + a * b) % 77
            assert all(out[w] == 0 for w in macc.clean)


def test_macc_from_mult_trivial_cases():
    m = Modulus.of(15)
    macc = build_macc_from_mult(build_mult_modN(m), m)
    out = run_registers(macc.circuit, a=1, b=6, t=0)
    assert reg_val(macc.circuit, out, "t") == 6
    out = run_registers(macc.circuit, a=2, b=7, t=3)
    assert reg_val(macc.circuit, out, "t") == 2


def mult_netlist(m: Modulus) -> ClassicalNetlist:
    """Brute-force (a, b) -> ab mod N netlist via a disjoint-minterm OR tree."""
    n = m.n
    nb = NetlistBuilder(2 * n)
    neg = [nb.n_not(i) for i in range(2 * n)]
    out_accum: list[int | None] = [None] * n
    for a in range(m.N):
        for b in range(m.N):
            value = (a * b) % m.N
            if value == 0:
                continue
            x = a | (b << n)
            term = None
            for i in range(2 * n):
                lit = i if (x >> i) & 1 else neg[i]
                term = lit if term is None else nb.n_and(term, lit)
            for j in range(n):
                if (value >> j) & 1:
                    prev = out_accum[j]
                    out_accum[j] = term if prev is None else nb.n_or(prev, term)
    zero = nb.n_and(0, neg[0])  # constant 0 wire
    outs = [w if w is not None else zero for w in out_accum]
    return nb.finish(outs)


def test_macc_from_compiled_netlist_multiplier():
    m = Modulus.of(15)
    net = mult_netlist(m)
    for a in range(m.N):
        for b in range(m.N):
            assert net.evaluate(a | (b << m.n)) == (a * b) % m.N
    mult = multiplier_from_netlist(net, m)
    assert mult.S0 >= 2
    macc = build_macc_from_mult(mult, m)
    rng = random.Random(5)
    for _ in range(40):
        a, b, t = (rng.randrange(15) for _ in range(3))
        out = run_registers(macc.circuit, a=a, b=b, t=t)
        assert reg_val(macc.circuit, out, "t") == (t + a * b) % 15
        assert all(out[w] == 0 for w in macc.clean)


def test_macc_from_mult_rejects_tiny_ancilla_block():
    m = Modulus.of(7)
    mult = build_mult_modN(m)
    starved = type(mult)(mult.circuit, m, mult.a, mult.b, mult.out, mult.clean[:1])
    with pytest.raises(Exception):
        build_macc_from_mult(starved, m)
