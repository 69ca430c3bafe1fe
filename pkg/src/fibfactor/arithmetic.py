"""Reversible integer arithmetic building blocks.

Everything here emits gates into a :class:`~fibfactor.circuits.CircuitBuilder`
over little-endian wire lists.  The primitives:

- Cuccaro-style ripple addition/subtraction between registers, with an
  optional single control wire and optional carry-out toggle;
- carry/comparison toggles that leave both operand registers unchanged;
- increment/decrement of a register using a borrowed dirty register
  (double-subtract trick), optionally controlled;
- addition of a classical constant, either borrowing a dirty register
  (shifted increments over the constant's signed digits) or, for circuits
  with no spare register at all, by toggling each target bit with the
  explicit carry products (multi-controlled NOTs);
- Barenco-style multi-controlled NOT needing one borrowable wire.

Controls: a controlled ripple add applies the control only to the gates
that write into the target register; the carry bookkeeping runs and then
undoes itself, so with the control off the whole register set is restored.
Dirty helpers may hold arbitrary values and are always restored.
"""
from __future__ import annotations

from typing import Sequence

from .circuits import CircuitBuilder


def _assert_disjoint(*groups: Sequence[int]) -> None:
    seen: set[int] = set()
    for g in groups:
        for w in g:
            assert w not in seen, f"wire {w} used in two roles"
            seen.add(w)


def reversed_emission(bld: CircuitBuilder, emit_fn) -> None:
    """Run ``emit_fn`` and reverse the gates it emitted (exact inverse)."""
    start = len(bld.gates)
    emit_fn()
    seg = bld.gates[start:]
    seg.reverse()
    bld.gates[start:] = seg


def write_const(bld: CircuitBuilder, wires: Sequence[int], value: int) -> None:
    """XOR a classical constant into a register (NOTs on zero wires write it)."""
    for i, w in enumerate(wires):
        if (value >> i) & 1:
            bld.emit_not(w)


def copy_register(bld: CircuitBuilder, src: Sequence[int], dst: Sequence[int]) -> None:
    assert len(src) == len(dst)
    for s, d in zip(src, dst):
        bld.emit_cnot(s, d)


def swap_registers(bld: CircuitBuilder, a: Sequence[int], b: Sequence[int]) -> None:
    assert len(a) == len(b)
    for x, y in zip(a, b):
        bld.emit_swap(x, y)


def _maj(bld, cw: int, y: int, x: int, ctrl: int | None) -> None:
    if ctrl is None:
        bld.emit_cnot(x, y)
    else:
        bld.emit_ccnot(ctrl, x, y)
    bld.emit_cnot(x, cw)
    bld.emit_ccnot(cw, y, x)


def _uma(bld, cw: int, y: int, x: int, ctrl: int | None) -> None:
    bld.emit_ccnot(cw, y, x)
    bld.emit_cnot(x, cw)
    if ctrl is None:
        bld.emit_cnot(cw, y)
    else:
        bld.emit_ccnot(ctrl, cw, y)


def ripple_add(bld: CircuitBuilder, x: Sequence[int], y: Sequence[int], c0: int,
               ctrl: int | None = None, carry_out: int | None = None) -> None:
    """y += x (mod 2^w), Cuccaro ripple; ``c0`` is one clean helper wire.

    With ``ctrl`` given, only the writes into ``y`` (and ``carry_out``) are
    controlled; everything else self-cancels, so ctrl=0 is an exact no-op.
    ``carry_out``, when given, gets the carry XORed in; the wire it lives on
    must not alias the operands.
    """
    w = len(x)
    assert len(y) == w and w >= 1
    extra = [c0] + ([] if ctrl is None else [ctrl]) + ([] if carry_out is None else [carry_out])
    _assert_disjoint(x, y, extra)
    carries = [c0] + list(x[:-1])
    for i in range(w):
        _maj(bld, carries[i], y[i], x[i], ctrl)
    if carry_out is not None:
        if ctrl is None:
            bld.emit_cnot(x[w - 1], carry_out)
        else:
            bld.emit_ccnot(ctrl, x[w - 1], carry_out)
    for i in reversed(range(w)):
        _uma(bld, carries[i], y[i], x[i], ctrl)


def ripple_sub(bld: CircuitBuilder, x: Sequence[int], y: Sequence[int], c0: int,
               ctrl: int | None = None) -> None:
    """y -= x (mod 2^w): exact inverse of :func:`ripple_add`."""
    reversed_emission(bld, lambda: ripple_add(bld, x, y, c0, ctrl))


def carry_toggle(bld: CircuitBuilder, x: Sequence[int], y: Sequence[int], c0: int,
                 target: int, ctrl: int | None = None) -> None:
    """target ^= carry(x + y); both registers are left unchanged."""
    w = len(x)
    assert len(y) == w
    _assert_disjoint(x, y, [c0, target] + ([] if ctrl is None else [ctrl]))
    carries = [c0] + list(x[:-1])
    for i in range(w):
        _maj(bld, carries[i], y[i], x[i], None)
    if ctrl is None:
        bld.emit_cnot(x[w - 1], target)
    else:
        bld.emit_ccnot(ctrl, x[w - 1], target)
    for i in reversed(range(w)):
        # inverse of MAJ (gates reversed; each self-inverse)
        bld.emit_ccnot(carries[i], y[i], x[i])
        bld.emit_cnot(x[i], carries[i])
        bld.emit_cnot(x[i], y[i])


def gt_toggle(bld: CircuitBuilder, x: Sequence[int], y: Sequence[int], c0: int,
              target: int, ctrl: int | None = None) -> None:
    """target ^= [x > y] via carry(~y + x)."""
    for wire in y:
        bld.emit_not(wire)
    carry_toggle(bld, x, y, c0, target, ctrl)
    for wire in y:
        bld.emit_not(wire)


def increment(bld: CircuitBuilder, y: Sequence[int], dirty: Sequence[int], c0: int,
              ctrl: int | None = None) -> None:
    """y += 1 (mod 2^w) borrowing a dirty register of the same width.

    Uses y - g - ~g = y + 1 (mod 2^w); the dirty register is restored.
    """
    w = len(y)
    if w == 0:
        return
    if w == 1:
        if ctrl is None:
            bld.emit_not(y[0])
        else:
            bld.emit_cnot(ctrl, y[0])
        return
    g = list(dirty[:w])
    assert len(g) == w, "increment needs a dirty register as wide as the target"
    _assert_disjoint(y, g, [c0] + ([] if ctrl is None else [ctrl]))
    ripple_sub(bld, g, y, c0, ctrl)
    for wire in g:
        bld.emit_not(wire)
    ripple_sub(bld, g, y, c0, ctrl)
    for wire in g:
        bld.emit_not(wire)


def decrement(bld: CircuitBuilder, y: Sequence[int], dirty: Sequence[int], c0: int,
              ctrl: int | None = None) -> None:
    reversed_emission(bld, lambda: increment(bld, y, dirty, c0, ctrl))


def naf_digits(c: int) -> list[tuple[int, int]]:
    """Non-adjacent form of c >= 0 as (bit index, +1/-1) pairs."""
    digits = []
    i = 0
    while c:
        if c & 1:
            d = 2 - (c & 3)  # +1 if c % 4 == 1 else -1
            digits.append((i, d))
            c -= d
        c >>= 1
        i += 1
    return digits


def add_const(bld: CircuitBuilder, y: Sequence[int], c: int, c0: int,
              dirty: Sequence[int], ctrl: int | None = None) -> None:
    """y += c (mod 2^w) via shifted increments over the NAF digits of c.

    ``dirty`` must supply at least as many wires as the widest shifted
    sub-register touched (at most w when c is odd), all disjoint from y.
    """
    w = len(y)
    c %= 1 << w
    if c == 0:
        return
    for i, sign in naf_digits(c):
        if i >= w:
            continue
        sub = y[i:]
        if sign > 0:
            increment(bld, sub, dirty, c0, ctrl)
        else:
            decrement(bld, sub, dirty, c0, ctrl)


def sub_const(bld: CircuitBuilder, y: Sequence[int], c: int, c0: int,
              dirty: Sequence[int], ctrl: int | None = None) -> None:
    add_const(bld, y, -c % (1 << len(y)), c0, dirty, ctrl)


def toffoli_multi(bld: CircuitBuilder, controls: Sequence[int], target: int,
                  free: Sequence[int], negated: Sequence[int] = ()) -> None:
    """target ^= AND of control literals; ``free`` wires may be dirty.

    Controls listed in ``negated`` are complemented.  For three or more
    controls one borrowable wire is required (Barenco split); the recursion
    never assumes the borrowed wire is clean.
    """
    for wire in negated:
        bld.emit_not(wire)
    _toffoli_multi(bld, list(controls), target, [f for f in free if f != target and f not in controls])
    for wire in negated:
        bld.emit_not(wire)


def _toffoli_multi(bld, controls: list[int], target: int, free: list[int]) -> None:
    k = len(controls)
    if k == 0:
        bld.emit_not(target)
        return
    if k == 1:
        bld.emit_cnot(controls[0], target)
        return
    if k == 2:
        bld.emit_ccnot(controls[0], controls[1], target)
        return
    assert free, "multi-controlled NOT with >2 controls needs a spare wire"
    s = free[0]
    a = controls[: (k + 1) // 2]
    b = controls[(k + 1) // 2 :] + [s]
    free_a = [w for w in (b[:-1] + [target] + free[1:])]
    free_b = list(a) + free[1:]
    # t ^= B.(s xor A) xor B.s  =  A.B; s is restored
    _toffoli_multi(bld, a, s, free_a)
    _toffoli_multi(bld, b, target, free_b)
    _toffoli_multi(bld, a, s, free_a)
    _toffoli_multi(bld, b, target, free_b)


def add_const_zero_dirty(bld: CircuitBuilder, y: Sequence[int], c: int,
                         spare: Sequence[int], ctrl: int | None = None) -> None:
    """y += c (mod 2^w) with no borrowed register, only >=1 spare wire.

    Each target bit is toggled with its explicit carry expansion
    (sum of generate/propagate products), highest bit first so lower bits
    are still original when read.  Gate count grows like w^4, so this is
    reserved for standalone circuits whose interface leaves nothing to
    borrow; pooled paths use :func:`add_const`.
    """
    w = len(y)
    c %= 1 << w
    if c == 0:
        return
    for j in reversed(range(w)):
        # carry into bit j: XOR over l<j with c_l=1 of y_l * prod literals
        for l in range(j):
            if not (c >> l) & 1:
                continue
            controls = list(y[l:j])
            negs = [y[t] for t in range(l + 1, j) if (c >> t) & 1]
            if ctrl is not None:
                controls.append(ctrl)
            free = [s for s in spare] + [wt for wt in y if wt not in controls and wt != y[j]]
            toffoli_multi(bld, controls, y[j], free, negs)
        if (c >> j) & 1:
            if ctrl is None:
                bld.emit_not(y[j])
            else:
                bld.emit_cnot(ctrl, y[j])


def sub_const_zero_dirty(bld: CircuitBuilder, y: Sequence[int], c: int,
                         spare: Sequence[int], ctrl: int | None = None) -> None:
    add_const_zero_dirty(bld, y, -c % (1 << len(y)), spare, ctrl)
