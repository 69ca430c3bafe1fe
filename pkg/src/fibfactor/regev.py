"""Relation lattices for factoring and exact sampling from their duals.

For odd composite N (not a prime power) with small bases b_i coprime to N
and a_i = b_i^2 mod N, the relation lattice is

    L = { z in Z^d : prod a_i^{z_i} = 1 mod N },

with the sublattice L0 requiring prod b_i^{z_i} = +-1.  Everything here is
desk scale: the lattice is constructed from discrete logarithms in the CRT
components of (Z/N)* (a host-side oracle, brute force by design), and
L*/Z^d is sampled exactly uniformly through the Smith normal form of the
basis.

Sampling output lives on exact rational tori; corruption bookkeeping keeps
a ground-truth flag that downstream filtering must never read.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .lattice import (
    Cols,
    det_lattice,
    hnf,
    kernel_basis,
    snf,
    cols_to_rows,
)

TorusPoint = tuple[Fraction, ...]
MAX_BRUTE_FORCE_N = 1 << 24


class FactoringIsEasy(Exception):
    """N falls into one of the classically easy cases."""

    def __init__(self, reason: str, divisor: int | None = None):
        super().__init__(reason)
        self.reason = reason
        self.divisor = divisor


# ---------------------------------------------------------------------------
# torus helpers


def mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def torus_reduce(v: Iterable[Fraction]) -> TorusPoint:
    return tuple(mod1(Fraction(x)) for x in v)


def centered(x: Fraction) -> Fraction:
    x = mod1(x)
    return x - 1 if x >= Fraction(1, 2) else x


def torus_dist_sq(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((centered(a - b) ** 2 for a, b in zip(u, v)), Fraction(0))


def dist_sq_to_set(w: Sequence[Fraction], points: Iterable[Sequence[Fraction]]) -> Fraction:
    return min(torus_dist_sq(w, p) for p in points)


def le_pow2(value: Fraction, exponent: Fraction) -> bool:
    """Exact test value <= 2^exponent for value > 0 and rational exponent."""
    if value <= 0:
        return True
    p, q = exponent.numerator, exponent.denominator
    # value^q <= 2^p, moving negative powers across
    lhs = value ** q
    if p >= 0:
        return lhs <= (1 << p)
    return lhs * (1 << -p) <= 1


def floor_pow2(exponent: Fraction) -> int:
    """floor(2^exponent) for exponent >= 0."""
    p, q = exponent.numerator, exponent.denominator
    if q == 1:
        return 1 << p
    b = 1 << (p // q)
    while (b + 1) ** q <= (1 << p):
        b += 1
    return b


# ---------------------------------------------------------------------------
# host-side number theory oracles


def factorize(N: int) -> dict[int, int]:
    out: dict[int, int] = {}
    m = N
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def prod_pow_mod(N: int, bases: Sequence[int], z: Sequence[int]) -> int:
    """prod bases[i]^{z[i]} mod N with negative exponents via inverses."""
    out = 1
    for b, e in zip(bases, z):
        if e < 0:
            out = out * pow(pow(b, -1, N), -e, N) % N
        else:
            out = out * pow(b, e, N) % N
    return out


def group_order(N: int, gens: Sequence[int]) -> int:
    """|<gens>| inside (Z/N)* by breadth-first closure (test oracle)."""
    seen = {1}
    frontier = [1]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g % N
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(seen)


def _primitive_root(q: int, p: int, phi: int) -> int:
    prime_divs = list(factorize(phi))
    for g in range(2, q):
        if math.gcd(g, q) != 1:
            continue
        if all(pow(g, phi // r, q) != 1 for r in prime_divs):
            return g
    raise ArithmeticError(f"no generator found for (Z/{q})*")


def _dlog(g: int, a: int, q: int, order: int) -> int:
    """Baby-step giant-step discrete log of a base g in (Z/q)*."""
    m = math.isqrt(order) + 1
    baby = {}
    x = 1
    for j in range(m):
        baby.setdefault(x, j)
        x = x * g % q
    factor = pow(pow(g, m, q), -1, q)
    y = a % q
    for i in range(m + 1):
        if y in baby:
            return (i * m + baby[y]) % order
        y = y * factor % q
    raise ArithmeticError(f"{a} is not in <{g}> mod {q}")


# ---------------------------------------------------------------------------
# lattices with dual-quotient structure


def dual_quotient_generators(basis: Cols) -> list[tuple[int, TorusPoint]]:
    """Independent generators of L*/Z^d with orders = elementary divisors.

    From the Smith form U*B*V = S, the point (row i of U)/s_i lies in L*,
    has exact order s_i modulo Z^d, and the combined map
    (y_1..y_d) -> sum y_i h_i is a bijection from prod Z_{s_i} onto
    L*/Z^d, which is what makes exact uniform sampling possible.
    """
    d = len(basis)
    u, s, _ = snf(basis)
    srows = cols_to_rows(s)
    urows = cols_to_rows(u)
    gens = []
    for i in range(d):
        si = srows[i][i]
        if si == 1:
            continue
        gens.append((si, torus_reduce(Fraction(urows[i][j], si) for j in range(d))))
    return gens


@dataclass
class SyntheticLattice:
    """Any full-rank integer lattice, packaged for dual-coset sampling."""

    basis: Cols
    det: int
    dual_gens: list[tuple[int, TorusPoint]]

    @property
    def d(self) -> int:
        return len(self.basis)


def synthetic_lattice(basis: Cols) -> SyntheticLattice:
    canonical = hnf(basis)
    return SyntheticLattice(canonical, det_lattice(canonical),
                            dual_quotient_generators(canonical))


@dataclass
class RelationLattice:
    N: int
    bases: tuple[int, ...]
    a: tuple[int, ...]
    basis: Cols                      # canonical (HNF) column basis of L
    det: int
    dual_gens: list[tuple[int, TorusPoint]]  # (order s_i, generator of L*/Z^d)

    @property
    def d(self) -> int:
        return len(self.bases)


def check_easy_cases(N: int, bases: Sequence[int]) -> None:
    if N % 2 == 0:
        raise FactoringIsEasy("even", 2)
    fac = factorize(N)
    if len(fac) == 1:
        p = next(iter(fac))
        raise FactoringIsEasy("prime" if fac[p] == 1 else "prime power",
                              None if fac[p] == 1 else p)
    for b in bases:
        g = math.gcd(b, N)
        if g != 1:
            raise FactoringIsEasy("shared factor with base", g)


def build_relation_lattice(N: int, bases: Sequence[int]) -> RelationLattice:
    """Exact basis of L from discrete logs in the CRT components of (Z/N)*."""
    if N > MAX_BRUTE_FORCE_N:
        raise ValueError("relation lattice construction is brute force; N too large")
    bases = tuple(bases)
    check_easy_cases(N, bases)
    a = tuple(b * b % N for b in bases)
    d = len(bases)
    moduli: list[int] = []
    dlog_rows: list[list[int]] = []
    for p, e in sorted(factorize(N).items()):
        q = p**e
        phi = q // p * (p - 1)
        g = _primitive_root(q, p, phi)
        moduli.append(phi)
        dlog_rows.append([_dlog(g, ai % q, q, phi) for ai in a])
    k = len(moduli)
    # kernel of z -> (sum_i z_i dlog_row[i]) mod moduli, via integer kernel
    cols: Cols = [[dlog_rows[r][i] for r in range(k)] for i in range(d)]
    cols += [[moduli[r] if r == rr else 0 for r in range(k)] for rr in range(k)]
    kernel = kernel_basis(cols)
    basis = hnf([y[:d] for y in kernel])
    assert len(basis) == d, "relation lattice is not full rank"
    for col in basis:
        assert prod_pow_mod(N, a, col) == 1, "kernel vector violates the congruence"
    det = det_lattice(basis)
    return RelationLattice(N, bases, a, basis, det, dual_quotient_generators(basis))


def is_in_L(lat: RelationLattice, z: Sequence[int]) -> bool:
    return prod_pow_mod(lat.N, lat.a, z) == 1


def is_in_L0(lat: RelationLattice, z: Sequence[int]) -> bool:
    v = prod_pow_mod(lat.N, lat.bases, z)
    return v == 1 or v == lat.N - 1


def find_short_nonL0_vector(lat: RelationLattice, T: int) -> list[int] | None:
    """Exhaustively search L vectors of norm <= T outside L0 (d <= 3).

    Desk-scale verification of the short-vector conjecture: any hit yields a
    nontrivial square root of 1 mod N.
    """
    if lat.d > 3:
        raise ValueError("exhaustive search supports d <= 3 only")
    if T <= 0:
        return None
    best: list[int] | None = None
    best_norm = None
    rng_bound = int(T)
    import itertools

    for z in itertools.product(range(-rng_bound, rng_bound + 1), repeat=lat.d):
        ns = sum(x * x for x in z)
        if ns == 0 or ns > T * T:
            continue
        if best_norm is not None and ns >= best_norm:
            continue
        if is_in_L(lat, z) and not is_in_L0(lat, z):
            best, best_norm = list(z), ns
    return best


# ---------------------------------------------------------------------------
# exact dual sampling, perturbation, corruption


def enumerate_dual_group(lat: RelationLattice, limit: int = 10_000) -> list[TorusPoint]:
    if lat.det > limit:
        raise ValueError("dual group too large to enumerate")
    points = [tuple(Fraction(0) for _ in range(lat.d))]
    for s, g in lat.dual_gens:
        points = [
            torus_reduce(x + k * gi for x, gi in zip(p, g))
            for p in points
            for k in range(s)
        ]
    return points


def sample_dual_coset(lat: RelationLattice, rng: random.Random) -> TorusPoint:
    """Exactly uniform sample from L*/Z^d via the invariant-factor generators."""
    v = [Fraction(0)] * lat.d
    for s, g in lat.dual_gens:
        k = rng.randrange(s)
        if k:
            v = [x + k * gi for x, gi in zip(v, g)]
    return torus_reduce(v)


def perturb(v: Sequence[Fraction], delta_mag: Fraction, grid_Q: int,
            rng: random.Random) -> TorusPoint:
    """v plus a uniform grid point of the closed ball of radius delta_mag.

    The displacement is drawn from the 1/grid_Q grid (matching the
    measurement granularity of the sampled torus), by rejection from the
    bounding box.
    """
    d = len(v)
    delta_mag = Fraction(delta_mag)
    if delta_mag < 0:
        raise ValueError("delta magnitude must be nonnegative")
    t = int(delta_mag * grid_Q)  # floor
    if t == 0:
        return torus_reduce(v)
    bound_sq = delta_mag * delta_mag
    while True:
        k = [rng.randint(-t, t) for _ in range(d)]
        if sum(Fraction(x, grid_Q) ** 2 for x in k) <= bound_sq:
            return torus_reduce(x + Fraction(ki, grid_Q) for x, ki in zip(v, k))


Distribution = Callable[[random.Random, int], TorusPoint]


def uniform_torus_dist(grid_Q: int) -> Distribution:
    def draw(rng: random.Random, d: int) -> TorusPoint:
        return tuple(Fraction(rng.randrange(grid_Q), grid_Q) for _ in range(d))

    return draw


@dataclass
class SampleRecord:
    index: int
    w: TorusPoint
    corrupted: bool
    eta: int
    seed: str

    def to_json(self) -> str:
        den = 1
        for x in self.w:
            den = den * x.denominator // math.gcd(den, x.denominator)
        nums = [str(x.numerator * (den // x.denominator)) for x in self.w]
        return json.dumps(
            {
                "index": self.index,
                "numerators": nums,
                "denominator": str(den),
                "corrupted": self.corrupted,
                "eta": self.eta,
                "seed": self.seed,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "SampleRecord":
        obj = json.loads(line)
        den = int(obj["denominator"])
        w = tuple(Fraction(int(x), den) for x in obj["numerators"])
        return cls(int(obj["index"]), w, bool(obj.get("corrupted", False)),
                   int(obj.get("eta", 0)), str(obj.get("seed", "")))


def corrupt_stream(honest: Sequence[TorusPoint], p: Fraction, eta: int,
                   dist: Distribution, rng: random.Random,
                   seed_tag: str = "") -> list[SampleRecord]:
    """Independently corrupt each honest sample with probability p.

    A corrupted w becomes eta*(v + delta) + eps with eps drawn from ``dist``;
    eta=1 is the additive model, eta=0 the overwrite model.  The ground
    truth flag is for evaluation only and must never steer filtering.
    """
    if eta not in (0, 1):
        raise ValueError("eta must be 0 or 1")
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    records = []
    for i, w in enumerate(honest):
        d = len(w)
        corrupted = rng.random() < p
        if corrupted:
            eps = dist(rng, d)
            base = w if eta == 1 else tuple(Fraction(0) for _ in range(d))
            w = torus_reduce(b + e for b, e in zip(base, eps))
        records.append(SampleRecord(i, torus_reduce(w), corrupted, eta, seed_tag))
    return records


def save_samples(path, records: Iterable[SampleRecord]) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


def load_samples(path) -> list[SampleRecord]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(SampleRecord.from_json(line))
    return out


# ---------------------------------------------------------------------------
# the well-spread condition, checked by exhaustion


def check_well_spread(dist: Distribution, lat: RelationLattice, alpha: Fraction,
                      gamma: Fraction, A: Fraction, n: int, trials: int,
                      rng: random.Random, k: int | None = None,
                      search_cap: int = 500_000) -> Fraction:
    """Empirical pass rate of the well-spread condition for ``dist``.

    Each trial draws k samples and exhaustively searches nonzero integer
    coefficient vectors within the bound 2^((alpha-gamma+3)n/2d) for a
    combination within torus distance 2^((-2A+alpha-gamma+3)n/2d) of
    L*/Z^d; a trial passes when no such combination exists.
    """
    import itertools

    alpha, gamma, A = Fraction(alpha), Fraction(gamma), Fraction(A)
    d = lat.d
    if k is None:
        k = int((alpha - gamma - 1) * d)
    if k == 0:
        return Fraction(1)  # no samples, no nonzero combination
    if k < 0 or k > (alpha - gamma - 1) * d:
        raise ValueError("k must be a nonnegative integer at most (alpha-gamma-1)d")
    coeff_bound = floor_pow2((alpha - gamma + 3) * n / (2 * d))
    if (2 * coeff_bound + 1) ** k > search_cap:
        raise ValueError("coefficient search space exceeds the cap")
    dist_sq_exp = (-2 * A + alpha - gamma + 3) * n / d  # exponent of the squared bound
    dual = enumerate_dual_group(lat, limit=500)
    passes = 0
    for _ in range(trials):
        eps = [dist(rng, d) for _ in range(k)]
        bad = False
        for coeffs in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=k):
            if not any(coeffs):
                continue
            combo = torus_reduce(
                sum((c * e[i] for c, e in zip(coeffs, eps)), Fraction(0))
                for i in range(d)
            )
            if le_pow2(dist_sq_to_set(combo, dual), dist_sq_exp):
                bad = True
                break
        if not bad:
            passes += 1
    return Fraction(passes, trials)


# ---------------------------------------------------------------------------
# subset generation in Z_q^d (abelian-group sampling property)


def rank_mod_q(vectors: Sequence[Sequence[int]], q: int, d: int) -> int:
    """Rank over the field Z/q (q prime) of the given vectors."""
    rows = [[x % q for x in v] for v in vectors]
    rank = 0
    for col in range(d):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, q)
        rows[rank] = [x * inv % q for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(a - f * b) % q for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def all_subsets_generate(q: int, d: int, alpha: Fraction, gamma: Fraction,
                         n_subsets: int, rng: random.Random) -> bool:
    """Draw ceil(alpha*d) uniform samples of Z_q^d; test ``n_subsets`` random
    ceil(gamma*d)-subsets for generation (full rank mod prime q)."""
    m = math.ceil(alpha * d)
    ksub = math.ceil(gamma * d)
    samples = [[rng.randrange(q) for _ in range(d)] for _ in range(m)]
    for _ in range(n_subsets):
        chosen = rng.sample(range(m), ksub)
        if rank_mod_q([samples[i] for i in chosen], q, d) < d:
            return False
    return True
