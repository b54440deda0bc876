"""Prime-power tables and weighted prime sums.

The central object tags every prime power n = p^k in a range with its base
and exponent, so set-level statements (which n land in which residue
class, how psi decomposes over characters) can be tested exactly on
integers.  Floats enter only when a sum is finally rendered, and renders
go through math.fsum on a fixed ordering, so repeated runs agree bit for
bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from zeropair.characters import DirichletCharacter, UnitRoot, euler_phi


def primes_up_to(limit: int) -> np.ndarray:
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def primes_in_window(lo: int, hi: int) -> np.ndarray:
    """Primes in [lo, hi], sieved against base primes up to sqrt(hi)."""
    lo = max(lo, 2)
    if hi < lo:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(hi - lo + 1, dtype=bool)
    for p in primes_up_to(math.isqrt(hi)):
        p = int(p)
        start = max(p * p, ((lo + p - 1) // p) * p)
        mask[start - lo :: p] = False
        if lo <= p <= hi:
            mask[p - lo] = True
    return np.nonzero(mask)[0].astype(np.int64) + lo


@dataclass(frozen=True)
class LambdaTable:
    """Prime powers n = p^k in [2, limit] with (p, k) tags, sorted by n."""

    limit: int
    n: np.ndarray
    p: np.ndarray
    k: np.ndarray
    logp: np.ndarray  # log of the base, the rendered weight of each tag

    @staticmethod
    def build(limit: int) -> "LambdaTable":
        if limit < 2:
            raise ValueError("limit must be at least 2")
        primes = primes_up_to(limit)
        ns = [primes]
        ps = [primes]
        ks = [np.ones(primes.size, dtype=np.int64)]
        for p in primes[primes <= math.isqrt(limit)]:
            p = int(p)
            v = p * p
            k = 2
            while v <= limit:
                ns.append(np.array([v], dtype=np.int64))
                ps.append(np.array([p], dtype=np.int64))
                ks.append(np.array([k], dtype=np.int64))
                v *= p
                k += 1
        n = np.concatenate(ns)
        p_ = np.concatenate(ps)
        k_ = np.concatenate(ks)
        order = np.argsort(n, kind="stable")
        n, p_, k_ = n[order], p_[order], k_[order]
        return LambdaTable(int(limit), n, p_, k_, np.log(p_.astype(np.float64)))

    def cut(self, x: float) -> int:
        """Index of the first tag with n > x; requires x within table range."""
        if x > self.limit:
            raise ValueError(f"x={x} exceeds table limit {self.limit}")
        return int(np.searchsorted(self.n, math.floor(x), side="right"))

    def lambda_at(self, n: int) -> float:
        i = int(np.searchsorted(self.n, n))
        if i < self.n.size and self.n[i] == n:
            return float(self.logp[i])
        return 0.0

    def tag_at(self, n: int) -> tuple[int, int] | None:
        i = int(np.searchsorted(self.n, n))
        if i < self.n.size and self.n[i] == n:
            return int(self.p[i]), int(self.k[i])
        return None


@lru_cache(maxsize=8)
def shared_table(limit: int) -> LambdaTable:
    return LambdaTable.build(limit)


def psi(x: float, table: LambdaTable) -> float:
    """sum of log p over prime powers <= x."""
    return math.fsum(table.logp[: table.cut(x)])


def psi_progression(x: float, q: int, a: int, table: LambdaTable) -> float:
    """sum of log p over prime powers <= x in the class a mod q."""
    if q < 1:
        raise ValueError("q must be positive")
    if math.gcd(a, q) != 1:
        raise ValueError(f"a={a} must be coprime to q={q}")
    cut = table.cut(x)
    mask = table.n[:cut] % q == a % q
    return math.fsum(table.logp[:cut][mask])


def psi_character(x: float, chi: DirichletCharacter, table: LambdaTable) -> complex:
    """sum of chi(n) log p over prime powers n <= x.

    Tags are grouped by the exact angle of chi(n); each group is rendered
    with fsum and only then multiplied by its root of unity, so the float
    result is as close to the exact one as the final few operations allow.
    """
    q = chi.modulus
    cut = table.cut(x)
    ns = table.n[:cut]
    logs = table.logp[:cut]
    m = chi._group.exponent
    angle_of = np.full(q if q > 1 else 1, -1, dtype=np.int64)
    for r in range(q if q > 1 else 1):
        av = chi.angle_numerator(r)
        if av is not None:
            angle_of[r] = av
    keys = angle_of[ns % q] if q > 1 else np.zeros(ns.size, dtype=np.int64)
    total = complex(0.0, 0.0)
    for kang in np.unique(keys):
        if kang < 0:
            continue
        group = math.fsum(logs[keys == kang])
        total += group * UnitRoot.of(int(kang), m).value
    return total


def pi_count(x: float, table: LambdaTable) -> int:
    cut = table.cut(x)
    return int(np.count_nonzero(table.k[:cut] == 1))


def pi_progression(x: float, q: int, a: int, table: LambdaTable) -> int:
    if math.gcd(a, q) != 1:
        raise ValueError(f"a={a} must be coprime to q={q}")
    cut = table.cut(x)
    sel = table.k[:cut] == 1
    return int(np.count_nonzero(table.n[:cut][sel] % q == a % q))


@dataclass(frozen=True)
class SOfXResult:
    """The normalized second-moment sum over a progression, with its tail."""

    x: float
    q: int
    a: int
    cutoff: int
    head: float  # (1/x^2) sum_{n<=x, n=a(q)} n Lambda(n)^2
    tail: float  # x^2 sum_{x<n<=cutoff, n=a(q)} Lambda(n)^2 / n^3
    remainder_bound: float  # x^2 (log cutoff)^2 / (2 cutoff^2), past the cutoff

    @property
    def value(self) -> float:
        return self.head + self.tail


def s_of_x(
    x: float, q: int, a: int, table: LambdaTable | None = None, cutoff: int | None = None
) -> SOfXResult:
    if x < 2:
        raise ValueError("x must be at least 2")
    if math.gcd(a, q) != 1:
        raise ValueError(f"a={a} must be coprime to q={q}")
    if cutoff is None:
        cutoff = 8 * math.ceil(x)
    if cutoff < 8 * x:
        raise ValueError("cutoff must be at least 8x")
    if table is None:
        table = shared_table(cutoff)
    if table.limit < cutoff:
        raise ValueError(f"table limit {table.limit} is below cutoff {cutoff}")

    lo = table.cut(x)
    hi = table.cut(cutoff)
    inside = table.n[:lo] % q == a % q
    ns_in = table.n[:lo][inside].astype(np.float64)
    ls_in = table.logp[:lo][inside]
    head = math.fsum(ns_in * ls_in * ls_in) / (x * x)

    between = table.n[lo:hi] % q == a % q
    ns_out = table.n[lo:hi][between].astype(np.float64)
    ls_out = table.logp[lo:hi][between]
    tail = math.fsum(ls_out * ls_out / (ns_out * ns_out * ns_out)) * (x * x)

    bound = x * x * math.log(cutoff) ** 2 / (2 * cutoff * cutoff)
    return SOfXResult(float(x), q, a, int(cutoff), head, tail, bound)


@dataclass(frozen=True)
class BrunTitchmarshResult:
    x: float
    y: float
    q: int
    a: int
    count: int  # primes in (x, x+y] congruent to a mod q
    bound: float  # 2y / (phi(q) log(y/q))
    margin: float

    @property
    def holds(self) -> bool:
        return self.margin > 0


def brun_titchmarsh_check(x: float, y: float, q: int, a: int) -> BrunTitchmarshResult:
    """Compare the sieve bound 2y/(phi(q) log(y/q)) with an exact count."""
    if y <= q:
        raise ValueError(f"y must exceed q, got y={y}, q={q}")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if math.gcd(a, q) != 1:
        raise ValueError(f"a={a} must be coprime to q={q}")
    lo = math.floor(x) + 1
    hi = math.floor(x + y)
    window = primes_in_window(lo, hi)
    count = int(np.count_nonzero(window % q == a % q))
    bound = 2 * y / (euler_phi(q) * math.log(y / q))
    return BrunTitchmarshResult(float(x), float(y), q, a, count, bound, bound - count)
