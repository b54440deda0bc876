"""Pair correlation statistics over certified zero sets.

The central object is the character-weighted double sum over zero pairs

    sum over chi1, chi2 mod q of conj(chi1(a)) chi2(a)
        sum over |g1|,|g2| <= T of x^{i(g1-g2)} w(g1-g2),

with w(u) = 4/(4+u^2).  Since w is the Fourier transform of e^{-2|v|},
the same aggregate equals the integral over v of |S(x,T,v)|^2 e^{-2|v|},
where S(x,T,v) = sum_chi conj(chi(a)) sum_{|g|<=T} x^{ig} e^{ivg}.  The
double sum and the quadrature share nothing but the zero ordinates, so
their agreement is a genuine cross-check of both routes; the same holds
for the increment version restricted to ordinates in (U, T].

The prime-power counterpart of the zero sum (head scaled by (x/n)^{-1/2},
tail by (x/n)^{3/2}, with a certified bound past the cutoff) lives here
too, together with its mean square in t, the scaled-gap histogram against
the 1 - (sin(pi u)/(pi u))^2 density, and an exact mean-value envelope
check for finite exponential sums.

Conventions.  Pair sums default to the symmetric window |g| <= T; the
classical single-character statistic uses 0 < g <= T.  Both are available
through the window flag, and the reference ratios scale accordingly: the
symmetric window carries twice the zeros, so its in-range target is
phi(q) T log(x) / pi, against T log(x) / (2 pi) for the positive window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from zeropair.characters import (
    CharacterLabel,
    DirichletCharacter,
    enumerate_characters,
    euler_phi,
)
from zeropair.sieve import LambdaTable, SOfXResult, s_of_x, shared_table
from zeropair.zeros import ZeroSet

__all__ = [
    "CertificationError",
    "QuadratureError",
    "weight",
    "gue_density",
    "PairCorrInput",
    "GPairResult",
    "PairCorrResult",
    "QuadSpec",
    "IntegralCheckResult",
    "IncrementCheckResult",
    "R1Result",
    "R1MeanSquareResult",
    "SpacingHistogram",
    "MeanValueResult",
    "g_pair",
    "f_q",
    "f_zeta_ratio",
    "sigma_sum",
    "f_q_via_integral",
    "increment_identity_check",
    "r1",
    "r1_batch",
    "r1_mean_square",
    "spacing_histogram",
    "mean_value_check",
]

_WINDOWS = ("both", "positive")

# Sum of Lambda(n)/n^{3/2} over n > C is at most 3.12/sqrt(C): partial
# summation against psi(u) <= 1.04 u drops the boundary term and leaves
# (3/2) * 1.04 * 2 / sqrt(C).
_TAIL_CONSTANT = 3.12


class CertificationError(ValueError):
    """An operation required certified zero sets and did not get them."""


class QuadratureError(RuntimeError):
    """Numerical integration could not meet its error budget."""


def weight(u: float) -> float:
    """The pair weight 4/(4+u^2), in (0, 1]."""
    return 4.0 / (4.0 + u * u)


def gue_density(u):
    """1 - (sin(pi u)/(pi u))^2, the conjectured scaled-gap density."""
    s = np.sinc(u)
    return 1.0 - s * s


def _check_window(window: str) -> None:
    if window not in _WINDOWS:
        raise ValueError(f"window must be one of {_WINDOWS}, got {window!r}")


def _require_certified(zs: ZeroSet, T: float) -> None:
    if not zs.certified:
        raise CertificationError(f"zero set {zs.label} is not certified")
    if zs.height + 1e-12 < T:
        raise CertificationError(
            f"zero set {zs.label} reaches only T={zs.height:g}, need T={T:g}"
        )


def _window_ordinates(
    zs: ZeroSet, T: float, window: str, above: float = 0.0
) -> np.ndarray:
    """Ordinates in the window, optionally restricted to |g| > above."""
    o = zs.ordinates
    if window == "both":
        o = o[np.abs(o) <= T]
    else:
        o = o[(o > 0.0) & (o <= T)]
    if above > 0.0:
        o = o[np.abs(o) > above]
    return o


def _set_for(
    zero_sets: Mapping[CharacterLabel, ZeroSet], label: CharacterLabel
) -> ZeroSet:
    try:
        return zero_sets[label]
    except KeyError:
        raise KeyError(f"no zero set supplied for character {label}") from None


def _character_weights(q: int, a: int) -> list[tuple[DirichletCharacter, complex]]:
    """(chi, conj(chi(a))) for every character mod q."""
    if q < 1:
        raise ValueError("modulus must be positive")
    if math.gcd(a, q) != 1:
        raise ValueError(f"a={a} must be coprime to q={q}")
    return [(chi, chi(a).conjugate()) for chi in enumerate_characters(q)]


def _ordered_pair_sum(o1: np.ndarray, o2: np.ndarray, x: float) -> complex:
    """Double sum of x^{i(g1-g2)} w(g1-g2), near-diagonal terms first.

    The x^{i(g1-g2)} factors oscillate and mostly cancel; the weight makes
    small-gap pairs carry the mass, so they are accumulated first.
    """
    if o1.size == 0 or o2.size == 0:
        return complex(0.0)
    d = np.subtract.outer(o1, o2).ravel()
    d = d[np.argsort(np.abs(d), kind="stable")]
    terms = np.exp(1j * math.log(x) * d) * (4.0 / (4.0 + d * d))
    return complex(terms.sum())


@dataclass(frozen=True)
class PairCorrInput:
    """A pair-correlation instance: progression (q, a), scale x, height T.

    zero_sets maps every character label mod q to a certified zero set of
    height at least T (imprimitive labels point at their inducer's set).
    """

    q: int
    a: int
    x: float
    T: float
    zero_sets: Mapping[CharacterLabel, ZeroSet] = field(repr=False)

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("modulus must be positive")
        if math.gcd(self.a, self.q) != 1:
            raise ValueError(f"a={self.a} must be coprime to q={self.q}")
        if self.x < 2:
            raise ValueError("x must be at least 2")
        if self.T <= 0:
            raise ValueError("T must be positive")
        for chi in enumerate_characters(self.q):
            _require_certified(_set_for(self.zero_sets, chi.label), self.T)


@dataclass(frozen=True)
class GPairResult:
    value: complex
    term_count: int


@dataclass(frozen=True)
class PairCorrResult:
    """Aggregate pair correlation with its reference ratios.

    thm_ratio normalizes the real part by the in-range expectation
    (phi(q) T log(x) / pi for the symmetric window, half that denominator's
    target for the positive window); None when log x = 0.  trivial_ratio
    divides |Re| by T (phi(q) log(qT))^2, the crude a-priori ceiling.
    """

    q: int
    a: int
    x: float
    T: float
    window: str
    value: complex
    term_count: int
    thm_ratio: float | None
    trivial_ratio: float

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def in_classical_range(self) -> bool:
        return 1.0 <= self.x <= self.T


def g_pair(
    chi1: DirichletCharacter,
    chi2: DirichletCharacter,
    x: float,
    T: float,
    zero_sets: Mapping[CharacterLabel, ZeroSet],
    window: str = "both",
) -> GPairResult:
    """Unweighted double sum over the two characters' windowed zeros."""
    if x <= 0:
        raise ValueError("x must be positive")
    if T <= 0:
        raise ValueError("T must be positive")
    _check_window(window)
    zs1 = _set_for(zero_sets, chi1.label)
    zs2 = _set_for(zero_sets, chi2.label)
    _require_certified(zs1, T)
    _require_certified(zs2, T)
    o1 = _window_ordinates(zs1, T, window)
    o2 = _window_ordinates(zs2, T, window)
    return GPairResult(_ordered_pair_sum(o1, o2, x), o1.size * o2.size)


def _f_q_value(
    q: int,
    a: int,
    x: float,
    T: float,
    zero_sets: Mapping[CharacterLabel, ZeroSet],
    window: str,
    above: float = 0.0,
) -> tuple[complex, int]:
    """Character-weighted pair sum; with above > 0 only ordinates in
    (above, T] enter (the increment window)."""
    pairs = _character_weights(q, a)
    ords = []
    for chi, _ in pairs:
        zs = _set_for(zero_sets, chi.label)
        _require_certified(zs, T)
        ords.append(_window_ordinates(zs, T, window, above))
    total = complex(0.0)
    terms = 0
    for (chi1, w1), o1 in zip(pairs, ords):
        for (chi2, w2), o2 in zip(pairs, ords):
            # conj(chi1(a)) chi2(a) = w1 * conj(w2)
            total += w1 * w2.conjugate() * _ordered_pair_sum(o1, o2, x)
            terms += o1.size * o2.size
    return total, terms


def _ratios(
    q: int, x: float, T: float, window: str, value: complex
) -> tuple[float | None, float]:
    phi = euler_phi(q)
    lx = math.log(x)
    # positive window carries half the zeros, so the in-range target halves
    normalizer = math.pi if window == "both" else 2.0 * math.pi
    thm = normalizer * value.real / (phi * T * lx) if lx != 0.0 else None
    denom = T * (phi * math.log(q * T)) ** 2
    return thm, abs(value.real) / denom


def f_q(inp: PairCorrInput, window: str = "both") -> PairCorrResult:
    """Aggregate pair correlation for the progression a mod q."""
    _check_window(window)
    value, terms = _f_q_value(inp.q, inp.a, inp.x, inp.T, inp.zero_sets, window)
    thm, trivial = _ratios(inp.q, inp.x, inp.T, window, value)
    return PairCorrResult(
        q=inp.q, a=inp.a, x=inp.x, T=inp.T, window=window,
        value=value, term_count=terms, thm_ratio=thm, trivial_ratio=trivial,
    )


def f_zeta_ratio(
    x: float, T: float, zeta_set: ZeroSet, window: str = "positive"
) -> PairCorrResult:
    """Modulus-one pair sum with its ratio to the in-range target.

    Defaults to the positive-ordinate window, where the proven in-range
    behaviour is T log(x) / (2 pi); thm_ratio tends to 1 for 1 <= x <= T
    (slowly; desk-scale T gives weak statistics).  At x = 1 the raw value
    is returned with the ratio undefined.  Values of x outside [1, T] are
    still computed; in_classical_range flags them as extrapolation.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    if T <= 0:
        raise ValueError("T must be positive")
    _check_window(window)
    label = CharacterLabel(1, 1)
    if zeta_set.label != label:
        raise ValueError(f"expected the modulus-one zero set, got {zeta_set.label}")
    sets = {label: zeta_set}
    value, terms = _f_q_value(1, 1, x, T, sets, window)
    thm, trivial = _ratios(1, x, T, window, value)
    return PairCorrResult(
        q=1, a=1, x=x, T=T, window=window,
        value=value, term_count=terms, thm_ratio=thm, trivial_ratio=trivial,
    )


def _flatten(
    q: int,
    a: int,
    T: float,
    zero_sets: Mapping[CharacterLabel, ZeroSet],
    window: str,
    above: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-zero weights conj(chi(a)) and ordinates, concatenated."""
    ws, gs = [], []
    for chi, w in _character_weights(q, a):
        zs = _set_for(zero_sets, chi.label)
        _require_certified(zs, T)
        o = _window_ordinates(zs, T, window, above)
        ws.append(np.full(o.size, w, dtype=np.complex128))
        gs.append(o)
    return np.concatenate(ws), np.concatenate(gs)


def _sigma_factory(
    weights: np.ndarray, gammas: np.ndarray, x: float
) -> Callable[[np.ndarray], np.ndarray]:
    """Batched v -> sum_j weights_j x^{i g_j} e^{i v g_j}."""
    wx = weights * np.exp(1j * math.log(x) * gammas)

    def sigma(vs: np.ndarray) -> np.ndarray:
        out = np.empty(vs.shape, dtype=np.complex128)
        step = max(1, (1 << 22) // max(1, gammas.size))
        for i in range(0, vs.size, step):
            block = vs[i : i + step]
            out[i : i + step] = np.exp(1j * np.outer(block, gammas)) @ wx
        return out

    return sigma


def sigma_sum(
    x: float,
    T: float,
    v: float,
    q: int,
    a: int,
    zero_sets: Mapping[CharacterLabel, ZeroSet],
    window: str = "both",
) -> complex:
    """sum_chi conj(chi(a)) sum_{windowed} x^{ig} e^{ivg}."""
    if x <= 0:
        raise ValueError("x must be positive")
    if T <= 0:
        raise ValueError("T must be positive")
    _check_window(window)
    weights, gammas = _flatten(q, a, T, zero_sets, window)
    sigma = _sigma_factory(weights, gammas, x)
    return complex(sigma(np.array([float(v)]))[0])


@dataclass(frozen=True)
class QuadSpec:
    """Controls for the e^{-2|v|} quadrature.

    v_max None picks the truncation from the a-priori tail bound
    (zero count)^2 e^{-2V} <= budget_factor * |target|; an explicit v_max
    that misses that budget is an error, not a silent degradation.
    """

    v_max: float | None = None
    rel_tol: float = 1e-6
    budget_factor: float = 1e-8
    initial_spacing: float | None = None
    max_refinements: int = 12

    def __post_init__(self):
        if self.v_max is not None and self.v_max <= 0:
            raise ValueError("v_max must be positive")
        if not 0 < self.rel_tol < 1:
            raise ValueError("rel_tol must lie in (0, 1)")
        if not 0 < self.budget_factor < 1:
            raise ValueError("budget_factor must lie in (0, 1)")
        if self.initial_spacing is not None and self.initial_spacing <= 0:
            raise ValueError("initial_spacing must be positive")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be at least 1")


def _simpson(ys: np.ndarray, h: float) -> float:
    return (h / 3.0) * float(
        ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-1:2].sum()
    )


def _refine_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    n0: int,
    rel_tol: float,
    abs_floor: float,
    max_refinements: int,
) -> tuple[float, int, int]:
    """Composite Simpson with interval doubling, reusing prior nodes.

    Returns (value, nodes evaluated, refinements used)."""
    n = max(2, n0 + (n0 % 2))
    xs = np.linspace(lo, hi, n + 1)
    ys = f(xs)
    nodes = xs.size
    prev = _simpson(ys, (hi - lo) / n)
    for r in range(1, max_refinements + 1):
        mids = 0.5 * (xs[:-1] + xs[1:])
        mys = f(mids)
        nodes += mids.size
        xs2 = np.empty(2 * n + 1)
        ys2 = np.empty(2 * n + 1)
        xs2[0::2], xs2[1::2] = xs, mids
        ys2[0::2], ys2[1::2] = ys, mys
        n, xs, ys = 2 * n, xs2, ys2
        cur = _simpson(ys, (hi - lo) / n)
        if abs(cur - prev) <= max(rel_tol * abs(cur), abs_floor):
            return cur, nodes, r
        prev = cur
    raise QuadratureError(
        f"Simpson refinement stalled on [{lo:g}, {hi:g}]: "
        f"last correction {abs(cur - prev):.3e} above floor {abs_floor:.3e}"
    )


def _integrate_weighted_square(
    sig: Callable[[np.ndarray], np.ndarray],
    count: int,
    x: float,
    T: float,
    target: float,
    quad: QuadSpec,
) -> tuple[float, float, float, int, int]:
    """Integral of |sig(v)|^2 e^{-2|v|} over the real line, truncated.

    Returns (value, v_max, truncation bound, nodes, refinements)."""
    budget = quad.budget_factor * max(abs(target), 1.0)
    if count == 0:
        return 0.0, 0.0, 0.0, 0, 0
    if quad.v_max is None:
        # +0.5 keeps the realized bound a factor e below the budget
        v_max = max(2.0, 0.5 * math.log(count * count / budget) + 0.5)
    else:
        v_max = quad.v_max
    bound = count * count * math.exp(-2.0 * v_max)
    if bound > budget:
        raise QuadratureError(
            f"truncation bound {bound:.3e} at V={v_max:g} exceeds budget "
            f"{budget:.3e}; enlarge v_max"
        )

    def integrand(vs: np.ndarray) -> np.ndarray:
        s = sig(vs)
        return (s.real * s.real + s.imag * s.imag) * np.exp(-2.0 * np.abs(vs))

    if quad.initial_spacing is not None:
        h0 = quad.initial_spacing
    else:
        # integrand oscillates at gap frequencies up to 2T
        h0 = min(0.2 / math.log(max(x * T, 3.0)), math.pi / (4.0 * T), v_max / 8.0)
    n0 = math.ceil(v_max / h0)
    total = 0.0
    nodes = 0
    refinements = 0
    for lo, hi in ((-v_max, 0.0), (0.0, v_max)):
        val, used, refs = _refine_simpson(
            integrand, lo, hi, n0, quad.rel_tol, budget / 2.0, quad.max_refinements
        )
        total += val
        nodes += used
        refinements = max(refinements, refs)
    return total, v_max, bound, nodes, refinements


@dataclass(frozen=True)
class IntegralCheckResult:
    """Quadrature route vs the direct double sum for the same aggregate."""

    direct: PairCorrResult
    integral: float
    v_max: float
    truncation_bound: float
    node_count: int
    refinements: int

    @property
    def abs_residual(self) -> float:
        return abs(self.integral - self.direct.real)

    @property
    def rel_residual(self) -> float:
        return self.abs_residual / max(abs(self.direct.real), 1e-12)


def f_q_via_integral(
    inp: PairCorrInput, quad: QuadSpec | None = None, window: str = "both"
) -> IntegralCheckResult:
    """Evaluate the aggregate through the e^{-2|v|} integral and compare."""
    if quad is None:
        quad = QuadSpec()
    _check_window(window)
    direct = f_q(inp, window)
    weights, gammas = _flatten(inp.q, inp.a, inp.T, inp.zero_sets, window)
    sig = _sigma_factory(weights, gammas, inp.x)
    integral, v_max, bound, nodes, refs = _integrate_weighted_square(
        sig, gammas.size, inp.x, inp.T, direct.real, quad
    )
    return IntegralCheckResult(direct, integral, v_max, bound, nodes, refs)


@dataclass(frozen=True)
class IncrementCheckResult:
    """Both routes of the increment identity, plus the unrestricted
    difference of aggregates for reference.

    lhs integrates |S(x,T,v) - S(x,U,v)|^2 e^{-2|v|}; rhs is the direct
    pair sum over ordinates in (U, T].  These agree identically.  The
    plain difference f_q(T) - f_q(U) also includes cross pairs (one
    ordinate below U, one above), so it is reported separately rather
    than compared at tolerance.
    """

    q: int
    a: int
    x: float
    U: float
    T: float
    window: str
    lhs: float
    rhs: complex
    unrestricted_difference: complex
    term_count: int
    v_max: float
    truncation_bound: float
    node_count: int
    refinements: int

    @property
    def abs_residual(self) -> float:
        return abs(self.lhs - self.rhs.real)

    @property
    def rel_residual(self) -> float:
        return self.abs_residual / max(abs(self.rhs.real), 1e-12)

    @property
    def cross_term(self) -> complex:
        return self.unrestricted_difference - self.rhs


def increment_identity_check(
    x: float,
    T: float,
    U: float,
    q: int,
    a: int,
    zero_sets: Mapping[CharacterLabel, ZeroSet],
    quad: QuadSpec | None = None,
    window: str = "both",
) -> IncrementCheckResult:
    """Check the increment identity between heights U < T."""
    if quad is None:
        quad = QuadSpec()
    _check_window(window)
    if x <= 0:
        raise ValueError("x must be positive")
    if not 0 <= U <= T:
        raise ValueError(f"need 0 <= U <= T, got U={U}, T={T}")

    rhs, terms = _f_q_value(q, a, x, T, zero_sets, window, above=U)
    full_t, _ = _f_q_value(q, a, x, T, zero_sets, window)
    full_u = complex(0.0)
    if U > 0:
        full_u, _ = _f_q_value(q, a, x, U, zero_sets, window)

    weights, gammas = _flatten(q, a, T, zero_sets, window)
    below = np.abs(gammas) <= U
    # difference of the two truncations, literally; only increment
    # ordinates survive, which the direct rhs enumerates independently
    sig_t = _sigma_factory(weights, gammas, x)
    sig_u = _sigma_factory(weights[below], gammas[below], x)
    inc_count = int(gammas.size - np.count_nonzero(below))

    def g_fn(vs: np.ndarray) -> np.ndarray:
        return sig_t(vs) - sig_u(vs)

    lhs, v_max, bound, nodes, refs = _integrate_weighted_square(
        g_fn, inc_count, x, T, rhs.real, quad
    )
    return IncrementCheckResult(
        q=q, a=a, x=x, U=U, T=T, window=window,
        lhs=lhs, rhs=rhs, unrestricted_difference=full_t - full_u,
        term_count=terms, v_max=v_max, truncation_bound=bound,
        node_count=nodes, refinements=refs,
    )


@dataclass(frozen=True)
class R1Result:
    """Prime-side sum at a single t, with its certified tail bound."""

    x: float
    t: float
    q: int
    a: int
    cutoff: int
    value: complex
    tail_bound: float
    term_count: int


def _r1_terms(
    x: float, q: int, a: int, table: LambdaTable | None, cutoff: int | None
) -> tuple[np.ndarray, np.ndarray, LambdaTable, int]:
    """Coefficients and log-frequencies of the prime-side sum."""
    if x < 2:
        raise ValueError("x must be at least 2")
    if math.gcd(a, q) != 1:
        raise ValueError(f"a={a} must be coprime to q={q}")
    if cutoff is None:
        cutoff = max(100_000, 8 * math.ceil(x)) if table is None else table.limit
    if cutoff < 8 * x:
        raise ValueError(f"cutoff {cutoff} is below 8x = {8 * x:g}")
    if table is None:
        table = shared_table(int(cutoff))
    if table.limit < cutoff:
        raise ValueError(f"table limit {table.limit} is below cutoff {cutoff}")
    hi = table.cut(cutoff)
    sel = table.n[:hi] % q == a % q
    ns = table.n[:hi][sel].astype(np.float64)
    lp = table.logp[:hi][sel]
    coeff = np.where(ns <= x, lp * np.sqrt(ns / x), lp * (x / ns) ** 1.5)
    freqs = math.log(x) - np.log(ns)
    return coeff, freqs, table, int(cutoff)


def r1_batch(
    x: float,
    ts: np.ndarray,
    q: int,
    a: int,
    table: LambdaTable | None = None,
    cutoff: int | None = None,
) -> tuple[np.ndarray, float, int, int]:
    """R1 at every t in ts; returns (values, tail bound, cutoff, terms)."""
    coeff, freqs, table, cutoff = _r1_terms(x, q, a, table, cutoff)
    ts = np.asarray(ts, dtype=np.float64)
    phi = euler_phi(q)
    scale = -phi / math.sqrt(x)
    cc = coeff.astype(np.complex128)
    out = np.empty(ts.shape, dtype=np.complex128)
    step = max(1, (1 << 22) // max(1, freqs.size))
    for i in range(0, ts.size, step):
        block = ts[i : i + step]
        out[i : i + step] = np.exp(1j * np.outer(block, freqs)) @ cc
    tail = _TAIL_CONSTANT * phi * x / math.sqrt(cutoff)
    return scale * out, tail, cutoff, coeff.size


def r1(
    x: float,
    t: float,
    q: int,
    a: int,
    table: LambdaTable | None = None,
    cutoff: int | None = None,
) -> R1Result:
    """Prime-side expansion at one t: head terms scaled by (x/n)^{-1/2+it},
    tail terms up to the cutoff by (x/n)^{3/2+it}, times -phi(q)/sqrt(x)."""
    values, tail, cut, terms = r1_batch(x, np.array([float(t)]), q, a, table, cutoff)
    return R1Result(
        x=float(x), t=float(t), q=q, a=a, cutoff=cut,
        value=complex(values[0]), tail_bound=tail, term_count=terms,
    )


@dataclass(frozen=True)
class R1MeanSquareResult:
    """Quadrature of |R1|^2 over [-T, T] against its reference size."""

    x: float
    T: float
    q: int
    a: int
    integral: float
    main_term: float  # 2 T S(x) phi(q)^2
    ratio: float
    spacing: float
    node_count: int
    cutoff: int
    tail_bound: float
    in_regime: bool  # T >= x / phi(q)
    s_result: SOfXResult


def r1_mean_square(
    x: float,
    T: float,
    q: int,
    a: int,
    spacing: float | None = None,
    table: LambdaTable | None = None,
    cutoff: int | None = None,
) -> R1MeanSquareResult:
    """Composite-Simpson mean square of the prime-side sum."""
    if T <= 0:
        raise ValueError("T must be positive")
    max_spacing = 0.25 / math.log(x) if x > 1 else 0.25
    if spacing is None:
        spacing = max_spacing
    if spacing > max_spacing * (1 + 1e-12):
        raise ValueError(
            f"node spacing {spacing:g} too coarse for x={x:g}; "
            f"need at most {max_spacing:g}"
        )
    intervals = 2 * max(1, math.ceil(T / spacing))
    ts = np.linspace(-T, T, intervals + 1)
    values, tail, cut, _ = r1_batch(x, ts, q, a, table, cutoff)
    sq = values.real * values.real + values.imag * values.imag
    integral = _simpson(sq, 2.0 * T / intervals)
    s_res = s_of_x(x, q, a, table=table, cutoff=cut)
    phi = euler_phi(q)
    main = 2.0 * T * s_res.value * phi * phi
    return R1MeanSquareResult(
        x=float(x), T=float(T), q=q, a=a,
        integral=integral, main_term=main, ratio=integral / main,
        spacing=2.0 * T / intervals, node_count=ts.size, cutoff=cut,
        tail_bound=tail, in_regime=T >= x / phi, s_result=s_res,
    )


@dataclass(frozen=True)
class SpacingHistogram:
    """Ordered-pair scaled-gap counts with the conjectured overlay.

    Gaps are scaled by log(T)/(2 pi); the per-bin expected column is
    binwidth * density(midpoint) * (T/(2 pi)) log T and carries no
    diagonal mass.  The diagonal (gap exactly 0, one pair per zero) is a
    whole-window constant, exposed separately: delta_term is the overlay
    normalization when 0 lies in [alpha, beta], and diagonal_count the
    exact number of such pairs.
    """

    label: CharacterLabel
    T: float
    alpha: float
    beta: float
    bin_edges: np.ndarray
    counts: np.ndarray
    expected: np.ndarray
    normalization: float
    includes_diagonal: bool
    delta_term: float
    diagonal_count: int
    window_count: int

    @property
    def pair_count(self) -> int:
        return int(self.counts.sum())


def spacing_histogram(
    zs: ZeroSet, T: float, alpha: float, beta: float, bins: int
) -> SpacingHistogram:
    """Histogram of scaled gaps over ordered pairs of positive ordinates."""
    if not alpha < beta:
        raise ValueError("need alpha < beta")
    if bins < 1:
        raise ValueError("need at least one bin")
    if T <= 1:
        raise ValueError("T must exceed 1 for the log T scaling")
    _require_certified(zs, T)
    o = _window_ordinates(zs, T, "positive")
    scale = math.log(T) / (2.0 * math.pi)
    gaps = np.subtract.outer(o, o).ravel() * scale
    edges = np.linspace(alpha, beta, bins + 1)
    counts, _ = np.histogram(gaps, edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    norm = (T / (2.0 * math.pi)) * math.log(T)
    expected = np.diff(edges) * gue_density(mids) * norm
    includes = alpha <= 0.0 <= beta
    return SpacingHistogram(
        label=zs.label, T=float(T), alpha=float(alpha), beta=float(beta),
        bin_edges=edges, counts=counts, expected=expected, normalization=norm,
        includes_diagonal=includes, delta_term=norm if includes else 0.0,
        diagonal_count=o.size, window_count=o.size,
    )


@dataclass(frozen=True)
class MeanValueResult:
    """Exact mean value of a finite exponential sum vs its envelope.

    exact_integral is the closed form sum over frequency pairs of
    c(mu) c(nu) K(mu - nu) with K(d) = integral over [-T, T] of
    e^{2 pi i d t} dt, so K(0) = 2T and K(d) = sin(2 pi d T)/(pi d).
    The envelope is (1/delta) sum c^2 + T * (close-pair coefficient mass);
    constant records |exact - main| relative to it.
    """

    T: float
    delta: float
    term_count: int
    exact_integral: float
    main_term: float
    off_diagonal_bound: float
    envelope: float
    constant: float
    close_pair_count: int


def mean_value_check(
    frequencies: Sequence[tuple[float, float]], T: float, delta: float
) -> MeanValueResult:
    """Exact closed-form mean value against the delta-separation envelope."""
    if T <= 0:
        raise ValueError("T must be positive")
    if not 1.0 / (2.0 * T) <= delta <= 0.5:
        raise ValueError(
            f"delta={delta:g} outside [1/(2T), 1/2] = "
            f"[{1.0 / (2.0 * T):g}, 0.5]"
        )
    if not frequencies:
        raise ValueError("frequency list must be nonempty")
    mu = np.array([m for m, _ in frequencies], dtype=np.float64)
    c = np.array([cv for _, cv in frequencies], dtype=np.float64)
    d = np.subtract.outer(mu, mu)
    kernel = 2.0 * T * np.sinc(2.0 * T * d)
    exact = float(c @ kernel @ c)
    main = 2.0 * T * float(c @ c)
    absd = np.abs(d)
    close = (absd > 0.0) & (absd < delta)
    cc = np.abs(np.outer(c, c))
    off_bound = T * float(cc[close].sum())
    envelope = float(c @ c) / delta + off_bound
    return MeanValueResult(
        T=float(T), delta=float(delta), term_count=mu.size,
        exact_integral=exact, main_term=main, off_diagonal_bound=off_bound,
        envelope=envelope, constant=abs(exact - main) / envelope,
        close_pair_count=int(np.count_nonzero(close)),
    )
