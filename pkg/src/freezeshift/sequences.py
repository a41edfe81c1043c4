"""Decay sequences (a_j) driving the freezing potentials, plus the
summability classifier that separates candidate freezing behaviour from the
no-go regime.

Builders return a ``FreezingSequence``: positive, non-increasing, with a
closed-form tail.  Where a raw formula is locally non-monotone (small j), the
value is replaced by the running maximum of its tail; this only enlarges
entries, so every lower-bound hypothesis the formula came from still holds.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .complexity import ComplexityTable, KappaSequence, count_blocks, count_method, log_big
from .errors import InputError
from .subshift import Substitution

# asymptotic class tags
LOGLOG_OVER_JD = "O(loglog j/j^d)"
LOG_OVER_JD = "O(log j/j^d)"
LOG2_OVER_J = "O(log^2 j/j)"
C_OVER_J = "c/j"
POWER = "1/j^(1+eps)"
CUSTOM = "custom"

_DIVERGENT_TAGS = (LOGLOG_OVER_JD, LOG_OVER_JD, LOG2_OVER_J, C_OVER_J)


@dataclass(frozen=True)
class AsymptoticClass:
    tag: str
    epsilon: float | None = None  # only for the power tag: a_j ~ 1/j^(1+eps)

    def __post_init__(self):
        if self.tag == POWER and (self.epsilon is None or self.epsilon <= 0):
            raise InputError("power tag requires epsilon > 0")


class FreezingSequence:
    """Positive non-increasing sequence j -> a_j with closed-form tail.

    ``scalar(j)`` and ``vector(js)`` must agree; values beyond the tabulated
    depth carry the ``extrapolated`` flag in CSV output.
    """

    def __init__(self, *, name, dimension, scalar, vector, asymptotic,
                 recipe=None, extrapolated_from=None, repaired=False,
                 tail_limit=0.0):
        self.name = name
        self.dimension = dimension
        self._scalar = scalar
        self._vector = vector
        self.asymptotic = asymptotic
        self.recipe = dict(recipe or {})
        self.extrapolated_from = extrapolated_from
        self.repaired = repaired
        self.tail_limit = tail_limit
        self._spot_check()

    def _spot_check(self):
        js = list(range(0, 130)) + [2 ** k for k in range(8, 21)]
        vals = [self.value(j) for j in js]
        if any(v <= 0 for v in vals):
            raise InputError(f"sequence {self.name} has a non-positive entry")
        for (j1, v1), (j2, v2) in zip(zip(js, vals), zip(js[1:], vals[1:])):
            if v2 > v1 + 1e-12:
                raise InputError(
                    f"sequence {self.name} increases between j={j1} and j={j2}")

    def value(self, j: int) -> float:
        if j < 0:
            raise InputError("sequence index must be >= 0")
        return float(self._scalar(int(j)))

    def values(self, j_max: int) -> np.ndarray:
        """Array of a_0 .. a_{j_max}."""
        js = np.arange(j_max + 1)
        return np.asarray(self._vector(js), dtype=float)

    def is_extrapolated(self, j: int) -> bool:
        return self.extrapolated_from is not None and j > self.extrapolated_from

    def to_csv(self, path, j_max):
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["j", "a_j", "range_i", "extrapolated"])
            vals = self.values(j_max)
            for j in range(j_max + 1):
                i = dyadic_range(j)
                w.writerow([j, f"{vals[j]:.12g}",
                            "" if i is None else i,
                            int(self.is_extrapolated(j))])

    def metadata(self):
        meta = {"name": self.name, "dimension": self.dimension,
                "asymptotic_class": self.asymptotic.tag,
                "repaired": self.repaired,
                "tail_limit": self.tail_limit}
        if self.asymptotic.epsilon is not None:
            meta["epsilon"] = self.asymptotic.epsilon
        if self.extrapolated_from is not None:
            meta["extrapolated_beyond_j"] = self.extrapolated_from
        meta.update(self.recipe)
        return meta


def dyadic_range(j):
    """i with 2^i < j <= 2^{i+1}, or None for j <= 1."""
    if j <= 1:
        return None
    return (j - 1).bit_length() - 1


def _log_plus(i):
    return math.log(i) if i >= 1 else 0.0


# ---------------------------------------------------------------------------
# Builders


def build_thm34_sequence(table: ComplexityTable, h_ref: float, i_max: int,
                         conditional: bool | None = None) -> FreezingSequence:
    """Range-wise sequence from the per-scale entropy gaps.

    On the dyadic range 2^i < j <= 2^{i+1} the value is
    kappa_i + (2 log+ i + 3) / 2^(i d); a_0 = a_1 take the i=0 range value.
    Ranges past i_max reuse kappa_{i_max} and are flagged extrapolated.
    """
    if i_max < 0:
        raise InputError("i_max must be >= 0")
    spec = table.spec
    d = spec.dimension
    kappa = []
    for i in range(i_max + 1):
        n = 2 ** i
        if n not in table:
            table.add(n, count_blocks(spec, n), count_method(spec))
        k = log_big(table[n]) / (2 ** (i * d)) - h_ref
        if k < -1e-12:
            raise InputError(f"h_ref exceeds the scale-{n} entropy upper bound")
        kappa.append(max(k, 0.0))

    def raw(i):
        ki = kappa[min(i, i_max)]
        return ki + (2 * _log_plus(i) + 3) / 2 ** (i * d)

    # repair: running maximum of the tail restores monotonicity when the
    # kappa estimates are not themselves non-increasing
    horizon = i_max + 2
    w = [raw(i) for i in range(horizon + 1)]
    repaired = False
    for i in range(horizon - 1, -1, -1):
        if w[i] < w[i + 1]:
            w[i] = w[i + 1]
            repaired = True

    def scalar(j):
        if j <= 1:
            return w[0]
        i = dyadic_range(j)
        return w[i] if i <= horizon else raw(i)

    def vector(js):
        js = np.asarray(js)
        out = np.empty(js.shape, dtype=float)
        small = js <= 1
        out[small] = w[0]
        big = ~small
        if big.any():
            ii = np.ceil(np.log2(js[big])).astype(int) - 1
            ii = np.maximum(ii, 0)
            table_vals = np.array(w, dtype=float)
            inside = ii <= horizon
            res = np.empty(ii.shape, dtype=float)
            res[inside] = table_vals[ii[inside]]
            if (~inside).any():
                io = ii[~inside].astype(float)
                res[~inside] = kappa[i_max] + (2 * np.log(np.maximum(io, 1.0)) + 3) / 2 ** (io * d)
            out[big] = res
        return out

    tag = LOG_OVER_JD if isinstance(spec.kind, Substitution) else LOGLOG_OVER_JD
    if conditional is None:
        conditional = False
    return FreezingSequence(
        name="thm34", dimension=d, scalar=scalar, vector=vector,
        asymptotic=AsymptoticClass(tag),
        recipe={"h_ref": h_ref, "i_max": i_max, "conditional": conditional,
                "kappa": list(kappa)},
        extrapolated_from=2 ** (i_max + 1), repaired=repaired,
        tail_limit=kappa[i_max])


def build_thm51_sequence(c: float, dimension: int = 1) -> FreezingSequence:
    """a_j = 2(c+2)/j for j >= 1 (one-sided SFT recipe); a_0 = a_1."""
    if c <= 0:
        raise InputError("defect constant c must be > 0")
    A = 2.0 * (c + 2.0)

    def scalar(j):
        return A / max(j, 1)

    def vector(js):
        js = np.asarray(js, dtype=float)
        return A / np.maximum(js, 1.0)

    return FreezingSequence(
        name="thm51", dimension=dimension, scalar=scalar, vector=vector,
        asymptotic=AsymptoticClass(C_OVER_J),
        recipe={"c": c, "coefficient": A}, tail_limit=0.0)


def build_thm52_sequence(kappa: KappaSequence, j_max: int) -> FreezingSequence:
    """One-sided super-pin recipe: at multiples of three,
    a_{3j} = (2 log j)/j + (1/j) sum_{i<=log2 j} 2^i kappa_i + 1/j,
    other indices take the value at the next defined index.  Ranges past the
    available kappa depth reuse the last gap and are flagged extrapolated.
    """
    if j_max < 1:
        raise InputError("j_max must be >= 1")
    depth = len(kappa) - 1
    if depth < int(math.log2(j_max)):
        raise InputError("kappa sequence too shallow for j_max")

    kap = np.asarray(kappa.kappa, dtype=float)
    pow2 = 2.0 ** np.arange(depth + 1)
    prefix = np.cumsum(pow2 * kap)  # sum_{i=0..I} 2^i kappa_i

    def rhs(j):
        # right-hand side at index 3j
        I = int(math.floor(math.log2(j))) if j >= 1 else 0
        Ieff = min(I, depth)
        s = prefix[Ieff]
        if I > depth:  # extrapolate remaining scales with the last gap
            s += kap[depth] * (2.0 ** (I + 1) - 2.0 ** (depth + 1))
        return (2.0 * math.log(j)) / j + s / j + 1.0 / j

    j_top = j_max + 1
    raw = [rhs(j) for j in range(1, j_top + 1)]
    # monotone repair: a_{3j} is the sup of the tail of the raw formula
    rep = list(raw)
    for i in range(len(rep) - 2, -1, -1):
        rep[i] = max(rep[i], rep[i + 1])
    repaired = any(a != b for a, b in zip(raw, rep))

    def scalar(m):
        j = max(-(-m // 3), 1)  # next multiple of three at or after m
        j = min(j, j_top)
        return rep[j - 1]

    def vector(ms):
        ms = np.asarray(ms)
        j = np.maximum((ms + 2) // 3, 1)
        j = np.minimum(j, j_top)
        return np.array(rep, dtype=float)[j - 1]

    return FreezingSequence(
        name="thm52", dimension=1, scalar=scalar, vector=vector,
        asymptotic=AsymptoticClass(CUSTOM),
        recipe={"j_max": j_max, "kappa_depth": depth},
        extrapolated_from=3 * j_max, repaired=repaired,
        tail_limit=rep[-1])


def build_cor53_sequence() -> FreezingSequence:
    """a_j = log^2(j)/j once that formula is decreasing (j >= 7 on integers),
    held at the peak value before that so the sequence is non-increasing."""
    peak_j = 7
    peak = math.log(peak_j) ** 2 / peak_j

    def scalar(j):
        if j <= peak_j:
            return peak
        return math.log(j) ** 2 / j

    def vector(js):
        js = np.asarray(js, dtype=float)
        safe = np.maximum(js, 2.0)
        vals = np.log(safe) ** 2 / safe
        return np.where(js <= peak_j, peak, vals)

    return FreezingSequence(
        name="cor53", dimension=1, scalar=scalar, vector=vector,
        asymptotic=AsymptoticClass(LOG2_OVER_J),
        recipe={"plateau_until": peak_j}, tail_limit=0.0)


def power_sequence(epsilon: float, scale: float = 1.0,
                   dimension: int = 1) -> FreezingSequence:
    """a_j = scale / j^(1+eps): the summable family of the no-go criterion."""
    if epsilon <= 0:
        raise InputError("epsilon must be > 0")

    def scalar(j):
        return scale / max(j, 1) ** (1.0 + epsilon)

    def vector(js):
        js = np.asarray(js, dtype=float)
        return scale / np.maximum(js, 1.0) ** (1.0 + epsilon)

    return FreezingSequence(
        name="power", dimension=dimension, scalar=scalar, vector=vector,
        asymptotic=AsymptoticClass(POWER, epsilon=epsilon),
        recipe={"epsilon": epsilon, "scale": scale}, tail_limit=0.0)


def custom_sequence(values_fn, *, dimension=1, name="custom",
                    recipe=None, asymptotic=None) -> FreezingSequence:
    """Wrap a user-supplied positive non-increasing j -> a_j."""

    def scalar(j):
        return float(values_fn(j))

    def vector(js):
        return np.array([values_fn(int(j)) for j in np.asarray(js).ravel()],
                        dtype=float).reshape(np.asarray(js).shape)

    return FreezingSequence(
        name=name, dimension=dimension, scalar=scalar, vector=vector,
        asymptotic=asymptotic or AsymptoticClass(CUSTOM), recipe=recipe or {})


# ---------------------------------------------------------------------------
# No-go classifier

NOGO = "NoGo"
CANDIDATE = "CandidateFreezing"
INCONCLUSIVE = "Inconclusive"


@dataclass
class NoGoReport:
    verdict: str
    reason: str
    trace: dict = field(default_factory=dict)  # N -> partial sum

    def to_json_dict(self):
        return {"verdict": self.verdict, "reason": self.reason,
                "partial_sums": {str(k): v for k, v in self.trace.items()}}


def nogo_classify(sequence: FreezingSequence, d: int,
                  trace_points=(10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6)) -> NoGoReport:
    """Classify sum_n n^(d-1) a_n by the symbolic tag where possible.

    Convergence of that series rules freezing out; the tagged polylog/1-over-j
    classes all diverge, the power class converges iff eps > d-1.  Untagged
    sequences get the numeric partial-sum trace and an Inconclusive verdict,
    since divergence is not decidable from finitely many terms.
    """
    trace = _partial_sums(sequence, d, trace_points)
    tag = sequence.asymptotic.tag
    if tag == POWER:
        eps = sequence.asymptotic.epsilon
        if eps > d - 1:
            return NoGoReport(NOGO,
                              f"sum n^{d - 1} a_n converges: eps={eps} > d-1",
                              trace)
        return NoGoReport(CANDIDATE,
                          f"sum n^{d - 1} a_n diverges: eps={eps} <= d-1", trace)
    if tag in _DIVERGENT_TAGS:
        return NoGoReport(CANDIDATE,
                          f"tag {tag}: sum n^{d - 1} a_n diverges analytically",
                          trace)
    return NoGoReport(INCONCLUSIVE,
                      "untagged sequence: numerical divergence is undecidable",
                      trace)


def _partial_sums(sequence, d, trace_points):
    n_top = max(trace_points)
    n = np.arange(1, n_top + 1, dtype=float)
    terms = n ** (d - 1) * sequence.values(n_top)[1:]
    csum = np.cumsum(terms)
    return {int(N): float(csum[N - 1]) for N in sorted(trace_points)}
