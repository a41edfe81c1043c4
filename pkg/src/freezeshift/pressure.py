"""Pressure curves with certified brackets, slant-asymptote fits and the
affine-tail freezing detector.

Three solvers: a weighted de Bruijn transfer operator with Collatz-Wielandt
enclosures (d=1), an excursion-sum renewal equation for single-fixed-point
targets (d=1 one-sided, exact potential), and finite-torus summation via a
row transfer matrix (d=2, stability use only).  The 1d solvers read the
potential through the anchored-word convention; the pressure function is
invariant under that recode and the two solvers are mutual oracles.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import InputError, NonConvergedError, ResourceLimitError
from .potential import TruncatedPotential, window_value_table
from .sequences import FreezingSequence
from .subshift import SinglePoint, SubshiftSpec

TRANSFER_STATE_GUARD = 2 ** 20
WINDOW_TABLE_GUARD = 2 ** 20


@dataclass
class PressurePoint:
    beta: float
    estimate: float
    lower: float
    upper: float
    method: str
    radius: int | None = None
    finite_size_slack: float | None = None
    note: str = ""

    def __post_init__(self):
        if not (self.lower <= self.estimate + 1e-12
                and self.estimate <= self.upper + 1e-12):
            raise InputError("pressure bracket does not contain the estimate")

    @property
    def width(self):
        return self.upper - self.lower


@dataclass
class PressureCurve:
    points: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = sorted(self.points, key=lambda p: p.beta)

    def __len__(self):
        return len(self.points)

    def betas(self):
        return np.array([p.beta for p in self.points])

    def estimates(self):
        return np.array([p.estimate for p in self.points])

    def widths(self):
        return np.array([p.upper - p.lower for p in self.points])

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["beta", "estimate", "lower", "upper", "method", "R"])
            for p in self.points:
                w.writerow([f"{p.beta:.12g}", f"{p.estimate:.12g}",
                            f"{p.lower:.12g}", f"{p.upper:.12g}", p.method,
                            "" if p.radius is None else p.radius])

    @classmethod
    def from_csv(cls, path):
        points = []
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                points.append(PressurePoint(
                    beta=float(row["beta"]), estimate=float(row["estimate"]),
                    lower=float(row["lower"]), upper=float(row["upper"]),
                    method=row["method"],
                    radius=int(row["R"]) if row.get("R") else None))
        return cls(points)

    def check_convexity(self, slop=1e-9):
        """Chord condition on consecutive triples, up to bracket widths."""
        b, e, w = self.betas(), self.estimates(), self.widths()
        for i in range(len(b) - 2):
            lam = (b[i + 2] - b[i + 1]) / (b[i + 2] - b[i])
            chord = lam * e[i] + (1 - lam) * e[i + 2]
            if e[i + 1] > chord + w[i] + w[i + 1] + w[i + 2] + slop:
                return False
        return True


def default_beta_grid(n_points: int = 60, beta_min: float = 0.05,
                      beta_max: float = 8.0):
    """Geometric grid with the exact infinite-temperature anchor prepended."""
    return np.concatenate([[0.0], np.geomspace(beta_min, beta_max, n_points)])


# ---------------------------------------------------------------------------
# d=1 transfer operator


def _word_of(idx, K, R):
    w = [0] * R
    for i in range(R - 1, -1, -1):
        w[i] = idx % K
        idx //= K
    return tuple(w)


def _phi_vector(potential: TruncatedPotential, K: int, R: int):
    return np.array([potential.word_value(_word_of(i, K, R))
                     for i in range(K ** R)])


def transfer_pressure_1d(potential: TruncatedPotential, beta: float,
                         tol: float = 1e-10, *,
                         state_guard: int = TRANSFER_STATE_GUARD,
                         max_iter: int = 500_000) -> PressurePoint:
    """log spectral radius of the weighted word-shift matrix, with certified
    Collatz-Wielandt enclosure; brackets widened by beta * a_R to cover the
    truncation of the potential."""
    spec = potential.spec
    if spec.dimension != 1:
        raise InputError("transfer solver requires d=1")
    if beta < 0:
        raise InputError("beta must be >= 0")
    K = len(spec.alphabet)
    R = potential.radius
    if K ** R > state_guard:
        raise ResourceLimitError("transfer state space exceeds guard",
                                 bound=state_guard, requested=K ** R)
    phi = _phi_vector(potential, K, R)
    weights = np.exp(beta * phi)
    M = K ** (R - 1)
    v = np.ones(K ** R)
    lo = hi = None
    for _ in range(max_iter):
        t = v.reshape(M, K).sum(axis=1)     # sum over appended symbols
        nv = weights * np.tile(t, K)        # drop the leading symbol
        ratios = nv / v
        lo, hi = float(np.log(ratios.min())), float(np.log(ratios.max()))
        v = nv / nv.max()
        if hi - lo <= tol:
            a_R = potential.error_bound
            est = 0.5 * (lo + hi)
            return PressurePoint(beta=beta, estimate=est,
                                 lower=lo - beta * a_R, upper=hi,
                                 method="transfer-1d", radius=R)
    raise NonConvergedError("power iteration did not reach tolerance",
                            lower=lo, upper=hi)


# ---------------------------------------------------------------------------
# renewal solver (single fixed point, one-sided)


def renewal_pressure(sequence: FreezingSequence, beta: float, N_max: int,
                     spec: SubshiftSpec, tol: float = 1e-13) -> PressurePoint:
    """Certified bracket for the root P of the excursion-sum equation
    (K-1) * sum_n exp(beta * S_n - n P) = 1, S_n = -(a_1 + ... + a_n).

    The sum is truncated at N_max; the positive-sequence tail bound
    (K-1) e^{beta S_N} e^{-(N+1)P} / (1 - e^{-P}) steers the upper root.  A
    root at 0 within tolerance means the frozen phase (p = h_top = 0).
    """
    if spec.dimension != 1 or spec.sided != "one" \
            or not isinstance(spec.kind, SinglePoint):
        raise InputError("renewal solver requires a one-sided single-point target")
    if beta < 0:
        raise InputError("beta must be >= 0")
    if N_max < 10:
        raise InputError("N_max too small")
    K = len(spec.alphabet)
    if K < 2:
        raise InputError("renewal needs at least two symbols")
    a = sequence.values(N_max)
    A = np.cumsum(a[1:])               # A_n = a_1 + ... + a_n, n = 1..N_max
    logw = -beta * A                   # beta * S_n
    n = np.arange(1, N_max + 1, dtype=float)
    count = float(K - 1)

    def F(P):
        return count * np.exp(logw - n * P).sum()

    def tail(P):
        # positive a: S_n <= S_N for n > N
        return count * math.exp(logw[-1]) * math.exp(-(N_max + 1) * P) \
            / -np.expm1(-P)

    P_floor = 1e-300

    def upper_fn(P):
        return F(P) + tail(P) - 1.0

    # lower root: truncated sum only (F <= true F, roots ordered accordingly)
    if F(tol) <= 1.0:
        P_lo = 0.0
    else:
        b_hi = 1.0
        while F(b_hi) > 1.0:
            b_hi *= 2.0
            if b_hi > 1e6:
                raise NonConvergedError("renewal root bracketing failed")
        P_lo = brentq(lambda P: F(P) - 1.0, tol, b_hi, xtol=tol, rtol=1e-15)
    # upper root: truncated sum plus tail bound
    if upper_fn(P_floor) <= 0.0:
        P_hi = P_floor
    else:
        b_hi = max(2.0 * P_lo, 1.0)
        while upper_fn(b_hi) > 0.0:
            b_hi *= 2.0
            if b_hi > 1e6:
                raise NonConvergedError("renewal tail bracketing failed")
        P_hi = brentq(upper_fn, P_floor, b_hi, xtol=tol, rtol=1e-15)
    P_lo = max(P_lo, 0.0)
    P_hi = max(P_hi, P_lo)
    note = ""
    if P_lo == 0.0 and F(P_floor) <= 1.0:
        note = "frozen at this beta: renewal mass <= 1 at P=0"
    return PressurePoint(beta=beta, estimate=0.5 * (P_lo + P_hi),
                         lower=P_lo, upper=P_hi, method="renewal",
                         radius=None, note=note)


# ---------------------------------------------------------------------------
# d=2 torus


def torus_pressure_2d(potential: TruncatedPotential, beta: float, n: int, *,
                      state_guard: int = TRANSFER_STATE_GUARD,
                      compare_smaller: bool = True) -> PressurePoint:
    """(1/n^2) log of the periodic partition sum of the truncated potential.

    Brackets are widened by beta * a_R plus a finite-size slack estimated
    from the n vs n-1 difference; no rigorous finite-size bound is claimed.
    """
    spec = potential.spec
    if spec.dimension != 2:
        raise InputError("torus solver requires d=2")
    if beta < 0:
        raise InputError("beta must be >= 0")
    est = _torus_log_sum(potential, beta, n, state_guard) / (n * n)
    slack = None
    if compare_smaller and n >= 3:
        prev = _torus_log_sum(potential, beta, n - 1, state_guard) / ((n - 1) ** 2)
        slack = abs(est - prev)
    a_R = potential.error_bound
    widen = beta * a_R + (slack or 0.0)
    return PressurePoint(beta=beta, estimate=est, lower=est - widen,
                         upper=est + (slack or 0.0), method="torus-2d",
                         radius=potential.radius, finite_size_slack=slack,
                         note="no rigorous finite-size bound")


def _torus_log_sum(potential, beta, n, state_guard):
    """log sum over n x n torus patterns of exp(beta * sum of window values),
    via a row transfer matrix whose state is 2R consecutive rows."""
    spec = potential.spec
    K = len(spec.alphabet)
    R = potential.radius
    side = 2 * R + 1
    if 2 * R * n > 60 or K ** (2 * R * n) > state_guard:
        raise ResourceLimitError("torus row-state space exceeds guard",
                                 bound=state_guard, requested=K ** (2 * R * n))
    table = window_value_table(potential, WINDOW_TABLE_GUARD)
    rows = [_word_of(i, K, n) for i in range(K ** n)]
    nrows = len(rows)

    # weight of a (2R+1)-row strip: product over columns of the centered window
    def strip_logweight(strip):
        acc = 0.0
        for c in range(n):
            code = 0
            for dr in range(side):
                for dc in range(side):
                    code = code * K + strip[dr][(c + dc - R) % n]
            acc += table[code]
        return beta * acc

    state_count = nrows ** (2 * R)
    T = np.zeros((state_count, state_count))
    # state id: base-nrows encoding of the row tuple, most recent row last
    for sid in range(state_count):
        ids = []
        s = sid
        for _ in range(2 * R):
            ids.append(s % nrows)
            s //= nrows
        ids.reverse()
        strip_rows = [rows[i] for i in ids]
        for rnew in range(nrows):
            strip = strip_rows + [rows[rnew]]
            tid = 0
            for i in ids[1:] + [rnew]:
                tid = tid * nrows + i
            T[sid, tid] = math.exp(strip_logweight(strip))
    Z = np.trace(np.linalg.matrix_power(T, n))
    if Z <= 0:
        raise NonConvergedError("torus partition sum underflowed to zero")
    return float(np.log(Z))


# ---------------------------------------------------------------------------
# slant fit and freeze detection


@dataclass
class SlantFit:
    s_hat: float
    h_hat: float
    residuals: np.ndarray
    stderr: float
    tail_start: int
    non_monotone: list = field(default_factory=list)

    def line(self, beta):
        return self.s_hat * beta + self.h_hat


def fit_slant(curve: PressureCurve, tail_fraction: float = 0.25) -> SlantFit:
    """Least-squares slant line through the largest-beta tail of the curve;
    residuals g(beta) = p(beta) - line are reported for every point."""
    m = len(curve)
    tail = max(3, int(math.ceil(tail_fraction * m)))
    if m < 3 or tail > m:
        raise InputError("need at least 3 tail points for the slant fit")
    b = curve.betas()
    e = curve.estimates()
    tb, te = b[m - tail:], e[m - tail:]
    s_hat, h_hat = np.polyfit(tb, te, 1)
    fit_res = te - (s_hat * tb + h_hat)
    dof = max(len(tb) - 2, 1)
    stderr = float(np.sqrt((fit_res ** 2).sum() / dof))
    residuals = e - (s_hat * b + h_hat)
    w = curve.widths()
    non_monotone = [i for i in range(m - 1)
                    if residuals[i + 1] > residuals[i] + w[i] + w[i + 1] + 1e-9]
    return SlantFit(s_hat=float(s_hat), h_hat=float(h_hat),
                    residuals=residuals, stderr=stderr,
                    tail_start=m - tail, non_monotone=non_monotone)


@dataclass(frozen=True)
class SlackPolicy:
    """Residual threshold per point: bracket_factor * bracket width plus
    se_factor * fit standard error plus an absolute epsilon.

    The default keeps the fit-error term out: certified bracket widths alone
    decide flatness, which is the conservative choice against declaring a
    smoothly decaying curve frozen.
    """

    bracket_factor: float = 1.0
    se_factor: float = 0.0
    eps: float = 1e-9
    min_flat_points: int = 3

    def slack(self, widths, stderr):
        return self.bracket_factor * widths + self.se_factor * stderr + self.eps


@dataclass
class FreezeReport:
    verdict: str                       # "FrozenBeyond" | "NotDetected"
    beta_c_interval: tuple | None
    affine_everywhere: bool
    residuals: np.ndarray
    slack: np.ndarray
    betas: np.ndarray

    def to_json_dict(self):
        return {
            "verdict": self.verdict,
            "beta_c_interval": list(self.beta_c_interval)
            if self.beta_c_interval else None,
            "affine_everywhere": self.affine_everywhere,
            "residual_table": [
                {"beta": float(b), "residual": float(r), "slack": float(s)}
                for b, r, s in zip(self.betas, self.residuals, self.slack)],
        }


FROZEN_BEYOND = "FrozenBeyond"
NOT_DETECTED = "NotDetected"


def detect_freeze(curve: PressureCurve, slant: SlantFit,
                  policy: SlackPolicy = SlackPolicy()) -> FreezeReport:
    """Affine-tail detector: FrozenBeyond when the slant line sits inside
    every bracket from some grid point on (with at least min_flat_points of
    evidence) while being rejected at some smaller beta."""
    b = curve.betas()
    r = slant.residuals
    slack = policy.slack(curve.widths(), slant.stderr)
    flat = np.abs(r) <= slack
    m = len(b)
    k = m
    while k > 0 and flat[k - 1]:
        k -= 1
    # k = first index of the maximal flat suffix
    if m - k < policy.min_flat_points:
        return FreezeReport(NOT_DETECTED, None, False, r, slack, b)
    if k == 0:
        # affine on the whole grid: no transition visible (slope may be 0)
        return FreezeReport(FROZEN_BEYOND, (0.0, 0.0), True, r, slack, b)
    return FreezeReport(FROZEN_BEYOND, (float(b[k - 1]), float(b[k])), False,
                        r, slack, b)
