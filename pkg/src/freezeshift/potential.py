"""Potentials attached to a target subshift: distance exponents, radius-R
truncations with certified error, the associated box interaction, and the
finite block-replacement gain.

Convention (centralized here): the distance exponent of a configuration is
the smallest radius r whose centered-box restriction is inadmissible;
one-sided specs use prefixes x_0..x_{r-1} instead.  The potential value is
-a_j on exponent j and 0 on the target subshift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, ResourceLimitError
from .sequences import FreezingSequence
from .subshift import (
    Pattern,
    SubshiftSpec,
    count_language,
    pattern_admissible,
    stat_box,
)


@dataclass(frozen=True)
class DistanceExponent:
    """Exact(j): box radius j-1 admissible, radius j not (prefix lengths for
    one-sided).  AtLeast(r): every restriction inside the inspected window of
    radius r-1 was admissible."""

    kind: str  # "exact" | "at_least"
    value: int

    @property
    def exact(self):
        return self.kind == "exact"


def _window_radius(spec, window):
    """Radius R for a pattern on StatBox(R), or prefix length for one-sided."""
    lo, hi = window.bounding_box()
    if spec.sided == "one":
        if lo != (0,) or not window.is_box():
            raise InputError("one-sided window must be a prefix anchored at 0")
        return hi[0] + 1
    if not window.is_box():
        raise InputError("window must be a full centered box")
    if any(-a != b for a, b in zip(lo, hi)) or len(set(hi)) != 1:
        raise InputError("two-sided window must be a cube centered at the origin")
    return hi[0]


def distance_exponent(spec: SubshiftSpec, window: Pattern) -> DistanceExponent:
    """Smallest inadmissible centered-box radius (or prefix length) visible in
    the window; AtLeast(R+1) when the whole window is admissible."""
    R = _window_radius(spec, window)
    if spec.sided == "one":
        word = window.word()
        for r in range(1, R + 1):
            if not pattern_admissible(spec, Pattern.from_word(word[:r])):
                return DistanceExponent("exact", r)
        return DistanceExponent("at_least", R + 1)
    for r in range(0, R + 1):
        sub = window.restrict(list(stat_box(r, spec.dimension).offsets()))
        if not pattern_admissible(spec, sub):
            return DistanceExponent("exact", r)
    return DistanceExponent("at_least", R + 1)


class TruncatedPotential:
    """Radius-R locally determined evaluation of the freezing potential.

    eval is 0 when the window is fully admissible and -a_j on exponent j,
    giving the one-sided bracket phi <= phi_R <= phi + a_R pointwise.
    """

    def __init__(self, sequence: FreezingSequence, spec: SubshiftSpec, radius: int):
        if radius < 1:
            raise InputError("truncation radius must be >= 1")
        self.sequence = sequence
        self.spec = spec
        self.radius = radius
        self._word_cache = {}

    @property
    def error_bound(self):
        return self.sequence.value(self.radius)

    def value_of(self, exponent: DistanceExponent) -> float:
        if exponent.exact:
            return -self.sequence.value(exponent.value)
        return 0.0

    def eval(self, window: Pattern) -> float:
        R = _window_radius(self.spec, window)
        if R != self.radius:
            raise InputError(f"window radius {R} != potential radius {self.radius}")
        return self.value_of(distance_exponent(self.spec, window))

    # -- anchored-word evaluation (transfer/renewal recoding, d=1) --------
    def word_value(self, word) -> float:
        """Potential of an anchored word read as the leading coordinates.

        Used by the 1d pressure solvers: the value is -a_j for the smallest
        inadmissible prefix length j <= R, else 0.  Two-sided specs are
        recoded to this anchored convention; the pressure function is
        invariant under the recode.
        """
        word = tuple(word)[: self.radius]
        if word in self._word_cache:
            return self._word_cache[word]
        val = 0.0
        for r in range(1, len(word) + 1):
            if not pattern_admissible(self.spec, Pattern.from_word(word[:r])):
                val = -self.sequence.value(r)
                break
        self._word_cache[word] = val
        return val


def eval_truncated(potential: TruncatedPotential, window: Pattern) -> float:
    return potential.eval(window)


def window_value_table(potential: TruncatedPotential,
                       guard: int = 2 ** 20) -> np.ndarray:
    """phi_R for every centered window, indexed by the row-major K-ary code
    of its cells.  Cached on the potential (it is immutable)."""
    cached = getattr(potential, "_window_table", None)
    if cached is not None:
        return cached
    spec = potential.spec
    K = len(spec.alphabet)
    R = potential.radius
    side = 2 * R + 1
    cells = side ** spec.dimension
    total = K ** cells
    if total > guard:
        raise ResourceLimitError("window table exceeds guard",
                                 bound=guard, requested=total)
    offsets = list(stat_box(R, spec.dimension).offsets())
    table = np.empty(total)
    for code in range(total):
        vals = []
        c = code
        for _ in range(cells):
            vals.append(c % K)
            c //= K
        vals.reverse()  # row-major: first offset = most significant digit
        table[code] = potential.eval(Pattern(dict(zip(offsets, vals))))
    potential._window_table = table
    return table


def build_truncated(sequence, spec, radius) -> TruncatedPotential:
    return TruncatedPotential(sequence, spec, radius)


# ---------------------------------------------------------------------------
# Interactions


@dataclass
class InteractionFamily:
    """Box interaction of the potential: on StatBox(n) the value is
    a_{n+1} - a_n for inadmissible restrictions and 0 otherwise, together
    with partial sums of the summable and volume-normalized norms.

    The summable-norm accumulator counts, for each n, the (2n+1)^d translates
    of the centered box that contain the origin.
    """

    sequence: FreezingSequence
    spec: SubshiftSpec
    n_max: int
    n_star: int                      # smallest n with an inadmissible box pattern
    values: np.ndarray               # a_{n+1} - a_n, n = 0..n_max
    norms: np.ndarray                # sup |Phi_{StatBox(n)}|
    s_partial: np.ndarray            # cumulative summable-norm partial sums
    b_partial: np.ndarray            # cumulative volume-normalized partial sums

    def box_value(self, n: int, pattern: Pattern) -> float:
        """Phi_{StatBox(n)} evaluated on a pattern covering that box."""
        if n > self.n_max:
            raise InputError("box level beyond truncation depth")
        offsets = list(stat_box(n, self.spec.dimension).offsets())
        sub = pattern.restrict(offsets)
        if pattern_admissible(self.spec, sub):
            return 0.0
        return float(self.values[n])

    def translate_value(self, pattern: Pattern, t, n: int) -> float:
        """Phi on the translate t + StatBox(n), read from ``pattern``."""
        if n > self.n_max:
            raise InputError("box level beyond truncation depth")
        t = tuple(t)
        offsets = [tuple(o + v for o, v in zip(off, t))
                   for off in stat_box(n, self.spec.dimension).offsets()]
        sub = pattern.restrict(offsets).translate(tuple(-v for v in t))
        if pattern_admissible(self.spec, sub):
            return 0.0
        return float(self.values[n])

    def origin_sum(self, window: Pattern) -> float:
        """Sum of the centered-box values through n_max on one window.

        Telescopes to a_{n_max+1} - a_j on a window with exponent Exact(j).
        """
        return sum(self.box_value(n, window) for n in range(self.n_max + 1))

    @property
    def s_norm(self):
        return float(self.s_partial[-1])

    @property
    def b_norm(self):
        return float(self.b_partial[-1])


def generate_interaction(sequence: FreezingSequence, spec: SubshiftSpec,
                         n_max: int) -> InteractionFamily:
    """Interaction family through box level n_max with norm partial sums."""
    if n_max < 0:
        raise InputError("n_max must be >= 0")
    d = spec.dimension
    a = sequence.values(n_max + 2)
    values = a[1:n_max + 2] - a[:n_max + 1]  # a_{n+1} - a_n <= 0
    n_star = _first_inadmissible_level(spec)
    if n_star is None or n_star > n_max:
        norms = np.zeros(n_max + 1)
    else:
        norms = np.where(np.arange(n_max + 1) >= n_star, -values, 0.0)
    sides = (2.0 * np.arange(n_max + 1) + 1.0) ** d
    return InteractionFamily(
        sequence=sequence, spec=spec, n_max=n_max, n_star=-1 if n_star is None else n_star,
        values=values, norms=norms,
        s_partial=np.cumsum(norms * sides),
        b_partial=np.cumsum(norms))


def _first_inadmissible_level(spec, n_cap=16):
    """Smallest n with an inadmissible pattern on StatBox(n); None if not
    found by n_cap (existence is monotone in n, so the flag propagates).

    d>=2 SFTs use the row-transfer locally-admissible count here, matching
    the documented extendability caveat for those specs.
    """
    from .complexity import count_blocks
    from .subshift import SFT
    K = len(spec.alphabet)
    for n in range(n_cap + 1):
        side = 2 * n + 1
        full = K ** (side ** spec.dimension)
        try:
            if isinstance(spec.kind, SFT) and spec.dimension >= 2:
                c = count_blocks(spec, side)
            else:
                c = count_language(spec, stat_box(n, spec.dimension))
        except ResourceLimitError:
            return None
        if c < full:
            return n
    return None


def replacement_gain(potential: TruncatedPotential, x: Pattern,
                     block: Pattern, replacement: Pattern,
                     shifts) -> float:
    """Exact sum over the given shifts of the truncated-potential differences
    between x and x with ``block`` overwritten by ``replacement``.

    ``block`` and ``replacement`` must share one box shape; ``block``'s cells
    must equal x on its offsets.  Every shifted evaluation window must lie
    inside x's support.
    """
    if block.offsets != replacement.offsets:
        raise InputError("block and replacement must share the same box")
    if not block.is_box():
        raise InputError("replacement blocks must be full boxes")
    x_cells = x.cells()
    for off, val in zip(block.offsets, block.values):
        if x_cells.get(off) != val:
            raise InputError("x does not contain the block at its anchor")
    y_cells = dict(x_cells)
    for off, val in zip(replacement.offsets, replacement.values):
        y_cells[off] = val
    y = Pattern(y_cells)
    spec = potential.spec
    R = potential.radius
    d = spec.dimension
    if spec.sided == "one":
        win_offsets = [(k,) for k in range(R)]
    else:
        win_offsets = list(stat_box(R, d).offsets())
    total = 0.0
    for j in shifts:
        j = tuple(j) if not isinstance(j, tuple) else j
        offs = [tuple(o + v for o, v in zip(off, j)) for off in win_offsets]
        try:
            wx = x.restrict(offs).translate(tuple(-v for v in j))
            wy = y.restrict(offs).translate(tuple(-v for v in j))
        except InputError:
            raise InputError(f"evaluation window at shift {j} leaves x's support")
        total += potential.eval(wy) - potential.eval(wx)
    return total
