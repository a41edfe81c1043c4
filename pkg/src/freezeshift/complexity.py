"""Exact block counting, entropy brackets and the per-scale entropy gaps.

Counts are exact big integers throughout: the gap sequence feeds the
freezing-sequence formulas and must only be contaminated by the rounding of
a single log.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field

from .errors import InputError, ResourceLimitError
from .subshift import (
    SFT,
    FullShift,
    SinglePoint,
    SubshiftSpec,
    Substitution,
    count_language,
    erg_box,
)

# Row-transfer state space cap for 2d counting: |A|^(width * strip) states.
DEFAULT_ROW_WIDTH_CAP = 22


@dataclass
class ComplexityTable:
    """n -> |L_{ErgBox(n)}| with the method used for each entry."""

    spec: SubshiftSpec
    counts: dict = field(default_factory=dict)  # n -> int
    methods: dict = field(default_factory=dict)  # n -> str

    def add(self, n, count, method):
        self.counts[n] = int(count)
        self.methods[n] = method

    def __getitem__(self, n):
        return self.counts[n]

    def __contains__(self, n):
        return n in self.counts

    def log_per_site(self, n):
        d = self.spec.dimension
        return log_big(self.counts[n]) / (n ** d)

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["n", "count", "method"])
            for n in sorted(self.counts):
                w.writerow([n, str(self.counts[n]), self.methods[n]])

    def check_submultiplicative(self):
        """count(2n) <= count(n)^(2^d) wherever both entries exist."""
        d = self.spec.dimension
        for n, c in self.counts.items():
            if 2 * n in self.counts:
                if self.counts[2 * n] > c ** (2 ** d):
                    return False
        return True


@dataclass
class EntropyEstimate:
    upper: float
    lower: float
    exact: float | None = None
    provenance: str | None = None

    def __post_init__(self):
        if self.lower > self.upper + 1e-15:
            raise InputError("entropy bracket inverted")
        if self.exact is not None and not (
                self.lower - 1e-12 <= self.exact <= self.upper + 1e-12):
            raise InputError("exact entropy outside bracket")

    @property
    def reference(self):
        """Best usable value of the entropy: exact if known, else the upper
        bound (conditional: enlarges the gap sequence, which keeps the
        freezing inequalities valid)."""
        return self.exact if self.exact is not None else self.upper

    @property
    def conditional(self):
        return self.exact is None


@dataclass
class KappaSequence:
    """Per-scale entropy gaps kappa_i = log(n_i)/2^(i d) - h_ref, i=0..i_max."""

    kappa: list
    h_ref: float
    dimension: int
    conditional: bool = False

    def __len__(self):
        return len(self.kappa)

    def __getitem__(self, i):
        return self.kappa[i]


def log_big(n: int) -> float:
    """log of a positive big integer without overflowing float conversion."""
    if n <= 0:
        raise InputError("log of non-positive count")
    if n.bit_length() <= 60:
        return math.log(n)
    shift = n.bit_length() - 60
    return math.log(n >> shift) + shift * math.log(2)


def count_blocks(spec: SubshiftSpec, n: int,
                 width_cap: int = DEFAULT_ROW_WIDTH_CAP) -> int:
    """Exact |L_{ErgBox(n)}| for the spec; method chosen per kind/dimension."""
    if n < 1:
        raise InputError("n must be >= 1")
    kind = spec.kind
    if isinstance(kind, SinglePoint):
        return 1
    if isinstance(kind, FullShift):
        return len(kind.sub_alphabet) ** (n ** spec.dimension)
    if isinstance(kind, SFT):
        if spec.dimension == 1:
            return spec._engine().count_words(n)
        if spec.dimension == 2:
            return _row_transfer_count(spec, n, width_cap)
        raise ResourceLimitError("counting implemented for d <= 2 SFTs",
                                 bound=2, requested=spec.dimension)
    # substitution: distinct factors over the 2^d-box image union
    return count_language(spec, erg_box(n, spec.dimension))


def count_method(spec: SubshiftSpec) -> str:
    kind = spec.kind
    if isinstance(kind, SFT):
        return "transfer-1d" if spec.dimension == 1 else "row-transfer-2d"
    if isinstance(kind, Substitution):
        return "substitution"
    return "brute"


def complexity_table(spec: SubshiftSpec, sizes,
                     width_cap: int = DEFAULT_ROW_WIDTH_CAP) -> ComplexityTable:
    table = ComplexityTable(spec)
    method = count_method(spec)
    for n in sizes:
        table.add(n, count_blocks(spec, n, width_cap), method)
    return table


def _row_transfer_count(spec: SubshiftSpec, n: int, width_cap: int) -> int:
    """2d SFT block count by row-transfer DP over big integers.

    States are strips of (h-1) locally admissible rows, h the tallest
    forbidden pattern.  Counts locally admissible blocks; these coincide with
    the language for SFTs whose local patterns always extend (e.g. hard
    squares), which is the documented extendability caveat for d=2.
    """
    K = len(spec.alphabet)
    forbidden = [(p.bounding_box(), p) for p in spec.kind.forbidden]
    h = max((hi[0] - lo[0] + 1 for (lo, hi), _ in forbidden), default=1)
    strip = max(h - 1, 1)
    if K ** (n * strip) > 2 ** width_cap:
        raise ResourceLimitError("row-transfer state space exceeds cap",
                                 bound=2 ** width_cap, requested=K ** (n * strip))

    if n < strip:
        # block shorter than the state strip: enumerate directly
        if K ** (n * n) > 2 ** width_cap:
            raise ResourceLimitError("direct 2d enumeration exceeds cap",
                                     bound=2 ** width_cap, requested=K ** (n * n))
        return sum(1 for rows in itertools.product(
            itertools.product(range(K), repeat=n), repeat=n)
            if _block_ok(rows, forbidden, n))
    states = [rows for rows in itertools.product(
        itertools.product(range(K), repeat=n), repeat=strip)
        if _block_ok(rows, forbidden, n)]
    if h == 1:
        # only single-row constraints: rows are independent
        return len(states) ** n
    index = {s: i for i, s in enumerate(states)}
    succ = [[] for _ in states]
    for i, s in enumerate(states):
        for row in itertools.product(range(K), repeat=n):
            t = s[1:] + (row,)
            if t in index and _block_ok(s + (row,), forbidden, n):
                succ[i].append(index[t])
    steps = n - strip
    v = [1] * len(states)
    for _ in range(steps):
        nv = [0] * len(states)
        for i in range(len(states)):
            acc = 0
            for j in succ[i]:
                acc += v[j]
            nv[i] = acc
        v = nv
    return sum(v)


def _block_ok(rows, forbidden, width):
    height = len(rows)
    for (lo, hi), p in forbidden:
        ph = hi[0] - lo[0] + 1
        pw = hi[1] - lo[1] + 1
        if ph > height or pw > width:
            continue
        for r in range(height - ph + 1):
            for c in range(width - pw + 1):
                if all(rows[r + off[0] - lo[0]][c + off[1] - lo[1]] == val
                       for off, val in zip(p.offsets, p.values)):
                    return False
    return True


def entropy_bounds(spec: SubshiftSpec, n_max: int,
                   width_cap: int = DEFAULT_ROW_WIDTH_CAP) -> EntropyEstimate:
    """Upper/lower entropy brackets, with the exact value where available."""
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    d = spec.dimension
    kind = spec.kind
    upper = math.inf
    for n in range(1, n_max + 1):
        c = count_blocks(spec, n, width_cap)
        if c == 0:
            raise InputError("empty subshift has no entropy")
        upper = min(upper, log_big(c) / n ** d)
    lower = 0.0
    exact = None
    provenance = None
    if isinstance(kind, SinglePoint):
        exact, provenance = 0.0, "zero-substitution"
    elif isinstance(kind, FullShift):
        exact, provenance = math.log(len(kind.sub_alphabet)), "perron-1d"
    elif isinstance(kind, SFT) and d == 1:
        exact = spec._engine().perron_value()
        provenance = "perron-1d"
    elif isinstance(kind, Substitution):
        # primitive constant-box substitutions have zero entropy
        exact, provenance = 0.0, "zero-substitution"
    if exact is not None:
        lower = exact
        if upper < exact:  # possible only through float rounding
            upper = exact
    return EntropyEstimate(upper=upper, lower=lower, exact=exact,
                           provenance=provenance)


def kappa_sequence(spec: SubshiftSpec, i_max: int, h_ref: float,
                   table: ComplexityTable | None = None,
                   width_cap: int = DEFAULT_ROW_WIDTH_CAP) -> KappaSequence:
    """kappa_i = log(count(2^i)) / 2^(i d) - h_ref for i = 0..i_max."""
    if i_max < 0:
        raise InputError("i_max must be >= 0")
    d = spec.dimension
    kappa = []
    for i in range(i_max + 1):
        n = 2 ** i
        if table is not None and n in table:
            c = table[n]
        else:
            c = count_blocks(spec, n, width_cap)
            if table is not None:
                table.add(n, c, count_method(spec))
        k = log_big(c) / (2 ** (i * d)) - h_ref
        if k < -1e-12:
            raise InputError(
                f"negative kappa_{i} = {k:.3e}: h_ref exceeds the block-count "
                "upper bound for the entropy")
        kappa.append(max(k, 0.0))
    return KappaSequence(kappa=kappa, h_ref=h_ref, dimension=d)


def substitution_complexity_bound(spec: SubshiftSpec):
    """(Q, C) with the guarantee count(n) <= C * n^Q for all n >= 1."""
    if not isinstance(spec.kind, Substitution):
        raise InputError("substitution spec required")
    dims = spec.kind.box_dims
    m = min(dims)
    prod = 1
    for x in dims:
        prod *= x
    Q = math.log(prod) / math.log(m)
    C = len(spec.alphabet) ** (2 ** spec.dimension) * m ** Q
    return Q, C


def perron_defect_constant(spec: SubshiftSpec, h: float, j_max: int = 64) -> float:
    """c = max_j j*(log n_j / j - h) over tabulated word counts, d=1 only.

    For an irreducible d=1 SFT the word counts satisfy
    h <= log(n_j)/j <= h + c/j for some finite c.
    """
    if spec.dimension != 1:
        raise InputError("defect constant defined for d=1")
    best = 0.0
    for j in range(1, j_max + 1):
        nj = count_blocks(spec, j)
        best = max(best, j * (log_big(nj) / j - h))
    return best
