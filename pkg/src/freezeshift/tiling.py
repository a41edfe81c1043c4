"""Dyadic tilings on finite windows and the 1d pin/superpin decomposition.

Per site, the tile is the largest dyadic box (in the grid laid down by an
odometer offset) whose restriction of the configuration is admissible; its
parent must be witnessed inadmissible inside the window, otherwise the site
is reported undetermined rather than guessed.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .errors import InputError, UndeterminedError
from .subshift import Pattern, SubshiftSpec, pattern_admissible


@dataclass(frozen=True)
class OdometerOffset:
    """Finite-depth dyadic grid phases: at level n <= depth, tiles along axis
    i start at positions congruent to offsets[i] mod 2^n."""

    offsets: tuple
    depth: int

    def __post_init__(self):
        if self.depth < 0:
            raise InputError("depth must be >= 0")
        if any(not (0 <= o < 2 ** self.depth) for o in self.offsets):
            raise InputError("offsets must lie in [0, 2^depth)")

    @property
    def dimension(self):
        return len(self.offsets)

    def tile_origin(self, j, level):
        if level > self.depth:
            raise InputError("grid undefined beyond the odometer depth")
        step = 2 ** level
        return tuple(o + ((c - o) // step) * step
                     for c, o in zip(j, self.offsets))

    def tile_cells(self, j, level):
        origin = self.tile_origin(j, level)
        step = 2 ** level
        return [tuple(a + i for a, i in zip(origin, idx))
                for idx in itertools.product(range(step), repeat=self.dimension)]

    def shifted(self, vec):
        """Grid seen from coordinates translated by +vec (equivariance)."""
        mod = 2 ** self.depth
        return OdometerOffset(tuple((o + v) % mod for o, v in zip(self.offsets, vec)),
                              self.depth)


@dataclass(frozen=True)
class Tile:
    origin: tuple
    level: int
    admissible: bool

    @property
    def volume(self):
        return (2 ** self.level) ** len(self.origin)


@dataclass
class DyadicTiling:
    tiles: list
    window_lo: tuple
    window_hi: tuple
    margin: list = field(default_factory=list)  # undetermined sites

    @property
    def determined_volume(self):
        return sum(t.volume for t in self.tiles)

    def to_json(self):
        return json.dumps({
            "window": {"lo": list(self.window_lo), "hi": list(self.window_hi)},
            "tiles": [{"origin": list(t.origin), "level": t.level,
                       "admissible": t.admissible} for t in self.tiles],
            "margin": [list(j) for j in self.margin],
        }, sort_keys=True)


class _TileOracle:
    """Shared admissibility cache over dyadic tiles of one configuration."""

    def __init__(self, spec, x, offset):
        self.spec = spec
        self.x = x
        self.offset = offset
        self.domain = set(x.offsets)
        self.cells = x.cells()
        self._adm = {}

    def tile_in_domain(self, j, level):
        cells = self.offset.tile_cells(j, level)
        return all(c in self.domain for c in cells), cells

    def tile_admissible(self, j, level):
        origin = self.offset.tile_origin(j, level)
        key = (origin, level)
        if key not in self._adm:
            cells = self.offset.tile_cells(j, level)
            sub = Pattern({c: self.cells[c] for c in cells})
            self._adm[key] = pattern_admissible(self.spec, sub)
        return self._adm[key]


def tile_level(spec: SubshiftSpec, x: Pattern, offset: OdometerOffset, j,
               _oracle: _TileOracle | None = None) -> int:
    """Largest n with the level-n dyadic tile at j admissible (0 for an
    inadmissible single cell); raises UndeterminedError carrying the level
    reached when the witness tile leaves the window."""
    j = tuple(j)
    oracle = _oracle or _TileOracle(spec, x, offset)
    if j not in oracle.domain:
        raise InputError(f"site {j} outside the configuration window")
    if not oracle.tile_admissible(j, 0):
        return 0
    n = 0
    while True:
        if n + 1 > offset.depth:
            raise UndeterminedError(
                f"odometer depth exhausted at level {n}", level_reached=n)
        ok, _ = oracle.tile_in_domain(j, n + 1)
        if not ok:
            raise UndeterminedError(
                f"level-{n + 1} tile leaves the window", level_reached=n)
        if not oracle.tile_admissible(j, n + 1):
            return n
        n += 1


def tile_decomposition(spec: SubshiftSpec, x: Pattern,
                       offset: OdometerOffset) -> DyadicTiling:
    """Per-site maximal dyadic tiles over x's window; sites whose witness
    leaves the window are collected in the margin."""
    if offset.dimension != spec.dimension:
        raise InputError("offset dimension mismatch")
    oracle = _TileOracle(spec, x, offset)
    lo, hi = x.bounding_box()
    levels = {}
    margin = []
    for j in x.offsets:
        try:
            levels[j] = tile_level(spec, x, offset, j, _oracle=oracle)
        except UndeterminedError:
            margin.append(j)
    tiles = {}
    members = {}
    for j, n in levels.items():
        origin = offset.tile_origin(j, n)
        key = (origin, n)
        members.setdefault(key, []).append(j)
        if key not in tiles:
            tiles[key] = Tile(origin=origin, level=n,
                              admissible=oracle.tile_admissible(j, n))
    # consistency: every site of a tile reports the tile's level, and tiles
    # are complete inside the determined region
    for (origin, n), sites in members.items():
        if len(sites) != (2 ** n) ** spec.dimension:
            raise UndeterminedError(
                f"tile {origin} level {n} only partially determined",
                level_reached=n)
    return DyadicTiling(tiles=sorted(tiles.values(),
                                     key=lambda t: (t.origin, t.level)),
                        window_lo=lo, window_hi=hi, margin=sorted(margin))


# ---------------------------------------------------------------------------
# 1d pins


@dataclass
class PinSequence:
    """Greedy maximal-dyadic decomposition of a finite word.

    pins[0] = 0; consecutive gaps are powers of two; the block starting at a
    pin is admissible while its doubling is witnessed inadmissible.  The
    suffix from margin_start lacks a doubling witness inside the word and is
    left undecomposed (a doubling witness always outruns its block, so every
    finite word ends in a margin segment).
    """

    pins: list
    gaps: list
    margin_start: int
    length: int

    def superpin_flags(self):
        """pin position -> (gap after) <= (gap before), for interior pins."""
        return {self.pins[i]: self.gaps[i] <= self.gaps[i - 1]
                for i in range(1, len(self.gaps))}

    def to_json(self):
        return json.dumps({
            "pins": self.pins, "gaps": self.gaps,
            "margin_start": self.margin_start, "length": self.length,
            "superpins": {str(k): v for k, v in sorted(self.superpin_flags().items())},
        }, sort_keys=True)


def pin_decomposition(spec: SubshiftSpec, x: Pattern) -> PinSequence:
    """Partition a one-sided word into maximal admissible dyadic blocks.

    At each pin p the gap is the unique 2^k with x[p : p+2^k] admissible
    (vacuous for k = 0) and x[p : p+2^{k+1}] inadmissible; when the doubling
    witness would leave the word, the remaining suffix becomes the margin.
    """
    if spec.dimension != 1 or spec.sided != "one":
        raise InputError("pin decomposition requires a one-sided d=1 spec")
    word = x.word()
    L = len(word)

    def admissible(a, b):
        return pattern_admissible(spec, Pattern.from_word(word[a:b]))

    pins = [0]
    gaps = []
    pos = 0
    margin_start = L
    while pos < L:
        k = 0
        gap = None
        while True:
            end2 = pos + 2 ** (k + 1)
            if end2 > L:
                margin_start = pos
                break
            if not admissible(pos, end2):
                gap = 2 ** k
                break
            k += 1
        if gap is None:
            break
        pins.append(pos + gap)
        gaps.append(gap)
        pos += gap
    return PinSequence(pins=pins, gaps=gaps, margin_start=margin_start, length=L)
