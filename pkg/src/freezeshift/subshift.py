"""Finite subshift descriptions, admissibility oracles and language enumeration.

Supported descriptions: full shifts on a sub-alphabet, subshifts of finite
type given by forbidden patterns, constant-box substitutions (primitive ones
only) and the single fixed configuration of one repeated symbol.

Admissibility always means membership in the language of the subshift, i.e.
the pattern occurs in some admissible infinite configuration.  For
one-dimensional SFTs this is decided exactly through the follower graph; in
higher dimensions a bounded-radius extension search is used and the radius is
an explicit, documented approximation parameter.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import numpy as np

from .errors import EmptyWindowError, InputError, ResourceLimitError

# Enumeration guard: refuse searches whose raw space exceeds this.
DEFAULT_ENUM_GUARD = 2 ** 22


class Alphabet:
    """Ordered set of distinct symbol tokens with a stable index bijection."""

    def __init__(self, symbols):
        symbols = tuple(str(s) for s in symbols)
        if len(symbols) == 0:
            raise InputError("alphabet must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise InputError("alphabet symbols must be distinct")
        self.symbols = symbols
        self._index = {s: i for i, s in enumerate(symbols)}

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def index(self, symbol) -> int:
        try:
            return self._index[str(symbol)]
        except KeyError:
            raise InputError(f"symbol {symbol!r} not in alphabet {self.symbols}")

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"Alphabet({list(self.symbols)!r})"


class Pattern:
    """Immutable finite pattern: a map from lattice offsets to symbol indices.

    Offsets are stored sorted in row-major (lexicographic) order, so equality,
    hashing and the canonical enumeration order are all well defined.
    """

    __slots__ = ("offsets", "values", "_hash")

    def __init__(self, cells):
        items = sorted((tuple(int(c) for c in off), int(v))
                       for off, v in dict(cells).items())
        if not items:
            raise InputError("pattern shape must be non-empty")
        d = len(items[0][0])
        if any(len(off) != d for off, _ in items):
            raise InputError("pattern offsets must share one dimension")
        object.__setattr__(self, "offsets", tuple(off for off, _ in items))
        object.__setattr__(self, "values", tuple(v for _, v in items))
        object.__setattr__(self, "_hash", hash((self.offsets, self.values)))

    def __setattr__(self, *a):
        raise AttributeError("Pattern is immutable")

    @classmethod
    def from_word(cls, indices, start=0):
        return cls({(start + i,): v for i, v in enumerate(indices)})

    @classmethod
    def from_array(cls, arr, origin=None):
        arr = np.asarray(arr)
        if origin is None:
            origin = (0,) * arr.ndim
        cells = {}
        for idx in np.ndindex(*arr.shape):
            cells[tuple(o + i for o, i in zip(origin, idx))] = int(arr[idx])
        return cls(cells)

    @property
    def dimension(self):
        return len(self.offsets[0])

    def __len__(self):
        return len(self.offsets)

    def __eq__(self, other):
        return (isinstance(other, Pattern)
                and self.offsets == other.offsets
                and self.values == other.values)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Pattern({dict(zip(self.offsets, self.values))!r})"

    def cells(self):
        return dict(zip(self.offsets, self.values))

    def value_at(self, off):
        off = tuple(off)
        for o, v in zip(self.offsets, self.values):
            if o == off:
                return v
        raise InputError(f"offset {off} not in pattern")

    def bounding_box(self):
        lo = tuple(min(o[k] for o in self.offsets) for k in range(self.dimension))
        hi = tuple(max(o[k] for o in self.offsets) for k in range(self.dimension))
        return lo, hi

    def is_box(self):
        lo, hi = self.bounding_box()
        vol = 1
        for a, b in zip(lo, hi):
            vol *= b - a + 1
        return vol == len(self.offsets)

    def translate(self, vec):
        vec = tuple(vec)
        return Pattern({tuple(o + v for o, v in zip(off, vec)): val
                        for off, val in zip(self.offsets, self.values)})

    def restrict(self, offsets):
        want = set(tuple(o) for o in offsets)
        cells = {off: val for off, val in zip(self.offsets, self.values)
                 if off in want}
        if len(cells) != len(want):
            raise InputError("restriction offsets not all present in pattern")
        return Pattern(cells)

    def to_array(self):
        """Dense array over the bounding box; requires a full box pattern."""
        if not self.is_box():
            raise InputError("pattern is not a full box")
        lo, hi = self.bounding_box()
        shape = tuple(b - a + 1 for a, b in zip(lo, hi))
        arr = np.empty(shape, dtype=np.int64)
        for off, val in zip(self.offsets, self.values):
            arr[tuple(o - a for o, a in zip(off, lo))] = val
        return arr

    def word(self):
        """Symbol-index tuple for a contiguous 1d pattern."""
        if self.dimension != 1 or not self.is_box():
            raise InputError("word() requires a contiguous 1d pattern")
        return self.values  # offsets are sorted, hence consecutive


ERG = "erg"
STAT = "stat"
PREFIX = "prefix"


@dataclass(frozen=True)
class BoxWindow:
    """Standard windows: ErgBox [0,n-1]^d, StatBox [-n,n]^d, 1d prefix [0,n-1]."""

    kind: str
    n: int
    dimension: int

    def __post_init__(self):
        if self.kind not in (ERG, STAT, PREFIX):
            raise InputError(f"unknown window kind {self.kind!r}")
        if self.n < 0:
            raise InputError("window size must be >= 0")
        if self.kind == PREFIX and self.dimension != 1:
            raise InputError("prefix windows exist only for d=1")

    @property
    def side(self):
        return self.n if self.kind in (ERG, PREFIX) else 2 * self.n + 1

    @property
    def volume(self):
        return self.side ** self.dimension

    @property
    def low(self):
        if self.kind in (ERG, PREFIX):
            return (0,) * self.dimension
        return (-self.n,) * self.dimension

    def offsets(self):
        lo = self.low
        for idx in itertools.product(range(self.side), repeat=self.dimension):
            yield tuple(a + i for a, i in zip(lo, idx))


def erg_box(n, d=1):
    return BoxWindow(ERG, n, d)


def stat_box(n, d=1):
    return BoxWindow(STAT, n, d)


def prefix_window(n):
    return BoxWindow(PREFIX, n, 1)


# ---------------------------------------------------------------------------
# Spec kinds


@dataclass(frozen=True)
class FullShift:
    sub_alphabet: tuple  # symbol indices
    kind_name = "full"


@dataclass(frozen=True)
class SFT:
    forbidden: tuple  # of Pattern
    kind_name = "sft"


@dataclass(frozen=True)
class Substitution:
    box_dims: tuple  # (m_1, ..., m_d), each >= 2
    rules: tuple  # rules[a] = Pattern on the ErgBox of box_dims
    kind_name = "substitution"


@dataclass(frozen=True)
class SinglePoint:
    symbol: int
    kind_name = "single"


class SubshiftSpec:
    """Finite description of a subshift of the full shift on ``alphabet``.

    Immutable after construction; engines carrying derived data (follower
    graphs, substitution closures) are built lazily and cached, so specs are
    safe to share between workers.
    """

    def __init__(self, alphabet, dimension, kind, sided="two"):
        if dimension < 1:
            raise InputError("dimension must be >= 1")
        if sided not in ("one", "two"):
            raise InputError("sided must be 'one' or 'two'")
        if sided == "one" and dimension != 1:
            raise InputError("one-sided specs permitted only for d=1")
        self.alphabet = alphabet
        self.dimension = dimension
        self.sided = sided
        self.kind = kind
        self._engine_cache = None
        self._validate()

    def _validate(self):
        K = len(self.alphabet)
        k = self.kind
        if isinstance(k, FullShift):
            if not k.sub_alphabet:
                raise InputError("full-shift sub-alphabet must be non-empty")
            if any(not (0 <= a < K) for a in k.sub_alphabet):
                raise InputError("sub-alphabet index out of range")
        elif isinstance(k, SinglePoint):
            if not (0 <= k.symbol < K):
                raise InputError("fixed-point symbol out of range")
        elif isinstance(k, SFT):
            for p in k.forbidden:
                if p.dimension != self.dimension:
                    raise InputError("forbidden pattern dimension mismatch")
                if any(not (0 <= v < K) for v in p.values):
                    raise InputError("forbidden pattern symbol out of range")
        elif isinstance(k, Substitution):
            if len(k.box_dims) != self.dimension:
                raise InputError("substitution box dimension mismatch")
            if any(m < 2 for m in k.box_dims):
                raise InputError("substitution box sides must be >= 2")
            if len(k.rules) != K:
                raise InputError("substitution needs one rule per symbol")
            for p in k.rules:
                lo, hi = p.bounding_box()
                if (lo != (0,) * self.dimension
                        or hi != tuple(m - 1 for m in k.box_dims)
                        or not p.is_box()):
                    raise InputError("rule shape must equal the declared box")
                if any(not (0 <= v < K) for v in p.values):
                    raise InputError("rule symbol out of range")
            if not _incidence_primitive(self):
                raise InputError("substitution incidence matrix is not primitive")
        else:
            raise InputError(f"unknown spec kind {k!r}")

    def _engine(self):
        if self._engine_cache is None:
            k = self.kind
            if isinstance(k, FullShift):
                eng = _FullEngine(self)
            elif isinstance(k, SinglePoint):
                eng = _SinglePointEngine(self)
            elif isinstance(k, SFT):
                eng = _Sft1dEngine(self) if self.dimension == 1 else _SftNdEngine(self)
            else:
                eng = _SubstitutionEngine(self)
            self._engine_cache = eng
        return self._engine_cache

    def __repr__(self):
        return (f"SubshiftSpec(|A|={len(self.alphabet)}, d={self.dimension}, "
                f"sided={self.sided}, kind={self.kind.kind_name})")


def _incidence_primitive(spec):
    """Primitivity of the substitution incidence matrix (Wielandt bound)."""
    K = len(spec.alphabet)
    M = np.zeros((K, K), dtype=np.int64)
    for a, rule in enumerate(spec.kind.rules):
        for v in rule.values:
            M[v, a] = 1
    P = M.copy()
    limit = (K - 1) ** 2 + 1 if K > 1 else 1
    for _ in range(limit):
        if (P > 0).all():
            return True
        P = np.minimum(P @ M, 1)
    return bool((P > 0).all())


# ---------------------------------------------------------------------------
# Engines


class _FullEngine:
    def __init__(self, spec):
        self.spec = spec
        self.allowed = frozenset(spec.kind.sub_alphabet)

    def admissible(self, pattern):
        return all(v in self.allowed for v in pattern.values)


class _SinglePointEngine:
    def __init__(self, spec):
        self.spec = spec
        self.symbol = spec.kind.symbol

    def admissible(self, pattern):
        return all(v == self.symbol for v in pattern.values)


class _Sft1dEngine:
    """Follower-graph machinery for d=1 SFTs; decides extendability exactly.

    A word is in the two-sided language iff it is locally admissible, its
    first follower state has an infinite past and its last state an infinite
    future.  One-sided specs drop the infinite-past requirement (the word may
    sit at the origin of a one-sided configuration).
    """

    def __init__(self, spec):
        self.spec = spec
        self.one_sided = spec.sided == "one"
        K = len(spec.alphabet)
        words = set()
        singles = set()
        for p in spec.kind.forbidden:
            lo, hi = p.bounding_box()
            span = hi[0] - lo[0] + 1
            if span == 1:
                singles.add(p.values[0])
                continue
            # gapped forbidden patterns expand to every consistent full word
            fixed = {off[0] - lo[0]: v for off, v in zip(p.offsets, p.values)}
            free = [i for i in range(span) if i not in fixed]
            if K ** len(free) > DEFAULT_ENUM_GUARD:
                raise ResourceLimitError(
                    "gapped forbidden pattern expansion too large",
                    bound=DEFAULT_ENUM_GUARD, requested=K ** len(free))
            for fill in itertools.product(range(K), repeat=len(free)):
                w = [0] * span
                for i, v in fixed.items():
                    w[i] = v
                for i, v in zip(free, fill):
                    w[i] = v
                words.add(tuple(w))
        self.allowed = tuple(a for a in range(K) if a not in singles)
        self.forbidden_words = frozenset(words)
        self._factor_cache = {}
        if not self.allowed:
            self.memory = 1
            self.states = ()
            self.state_index = {}
            self.out_edges = []
            self.forward_live = frozenset()
            self.backward_live = frozenset()
            return
        L = max((len(w) for w in words), default=2)
        self.memory = max(L - 1, 1)
        self._build_graph()

    def _locally_ok(self, word):
        for w in self.forbidden_words:
            k = len(w)
            if k > len(word):
                continue
            for i in range(len(word) - k + 1):
                if word[i:i + k] == w:
                    return False
        return True

    def _build_graph(self):
        m = self.memory
        states = [w for w in itertools.product(self.allowed, repeat=m)
                  if self._locally_ok(w)]
        self.states = tuple(states)
        self.state_index = {w: i for i, w in enumerate(states)}
        out = [[] for _ in states]
        into = [[] for _ in states]
        for i, u in enumerate(states):
            for s in self.allowed:
                w = u + (s,)
                if not self._locally_ok(w):
                    continue
                j = self.state_index.get(w[1:])
                if j is not None:
                    out[i].append((j, s))
                    into[j].append(i)
        self.out_edges = out
        self.in_edges = into
        self.forward_live = self._trim(out_side=True)
        self.backward_live = self._trim(out_side=False)

    def _trim(self, out_side):
        alive = set(range(len(self.states)))
        changed = True
        while changed:
            changed = False
            for i in list(alive):
                if out_side:
                    ok = any(j in alive for j, _ in self.out_edges[i])
                else:
                    ok = any(j in alive for j in self.in_edges[i])
                if not ok:
                    alive.discard(i)
                    changed = True
        return frozenset(alive)

    @property
    def essential(self):
        return self.forward_live & self.backward_live

    def _start_set(self):
        # One-sided words may sit at the origin, so any valid state can start
        # them; two-sided words need an infinite past.
        if self.one_sided:
            return frozenset(range(len(self.states)))
        return self.essential

    def word_admissible(self, word):
        word = tuple(word)
        if not word:
            return True
        if any(a not in self.allowed for a in word):
            return False
        if not self._locally_ok(word):
            return False
        m = self.memory
        if len(word) < m:
            return word in self._short_factors(len(word))
        path = [self.state_index.get(word[i:i + m])
                for i in range(len(word) - m + 1)]
        if any(p is None for p in path):
            return False
        if path[-1] not in self.forward_live:
            return False
        return self.one_sided or path[0] in self.backward_live

    def _short_factors(self, n):
        """Admissible words shorter than the follower memory.

        Two-sided: factors of states on bi-infinite paths.  One-sided: factors
        of states with an infinite future (an occurrence may touch the origin).
        """
        if n not in self._factor_cache:
            live = self.forward_live if self.one_sided else self.essential
            found = set()
            for i in live:
                w = self.states[i]
                for k in range(len(w) - n + 1):
                    found.add(w[k:k + n])
            self._factor_cache[n] = frozenset(found)
        return self._factor_cache[n]

    def admissible(self, pattern):
        if pattern.is_box():
            return self.word_admissible(pattern.values)
        lo, hi = pattern.bounding_box()
        span = hi[0] - lo[0] + 1
        fixed = {off[0] - lo[0]: v for off, v in zip(pattern.offsets, pattern.values)}
        free = [i for i in range(span) if i not in fixed]
        if len(self.allowed) ** len(free) > DEFAULT_ENUM_GUARD:
            raise ResourceLimitError("gap fill search too large",
                                     bound=DEFAULT_ENUM_GUARD,
                                     requested=len(self.allowed) ** len(free))
        word = [0] * span
        for i, v in fixed.items():
            word[i] = v
        for fill in itertools.product(self.allowed, repeat=len(free)):
            for i, v in zip(free, fill):
                word[i] = v
            if self.word_admissible(tuple(word)):
                return True
        return False

    def words(self, n, max_patterns):
        """All admissible words of length n, lexicographically sorted."""
        m = self.memory
        if n == 0:
            return [()]
        if not self.states:
            return []
        if n < m:
            return sorted(self._short_factors(n))
        out = []
        starts = sorted(self._start_set())  # states are built in lex order
        for i0 in starts:
            stack = [(i0, self.states[i0])]
            while stack:
                i, w = stack.pop()
                if len(w) == n:
                    if i in self.forward_live:
                        out.append(w)
                        if len(out) > max_patterns:
                            raise ResourceLimitError(
                                "language enumeration guard exceeded",
                                bound=max_patterns)
                    continue
                for j, s in sorted(self.out_edges[i], key=lambda e: -e[1]):
                    stack.append((j, w + (s,)))
        return out

    def count_words(self, n):
        """Exact |L_n| as a python int via big-integer path counting."""
        m = self.memory
        if n == 0:
            return 1
        if not self.states:
            return 0
        if n < m:
            return len(self._short_factors(n))
        starts = self._start_set()
        # words of length n <-> paths of n-m steps from a start state to a
        # forward-live state (interior states are then automatically live)
        v = [1 if i in self.forward_live else 0 for i in range(len(self.states))]
        for _ in range(n - m):
            nv = [0] * len(self.states)
            for i in range(len(self.states)):
                acc = 0
                for j, _ in self.out_edges[i]:
                    acc += v[j]
                nv[i] = acc
            v = nv
        return sum(v[i] for i in starts)

    def perron_value(self):
        """log spectral radius of the follower matrix on essential states."""
        ess = sorted(self.essential)
        if not ess:
            raise InputError("empty subshift has no Perron value")
        pos = {i: k for k, i in enumerate(ess)}
        M = np.zeros((len(ess), len(ess)))
        for k, i in enumerate(ess):
            for j, _ in self.out_edges[i]:
                if j in pos:
                    M[k, pos[j]] += 1.0
        lam = max(abs(np.linalg.eigvals(M)))
        return float(np.log(lam))


class _SftNdEngine:
    """d>=2 SFT: bounded-radius extension search (documented approximation).

    The extension radius defaults to the largest forbidden-pattern diameter;
    exactness is claimed only for d=1, which uses the follower graph instead.
    """

    def __init__(self, spec, extension_radius=None):
        self.spec = spec
        self.forbidden = spec.kind.forbidden
        d = spec.dimension
        spans = [tuple(hi[k] - lo[k] + 1 for k in range(d))
                 for lo, hi in (p.bounding_box() for p in self.forbidden)]
        self.max_span = tuple(max((s[k] for s in spans), default=1)
                              for k in range(d))
        if extension_radius is None:
            extension_radius = max(max(self.max_span, default=1) - 1, 0)
        self.extension_radius = extension_radius
        self.norm_forbidden = []
        for p in self.forbidden:
            lo, _ = p.bounding_box()
            self.norm_forbidden.append(p.translate(tuple(-x for x in lo)))

    def admissible(self, pattern, radius=None):
        if radius is None:
            radius = self.extension_radius
        lo, hi = pattern.bounding_box()
        lo = tuple(a - radius for a in lo)
        hi = tuple(b + radius for b in hi)
        return self._fill_search(pattern.cells(), lo, hi) is not None

    def _fill_search(self, fixed, lo, hi, rng=None):
        """Backtracking fill of the box [lo,hi] avoiding forbidden translates.

        Cells in ``fixed`` are pinned; each forbidden occurrence is tested as
        soon as its row-major-last cell is assigned.  Returns a full cell
        dict or None.
        """
        d = self.spec.dimension
        K = len(self.spec.alphabet)
        cells = list(itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]))
        free_count = sum(1 for c in cells if c not in fixed)
        if K ** free_count > DEFAULT_ENUM_GUARD ** 2:
            raise ResourceLimitError("extension search too large",
                                     bound=DEFAULT_ENUM_GUARD ** 2,
                                     requested=K ** free_count)
        order = {c: i for i, c in enumerate(cells)}
        checks = [[] for _ in cells]
        for p in self.norm_forbidden:
            _, phi = p.bounding_box()
            for base in itertools.product(
                    *[range(lo[k], hi[k] - phi[k] + 1) for k in range(d)]):
                offs = tuple(tuple(base[k] + o[k] for k in range(d))
                             for o in p.offsets)
                checks[max(order[c] for c in offs)].append((offs, p.values))
        assign = dict(fixed)

        def violates(i):
            for offs, vals in checks[i]:
                if all(assign.get(c) == v for c, v in zip(offs, vals)):
                    return True
            return False

        def place(i):
            if i == len(cells):
                return True
            c = cells[i]
            if c in fixed:
                return (not violates(i)) and place(i + 1)
            opts = list(range(K))
            if rng is not None:
                rng.shuffle(opts)
            for s in opts:
                assign[c] = s
                if not violates(i) and place(i + 1):
                    return True
            del assign[c]
            return False

        if place(0):
            return dict(assign)
        return None

    def enumerate_window(self, offsets, max_patterns):
        """All extendable patterns on the given offsets (projection search)."""
        offsets = [tuple(o) for o in offsets]
        d = self.spec.dimension
        K = len(self.spec.alphabet)
        if K ** len(offsets) > DEFAULT_ENUM_GUARD:
            raise ResourceLimitError("window enumeration too large",
                                     bound=DEFAULT_ENUM_GUARD,
                                     requested=K ** len(offsets))
        r = self.extension_radius
        lo = tuple(min(o[k] for o in offsets) - r for k in range(d))
        hi = tuple(max(o[k] for o in offsets) + r for k in range(d))
        found = []
        for vals in itertools.product(range(K), repeat=len(offsets)):
            if self._fill_search(dict(zip(offsets, vals)), lo, hi) is not None:
                found.append(vals)
                if len(found) > max_patterns:
                    raise ResourceLimitError("language enumeration guard exceeded",
                                             bound=max_patterns)
        return [Pattern(dict(zip(offsets, vals))) for vals in found]


class _SubstitutionEngine:
    """Constant-box substitution language via the 2^d-box image closure.

    The admissible 2 x ... x 2 symbol patterns are the increasing closure of
    the one-step images' sub-boxes; a pattern with bounding extents (n_j) is
    in the language iff it occurs inside the k-fold image of an admissible
    2-box with m_j^k >= n_j, i.e. inside a union of 2^d adjacent k-fold
    substitution boxes covering the pattern twice over.
    """

    def __init__(self, spec):
        self.spec = spec
        self.box = tuple(spec.kind.box_dims)
        self.rule_arrays = np.stack([p.to_array() for p in spec.kind.rules])
        self._expand_cache = {}
        self._two_boxes = None

    def expand(self, symbol, k):
        key = (int(symbol), k)
        if key not in self._expand_cache:
            arr = np.array(key[0], dtype=np.int64).reshape((1,) * self.spec.dimension)
            for _ in range(k):
                arr = self._apply_once(arr)
            self._expand_cache[key] = arr
        return self._expand_cache[key]

    def _apply_once(self, arr):
        d = arr.ndim
        blocks = self.rule_arrays[arr]  # shape arr.shape + box
        perm = []
        for k in range(d):
            perm.extend([k, d + k])
        blocks = np.transpose(blocks, perm)
        return blocks.reshape(tuple(arr.shape[k] * self.box[k] for k in range(d)))

    def two_box_patterns(self):
        if self._two_boxes is None:
            found = set()
            for a in range(len(self.spec.alphabet)):
                found |= self._sub_boxes(self.expand(a, 1))
            while True:
                new = set(found)
                for w in found:
                    new |= self._sub_boxes(self._apply_once(np.array(w, dtype=np.int64)))
                if new == found:
                    break
                found = new
            self._two_boxes = tuple(sorted(found))
        return self._two_boxes

    @staticmethod
    def _sub_boxes(arr):
        d = arr.ndim
        if any(s < 2 for s in arr.shape):
            return set()
        win = np.lib.stride_tricks.sliding_window_view(arr, (2,) * d)
        return {_nested_tuple(w) for w in win.reshape(-1, *((2,) * d))}

    def _depth_for(self, extents):
        k = 0
        while any(self.box[j] ** k < extents[j] for j in range(len(extents))):
            k += 1
        return k

    def _images(self, extents):
        k = self._depth_for(extents)
        for w in self.two_box_patterns():
            img = np.array(w, dtype=np.int64)
            for _ in range(k):
                img = self._apply_once(img)
            yield img

    def admissible(self, pattern):
        lo, hi = pattern.bounding_box()
        extents = tuple(hi[k] - lo[k] + 1 for k in range(pattern.dimension))
        rel = [tuple(o - a for o, a in zip(off, lo)) for off in pattern.offsets]
        vals = pattern.values
        for img in self._images(extents):
            if self._occurs(img, rel, vals, extents):
                return True
        return False

    @staticmethod
    def _occurs(img, rel_offsets, vals, extents):
        ranges = [range(img.shape[k] - extents[k] + 1) for k in range(img.ndim)]
        for base in itertools.product(*ranges):
            if all(img[tuple(b + o for b, o in zip(base, off))] == v
                   for off, v in zip(rel_offsets, vals)):
                return True
        return False

    def window_factors(self, offsets):
        """Distinct admissible fillings of the window offsets, sorted."""
        offsets = [tuple(o) for o in offsets]
        d = len(offsets[0])
        lo = tuple(min(o[k] for o in offsets) for k in range(d))
        extents = tuple(max(o[k] for o in offsets) - lo[k] + 1 for k in range(d))
        rel = tuple(tuple(o - a for o, a in zip(off, lo)) for off in offsets)
        found = set()
        for img in self._images(extents):
            win = np.lib.stride_tricks.sliding_window_view(img, extents)
            for block in win.reshape(-1, *extents):
                found.add(tuple(int(block[r]) for r in rel))
        return sorted(found)


def _nested_tuple(arr):
    if arr.ndim == 1:
        return tuple(int(x) for x in arr)
    return tuple(_nested_tuple(a) for a in arr)


# ---------------------------------------------------------------------------
# Operations


def pattern_admissible(spec: SubshiftSpec, pattern: Pattern) -> bool:
    """True iff the pattern belongs to the language of the subshift."""
    if pattern.dimension != spec.dimension:
        raise InputError("pattern dimension does not match spec")
    K = len(spec.alphabet)
    if any(not (0 <= v < K) for v in pattern.values):
        raise InputError("pattern symbol index outside alphabet")
    return spec._engine().admissible(pattern)


def enumerate_language(spec: SubshiftSpec, window: BoxWindow,
                       max_patterns: int = DEFAULT_ENUM_GUARD) -> list:
    """Admissible patterns on the window, sorted row-major lexicographically."""
    if window.dimension != spec.dimension:
        raise InputError("window dimension does not match spec")
    if window.kind == PREFIX and spec.sided != "one":
        raise InputError("prefix windows require a one-sided spec")
    offsets = list(window.offsets())
    if not offsets:
        return []
    eng = spec._engine()
    kind = spec.kind
    if isinstance(kind, SinglePoint):
        return [Pattern({off: kind.symbol for off in offsets})]
    if isinstance(kind, FullShift):
        allowed = sorted(kind.sub_alphabet)
        total = len(allowed) ** len(offsets)
        if total > max_patterns:
            raise ResourceLimitError("language enumeration guard exceeded",
                                     bound=max_patterns, requested=total)
        return [Pattern(dict(zip(offsets, vals)))
                for vals in itertools.product(allowed, repeat=len(offsets))]
    if isinstance(kind, SFT) and spec.dimension == 1:
        words = eng.words(len(offsets), max_patterns)
        return [Pattern.from_word(w, start=offsets[0][0]) for w in words]
    if isinstance(kind, SFT):
        return eng.enumerate_window(offsets, max_patterns)
    fillings = eng.window_factors(offsets)
    if len(fillings) > max_patterns:
        raise ResourceLimitError("language enumeration guard exceeded",
                                 bound=max_patterns, requested=len(fillings))
    return [Pattern(dict(zip(offsets, vals))) for vals in fillings]


def count_language(spec: SubshiftSpec, window: BoxWindow,
                   max_patterns: int = DEFAULT_ENUM_GUARD) -> int:
    """|L_window| using a counting fast path where one exists."""
    if isinstance(spec.kind, SinglePoint):
        return 1
    if isinstance(spec.kind, FullShift):
        return len(spec.kind.sub_alphabet) ** window.volume
    if isinstance(spec.kind, SFT) and spec.dimension == 1:
        return spec._engine().count_words(window.volume)
    return len(enumerate_language(spec, window, max_patterns))


def substitution_expand(spec: SubshiftSpec, symbol, k: int,
                        max_volume: int = DEFAULT_ENUM_GUARD) -> Pattern:
    """k-fold substitution image of a symbol as a pattern on the origin box."""
    if not isinstance(spec.kind, Substitution):
        raise InputError("substitution_expand requires a substitution spec")
    if k < 0:
        raise InputError("k must be >= 0")
    if isinstance(symbol, str):
        symbol = spec.alphabet.index(symbol)
    vol = 1
    for m in spec.kind.box_dims:
        vol *= m ** k
    if vol > max_volume:
        raise ResourceLimitError("expansion volume guard exceeded",
                                 bound=max_volume, requested=vol)
    return Pattern.from_array(spec._engine().expand(symbol, k))


def generate_configuration(spec: SubshiftSpec, window: BoxWindow, seed: int) -> Pattern:
    """Deterministic admissible pattern covering the window (test fixture)."""
    offsets = list(window.offsets())
    rng = random.Random(seed)
    kind = spec.kind
    if isinstance(kind, SinglePoint):
        return Pattern({off: kind.symbol for off in offsets})
    if isinstance(kind, FullShift):
        allowed = sorted(kind.sub_alphabet)
        return Pattern({off: rng.choice(allowed) for off in offsets})
    if isinstance(kind, Substitution):
        eng = spec._engine()
        lo = window.low
        extents = (window.side,) * spec.dimension
        boxes = eng.two_box_patterns()
        if not boxes:
            raise EmptyWindowError("substitution has no admissible 2-box patterns")
        w = boxes[rng.randrange(len(boxes))]
        img = np.array(w, dtype=np.int64)
        for _ in range(eng._depth_for(extents)):
            img = eng._apply_once(img)
        base = tuple(rng.randrange(img.shape[j] - extents[j] + 1)
                     for j in range(spec.dimension))
        return Pattern({off: int(img[tuple(b + (o - l)
                                           for b, o, l in zip(base, off, lo))])
                        for off in offsets})
    eng = spec._engine()
    if spec.dimension == 1:
        # seeded walk on the live part of the follower graph, then crop
        m = eng.memory
        starts = sorted(eng._start_set())
        if not starts:
            raise EmptyWindowError("SFT language is empty")
        n = window.volume
        for _ in range(64):
            i = starts[rng.randrange(len(starts))]
            word = list(eng.states[i])
            ok = True
            while len(word) < max(n, m):
                nxt = [e for e in eng.out_edges[i] if e[0] in eng.forward_live]
                if not nxt:
                    ok = False
                    break
                j, s = nxt[rng.randrange(len(nxt))]
                word.append(s)
                i = j
            if ok:
                return Pattern.from_word(word[:n], start=offsets[0][0])
        raise EmptyWindowError("seeded follower walk failed to fill the window")
    r = eng.extension_radius
    lo = tuple(min(o[k] for o in offsets) - r for k in range(spec.dimension))
    hi = tuple(max(o[k] for o in offsets) + r for k in range(spec.dimension))
    fill = eng._fill_search({}, lo, hi, rng=rng)
    if fill is None:
        raise EmptyWindowError("backtracking fill found no admissible window")
    return Pattern({off: fill[off] for off in offsets})
