"""Finite-volume Gibbs specifications for truncated box interactions, plus a
single-site Metropolis sampler on small tori.

Specifications are exact: boxes meeting the volume are enumerated and the
boundary condition must cover every such box, so the nesting (DLR) identity
holds to rounding.  The sampler targets the finite-torus weights of the
truncated potential and uses the Philox counter generator, recorded in the
chain state, for bit-for-bit reproducibility.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ResourceLimitError
from .potential import InteractionFamily, TruncatedPotential, window_value_table
from .subshift import BoxWindow, Pattern, stat_box

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

RNG_ALGORITHM = "philox4x64"
WEIGHT_GUARD = 2 ** 20


@dataclass
class FiniteSpecification:
    """Box volume, boundary condition and truncated interaction at one beta.

    The boundary pattern must cover box + collar of width 2 * n_max (minus
    the box itself): every interaction box meeting the volume is then fully
    readable and the specification is exact.
    """

    box_offsets: tuple
    boundary: Pattern
    interaction: InteractionFamily
    beta: float

    def __post_init__(self):
        self.box_offsets = tuple(tuple(o) for o in self.box_offsets)
        need = self.required_support(self.box_offsets, self.interaction)
        have = set(self.boundary.offsets) | set(self.box_offsets)
        missing = need - have
        if missing:
            raise InputError(
                f"boundary misses {len(missing)} cells (collar width 2*n_max); "
                f"first: {sorted(missing)[:3]}")

    @staticmethod
    def required_support(box_offsets, interaction):
        d = interaction.spec.dimension
        n_max = interaction.n_max
        need = set()
        for off in box_offsets:
            for delta in itertools.product(range(-2 * n_max, 2 * n_max + 1),
                                           repeat=d):
                need.add(tuple(o + v for o, v in zip(off, delta)))
        return need


def make_specification(interaction: InteractionFamily, beta: float,
                       box: BoxWindow, boundary: Pattern) -> FiniteSpecification:
    return FiniteSpecification(tuple(box.offsets()), boundary, interaction, beta)


def _interaction_boxes(fs: FiniteSpecification):
    """(translate, level) of every interaction box meeting the volume."""
    d = fs.interaction.spec.dimension
    lo = tuple(min(o[k] for o in fs.box_offsets) for k in range(d))
    hi = tuple(max(o[k] for o in fs.box_offsets) for k in range(d))
    box_set = set(fs.box_offsets)
    out = []
    for n in range(fs.interaction.n_max + 1):
        for t in itertools.product(*[range(lo[k] - n, hi[k] + n + 1)
                                     for k in range(d)]):
            # t + StatBox(n) meets the volume iff t is within n of it
            cells = [tuple(t[k] + o[k] for k in range(d))
                     for o in stat_box(n, d).offsets()]
            if any(c in box_set for c in cells):
                out.append((t, n, cells))
    return out


def conditional_weights(fs: FiniteSpecification) -> dict:
    """Exact normalized weights, pattern on the box -> probability."""
    spec = fs.interaction.spec
    K = len(spec.alphabet)
    offsets = list(fs.box_offsets)
    if K ** len(offsets) > WEIGHT_GUARD:
        raise ResourceLimitError("conditional-weight enumeration too large",
                                 bound=WEIGHT_GUARD, requested=K ** len(offsets))
    boxes = _interaction_boxes(fs)
    base = fs.boundary.cells()
    from .subshift import pattern_admissible
    values = fs.interaction.values
    weights = {}
    for vals in itertools.product(range(K), repeat=len(offsets)):
        cells = dict(base)
        cells.update(zip(offsets, vals))
        U = 0.0
        for t, n, box_cells in boxes:
            sub = Pattern({c: cells[c] for c in box_cells}).translate(
                tuple(-v for v in t))
            if not pattern_admissible(spec, sub):
                U += values[n]
        weights[Pattern(dict(zip(offsets, vals)))] = math.exp(fs.beta * U)
    Z = sum(weights.values())
    probs = {p: w / Z for p, w in weights.items()}
    total = sum(probs.values())
    if abs(total - 1.0) > 1e-12:
        raise InputError("conditional weights failed to normalize")
    return probs


def full_support_rho(interaction: InteractionFamily,
                     trunc_norm: float | None = None) -> float:
    """rho = |A|^-1 exp(-2 * truncated summable norm): every conditional
    weight of the truncated specification is >= rho^|volume|."""
    if trunc_norm is None:
        trunc_norm = interaction.s_norm
    return math.exp(-2.0 * trunc_norm) / len(interaction.spec.alphabet)


def check_rho_bound(fs: FiniteSpecification) -> tuple:
    """(rho, min weight / rho^|box|) for the specification; ratio >= 1 means
    the full-support bound holds on this box."""
    rho = full_support_rho(fs.interaction, fs.beta * fs.interaction.s_norm)
    probs = conditional_weights(fs)
    floor = rho ** len(fs.box_offsets)
    worst = min(probs.values())
    return rho, worst / floor


# ---------------------------------------------------------------------------
# Metropolis sampler


@dataclass
class ChainState:
    n: int
    dimension: int
    pattern: np.ndarray
    seed: int
    steps: int
    beta: float
    inadmissible_mass: float
    symbol_counts: np.ndarray
    samples: int
    accepted: int
    rng_algorithm: str = RNG_ALGORITHM
    energy: float = 0.0

    @property
    def acceptance_rate(self):
        return self.accepted / max(self.steps, 1)

    def symbol_frequencies(self):
        return self.symbol_counts / max(self.samples, 1)


def metropolis_run(potential: TruncatedPotential, beta: float, n: int,
                   steps: int, seed: int, burn_in: int = 0,
                   table_guard: int = WEIGHT_GUARD) -> ChainState:
    """Single-site Metropolis chain on the n^d torus targeting the truncated
    potential at inverse temperature beta.

    Statistics (time-averaged inadmissible-window mass and origin-cell
    symbol counts) accumulate after ``burn_in`` steps.  Deterministic per
    seed through the Philox counter generator.
    """
    spec = potential.spec
    d = spec.dimension
    if d not in (1, 2):
        raise InputError("sampler supports d in {1, 2}")
    if beta < 0:
        raise InputError("beta must be >= 0")
    R = potential.radius
    side = 2 * R + 1
    if side > n:
        raise InputError("torus smaller than the potential window")
    K = len(spec.alphabet)
    table = window_value_table(potential, table_guard)
    rng = np.random.Generator(np.random.Philox(key=seed))
    if d == 1:
        config = rng.integers(0, K, size=n, dtype=np.int8)
        config2 = config.reshape(1, n)
        win_h, win_w = 1, side
    else:
        config2 = rng.integers(0, K, size=(n, n), dtype=np.int8)
        win_h = win_w = side
    rows = config2.shape[0]
    cols = config2.shape[1]

    # current per-site window codes feed both the energy and the statistic
    kernel = _numba_kernel() if HAVE_NUMBA else _python_kernel
    inad_acc = np.zeros(1, dtype=np.float64)
    sym_counts = np.zeros(K, dtype=np.int64)
    accepted = 0
    samples = 0
    chunk = 1_000_000
    done = 0
    while done < steps:
        m = min(chunk, steps - done)
        sites = rng.integers(0, rows * cols, size=m, dtype=np.int64)
        props = rng.integers(0, K, size=m, dtype=np.int8)
        unifs = rng.random(size=m)
        acc, smp = kernel(config2, table, np.float64(beta), np.int64(K),
                          np.int64(R), sites, props, unifs,
                          np.int64(max(burn_in - done, 0)), inad_acc,
                          sym_counts)
        accepted += int(acc)
        samples += int(smp)
        done += m
    mass = float(inad_acc[0]) / max(samples, 1) / (rows * cols)
    energy = _total_energy(config2, table, K, R)
    return ChainState(n=n, dimension=d,
                      pattern=config2[0] if d == 1 else config2, seed=seed,
                      steps=steps, beta=beta, inadmissible_mass=mass,
                      symbol_counts=sym_counts, samples=samples,
                      accepted=accepted, energy=energy)


def _window_code(config, r, c, K, R):
    rows, cols = config.shape
    code = 0
    height = 1 if rows == 1 else 2 * R + 1
    for dr in range(height):
        rr = (r + dr - (0 if rows == 1 else R)) % rows
        for dc in range(2 * R + 1):
            code = code * K + int(config[rr, (c + dc - R) % cols])
    return code


def _total_energy(config, table, K, R):
    rows, cols = config.shape
    return float(sum(table[_window_code(config, r, c, K, R)]
                     for r in range(rows) for c in range(cols)))


def _python_kernel(config, table, beta, K, R, sites, props, unifs,
                   skip, inad_acc, sym_counts):
    rows, cols = config.shape
    accepted = 0
    samples = 0
    # current inadmissible-window count
    inad = 0
    for r in range(rows):
        for c in range(cols):
            if table[_window_code(config, r, c, K, R)] < 0:
                inad += 1
    height = 1 if rows == 1 else 2 * R + 1
    for i in range(len(sites)):
        r0, c0 = divmod(int(sites[i]), cols)
        s_new = int(props[i])
        s_old = int(config[r0, c0])
        if s_new != s_old:
            delta = 0.0
            dinad = 0
            for dr in range(height):
                rr = (r0 + dr - (0 if rows == 1 else R)) % rows
                for dc in range(2 * R + 1):
                    cc = (c0 + dc - R) % cols
                    old = table[_window_code(config, rr, cc, K, R)]
                    config[r0, c0] = s_new
                    new = table[_window_code(config, rr, cc, K, R)]
                    config[r0, c0] = s_old
                    delta += new - old
                    dinad += (1 if new < 0 else 0) - (1 if old < 0 else 0)
            if unifs[i] < math.exp(min(beta * delta, 0.0)) or beta * delta >= 0:
                config[r0, c0] = s_new
                inad += dinad
                accepted += 1
        else:
            accepted += 1
        if i >= skip:
            inad_acc[0] += inad
            sym_counts[config[0, 0]] += 1
            samples += 1
    return accepted, samples


_NUMBA_CACHE = {}


def _numba_kernel():
    if "kernel" not in _NUMBA_CACHE:
        compiled = njit(cache=False, fastmath=False)(_kernel_impl)
        _NUMBA_CACHE["kernel"] = compiled
    return _NUMBA_CACHE["kernel"]


def _kernel_impl(config, table, beta, K, R, sites, props, unifs,
                 skip, inad_acc, sym_counts):
    rows, cols = config.shape
    side = 2 * R + 1
    height = 1 if rows == 1 else side
    roff = 0 if rows == 1 else R
    accepted = 0
    samples = 0
    inad = 0
    for r in range(rows):
        for c in range(cols):
            code = 0
            for dr in range(height):
                rr = (r + dr - roff) % rows
                for dc in range(side):
                    code = code * K + config[rr, (c + dc - R) % cols]
            if table[code] < 0.0:
                inad += 1
    for i in range(sites.shape[0]):
        r0 = sites[i] // cols
        c0 = sites[i] % cols
        s_new = props[i]
        s_old = config[r0, c0]
        if s_new != s_old:
            delta = 0.0
            dinad = 0
            for dr in range(height):
                rr = (r0 + dr - roff) % rows
                for dc in range(side):
                    cc = (c0 + dc - R) % cols
                    code_old = 0
                    code_new = 0
                    for er in range(height):
                        r2 = (rr + er - roff) % rows
                        for ec in range(side):
                            c2 = (cc + ec - R) % cols
                            v = config[r2, c2]
                            code_old = code_old * K + v
                            if r2 == r0 and c2 == c0:
                                code_new = code_new * K + s_new
                            else:
                                code_new = code_new * K + v
                    old = table[code_old]
                    new = table[code_new]
                    delta += new - old
                    if new < 0.0:
                        dinad += 1
                    if old < 0.0:
                        dinad -= 1
            if beta * delta >= 0.0 or unifs[i] < math.exp(beta * delta):
                config[r0, c0] = s_new
                inad += dinad
                accepted += 1
        else:
            accepted += 1
        if i >= skip:
            inad_acc[0] += inad
            sym_counts[config[0, 0]] += 1
            samples += 1
    return accepted, samples
