import itertools
import math

import numpy as np
import pytest

from freezeshift.complexity import complexity_table, kappa_sequence
from freezeshift.errors import InputError
from freezeshift.potential import (
    DistanceExponent,
    TruncatedPotential,
    distance_exponent,
    eval_truncated,
    generate_interaction,
    replacement_gain,
)
from freezeshift.sequences import build_thm34_sequence, build_thm51_sequence
from freezeshift.subshift import Pattern, stat_box

from conftest import golden_mean, single_point, thue_morse

GOLDEN_H = math.log((1 + math.sqrt(5)) / 2)


def sp_thm34(i_max=4):
    spec = single_point()
    table = complexity_table(spec, [2 ** i for i in range(i_max + 1)])
    return spec, build_thm34_sequence(table, h_ref=0.0, i_max=i_max)


def centered_word(bits):
    R = (len(bits) - 1) // 2
    return Pattern.from_word(bits, start=-R)


# -- distance_exponent --------------------------------------------------------

def test_single_one_at_distance_5():
    spec = single_point()
    bits = [0] * 17
    bits[8 + 5] = 1  # offset +5 from the center
    de = distance_exponent(spec, centered_word(bits))
    assert de == DistanceExponent("exact", 5)


def test_fully_admissible_window():
    spec = single_point()
    de = distance_exponent(spec, centered_word([0] * 17))
    assert de == DistanceExponent("at_least", 9)


def test_exact_zero_at_origin():
    spec = single_point()
    bits = [0] * 9
    bits[4] = 1
    assert distance_exponent(spec, centered_word(bits)) == DistanceExponent("exact", 0)


def test_golden_mean_11_at_origin():
    spec = golden_mean()
    bits = [0] * 9
    bits[4] = 1
    bits[5] = 1  # x_0 x_1 = 11
    de = distance_exponent(spec, centered_word(bits))
    assert de == DistanceExponent("exact", 1)


def test_one_sided_prefix_exponent():
    spec = single_point(sided="one")
    w = Pattern.from_word([0, 0, 1, 0])
    de = distance_exponent(spec, w)
    assert de == DistanceExponent("exact", 3)
    w2 = Pattern.from_word([1, 0, 0, 0])
    assert distance_exponent(spec, w2) == DistanceExponent("exact", 1)


# -- eval_truncated ------------------------------------------------------------

def test_eval_admissible_is_zero():
    spec, seq = sp_thm34()
    pot = TruncatedPotential(seq, spec, radius=4)
    assert eval_truncated(pot, centered_word([0] * 9)) == 0.0


def test_eval_exact_zero_is_minus_a0():
    spec, seq = sp_thm34()
    pot = TruncatedPotential(seq, spec, radius=4)
    bits = [0] * 9
    bits[4] = 1
    assert eval_truncated(pot, centered_word(bits)) == pytest.approx(-seq.value(0))


def test_eval_exact_3_thm34():
    spec, seq = sp_thm34()
    pot = TruncatedPotential(seq, spec, radius=4)
    bits = [0] * 9
    bits[4 + 3] = 1
    assert eval_truncated(pot, centered_word(bits)) == pytest.approx(-1.5, abs=1e-12)


def test_eval_radius_mismatch_error():
    spec, seq = sp_thm34()
    pot = TruncatedPotential(seq, spec, radius=4)
    with pytest.raises(InputError):
        eval_truncated(pot, centered_word([0] * 7))


def test_variation_bounded_by_sequence():
    # exhaustive perturbation: windows agreeing on StatBox(j) differ by at
    # most a_j; under the smallest-inadmissible-radius convention the sharp
    # variation is a_{j+1}, which meets a_j on plateaus (always at j = 0
    # since a_0 = a_1 by construction)
    spec, seq = sp_thm34()
    R = 3
    pot = TruncatedPotential(seq, spec, radius=R)
    windows = [centered_word(list(bits)) for bits in itertools.product((0, 1), repeat=7)]
    vals = {w: pot.eval(w) for w in windows}
    for j in range(R):
        agree_offsets = list(stat_box(j).offsets())
        worst = 0.0
        for w1 in windows:
            for w2 in windows:
                if w1.restrict(agree_offsets) == w2.restrict(agree_offsets):
                    worst = max(worst, abs(vals[w1] - vals[w2]))
        assert worst <= seq.value(j) + 1e-12
        assert worst == pytest.approx(seq.value(j + 1), abs=1e-12)
    # equality with a_j itself is achieved at j = 0
    assert seq.value(1) == seq.value(0)


def test_monotone_truncation():
    spec, seq = sp_thm34()
    p3 = TruncatedPotential(seq, spec, radius=3)
    p5 = TruncatedPotential(seq, spec, radius=5)
    for bits in itertools.product((0, 1), repeat=11):
        w5 = centered_word(list(bits))
        w3 = w5.restrict(list(stat_box(3).offsets()))
        v5, v3 = p5.eval(w5), p3.eval(w3)
        assert v5 <= v3 + 1e-15
        assert v3 - v5 <= seq.value(3) + 1e-15


def test_word_value_anchored():
    spec, seq = sp_thm34()
    pot = TruncatedPotential(seq, spec, radius=4)
    assert pot.word_value((0, 0, 0, 0)) == 0.0
    assert pot.word_value((1, 0, 0, 0)) == pytest.approx(-seq.value(1))
    assert pot.word_value((0, 0, 1, 0)) == pytest.approx(-seq.value(3))


# -- generate_interaction --------------------------------------------------------

def test_interaction_values_nonpositive():
    spec, seq = sp_thm34()
    fam = generate_interaction(seq, spec, n_max=32)
    assert (fam.values <= 1e-15).all()


def test_interaction_norm_example():
    spec, seq = sp_thm34()
    fam = generate_interaction(seq, spec, n_max=8)
    # a_3 - a_2 = 1.5 - 3.0
    assert fam.values[2] == pytest.approx(-1.5, abs=1e-12)
    assert fam.norms[2] == pytest.approx(1.5, abs=1e-12)
    bits = [0] * 5
    bits[2 + 2] = 1
    assert fam.box_value(2, centered_word(bits)) == pytest.approx(-1.5)
    assert fam.box_value(2, centered_word([0] * 5)) == 0.0


def test_interaction_first_level_golden_mean():
    spec = golden_mean()
    table = complexity_table(spec, [1, 2, 4, 8])
    seq = build_thm34_sequence(table, h_ref=GOLDEN_H, i_max=3)
    fam = generate_interaction(seq, spec, n_max=8)
    # both single symbols are admissible, so the level-0 box carries no norm
    assert fam.n_star == 1
    assert fam.norms[0] == 0.0
    # a_2 = a_1 inside the i=0 dyadic range, so the first live norm is at n=2
    assert fam.norms[1] == 0.0
    assert fam.norms[2] > 0.0


def test_interaction_telescoping():
    spec, seq = sp_thm34()
    n_max = 6
    fam = generate_interaction(seq, spec, n_max=n_max)
    for j in (0, 2, 4):
        bits = [0] * (2 * n_max + 1)
        bits[n_max + j] = 1
        window = centered_word(bits)
        expected = seq.value(n_max + 1) - seq.value(j)
        assert fam.origin_sum(window) == pytest.approx(expected, abs=1e-12)


def test_interaction_b_converges_s_diverges_trend():
    spec, seq = sp_thm34(i_max=6)
    fam = generate_interaction(seq, spec, n_max=4000)
    b = fam.b_partial
    s = fam.s_partial
    # the volume-normalized sum telescopes: flat away from dyadic boundaries
    assert (np.diff(b[3000:]) == 0).all()
    assert b[-1] == pytest.approx(seq.value(0) - seq.value(4001), abs=1e-12)
    # summable-norm partial sums keep climbing across dyadic boundaries
    assert s[-1] > 2 * s[64]


# -- replacement_gain --------------------------------------------------------------

def _sp_gain_setup():
    spec, seq = sp_thm34()
    R = 3
    pot = TruncatedPotential(seq, spec, radius=R)
    # x all zero on [-9, 9] except a 1 at the origin
    cells = {(k,): 0 for k in range(-9, 10)}
    cells[(0,)] = 1
    x = Pattern(cells)
    W = Pattern({(0,): 1})
    Wp = Pattern({(0,): 0})
    shifts = [(k,) for k in range(-3, 4)]
    return pot, x, W, Wp, shifts


def test_replacement_identity_is_zero():
    pot, x, W, _, shifts = _sp_gain_setup()
    assert replacement_gain(pot, x, W, W, shifts) == 0.0


def test_replacement_removing_defect_gains():
    pot, x, W, Wp, shifts = _sp_gain_setup()
    gain = replacement_gain(pot, x, W, Wp, shifts)
    # removing the only defect erases every penalty seen from the shifts
    expected = sum(pot.sequence.value(abs(k)) for k in range(-3, 4))
    assert gain == pytest.approx(expected, abs=1e-12)
    assert gain > 0


def test_replacement_antisymmetric():
    pot, x, W, Wp, shifts = _sp_gain_setup()
    y_cells = x.cells()
    y_cells[(0,)] = 0
    y = Pattern(y_cells)
    g1 = replacement_gain(pot, x, W, Wp, shifts)
    g2 = replacement_gain(pot, y, Wp, W, shifts)
    assert g1 == pytest.approx(-g2, abs=1e-12)


def test_replacement_shape_mismatch():
    pot, x, W, _, shifts = _sp_gain_setup()
    bad = Pattern({(1,): 0})
    with pytest.raises(InputError):
        replacement_gain(pot, x, W, bad, shifts)
