import pytest

from freezeshift.subshift import (
    SFT,
    Alphabet,
    FullShift,
    Pattern,
    SinglePoint,
    SubshiftSpec,
    Substitution,
)

BINARY = Alphabet(["0", "1"])


def golden_mean(sided="two"):
    forbid = Pattern({(0,): 1, (1,): 1})
    return SubshiftSpec(BINARY, 1, SFT((forbid,)), sided=sided)


def single_point(d=1, sided="two"):
    return SubshiftSpec(BINARY, d, SinglePoint(0), sided=sided)


def thue_morse(sided="two"):
    rules = (
        Pattern({(0,): 0, (1,): 1}),  # 0 -> 01
        Pattern({(0,): 1, (1,): 0}),  # 1 -> 10
    )
    return SubshiftSpec(BINARY, 1, Substitution((2,), rules), sided=sided)


def hard_squares():
    horiz = Pattern({(0, 0): 1, (0, 1): 1})
    vert = Pattern({(0, 0): 1, (1, 0): 1})
    return SubshiftSpec(BINARY, 2, SFT((horiz, vert)))


def table_2d():
    # 2d analogue of the Thue-Morse rule on a 2x2 box; primitive.
    r0 = Pattern({(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0})
    r1 = Pattern({(0, 0): 1, (0, 1): 0, (1, 0): 0, (1, 1): 1})
    return SubshiftSpec(BINARY, 2, Substitution((2, 2), (r0, r1)))


def full_zero():
    return SubshiftSpec(BINARY, 1, FullShift((0,)))


@pytest.fixture
def gm():
    return golden_mean()


@pytest.fixture
def gm_one_sided():
    return golden_mean(sided="one")


@pytest.fixture
def sp():
    return single_point()


@pytest.fixture
def sp_one_sided():
    return single_point(sided="one")


@pytest.fixture
def tm():
    return thue_morse()


@pytest.fixture
def hs():
    return hard_squares()
