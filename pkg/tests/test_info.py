import math
import random
from fractions import Fraction as F

import pytest

from exactchain.errors import InvalidDistributionError
from exactchain.info import entropy, mutual_information


def test_entropy_point_mass():
    assert entropy({"x": F(1)}) == 0.0


def test_entropy_uniform():
    for n in (2, 4, 8):
        dist = {i: F(1, n) for i in range(n)}
        assert entropy(dist) == pytest.approx(math.log2(n), rel=1e-12)


def test_entropy_quarter_three_quarters():
    expected = -0.25 * math.log2(0.25) - 0.75 * math.log2(0.75)
    assert entropy({"a": F(1, 4), "b": F(3, 4)}) == pytest.approx(expected, rel=1e-12)
    assert entropy({"a": F(1, 4), "b": F(3, 4)}) == pytest.approx(0.811278124459133)


def test_entropy_validates():
    with pytest.raises(InvalidDistributionError):
        entropy({"a": F(1, 2)})
    with pytest.raises(InvalidDistributionError):
        entropy({"a": F(3, 2), "b": F(-1, 2)})
    with pytest.raises(InvalidDistributionError):
        entropy({"a": math.nan})


def test_mi_product_joint_is_zero():
    px = {"a": F(1, 3), "b": F(2, 3)}
    py = {0: F(1, 4), 1: F(3, 4)}
    joint = {(x, y): px[x] * py[y] for x in px for y in py}
    assert abs(mutual_information(joint)) <= 1e-12


def test_mi_perfectly_correlated_uniform():
    for n in (2, 3, 5):
        joint = {(i, i): F(1, n) for i in range(n)}
        assert mutual_information(joint) == pytest.approx(math.log2(n), rel=1e-12)


def test_mi_crowds_conditional_joint():
    # Hand summation over the 2x2 joint {5/12 diagonal, 1/12 off-diagonal}:
    # marginals are uniform 1/2.
    joint = {
        ("i1", "i1"): F(5, 12), ("i1", "i2"): F(1, 12),
        ("i2", "i1"): F(1, 12), ("i2", "i2"): F(5, 12),
    }
    byhand = 2 * (5 / 12) * math.log2((5 / 12) / (1 / 4)) + 2 * (1 / 12) * math.log2(
        (1 / 12) / (1 / 4)
    )
    value = mutual_information(joint)
    assert value == pytest.approx(byhand, rel=1e-12)
    assert value == pytest.approx(0.3499775783516, abs=1e-10)
    assert value <= (5 / 6) * math.log2(2)


def test_mi_zero_cells_contribute_nothing():
    joint = {("a", 0): F(1, 2), ("a", 1): F(0), ("b", 1): F(1, 2)}
    assert mutual_information(joint) == pytest.approx(1.0)


def test_mi_symmetry_and_bounds_on_random_joints():
    rng = random.Random(9)
    for _ in range(40):
        nx, ny = rng.randint(1, 4), rng.randint(1, 4)
        weights = {
            (x, y): F(rng.randint(0, 9)) for x in range(nx) for y in range(ny)
        }
        total = sum(weights.values())
        if total == 0:
            continue
        joint = {k: v / total for k, v in weights.items()}
        mi = mutual_information(joint)
        transposed = {(y, x): v for (x, y), v in joint.items()}
        assert mi == pytest.approx(mutual_information(transposed), abs=1e-12)

        px: dict = {}
        py: dict = {}
        for (x, y), v in joint.items():
            px[x] = px.get(x, F(0)) + v
            py[y] = py.get(y, F(0)) + v
        assert -1e-12 <= mi <= min(entropy(px), entropy(py)) + 1e-12


def test_mi_validates():
    with pytest.raises(InvalidDistributionError):
        mutual_information({("a", "b"): F(1, 2)})


def test_float_masses_accepted_with_tolerance():
    assert entropy({"a": 0.5, "b": 0.5 + 1e-12}) == pytest.approx(1.0)
    with pytest.raises(InvalidDistributionError):
        entropy({"a": 0.5, "b": 0.4})
