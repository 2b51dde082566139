import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import simpson

from rflogit.bspline import eval_basis, make_basis
from rflogit.errors import InvalidArgumentError
from rflogit.metrics import McResult, aggregate, auc, imse
from rflogit.simgen import beta_true


def pair_count_auc(p, y):
    """O(n^2) oracle; exact rational value rounded once."""
    pos, neg = p[y == 1], p[y == 0]
    wins = sum(int(a > b) for a in pos for b in neg)
    ties = sum(int(a == b) for a in pos for b in neg)
    return (2 * wins + ties) / (2 * pos.size * neg.size)


class TestIMSE:
    def test_exact(self):
        b = make_basis((0.0, 1.0), 6)
        c = np.random.default_rng(1).standard_normal(6)
        assert imse(lambda t: eval_basis(b, t) @ c, c, b) < 1e-12

    def test_sin_vs_zero(self):
        b = make_basis((0.0, 1.0), 6)
        assert imse(beta_true, np.zeros(6), b) == pytest.approx(0.5, abs=1e-6)

    @staticmethod
    def _simpson_gap(M, c):
        b = make_basis((0.0, 1.0), M)
        t = np.linspace(0.0, 1.0, 100_001)
        ref = simpson((beta_true(t) - eval_basis(b, t) @ c) ** 2, x=t)
        return abs(imse(beta_true, c, b) - ref)

    def test_vs_simpson_near_truth(self):
        # estimates at the scale of the simulation errors
        rng = np.random.default_rng(3)
        for M in (5, 15, 22, 30, 40):
            c = np.sin(np.pi * np.linspace(0.0, 1.0, M)) + 0.1 * rng.standard_normal(M)
            assert self._simpson_gap(M, c) < 1e-6

    def test_vs_simpson_arbitrary(self):
        # unit-scale random coefficients make the integrand rough; the
        # trapezoid error at 1001 points is O(h^2) and can exceed 1e-6
        rng = np.random.default_rng(3)
        for M in (5, 15, 30):
            assert self._simpson_gap(M, rng.standard_normal(M)) < 1e-6

    def test_grid_floor(self):
        with pytest.raises(InvalidArgumentError):
            imse(beta_true, np.zeros(5), make_basis((0.0, 1.0), 5), grid_points=100)


class TestAUC:
    def test_perfect(self):
        assert auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0
        assert auc([0.9, 0.8, 0.2, 0.1], [0, 0, 1, 1]) == 0.0

    def test_all_ties(self):
        assert auc(np.full(10, 0.3), [0, 1] * 5) == 0.5

    def test_random_50(self):
        rng = np.random.default_rng(50)
        p = np.round(rng.random(50), 1)
        y = rng.integers(0, 2, 50)
        assert auc(p, y) == pair_count_auc(p, y)

    def test_pair_count_200_instances(self):
        rng = np.random.default_rng(200)
        for _ in range(200):
            n = int(rng.integers(2, 120))
            p = np.round(rng.random(n), int(rng.integers(1, 4)))
            y = rng.integers(0, 2, n)
            y[0], y[-1] = 0, 1
            assert auc(p, y) == pair_count_auc(p, y)

    def test_monotone_transform(self, rng):
        p = rng.random(80)
        y = rng.integers(0, 2, 80)
        y[:2] = [0, 1]
        assert auc(np.log(p) * 3 + 1, y) == auc(p, y)

    def test_complement(self, rng):
        p = rng.random(61)
        y = rng.integers(0, 2, 61)
        y[:2] = [0, 1]
        assert auc(p, y) + auc(p, 1 - y) == pytest.approx(1.0, abs=1e-15)

    def test_errors(self):
        with pytest.raises(InvalidArgumentError):
            auc([0.1, 0.2], [1, 1])
        with pytest.raises(InvalidArgumentError):
            auc([0.1, 0.2], [0, 2])
        with pytest.raises(InvalidArgumentError):
            auc([0.1, 0.2, 0.3], [0, 1])

    @given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 1)), min_size=2, max_size=40))
    def test_pair_count_property(self, rows):
        p = np.array([r[0] for r in rows], dtype=float)
        y = np.array([r[1] for r in rows])
        if y.min() == y.max():
            return
        assert auc(p, y) == pair_count_auc(p, y)


class TestAggregate:
    def test_small(self):
        assert aggregate([1, 2, 3]) == (2.0, 1.0)
        assert aggregate([4.5] * 7) == (4.5, 0.0)

    def test_normal_mad(self):
        v = np.random.default_rng(8).normal(2.0, 3.0, 10_000)
        _, mad = aggregate(v)
        assert abs(mad / (0.6745 * 3.0) - 1) < 0.03

    def test_empty(self):
        with pytest.raises(InvalidArgumentError):
            aggregate([])

    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50))
    def test_bounds(self, xs):
        med, mad = aggregate(xs)
        assert min(xs) <= med <= max(xs) and mad >= 0


class TestMcResult:
    def test_summary(self):
        r = McResult("fpca-ml", 0.1, imse=[0.1, 0.3, 0.2], auc=[0.8, 0.85, 0.9])
        row = r.summary_row()
        assert row["median_imse"] == pytest.approx(0.2)
        assert row["mad_imse"] == pytest.approx(0.1)
        assert row["median_auc"] == pytest.approx(0.85)
        assert row["method"] == "fpca-ml" and row["contamination"] == 0.1
