"""
Tests for performance metrics
"""
import numpy as np
import pandas as pd
import pytest

from app.core.exceptions import InvalidArgumentError
from app.metrics import (
    EquityCurve,
    equity_frame,
    hit_rate,
    max_drawdown,
    metric_report,
    sharpe,
    sortino,
    total_return,
)


def brute_force_drawdown(values):
    worst = 0.0
    for i in range(len(values)):
        for j in range(i, len(values)):
            worst = max(worst, (values[i] - values[j]) / values[i])
    return 100.0 * worst


class TestEquityCurve:
    """Test equity accumulation"""

    def test_values(self):
        """e_t = e_0 exp(cumulative return)"""
        curve = EquityCurve(np.array([0.01, -0.02]), initial_capital=1000.0)
        np.testing.assert_allclose(curve.values, [1000.0, 1000.0 * np.exp(0.01), 1000.0 * np.exp(-0.01)])
        assert len(curve) == 3

    def test_from_values(self):
        """Curves can be built from equity levels"""
        curve = EquityCurve.from_values([100.0, 110.0, 99.0])
        np.testing.assert_allclose(curve.values, [100.0, 110.0, 99.0])

    def test_invalid(self):
        """Returns must be finite and capital positive"""
        with pytest.raises(InvalidArgumentError):
            EquityCurve(np.array([np.inf]))
        with pytest.raises(InvalidArgumentError):
            EquityCurve(np.array([0.1]), initial_capital=0.0)
        with pytest.raises(InvalidArgumentError):
            EquityCurve.from_values([100.0, -1.0])


class TestTotalReturn:
    """Test total return"""

    def test_zero(self):
        """Zero returns earn nothing"""
        assert total_return(EquityCurve(np.zeros(5))) == 0.0

    def test_two_steps(self):
        """Two steps of +0.001 give 100 (e^0.002 - 1)"""
        value = total_return(EquityCurve(np.array([0.001, 0.001])))
        assert value == pytest.approx(100.0 * np.expm1(0.002), rel=1e-12)
        assert value == pytest.approx(0.2002, abs=1e-4)


class TestRatios:
    """Test Sharpe and Sortino ratios"""

    def test_sharpe_symmetric(self):
        """Mean zero gives Sharpe zero"""
        assert sharpe([0.01, -0.01]) == 0.0

    def test_sharpe_undefined(self):
        """Zero variance or a single return is undefined"""
        assert sharpe([0.01, 0.01, 0.01]) is None
        assert sharpe([0.01]) is None
        assert sharpe([]) is None

    def test_sharpe_direct(self, rng):
        """Matches a two-pass mean and population deviation"""
        returns = rng.normal(0.001, 0.01, size=500)
        mean = sum(returns) / len(returns)
        sigma = np.sqrt(sum((r - mean) ** 2 for r in returns) / len(returns))
        assert sharpe(returns) == pytest.approx(mean / sigma, rel=1e-10)

    def test_sortino_worked_example(self):
        """mean -0.00667 over downside deviation 0.01"""
        assert sortino([0.02, -0.01, -0.03]) == pytest.approx(-2.0 / 3.0, rel=1e-9)

    def test_sortino_undefined(self):
        """Equal negative returns or no negative return is undefined"""
        assert sortino([-0.01, -0.01]) is None
        assert sortino([0.01, 0.02]) is None

    def test_same_sign(self, rng):
        """Sharpe and Sortino share the sign of the mean"""
        for _ in range(20):
            returns = rng.normal(0.0, 0.01, size=30)
            assert np.sign(sharpe(returns)) == np.sign(sortino(returns)) == np.sign(returns.mean())

    def test_scale_invariance(self, rng):
        """Positive rescaling leaves both ratios unchanged"""
        returns = rng.normal(0.0005, 0.01, size=100)
        assert sharpe(3.7 * returns) == pytest.approx(sharpe(returns), rel=1e-10)
        assert sortino(3.7 * returns) == pytest.approx(sortino(returns), rel=1e-10)


class TestMaxDrawdown:
    """Test maximum drawdown"""

    def test_monotone(self):
        """Nondecreasing equity has no drawdown"""
        assert max_drawdown(EquityCurve.from_values([100.0, 100.0, 105.0, 120.0])) == 0.0

    def test_worked_example(self):
        """100, 110, 99, 120: peak 110, trough 99"""
        curve = EquityCurve.from_values([100.0, 110.0, 99.0, 120.0])
        assert max_drawdown(curve) == pytest.approx(10.0, rel=1e-9)

    def test_single_point(self):
        """A lone value has no interval"""
        assert max_drawdown(EquityCurve(np.array([]))) == 0.0

    def test_brute_force(self, rng):
        """Agrees with a scan over all peak/trough pairs"""
        for _ in range(200):
            length = int(rng.integers(1, 60))
            curve = EquityCurve(rng.normal(0.0, 0.02, size=length))
            value = max_drawdown(curve)
            assert value == pytest.approx(brute_force_drawdown(curve.values), abs=1e-9)
            assert 0.0 <= value < 100.0

    def test_zero_steps_appended(self, rng):
        """Appending zero returns changes nothing"""
        returns = rng.normal(0.0, 0.01, size=40)
        padded = np.concatenate([returns, np.zeros(10)])
        assert max_drawdown(EquityCurve(padded)) == pytest.approx(max_drawdown(EquityCurve(returns)))
        assert total_return(EquityCurve(padded)) == pytest.approx(total_return(EquityCurve(returns)))
        assert hit_rate(padded) == hit_rate(returns)


class TestHitRate:
    """Test hit rate"""

    def test_counting(self):
        """Share of profitable steps"""
        assert hit_rate([1.0, -1.0, 1.0, 1.0]) == 75.0
        assert hit_rate([0.5, 0.1]) == 100.0

    def test_zeros_excluded(self):
        """Zero rewards are neither hits nor misses"""
        assert hit_rate([1.0, 0.0, -1.0]) == 50.0
        assert hit_rate([0.0, 0.0]) is None

    def test_empty(self):
        """An empty sequence is an error"""
        with pytest.raises(InvalidArgumentError):
            hit_rate([])


class TestReport:
    """Test the assembled report and equity export"""

    def test_metric_report(self):
        """All five metrics plus accounting fields"""
        curve = EquityCurve(np.array([0.02, -0.01, -0.03]), initial_capital=1000.0)
        report = metric_report(curve, {"split": "test"})

        # Check result
        assert report.steps == 3
        assert report.sortino == pytest.approx(-2.0 / 3.0, rel=1e-9)
        assert report.hit_rate_pct == pytest.approx(100.0 / 3.0)
        assert report.final_equity == pytest.approx(1000.0 * np.exp(-0.02))
        assert report.metadata == {"split": "test"}

    def test_empty_report(self):
        """A curve without steps reports nulls"""
        report = metric_report(EquityCurve(np.array([])))
        assert report.total_return_pct == 0.0
        assert report.sharpe is None
        assert report.hit_rate_pct is None

    def test_equity_frame(self):
        """One row per equity value"""
        curve = EquityCurve(np.array([0.01, 0.02]))
        stamps = pd.date_range("2019-10-01T00:00:00Z", periods=3, freq="min")
        frame = equity_frame(curve, stamps)
        assert list(frame.columns) == ["timestamp", "equity"]
        assert frame["timestamp"].iloc[2] == "2019-10-01T00:02:00Z"
        np.testing.assert_allclose(frame["equity"], curve.values)
        with pytest.raises(InvalidArgumentError):
            equity_frame(curve, stamps[:2])
