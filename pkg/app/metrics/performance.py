"""
Performance metrics of a realized log-return sequence

Ratios are per step (not annualized) with population standard
deviations and a zero risk-free rate. Undefined values are ``None``.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np
import pandas as pd

from app.core.exceptions import InvalidArgumentError
from app.models.report import MetricReport


@dataclass(frozen=True)
class EquityCurve:
    """Equity e_t = e_0 * exp(sum_{k<=t} r_k) of an initial capital"""
    returns: np.ndarray
    initial_capital: float = 1000.0
    values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        returns = np.asarray(self.returns, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(returns)):
            raise InvalidArgumentError("returns must be finite")
        if self.initial_capital <= 0:
            raise InvalidArgumentError(f"initial capital must be positive, got {self.initial_capital}")
        values = self.initial_capital * np.exp(np.concatenate([[0.0], np.cumsum(returns)]))
        object.__setattr__(self, "returns", returns)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "EquityCurve":
        """Curve through given positive equity values"""
        values = np.asarray(values, dtype=np.float64)
        if values.size == 0 or np.any(values <= 0):
            raise InvalidArgumentError("equity values must be positive and non-empty")
        return cls(returns=np.diff(np.log(values)), initial_capital=float(values[0]))

    def __len__(self) -> int:
        return len(self.values)


def total_return(curve: EquityCurve) -> float:
    """100 * (e_T / e_0 - 1)"""
    return float(100.0 * np.expm1(curve.returns.sum()))


def sharpe(returns: Sequence[float]) -> Optional[float]:
    """mu / sigma; None with fewer than 2 returns or zero variance"""
    returns = np.asarray(returns, dtype=np.float64)
    if returns.size < 2:
        return None
    if np.ptp(returns) == 0:
        return None
    return float(returns.mean() / returns.std())


def sortino(returns: Sequence[float]) -> Optional[float]:
    """mu / sigma_d, sigma_d over the strictly negative returns; None when undefined"""
    returns = np.asarray(returns, dtype=np.float64)
    negatives = returns[returns < 0]
    if negatives.size == 0:
        return None
    # constant samples have zero deviation up to round-off
    if np.ptp(negatives) == 0:
        return None
    return float(returns.mean() / negatives.std())


def max_drawdown(curve: EquityCurve) -> float:
    """Largest peak-to-trough loss, in percent"""
    values = curve.values
    peaks = np.maximum.accumulate(values)
    return float(100.0 * np.max((peaks - values) / peaks))


def hit_rate(rewards: Sequence[float]) -> Optional[float]:
    """100 * #(r > 0) / #(r != 0); None if every reward is zero"""
    rewards = np.asarray(rewards, dtype=np.float64)
    if rewards.size == 0:
        raise InvalidArgumentError("hit rate needs at least one reward")
    resolved = np.count_nonzero(rewards)
    if resolved == 0:
        return None
    return float(100.0 * np.count_nonzero(rewards > 0) / resolved)


def metric_report(curve: EquityCurve, metadata: Optional[Dict[str, Any]] = None) -> MetricReport:
    return MetricReport(
        total_return_pct=total_return(curve),
        sharpe=sharpe(curve.returns),
        sortino=sortino(curve.returns),
        max_drawdown_pct=max_drawdown(curve),
        hit_rate_pct=hit_rate(curve.returns) if len(curve.returns) else None,
        steps=len(curve.returns),
        initial_capital=curve.initial_capital,
        final_equity=float(curve.values[-1]),
        metadata=metadata or {},
    )


def equity_frame(curve: EquityCurve, timestamps: Sequence) -> pd.DataFrame:
    """
    Two-column (timestamp, equity) frame

    ``timestamps`` holds one entry per equity value: the start of the curve
    followed by the time of every return.
    """
    if len(timestamps) != len(curve.values):
        raise InvalidArgumentError(f"{len(timestamps)} timestamps for {len(curve.values)} equity values")
    stamps = pd.DatetimeIndex(timestamps)
    return pd.DataFrame({
        "timestamp": stamps.strftime("%Y-%m-%dT%H:%M:%SZ"),
        "equity": curve.values,
    })
