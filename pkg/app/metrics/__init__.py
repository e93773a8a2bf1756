"""
Financial performance metrics
"""
from app.metrics.performance import (
    EquityCurve,
    equity_frame,
    hit_rate,
    max_drawdown,
    metric_report,
    sharpe,
    sortino,
    total_return,
)

__all__ = [
    "EquityCurve",
    "equity_frame",
    "hit_rate",
    "max_drawdown",
    "metric_report",
    "sharpe",
    "sortino",
    "total_return",
]
