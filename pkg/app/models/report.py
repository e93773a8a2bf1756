"""
Report and manifest models
"""
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class EpisodeReport(BaseModel):
    """Per-episode training totals"""
    episode: int = Field(..., description="1-based episode index")
    steps: int = Field(..., description="Environment steps taken")
    gradient_steps: int = Field(0, description="Optimizer updates applied")
    cumulative_reward: float = Field(..., description="Sum of rewards emitted by the environment")
    mean_loss: Optional[float] = Field(None, description="Mean TD loss; null before the buffer warmed up")
    epsilon: float = Field(..., description="Exploration rate at episode end")


class MetricReport(BaseModel):
    """The five performance metrics of a rollout; undefined values are null"""
    total_return_pct: float
    sharpe: Optional[float] = None
    sortino: Optional[float] = None
    max_drawdown_pct: float
    hit_rate_pct: Optional[float] = None
    steps: int
    initial_capital: float
    final_equity: float
    metadata: Dict[str, Any] = Field(default_factory=dict)


class RunManifest(BaseModel):
    """Everything needed to rerun a training run"""
    format: str = "mgtn-run-manifest"
    package_version: str
    code_version: str
    seed: int
    overrides: Dict[str, Any] = Field(default_factory=dict)
    config: Dict[str, Any]
    param_count: int
    episodes: List[EpisodeReport] = Field(default_factory=list)
    checkpoints: List[str] = Field(default_factory=list)
