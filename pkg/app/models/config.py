"""
Run configuration models
"""
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator

from app.core.config import settings
from app.core.exceptions import InvalidArgumentError
from app.models.market import DEFAULT_CURRENCIES, DEFAULT_SYMBOLS, SynthKind
from app.utils.yaml_utils import load_yaml

OHLC_FEATURES = 4
ACTIONS = 2


class ExtractorKind(str, Enum):
    """Feature extraction layer of the agent"""
    FMGTN = "fmgtn"
    GMGTN = "gmgtn"
    TTNN = "ttnn"


class TargetMode(str, Enum):
    """Bellman target variant"""
    PAPER_LITERAL = "paper-literal"
    DECOUPLED = "decoupled"


class SynthSpec(BaseModel):
    """Synthetic price generator parameters"""
    kind: SynthKind = Field(..., description="momentum, alternating or random-walk")
    length: int = Field(2000, ge=2, description="Number of price rows per symbol")
    seed: Optional[int] = Field(None, description="Generator seed; the run seed when unset")
    noise: float = Field(0.0, ge=0.0, description="Per-slot noise, in units of magnitude")
    magnitude: float = Field(0.001, gt=0.0, description="Log-return size of one move")
    persistence: float = Field(0.9, ge=0.0, le=1.0, description="Momentum sign persistence")
    start: str = Field("2019-10-01T00:00:00Z", description="First timestamp (UTC)")


class DataSourceConfig(BaseModel):
    """Price data source: a CSV file or a synthetic generator"""
    csv_path: Optional[Path] = Field(None, description="Long-format price CSV")
    synthetic: Optional[SynthSpec] = Field(None, description="Synthetic generator spec")
    max_fill_fraction: float = Field(0.05, ge=0.0, le=1.0, description="Abort when more rows are forward-filled")

    @model_validator(mode="after")
    def check_source(self) -> "DataSourceConfig":
        if (self.csv_path is None) == (self.synthetic is None):
            raise ValueError("exactly one of csv_path and synthetic must be given")
        if self.csv_path is not None and not self.csv_path.is_file():
            raise ValueError(f"csv_path: file not found: {self.csv_path}")
        return self


class ArchitectureConfig(BaseModel):
    """Q-network architecture"""
    extractor: ExtractorKind = Field(ExtractorKind.FMGTN, description="fmgtn, gmgtn or ttnn")
    hidden_features: int = Field(16, ge=1, description="J_1, feature-extraction units")
    tt_output_modes: List[int] = Field(default_factory=lambda: [3, 3, 3], description="Output factorization of the TT-dense layer")
    tt_ranks: List[int] = Field(default_factory=lambda: [1, 2, 2, 1], description="TT-ranks of the TT-dense layer")

    @property
    def hidden_units(self) -> int:
        return math.prod(self.tt_output_modes)

    @model_validator(mode="after")
    def check_tt(self) -> "ArchitectureConfig":
        if len(self.tt_output_modes) != 3:
            raise ValueError(
                f"tt_output_modes needs one entry per input mode (J_1, I_1, I_2), got {len(self.tt_output_modes)}"
            )
        if len(self.tt_ranks) != len(self.tt_output_modes) + 1:
            raise ValueError(
                f"tt_ranks needs {len(self.tt_output_modes) + 1} entries for {len(self.tt_output_modes)} output modes"
            )
        if self.tt_ranks[0] != 1 or self.tt_ranks[-1] != 1 or min(self.tt_ranks) < 1:
            raise ValueError(f"tt_ranks must be positive with unit boundaries, got {self.tt_ranks}")
        if min(self.tt_output_modes) < 1:
            raise ValueError("tt_output_modes must be positive")
        return self


class TrainConfig(BaseModel):
    """Double deep Q-learning settings"""
    episodes: int = Field(15, ge=1)
    batch_size: int = Field(64, ge=1)
    gamma: float = Field(0.9, ge=0.0, lt=1.0, description="Discount factor")
    epsilon_start: float = Field(1.0, ge=0.0, le=1.0)
    epsilon_end: float = Field(0.1, ge=0.0, le=1.0)
    epsilon_decay_fraction: float = Field(0.8, gt=0.0, le=1.0, description="Share of all env steps over which epsilon decays")
    target_mode: TargetMode = Field(TargetMode.PAPER_LITERAL)
    target_update_steps: Optional[int] = Field(None, ge=1, description="Extra hard copy every N gradient steps")
    buffer_capacity: int = Field(10_000, ge=1)
    learning_rate: float = Field(2e-4, gt=0.0)
    beta1: float = Field(0.9, ge=0.0, lt=1.0)
    beta2: float = Field(0.999, ge=0.0, lt=1.0)
    adam_epsilon: float = Field(1e-8, gt=0.0)
    train_fraction: float = Field(7 / 9, gt=0.0, lt=1.0, description="Chronological train share of the stream")
    checkpoint_every: int = Field(5, ge=0, description="Checkpoint interval in episodes; 0 keeps only the final one")
    state_scale: float = Field(1.0, gt=0.0, description="Multiplier on state tensors; rewards stay raw")
    seed: int = Field(0, description="Copied from the run seed")


class RunConfig(BaseModel):
    """Complete description of one run"""
    data: DataSourceConfig
    currencies: List[str] = Field(default_factory=lambda: list(DEFAULT_CURRENCIES), description="Carry-graph node order")
    symbols: List[str] = Field(default_factory=lambda: list(DEFAULT_SYMBOLS), description="Price symbol per currency slot")
    target_pair: str = Field("EURUSD", description="Pair traded by the agent")
    carry_table: Optional[Path] = Field(None, description="Carry rate table (YAML)")
    normalize_carry: bool = False
    rescale_carry: bool = False
    window: int = Field(30, ge=1, description="I_1, lags per state")
    architecture: ArchitectureConfig = Field(default_factory=ArchitectureConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    initial_capital: float = Field(1000.0, gt=0.0)
    output_dir: Path = Field(Path(settings.DEFAULT_OUTPUT_DIR))
    seed: int = Field(..., description="Single source of all randomness")

    @field_validator("currencies", "symbols")
    @classmethod
    def upper_codes(cls, values: List[str]) -> List[str]:
        values = [v.upper() for v in values]
        if len(set(values)) != len(values):
            raise ValueError("entries must be unique")
        return values

    @field_validator("target_pair")
    @classmethod
    def upper_target(cls, value: str) -> str:
        return value.upper()

    @field_validator("carry_table")
    @classmethod
    def carry_table_exists(cls, value: Optional[Path]) -> Optional[Path]:
        if value is not None and not value.is_file():
            raise ValueError(f"file not found: {value}")
        return value

    @model_validator(mode="after")
    def check_consistency(self) -> "RunConfig":
        if len(self.symbols) != len(self.currencies):
            raise ValueError(f"{len(self.symbols)} symbols for {len(self.currencies)} currencies")
        if any(len(symbol) != 6 for symbol in self.symbols):
            raise ValueError("symbols must be 6-letter pair codes")
        if self.target_pair not in self.symbols:
            raise ValueError(f"target_pair {self.target_pair} is not one of symbols")
        if self.carry_table is None and self.architecture.extractor != ExtractorKind.TTNN:
            raise ValueError("carry_table is required unless architecture.extractor is 'ttnn'")
        self.train.seed = self.seed
        return self

    @property
    def input_shape(self) -> tuple:
        """(J_0, I_1, I_2) of one state tensor"""
        return (OHLC_FEATURES, self.window, len(self.symbols))

    @classmethod
    def from_document(cls, document: Dict[str, Any]) -> "RunConfig":
        """Build from a config document or from a run manifest carrying one under ``config``"""
        if isinstance(document, dict) and document.get("format") == "mgtn-run-manifest":
            document = document["config"]
        return cls.model_validate(document)

    @classmethod
    def from_yaml(cls, path: str) -> "RunConfig":
        try:
            document = load_yaml(path)
        except yaml.YAMLError as e:
            raise InvalidArgumentError(f"cannot parse config {path}: {e}") from e
        return cls.from_document(document)
