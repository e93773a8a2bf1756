"""
Synthetic price files
"""
from pathlib import Path
from typing import Optional, Sequence

from app.core.logging import logger
from app.market_env import synth_series
from app.models.config import SynthSpec
from app.utils.file_utils import write_csv


class SynthService:
    """Service for writing synthetic prices in the price CSV format"""

    def synth(self, spec: SynthSpec, seed: int, out: Path, symbols: Optional[Sequence[str]] = None) -> Path:
        series = synth_series(
            spec.kind,
            spec.length,
            seed,
            noise=spec.noise,
            magnitude=spec.magnitude,
            persistence=spec.persistence,
            symbols=symbols,
            start=spec.start,
        )
        write_csv(series.to_long(), out)
        logger.info(f"Wrote {len(series)} synthetic {spec.kind.value} rows per symbol to {out}")
        return Path(out)
