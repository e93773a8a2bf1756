"""
Human-readable summaries of checkpoints and carry tables
"""
import math
from pathlib import Path
from typing import Any, Dict, List

from app.core.exceptions import CheckpointError, GraphError
from app.graph import carry_graph, load_carry_table
from app.mgtn import param_breakdown, read_checkpoint
from app.mgtn.checkpoint import CHECKPOINT_FORMAT
from app.models.config import ExtractorKind
from app.utils.template_utils import render_template
from app.utils.yaml_utils import load_yaml


class InspectService:
    """Service for summarising checkpoint and carry-table files"""

    def inspect(self, path: Path) -> str:
        try:
            document = load_yaml(str(path))
        except FileNotFoundError:
            raise
        except Exception as e:
            raise CheckpointError(f"cannot parse {path}: {e}") from e
        if isinstance(document, dict) and document.get("format") == CHECKPOINT_FORMAT:
            return self.checkpoint_summary(path)
        return self.carry_summary(path)

    def checkpoint_context(self, path: Path) -> Dict[str, Any]:
        architecture, input_shape, arrays = read_checkpoint(path)
        rows = [
            {"name": name, "shape": "x".join(str(size) for size in array.shape), "size": array.size}
            for name, array in arrays.items()
        ]
        breakdown = param_breakdown(architecture, input_shape)
        total = sum(row["size"] for row in rows)
        if total != breakdown["total"]:
            raise CheckpointError(
                f"{path} holds {total} parameters, its architecture implies {breakdown['total']}"
            )
        graphs = 2
        hidden = architecture.hidden_features
        extractor_cost = (
            f"O(M J^2) = {graphs * hidden * hidden}"
            if architecture.extractor == ExtractorKind.GMGTN
            else f"O(J^2) = {hidden * hidden}"
        )
        return {
            "path": str(path),
            "extractor": architecture.extractor.value,
            "input_shape": "x".join(str(size) for size in input_shape),
            "tt_input_modes": "x".join(str(size) for size in (hidden,) + tuple(input_shape[1:])),
            "tt_output_modes": "x".join(str(size) for size in architecture.tt_output_modes),
            "tt_ranks": "-".join(str(rank) for rank in architecture.tt_ranks),
            "rows": rows,
            "total": total,
            "breakdown": breakdown,
            "extractor_cost": extractor_cost,
            "dense_input": math.prod((hidden,) + tuple(input_shape[1:])),
        }

    def checkpoint_summary(self, path: Path) -> str:
        return render_template("checkpoint_summary.txt.j2", self.checkpoint_context(path))

    def carry_context(self, path: Path) -> Dict[str, Any]:
        rates = load_carry_table(str(path))
        currencies: List[str] = []
        for symbol in rates:
            if len(symbol) != 6:
                raise GraphError(f"pair symbol {symbol} must have 6 letters")
            for code in (symbol[:3], symbol[3:]):
                if code not in currencies:
                    currencies.append(code)
        graph = carry_graph(rates, currencies)
        edges = [
            {"source": currencies[i], "target": currencies[j], "weight": weight}
            for i, j, weight in graph.edges(undirected=True)
        ]
        return {"path": str(path), "currencies": currencies, "pairs": len(rates), "edges": edges}

    def carry_summary(self, path: Path) -> str:
        return render_template("carry_summary.txt.j2", self.carry_context(path))
