"""
Parameter checkpoints

A checkpoint is a YAML document::

    format: mgtn-checkpoint
    version: 1
    architecture: {extractor, hidden_features, tt_output_modes, tt_ranks, input_shape}
    parameters:
    - name: extractor.weight
      shape: [16, 4]
      data: [...]        # Little-Endian flat values

Floats are written with their shortest round-trip repr, so identical
parameters always give identical bytes.
"""
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np

from app.core.config import settings
from app.core.exceptions import CheckpointError
from app.core.logging import logger
from app.mgtn.network import AgentNetwork
from app.models.config import ArchitectureConfig
from app.tensor_core import le_flatten, le_reshape
from app.utils.yaml_utils import load_yaml, save_yaml

CHECKPOINT_FORMAT = "mgtn-checkpoint"

PathLike = Union[str, Path]


def checkpoint_document(net: AgentNetwork) -> Dict[str, Any]:
    architecture = net.architecture.model_dump(mode="json")
    architecture["input_shape"] = list(net.input_shape)
    return {
        "format": CHECKPOINT_FORMAT,
        "version": settings.CHECKPOINT_FORMAT_VERSION,
        "architecture": architecture,
        "parameters": [
            {
                "name": name,
                "shape": [int(size) for size in array.shape],
                "data": [float(value) for value in le_flatten(array)],
            }
            for name, array in net.params.items()
        ],
    }


def save_checkpoint(net: AgentNetwork, path: PathLike) -> Path:
    """
    Write every parameter array of ``net`` to ``path``

    Returns:
        The checkpoint path
    """
    path = Path(path)
    save_yaml(checkpoint_document(net), str(path))
    logger.info(f"Saved checkpoint {path} ({net.num_parameters()} parameters)")
    return path


def read_checkpoint(path: PathLike) -> Tuple[ArchitectureConfig, Tuple[int, ...], Dict[str, np.ndarray]]:
    """
    Parse a checkpoint file

    Returns:
        (architecture, input shape, name -> array)
    """
    try:
        document = load_yaml(str(path))
    except FileNotFoundError:
        raise
    except Exception as e:
        raise CheckpointError(f"cannot parse checkpoint {path}: {e}") from e

    if not isinstance(document, dict) or document.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path} is not an {CHECKPOINT_FORMAT} document")
    if document.get("version") != settings.CHECKPOINT_FORMAT_VERSION:
        raise CheckpointError(
            f"{path} has checkpoint version {document.get('version')}, "
            f"expected {settings.CHECKPOINT_FORMAT_VERSION}"
        )
    try:
        architecture_doc = dict(document["architecture"])
        input_shape = tuple(int(size) for size in architecture_doc.pop("input_shape"))
        architecture = ArchitectureConfig.model_validate(architecture_doc)
        entries: List[Dict[str, Any]] = document["parameters"]
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointError(f"{path} has a malformed architecture or parameter section: {e}") from e

    arrays: Dict[str, np.ndarray] = {}
    for entry in entries:
        name = entry.get("name")
        shape = tuple(int(size) for size in entry.get("shape", []))
        data = np.asarray(entry.get("data", []), dtype=np.float64)
        if data.size != int(np.prod(shape)):
            raise CheckpointError(f"array {name}: {data.size} values for shape {shape}")
        if name in arrays:
            raise CheckpointError(f"array {name} appears twice")
        arrays[name] = le_reshape(data, shape)
    return architecture, input_shape, arrays


def load_checkpoint(net: AgentNetwork, path: PathLike) -> None:
    """
    Load a checkpoint into ``net``

    Raises:
        CheckpointError: naming the first architecture field that differs,
            or the first array that is missing, unexpected or of the wrong shape
    """
    architecture, input_shape, arrays = read_checkpoint(path)
    saved = architecture.model_dump(mode="json")
    expected = net.architecture.model_dump(mode="json")
    for field, value in expected.items():
        if saved.get(field) != value:
            raise CheckpointError(
                f"checkpoint {path} has architecture {field}={saved.get(field)}, network expects {value}"
            )
    if input_shape != tuple(net.input_shape):
        raise CheckpointError(
            f"checkpoint {path} has input_shape={list(input_shape)}, network expects {list(net.input_shape)}"
        )
    for name, target in net.params.items():
        if name not in arrays:
            raise CheckpointError(f"checkpoint {path} is missing array {name}")
        if arrays[name].shape != target.shape:
            raise CheckpointError(
                f"array {name} has shape {arrays[name].shape} in {path}, network expects {target.shape}"
            )
    unexpected = [name for name in arrays if name not in net.params]
    if unexpected:
        raise CheckpointError(f"checkpoint {path} has unexpected array {unexpected[0]}")
    net.load_state_dict(arrays)
    logger.info(f"Loaded checkpoint {path}")
