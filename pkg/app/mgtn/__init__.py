"""
Multi-graph tensor network layers and the agent Q-network
"""
from app.mgtn.checkpoint import load_checkpoint, read_checkpoint, save_checkpoint
from app.mgtn.layers import Activation, FMGTNLayer, GMGTNLayer, fmgtn_forward, gmgtn_forward
from app.mgtn.network import (
    AgentNetwork,
    ForwardCache,
    GradientSet,
    agent_backward,
    agent_forward,
    init_params,
    param_breakdown,
    param_count,
    parameter_shapes,
)

__all__ = [
    "Activation",
    "AgentNetwork",
    "FMGTNLayer",
    "ForwardCache",
    "GMGTNLayer",
    "GradientSet",
    "agent_backward",
    "agent_forward",
    "fmgtn_forward",
    "gmgtn_forward",
    "init_params",
    "load_checkpoint",
    "param_breakdown",
    "param_count",
    "parameter_shapes",
    "read_checkpoint",
    "save_checkpoint",
]
