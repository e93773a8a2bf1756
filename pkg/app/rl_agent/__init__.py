"""
Deep Q-learning agent
"""
from app.rl_agent.dqn import (
    DQNTrainer,
    EpsilonSchedule,
    bellman_targets,
    greedy_rollout,
    run_episode,
    select_action,
    train_step,
)
from app.rl_agent.optimizer import AdamState, adam_step
from app.rl_agent.replay import Action, Batch, Experience, ReplayBuffer

__all__ = [
    "Action",
    "AdamState",
    "Batch",
    "DQNTrainer",
    "EpsilonSchedule",
    "Experience",
    "ReplayBuffer",
    "adam_step",
    "bellman_targets",
    "greedy_rollout",
    "run_episode",
    "select_action",
    "train_step",
]
