"""
Deep Q-learning with a hard-copied target network

One gradient step per environment step once the buffer holds a batch; the
target network is refreshed by hard copy at the end of every episode (and,
optionally, every ``target_update_steps`` gradient steps).
"""
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from app.core.exceptions import InvalidArgumentError
from app.core.logging import logger
from app.market_env.env import TradingEnv
from app.mgtn.network import AgentNetwork, init_params
from app.models.config import TargetMode, TrainConfig
from app.models.report import EpisodeReport
from app.rl_agent.optimizer import AdamState, adam_step
from app.rl_agent.replay import Action, Batch, Experience, ReplayBuffer


@dataclass(frozen=True)
class EpsilonSchedule:
    """Linear decay from ``start`` to ``end`` over ``decay_steps`` env steps, then constant"""
    start: float
    end: float
    decay_steps: int

    def __post_init__(self) -> None:
        for name in ("start", "end"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InvalidArgumentError(f"epsilon {name} must lie in [0, 1]")
        if self.decay_steps < 1:
            raise InvalidArgumentError("epsilon decay needs at least one step")

    @classmethod
    def from_config(cls, config: TrainConfig, total_steps: int) -> "EpsilonSchedule":
        return cls(
            start=config.epsilon_start,
            end=config.epsilon_end,
            decay_steps=max(1, round(config.epsilon_decay_fraction * total_steps)),
        )

    def value(self, step: int) -> float:
        progress = min(step / self.decay_steps, 1.0)
        return self.start + (self.end - self.start) * progress


def select_action(net: AgentNetwork, state: np.ndarray, epsilon: float, rng: np.random.Generator) -> Action:
    """
    Epsilon-greedy action; greedy ties go to Buy
    """
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidArgumentError(f"epsilon must lie in [0, 1], got {epsilon}")
    if rng.random() < epsilon:
        return Action(int(rng.integers(len(Action))))
    q_values = net.q_values(np.asarray(state)[None])[0]
    # argmax returns the first maximum
    return Action(int(np.argmax(q_values)))


def bellman_targets(
    online: AgentNetwork,
    target: AgentNetwork,
    batch: Batch,
    gamma: float,
    mode: TargetMode = TargetMode.PAPER_LITERAL,
) -> np.ndarray:
    """
    Regression targets for a batch, treated as constants

    paper-literal: y = r + gamma * max_a' Q_target(s', a')
    decoupled: y = r + gamma * Q_target(s', argmax_a' Q_online(s', a'))
    Terminal transitions get y = r.
    """
    if len(batch) == 0:
        raise InvalidArgumentError("bellman_targets needs a non-empty batch")
    next_target_q = target.q_values(batch.next_states)
    if mode == TargetMode.DECOUPLED:
        greedy = np.argmax(online.q_values(batch.next_states), axis=1)
        bootstrap = next_target_q[np.arange(len(batch)), greedy]
    else:
        bootstrap = next_target_q.max(axis=1)
    return np.where(batch.terminals, batch.rewards, batch.rewards + gamma * bootstrap)


def train_step(
    online: AgentNetwork,
    target: AgentNetwork,
    buffer: ReplayBuffer,
    adam: AdamState,
    config: TrainConfig,
) -> float:
    """
    Sample a batch, regress Q(s, a) on the Bellman targets and apply one Adam update

    Returns:
        Mean squared TD error over the batch, before the update
    """
    batch = buffer.sample(config.batch_size)
    targets = bellman_targets(online, target, batch, config.gamma, config.target_mode)
    cache = online.forward(batch.states)
    rows = np.arange(len(batch))
    errors = cache.q_values[rows, batch.actions] - targets
    loss = float(np.mean(errors ** 2))

    grad_q = np.zeros_like(cache.q_values)
    grad_q[rows, batch.actions] = 2.0 * errors / len(batch)
    grads = online.backward(cache, grad_q)
    adam_step(adam, online.params, grads)
    online.mark_updated()
    return loss


def run_episode(
    env: TradingEnv,
    online: AgentNetwork,
    target: AgentNetwork,
    buffer: ReplayBuffer,
    adam: AdamState,
    config: TrainConfig,
    episode_index: int,
    schedule: Optional[EpsilonSchedule] = None,
    rng: Optional[np.random.Generator] = None,
    step_offset: int = 0,
) -> EpisodeReport:
    """
    Play one episode on ``env`` and learn from it

    Args:
        env: Training environment, reset here
        online: Network being trained
        target: Target network, hard-copied from ``online`` at episode end
        buffer: Replay buffer
        adam: Optimizer state of ``online``
        config: Training settings
        episode_index: 1-based index, for reporting
        schedule: Epsilon schedule; built from ``config`` when omitted
        rng: Exploration generator; seeded from ``config.seed`` when omitted
        step_offset: Environment steps taken in earlier episodes

    Returns:
        Per-episode totals
    """
    if schedule is None:
        schedule = EpsilonSchedule.from_config(config, config.episodes * env.length)
    if rng is None:
        rng = np.random.default_rng(config.seed)

    state = env.reset()
    cumulative_reward = 0.0
    losses: List[float] = []
    steps = 0
    epsilon = schedule.value(step_offset)
    terminal = False
    while not terminal:
        epsilon = schedule.value(step_offset + steps)
        action = select_action(online, state, epsilon, rng)
        reward, next_state, terminal = env.step(action)
        buffer.push(Experience(state, int(action), reward, next_state, terminal))
        cumulative_reward += reward
        steps += 1
        if len(buffer) >= config.batch_size:
            losses.append(train_step(online, target, buffer, adam, config))
            if config.target_update_steps and adam.step % config.target_update_steps == 0:
                target.load_state_from(online)
        state = next_state

    target.load_state_from(online)
    report = EpisodeReport(
        episode=episode_index,
        steps=steps,
        gradient_steps=len(losses),
        cumulative_reward=cumulative_reward,
        mean_loss=float(np.mean(losses)) if losses else None,
        epsilon=epsilon,
    )
    logger.info(
        f"Episode {episode_index}: {steps} steps, reward {cumulative_reward:.6f}, "
        f"mean loss {report.mean_loss}, epsilon {epsilon:.3f}"
    )
    return report


def greedy_rollout(net: AgentNetwork, env: TradingEnv) -> List[float]:
    """
    Play ``env`` to the end with the greedy policy, without learning

    Returns:
        Reward of every step
    """
    rng = np.random.default_rng(0)
    state = env.reset()
    rewards: List[float] = []
    terminal = False
    while not terminal:
        action = select_action(net, state, 0.0, rng)
        reward, state, terminal = env.step(action)
        rewards.append(reward)
    return rewards


class DQNTrainer:
    """
    Owns the online/target pair, replay buffer, optimizer and exploration
    schedule of one training run

    Every random stream is spawned from ``config.seed``: parameter
    initialization, exploration and replay sampling.
    """

    def __init__(self, online: AgentNetwork, config: TrainConfig, steps_per_episode: int):
        init_seed, policy_seed, replay_seed = np.random.SeedSequence(config.seed).spawn(3)
        init_params(online, init_seed)
        self.online = online
        self.target = online.copy()
        self.config = config
        self.rng = np.random.default_rng(policy_seed)
        self.buffer = ReplayBuffer(config.buffer_capacity, np.random.default_rng(replay_seed))
        self.adam = AdamState(
            online.params,
            learning_rate=config.learning_rate,
            beta1=config.beta1,
            beta2=config.beta2,
            epsilon=config.adam_epsilon,
        )
        self.schedule = EpsilonSchedule.from_config(config, config.episodes * steps_per_episode)
        self.env_steps = 0
        self.reports: List[EpisodeReport] = []

    def train_episode(self, env: TradingEnv) -> EpisodeReport:
        report = run_episode(
            env,
            self.online,
            self.target,
            self.buffer,
            self.adam,
            self.config,
            episode_index=len(self.reports) + 1,
            schedule=self.schedule,
            rng=self.rng,
            step_offset=self.env_steps,
        )
        self.env_steps += report.steps
        self.reports.append(report)
        return report

    def fit(
        self,
        env: TradingEnv,
        on_episode_end: Optional[Callable[[EpisodeReport], None]] = None,
    ) -> List[EpisodeReport]:
        """Run ``config.episodes`` episodes on ``env``"""
        for _ in range(self.config.episodes):
            report = self.train_episode(env)
            if on_episode_end is not None:
                on_episode_end(report)
        return self.reports

