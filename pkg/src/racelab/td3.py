"""Twin-delayed deterministic policy gradient on the from-scratch MLPs.

Twin critics, target networks with soft updates, target-policy smoothing,
and delayed actor updates. The training loop collects whole episodes from
the simulator and then applies one gradient update per collected environment
step (after a uniform-random warmup), which keeps runs exactly reproducible
from a single seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mlp import AdamState, Mlp, adam_step, save_snapshot
from .planners import ModificationPlanner
from .rewards import RewardConfig
from .simenv import Environment, Transition, run_episode


@dataclass(frozen=True)
class Td3Config:
    gamma: float = 0.99
    tau: float = 0.005
    policy_noise: float = 0.2
    noise_clip: float = 0.5
    policy_delay: int = 2
    exploration_noise: float = 0.1
    batch: int = 100
    total_steps: int = 100_000
    warmup: int = 1000
    actor_lr: float = 1e-3
    critic_lr: float = 1e-3
    hidden: tuple[int, int] = (200, 200)
    buffer_capacity: int = 1_000_000

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must be in (0, 1)")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must be in (0, 1]")
        if self.policy_delay < 1:
            raise ValueError("policy_delay must be >= 1")
        if self.batch < 1 or self.total_steps < 0:
            raise ValueError("batch must be >= 1 and total_steps >= 0")


class ReplayBuffer:
    """Fixed-capacity ring of transitions with uniform sampling."""

    def __init__(self, obs_dim: int, capacity: int = 1_000_000):
        self.capacity = int(capacity)
        self.obs = np.zeros((capacity, obs_dim))
        self.action = np.zeros((capacity, 1))
        self.reward = np.zeros((capacity, 1))
        self.next_obs = np.zeros((capacity, obs_dim))
        self.done = np.zeros((capacity, 1))
        self.size = 0
        self._head = 0

    def add(self, tr: Transition) -> None:
        i = self._head
        self.obs[i] = tr.obs
        self.action[i, 0] = tr.action
        self.reward[i, 0] = tr.reward
        self.next_obs[i] = tr.next_obs
        self.done[i, 0] = tr.done
        self._head = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, rng: np.random.Generator, batch: int):
        if self.size < batch:
            raise ValueError(f"buffer holds {self.size} < batch {batch}")
        idx = rng.integers(0, self.size, size=batch)
        return (
            self.obs[idx],
            self.action[idx],
            self.reward[idx],
            self.next_obs[idx],
            self.done[idx],
        )


@dataclass
class Td3Agent:
    """Online and target networks plus optimizer state."""

    actor: Mlp
    critic1: Mlp
    critic2: Mlp
    target_actor: Mlp
    target_critic1: Mlp
    target_critic2: Mlp
    actor_opt: AdamState
    critic1_opt: AdamState
    critic2_opt: AdamState
    updates: int = 0

    @classmethod
    def create(cls, obs_dim: int, cfg: Td3Config, rng: np.random.Generator) -> "Td3Agent":
        h1, h2 = cfg.hidden
        actor = Mlp.create([obs_dim, h1, h2, 1], rng, output_tanh=True)
        critic1 = Mlp.create([obs_dim + 1, h1, h2, 1], rng, output_tanh=False)
        critic2 = Mlp.create([obs_dim + 1, h1, h2, 1], rng, output_tanh=False)
        return cls(
            actor=actor,
            critic1=critic1,
            critic2=critic2,
            target_actor=actor.copy(),
            target_critic1=critic1.copy(),
            target_critic2=critic2.copy(),
            actor_opt=AdamState.for_params(actor.parameters()),
            critic1_opt=AdamState.for_params(critic1.parameters()),
            critic2_opt=AdamState.for_params(critic2.parameters()),
        )

    def policy(self, obs: np.ndarray) -> float:
        return float(self.actor.forward(obs)[0])


def soft_update(target: Mlp, online: Mlp, tau: float) -> None:
    """Blend every target parameter toward the online value by ``tau``."""
    for tp, op in zip(target.parameters(), online.parameters()):
        tp *= 1.0 - tau
        tp += tau * op


def td3_update(
    agent: Td3Agent,
    buffer: ReplayBuffer,
    cfg: Td3Config,
    rng: np.random.Generator,
) -> dict:
    """One gradient step on both critics, with delayed actor/target updates."""
    if buffer.size < cfg.batch:
        return {"skipped": True, "reason": f"buffer {buffer.size} < batch {cfg.batch}"}
    obs, act, rew, nobs, done = buffer.sample(rng, cfg.batch)
    batch = cfg.batch

    noise = np.clip(
        rng.normal(0.0, cfg.policy_noise, size=(batch, 1)),
        -cfg.noise_clip,
        cfg.noise_clip,
    )
    a_target = np.clip(agent.target_actor.forward(nobs) + noise, -1.0, 1.0)
    x_next = np.hstack([nobs, a_target])
    q_next = np.minimum(
        agent.target_critic1.forward(x_next), agent.target_critic2.forward(x_next)
    )
    y = rew + cfg.gamma * (1.0 - done) * q_next

    x = np.hstack([obs, act])
    losses = []
    for critic, opt in (
        (agent.critic1, agent.critic1_opt),
        (agent.critic2, agent.critic2_opt),
    ):
        q = critic.forward(x)
        err = q - y
        losses.append(float(np.mean(err**2)))
        grads, _ = critic.backward(x, 2.0 * err / batch)
        adam_step(critic.parameters(), grads, opt, cfg.critic_lr)

    diag = {"critic1_loss": losses[0], "critic2_loss": losses[1]}
    agent.updates += 1

    if agent.updates % cfg.policy_delay == 0:
        a_pi = agent.actor.forward(obs)
        x_pi = np.hstack([obs, a_pi])
        q_pi = agent.critic1.forward(x_pi)
        diag["actor_objective"] = float(np.mean(q_pi))
        # Ascend mean Q: d(-Q)/da through critic1, then through the actor.
        _, gx = agent.critic1.backward(x_pi, -np.ones((batch, 1)) / batch)
        ga = gx[:, obs.shape[1] :]
        a_grads, _ = agent.actor.backward(obs, ga)
        adam_step(agent.actor.parameters(), a_grads, agent.actor_opt, cfg.actor_lr)
        soft_update(agent.target_actor, agent.actor, cfg.tau)
        soft_update(agent.target_critic1, agent.critic1, cfg.tau)
        soft_update(agent.target_critic2, agent.critic2, cfg.tau)

    if not all(np.isfinite(v) for v in losses):
        agent.critic1.assert_finite()
        agent.critic2.assert_finite()
        raise FloatingPointError(f"non-finite critic loss: {losses}")
    if agent.updates % 200 == 0:
        agent.actor.assert_finite()
        agent.critic1.assert_finite()
        agent.critic2.assert_finite()
    return diag


# ---------------------------------------------------------------------------
# Training loop


@dataclass(frozen=True)
class EpisodeRecord:
    episode: int
    steps: int  # cumulative environment steps at episode end
    cumulative_reward: float
    lap_time: float
    outcome: str


def save_curve(path: str, records: list[EpisodeRecord]) -> None:
    """Training curve CSV: ``episode,steps,cumulative_reward,lap_time,outcome``."""
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write("episode,steps,cumulative_reward,lap_time,outcome\n")
        for r in records:
            f.write(
                f"{r.episode},{r.steps},{r.cumulative_reward:.9g},"
                f"{r.lap_time:.9g},{r.outcome}\n"
            )


def train(
    env: Environment,
    reward_cfg: RewardConfig,
    cfg: Td3Config,
    seed: int,
    pf_reference: str = "center",
    lookahead: float = 1.5,
    snapshot_path: str | None = None,
    curve_path: str | None = None,
    progress: "callable | None" = None,
) -> tuple[Mlp, list[EpisodeRecord]]:
    """Train a modification policy with TD3; fully determined by ``seed``.

    Episodes are collected with exploration noise (uniform actions during
    warmup), then one td3_update runs per collected step. Episodes always run
    to completion, so the final one may overshoot ``total_steps`` by a few
    steps. Returns the trained actor and the per-episode curve.
    """
    ss = np.random.SeedSequence(seed)
    rng_net, rng_act, rng_env = (np.random.default_rng(c) for c in ss.spawn(3))

    obs_dim = 4 + env.n_beams
    agent = Td3Agent.create(obs_dim, cfg, rng_net)
    buffer = ReplayBuffer(obs_dim, cfg.buffer_capacity)
    planner = ModificationPlanner(
        actor=lambda o: agent.policy(o),
        line=env.track.line_for(pf_reference),
        params=env.params,
        lookahead=lookahead,
        max_range=env.max_range,
        exploration_std=cfg.exploration_noise,
        rng=rng_act,
    )

    records: list[EpisodeRecord] = []
    steps = 0
    episode = 0
    while steps < cfg.total_steps:
        planner.uniform_random = steps < cfg.warmup
        outcome, transitions = run_episode(planner, reward_cfg, env, rng_env)
        episode += 1
        total_r = 0.0
        for tr in transitions:
            buffer.add(tr)
            steps += 1
            total_r += tr.reward
            if steps > cfg.warmup:
                td3_update(agent, buffer, cfg, rng_act)
        records.append(
            EpisodeRecord(
                episode=episode,
                steps=steps,
                cumulative_reward=total_r,
                lap_time=outcome.lap_time,
                outcome=outcome.terminal.value,
            )
        )
        if progress is not None:
            progress(records[-1])

    agent.actor.assert_finite()
    if snapshot_path is not None:
        save_snapshot(agent.actor, snapshot_path)
    if curve_path is not None:
        save_curve(curve_path, records)
    return agent.actor, records
