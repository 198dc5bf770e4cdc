"""Monte Carlo simulation of the QBD chains and generators.

Discrete chains are stepped in bulk with vectorized inverse-CDF sampling;
continuous processes use the embedded jump chain with exponential holding
times and per-jump Bernoulli killing.  Paths are partitioned into fixed-size
chunks with one child seed stream each, so aggregate results are identical
for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import UsageError, ModelIntegrityError
from .blockmat import flat_index, unflatten, truncation_size
from .qbd import QbdModel, DISCRETE, CONTINUOUS
from .spectral import TransitionQuery

ALIVE = "alive"
KILLED = "killed"
TRUNCATION_EXIT = "truncation-exit"

# sentinel codes in flat-state arrays
KILLED_CODE = -1
EXIT_CODE = -2

CHUNK_SIZE = 16384


@dataclass(frozen=True)
class Trajectory:
    states: tuple[tuple[int, int], ...]
    times: tuple[float, ...] | None
    terminal: str


@dataclass(frozen=True)
class EmpiricalEstimate:
    estimate: float
    stderr: float
    paths: int
    exit_fraction: float
    biased: bool

    def as_dict(self) -> dict:
        return {"estimate": self.estimate, "stderr": self.stderr, "paths": self.paths,
                "exit_fraction": self.exit_fraction, "biased": self.biased}


def _discrete_rows(model: QbdModel, N: int) -> np.ndarray:
    """Cumulative row distributions of the truncated chain; rows below level N
    must be stochastic."""
    P = model.dense(N).entries
    interior = truncation_size(N - 1) if N > 0 else 0
    if interior and np.abs(P[:interior].sum(axis=1) - 1.0).max() > 1e-9:
        raise ModelIntegrityError("truncated chain rows deviate from sum 1 beyond 1e-9")
    if P.min() < -1e-12:
        raise ModelIntegrityError("negative transition probability in truncated chain")
    return np.cumsum(P, axis=1)


def step_discrete(model: QbdModel, state: tuple[int, int], rng: np.random.Generator,
                  N: int | None = None) -> tuple[int, int]:
    """One transition from `state` sampled from the truncated row distribution."""
    if model.kind != DISCRETE:
        raise UsageError("step_discrete requires a discrete model")
    n, k = state
    N = N if N is not None else n + 1
    cum = _discrete_rows(model, N)
    idx = int(np.searchsorted(cum[flat_index(n, k)], rng.random(), side="right"))
    return unflatten(min(idx, cum.shape[1] - 1))


def _run_discrete_chunk(model, start_flat, steps, size, rng, cum):
    states = np.full(size, start_flat, dtype=np.int64)
    path = np.empty((size, steps + 1), dtype=np.int64)
    path[:, 0] = states
    for s in range(steps):
        u = rng.random(size)
        rows = cum[states]
        states = np.minimum((u[:, None] > rows).sum(axis=1), cum.shape[1] - 1)
        path[:, s + 1] = states
    return path


def discrete_paths(model: QbdModel, start: tuple[int, int], steps: int, paths: int,
                   seed: int, workers: int = 1) -> np.ndarray:
    """Flat-state trajectories, shape (paths, steps + 1), bit-reproducible."""
    if model.kind != DISCRETE:
        raise UsageError("discrete_paths requires a discrete model")
    N = start[0] + steps
    cum = _discrete_rows(model, max(N, 1))
    start_flat = flat_index(*start)
    sizes = [CHUNK_SIZE] * (paths // CHUNK_SIZE)
    if paths % CHUNK_SIZE:
        sizes.append(paths % CHUNK_SIZE)
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(idx):
        rng = np.random.Generator(np.random.Philox(children[idx]))
        return _run_discrete_chunk(model, start_flat, steps, sizes[idx], rng, cum)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    return np.concatenate(parts, axis=0) if parts else np.empty((0, steps + 1), dtype=np.int64)


def _run_continuous_chunk(model, start_flat, horizon, size, rng, G, rates, kill, cum, exit_first):
    states = np.full(size, start_flat, dtype=np.int64)
    clock = np.zeros(size)
    status = np.zeros(size, dtype=np.int8)  # 0 alive, 1 killed, 2 exit
    active = np.ones(size, dtype=bool)
    guard = 0
    while active.any():
        guard += 1
        if guard > 100000:
            raise ModelIntegrityError("continuous simulation did not terminate")
        e = rng.exponential(size=size)
        u = rng.random(size)
        v = rng.random(size)
        r = rates[states]
        # absorbing rows (rate 0) stay forever
        stuck = active & (r <= 0.0)
        active = active & ~stuck
        hold = np.where(r > 0.0, e / np.where(r > 0.0, r, 1.0), np.inf)
        t_new = clock + hold
        done = active & (t_new >= horizon)
        active &= ~done
        if not active.any():
            break
        clock = np.where(active, t_new, clock)
        jump = active
        killed_now = jump & (u < kill[states])
        status[killed_now] = 1
        active &= ~killed_now
        jump = active
        if jump.any():
            rows = cum[states[jump]]
            nxt = np.minimum((v[jump, None] > rows).sum(axis=1), cum.shape[1] - 1)
            states[jump] = nxt
            exited = jump.copy()
            exited[jump] = nxt >= exit_first
            status[exited] = 2
            active &= ~exited
    return states, status


def continuous_finals(model: QbdModel, start: tuple[int, int], horizon: float, paths: int,
                      seed: int, workers: int = 1, N: int | None = None) -> np.ndarray:
    """Flat end states at the horizon; -1 marks killed paths, -2 truncation exits."""
    if model.kind != CONTINUOUS:
        raise UsageError("continuous_finals requires a continuous model")
    if N is None:
        N = start[0] + 12
    G = model.dense(N).entries
    if (G - np.diag(np.diag(G))).min() < -1e-12:
        raise ModelIntegrityError("negative off-diagonal entry in truncated generator")
    rates = -np.diag(G)
    deficit = -G.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        kill = np.where(rates > 0.0, deficit / np.where(rates > 0.0, rates, 1.0), 0.0)
    kill = np.clip(kill, 0.0, 1.0)
    Q = G - np.diag(np.diag(G))
    with np.errstate(divide="ignore", invalid="ignore"):
        Q = Q / np.where(rates[:, None] > 0.0, rates[:, None], 1.0)
    # the kill event uses its own uniform; jump rows renormalized by survival
    with np.errstate(divide="ignore", invalid="ignore"):
        Qs = Q / np.where((1.0 - kill)[:, None] > 0.0, (1.0 - kill)[:, None], 1.0)
    cum = np.cumsum(Qs, axis=1)
    exit_first = flat_index(N, 0)
    start_flat = flat_index(*start)
    sizes = [CHUNK_SIZE] * (paths // CHUNK_SIZE)
    if paths % CHUNK_SIZE:
        sizes.append(paths % CHUNK_SIZE)
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(idx):
        rng = np.random.Generator(np.random.Philox(children[idx]))
        return _run_continuous_chunk(model, start_flat, horizon, sizes[idx], rng,
                                     G, rates, kill, cum, exit_first)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    out = np.empty(paths, dtype=np.int64)
    pos = 0
    for states, status in parts:
        s = states.copy()
        s[status == 1] = KILLED_CODE
        s[status == 2] = EXIT_CODE
        out[pos:pos + s.size] = s
        pos += s.size
    return out


def sample_continuous_path(model: QbdModel, start: tuple[int, int], horizon: float,
                           rng: np.random.Generator, N: int | None = None) -> Trajectory:
    """One embedded-jump-chain trajectory with explicit jump epochs."""
    if model.kind != CONTINUOUS:
        raise UsageError("sample_continuous_path requires a continuous model")
    if N is None:
        N = start[0] + 12
    G = model.dense(N).entries
    if (G - np.diag(np.diag(G))).min() < -1e-12:
        raise ModelIntegrityError("negative off-diagonal entry in truncated generator")
    rates = -np.diag(G)
    deficit = -G.sum(axis=1)
    state = flat_index(*start)
    t = 0.0
    states = [start]
    times = [0.0]
    terminal = ALIVE
    while True:
        rate = rates[state]
        if rate <= 0.0:
            break
        t_next = t + rng.exponential() / rate
        if t_next >= horizon:
            break
        t = t_next
        if rng.random() < deficit[state] / rate:
            terminal = KILLED
            times.append(t)
            break
        row = G[state].copy()
        row[state] = 0.0
        row = row / (rate - deficit[state])
        nxt = int(np.searchsorted(np.cumsum(row), rng.random(), side="right"))
        nxt = min(nxt, row.size - 1)
        state = nxt
        states.append(unflatten(state))
        times.append(t)
        if state >= flat_index(N, 0):
            terminal = TRUNCATION_EXIT
            break
    return Trajectory(states=tuple(states), times=tuple(times), terminal=terminal)


def estimate_empirical(model: QbdModel, query: TransitionQuery, paths: int, seed: int,
                       workers: int = 1, N: int | None = None) -> EmpiricalEstimate:
    """Monte Carlo estimate of a transition probability with binomial stderr.

    Truncation-exit paths are excluded from numerator and denominator; the
    estimate is flagged biased when their fraction exceeds 1e-3.
    """
    if paths < 1:
        raise UsageError(f"paths={paths} must be >= 1")
    to_flat = flat_index(*query.to_state)
    if query.steps is not None:
        trajectories = discrete_paths(model, query.from_state, query.steps, paths,
                                      seed, workers)
        finals = trajectories[:, -1]
        exits = 0
        valid = paths
        successes = int((finals == to_flat).sum())
    else:
        finals = continuous_finals(model, query.from_state, query.time, paths,
                                   seed, workers, N=N)
        exits = int((finals == EXIT_CODE).sum())
        valid = paths - exits
        successes = int((finals == to_flat).sum())
    exit_fraction = exits / paths
    if valid == 0:
        return EmpiricalEstimate(np.nan, np.nan, paths, exit_fraction, True)
    p = successes / valid
    stderr = float(np.sqrt(p * (1.0 - p) / valid))
    return EmpiricalEstimate(p, stderr, paths, exit_fraction, exit_fraction > 1e-3)
