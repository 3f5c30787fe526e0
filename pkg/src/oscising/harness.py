"""Multi-trial experiment runner, ablation variants and statistics.

Trial k draws everything (frequency spread, initial phases, step noise)
from its own Philox stream keyed by base_seed * 2**64 + k, so trials are
independent, order-free and mergeable: running them serially, in one
vectorized batch or across worker processes produces identical results.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import coupling as cpl
from .coupling import CouplingFunction
from .dynamics import (OscillatorBank, SimConfig, _integrate, _spins_batch,
                       initial_phases, make_rng)
from .graphs import WeightedGraph, random_graph
from .ising import IsingProblem, SpinConfig, hamiltonian_batch, maxcut_to_ising
from .lyapunov import energy_total_batch
from .schedule import Schedule, constant_schedule

__all__ = [
    "AblationVariant",
    "TrialStats",
    "run_trials",
    "ablate",
    "boltzmann_check",
    "BoltzmannReport",
    "scaling_study",
    "gset_targets",
    "trial_seed",
]

VARIANT_KINDS = ("baseline", "no_noise", "no_sync_threshold",
                 "sine_coupling", "smoothed_square_coupling", "variability")

HIST_BINS = 32


def trial_seed(base_seed: int, trial_index: int) -> int:
    """Injective per-trial stream key."""
    return (int(base_seed) << 64) + int(trial_index)


def gset_targets() -> dict[str, int]:
    """Best-known cut values for the standard benchmark set, keyed by name."""
    text = resources.files("oscising.data").joinpath(
        "gset_targets.json").read_text(encoding="utf-8")
    return {k: int(v) for k, v in json.loads(text).items()}


@dataclass(frozen=True)
class AblationVariant:
    """A named modification of the baseline machine.

    baseline            smoothed-square coupling, schedule as given
    no_noise            forces Kn = 0
    no_sync_threshold   forces Ks = 0; final analog phases are thresholded
    sine_coupling       plain sine coupling
    smoothed_square_coupling  explicit baseline coupling
    variability(sigma)  per-trial Gaussian frequency spread, relative std sigma
    """

    kind: str = "baseline"
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in VARIANT_KINDS:
            raise ValueError(f"unknown variant kind {self.kind!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.kind == "variability" and self.sigma == 0.0:
            raise ValueError("variability variant needs sigma > 0")

    @property
    def label(self) -> str:
        if self.kind == "variability":
            return f"variability_{100 * self.sigma:g}%"
        return self.kind

    def coupling(self) -> CouplingFunction:
        if self.kind == "sine_coupling":
            return cpl.sine()
        return cpl.smoothed_square()

    def apply_to_schedule(self, schedule: Schedule) -> Schedule:
        if self.kind == "no_noise":
            return schedule.override(kn_points=((0.0, 0.0),))
        if self.kind == "no_sync_threshold":
            return schedule.override(ks_points=((0.0, 0.0),))
        return schedule


@dataclass(frozen=True)
class TrialStats:
    """Aggregate over independent trials of one (problem, variant, schedule)."""

    n_trials: int
    trial_index: np.ndarray          # (T,) global trial numbers
    trial_H: np.ndarray              # (T,) final Hamiltonian per trial
    trial_cut: np.ndarray | None     # (T,) cut values (MAX-CUT mode only)
    best_H: float
    best_cut: float | None
    best_spins: SpinConfig
    target: float | None
    n_max: int | None                # trials reaching the target
    n_0999: int | None               # trials reaching 99.9% of the target
    hist_edges: np.ndarray
    hist_counts: np.ndarray
    n_failed: int
    wall_time_total: float
    wall_time_per_trial: float

    def objectives(self) -> np.ndarray:
        """Achieved objective per trial: cut in MAX-CUT mode, else -H."""
        return self.trial_cut if self.trial_cut is not None else -self.trial_H

    def merge(self, other: "TrialStats") -> "TrialStats":
        """Combine runs over disjoint trial-index ranges."""
        if set(self.trial_index.tolist()) & set(other.trial_index.tolist()):
            raise ValueError("trial index ranges overlap")
        if (self.trial_cut is None) != (other.trial_cut is None):
            raise ValueError("cannot merge MAX-CUT stats with plain stats")
        if self.target != other.target:
            raise ValueError("targets differ")
        order = np.argsort(np.concatenate([self.trial_index, other.trial_index]))
        idx = np.concatenate([self.trial_index, other.trial_index])[order]
        h = np.concatenate([self.trial_H, other.trial_H])[order]
        cut = None
        if self.trial_cut is not None:
            cut = np.concatenate([self.trial_cut, other.trial_cut])[order]
        pick = other if _better(other, self) else self
        return _finalize_stats(
            idx, h, cut, pick.best_spins, self.target,
            n_failed=self.n_failed + other.n_failed,
            wall=self.wall_time_total + other.wall_time_total)

    def to_json(self) -> str:
        return json.dumps({
            "n_trials": self.n_trials,
            "best_H": self.best_H,
            "best_cut": self.best_cut,
            "best_spins": self.best_spins.s.tolist(),
            "target": self.target,
            "n_max": self.n_max,
            "n_0999": self.n_0999,
            "median_objective": float(np.median(self.objectives())),
            "histogram": {"edges": self.hist_edges.tolist(),
                          "counts": self.hist_counts.tolist()},
            "n_failed": self.n_failed,
            "wall_time_total": self.wall_time_total,
            "wall_time_per_trial": self.wall_time_per_trial,
        })


def _better(a: TrialStats, b: TrialStats) -> bool:
    if a.trial_cut is not None:
        return a.best_cut > b.best_cut
    return a.best_H < b.best_H


def _finalize_stats(idx, h, cut, best_spins, target, n_failed, wall) -> TrialStats:
    objectives = cut if cut is not None else -h
    ok = np.isfinite(objectives)
    n_trials = len(idx)
    n_max = n_0999 = None
    if target is not None:
        tol = 1e-9 * max(1.0, abs(target))
        n_max = int(np.sum(objectives[ok] >= target - tol))
        n_0999 = int(np.sum(objectives[ok] >= 0.999 * target - tol))
    finite = objectives[ok]
    if len(finite):
        lo, hi = float(finite.min()), float(finite.max())
        if hi - lo <= 0.0:
            pad = max(0.5, abs(lo) * 1e-9)
            lo, hi = lo - pad, hi + pad
        counts, edges = np.histogram(finite, bins=HIST_BINS, range=(lo, hi))
    else:
        edges = np.linspace(0.0, 1.0, HIST_BINS + 1)
        counts = np.zeros(HIST_BINS, dtype=np.int64)
    best_cut = None
    best_h_val = float(np.nanmin(h)) if len(h) else np.nan
    if cut is not None:
        best_cut = float(np.nanmax(cut))
    return TrialStats(
        n_trials=n_trials, trial_index=idx, trial_H=h, trial_cut=cut,
        best_H=best_h_val, best_cut=best_cut, best_spins=best_spins,
        target=target, n_max=n_max, n_0999=n_0999,
        hist_edges=edges, hist_counts=counts, n_failed=n_failed,
        wall_time_total=wall,
        wall_time_per_trial=wall / n_trials if n_trials else 0.0)


def _run_chunk(problem: IsingProblem, variant: AblationVariant,
               schedule: Schedule, coupling: CouplingFunction,
               trial_indices: np.ndarray, base_seed: int, config: SimConfig,
               graph: WeightedGraph | None):
    """Integrate one batch of trials; returns per-trial results."""
    n = problem.n
    bsz = len(trial_indices)
    rngs = [make_rng(trial_seed(base_seed, int(k))) for k in trial_indices]
    if variant.kind == "variability":
        omega = np.empty((bsz, n))
        for b, rng in enumerate(rngs):
            omega[b] = 1.0 + variant.sigma * rng.standard_normal(n)
        if not (omega > 0).all():
            raise ValueError("frequency spread produced a non-positive omega")
    else:
        omega = np.ones(n)
    phi0 = np.empty((bsz, n))
    for b, rng in enumerate(rngs):
        phi0[b] = initial_phases(config, n, rng)
    phi, _ = _integrate(problem, coupling, omega, 1.0, schedule,
                        config.dt, config.n_steps, phi0, rngs)
    done = np.isfinite(phi).all(axis=1)
    spins = _spins_batch(np.where(done[:, None], phi, 0.0))
    h = hamiltonian_batch(problem, spins)
    h[~done] = np.nan
    cut = None
    if graph is not None:
        cross = spins[:, graph.i] * spins[:, graph.j] < 0
        cut = (cross * graph.w).sum(axis=1)
        cut[~done] = np.nan
    return trial_indices, h, cut, spins, done


def run_trials(problem: IsingProblem, variant: AblationVariant,
               schedule: Schedule, n_trials: int, base_seed: int,
               target: float | None = None, *,
               graph: WeightedGraph | None = None,
               coupling: CouplingFunction | None = None,
               dt: float = 0.01, init_mode: str = "uniform_0_pi",
               batch_size: int = 64, workers: int = 1,
               trial_offset: int = 0) -> TrialStats:
    """Run n_trials independent annealing runs and aggregate statistics.

    graph switches on MAX-CUT accounting (per-trial cut values, best_cut,
    and target counting against the best-known cut).  Failed trials are
    counted and excluded from the aggregates.  trial_offset shifts the
    global trial numbering so disjoint ranges can run separately and be
    merged without changing any stream.
    """
    if n_trials < 1:
        raise ValueError("need n_trials >= 1")
    coupling = coupling or variant.coupling()
    sched = variant.apply_to_schedule(schedule)
    config = SimConfig(dt=dt, t_end=sched.t_end, seed=0, init_mode=init_mode)
    lo, hi = trial_offset, trial_offset + n_trials
    chunks = [np.arange(s, min(s + batch_size, hi))
              for s in range(lo, hi, batch_size)]
    args = [(problem, variant, sched, coupling, c, base_seed, config, graph)
            for c in chunks]
    t0 = time.perf_counter()
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk_star, args))
    else:
        results = [_run_chunk(*a) for a in args]
    wall = time.perf_counter() - t0

    idx = np.concatenate([r[0] for r in results])
    h = np.concatenate([r[1] for r in results])
    cut = np.concatenate([r[2] for r in results]) if graph is not None else None
    n_failed = int(sum((~r[4]).sum() for r in results))
    objective = cut if cut is not None else -h
    best_global = None
    for r in results:
        obj = r[2] if graph is not None else -r[1]
        with np.errstate(invalid="ignore"):
            good = np.nonzero(r[4])[0]
        if len(good) == 0:
            continue
        b = good[np.argmax(obj[good])]
        cand = (float(obj[b]), r[0][b], r[3][b])
        if best_global is None or cand[0] > best_global[0] or \
                (cand[0] == best_global[0] and cand[1] < best_global[1]):
            best_global = cand
    if best_global is None:
        raise RuntimeError("all trials failed")
    best_spins = SpinConfig(best_global[2])
    return _finalize_stats(idx, h, cut, best_spins, target, n_failed, wall)


def _run_chunk_star(args):
    return _run_chunk(*args)


def ablate(problem: IsingProblem, variants: list[AblationVariant],
           schedule: Schedule, n_trials: int, base_seed: int, *,
           graph: WeightedGraph | None = None, target: float | None = None,
           dt: float = 0.01, batch_size: int = 64,
           workers: int = 1) -> tuple[dict[str, TrialStats], list[dict]]:
    """Run every variant on the same problem and seeds; return stats and a
    comparison table (one row per variant, sorted as given)."""
    if not variants:
        raise ValueError("need at least one variant")
    stats: dict[str, TrialStats] = {}
    table = []
    for v in variants:
        st = run_trials(problem, v, schedule, n_trials, base_seed,
                        target=target, graph=graph, dt=dt,
                        batch_size=batch_size, workers=workers)
        stats[v.label] = st
        table.append({
            "variant": v.label,
            "median": float(np.nanmedian(st.objectives())),
            "best": st.best_cut if st.trial_cut is not None else st.best_H,
            "n_max": st.n_max,
            "n_0999": st.n_0999,
            "failed": st.n_failed,
        })
    return stats, table


@dataclass(frozen=True)
class BoltzmannReport:
    """Empirical occupancy vs the exp(-E/Kn^2) stationary density.

    batch_basin_probs holds the same basin occupancies over consecutive
    equal slices of the trajectory; their spread estimates the sampling
    error of the (autocorrelated) empirical probabilities.
    """

    basin_probs_empirical: dict[tuple[int, ...], float]
    basin_probs_oracle: dict[tuple[int, ...], float]
    batch_basin_probs: tuple[dict[tuple[int, ...], float], ...]
    tv_distance: float
    n_samples: int

    def basin_stderr(self, key: tuple[int, ...]) -> float:
        vals = np.array([b[key] for b in self.batch_basin_probs])
        return float(vals.std(ddof=1) / np.sqrt(len(vals)))

    def preference(self, which: str = "empirical") -> list[tuple[int, ...]]:
        probs = (self.basin_probs_empirical if which == "empirical"
                 else self.basin_probs_oracle)
        return sorted(probs, key=probs.get, reverse=True)

    def to_json(self) -> str:
        fmt = lambda d: {"".join(map(str, k)): v for k, v in d.items()}
        return json.dumps({
            "empirical": fmt(self.basin_probs_empirical),
            "oracle": fmt(self.basin_probs_oracle),
            "tv_distance": self.tv_distance,
            "n_samples": self.n_samples,
        })


def _basin_keys(phis: np.ndarray) -> np.ndarray:
    """Componentwise nearest binary point: 0 on [-pi/2, pi/2), else pi."""
    wrapped = np.mod(phis, 2.0 * np.pi)
    return ((wrapped >= np.pi / 2) & (wrapped < 3 * np.pi / 2)).astype(np.int64)


def boltzmann_check(problem: IsingProblem, coupling: CouplingFunction,
                    Kn: float, K: float, Ks: float, duration: int, seed: int,
                    *, dt: float = 0.05, grid: int = 64,
                    burn_in_frac: float = 0.1,
                    n_batches: int = 16) -> BoltzmannReport:
    """Compare long-run phase occupancy against the Boltzmann-law density.

    A single noisy trajectory of `duration` steps is histogrammed on a
    `grid`-per-dimension mesh of [0, 2*pi)^n and compared (total-variation
    distance) with the stationary density proportional to exp(-E/Kn^2)
    integrated on the same mesh.  Basins are labelled by the componentwise
    nearest binary point.  Limited to n <= 3 (quadrature oracle cost).
    """
    n = problem.n
    if n > 3:
        raise ValueError("quadrature oracle is limited to n <= 3")
    if Kn <= 0:
        raise ValueError("needs noise: Kn > 0")
    if duration < 10:
        raise ValueError("duration too short")
    sched = constant_schedule(duration * dt, K, Ks, Kn)
    rng = make_rng(seed)
    phi0 = rng.uniform(0.0, 2.0 * np.pi, size=n)
    record = np.arange(duration + 1)
    _, records = _integrate(problem, coupling, np.ones(n), 1.0, sched, dt,
                            duration, phi0[None, :], [rng],
                            record_steps=record, fail_fast=True, check_every=1)
    samples = records[int(burn_in_frac * duration):, 0, :]
    step = 2.0 * np.pi / grid
    cells = np.floor(np.mod(samples, 2.0 * np.pi) / step).astype(np.int64) % grid
    mult = grid ** np.arange(n)
    flat_emp = np.zeros(grid ** n)
    np.add.at(flat_emp, cells @ mult, 1.0)
    flat_emp /= flat_emp.sum()

    idx = np.stack(np.meshgrid(*[np.arange(grid)] * n, indexing="ij"),
                   axis=-1).reshape(-1, n)
    mesh = idx * step
    bank = OscillatorBank.uniform(n)
    e = energy_total_batch(problem, coupling, bank, mesh, K, Ks)
    dens = np.exp(-(e - e.min()) / Kn ** 2)
    dens /= dens.sum()
    flat_ora = np.zeros(grid ** n)
    flat_ora[idx @ mult] = dens

    tv = 0.5 * float(np.abs(flat_emp - flat_ora).sum())

    keys = _basin_keys(mesh)
    basin_emp: dict[tuple[int, ...], float] = {}
    basin_ora: dict[tuple[int, ...], float] = {}
    flat_keys = keys @ (2 ** np.arange(n))
    sample_codes = _basin_keys(samples) @ (2 ** np.arange(n))
    batches = np.array_split(sample_codes, n_batches)
    batch_probs = []
    for batch in batches:
        batch_probs.append({})
    for code in range(2 ** n):
        key = tuple(int((code >> b) & 1) for b in range(n))
        mask = flat_keys == code
        basin_ora[key] = float(dens[mask].sum())
        basin_emp[key] = float(flat_emp[idx[mask] @ mult].sum())
        for bp, batch in zip(batch_probs, batches):
            bp[key] = float(np.mean(batch == code))
    return BoltzmannReport(basin_probs_empirical=basin_emp,
                           basin_probs_oracle=basin_ora,
                           batch_basin_probs=tuple(batch_probs),
                           tv_distance=tv,
                           n_samples=len(samples))


@dataclass(frozen=True)
class ScalingTrace:
    n: int
    t: np.ndarray
    mean_H: np.ndarray

    def normalized(self) -> np.ndarray:
        final = abs(self.mean_H[-1])
        return self.mean_H / (final if final > 0 else 1.0)

    def settling_time(self, level: float = 0.95) -> float:
        """First recorded time when mean H reaches level * final value."""
        thresh = level * self.mean_H[-1]
        hit = np.nonzero(self.mean_H <= thresh)[0]
        return float(self.t[hit[0]]) if len(hit) else float(self.t[-1])


def scaling_study(sizes: list[int], density_percent: float, n_trials: int,
                  seed: int, *, K: float = 1.0, Ks: float = 0.1,
                  Kn: float = 0.01, dt: float = 0.01, t_end: float = 20.0,
                  record_every: int = 20) -> list[ScalingTrace]:
    """Mean Ising energy over time for random +-1 problems of several sizes.

    All sizes run under the same fixed controls so the settling speeds are
    directly comparable.
    """
    if len(sizes) < 2:
        raise ValueError("need at least two sizes")
    out = []
    for size in sizes:
        g = random_graph(size, density_percent, "pm_one", seed=trial_seed(seed, size))
        problem = maxcut_to_ising(g)
        sched = constant_schedule(t_end, K, Ks, Kn)
        config = SimConfig(dt=dt, t_end=t_end, seed=0)
        n_steps = config.n_steps
        record = np.arange(0, n_steps + 1, record_every)
        if record[-1] != n_steps:
            record = np.append(record, n_steps)
        rngs = [make_rng(trial_seed(seed, k)) for k in range(n_trials)]
        phi0 = np.stack([initial_phases(config, size, r) for r in rngs])
        _, recs = _integrate(problem, cpl.smoothed_square(), np.ones(size), 1.0,
                             sched, dt, n_steps, phi0, rngs, record_steps=record)
        hs = np.stack([hamiltonian_batch(problem, _spins_batch(recs[s]))
                       for s in range(len(record))])
        out.append(ScalingTrace(n=size, t=record * dt, mean_H=hs.mean(axis=1)))
    return out
