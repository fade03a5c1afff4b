"""Correctness-gated runtime benchmarks.

Two harnesses: per-iteration pulse-optimization cost across propagation
backends, and per-step propagation cost for the exact versus Trotterized
propagator.  Every timing claim is preceded by a gate asserting that the
compared paths produce identical numerics; timings on divergent outputs are
never reported.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import model as model_mod
from . import qoc as qoc_mod
from . import trotter as trotter_mod
from .propagate import Backend, TimeGrid, expm_hermitian

MIN_REPETITIONS = 5
GATE_TOL = 1e-8


class CorrectnessGateError(RuntimeError):
    """Raised when benchmark paths disagree numerically before timing."""


@dataclass(frozen=True)
class BenchRecord:
    n: int
    label: str
    reps: int
    median_ns: float
    mean_ns: float
    min_ns: float
    workload: str
    environment: str = "single-thread"

    def row(self) -> str:
        return (
            f"{self.n},{self.label},{self.median_ns:.17g},{self.mean_ns:.17g},"
            f"{self.min_ns:.17g},{self.reps}"
        )


def _time_callable(fn, reps: int) -> tuple[float, float, float]:
    fn()  # warm-up, discarded
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        fn()
        samples.append(time.perf_counter_ns() - t0)
    arr = np.array(samples, dtype=np.float64)
    return float(np.median(arr)), float(np.mean(arr)), float(np.min(arr))


def _gate_backends(cfg: model_mod.ModelConfig, backends, grid: TimeGrid, seed: int):
    """Assert identical optimization traces/pulses across backends."""
    results = {}
    for b in backends:
        problem = qoc_mod.QocProblem(
            cfg, grid, backend=b, seed=seed, max_iterations=3
        )
        results[b] = qoc_mod.optimize(problem)
    ref = results[backends[0]]
    for b in backends[1:]:
        r = results[b]
        if len(r.objective_trace) != len(ref.objective_trace):
            raise CorrectnessGateError(
                f"trace lengths diverge between {backends[0]} and {b}"
            )
        dt = float(
            np.max(np.abs(np.array(r.objective_trace) - np.array(ref.objective_trace)))
        )
        dp = max(
            float(np.max(np.abs(r.schedule.bx - ref.schedule.bx))),
            float(np.max(np.abs(r.schedule.by - ref.schedule.by))),
        )
        if dt > GATE_TOL or dp > GATE_TOL:
            raise CorrectnessGateError(
                f"backends {backends[0]} vs {b} diverge: trace {dt:.3e}, pulses {dp:.3e}"
            )


def bench_qoc_iteration(
    n_values,
    backends=("full", "first-block-s", "first-block-d"),
    steps: int = 50,
    total_time: float = 10.0,
    seed: int = 0,
    reps: int = MIN_REPETITIONS,
) -> list[BenchRecord]:
    """Median wall time of one gradient evaluation per (n, backend).

    Uncoupled model so that every backend applies; the correctness gate runs a
    short identical-seed optimization on all backends first.
    """
    reps = max(reps, MIN_REPETITIONS)
    records = []
    for n in n_values:
        cfg = model_mod.uncoupled_config(n)
        grid = TimeGrid(total_time, steps)
        _gate_backends(cfg, list(backends), grid, seed)
        for b in backends:
            backend = Backend(cfg, b)
            psi0 = backend.basis_state("all-up")
            psif = backend.basis_state("all-down")
            problem = qoc_mod.QocProblem(cfg, grid, backend=b, seed=seed)
            sched = qoc_mod.initial_schedule(problem)

            def one_iteration(backend=backend, sched=sched):
                qoc_mod.gradient(
                    psi0, psif, sched.bx, sched.by, backend, grid.tau
                )

            med, mean, mn = _time_callable(one_iteration, reps)
            records.append(
                BenchRecord(
                    n, b, reps, med, mean, mn,
                    f"gradient steps={steps} tau={grid.tau:g} seed={seed}",
                )
            )
    return records


def bench_trotter_step(
    n_values,
    tau: float = 0.05,
    seed: int = 0,
    reps: int = MIN_REPETITIONS,
) -> list[BenchRecord]:
    """Per-step cost: exact eigensolve step vs the Trotterized plan.

    The parallel-approximation label divides the serial plan time by n (the
    factors within a step are independent); it is a reported convention, not a
    measurement of actual parallel execution.
    """
    reps = max(reps, MIN_REPETITIONS)
    records = []
    for n in n_values:
        cfg = model_mod.ModelConfig(n, couplings=(0.2,), control_mode="per-qubit")
        plan = trotter_mod.PerQubitPlan(cfg, tau)
        bx, by = trotter_mod.benchmark_controls(cfg, 1, tau)
        rng = np.random.default_rng(seed)
        psi = rng.standard_normal(plan.dim) + 1j * rng.standard_normal(plan.dim)
        psi /= np.linalg.norm(psi)

        # correctness gate: one Trotter step within tau^2 of the exact step
        exact_u = trotter_mod.exact_step_unitary(cfg, bx[0], by[0], tau)
        dev = float(np.max(np.abs(plan.apply_step(psi.copy(), bx[0], by[0]) - exact_u @ psi)))
        if dev > 10.0 * n * n * tau * tau:
            raise CorrectnessGateError(
                f"trotter step deviates {dev:.3e} from the exact step at n={n}"
            )

        h0, hx, hy = trotter_mod._sparse_model_parts(cfg)
        h_dense = (
            h0 + sum(bx[0][i] * hx[i] + by[0][i] * hy[i] for i in range(n))
        ).toarray()

        def exact_step():
            w, v = np.linalg.eigh(h_dense)
            ((v * np.exp(-1j * tau * w)) @ v.conj().T) @ psi

        def trotter_step():
            plan.apply_step(psi, bx[0], by[0])

        workload = f"one step tau={tau:g} seed={seed}"
        med, mean, mn = _time_callable(exact_step, reps)
        records.append(BenchRecord(n, "exact", reps, med, mean, mn, workload))
        med, mean, mn = _time_callable(trotter_step, reps)
        records.append(BenchRecord(n, "trotter-serial", reps, med, mean, mn, workload))
        records.append(
            BenchRecord(
                n, "trotter-parallel-approx", reps,
                med / n, mean / n, mn / n,
                workload + " (serial/n convention)",
            )
        )
    return records


def export_bench_csv(records, path) -> None:
    with open(path, "w") as fh:
        fh.write("n,backend,median_ns,mean_ns,min_ns,reps\n")
        for r in records:
            fh.write(r.row() + "\n")


def export_bench_json(records, path) -> None:
    with open(path, "w") as fh:
        json.dump([asdict(r) for r in records], fh, indent=2)
        fh.write("\n")
