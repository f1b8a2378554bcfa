"""
Adam with plateau-triggered learning-rate decay, and the trial protocol over
the two parity sectors.
"""
import logging
import time
from dataclasses import dataclass
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from circuit import build_ansatz, compile_circuit
from engine import AmbiguousReadout, READOUT_THRESHOLD, extract_bits, value_and_gradient, z_expectations
from modspace import Graph, project_maxcut


SECTORS = ("even", "odd")


class OptimizerConfig(BaseModel):
    lr_initial: float = 0.05
    decay_factor: float = 0.5
    lr_min: float = 0.001
    plateau_patience: int = Field(default=50, ge=1)
    improvement_threshold: float = Field(default=1e-5, ge=0.0)
    min_steps_before_decay: int = Field(default=100, ge=0)
    max_trials_per_sector: int = Field(default=10, ge=1)
    max_iterations: int = Field(default=20000, ge=1)
    decay_guard: Literal["once", "per_decay"] = "once"
    readout_threshold: float = Field(default=READOUT_THRESHOLD, gt=0.0, lt=1.0)
    checkpoint_stride: int = Field(default=0, ge=0)
    n_blocks: Optional[int] = Field(default=None, ge=1)
    sectors: List[Literal["even", "odd"]] = Field(default_factory=lambda: list(SECTORS))

    @model_validator(mode="after")
    def _check_rates(self):
        if not self.lr_initial > self.lr_min > 0:
            raise ValueError(f"need lr_initial > lr_min > 0, got {self.lr_initial} and {self.lr_min}")
        if not 0 < self.decay_factor < 1:
            raise ValueError(f"decay_factor must lie in (0, 1), got {self.decay_factor}")
        if not self.sectors:
            raise ValueError("at least one parity sector is required")
        return self


@dataclass
class AdamMoments:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def fresh(cls, size: int) -> "AdamMoments":
        return cls(np.zeros(size), np.zeros(size), 0)


def adam_step(params: np.ndarray, grads: np.ndarray, moments: AdamMoments, lr: float,
              step_index: Optional[int] = None, beta1: float = 0.9, beta2: float = 0.999,
              eps: float = 1e-8) -> Tuple[np.ndarray, AdamMoments]:
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    if params.shape != grads.shape or moments.m.shape != params.shape:
        raise ValueError(
            f"[Optimizer] shape mismatch: params {params.shape}, grads {grads.shape}, moments {moments.m.shape}"
        )
    t = moments.t + 1 if step_index is None else step_index
    m = beta1 * moments.m + (1.0 - beta1) * grads
    v = beta2 * moments.v + (1.0 - beta2) * grads ** 2
    m_hat = m / (1.0 - beta1 ** t)
    v_hat = v / (1.0 - beta2 ** t)
    updated = params - lr * m_hat / (np.sqrt(v_hat) + eps)
    return updated, AdamMoments(m, v, t)


class _Terminate:
    def __repr__(self) -> str:
        return "TERMINATE"


TERMINATE = _Terminate()


@dataclass
class PlateauState:
    lr: float
    best: float = np.inf
    wait: int = 0
    last_decay: int = 0
    decays: int = 0


def plateau_schedule(trace: List[float], state: PlateauState,
                     config: Optional[OptimizerConfig] = None) -> Union[float, _Terminate]:
    """
    Feed the latest cost; returns the learning rate for the next step or TERMINATE.

    A plateau is `plateau_patience` consecutive iterations without beating the
    best cost by more than `improvement_threshold`. No decay happens before
    `min_steps_before_decay` iterations (counted from the last decay as well
    under the "per_decay" guard).
    """
    if not trace:
        raise ValueError("[Optimizer] plateau schedule needs a nonempty trace")
    config = config or OptimizerConfig()
    current = trace[-1]
    step = len(trace)
    if current < state.best - config.improvement_threshold:
        state.best = current
        state.wait = 0
    else:
        state.wait += 1

    guard_start = state.last_decay if config.decay_guard == "per_decay" else 0
    if state.wait < config.plateau_patience or step - guard_start < config.min_steps_before_decay:
        return state.lr
    if state.lr <= config.lr_min:
        return TERMINATE
    state.lr = max(state.lr * config.decay_factor, config.lr_min)
    state.wait = 0
    state.last_decay = step
    state.decays += 1
    logging.info(f"[Optimizer] plateau at iteration {step}, learning rate -> {state.lr:g}")
    return state.lr


class RunResult(BaseModel):
    trace: List[float] = Field(default_factory=list)
    lrs: List[float] = Field(default_factory=list)
    final_cost: float = 0.0
    bits: Optional[str] = None
    cut_value: Optional[int] = None
    success: bool = False
    iterations: int = 0
    seed: int = 0
    sector: Literal["even", "odd"] = "even"
    trials_used: int = 1
    wall_ms: float = 0.0
    # summed over every trial of a solve_instance call
    total_iterations: int = 0
    total_wall_ms: float = 0.0


def sector_bits(sector: str, n: int) -> str:
    if sector == "even":
        return "0" * n
    if sector == "odd":
        return "1" + "0" * (n - 1)
    raise ValueError(f"[Optimizer] unknown parity sector {sector!r}")


def trial_seed(seed: int, trial: int, sector: str) -> int:
    sequence = np.random.SeedSequence([seed, trial, SECTORS.index(sector)])
    return int(sequence.generate_state(1)[0])


def _certify(graph: Graph, bits: Optional[str], final_cost: float,
             reference_energy: Optional[int]) -> bool:
    if bits is None:
        return False
    # the cost itself must have settled on the readout's energy
    energy = graph.energy(bits)
    if abs(final_cost - energy) > 1e-6:
        return False
    return reference_energy is None or energy == reference_energy


def run_trial(graph: Graph, sector: str, seed: int, config: Optional[OptimizerConfig] = None,
              reference_energy: Optional[int] = None) -> RunResult:
    config = config or OptimizerConfig()
    n = graph.n_vertices
    init_bits = sector_bits(sector, n)
    if not graph.edges:
        return RunResult(trace=[0.0], lrs=[config.lr_initial], final_cost=0.0, bits="0" * n,
                         cut_value=0, success=True, iterations=1, seed=seed, sector=sector,
                         total_iterations=1)

    started = time.perf_counter()
    circuit = build_ansatz(n, seed, config.n_blocks)
    eta = project_maxcut(graph)
    tables = compile_circuit(circuit, 4)
    theta = circuit.theta.copy()
    moments = AdamMoments.fresh(circuit.n_params)
    schedule = PlateauState(lr=config.lr_initial)
    trace: List[float] = []
    lrs: List[float] = []
    logging.info(f"[Optimizer] trial seed={seed} sector={sector} n={n} params={circuit.n_params}")

    while True:
        value, grad = value_and_gradient(circuit, theta, init_bits, eta, tables, config.checkpoint_stride)
        trace.append(value)
        decision = plateau_schedule(trace, schedule, config)
        # rate applied by the step that follows this evaluation
        lrs.append(schedule.lr)
        if decision is TERMINATE or len(trace) >= config.max_iterations:
            break
        theta, moments = adam_step(theta, grad, moments, decision)

    final_cost = trace[-1]
    z = z_expectations(circuit, theta, init_bits, compile_circuit(circuit, 2))
    try:
        bits = extract_bits(z, config.readout_threshold)
    except AmbiguousReadout as exc:
        logging.info(f"{exc}; trial counted as failed")
        bits = None
    cut = graph.cut_value(bits) if bits is not None else None
    success = _certify(graph, bits, final_cost, reference_energy)
    wall_ms = (time.perf_counter() - started) * 1000.0
    logging.info(
        f"[Optimizer] trial seed={seed} sector={sector} done: cost={final_cost:.6f} "
        f"bits={bits} cut={cut} success={success} iterations={len(trace)}"
    )
    return RunResult(trace=trace, lrs=lrs, final_cost=final_cost, bits=bits, cut_value=cut,
                     success=success, iterations=len(trace), seed=seed, sector=sector,
                     wall_ms=wall_ms, total_iterations=len(trace), total_wall_ms=wall_ms)


def _rank(result: RunResult) -> Tuple[int, float]:
    return (0 if result.success else 1, result.final_cost)


def solve_instance(graph: Graph, config: Optional[OptimizerConfig] = None, seed: int = 0,
                   reference_energy: Optional[int] = None) -> RunResult:
    """
    Trials interleave the sectors (trial 0 even, trial 0 odd, trial 1 even, ...)
    and stop at the first certified success; otherwise the lowest final cost wins.
    """
    config = config or OptimizerConfig()
    runs: List[RunResult] = []
    for trial in range(config.max_trials_per_sector):
        for sector in config.sectors:
            result = run_trial(graph, sector, trial_seed(seed, trial, sector), config, reference_energy)
            runs.append(result)
            if result.success:
                return result.model_copy(update=_totals(runs))
    best = min(runs, key=_rank)
    logging.info(f"[Optimizer] no certified success in {len(runs)} trials; best cost {best.final_cost:.6f}")
    return best.model_copy(update=_totals(runs))


def _totals(runs: List[RunResult]) -> dict:
    return {
        "trials_used": len(runs),
        "total_iterations": sum(run.iterations for run in runs),
        "total_wall_ms": sum(run.wall_ms for run in runs),
    }
