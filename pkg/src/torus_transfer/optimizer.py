"""Fixed-step gradient descent on the lattice objective, and the alpha / lattice sweeps."""

import dataclasses
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .adjoint import gradient
from .flow import ControlSchedule, EnsembleLattice, StepGuardViolation
from .objective import objective, transfer_error
from .states import TARGETS, get_target

GRADIENT_METRICS = ("l2", "euclidean")
METHODS = ("adam", "gd")
ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings of one descent run. Defaults reproduce the abs-cos experiment.

    ``method="adam"`` uses Adam with ``step_size`` as learning rate (betas
    0.9 / 0.999, eps 1e-8). ``method="gd"`` is plain fixed-step descent; its
    ``gradient_metric`` selects the inner product of the gradient: ``"l2"``
    is the L2([0, 1]) product of the control space (partial derivatives
    divided by the interval width), ``"euclidean"`` the raw partials. Adam is
    invariant to that choice up to its eps.
    """

    step_size: float = 1.25e-4
    iterations: int = 15000
    alpha: float = 1e-7
    seed: int = 0
    init_stddev: float = 0.1
    target: str = "abs-cos"
    initial: str = "ground"
    lattice_size: int = 628
    interval_count: int = 64
    log_every: int = 100
    method: str = "adam"
    gradient_metric: str = "l2"
    target_path: str = None

    def __post_init__(self):
        problems = []
        if not self.step_size > 0:
            problems.append("step_size must be positive")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            problems.append("iterations must be an integer >= 1")
        if not self.alpha >= 0:
            problems.append("alpha must be nonnegative")
        if not self.init_stddev >= 0:
            problems.append("init_stddev must be nonnegative")
        if int(self.lattice_size) != self.lattice_size or self.lattice_size < 2:
            problems.append("lattice_size must be an integer >= 2")
        if int(self.interval_count) != self.interval_count or self.interval_count < 1:
            problems.append("interval_count must be an integer >= 1")
        if int(self.log_every) != self.log_every or self.log_every < 1:
            problems.append("log_every must be an integer >= 1")
        if self.method not in METHODS:
            problems.append(f"method must be one of {METHODS}")
        if self.gradient_metric not in GRADIENT_METRICS:
            problems.append(f"gradient_metric must be one of {GRADIENT_METRICS}")
        if self.target not in TARGETS and self.target not in ("custom", "reg-only"):
            problems.append(f"unknown target {self.target!r}")
        if self.initial not in TARGETS:
            problems.append(f"initial must be one of {sorted(TARGETS)}")
        if self.target == "custom" and self.target_path is None:
            problems.append("target 'custom' needs target_path")
        if problems:
            raise ValueError("; ".join(problems))

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class HistoryRow:
    iteration: int
    total: float
    reg_term: float
    transfer_term: float
    grad_inf_norm: float
    seconds: float

    NUMERIC_FIELDS = ("iteration", "total", "reg_term", "transfer_term", "grad_inf_norm")


@dataclass
class RunHistory:
    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])


@dataclass
class DescentResult:
    control: ControlSchedule
    history: RunHistory
    report: object
    gradient_evaluations: int
    aborted: bool = False
    abort_reason: str = ""
    seconds: float = 0.0


def random_init(seed, K, stddev):
    """K x 3 i.i.d. Gaussian entries with mean 0 and standard deviation ``stddev``."""
    if stddev < 0:
        raise ValueError("stddev must be nonnegative")
    rng = np.random.default_rng(seed)
    return ControlSchedule(stddev * rng.standard_normal((K, 3)))


def _states(config):
    return get_target(config.initial), get_target(config.target, config.target_path)


class Adam:
    def __init__(self, shape, lr, betas=ADAM_BETAS, eps=ADAM_EPS):
        self.lr, self.betas, self.eps = lr, betas, eps
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)
        self.t = 0

    def step(self, grad):
        b1, b2 = self.betas
        self.t += 1
        self.m = b1 * self.m + (1.0 - b1) * grad
        self.v = b2 * self.v + (1.0 - b2) * grad * grad
        m_hat = self.m / (1.0 - b1**self.t)
        v_hat = self.v / (1.0 - b2**self.t)
        return self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def descend(config, initial_control=None):
    """Minimize the lattice objective for exactly ``config.iterations`` gradient evaluations.

    When the target is the initial state the zero control is already a
    global minimizer (J = 0) and the run starts there instead of at a random
    control. A :class:`StepGuardViolation` stops the run early; the last
    valid iterate is returned with ``aborted=True``.
    """
    psi0, psi1 = _states(config)
    lattice = EnsembleLattice(config.lattice_size)
    if initial_control is not None:
        u = initial_control
    elif psi1 is psi0:
        u = ControlSchedule.zeros(config.interval_count)
    else:
        u = random_init(config.seed, config.interval_count, config.init_stddev)
    if config.method == "adam":
        adam = Adam(u.values.shape, config.step_size)
        update = adam.step
    else:
        scale = config.step_size / u.h if config.gradient_metric == "l2" else config.step_size

        def update(grad):
            return scale * grad
    history = RunHistory()
    evaluations = 0
    start = time.perf_counter()
    aborted, reason = False, ""
    previous = None
    for n in range(config.iterations):
        try:
            grad, report = gradient(u, config.alpha, psi0, psi1, lattice)
        except StepGuardViolation as exc:
            if previous is None:
                raise
            aborted, reason = True, f"iteration {n}: {exc}"
            u = previous
            break
        evaluations += 1
        if n % config.log_every == 0:
            history.rows.append(HistoryRow(
                n, report.total, report.reg_term, report.transfer_term,
                float(np.max(np.abs(grad))), time.perf_counter() - start,
            ))
        candidate = u.values - update(grad)
        if not np.all(np.isfinite(candidate)):
            aborted, reason = True, f"iteration {n}: non-finite control update"
            break
        previous, u = u, ControlSchedule(candidate)
    try:
        report = objective(u, config.alpha, psi0, psi1, lattice)
    except StepGuardViolation as exc:
        # the last update folds the circle; keep the iterate before it
        aborted, reason = True, f"final iterate: {exc}"
        u = previous
        report = objective(u, config.alpha, psi0, psi1, lattice)
    return DescentResult(u, history, report, evaluations, aborted, reason, time.perf_counter() - start)


def sweep_alpha(base, alphas):
    """Descend once per alpha (same seed); rows are ``(alpha, transfer_term)``."""
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ValueError("need at least one alpha")
    if any(a <= 0 for a in alphas):
        raise ValueError("alphas must be positive")
    if any(b > a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be given in descending order")
    rows = []
    for a in alphas:
        result = descend(base.replace(alpha=a))
        rows.append({"alpha": a, "transfer_term": result.report.transfer_term,
                     "mismatch": result.report.mismatch, "aborted": result.aborted})
    return rows


def sweep_lattice(base, sizes, reference_factor=4):
    """Optimize on each lattice, then re-evaluate on a common lattice of ``4 * max(sizes)`` points."""
    sizes = [int(s) for s in sizes]
    if not sizes:
        raise ValueError("need at least one lattice size")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("lattice sizes must be strictly increasing")
    reference = EnsembleLattice(reference_factor * max(sizes))
    psi0, psi1 = _states(base)
    rows = []
    for N in sizes:
        result = descend(base.replace(lattice_size=N))
        ref_value, _ = transfer_error(result.control, psi0, psi1, reference)
        rows.append({"lattice_size": N, "transfer_term": result.report.transfer_term,
                     "reference_size": reference.size, "reference_transfer_term": ref_value,
                     "reference_mismatch": math.sqrt(ref_value), "aborted": result.aborted})
    return rows
