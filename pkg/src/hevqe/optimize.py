"""Derivative-free optimization stack: Latin-hypercube + Gaussian-process
surrogate global phase, then an implicit-filtering local phase.

Budget accounting is exact: every objective evaluation lands in the trace,
nothing is evaluated off the books, and identical (objective, seed, budget)
inputs reproduce bit-identical traces.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize as sciopt
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.stats import qmc

NOISE_FLOOR = 1e-8
MAX_GP_ROUNDS = 3          # surrogate retraining rounds, one proposal each
N_DESCENT_STARTS = 16      # multi-start count for the surrogate-mean descent
IMFIL_SCALES = tuple(0.5 ** k for k in range(1, 8))
MAX_BACKTRACKS = 5


class GPFitError(Exception):
    """Kernel matrix could not be factorized even after noise inflation."""


class Objective:
    """Bounded black-box objective that counts and records every evaluation.

    Out-of-bounds inputs are rejected.  ``noise_std`` is an optional hint
    (standard deviation of evaluation noise, e.g. from measurement shots)
    that the surrogate uses as its noise floor.
    """

    def __init__(self, fn, bounds, noise_std: float = 0.0):
        self._fn = fn
        bounds = np.asarray(bounds, dtype=float)
        if bounds.ndim != 2 or bounds.shape[1] != 2:
            raise ValueError(f"bounds must have shape (d, 2), got {bounds.shape}")
        if np.any(bounds[:, 0] >= bounds[:, 1]):
            raise ValueError("every bound needs lo < hi")
        self.bounds = bounds
        self.eval_counter = 0
        self.history: list[tuple[int, np.ndarray, float]] = []
        self.noise_std = float(noise_std)

    @property
    def arity(self) -> int:
        return len(self.bounds)

    def evaluate(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.arity,):
            raise ValueError(f"expected {self.arity} parameters, got shape {x.shape}")
        if np.any(x < self.bounds[:, 0]) or np.any(x > self.bounds[:, 1]):
            raise ValueError(f"point {x} violates bounds")
        value = float(self._fn(x))
        self.history.append((self.eval_counter, x.copy(), value))
        self.eval_counter += 1
        return value

    __call__ = evaluate


@dataclass
class OptTrace:
    """Ordered evaluation records (eval index, params, value)."""

    records: list
    budget_exhausted: bool = False
    final_params: np.ndarray | None = None
    final_value: float | None = None

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, _, v in self.records])

    @property
    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(self.values)

    @property
    def best_value(self) -> float:
        # final_value covers a handed-over f0 at the start point, which has
        # no record of its own; it is never worse than the record minimum.
        best = float(self.values.min()) if self.records else np.inf
        if self.final_value is not None and self.final_value < best:
            best = float(self.final_value)
        return best

    @property
    def best_params(self) -> np.ndarray:
        if self.records:
            k = int(np.argmin(self.values))
            if self.final_value is None or self.records[k][2] <= self.final_value:
                return self.records[k][1]
        return self.final_params

    def __len__(self) -> int:
        return len(self.records)

    def to_csv(self, path) -> None:
        """Columns: eval_index,value,best_so_far,param_0..param_{k-1}."""
        arity = len(self.records[0][1]) if self.records else 0
        header = ["eval_index", "value", "best_so_far"] + [
            f"param_{i}" for i in range(arity)
        ]
        best = self.best_so_far if self.records else []
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for (idx, params, value), b in zip(self.records, best):
                writer.writerow([idx, repr(value), repr(float(b))]
                                + [repr(float(p)) for p in params])

    @staticmethod
    def concat(*traces) -> "OptTrace":
        records = [rec for tr in traces for rec in tr.records]
        out = OptTrace(records, budget_exhausted=any(t.budget_exhausted for t in traces))
        tails = [t for t in traces if t.final_value is not None]
        if tails:
            best = min(tails, key=lambda t: t.final_value)
            out.final_params, out.final_value = best.final_params, best.final_value
        return out


# --- Gaussian-process surrogate ---

@dataclass
class GPModel:
    inputs: np.ndarray
    values: np.ndarray
    length_scale: float
    signal_var: float
    noise: float
    mean: float
    alpha: np.ndarray = field(repr=False)
    chol: tuple = field(repr=False)

    def _cross_kernel(self, X: np.ndarray) -> np.ndarray:
        d2 = ((X[:, None, :] - self.inputs[None, :, :]) ** 2).sum(axis=2)
        return self.signal_var * np.exp(-0.5 * d2 / self.length_scale**2)

    def predict(self, X):
        """Posterior mean and variance at the given points."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        ks = self._cross_kernel(X)
        mean = self.mean + ks @ self.alpha
        v = solve_triangular(self.chol[0], ks.T, lower=self.chol[1])
        var = np.maximum(self.signal_var + self.noise - (v**2).sum(axis=0), 0.0)
        return mean, var

    def mean_and_grad(self, x):
        """Posterior mean and its gradient at one point (for local descent)."""
        x = np.asarray(x, dtype=float)
        diff = self.inputs - x[None, :]
        k = self.signal_var * np.exp(
            -0.5 * (diff**2).sum(axis=1) / self.length_scale**2
        )
        mean = self.mean + k @ self.alpha
        grad = (diff * (k * self.alpha)[:, None]).sum(axis=0) / self.length_scale**2
        return float(mean), grad


def _log_marginal_likelihood(K, nu, r):
    m = len(r)
    factor = cho_factor(K + nu * np.eye(m), lower=True)
    alpha = cho_solve(factor, r)
    logdet = 2.0 * np.sum(np.log(np.diag(factor[0])))
    return -0.5 * (r @ alpha) - 0.5 * logdet - 0.5 * m * np.log(2.0 * np.pi), factor, alpha


def gp_fit(inputs, values, noise_floor: float = NOISE_FLOOR) -> GPModel:
    """Fit a squared-exponential GP with (length scale, signal variance)
    picked by log marginal likelihood over a fixed 8x8 log-spaced grid.

    The nugget starts at the noise floor; if factorization fails (duplicate
    points) it is inflated once and retried before failing.  The model's
    noise field reports the achieved interpolation residual whenever
    conditioning keeps the posterior mean from matching the training values
    exactly, so mean predictions at training inputs are always within
    noise + 1e-6 of the observations.
    """
    X = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.asarray(values, dtype=float)
    m = len(X)
    if m < 2 or len(y) != m:
        raise ValueError(f"need >= 2 training points, got {m} inputs / {len(y)} values")

    d2 = ((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2)
    dists = np.sqrt(d2[np.triu_indices(m, k=1)])
    positive = dists[dists > 0]
    base = float(np.median(positive)) if positive.size else 1.0
    ell_grid = base * np.logspace(-1.0, 1.0, 8)
    mean = float(y.mean())
    r = y - mean
    var0 = max(float(r.var()), 1e-12)
    sig_grid = var0 * np.logspace(-2.0, 2.0, 8)

    nu = max(float(noise_floor), NOISE_FLOOR)
    for attempt in range(2):
        best = None
        for ell in ell_grid:
            K_unit = np.exp(-0.5 * d2 / ell**2)
            for sig in sig_grid:
                try:
                    lml, factor, alpha = _log_marginal_likelihood(sig * K_unit, nu, r)
                except np.linalg.LinAlgError:
                    continue
                if best is None or lml > best[0]:
                    best = (lml, ell, sig, factor, alpha)
        if best is not None:
            break
        nu *= 1e4  # duplicate-point kernel: inflate and retry once
    else:
        raise GPFitError("kernel factorization failed at every grid point")

    _, ell, sig, factor, alpha = best
    # Training residual of the posterior mean is exactly nu * alpha.
    achieved = float(np.max(np.abs(nu * alpha)))
    return GPModel(
        inputs=X, values=y, length_scale=float(ell), signal_var=float(sig),
        noise=max(float(nu), achieved), mean=mean, alpha=alpha, chol=factor,
    )


def _propose_from_surrogate(model: GPModel, bounds: np.ndarray, rng) -> np.ndarray:
    """Minimize the posterior mean by multi-start bounded descent.

    Costs no objective evaluations; starts at the incumbent training minimum
    plus uniform random points.
    """
    lo, hi = bounds[:, 0], bounds[:, 1]
    incumbent = model.inputs[int(np.argmin(model.values))]
    starts = [incumbent] + [
        lo + rng.random(len(lo)) * (hi - lo) for _ in range(N_DESCENT_STARTS - 1)
    ]
    best_x, best_mu = None, np.inf
    box = list(zip(lo, hi))
    for x0 in starts:
        res = sciopt.minimize(
            model.mean_and_grad, x0, jac=True, method="L-BFGS-B", bounds=box
        )
        if res.fun < best_mu:
            best_mu, best_x = float(res.fun), np.clip(res.x, lo, hi)
    return best_x


def initial_design_size(n_qubits: int) -> int:
    """ceil(0.1 * 2^n_qubits), with a floor of 2 (the GP needs two points)."""
    return max(2, int(np.ceil(0.1 * 2.0**n_qubits)))


def gp_global_search(obj: Objective, n_qubits: int, seed: int):
    """Latin-hypercube initial design sized by the problem register, then up
    to MAX_GP_ROUNDS surrogate retrainings, each evaluating the minimizer of
    the posterior mean.  Returns (best params, best value, trace)."""
    lo, hi = obj.bounds[:, 0], obj.bounds[:, 1]
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("bounds must be finite")
    start = obj.eval_counter
    n_init = initial_design_size(n_qubits)
    sampler = qmc.LatinHypercube(d=obj.arity, seed=seed)
    points = lo + sampler.random(n_init) * (hi - lo)
    for x in points:
        obj(x)

    rng = np.random.default_rng(seed)
    noise_floor = max(NOISE_FLOOR, obj.noise_std**2)
    for _ in range(MAX_GP_ROUNDS):
        X = np.array([p for _, p, _ in obj.history[start:]])
        y = np.array([v for _, _, v in obj.history[start:]])
        try:
            model = gp_fit(X, y, noise_floor=noise_floor)
        except GPFitError:
            break
        obj(_propose_from_surrogate(model, obj.bounds, rng))

    trace = OptTrace(list(obj.history[start:]))
    k = int(np.argmin(trace.values))
    best_params, best_value = trace.records[k][1], float(trace.records[k][2])
    trace.final_params, trace.final_value = best_params, best_value
    return best_params, best_value, trace


# --- implicit filtering ---

def imfil_minimize(
    obj: Objective, x0, max_evals: int, seed: int | None = None, f0: float | None = None
) -> OptTrace:
    """Implicit-filtering local minimization.

    At each scale s in {2^-1..2^-7} (times the per-dimension bound span):
    evaluate a central-difference stencil (2*arity points, clipped to the
    bounds), form the stencil gradient, take a projected line-search step
    with up to five halving backtracks, and repeat until no stencil point
    improves, then shrink the scale.  Stops at scale exhaustion or when the
    budget runs out (incumbent returned, trace flagged).

    ``f0`` hands over an already-known objective value at x0 so the caller's
    evaluation is not repeated; without it, x0 is evaluated first and counts
    against ``max_evals`` (which must then be at least 2*arity + 1).
    ``seed`` is accepted for interface symmetry; the loop has no random
    choices.
    """
    del seed
    lo, hi = obj.bounds[:, 0], obj.bounds[:, 1]
    x = np.asarray(x0, dtype=float).copy()
    if np.any(x < lo) or np.any(x > hi):
        raise ValueError(f"x0 {x} violates bounds")
    d = obj.arity
    if max_evals < (2 * d if f0 is not None else 2 * d + 1):
        raise ValueError(
            f"max_evals={max_evals} cannot cover a single stencil for arity {d}"
        )
    start = obj.eval_counter
    allowed = int(max_evals)

    used = 0

    def ev(point):
        nonlocal used
        used += 1
        return obj(point)

    fx = ev(x) if f0 is None else float(f0)
    inc_x, inc_f = x.copy(), fx
    exhausted = False
    span = hi - lo

    for scale in IMFIL_SCALES:
        h = scale * span
        while True:
            if used >= allowed:
                exhausted = True
                break
            # Central-difference stencil, clipped to the box.
            plus = np.clip(x[None, :] + np.diag(h), lo, hi)
            minus = np.clip(x[None, :] - np.diag(h), lo, hi)
            f_plus = np.full(d, np.nan)
            f_minus = np.full(d, np.nan)
            for i in range(d):
                if used >= allowed:
                    exhausted = True
                    break
                f_plus[i] = ev(plus[i])
                if f_plus[i] < inc_f:
                    inc_x, inc_f = plus[i].copy(), f_plus[i]
                if used >= allowed:
                    exhausted = True
                    break
                f_minus[i] = ev(minus[i])
                if f_minus[i] < inc_f:
                    inc_x, inc_f = minus[i].copy(), f_minus[i]
            if exhausted:
                break
            stencil_vals = np.concatenate([f_plus, f_minus])
            stencil_pts = np.vstack([plus, minus])
            k_best = int(np.argmin(stencil_vals))
            if stencil_vals[k_best] >= fx:
                break  # stencil failure: shrink the scale
            # Stencil gradient with the actual (possibly clipped) spacings.
            g = np.zeros(d)
            for i in range(d):
                denom = plus[i, i] - minus[i, i]
                if denom > 0:
                    g[i] = (f_plus[i] - f_minus[i]) / denom
            moved = False
            if np.max(np.abs(g)) > 0:
                # Projected gradient step: the raw gradient sets the trial
                # length, so late-scale steps are not pinned to the stencil
                # size and can land arbitrarily close to the minimizer.
                lam = 1.0
                for _ in range(1 + MAX_BACKTRACKS):
                    if used >= allowed:
                        exhausted = True
                        break
                    trial = np.clip(x - lam * g, lo, hi)
                    ft = ev(trial)
                    if ft < inc_f:
                        inc_x, inc_f = trial.copy(), ft
                    if ft < fx:
                        x, fx = trial, ft
                        moved = True
                        break
                    lam *= 0.5
            if exhausted:
                break
            if stencil_vals[k_best] < fx:
                # The best stencil point beats the line-search result; take it.
                x, fx = stencil_pts[k_best].copy(), float(stencil_vals[k_best])
                moved = True
            if not moved:
                break
        if exhausted:
            break

    trace = OptTrace(list(obj.history[start:]), budget_exhausted=exhausted)
    trace.final_params, trace.final_value = inc_x, float(inc_f)
    return trace


def rotation_descent(
    obj: Objective, x0, max_evals: int, pattern: bool = True
) -> OptTrace:
    """Cyclic exact line minimization for rotation-angle objectives.

    A circuit energy restricted to one standard rotation angle t is exactly
    a + b*cos(t) + c*sin(t), so the value at the current point plus two probes
    at t +- pi/2 determine the 1-D global minimizer in closed form.  Each
    sweep updates every coordinate at two evaluations apiece, carrying the
    predicted minimum forward (exact for noiseless expectations).

    With ``pattern`` on, each sweep is followed by a pattern move along the
    net sweep displacement: probe at twice the displacement and, when that
    improves, at the minimizer of the parabola through the three known values
    (clamped to [2, 8] displacements).  Sweeps descend valley walls fast but
    crawl along shallow valley floors; the extrapolation recovers most of the
    lost ground at two evaluations per sweep.

    Every coordinate must span a full 2*pi period: the closed form is wrong
    for bounded sub-intervals and for gates with half-angle harmonics (the
    XY exchange angle), so those must be pinned before building the
    objective.  Deterministic; no random choices.  The returned final point
    is always re-measured into the trace when its value would otherwise rest
    on the sinusoid prediction alone.
    """
    lo, hi = obj.bounds[:, 0], obj.bounds[:, 1]
    if np.any(hi - lo < 2 * np.pi - 1e-9):
        raise ValueError("rotation_descent needs full-period bounds on every axis")
    x = np.asarray(x0, dtype=float).copy()
    if np.any(x < lo) or np.any(x > hi):
        raise ValueError(f"x0 {x} violates bounds")
    d = obj.arity
    if max_evals < 3:
        raise ValueError(f"max_evals={max_evals} cannot cover one coordinate update")
    start = obj.eval_counter
    allowed = int(max_evals)
    used = 0

    def ev(point):
        nonlocal used
        used += 1
        return obj(point)

    def wrap(t, a):
        # map into [a, a+2*pi); valid because every axis spans a full period
        return a + np.mod(t - a, 2 * np.pi)

    fx = ev(x)
    measured = True  # fx is in the trace at exactly x
    exhausted = False
    while True:
        # keep one evaluation in reserve to re-measure the final point
        if used + 3 > allowed:
            exhausted = True
            break
        xs, fs = x.copy(), fx
        cut = False
        for i in range(d):
            if used + 3 > allowed:
                cut = exhausted = True
                break
            theta = x[i]
            xp = x.copy()
            xp[i] = wrap(theta + 0.5 * np.pi, lo[i])
            f_plus = ev(xp)
            xm = x.copy()
            xm[i] = wrap(theta - 0.5 * np.pi, lo[i])
            f_minus = ev(xm)
            u = fx - 0.5 * (f_plus + f_minus)
            v = 0.5 * (f_plus - f_minus)
            r = math.hypot(u, v)
            if r <= 1e-15 * (1.0 + abs(fx)):
                continue  # flat coordinate
            x[i] = wrap(theta - 0.5 * np.pi - math.atan2(u, v), lo[i])
            fx = 0.5 * (f_plus + f_minus) - r
            measured = False
        if cut:
            break
        if pattern and used + 2 <= allowed and np.any(x != xs):
            # minimal-image displacement: coordinates wrap, raw x - xs does not
            f1 = fx
            delta = np.mod(x - xs + np.pi, 2.0 * np.pi) - np.pi
            x2 = wrap(xs + 2.0 * delta, lo)
            f2 = ev(x2)
            if f2 < f1:
                x, fx, measured = x2, f2, True
                if used + 2 <= allowed:
                    denom = fs - 2.0 * f1 + f2
                    tm = 4.0
                    if denom > 0.0:
                        tm = min(max(0.5 * (4.0 * f1 - 3.0 * fs - f2) / denom, 2.0), 8.0)
                    x3 = wrap(xs + tm * delta, lo)
                    f3 = ev(x3)
                    if f3 < fx:
                        x, fx = x3, f3
        if fs - fx < 1e-12 * (1.0 + abs(fx)):
            break  # converged; spend no more budget

    if not measured:
        fx = ev(x)
    trace = OptTrace(list(obj.history[start:]), budget_exhausted=exhausted)
    trace.final_params, trace.final_value = x.copy(), float(fx)
    return trace


def surrogate_then_local(
    obj: Objective, n_qubits: int, total_budget: int, seed: int
) -> OptTrace:
    """GP global search, then implicit filtering from its best point with the
    remaining budget.  The concatenated trace never exceeds total_budget."""
    global_cost = initial_design_size(n_qubits) + MAX_GP_ROUNDS
    if total_budget <= global_cost:
        raise ValueError(
            f"budget {total_budget} cannot cover the global phase "
            f"({global_cost} evaluations)"
        )
    start = obj.eval_counter
    best_x, best_f, gtrace = gp_global_search(obj, n_qubits, seed)
    remaining = total_budget - (obj.eval_counter - start)
    if remaining < 2 * obj.arity:
        # Too tight for even one local stencil; the global phase is the run.
        gtrace.budget_exhausted = True
        return gtrace
    ltrace = imfil_minimize(obj, best_x, remaining, seed=seed, f0=best_f)
    return OptTrace.concat(gtrace, ltrace)
