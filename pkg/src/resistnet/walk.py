"""The reversible random walk driven by conductances, and its transfer operator.

Transition probabilities are p(x, y) = c(x, y) / c(x); on a truncated
graph the frontier vertices renormalize over the edges that survived the
cut, which keeps every row stochastic (a walker reaching the frontier
reflects). Simulation draws its randomness from a stateless counter-based
generator keyed by (seed, trial, step): trials are order-independent and
runs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .energy import EnergyVector
from .graphs import WeightedGraph

_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_STEP_SALT = np.uint64(0xD1B54A32D192ED03)
_TWO53 = float(2 ** 53)


def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def counter_uniforms(seed: int, trials, step: int):
    """Uniforms in [0, 1) indexed by (seed, trial, step), order-independent.

    trials may be an int array of trial indices or a scalar; the value at
    each position depends only on the triple, never on array layout.
    """
    with np.errstate(over="ignore"):
        t = np.asarray(trials, dtype=np.uint64)
        z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) ^ (t * _GOLDEN)
        z = _mix(z) ^ (np.uint64(step) * _STEP_SALT)
        z = _mix(z)
    return (z >> np.uint64(11)).astype(np.float64) / _TWO53


@dataclass(frozen=True)
class TransitionKernel:
    """Row-stochastic kernel p(x, y) = c(x, y) / c(x) in padded-array form."""

    graph: WeightedGraph
    neighbors: np.ndarray      # (V, maxdeg) int, padded with -1
    probs: np.ndarray          # (V, maxdeg) float, padded with 0
    cumprobs: np.ndarray       # (V, maxdeg) float, padded with +inf
    degrees: np.ndarray        # (V,) int

    def row(self, x):
        """List of (neighbor, probability) at vertex x."""
        out = []
        for j in range(self.neighbors.shape[1]):
            if self.neighbors[x, j] < 0:
                break
            out.append((int(self.neighbors[x, j]), float(self.probs[x, j])))
        return out

    def probability(self, x, y):
        for nbr, p in self.row(x):
            if nbr == y:
                return p
        return 0.0


def kernel_from_graph(graph: WeightedGraph) -> TransitionKernel:
    """Build the kernel and check row-stochasticity and reversibility."""
    weights = graph.vertex_weights
    if np.any(weights <= 0):
        bad = int(np.argmin(weights))
        raise ValueError(f"vertex {bad} has no edges; the walk is undefined there")
    maxdeg = max(len(a) for a in graph.adjacency)
    nbrs = np.full((graph.n_vertices, maxdeg), -1, dtype=int)
    probs = np.zeros((graph.n_vertices, maxdeg))
    for x, adj in enumerate(graph.adjacency):
        for j, (y, c) in enumerate(sorted(adj)):
            nbrs[x, j] = y
            probs[x, j] = c / weights[x]
    row_sums = probs.sum(axis=1)
    if np.max(np.abs(row_sums - 1.0)) > 1e-12:
        raise ValueError("transition rows failed to normalize to 1")
    for x, y, c in graph.edges:
        flux_xy = weights[x] * (c / weights[x])
        flux_yx = weights[y] * (c / weights[y])
        if abs(flux_xy - flux_yx) > 1e-12 * max(flux_xy, 1.0):
            raise ValueError(f"detailed balance broken on edge ({x},{y})")
    cum = np.cumsum(probs, axis=1)
    cum[nbrs < 0] = np.inf
    degrees = np.sum(nbrs >= 0, axis=1)
    return TransitionKernel(graph, nbrs, probs, cum, degrees)


@dataclass(frozen=True)
class WalkStats:
    """Counts from a batch of simulated walks, reproducible from the seed."""

    seed: int
    start: int
    steps: int
    trials: int
    edge_counts: dict          # (x, y) -> ordered traversal count
    visit_counts: np.ndarray   # occupancy over times 1..steps

    @property
    def total_transitions(self):
        return sum(self.edge_counts.values())

    def to_dict(self):
        return {
            "seed": self.seed,
            "start": self.start,
            "steps": self.steps,
            "trials": self.trials,
            "edge_counts": {f"{x}->{y}": int(n)
                            for (x, y), n in sorted(self.edge_counts.items())},
            "visit_counts": [int(v) for v in self.visit_counts],
        }


def simulate(kernel: TransitionKernel, start: int, steps: int, trials: int,
             seed: int) -> WalkStats:
    """Run `trials` independent walks of `steps` moves from `start`."""
    if steps < 1 or trials < 1:
        raise ValueError("steps and trials must both be >= 1")
    g = kernel.graph
    positions = np.full(trials, start, dtype=int)
    trial_idx = np.arange(trials, dtype=np.uint64)
    counts = np.zeros((g.n_vertices, g.n_vertices), dtype=np.int64)
    visits = np.zeros(g.n_vertices, dtype=np.int64)
    for step in range(steps):
        u = counter_uniforms(seed, trial_idx, step)
        rows = kernel.cumprobs[positions]
        choice = np.sum(u[:, None] >= rows, axis=1)
        # cumulative rows can fall an ulp short of 1; never step off the row
        choice = np.minimum(choice, kernel.degrees[positions] - 1)
        nxt = kernel.neighbors[positions, choice]
        np.add.at(counts, (positions, nxt), 1)
        np.add.at(visits, nxt, 1)
        positions = nxt
    edge_counts = {(int(x), int(y)): int(counts[x, y])
                   for x, y in zip(*np.nonzero(counts))}
    return WalkStats(seed, start, steps, trials, edge_counts, visits)


@dataclass(frozen=True)
class FrequencyCheck:
    """Empirical transition frequencies against kernel probabilities."""

    rows: tuple          # (x, y, exact_p, empirical_p, n_exits, z_score)
    sigma_band: float
    min_exits: int

    @property
    def all_within_band(self):
        return all(r[5] <= self.sigma_band for r in self.rows)

    def to_rows(self):
        return [list(r) for r in self.rows]


def frequency_check(stats: WalkStats, kernel: TransitionKernel,
                    sigma_band: float = 4.0, min_exits: int = 1000) -> FrequencyCheck:
    """Compare observed transition frequencies with exact probabilities.

    Vertices with fewer than min_exits observed exits are skipped; each
    remaining ordered edge gets a binomial z-score, and the check passes
    when every score is within the sigma band. Deterministic transitions
    (p = 0 or 1) score 0 when matched exactly and infinity otherwise.
    """
    exits = {}
    for (x, _y), n in stats.edge_counts.items():
        exits[x] = exits.get(x, 0) + n
    rows = []
    for x, n_exits in sorted(exits.items()):
        if n_exits < min_exits:
            continue
        for y, p in kernel.row(x):
            emp = stats.edge_counts.get((x, y), 0) / n_exits
            var = p * (1.0 - p) / n_exits
            if var == 0:
                z = 0.0 if emp == p else float("inf")
            else:
                z = abs(emp - p) / sqrt(var)
            rows.append((x, y, p, emp, n_exits, z))
    return FrequencyCheck(tuple(rows), sigma_band, min_exits)


def apply_transfer(kernel: TransitionKernel, f: EnergyVector) -> EnergyVector:
    """(T f)(x) = sum_y p(x, y) f(y), with frontier rows renormalized."""
    padded = np.where(kernel.neighbors >= 0, kernel.neighbors, 0)
    gathered = f.values[padded]
    out = np.sum(kernel.probs * gathered, axis=1)
    return EnergyVector(kernel.graph, out)


@dataclass(frozen=True)
class TransferIterateResult:
    """Iteration record for repeated application of the transfer operator."""

    iterate: EnergyVector
    iterations: int
    converged: bool
    last_delta: float             # sup-norm change at the final step
    monotone_interior: bool       # interior values never decreased (to 1e-9)
    min_interior_increment: float
    harmonicity_residual: float   # sup |Lap T^k f| over interior vertices

    def to_dict(self):
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "last_delta": self.last_delta,
            "monotone_interior": self.monotone_interior,
            "min_interior_increment": self.min_interior_increment,
            "harmonicity_residual": self.harmonicity_residual,
        }


def transfer_iterate(kernel: TransitionKernel, f: EnergyVector,
                     k_max: int = 10000, tol: float = 1e-10) -> TransferIterateResult:
    """Iterate T until the sup-norm change drops below tol (or k_max).

    The monotonicity record tracks the minimum interior increment across
    all iterations; for defect eigenvectors the iterates increase
    pointwise on the interior, up to rounding.
    """
    from .energy import apply_laplacian

    interior = kernel.graph.interior_mask
    scale = float(np.max(np.abs(f.values))) + 1.0
    current = f
    delta = float("inf")
    min_increment = float("inf")
    k = 0
    while k < k_max:
        nxt = apply_transfer(kernel, current)
        delta = float(np.max(np.abs(nxt.values - current.values)))
        inc = float(np.min((nxt.values - current.values)[interior]))
        min_increment = min(min_increment, inc)
        current = nxt
        k += 1
        if delta < tol:
            break
    lap = apply_laplacian(current).values
    residual = float(np.max(np.abs(lap[interior])))
    return TransferIterateResult(
        current, k, delta < tol, delta,
        min_increment >= -1e-9 * scale, min_increment, residual)
