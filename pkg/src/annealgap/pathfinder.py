"""Optimal annealing schedules on a rasterized gap landscape.

Each raster cell is a node; 4-neighbour edges carry the adiabatic time cost

    Gamma step:  (1/j) (2 - kappa) |dGamma| / Delta^2
    kappa step:  (1/j) (1 - Gamma) |dkappa| / Delta^2

and the schedule runs from (Gamma, kappa) = (1, 1) to (0, 1).
"""
from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass, field

import numpy as np

from .catalysis import ScalingFit, fit_power_law
from .exceptions import AnnealGapError
from .spectrum import GapLandscape, scan_landscape

__all__ = [
    "SENTINEL_COST",
    "GAP_FLOOR",
    "ScheduleGraph",
    "PathResult",
    "build_graph",
    "shortest_schedule",
    "schedule_time",
    "ridge_axis",
    "ResolutionWarning",
    "tstar_scaling",
]

GAP_FLOOR = 1e-14
SENTINEL_COST = 1e28
_CONVENTIONS = ("destination", "source", "average")


class ResolutionWarning(UserWarning):
    """Raised when a schedule time is not converged in the raster spacing."""


@dataclass(frozen=True)
class ScheduleGraph:
    """4-connected raster graph.

    ``gamma_weights[a, b]`` is the cost of the step from cell (a+1, b) to
    (a, b) (decreasing Gamma) and ``gamma_weights_up[a, b]`` the reverse step;
    ``kappa_weights`` / ``kappa_weights_up`` are the analogues along kappa.
    """

    gamma_axis: np.ndarray
    kappa_axis: np.ndarray
    inv_gap_sq: np.ndarray
    gamma_weights: np.ndarray
    gamma_weights_up: np.ndarray
    kappa_weights: np.ndarray
    kappa_weights_up: np.ndarray
    start: tuple
    goal: tuple
    flagged: tuple = ()

    @property
    def shape(self):
        return self.inv_gap_sq.shape

    def neighbours(self, cell):
        """Yield ``(neighbour, weight)`` pairs for a cell."""
        a, b = cell
        n_g, n_k = self.shape
        if a > 0:
            yield (a - 1, b), self.gamma_weights[a - 1, b]
        if a < n_g - 1:
            yield (a + 1, b), self.gamma_weights_up[a, b]
        if b > 0:
            yield (a, b - 1), self.kappa_weights[a, b - 1]
        if b < n_k - 1:
            yield (a, b + 1), self.kappa_weights_up[a, b]

    def weight(self, src, dst):
        for cell, w in self.neighbours(src):
            if cell == tuple(dst):
                return float(w)
        raise ValueError(f"{src} and {dst} are not 4-neighbours")


def _endpoint(cost, convention, axis):
    """Cost factor for a step (lower index <-> upper index) along ``axis``."""
    lower = np.take(cost, range(cost.shape[axis] - 1), axis=axis)
    upper = np.take(cost, range(1, cost.shape[axis]), axis=axis)
    if convention == "destination":
        return lower, upper  # step down lands on lower, step up lands on upper
    if convention == "source":
        return upper, lower
    mean = 0.5 * (lower + upper)
    return mean, mean


def build_graph(landscape: GapLandscape, convention="destination", gaps=None) -> ScheduleGraph:
    """Edge weights from a gap landscape (or an explicit Delta01 array ``gaps``)."""
    if convention not in _CONVENTIONS:
        raise ValueError(f"convention must be one of {_CONVENTIONS}")
    gs = np.asarray(landscape.gamma_axis, dtype=float)
    ks = np.asarray(landscape.kappa_axis, dtype=float)
    if gs.size == 0 or ks.size == 0:
        raise ValueError("empty landscape")
    delta = np.asarray(landscape.delta01 if gaps is None else gaps, dtype=float)
    if delta.shape != (gs.size, ks.size):
        raise ValueError("gap array does not match the axes")
    small = ~(delta >= GAP_FLOOR)  # also catches NaN
    j = float(landscape.j)
    with np.errstate(divide="ignore"):
        inv = np.where(small, SENTINEL_COST, 1.0 / np.where(small, 1.0, delta) ** 2)
    flagged = tuple(zip(*np.nonzero(small)))
    down_g, up_g = _endpoint(inv, convention, 0)
    down_k, up_k = _endpoint(inv, convention, 1)
    dg = np.diff(gs)[:, None] * (2.0 - ks)[None, :] / j
    dk = np.diff(ks)[None, :] * (1.0 - gs)[:, None] / j
    return ScheduleGraph(
        gs, ks, inv,
        dg * down_g, dg * up_g, dk * down_k, dk * up_k,
        start=(gs.size - 1, ks.size - 1), goal=(0, ks.size - 1),
        flagged=tuple((int(a), int(b)) for a, b in flagged),
    )


@dataclass(frozen=True)
class PathResult:
    cells: list
    total_time: float
    cumulative: np.ndarray = field(repr=False)
    controls: np.ndarray = field(repr=False)  # (Gamma, kappa) per cell


def shortest_schedule(graph: ScheduleGraph, start=None, goal=None, allowed=None) -> PathResult:
    """Label-setting shortest path with a binary heap.

    Ties in tentative cost are broken by the lexicographic cell index, so the
    result is deterministic.  ``allowed`` optionally masks the usable cells.
    """
    start = tuple(graph.start if start is None else start)
    goal = tuple(graph.goal if goal is None else goal)
    mask = np.ones(graph.shape, dtype=bool) if allowed is None else np.asarray(allowed, bool)
    if not (mask[start] and mask[goal]):
        raise AnnealGapError("start or goal cell is masked out")
    dist = np.full(graph.shape, np.inf)
    pred = {}
    dist[start] = 0.0
    heap = [(0.0, start)]
    done = np.zeros(graph.shape, dtype=bool)
    while heap:
        d, cell = heapq.heappop(heap)
        if done[cell]:
            continue
        done[cell] = True
        if cell == goal:
            break
        for nb, w in graph.neighbours(cell):
            if not mask[nb] or done[nb]:
                continue
            nd = d + w
            if nd < dist[nb] or (nd == dist[nb] and cell < pred.get(nb, cell)):
                dist[nb] = nd
                pred[nb] = cell
                heapq.heappush(heap, (nd, nb))
    if not done[goal]:
        raise AnnealGapError(f"goal {goal} unreachable from {start}")
    cells = [goal]
    while cells[-1] != start:
        cells.append(pred[cells[-1]])
    cells.reverse()
    steps = [graph.weight(a, b) for a, b in zip(cells[:-1], cells[1:])]
    cumulative = np.concatenate(([0.0], np.cumsum(steps)))
    controls = np.array([(graph.gamma_axis[a], graph.kappa_axis[b]) for a, b in cells])
    return PathResult(cells, float(cumulative[-1]), cumulative, controls)


def schedule_time(j, gamma_grid, kappa_grid, p=3, convention="destination", pmap=map):
    """Scan a landscape and return the optimal schedule on it."""
    land = scan_landscape(j, p, gamma_grid, kappa_grid, k=2, pmap=pmap)
    return shortest_schedule(build_graph(land, convention))


def ridge_axis(n=201, band=(0.55, 0.68), n_band=0):
    """Uniform Gamma axis on [0, 1], optionally densified over ``band``."""
    axis = np.linspace(0.0, 1.0, n)
    if n_band:
        axis = np.union1d(axis, np.linspace(band[0], band[1], n_band))
    return axis


def tstar_scaling(j_list, raster=201, p=3, n_band=0, check_resolution=False,
                  pmap=map) -> ScalingFit:
    """Power-law fit of the optimal schedule time against j.

    With ``check_resolution`` each size is also solved on a raster of doubled
    density; a shift above 10 % triggers a ResolutionWarning, recorded in
    ``extras['resolution_shift']``.
    """
    times, shifts = [], {}
    for j in j_list:
        gs = ridge_axis(raster, n_band=n_band)
        ks = np.linspace(0.0, 1.0, raster)
        t = schedule_time(j, gs, ks, p, pmap=pmap).total_time
        times.append(t)
        if check_resolution:
            fine = schedule_time(j, ridge_axis(2 * raster - 1, n_band=2 * n_band),
                                 np.linspace(0.0, 1.0, 2 * raster - 1), p, pmap=pmap).total_time
            shift = abs(fine - t) / t
            shifts[j] = shift
            if shift > 0.1:
                warnings.warn(f"schedule time at j={j} moved by {shift:.0%} when the raster was doubled",
                              ResolutionWarning, stacklevel=2)
    return fit_power_law(list(j_list), times, extras={"resolution_shift": shifts, "raster": raster})
