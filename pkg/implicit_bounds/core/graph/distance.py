"""Distance from a datapoint to the graph {(x, f(x))} of the explicit dynamics.

The search minimizes ||(z - z_i, v - v_i, f(z, v) - y_i)|| over states in the
data box enlarged by 20%: a coarse grid, then windows of +-2 cells around the
incumbent that shrink tenfold per round. Every candidate is a state x with
output f(x), so the incumbent is always a graph point.

The graph is two half-planes (free fall and contact) glued along a crease, so
the projections onto both planes and onto the crease are added as seeds, along
with the datapoint's own state and the two free-fall/contact witnesses
(z + d_z, v) and (z + d_z', v). With these seeds the search is exact up to
rounding; the grid keeps it honest for states the seeds miss.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..dynamics.contact_model import DomainBounds, ModelParams, end_gap_array, explicit_velocity_array, neg
from ..losses.losses import Datapoint


@dataclass(frozen=True)
class GraphGrid:
    """Grid schedule of the graph-distance search.

    Attributes:
        coarse_points: points per axis of the coarse grid
        window_points: points per axis of each refinement window
        window_cells: half-width of a window in cells of the previous round
        final_resolution: stop refining once the cell size is at most this
        max_rounds: hard cap on refinement rounds
        enlarge: box enlargement on each side, as a fraction of the width
        chunk: queries evaluated together on the coarse grid
    """

    coarse_points: int = 201
    window_points: int = 41
    window_cells: int = 2
    final_resolution: float = 1e-6
    max_rounds: int = 8
    enlarge: float = 0.2
    chunk: int = 64

    def __post_init__(self):
        if self.coarse_points < 3 or self.window_points < 3:
            raise ValueError("grid needs at least 3 points per axis")
        if not self.final_resolution > 0:
            raise ValueError(f"final_resolution must be > 0, got {self.final_resolution}")
        if self.max_rounds < 0:
            raise ValueError(f"max_rounds must be >= 0, got {self.max_rounds}")


@dataclass(frozen=True)
class GraphDistanceResult:
    distance: float
    nearest: Datapoint
    resolution: float
    inconclusive: bool = False


@dataclass
class GraphDistanceBatch:
    """Vectorized oracle output; nearest_* give the minimizing graph point."""

    distance: np.ndarray
    nearest_z: np.ndarray
    nearest_v: np.ndarray
    nearest_y: np.ndarray
    resolution: float
    inconclusive: np.ndarray

    def result(self, i: int) -> GraphDistanceResult:
        return GraphDistanceResult(
            distance=float(self.distance[i]),
            nearest=Datapoint.of(self.nearest_z[i], self.nearest_v[i], self.nearest_y[i]),
            resolution=self.resolution,
            inconclusive=bool(self.inconclusive[i]),
        )


def seed_states(params: ModelParams, z, v, y) -> Tuple[np.ndarray, np.ndarray]:
    """Candidate states per query, shape (n, 6) each for z and v."""
    dt, a_dt = params.dt, params.a_grav * params.dt
    z, v, y = (np.asarray(a, dtype=float) for a in (z, v, y))

    # Witnesses: lift into free fall, or shift so the step ends on the ground.
    d_z = neg(end_gap_array(params, z, v - a_dt))
    d_z_next = -end_gap_array(params, z, y)

    # Free-fall plane y = v - a dt: move v halfway along the residual.
    v_free = v + 0.5 * (y - v + a_dt)

    # Contact plane y = (theta - z)/dt: project along (1/dt, 0, 1).
    s = end_gap_array(params, z, y) / dt
    z_contact = z - s * (1.0 / dt) / (1.0 / (dt * dt) + 1.0)

    # Crease v - a dt = (theta - z)/dt = u.
    u = (dt * (params.theta - z) + v - a_dt + y) / (dt * dt + 2.0)

    zs = np.stack([z, z + d_z, z + d_z_next, z, z_contact, params.theta - u * dt], axis=-1)
    vs = np.stack([v, v, v, v_free, v, u + a_dt], axis=-1)
    return zs, vs


def _squared(params: ModelParams, zc, vc, z, v, y):
    f = explicit_velocity_array(params, zc, vc)
    return (zc - z) ** 2 + (vc - v) ** 2 + (f - y) ** 2


class _CoarseGrid:
    """The coarse grid with f precomputed once per oracle call."""

    def __init__(self, params: ModelParams, bounds: DomainBounds, grid: GraphGrid):
        self.box = bounds.search_box(grid.enlarge)
        z_lo, z_hi, v_lo, v_hi = self.box
        zc = np.linspace(z_lo, z_hi, grid.coarse_points)
        vc = np.linspace(v_lo, v_hi, grid.coarse_points)
        Z, V = np.meshgrid(zc, vc, indexing="ij")
        self.z = Z.ravel()
        self.v = V.ravel()
        self.f = explicit_velocity_array(params, Z, V).ravel()
        self.hz = zc[1] - zc[0]
        self.hv = vc[1] - vc[0]

    def nearest(self, z, v, y):
        d2 = (self.z[None, :] - z[:, None]) ** 2 + (self.v[None, :] - v[:, None]) ** 2 + (self.f[None, :] - y[:, None]) ** 2
        idx = np.argmin(d2, axis=1)
        return d2[np.arange(idx.size), idx], self.z[idx], self.v[idx]


def _search_chunk(params: ModelParams, coarse: _CoarseGrid, grid: GraphGrid, z, v, y):
    n = z.shape[0]
    rows = np.arange(n)
    best_d2, best_z, best_v = coarse.nearest(z, v, y)

    zs, vs = seed_states(params, z, v, y)
    d2s = _squared(params, zs, vs, z[:, None], v[:, None], y[:, None])
    pick = np.argmin(d2s, axis=1)
    seed_better = d2s[rows, pick] < best_d2
    best_d2 = np.where(seed_better, d2s[rows, pick], best_d2)
    best_z = np.where(seed_better, zs[rows, pick], best_z)
    best_v = np.where(seed_better, vs[rows, pick], best_v)

    hz, hv = coarse.hz, coarse.hv
    offsets = np.linspace(-grid.window_cells, grid.window_cells, grid.window_points)
    shrink = (grid.window_points - 1) / (2.0 * grid.window_cells)
    rounds = 0
    while max(hz, hv) > grid.final_resolution and rounds < grid.max_rounds:
        wz = best_z[:, None, None] + hz * offsets[None, :, None]
        wv = best_v[:, None, None] + hv * offsets[None, None, :]
        flat = _squared(params, wz, wv, z[:, None, None], v[:, None, None], y[:, None, None]).reshape(n, -1)
        idx = np.argmin(flat, axis=1)
        cand = flat[rows, idx]
        iz, iv = np.unravel_index(idx, (grid.window_points, grid.window_points))
        # Only ever accept improvements, so refinement is monotone.
        better = cand < best_d2
        best_d2 = np.where(better, cand, best_d2)
        best_z = np.where(better, best_z + hz * offsets[iz], best_z)
        best_v = np.where(better, best_v + hv * offsets[iv], best_v)
        hz /= shrink
        hv /= shrink
        rounds += 1
    return best_z, best_v, float(max(hz, hv))


def graph_distances(
    params: ModelParams,
    z,
    v,
    y,
    bounds: DomainBounds,
    grid: GraphGrid = GraphGrid(),
) -> GraphDistanceBatch:
    """Graph distance for many datapoints at once.

    Queries are processed in chunks of grid.chunk; the coarse grid and its f
    values are built once.

    Returns:
        GraphDistanceBatch; inconclusive marks queries whose minimizer sits on
        or outside the search box.

    Raises:
        ValueError: a datapoint is not finite
    """
    z, v, y = np.broadcast_arrays(*(np.atleast_1d(np.asarray(a, dtype=float)) for a in (z, v, y)))
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(v)) and np.all(np.isfinite(y))):
        raise ValueError("graph distance needs finite datapoints")
    n = z.shape[0]

    coarse = _CoarseGrid(params, bounds, grid)
    best_z = np.empty(n)
    best_v = np.empty(n)
    resolution = max(coarse.hz, coarse.hv)
    for start in range(0, n, grid.chunk):
        sl = slice(start, min(start + grid.chunk, n))
        best_z[sl], best_v[sl], resolution = _search_chunk(params, coarse, grid, z[sl], v[sl], y[sl])

    z_lo, z_hi, v_lo, v_hi = coarse.box
    inconclusive = (best_z <= z_lo) | (best_z >= z_hi) | (best_v <= v_lo) | (best_v >= v_hi)
    nearest_y = explicit_velocity_array(params, best_z, best_v)
    distance = np.sqrt((best_z - z) ** 2 + (best_v - v) ** 2 + (nearest_y - y) ** 2)
    return GraphDistanceBatch(
        distance=distance,
        nearest_z=best_z,
        nearest_v=best_v,
        nearest_y=nearest_y,
        resolution=resolution,
        inconclusive=inconclusive,
    )


def graph_distance(
    params: ModelParams,
    d: Datapoint,
    bounds: DomainBounds,
    grid: GraphGrid = GraphGrid(),
) -> GraphDistanceResult:
    """Euclidean distance from (x, y) to the graph of f, weighting z, v and v' equally."""
    if not d.is_finite():
        raise ValueError(f"graph distance needs a finite datapoint, got {d}")
    return graph_distances(params, d.x.z, d.x.v, d.y.v_next, bounds, grid).result(0)


def oracle_slack(distance, resolution: float):
    """Discretization allowance 2 d r + r^2 on squared distances."""
    return 2.0 * np.asarray(distance) * resolution + resolution * resolution
