"""Mean-loss landscapes over a grid of ground heights."""

from typing import Optional, Sequence

import numpy as np
import pandas as pd

from ..dynamics.contact_model import ModelParams
from ..errors import InnerSolverError, NumericalFailure
from .losses import LOSS_KINDS, Datapoint, Epsilon, evaluate_losses


def datapoints_to_arrays(data: Sequence[Datapoint]):
    """Split datapoints into (z, v, y) float arrays."""
    z = np.fromiter((d.x.z for d in data), dtype=float, count=len(data))
    v = np.fromiter((d.x.v for d in data), dtype=float, count=len(data))
    y = np.fromiter((d.y.v_next for d in data), dtype=float, count=len(data))
    return z, v, y


def mean_loss(
    params: ModelParams,
    z: np.ndarray,
    v: np.ndarray,
    y: np.ndarray,
    kind: str,
    eps: Optional[Epsilon] = None,
    impulse_bound: Optional[float] = None,
) -> float:
    """Mean of one loss over a dataset at params.theta.

    Raises:
        InnerSolverError: the loss is not finite at this theta
    """
    values = evaluate_losses(params, z, v, y, kind, eps, impulse_bound).value
    if not np.all(np.isfinite(values)):
        raise InnerSolverError(f"{kind} loss is not finite", theta=params.theta)
    return float(np.mean(values))


def loss_landscape(
    params: ModelParams,
    thetas: Sequence[float],
    data: Sequence[Datapoint],
    kind: str,
    eps: Optional[Epsilon] = None,
    impulse_bound: Optional[float] = None,
) -> pd.DataFrame:
    """Mean loss over ``data`` at each theta in ``thetas``.

    Args:
        params: model constants; params.theta is replaced by each grid value
        thetas: nonempty grid of ground heights
        data: nonempty dataset
        kind: one of "exp", "nimp", "vimp"
        eps: violation weight, required for "vimp"
        impulse_bound: half-width of the impulse set; b_lambda of the default domain when None

    Returns:
        DataFrame with columns theta, mean_loss (one row per grid value, in order)

    Raises:
        ValueError: empty grid or data, or unknown kind
        InnerSolverError: carries the offending theta
    """
    if len(thetas) == 0:
        raise ValueError("theta grid is empty")
    if len(data) == 0:
        raise ValueError("dataset is empty")
    if kind not in LOSS_KINDS:
        raise ValueError(f"Unknown loss kind {kind!r}; expected one of {LOSS_KINDS}")

    z, v, y = datapoints_to_arrays(data)
    rows = []
    for theta in thetas:
        at_theta = params.with_theta(theta)
        try:
            value = mean_loss(at_theta, z, v, y, kind, eps, impulse_bound)
        except InnerSolverError:
            raise
        except NumericalFailure as exc:
            raise InnerSolverError(str(exc), theta=float(theta)) from exc
        rows.append({"theta": float(theta), "mean_loss": value})
    return pd.DataFrame(rows, columns=["theta", "mean_loss"])
