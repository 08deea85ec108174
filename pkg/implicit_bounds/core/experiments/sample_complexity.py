"""Dataset size each approach needs to reach a target generalization bound."""

import math
from dataclasses import dataclass

from ..bounds.generalization import BoundInputs, generalization_bound
from ..errors import UnachievableTargetError

MAX_N = 10 ** 18


@dataclass(frozen=True)
class SampleComplexity:
    n_pred: int
    n_vimp: int

    @property
    def ratio(self) -> float:
        return self.n_pred / self.n_vimp


def required_n(target_bound: float, template: BoundInputs) -> int:
    """Smallest n with generalization_bound(template at n) <= target_bound, by bisection.

    Raises:
        UnachievableTargetError: target <= 0, or not reached by n = 1e18
    """
    if not (math.isfinite(target_bound) and target_bound > 0):
        raise UnachievableTargetError(f"target bound must be finite and > 0, got {target_bound!r}")
    if generalization_bound(template.with_n(MAX_N)) > target_bound:
        raise UnachievableTargetError(f"target bound {target_bound!r} is not reached by n = {MAX_N}")

    lo, hi = 1, 1
    while generalization_bound(template.with_n(hi)) > target_bound:
        lo, hi = hi, min(hi * 2, MAX_N)
    if generalization_bound(template.with_n(lo)) <= target_bound:
        return lo
    # bound(lo) > target >= bound(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if generalization_bound(template.with_n(mid)) <= target_bound:
            hi = mid
        else:
            lo = mid
    return hi


def sample_complexity_ratio(target_bound: float, pred: BoundInputs, vimp: BoundInputs) -> SampleComplexity:
    """n needed by the prediction-based approach and by the violation approach.

    ratio = n_pred / n_vimp; both n are the smallest integers meeting the target.
    """
    return SampleComplexity(n_pred=required_n(target_bound, pred), n_vimp=required_n(target_bound, vimp))
