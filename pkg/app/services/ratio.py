import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional

from app.core.config import settings
from app.core.exceptions import GuardExceededError, UndefinedRatioError, ValidationError
from app.core.parallel import parallel_map
from app.models.support import Support

logger = logging.getLogger(__name__)

SetFunction = Callable[[Support], float]


@dataclass(frozen=True)
class RatioSearch:
    value: float  # +inf when every pair was undefined
    pairs: int
    skipped_pairs: int
    argmin: Optional[tuple] = None  # (L, S) attaining the minimum


def submodularity_ratio_pair(f: SetFunction, L: Support, S: Support) -> float:
    """gamma_{L,S} = sum_{j in S}[f(L u {j}) - f(L)] / [f(L u S) - f(L)]."""
    if not L.isdisjoint(S):
        raise ValidationError(f"L and S must be disjoint, got L={L} S={S}")
    base = f(L)
    denominator = f(L.union(S)) - base
    if denominator <= settings.RATIO_DENOMINATOR_EPS:
        raise UndefinedRatioError(f"undefined ratio for L={L} S={S}: joint gain {denominator:.3e}")
    numerator = sum(f(L.add(j)) - base for j in S)
    return numerator / denominator


def _subsets(items: List[int], max_size: int, min_size: int = 0) -> Iterable[tuple]:
    for size in range(min_size, min(max_size, len(items)) + 1):
        yield from itertools.combinations(items, size)


def exhaustive_ratio_search(f: SetFunction, U: Support, k: int, p: int,
                            exclude: Iterable[int] = (), threads: Optional[int] = None) -> RatioSearch:
    """Minimum of gamma_{L,S} over L subset of U and disjoint S with 1 <= |S| <= k.

    Pairs with a zero joint gain carry no constraint and are skipped (and counted).
    """
    if p > settings.EXHAUSTIVE_P_LIMIT or len(U) > settings.EXHAUSTIVE_U_LIMIT:
        raise GuardExceededError(
            f"exhaustive submodularity ratio needs p <= {settings.EXHAUSTIVE_P_LIMIT} and "
            f"|U| <= {settings.EXHAUSTIVE_U_LIMIT}, got p={p}, |U|={len(U)}"
        )
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    excluded = set(exclude)
    ground = [j for j in range(p) if j not in excluded]

    def search_from(L_indices: tuple) -> RatioSearch:
        L = Support(L_indices, p)
        outside = [j for j in ground if j not in L]
        best, best_pair, pairs, skipped = math.inf, None, 0, 0
        for S_indices in _subsets(outside, k, min_size=1):
            pairs += 1
            try:
                ratio = submodularity_ratio_pair(f, L, Support(S_indices, p))
            except UndefinedRatioError:
                skipped += 1
                continue
            if ratio < best:
                best, best_pair = ratio, (L_indices, S_indices)
        return RatioSearch(best, pairs, skipped, best_pair)

    U_items = [j for j in U if j not in excluded]
    results = parallel_map(search_from, list(_subsets(U_items, len(U_items))), threads)

    value, argmin = math.inf, None
    for result in results:  # enumeration order, so the reported argmin is stable
        if result.value < value:
            value, argmin = result.value, result.argmin
    search = RatioSearch(
        value=value,
        pairs=sum(r.pairs for r in results),
        skipped_pairs=sum(r.skipped_pairs for r in results),
        argmin=argmin,
    )
    logger.debug(f"gamma_(U={U}, k={k}) = {value:.6g} over {search.pairs} pairs ({search.skipped_pairs} skipped)")
    return search


def submodularity_ratio_exhaustive(f: SetFunction, U: Support, k: int, p: int,
                                   exclude: Iterable[int] = (), threads: Optional[int] = None) -> float:
    return exhaustive_ratio_search(f, U, k, p, exclude=exclude, threads=threads).value
