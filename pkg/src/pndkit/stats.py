"""Null ensembles and statistical comparison of decompositions.

Permutation and bootstrap procedures are deterministic given a seed and
use the add-one estimator, so no reported p can ever be exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import EmptyPopulation, LengthMismatch, ZeroVariance
from .lattice import Multiplex, decompose_network
from .nullmodels import _entropy, _stream, maslov_sneppen_rewire
from .pathstats import ModeProportions, mode_proportions


@dataclass(frozen=True)
class PairedSample:
    """Real observations next to their nulls.

    ``paired`` means one null per observation (sign-flip testing applies);
    otherwise ``null_values`` is a flat population for empirical p-values.
    """

    real_values: np.ndarray
    null_values: np.ndarray
    paired: bool = True

    def __post_init__(self):
        real = np.asarray(self.real_values, dtype=float)
        null = np.asarray(self.null_values, dtype=float)
        if not (np.isfinite(real).all() and np.isfinite(null).all()):
            raise ValueError("samples must be finite")
        if self.paired and real.shape != null.shape:
            raise LengthMismatch(
                f"paired samples differ in length: {real.size} vs {null.size}"
            )
        object.__setattr__(self, "real_values", real)
        object.__setattr__(self, "null_values", null)


@dataclass(frozen=True)
class StatReport:
    """Outcome of one comparison."""

    p_value: float
    t_statistic: float
    degrees_of_freedom: int
    hedges_g: float
    ci_lower: float
    ci_upper: float
    n_permutations: int
    test_mode: str


def null_decompositions(
    m: Multiplex, n_nulls: int, seed=None, swap_factor: float = 10.0
) -> list[ModeProportions]:
    """Decompositions of degree-preserving rewired copies of a multiplex.

    Every replicate rewires each layer independently, so the null keeps
    all degree sequences while destroying the layers' shared structure.
    """
    if n_nulls < 1:
        raise ValueError(f"need at least one null, got {n_nulls}")
    entropy = _entropy(seed)
    out = []
    for rep in range(n_nulls):
        layers = [
            maslov_sneppen_rewire(layer, swap_factor, _stream(entropy, rep, li))
            for li, layer in enumerate(m.layers)
        ]
        res = decompose_network(Multiplex(layers, m.layer_names))
        out.append(mode_proportions(res))
    return out


def _finite_arrays(real, null) -> tuple[np.ndarray, np.ndarray]:
    real = np.asarray(real, dtype=float)
    null = np.asarray(null, dtype=float)
    if not (np.isfinite(real).all() and np.isfinite(null).all()):
        raise ValueError("samples must be finite")
    return real, null


def permutation_paired_test(
    real, null, n_perm: int = 10000, seed=None
) -> StatReport:
    """Paired t-test with a sign-flip permutation null.

    The returned p is two-sided with the add-one estimator, so its
    resolution is 1/(n_perm + 1). Effect size and its bootstrap interval
    come from :func:`hedges_g` on the same inputs.
    """
    real, null = _finite_arrays(real, null)
    if real.shape != null.shape:
        raise LengthMismatch(
            f"paired samples differ in length: {real.size} vs {null.size}"
        )
    n = real.size
    if n < 2:
        raise LengthMismatch("paired test needs at least 2 observations")
    diffs = real - null

    def t_of(mean: float, sd: float) -> float:
        if sd == 0:
            return 0.0 if mean == 0 else math.copysign(math.inf, mean)
        return mean / (sd / math.sqrt(n))

    t_obs = t_of(float(diffs.mean()), float(diffs.std(ddof=1)))

    rng = np.random.default_rng(seed)
    signs = rng.integers(0, 2, size=(n_perm, n)) * 2 - 1
    flipped = signs * diffs
    means = flipped.mean(axis=1)
    sds = flipped.std(axis=1, ddof=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ts = means * math.sqrt(n) / sds
    degenerate = sds == 0
    ts[degenerate] = np.where(means[degenerate] == 0, 0.0, np.inf)
    exceed = int((np.abs(ts) >= abs(t_obs)).sum())
    p = (exceed + 1) / (n_perm + 1)

    g, lo, hi = hedges_g(real, null, seed=seed)
    return StatReport(
        p_value=p,
        t_statistic=t_obs,
        degrees_of_freedom=n - 1,
        hedges_g=g,
        ci_lower=lo,
        ci_upper=hi,
        n_permutations=n_perm,
        test_mode="paired_permutation",
    )


def empirical_p_vs_population(observed: float, null_population, side: str = "greater") -> float:
    """Add-one rank p of one observation against a null population.

    Ties count as at least as extreme. ``side`` is one of greater, less,
    two-sided.
    """
    pop = np.asarray(null_population, dtype=float)
    if pop.size == 0:
        raise EmptyPopulation("null population is empty")
    if not (np.isfinite(pop).all() and math.isfinite(observed)):
        raise ValueError("population and observation must be finite")
    n = pop.size
    p_greater = (int((pop >= observed).sum()) + 1) / (n + 1)
    p_less = (int((pop <= observed).sum()) + 1) / (n + 1)
    if side == "greater":
        return p_greater
    if side == "less":
        return p_less
    if side == "two-sided":
        return min(1.0, 2.0 * min(p_greater, p_less))
    raise ValueError(f"side must be greater, less or two-sided, got {side!r}")


def _pooled_g(m1, s1, n1, m2, s2, n2, correction: float):
    df = n1 + n2 - 2
    pooled = np.sqrt(((n1 - 1) * s1**2 + (n2 - 1) * s2**2) / df)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (m1 - m2) / pooled * correction


def hedges_g(
    real,
    null,
    ci_method: str = "bias-corrected",
    n_boot: int = 10000,
    seed=None,
    confidence: float = 0.95,
) -> tuple[float, float, float]:
    """Bias-corrected standardised mean difference with a bootstrap CI.

    Uses the pooled standard deviation and the small-sample correction
    ``1 - 3/(4 df - 1)``. The interval resamples both groups
    independently; ``ci_method`` is ``bias-corrected`` (default) or
    ``percentile``, and the interval is widened to contain the point
    estimate whenever resampling noise would exclude it.
    """
    real, null = _finite_arrays(real, null)
    n1, n2 = real.size, null.size
    if n1 < 2 or n2 < 2:
        raise LengthMismatch("effect size needs at least 2 values per group")
    if ci_method not in ("bias-corrected", "percentile"):
        raise ValueError(f"unknown ci_method {ci_method!r}")
    df = n1 + n2 - 2
    correction = 1.0 - 3.0 / (4.0 * df - 1.0)
    mean_diff = float(real.mean() - null.mean())
    pooled = math.sqrt(
        ((n1 - 1) * real.var(ddof=1) + (n2 - 1) * null.var(ddof=1)) / df
    )
    if pooled == 0:
        if mean_diff == 0:
            return 0.0, 0.0, 0.0
        raise ZeroVariance("both groups are constant but their means differ")
    g = mean_diff / pooled * correction

    rng = np.random.default_rng(seed)
    res1 = real[rng.integers(0, n1, size=(n_boot, n1))]
    res2 = null[rng.integers(0, n2, size=(n_boot, n2))]
    gs = _pooled_g(
        res1.mean(axis=1),
        res1.std(axis=1, ddof=1),
        n1,
        res2.mean(axis=1),
        res2.std(axis=1, ddof=1),
        n2,
        correction,
    )
    gs = gs[np.isfinite(gs)]
    if gs.size == 0:
        return g, g, g

    alpha = 1.0 - confidence
    if ci_method == "bias-corrected":
        frac_below = float((gs < g).mean())
        if 0.0 < frac_below < 1.0:
            z0 = norm.ppf(frac_below)
            q_lo = norm.cdf(2 * z0 + norm.ppf(alpha / 2))
            q_hi = norm.cdf(2 * z0 + norm.ppf(1 - alpha / 2))
        else:
            # bias correction degenerates, fall back to plain percentiles
            q_lo, q_hi = alpha / 2, 1 - alpha / 2
    else:
        q_lo, q_hi = alpha / 2, 1 - alpha / 2
    lo, hi = np.quantile(gs, [q_lo, q_hi])
    return g, min(float(lo), g), max(float(hi), g)
