"""Exhaustive checks of threshold optimality on small discrete populations.

A ``DiscretePopulation`` puts probability mass on finitely many score
atoms, each split between the positive and negative class.  With at most
20 atoms every one of the 2^n subset classifiers can be enumerated, which
turns three optimality statements into machine-checkable facts:

* the best F measure over all subsets is attained on a posterior
  threshold set {posterior > q} or {posterior >= q}
  (``brute_force_fbeta_max`` versus ``thresholded_fbeta_sup``),
* a posterior cut at q is cost-optimal among subsets whose total mass is
  on the matching side of its own (``local_bayes_check``),
* no subset beats the best likelihood-ratio threshold set at the minimax
  criterion by more than discreteness allows (``minimax_comparison``).

Enumeration is vectorized over bit masks: subset index sets are encoded
as integers, with bit i meaning atom i is included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metrics import ConfusionProbs, CostParams

__all__ = [
    "MAX_ATOMS",
    "DiscretePopulation",
    "SubsetClassifier",
    "LocalBayesReport",
    "MinimaxReport",
    "subset_confusion",
    "brute_force_fbeta_max",
    "thresholded_fbeta_sup",
    "local_bayes_check",
    "minimax_comparison",
    "random_population",
]

MAX_ATOMS = 20

_MASS_SUM_TOL = 1e-12
_COST_SLACK = 1e-12
_EQUALITY_TOL = 1e-12


@dataclass(frozen=True)
class DiscretePopulation:
    """Finite score population: per-atom (positive mass, negative mass) pairs.

    Masses are joint probabilities and must total 1 across all atoms and
    both classes.  Each atom needs positive total mass so its posterior is
    well defined, and both classes must be present overall.  The atom
    count is capped at ``MAX_ATOMS`` to keep full subset enumeration
    cheap.
    """

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        atoms = tuple((float(mp), float(mn)) for mp, mn in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("population needs at least one atom")
        if len(atoms) > MAX_ATOMS:
            raise ValueError(f"at most {MAX_ATOMS} atoms supported, got {len(atoms)}")
        for i, (mp, mn) in enumerate(atoms):
            if mp < 0.0 or mn < 0.0:
                raise ValueError(f"atom {i} has a negative mass")
            if mp + mn <= 0.0:
                raise ValueError(f"atom {i} has zero total mass")
        total = math.fsum(mp + mn for mp, mn in atoms)
        if abs(total - 1.0) > _MASS_SUM_TOL:
            raise ValueError(f"masses must sum to 1, got {total!r}")
        prevalence = math.fsum(mp for mp, _ in atoms)
        if not (0.0 < prevalence < 1.0):
            raise ValueError("both classes must carry positive mass")

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def prevalence(self) -> float:
        """Total positive-class mass P[A]."""
        return math.fsum(mp for mp, _ in self.atoms)

    @property
    def posteriors(self) -> tuple[float, ...]:
        """Per-atom positive-class posterior mp / (mp + mn)."""
        return tuple(mp / (mp + mn) for mp, mn in self.atoms)


@dataclass(frozen=True)
class SubsetClassifier:
    """Classifier on a discrete population: predict positive on the listed atoms."""

    included: frozenset[int]

    def __post_init__(self) -> None:
        included = frozenset(int(i) for i in self.included)
        object.__setattr__(self, "included", included)
        if any(i < 0 for i in included):
            raise ValueError("atom indices must be nonnegative")


def _check_indices(population: DiscretePopulation, classifier: SubsetClassifier) -> None:
    bad = [i for i in classifier.included if i >= population.n_atoms]
    if bad:
        raise ValueError(f"atom indices {sorted(bad)} out of range for {population.n_atoms} atoms")


def _subset_masses(population: DiscretePopulation) -> tuple[np.ndarray, np.ndarray]:
    """Positive and negative mass of every subset, indexed by bit mask."""
    pos = np.zeros(1)
    neg = np.zeros(1)
    for mp, mn in population.atoms:
        pos = np.concatenate([pos, pos + mp])
        neg = np.concatenate([neg, neg + mn])
    return pos, neg


def _mask_to_indices(mask: int, n_atoms: int) -> tuple[int, ...]:
    return tuple(i for i in range(n_atoms) if mask >> i & 1)


def _indices_to_mask(indices, n_atoms: int) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def _fbeta_values(pos: np.ndarray, neg: np.ndarray, prevalence: float, beta: float) -> np.ndarray:
    """F measure of every subset; 0 for the empty prediction."""
    b2 = beta * beta
    predicted = pos + neg
    values = (1.0 + b2) * pos / (b2 * prevalence + predicted)
    return np.where(predicted > 0.0, values, 0.0)


def subset_confusion(population: DiscretePopulation, classifier: SubsetClassifier) -> ConfusionProbs:
    """Exact confusion probabilities of a subset classifier."""
    _check_indices(population, classifier)
    p_pos_and_pred = math.fsum(population.atoms[i][0] for i in sorted(classifier.included))
    p_neg_and_pred = math.fsum(population.atoms[i][1] for i in sorted(classifier.included))
    return ConfusionProbs(
        p_pos_and_pred=p_pos_and_pred,
        p_neg_and_pred=p_neg_and_pred,
        p_pos=population.prevalence,
        p_pred=p_pos_and_pred + p_neg_and_pred,
    )


def brute_force_fbeta_max(
    population: DiscretePopulation, beta: float
) -> tuple[SubsetClassifier, float]:
    """Maximize the F measure over all 2^n subset classifiers.

    Ties are broken deterministically: among subsets attaining the maximal
    value, the lexicographically smallest sorted index tuple wins.
    """
    if not (math.isfinite(beta) and beta > 0.0):
        raise ValueError(f"beta must be positive, got {beta!r}")
    pos, neg = _subset_masses(population)
    values = _fbeta_values(pos, neg, population.prevalence, beta)
    best_value = float(np.max(values))
    tied_masks = np.flatnonzero(values == best_value)
    n = population.n_atoms
    best_mask = min((int(m) for m in tied_masks), key=lambda m: _mask_to_indices(m, n))
    return SubsetClassifier(frozenset(_mask_to_indices(best_mask, n))), best_value


def thresholded_fbeta_sup(population: DiscretePopulation, beta: float) -> float:
    """Best F measure over posterior threshold sets.

    Candidates are {posterior > q} and {posterior >= q} for q ranging over
    the distinct atom posteriors together with 0 and 1; on a finite
    population every threshold set equals one of these.
    """
    if not (math.isfinite(beta) and beta > 0.0):
        raise ValueError(f"beta must be positive, got {beta!r}")
    pos, neg = _subset_masses(population)
    values = _fbeta_values(pos, neg, population.prevalence, beta)
    posteriors = population.posteriors
    n = population.n_atoms

    best = 0.0
    levels = sorted(set(posteriors)) + [0.0, 1.0]
    for level in levels:
        strict = _indices_to_mask((i for i in range(n) if posteriors[i] > level), n)
        weak = _indices_to_mask((i for i in range(n) if posteriors[i] >= level), n)
        best = max(best, float(values[strict]), float(values[weak]))
    return best


@dataclass(frozen=True)
class LocalBayesReport:
    """Outcome of checking a posterior cut against constrained enumeration.

    ``constraint`` records which side was enumerated: "mass_at_least" when
    the cut level sits below the cost ratio, "mass_at_most" when above,
    "all" at equality (where the cut is globally optimal).  ``holds`` is
    true when no enumerated subset undercuts the threshold set's cost by
    more than numerical slack.
    """

    cut_level: float
    cost_ratio: float
    constraint: str
    included: frozenset[int]
    predicted_mass: float
    cut_cost: float
    best_cost: float
    holds: bool


def local_bayes_check(
    population: DiscretePopulation, cost: CostParams, cut_level: float
) -> LocalBayesReport:
    """Verify constrained cost optimality of the posterior cut at ``cut_level``.

    The cut H = {posterior > cut_level} with predicted mass m is compared
    by exhaustive enumeration against every subset whose predicted mass is
    >= m when cut_level < fp_cost / (fn_cost + fp_cost), <= m when above,
    and against every subset at equality.
    """
    if not (0.0 <= cut_level <= 1.0):
        raise ValueError(f"cut level must lie in [0, 1], got {cut_level!r}")
    pos, neg = _subset_masses(population)
    predicted = pos + neg
    prevalence = population.prevalence
    costs = cost.fn_cost * (prevalence - pos) + cost.fp_cost * neg

    posteriors = population.posteriors
    n = population.n_atoms
    cut_indices = frozenset(i for i in range(n) if posteriors[i] > cut_level)
    cut_mask = _indices_to_mask(cut_indices, n)
    cut_mass = float(predicted[cut_mask])
    cut_cost = float(costs[cut_mask])

    ratio = cost.posterior_cutoff
    if cut_level < ratio:
        constraint = "mass_at_least"
        eligible = predicted >= cut_mass
    elif cut_level > ratio:
        constraint = "mass_at_most"
        eligible = predicted <= cut_mass
    else:
        constraint = "all"
        eligible = np.ones(predicted.shape, dtype=bool)

    best_cost = float(np.min(costs[eligible]))
    return LocalBayesReport(
        cut_level=cut_level,
        cost_ratio=ratio,
        constraint=constraint,
        included=cut_indices,
        predicted_mass=cut_mass,
        cut_cost=cut_cost,
        best_cost=best_cost,
        holds=cut_cost <= best_cost + _COST_SLACK,
    )


@dataclass(frozen=True)
class MinimaxReport:
    """Best max(fpr, fnr) over all subsets versus over likelihood-ratio
    threshold sets.  The brute-force value never exceeds the threshold
    value; ``equal`` flags whether the threshold family attains it."""

    brute_value: float
    brute_classifier: SubsetClassifier
    threshold_value: float
    threshold_classifier: SubsetClassifier
    equal: bool


def minimax_comparison(population: DiscretePopulation) -> MinimaxReport:
    """Compare exhaustive and threshold-family minimax error levels.

    Threshold sets are the upper sets of the likelihood-ratio ordering,
    equivalently of the posterior ordering: {posterior > q} and
    {posterior >= q} over the distinct posterior levels.  On atomic
    populations the brute-force minimum can be strictly smaller because
    the ratio takes only finitely many values; it can never be larger.
    """
    pos, neg = _subset_masses(population)
    prevalence = population.prevalence
    fpr = neg / (1.0 - prevalence)
    fnr = 1.0 - pos / prevalence
    worst = np.maximum(fpr, fnr)

    n = population.n_atoms
    brute_value = float(np.min(worst))
    brute_mask = int(np.argmin(worst))

    posteriors = population.posteriors
    threshold_value = math.inf
    threshold_mask = 0
    levels = sorted(set(posteriors)) + [0.0, 1.0]
    for level in levels:
        for mask in (
            _indices_to_mask((i for i in range(n) if posteriors[i] > level), n),
            _indices_to_mask((i for i in range(n) if posteriors[i] >= level), n),
        ):
            value = float(worst[mask])
            if value < threshold_value:
                threshold_value = value
                threshold_mask = mask

    return MinimaxReport(
        brute_value=brute_value,
        brute_classifier=SubsetClassifier(frozenset(_mask_to_indices(brute_mask, n))),
        threshold_value=threshold_value,
        threshold_classifier=SubsetClassifier(frozenset(_mask_to_indices(threshold_mask, n))),
        equal=abs(brute_value - threshold_value) <= _EQUALITY_TOL,
    )


def _distinct_posterior_population(rng: np.random.Generator, n_atoms: int) -> DiscretePopulation:
    counts = rng.integers(1, 1001, size=(n_atoms, 2)).astype(float)
    for _ in range(100):
        masses = counts / counts.sum()
        posteriors = masses[:, 0] / masses.sum(axis=1)
        order = np.sort(posteriors)
        if n_atoms == 1 or np.min(np.diff(order)) >= 1e-6:
            return DiscretePopulation(atoms=tuple((row[0], row[1]) for row in masses))
        # nudge colliding atoms apart, then renormalize on the next pass
        for i in range(1, n_atoms):
            ranked = np.argsort(posteriors)
            if posteriors[ranked[i]] - posteriors[ranked[i - 1]] < 1e-6:
                counts[ranked[i], 0] *= 1.0 + 1e-6 * (i + 1)
    raise RuntimeError("could not separate atom posteriors")


def _tied_posterior_population(rng: np.random.Generator, n_atoms: int) -> DiscretePopulation:
    n_groups = max(1, n_atoms // 2)
    groups = rng.integers(0, n_groups, size=n_atoms)
    groups[1] = groups[0]  # guarantee at least one genuine tie
    base = rng.integers(1, 101, size=(n_groups, 2)).astype(float)
    # scaling a pair by a power of two keeps the posterior bit-identical
    scale = np.exp2(rng.integers(0, 3, size=n_atoms).astype(float))
    counts = base[groups] * scale[:, None]
    masses = counts / counts.sum()
    return DiscretePopulation(atoms=tuple((row[0], row[1]) for row in masses))


def random_population(
    rng: np.random.Generator, n_atoms: int, tied: bool = False
) -> DiscretePopulation:
    """Seeded random population on ``n_atoms`` score atoms.

    Masses start as uniform integer counts and are normalized to sum to 1.
    By default atom posteriors are forced pairwise distinct (colliding
    atoms are perturbed by a relative 1e-6 until separated); with
    ``tied=True`` the atoms are instead built in groups sharing exactly
    equal posteriors, to exercise tie handling.
    """
    if not (2 <= n_atoms <= MAX_ATOMS):
        raise ValueError(f"n_atoms must lie in [2, {MAX_ATOMS}], got {n_atoms}")
    if tied:
        return _tied_posterior_population(rng, n_atoms)
    return _distinct_posterior_population(rng, n_atoms)
