"""Monte-Carlo estimation of belief.

Each trial picks an elementary event with its P^DS probability and succeeds
when the corresponding theory entails the query.  Events are drawn by
rejection: every source is switched on independently with probability alpha
and the draw is repeated while the resulting theory is inconsistent, which
yields exactly the renormalised distribution.

Trials are processed in fixed blocks; block ``b`` draws from its own
generator seeded with ``(seed, b)``.  The result therefore does not depend on
how blocks are spread across workers.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from statistics import NormalDist

import numpy as np

from .errors import ContradictorySources, RejectionLimit
from .logic import Formula, TheoryBase, fixpoint
from .sources import DS, EvidenceModel, SigmaIndex, sigma_of

BLOCK_SIZE = 4096
_Z95 = NormalDist().inv_cdf(0.975)


@dataclass(frozen=True)
class McConfig:
    trials: int = 100_000
    seed: int = 0
    max_rejections_per_trial: int = 1_000_000

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.max_rejections_per_trial < 1:
            raise ValueError("max_rejections_per_trial must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    successes: int
    trials: int
    ci_low: float
    ci_high: float
    rejected_samples: int

    @property
    def acceptance_rate(self) -> float:
        return self.trials / (self.trials + self.rejected_samples)


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4 * trials * trials)) / denom
    return min(p, max(0.0, centre - half)), max(p, min(1.0, centre + half))


class _Oracle:
    """Lazily computed K_sigma per mask, shared by all blocks of one model."""

    def __init__(self, model: EvidenceModel):
        self.model = model
        self._theories: dict[int, TheoryBase | None] = {}
        self._lock = threading.Lock()

    def theory(self, mask: int) -> TheoryBase | None:
        try:
            return self._theories[mask]
        except KeyError:
            pass
        model = self.model
        theory, _ = fixpoint(model.facts, model._rules, model.active_rules(mask))
        result = theory if theory.consistent() else None
        with self._lock:
            self._theories[mask] = result
        return result

    @property
    def evaluated(self) -> int:
        return len(self._theories)


@lru_cache(maxsize=16)
def _oracle(model: EvidenceModel) -> _Oracle:
    return _Oracle(model)


def _require_ds(model: EvidenceModel) -> None:
    if not isinstance(model.probability, DS):
        raise ValueError("Monte-Carlo estimation supports the DS probability model only")


def _draw(
    oracle: _Oracle, alphas: np.ndarray, rng: np.random.Generator, n: int, max_rejections: int
) -> tuple[list[int], int]:
    """Draw ``n`` accepted masks in row order; returns them and the rejection count."""
    m = alphas.shape[0]
    accepted = [0] * n
    strikes = [0] * n
    rows = list(range(n))
    rejected = 0
    while rows:
        packed = np.packbits(rng.random((len(rows), m)) < alphas, axis=1, bitorder="little")
        retry = []
        for row, bits in zip(rows, packed):
            mask = int.from_bytes(bits.tobytes(), "little")
            if oracle.theory(mask) is None:
                rejected += 1
                strikes[row] += 1
                if strikes[row] >= max_rejections:
                    raise RejectionLimit(
                        f"{max_rejections} consecutive inconsistent draws; the sources are (nearly) contradictory"
                    )
                retry.append(row)
            else:
                accepted[row] = mask
        rows = retry
    return accepted, rejected


def sample_sigma(
    model: EvidenceModel, rng: np.random.Generator, max_rejections: int = 1_000_000
) -> SigmaIndex:
    """One event drawn from P^DS by rejection."""
    _require_ds(model)
    oracle = _oracle(model)
    if oracle.theory(0) is None:
        raise ContradictorySources("the facts are inconsistent")
    alphas = np.asarray(model.alphas, dtype=float)
    (mask,), _ = _draw(oracle, alphas, rng, 1, max_rejections)
    return sigma_of(mask)


def sample_sigmas(
    model: EvidenceModel, rng: np.random.Generator, n: int, max_rejections: int = 1_000_000
) -> list[SigmaIndex]:
    """``n`` independent events drawn from P^DS."""
    _require_ds(model)
    oracle = _oracle(model)
    if oracle.theory(0) is None:
        raise ContradictorySources("the facts are inconsistent")
    masks, _ = _draw(oracle, np.asarray(model.alphas, dtype=float), rng, n, max_rejections)
    return [sigma_of(mask) for mask in masks]


def bel_mc(model: EvidenceModel, d: Formula, cfg: McConfig = McConfig(), workers: int = 1) -> McEstimate:
    _require_ds(model)
    oracle = _oracle(model)
    if oracle.theory(0) is None:
        raise ContradictorySources("the facts are inconsistent")
    alphas = np.asarray(model.alphas, dtype=float)
    verdicts: dict[int, bool] = {}

    def run_block(b: int) -> tuple[int, int]:
        n = min(BLOCK_SIZE, cfg.trials - b * BLOCK_SIZE)
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(b,)))
        masks, rejected = _draw(oracle, alphas, rng, n, cfg.max_rejections_per_trial)
        wins = 0
        for mask in masks:
            hit = verdicts.get(mask)
            if hit is None:
                hit = verdicts[mask] = oracle.theory(mask).entails(d)
            wins += hit
        return wins, rejected

    blocks = range(-(-cfg.trials // BLOCK_SIZE))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run_block, blocks))
    else:
        results = [run_block(b) for b in blocks]
    successes = sum(w for w, _ in results)
    rejected = sum(r for _, r in results)
    low, high = wilson_interval(successes, cfg.trials)
    return McEstimate(successes / cfg.trials, successes, cfg.trials, low, high, rejected)
