"""Discrete-distribution companion simulation of the closed training loop.

Operates on exact probability vectors over K symbols (no sampling), so
every run is deterministic.  One generation of the loop:

  1. human update (offloading): human' is the normalized mix of the fixed
     world distribution with a sharpened copy of the model distribution,
     weighted u toward the model; sharpening raises each mass to 1/tau and
     renormalizes, so lower tau means lower entropy;
  2. training mix: (1-lambda)*human' + lambda*model, i.e. recursive
     contamination of the corpus with the model's own output;
  3. model update with tail truncation: masses below epsilon_tail are
     zeroed and the rest renormalized, modeling finite-corpus tail loss.

Per-generation metrics: Shannon entropies, KL(model||human) and
KL(model||world), effective tail support size, and mutual information
between consecutive human generations through a copy-persistence channel
(a kappa-weighted mix of a noiseless copy and independence), which bounds
MI by the previous generation's entropy so entropy collapse forces MI
decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ValidationError

NORMALIZATION_TOL = 1e-12


class TruncationError(ArithmeticError):
    """Tail truncation removed all probability mass."""


def normalize(p) -> np.ndarray:
    """Explicitly rescale a nonnegative vector to sum to 1."""
    p = np.asarray(p, dtype=float)
    total = p.sum()
    if not (math.isfinite(total) and total > 0.0):
        raise ValidationError([f"cannot normalize: total mass {total!r}"])
    return p / total

def dist_violations(p) -> list[str]:
    p = np.asarray(p, dtype=float)
    violations = []
    if p.ndim != 1 or len(p) < 2:
        violations.append(f"distribution needs K >= 2 entries, got shape {p.shape}")
    if np.any(~np.isfinite(p)):
        violations.append("distribution entries must be finite")
    elif np.any(p < 0.0):
        violations.append("distribution entries must be >= 0")
    elif abs(float(p.sum()) - 1.0) > NORMALIZATION_TOL:
        violations.append(f"distribution must sum to 1 within {NORMALIZATION_TOL}, got {p.sum()!r}")
    return violations


def zipf_world(K: int, exponent: float = 1.0) -> np.ndarray:
    """Ground-truth distribution with mass proportional to 1/rank^exponent."""
    ranks = np.arange(1, K + 1, dtype=float)
    return normalize(ranks ** -exponent)


def uniform_world(K: int) -> np.ndarray:
    return np.full(K, 1.0 / K)


@dataclass(frozen=True)
class InfoConfig:
    """Knobs of the generation loop, one per collapse mechanism:
    tau <-> offloading-induced sharpening, lam <-> recursive contamination,
    epsilon_tail <-> finite-corpus tail loss, kappa <-> copy persistence of
    the cross-generation channel."""

    u: float = 0.5
    lam: float | None = None
    """Synthetic fraction of the training mix; defaults to u."""
    tau: float | None = None
    """Sharpening temperature in (0,1]; defaults to 1 - 0.8*u."""
    epsilon_tail: float = 1e-4
    kappa: float = 0.5
    smoothing: float = 1e-12

    @property
    def lam_value(self) -> float:
        return self.u if self.lam is None else self.lam

    @property
    def tau_value(self) -> float:
        return 1.0 - 0.8 * self.u if self.tau is None else self.tau


def info_config_violations(cfg: InfoConfig) -> list[str]:
    violations = []
    if not 0.0 <= cfg.u <= 1.0:
        violations.append(f"u must lie in [0,1], got {cfg.u!r}")
    if not 0.0 <= cfg.lam_value <= 1.0:
        violations.append(f"lambda must lie in [0,1], got {cfg.lam_value!r}")
    if not 0.0 < cfg.tau_value <= 1.0:
        violations.append(f"tau must lie in (0,1], got {cfg.tau_value!r}")
    if cfg.epsilon_tail < 0.0:
        violations.append(f"epsilon_tail must be >= 0, got {cfg.epsilon_tail!r}")
    if not 0.0 <= cfg.kappa <= 1.0:
        violations.append(f"kappa must lie in [0,1], got {cfg.kappa!r}")
    if not cfg.smoothing > 0.0:
        violations.append(f"smoothing must be > 0, got {cfg.smoothing!r}")
    return violations


@dataclass(frozen=True)
class GenerationState:
    world: np.ndarray  # fixed ground truth, immutable across generations
    human: np.ndarray
    model: np.ndarray
    generation: int = 0


def initial_state(world) -> GenerationState:
    """Start the loop pinned to ground truth: human = model = world."""
    world = np.asarray(world, dtype=float)
    bad = dist_violations(world)
    if bad:
        raise ValidationError(bad)
    return GenerationState(world=world, human=world.copy(), model=world.copy(), generation=0)


def shannon_entropy(p) -> float:
    """-sum p*ln(p) in nats, with 0*ln(0) = 0."""
    p = np.asarray(p, dtype=float)
    mask = p > 0.0
    return float(-np.sum(p[mask] * np.log(p[mask])))


def kl_divergence(p, q, smoothing: float = 1e-12) -> float:
    """sum p*ln(p/q~) in nats, where q~ is q floored at `smoothing` and then
    explicitly renormalized; nonnegative, zero iff p = q~."""
    p = np.asarray(p, dtype=float)
    q = normalize(np.maximum(np.asarray(q, dtype=float), smoothing))
    mask = p > 0.0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def mutual_information(joint) -> float:
    """I(X;Y) in nats from a K x K joint probability matrix."""
    j = np.asarray(joint, dtype=float)
    if j.ndim != 2 or j.shape[0] != j.shape[1]:
        raise ValidationError([f"joint must be square, got shape {j.shape}"])
    if np.any(j < 0.0) or abs(float(j.sum()) - 1.0) > 1e-9:
        raise ValidationError(["joint entries must be >= 0 and sum to 1"])
    px = j.sum(axis=1)
    py = j.sum(axis=0)
    prod = np.outer(px, py)
    mask = j > 0.0
    return float(np.sum(j[mask] * np.log(j[mask] / prod[mask])))


def sharpen(p, tau: float) -> np.ndarray:
    """Raise each mass to 1/tau and renormalize; entropy-nonincreasing for
    tau in (0,1].  Zeros stay zero."""
    if not 0.0 < tau <= 1.0:
        raise ValidationError([f"tau must lie in (0,1], got {tau!r}"])
    p = np.asarray(p, dtype=float)
    return normalize(p ** (1.0 / tau))


def truncate_tail(p, epsilon_tail: float) -> np.ndarray:
    """Zero every cell with mass < epsilon_tail, then renormalize."""
    p = np.asarray(p, dtype=float)
    kept = np.where(p < epsilon_tail, 0.0, p)
    total = kept.sum()
    if total <= 0.0:
        raise TruncationError(
            f"epsilon_tail = {epsilon_tail!r} removed all mass (max cell {p.max()!r})"
        )
    return kept / total


def support_size(p, epsilon_tail: float) -> int:
    """Number of symbols with mass >= epsilon_tail."""
    return int(np.count_nonzero(np.asarray(p) >= epsilon_tail))


def step_generation(state: GenerationState, cfg: InfoConfig) -> GenerationState:
    """One generation of the closed loop, exactly on probability vectors."""
    bad = info_config_violations(cfg)
    if bad:
        raise ValidationError(bad)
    u, lam = cfg.u, cfg.lam_value
    human = normalize((1.0 - u) * state.world + u * sharpen(state.model, cfg.tau_value))
    mix = (1.0 - lam) * human + lam * state.model
    model = truncate_tail(mix, cfg.epsilon_tail)
    return GenerationState(
        world=state.world, human=human, model=model, generation=state.generation + 1
    )


def copy_persistence_joint(prev, nxt, kappa: float) -> np.ndarray:
    """Joint p(x,y) = prev(x) * (kappa*[y=x] + (1-kappa)*next(y))."""
    prev = np.asarray(prev, dtype=float)
    nxt = np.asarray(nxt, dtype=float)
    if prev.shape != nxt.shape:
        raise ValidationError([f"distributions differ in K: {prev.shape} vs {nxt.shape}"])
    return kappa * np.diag(prev) + (1.0 - kappa) * np.outer(prev, nxt)


def consecutive_mi(prev_human, next_human, cfg: InfoConfig) -> float:
    """MI between consecutive human generations through the
    copy-persistence channel; bounded by the entropy of prev_human."""
    return mutual_information(copy_persistence_joint(prev_human, next_human, cfg.kappa))


@dataclass
class InfoMetrics:
    """Per-generation series, one row per completed step (generation 1..T).

    mi_consecutive[g] pairs generation g's human distribution with
    generation g-1's.
    """

    generation: np.ndarray
    h_human: np.ndarray
    h_model: np.ndarray
    kl_model_human: np.ndarray
    kl_model_world: np.ndarray
    tail_support: np.ndarray
    mi_consecutive: np.ndarray

    def __len__(self) -> int:
        return len(self.generation)


def run_generations(init: GenerationState, cfg: InfoConfig, T_gen: int) -> InfoMetrics:
    """Iterate the loop T_gen times, recording all metrics per generation.

    Fully deterministic: exact vector arithmetic, no randomness anywhere.
    """
    if T_gen < 2:
        raise ValidationError([f"T_gen must be >= 2, got {T_gen!r}"])
    bad = info_config_violations(cfg)
    if bad:
        raise ValidationError(bad)

    gens = np.arange(1, T_gen + 1)
    h_human = np.empty(T_gen)
    h_model = np.empty(T_gen)
    kl_mh = np.empty(T_gen)
    kl_mw = np.empty(T_gen)
    support = np.empty(T_gen, dtype=int)
    mi = np.empty(T_gen)

    state = init
    for g in range(T_gen):
        prev_human = state.human
        state = step_generation(state, cfg)
        h_human[g] = shannon_entropy(state.human)
        h_model[g] = shannon_entropy(state.model)
        kl_mh[g] = kl_divergence(state.model, state.human, cfg.smoothing)
        kl_mw[g] = kl_divergence(state.model, state.world, cfg.smoothing)
        support[g] = support_size(state.model, cfg.epsilon_tail)
        mi[g] = consecutive_mi(prev_human, state.human, cfg)

    return InfoMetrics(
        generation=gens, h_human=h_human, h_model=h_model, kl_model_human=kl_mh,
        kl_model_world=kl_mw, tail_support=support, mi_consecutive=mi,
    )


def theil_sen_slope(y, x=None) -> float:
    """Median of all pairwise slopes; robust trend sign for short series."""
    y = np.asarray(y, dtype=float)
    x = np.arange(len(y), dtype=float) if x is None else np.asarray(x, dtype=float)
    if len(y) < 2:
        raise ValidationError(["need at least 2 points for a slope"])
    i, j = np.triu_indices(len(y), k=1)
    return float(np.median((y[j] - y[i]) / (x[j] - x[i])))
