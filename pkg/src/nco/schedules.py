"""Power-law step-size schedules, their admissibility checks, and summation bounds.

alpha(t) = alpha0 / t^nu drives the subgradient step, beta(t) = beta0 / t^mu
damps the incoming (noisy) neighbor information.  The one-time-scale variant
pins beta(t) = 1.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class PowerLawSchedule:
    alpha0: float
    nu: float
    beta0: float
    mu: float
    one_time_scale: bool = False

    def __post_init__(self):
        if self.alpha0 <= 0:
            raise ValueError("alpha0 must be positive")
        if not (0.0 < self.beta0 <= 1.0):
            raise ValueError("beta0 must be in (0, 1]")
        if self.mu < 0 or self.nu < 0:
            raise ValueError("exponents must be nonnegative")

    # effective beta parameters (the one-time-scale variant forces beta = 1)
    @property
    def beta0_eff(self) -> float:
        return 1.0 if self.one_time_scale else self.beta0

    @property
    def mu_eff(self) -> float:
        return 0.0 if self.one_time_scale else self.mu

    def alpha(self, t):
        return self.alpha0 * np.asarray(t, dtype=float) ** (-self.nu)

    def beta(self, t):
        t = np.asarray(t, dtype=float)
        if self.one_time_scale:
            return np.ones_like(t)
        return self.beta0 * t ** (-self.mu)

    def eval(self, t: int):
        if np.any(np.asarray(t) < 1):
            raise ValueError("t must be >= 1")
        return float(self.alpha(t)), float(self.beta(t))


@dataclass
class Assumption4Report:
    """Verdicts for the five step-size conditions.

    Verdicts are True/False, or None when a condition is not applicable
    (series conditions are disabled for the constant-beta one-time-scale
    variant).
    """

    verdicts: dict
    c1: float
    c2: float
    lam: float
    t1: Optional[float]
    t2: Optional[float]
    t0: Optional[float]
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(v is not False for v in self.verdicts.values())

    def lines(self):
        out = []
        labels = {
            "a": "(a) sum alpha diverges",
            "b": "(b) sum alpha^2, sum beta^2 converge",
            "c": "(c) sum alpha^2/beta converges",
            "d": "(d) -d(beta) <= c1 beta^2 eventually",
            "e": "(e) -d(alpha) <= c2 alpha beta eventually",
        }
        for k, label in labels.items():
            v = self.verdicts[k]
            verdict = "pass" if v else ("n/a" if v is None else "FAIL")
            out.append(f"{label:<42s} {verdict}")
        out.append(f"{'constants':<42s} c1={self.c1:.6g} c2={self.c2:.6g} "
                   f"lambda={self.lam:.6g}")
        out.append(f"{'thresholds':<42s} t1={self.t1} t2={self.t2} t0={self.t0}")
        for note in self.notes:
            out.append(f"note: {note}")
        return out


def validate_assumption4(s: PowerLawSchedule, lam: float,
                         c1: Optional[float] = None,
                         c2: Optional[float] = None) -> Assumption4Report:
    """Analytic admissibility verdicts for a power-law schedule.

    Series conditions are decided from the exponents (sum t^-p converges iff
    p > 1), never by truncated summation.  Defaults c1 = 0.49 lambda and
    c2 = 0.24 lambda keep maximal slack under the strict bounds c1 < lambda/2
    and c2 < lambda/4.
    """
    if c1 is None:
        c1 = 0.49 * lam
    if c2 is None:
        c2 = 0.24 * lam
    if not (0.0 < c1 < lam / 2.0):
        raise ValueError(f"c1 must be in (0, lambda/2), got {c1}")
    if not (0.0 < c2 < lam / 4.0):
        raise ValueError(f"c2 must be in (0, lambda/4), got {c2}")

    mu, nu, beta0 = s.mu_eff, s.nu, s.beta0_eff
    notes = []
    verdicts = {}
    verdicts["a"] = nu <= 1.0
    if s.one_time_scale:
        verdicts["b"] = None
        verdicts["c"] = None
        notes.append("one-time-scale (beta = 1): series conditions (b)/(c) "
                     "not applicable")
    else:
        verdicts["b"] = (2.0 * mu > 1.0) and (2.0 * nu > 1.0)
        verdicts["c"] = (2.0 * nu - mu) > 1.0

    # condition (d): -d(beta) <= c1 beta^2 for t >= t1
    if mu == 0.0:
        verdicts["d"] = True
        t1 = 1.0
    elif mu < 1.0:
        verdicts["d"] = True
        t1 = (mu / (beta0 * c1)) ** (1.0 / (1.0 - mu))
    else:
        verdicts["d"] = c1 * beta0 >= 1.0
        t1 = None
        notes.append("mu = 1: permitted by the region statement, but the "
                     "threshold construction needs c1*beta0 >= 1, impossible "
                     "for c1 < lambda/2")

    # condition (e): -d(alpha) <= c2 alpha beta for t >= t2
    if mu < 1.0:
        verdicts["e"] = True
        t2 = (nu / (beta0 * c2)) ** (1.0 / (1.0 - mu))
    else:
        verdicts["e"] = c2 * beta0 >= nu
        t2 = None
        notes.append("mu = 1: condition (e) requires c2*beta0 >= nu")

    t0 = max(t1, t2) if (t1 is not None and t2 is not None) else None
    return Assumption4Report(verdicts=verdicts, c1=c1, c2=c2, lam=lam,
                             t1=t1, t2=t2, t0=t0, notes=notes)


@dataclass(frozen=True)
class RegionResult:
    in_r1: bool
    reasons: tuple = ()

    def __str__(self):
        if self.in_r1:
            return "InR1"
        return "Outside{" + "; ".join(self.reasons) + "}"


def classify_region(mu: float, nu: float, beta0: float) -> RegionResult:
    """Membership in the almost-sure convergence region for power-law exponents.

    Inside iff beta0 <= 1, 1/2 < mu <= 1, and (1+mu)/2 < nu <= 1.
    """
    reasons = []
    if beta0 > 1.0:
        reasons.append(f"beta0 = {beta0:g} > 1")
    if not mu > 0.5:
        reasons.append(f"mu = {mu:g} <= 1/2")
    if not mu <= 1.0:
        reasons.append(f"mu = {mu:g} > 1")
    if not nu > (1.0 + mu) / 2.0:
        reasons.append(f"nu = {nu:g} <= (1+mu)/2 = {(1 + mu) / 2:g}")
    if not nu <= 1.0:
        reasons.append(f"nu = {nu:g} > 1")
    return RegionResult(in_r1=not reasons, reasons=tuple(reasons))


def sum_power_bound(delta: float, tau: float, T: int) -> float:
    """Closed-form upper bound on sum_{t=1}^{T} (t + tau)^delta."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if T < 1:
        raise ValueError("T must be >= 1")
    if delta < -1.0:
        if tau == 0.0:
            raise ValueError("bound undefined for delta < -1 with tau = 0")
        return tau ** (1.0 + delta) / abs(1.0 + delta)
    if delta == -1.0:
        if tau == 0.0:
            return math.inf
        return math.log(T / tau + 1.0)
    return 2.0 ** (1.0 + delta) / (1.0 + delta) * (T + tau) ** (1.0 + delta)


@dataclass(frozen=True)
class PartialSums:
    T: int
    sum_alpha: float
    sum_alpha_sq: float
    sum_beta_sq: float
    sum_alpha_sq_over_beta: float
    sum_alpha_sqrt_beta: float


def partial_sums(s: PowerLawSchedule, T: int) -> PartialSums:
    """Exact partial sums of the step-size series up to T."""
    if T < 1:
        raise ValueError("T must be >= 1")
    t = np.arange(1, T + 1, dtype=float)
    a = s.alpha(t)
    b = s.beta(t)
    return PartialSums(
        T=T,
        sum_alpha=float(a.sum()),
        sum_alpha_sq=float((a * a).sum()),
        sum_beta_sq=float((b * b).sum()),
        sum_alpha_sq_over_beta=float((a * a / b).sum()),
        sum_alpha_sqrt_beta=float((a * np.sqrt(b)).sum()),
    )
