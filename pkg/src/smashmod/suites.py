"""Deterministic verification suites over seeded random instances.

A suite sweeps one family of exact checks (bracket identities, closed-form
coherence, localized-action laws) over exhaustive small levels (p, q) and
seeded random polynomial data.  Identical (seed, config) reproduce the exact
same reports.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .localize import LOCALIZED_CHECK_IDS, verify_localized
from .modules import (
    AVModule,
    differential_forms,
    jet_module,
    tangent_adjoint,
    trivial_dmodule,
)
from .poly import Derivation, Poly
from .sampling import random_derivation, random_poly, seeded_rng
from .smash import (
    IDENTITY_IDS,
    VerificationReport,
    omega,
    omega_definitional,
    omega_multi,
    omega_multi_definitional,
    smash_bracket,
    verify_identity,
)


@dataclass(frozen=True)
class RunConfig:
    """Knobs for a verification run; identical configs give identical reports."""

    dims: tuple[int, ...] = (1, 2, 3)
    max_degree: int = 4
    trials: int = 100
    seed: int = 2026
    p_max: int = 4

    def check(self):
        if not self.dims or any(d < 1 for d in self.dims):
            raise ValueError("dims must be a nonempty list of positive integers")
        if self.max_degree < 1:
            raise ValueError("max degree must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.p_max < 1:
            raise ValueError("p_max must be >= 1")

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "max_degree": self.max_degree,
            "trials": self.trials,
            "seed": self.seed,
            "p_max": self.p_max,
        }


def _tagged(report: VerificationReport, **extra) -> VerificationReport:
    inputs = dict(report.inputs)
    inputs.update({k: str(v) for k, v in extra.items()})
    return dataclasses.replace(report, inputs=inputs)


def iter_identity_samples(config: RunConfig):
    """The seeded sample stream behind the identity suites.

    Yields (dim, trial, bindings) with bindings holding f, g, h, eta, mu and
    the levels p, q; the (p, q) grid 1..p_max x 1..p_max is cycled so that
    trials >= p_max^2 covers it exhaustively in every dimension.
    """
    config.check()
    pq = [(p, q) for p in range(1, config.p_max + 1) for q in range(1, config.p_max + 1)]
    for dim in config.dims:
        rng = seeded_rng(config.seed, "identities", dim)
        for t in range(config.trials):
            f = random_poly(rng, dim, config.max_degree)
            g = random_poly(rng, dim, config.max_degree)
            h = random_poly(rng, dim, config.max_degree)
            eta = random_derivation(rng, dim, config.max_degree)
            mu = random_derivation(rng, dim, config.max_degree)
            p, q = pq[t % len(pq)]
            yield dim, t, {"f": f, "g": g, "h": h, "eta": eta, "mu": mu, "p": p, "q": q}


def run_identity_suite(ids, config: RunConfig) -> list[VerificationReport]:
    """Sweep the named bracket identities: every (p, q) in 1..p_max is hit,
    trials seeded samples per dimension, all identities sharing each sample."""
    reports = []
    for dim, t, bound in iter_identity_samples(config):
        for name in ids:
            reports.append(_tagged(verify_identity(name, bound), dim=dim, trial=t))
    return reports


def run_coherence_suite(config: RunConfig) -> list[VerificationReport]:
    """Closed forms against the definitional constructions: the alternating
    binomial sum for omega, the iterated tensor action for the multi-function
    product, and the collapse of the product form onto equal functions."""
    config.check()
    reports = []
    for dim in config.dims:
        rng = seeded_rng(config.seed, "coherence", dim)
        for t in range(config.trials):
            f = random_poly(rng, dim, config.max_degree)
            eta = random_derivation(rng, dim, config.max_degree)
            p = t % (config.p_max + 1)
            diff = omega(p, f, eta) - omega_definitional(p, f, eta)
            reports.append(VerificationReport(
                "omega-coherence",
                {"f": str(f), "eta": str(eta), "p": str(p),
                 "dim": str(dim), "trial": str(t)},
                "pass" if diff.is_zero() else "fail",
                None if diff.is_zero() else {"difference": str(diff)}))
            fs = tuple(random_poly(rng, dim, config.max_degree)
                       for _ in range(1 + t % 3))
            diff = omega_multi(fs, eta) - omega_multi_definitional(fs, eta)
            collapse = omega_multi((f,) * max(p, 1), eta) - omega(max(p, 1), f, eta)
            bad = None
            if not diff.is_zero():
                bad = {"difference": str(diff)}
            elif not collapse.is_zero():
                bad = {"difference": str(collapse)}
            reports.append(VerificationReport(
                "omega-multi-coherence",
                {"fs": "; ".join(str(x) for x in fs), "f": str(f), "eta": str(eta),
                 "p": str(max(p, 1)), "dim": str(dim), "trial": str(t)},
                "pass" if bad is None else "fail", bad))
    return reports


def _localized_modules(dim: int) -> list[AVModule]:
    mods = [trivial_dmodule(dim, 2), differential_forms(dim)]
    if dim == 1:
        mods.append(jet_module(1, 2))
    else:
        mods.extend([tangent_adjoint(dim), jet_module(dim, 1)])
    return mods


def run_localized_suite(ids, config: RunConfig) -> list[VerificationReport]:
    """Sweep the localized-action checks over small zoo modules, cycling the
    module per trial; dimensions above 2 are skipped (the laws are dimension
    independent and the sweep cost grows quickly)."""
    config.check()
    reports = []
    for dim in [d for d in config.dims if d <= 2]:
        mods = _localized_modules(dim)
        rng = seeded_rng(config.seed, "localized", dim)
        for t in range(config.trials):
            mod = mods[t % len(mods)]
            f = random_poly(rng, dim, max(config.max_degree - 1, 1),
                            nonconstant=True, rational_share=0.0)
            g = random_poly(rng, dim, 2, nonconstant=True, rational_share=0.0)
            eta = random_derivation(rng, dim, 2)
            mu = random_derivation(rng, dim, 2)
            bindings = {
                "welldefined": {"eta": eta, "j": 1 + t % 3},
                "leibniz": {"eta": eta, "k": 1 + t % 2, "a_num": g, "a_exp": t % 3},
                "bracket": {"eta": eta, "mu": mu},
                "inverse-square": {"eta": eta},
                "inverse-cube": {"eta": eta},
                "restriction": {"eta": (f ** 2) * mu, "eta_exp": 2,
                                "mu": g * mu, "mu_exp": 1, "g": g},
            }
            for name in ids:
                rep = verify_localized(name, mod, f, bindings[name])
                reports.append(_tagged(rep, dim=dim, trial=t))
    return reports


def run_negative_control(config: RunConfig) -> list[VerificationReport]:
    """A deliberately corrupted commutator identity on a fixed instance.

    The sign of the level-p correction term is flipped, so the check must
    fail with a nonzero witness; a passing run here means the harness has
    gone vacuous.
    """
    x = Poly.variable(1, 1)
    dd = Derivation.partial(1, 1)
    eta, mu, p, q = dd, x * dd, 1, 1
    lhs = smash_bracket(omega(p, x, eta), omega(q, x, mu))
    rhs = omega(p + q, x, eta.bracket(mu))
    rhs = rhs - p * omega(p + q - 1, x, mu.apply(x) * eta)  # corrupted: wrong sign
    rhs = rhs - q * omega(p + q - 1, x, eta.apply(x) * mu)
    diff = lhs - rhs
    return [VerificationReport(
        "negative-control-lemma3",
        {"f": str(x), "eta": str(eta), "mu": str(mu), "p": "1", "q": "1", "dim": "1"},
        "pass" if diff.is_zero() else "fail",
        None if diff.is_zero() else {"difference": str(diff)})]


_IDENTITY_GROUPS = {
    "lemma2": ("lemma2-commute-A",),
    "lemma3": ("lemma3-commutator",),
    "lemma4": ("lemma4-1", "lemma4-2", "lemma4-3", "lemma4-4", "lemma4-5"),
    "lemma4-1": ("lemma4-1",),
    "lemma4-2": ("lemma4-2",),
    "lemma4-3": ("lemma4-3",),
    "lemma4-4": ("lemma4-4",),
    "lemma4-5": ("lemma4-5",),
    "lemma5": ("lemma5-deriv-bracket",),
    "lemma4.1": ("lemma4.1-recurrence",),
    "identities": IDENTITY_IDS,
}

_LOCALIZED_GROUPS = {name: (name,) for name in LOCALIZED_CHECK_IDS}
_LOCALIZED_GROUPS["localized"] = LOCALIZED_CHECK_IDS

SUITE_NAMES = (
    tuple(_IDENTITY_GROUPS) + ("omega-coherence",)
    + tuple(_LOCALIZED_GROUPS) + ("negative-control", "all")
)


def run_suite(name: str, config: RunConfig) -> list[VerificationReport]:
    """Run one named suite; 'all' runs every check family that must pass."""
    if name in _IDENTITY_GROUPS:
        return run_identity_suite(_IDENTITY_GROUPS[name], config)
    if name == "omega-coherence":
        return run_coherence_suite(config)
    if name in _LOCALIZED_GROUPS:
        return run_localized_suite(_LOCALIZED_GROUPS[name], config)
    if name == "negative-control":
        return run_negative_control(config)
    if name == "all":
        reports = run_identity_suite(IDENTITY_IDS, config)
        reports += run_coherence_suite(config)
        reports += run_localized_suite(LOCALIZED_CHECK_IDS, config)
        return reports
    raise ValueError(f"unknown suite {name!r} (known: {', '.join(SUITE_NAMES)})")
