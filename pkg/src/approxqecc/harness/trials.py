"""Monte Carlo trials and reports."""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np
from scipy.stats import beta

from ..aqecc import (
    AqeccParams,
    apply_attack,
    bare_decode,
    decode,
    encode,
    encode3_warmup,
    reconstructed_keys_match,
)
from ..pauli import PauliVector
from ..qauth import QAuthParams, SoundnessResult, qauth_soundness_oracle
from .sizes import size_report
from .strategies import Strategy, StrategyContext

CONFIDENCE = 1 - 1e-3
SCHEMES = ("etss", "warmup", "bare")


def clopper_pearson_upper(failures: int, trials: int, level: float = CONFIDENCE) -> float:
    """Exact one-sided upper confidence bound on a binomial rate."""
    if trials <= 0:
        raise ValueError("need at least one trial")
    if failures >= trials:
        return 1.0
    return float(beta.ppf(level, failures + 1, trials - failures))


@lru_cache(maxsize=None)
def soundness(p: int, s: int) -> SoundnessResult:
    """Measured worst-case soundness of the per-register authentication."""
    return qauth_soundness_oracle(QAuthParams(1, s, p))


def theorem_bound(params: AqeccParams) -> float:
    return 2 * params.n**2 * soundness(params.p, params.s).upper_bound


def trial_rngs(seed: int, index: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent encode and attack streams for one trial, keyed by (seed, index)."""
    enc, att = np.random.SeedSequence([seed, index]).spawn(2)
    return np.random.default_rng(enc), np.random.default_rng(att)


def classify(outcome, keys_ok: bool | None) -> str:
    if not outcome.recovered:
        return f"aborted_step{outcome.trace.abort_step}"
    if keys_ok is False:
        return "key_mismatch"
    return "exact" if outcome.residual.is_identity() else "wrong_residual"


def run_one(params: AqeccParams, strategy: Strategy, corrupted: frozenset[int], seed: int, index: int,
            scheme: str = "etss") -> str:
    rng_enc, rng_att = trial_rngs(seed, index)
    ctx = StrategyContext(params, corrupted, scheme)
    if scheme == "bare":
        plan = strategy.draw(ctx, rng_att)
        x = np.zeros(params.n, dtype=np.int64)
        z = np.zeros(params.n, dtype=np.int64)
        for i, rp in plan.items():
            if rp.pauli is not None:
                x[i - 1], z[i - 1] = rp.pauli.x[0], rp.pauli.z[0]
        return classify(bare_decode(params.code, PauliVector(x, z, params.p)), None)
    cw = encode(params, rng_enc) if scheme == "etss" else encode3_warmup(params, rng_enc)
    tampered = apply_attack(cw, strategy.script(ctx, rng_att))
    out = decode(tampered)
    return classify(out, reconstructed_keys_match(tampered, out))


@dataclass
class ExperimentReport:
    params: dict
    scheme: str
    strategy: str
    corrupted: list[int]
    trials: int
    seed: int
    failures: int
    failure_rate: float
    upper_confidence: float
    confidence_level: float
    eps_meas: float
    eps_meas_exact: bool
    bound: float
    verdict: str
    outcomes: dict[str, int]
    eps_mac: float
    union_estimate: float
    sizes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return asdict(self)


def params_dict(params: AqeccParams) -> dict:
    return {"n": params.n, "t": params.t, "p": params.p, "s": params.s, "p_mac": params.p_mac}


def run_trials(params: AqeccParams, strategy: Strategy, corrupted: Iterable[int], trials: int, seed: int,
               scheme: str = "etss") -> ExperimentReport:
    bad = frozenset(int(i) for i in corrupted)
    if len(bad) > params.t:
        raise ValueError(f"|B| = {len(bad)} exceeds t = {params.t}")
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    counts = Counter(run_one(params, strategy, bad, seed, i, scheme) for i in range(trials))
    failures = trials - counts.get("exact", 0)
    sound = soundness(params.p, params.s)
    ucb = clopper_pearson_upper(failures, trials)
    bound = 2 * params.n**2 * sound.upper_bound
    union = params.t * params.n * params.eps_mac + params.t * sound.upper_bound
    return ExperimentReport(
        params=params_dict(params), scheme=scheme, strategy=strategy.name, corrupted=sorted(bad),
        trials=trials, seed=seed, failures=failures, failure_rate=failures / trials,
        upper_confidence=ucb, confidence_level=CONFIDENCE,
        eps_meas=sound.upper_bound, eps_meas_exact=sound.exact, bound=bound,
        verdict="pass" if ucb <= bound else "fail",
        outcomes=dict(sorted(counts.items())), eps_mac=params.eps_mac, union_estimate=union,
        sizes=size_report(params),
    )
