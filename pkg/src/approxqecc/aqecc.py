"""The approximate QECC: polynomial code + per-register authentication + shared keys.

Register ``i`` (1-based) holds the ``i``-th code qudit authenticated under
key ``k_i`` together with an error-tolerant share of ``(k_1, ..., k_n)``.
The message is symbolic: every frame records the Pauli deviation from the
honest codeword, so an untouched codeword has identity frames and a decode
outcome is judged by its logical residual alone.

The n = 3 warm-up variant replaces the sharing by plaintext copies: register
``i`` stores the two keys ``k_j``, ``j != i``.

Decoding never reads :attr:`AqeccCodeword.ground_truth`; that field exists
only so a harness can check the reconstructed keys afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Mapping, Union

import numpy as np

from .css import BareDecoder, CssCode, FrameState, build_polynomial_code, erasure_decode, restricted_consistency
from .field import is_prime, next_prime
from .pauli import PauliVector, SymplecticMatrix, random_symplectic_batch
from .qauth import QAuthKey, QAuthParams, qauth_transmit
from .sharing import EtssParams, EtssShare, etss_reconstruct, etss_share

DEFAULT_EPS_MAC = 1e-3


@dataclass(frozen=True)
class AqeccParams:
    n: int
    t: int
    p: int
    s: int = 1
    p_mac: int | None = None

    def __post_init__(self):
        if not (self.t >= 1 and 2 * self.t < self.n):
            raise ValueError(f"need 1 <= t and 2t < n, got n={self.n}, t={self.t}")
        if not is_prime(self.p) or self.p < self.n:
            raise ValueError(f"code field must be a prime >= n, got p={self.p}")
        if self.s < 1:
            raise ValueError("need at least one trap qudit")
        if self.p_mac is None:
            object.__setattr__(self, "p_mac", default_mac_prime(self.n, self.p, self.mac_length))
        elif not is_prime(self.p_mac) or self.p_mac <= self.n or self.p_mac < self.p:
            raise ValueError(f"p_mac must be a prime > n and >= p, got {self.p_mac}")

    @cached_property
    def qauth(self) -> QAuthParams:
        return QAuthParams(1, self.s, self.p)

    @property
    def key_length(self) -> int:
        return self.qauth.key_length

    @property
    def secret_length(self) -> int:
        return self.n * self.key_length

    @property
    def mac_length(self) -> int:
        """Symbols per MAC message: share index plus share values."""
        return 1 + self.secret_length

    @cached_property
    def etss(self) -> EtssParams:
        # one prime for both sharing and MACs
        return EtssParams(self.n, self.t + 1, self.p_mac, self.p_mac)

    @cached_property
    def code(self) -> CssCode:
        return build_polynomial_code(self.n, self.t, self.p)

    @property
    def eps_mac(self) -> float:
        return self.mac_length / self.p_mac


def default_mac_prime(n: int, p: int, mac_length: int, eps: float = DEFAULT_EPS_MAC) -> int:
    """Smallest prime making the MAC forgery bound at most ``eps``."""
    return next_prime(max(n + 1, p, math.ceil(mac_length / eps)))


@dataclass(frozen=True, eq=False)
class WarmupKeys:
    """Plaintext key copies held by one warm-up register: j -> serialized k_j."""

    copies: dict[int, np.ndarray]


Classical = Union[EtssShare, WarmupKeys]


@dataclass(frozen=True, eq=False)
class Register:
    frame: PauliVector  # on the 1 + s authenticated qudits
    classical: Classical


@dataclass(frozen=True, eq=False)
class GroundTruth:
    keys: tuple[QAuthKey, ...]
    classical: tuple[Classical, ...]


@dataclass(frozen=True, eq=False)
class AqeccCodeword:
    params: AqeccParams
    registers: tuple[Register, ...]
    scheme: str = "etss"  # or "warmup"
    ground_truth: GroundTruth | None = field(default=None, repr=False)

    def adversary_view(self, corrupted) -> dict[int, Classical]:
        return {i: self.registers[i - 1].classical for i in sorted(corrupted)}

    def without_ground_truth(self) -> AqeccCodeword:
        return replace(self, ground_truth=None)


@dataclass(frozen=True, eq=False)
class Tamper:
    """What the adversary installs in one corrupted register."""

    classical: Classical | None = None  # None keeps the stored content
    pauli: PauliVector | None = None  # None is the identity


@dataclass(frozen=True)
class AttackScript:
    corrupted: frozenset[int]
    action: Callable[[Mapping[int, Classical]], Mapping[int, Tamper]]

    @classmethod
    def empty(cls) -> AttackScript:
        return cls(frozenset(), lambda view: {})


@dataclass(frozen=True)
class DecodeTrace:
    valid_shares: tuple[bool, ...] = ()
    tag_counts: tuple[int, ...] = ()
    keys: tuple[QAuthKey | None, ...] | None = None
    rejected: tuple[int, ...] = ()
    abort_step: int | None = None
    reason: str = ""
    case: int | None = None  # warm-up case number

    @property
    def discarded_shares(self) -> tuple[int, ...]:
        return tuple(i + 1 for i, ok in enumerate(self.valid_shares) if not ok)


@dataclass(frozen=True)
class DecodeOutcome:
    recovered: bool
    residual: PauliVector | None
    trace: DecodeTrace = field(default_factory=DecodeTrace, compare=False)

    @property
    def tag(self) -> str:
        return "Recovered" if self.recovered else "Aborted"

    @property
    def exact(self) -> bool:
        """Recovered with identity residual, i.e. the input state comes back."""
        return self.recovered and self.residual.is_identity()


def _aborted(trace: DecodeTrace) -> DecodeOutcome:
    return DecodeOutcome(False, None, trace)


def _draw_keys(params: AqeccParams, rng: np.random.Generator) -> tuple[QAuthKey, ...]:
    size, p = 1 + params.s, params.p
    mats = random_symplectic_batch(size, p, rng, params.n)
    pads = rng.integers(0, p, size=(params.n, 2 * size))
    return tuple(QAuthKey(SymplecticMatrix(mats[i], p), PauliVector.from_vector(pads[i], p))
                 for i in range(params.n))


def _identity_frame(params: AqeccParams) -> PauliVector:
    return PauliVector.identity(1 + params.s, params.p)


def encode(params: AqeccParams, rng: np.random.Generator) -> AqeccCodeword:
    keys = _draw_keys(params, rng)
    secret = np.concatenate([k.to_symbols() for k in keys])
    shares = etss_share(secret, params.etss, rng)
    regs = tuple(Register(_identity_frame(params), sh) for sh in shares)
    return AqeccCodeword(params, regs, "etss", GroundTruth(keys, tuple(shares)))


def encode3_warmup(params: AqeccParams, rng: np.random.Generator) -> AqeccCodeword:
    if params.n != 3 or params.t != 1:
        raise ValueError("the warm-up code needs n = 3, t = 1")
    keys = _draw_keys(params, rng)
    sym = [k.to_symbols() for k in keys]
    classical = tuple(WarmupKeys({j + 1: sym[j].copy() for j in range(3) if j != i}) for i in range(3))
    regs = tuple(Register(_identity_frame(params), c) for c in classical)
    return AqeccCodeword(params, regs, "warmup", GroundTruth(keys, classical))


def apply_attack(codeword: AqeccCodeword, script: AttackScript) -> AqeccCodeword:
    params = codeword.params
    bad = frozenset(script.corrupted)
    if len(bad) > params.t:
        raise ValueError(f"attack corrupts {len(bad)} registers, more than t = {params.t}")
    if any(not 1 <= i <= params.n for i in bad):
        raise ValueError(f"register labels must lie in 1..{params.n}")
    if not bad:
        return codeword
    tampers = script.action(codeword.adversary_view(bad))
    stray = set(tampers) - bad
    if stray:
        raise ValueError(f"attack touches registers outside B: {sorted(stray)}")
    regs = list(codeword.registers)
    for i, tam in tampers.items():
        reg = regs[i - 1]
        frame = reg.frame if tam.pauli is None else reg.frame + tam.pauli
        regs[i - 1] = Register(frame, reg.classical if tam.classical is None else tam.classical)
    return replace(codeword, registers=tuple(regs))


def _parse_key(symbols, params: AqeccParams) -> QAuthKey | None:
    try:
        return QAuthKey.from_symbols(symbols, params.qauth)
    except ValueError:
        return None


def _verify(key: QAuthKey | None, frame: PauliVector) -> tuple[bool, PauliVector | None]:
    if key is None:
        return False, None
    verdict = qauth_transmit(key, frame, m=1)
    return verdict.accept, verdict.residual


def _finish(params: AqeccParams, residuals: dict[int, PauliVector], erased: set[int], trace: DecodeTrace) -> DecodeOutcome:
    """Erasure-decode from the kept registers (1-based ``erased`` are unknowns)."""
    code = params.code
    if len(erased) > params.t:
        return _aborted(replace(trace, abort_step=4, reason=f"{len(erased)} registers rejected"))
    x = np.zeros(params.n, dtype=np.int64)
    z = np.zeros(params.n, dtype=np.int64)
    for i, r in residuals.items():
        if i not in erased:
            x[i - 1], z[i - 1] = r.x[0], r.z[0]
    frame = FrameState(code, PauliVector(x, z, params.p))
    positions = [i - 1 for i in erased]
    corr = erasure_decode(code, frame, positions)
    kept = [i for i in range(params.n) if i not in positions]
    if corr is None or not restricted_consistency(code, frame, kept):
        return _aborted(replace(trace, abort_step=4, reason="kept registers inconsistent with a codeword"))
    return DecodeOutcome(True, corr.residual, trace)


def decode(codeword: AqeccCodeword) -> DecodeOutcome:
    """The four-step reconstruction; the result carries a :class:`DecodeTrace`."""
    if codeword.scheme == "warmup":
        return decode3_warmup(codeword)
    params = codeword.params
    shares = [reg.classical for reg in codeword.registers]
    if len(shares) != params.n or not all(isinstance(sh, EtssShare) for sh in shares):
        return _aborted(DecodeTrace(abort_step=1, reason="malformed registers"))
    # steps 1 and 2
    res = etss_reconstruct(shares, params.etss, length=params.secret_length)
    trace = DecodeTrace(valid_shares=res.valid, tag_counts=res.tag_counts)
    if res.aborted:
        return _aborted(replace(trace, abort_step=2, reason="shares inconsistent or too few"))
    kl = params.key_length
    keys = tuple(_parse_key(res.secret[i * kl:(i + 1) * kl], params) for i in range(params.n))
    # step 3
    residuals, rejected = {}, set()
    for i, (key, reg) in enumerate(zip(keys, codeword.registers), start=1):
        ok, r = _verify(key, reg.frame)
        if ok:
            residuals[i] = r
        else:
            rejected.add(i)
    trace = replace(trace, keys=keys, rejected=tuple(sorted(rejected)))
    # step 4
    return _finish(params, residuals, rejected, trace)


def decode3_warmup(codeword: AqeccCodeword) -> DecodeOutcome:
    """Case analysis on which key copies disagree.

    Key ``k_h`` is stored in the two registers other than ``h``.  No
    disagreement is case 1; two disagreeing keys point at the one register
    holding both (case 2); a single disagreeing key ``k_h`` leaves registers
    ``i`` and ``j`` (the holders) under suspicion while ``h`` is trusted
    (case 3).  Three disagreements cannot come from one register and abort.
    """
    params = codeword.params
    regs = codeword.registers
    if params.n != 3 or not all(isinstance(r.classical, WarmupKeys) for r in regs):
        return _aborted(DecodeTrace(abort_step=1, reason="not a warm-up codeword"))

    def copy(holder: int, key: int) -> np.ndarray | None:
        return regs[holder - 1].classical.copies.get(key)

    def holders(h: int) -> tuple[int, int]:
        return tuple(i for i in (1, 2, 3) if i != h)

    def same(a, b) -> bool:
        return a is not None and b is not None and np.array_equal(np.asarray(a), np.asarray(b))

    disagree = [h for h in (1, 2, 3) if not same(*(copy(i, h) for i in holders(h)))]

    used: dict[int, QAuthKey | None] = {}

    def check(i: int, source: int) -> tuple[bool, PauliVector | None]:
        used[i] = _parse_key(copy(source, i), params)
        return _verify(used[i], regs[i - 1].frame)

    def finish(residuals, erased, trace):
        trace = replace(trace, keys=tuple(used.get(i) for i in (1, 2, 3)))
        if trace.abort_step is not None:
            return _aborted(trace)
        return _finish(params, residuals, erased, trace)

    def run(checks: dict[int, int], erased: set[int], case: int) -> DecodeOutcome:
        """Verify register i with the copy held by checks[i]; reconstruct from the rest."""
        residuals, rejected = {}, set()
        for i, src in checks.items():
            ok, r = check(i, src)
            if ok:
                residuals[i] = r
            else:
                rejected.add(i)
        trace = DecodeTrace(rejected=tuple(sorted(rejected)), case=case)
        return finish(residuals, erased | rejected, trace)

    if not disagree:
        return run({i: holders(i)[0] for i in (1, 2, 3)}, set(), 1)
    if len(disagree) == 2:
        i = next(r for r in (1, 2, 3) if r not in disagree)  # holds both disputed keys
        j, h = disagree
        return run({j: h, h: j}, {i}, 2)
    if len(disagree) == 1:
        h = disagree[0]
        i, j = holders(h)
        ok_i, r_i = check(i, h)
        ok_j, r_j = check(j, h)
        trace_rej = tuple(r for r, ok in ((i, ok_i), (j, ok_j)) if not ok)
        if ok_i and ok_j:
            return finish({i: r_i, j: r_j}, {h}, DecodeTrace(rejected=(), case=3))
        if ok_i == ok_j:
            return finish({}, set(), DecodeTrace(rejected=trace_rej, abort_step=4, case=3,
                                                 reason="both suspects failed authentication"))
        good, good_r = (i, r_i) if ok_i else (j, r_j)
        bad = j if ok_i else i
        ok_h, r_h = check(h, good)
        if not ok_h:
            return finish({}, set(), DecodeTrace(rejected=trace_rej + (h,), abort_step=4, case=3,
                                                 reason="two registers failed authentication"))
        return finish({good: good_r, h: r_h}, {bad}, DecodeTrace(rejected=trace_rej, case=3))
    return _aborted(DecodeTrace(abort_step=2, reason="all three keys disputed", case=None))


def reconstructed_keys_match(codeword: AqeccCodeword, outcome: DecodeOutcome) -> bool | None:
    """Compare the keys decode used with the hidden ground truth (harness only)."""
    gt = codeword.ground_truth
    if gt is None:
        return None
    keys = outcome.trace.keys
    if keys is None:
        return not outcome.recovered
    if codeword.scheme == "warmup":  # only the keys actually used
        pairs = [(k, g) for k, g in zip(keys, gt.keys) if k is not None]
    else:
        pairs = list(zip(keys, gt.keys))
    return all(k is not None and np.array_equal(k.to_symbols(), g.to_symbols()) for k, g in pairs)


# -- bare code baseline ------------------------------------------------------

_BARE: dict[tuple[int, int, int], BareDecoder] = {}


def bare_decoder(code: CssCode) -> BareDecoder:
    key = (code.n, code.t, code.p)
    if key not in _BARE:
        _BARE[key] = BareDecoder(code)
    return _BARE[key]


def bare_decode(code: CssCode, error: PauliVector) -> DecodeOutcome:
    """Plain minimum-weight syndrome decoding of the bare polynomial code."""
    return DecodeOutcome(True, bare_decoder(code).decode(error), DecodeTrace(reason="bare"))
