"""Adversary strategies as view-oblivious tamper plans.

A plan fixes, per corrupted register, what to do to each stored classical
field and which Pauli to apply to the authenticated qudits.  Plans are
drawn before the adversary sees anything; :func:`realize` then applies the
plan to the register contents the adversary actually holds (offsets are
added to the stored values, forged tags are computed from stored keys).
Every strategy can also list its plans with exact weights, which is what
the exact oracle consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Mapping

import numpy as np

from ..aqecc import AqeccParams, AttackScript, Classical, Tamper, WarmupKeys, bare_decoder
from ..mac import MacKey, mac_tag
from ..pauli import PauliVector, all_vectors
from ..sharing import EtssShare, ShamirShare, mac_message


@dataclass(frozen=True)
class Op:
    """One field edit: ``keep``, ``offset``, ``replace``, ``index`` or ``forge``."""

    kind: str = "keep"
    value: object = None


KEEP = Op()


@dataclass(frozen=True, eq=False)
class RegisterPlan:
    share: Op = KEEP
    keys: Mapping[int, Op] = field(default_factory=dict)
    tags: Mapping[int, Op] = field(default_factory=dict)
    pauli: PauliVector | None = None

    @property
    def classical_untouched(self) -> bool:
        return (self.share.kind == "keep" and all(o.kind == "keep" for o in self.keys.values())
                and all(o.kind == "keep" for o in self.tags.values()))


Plan = dict[int, RegisterPlan]


@dataclass(frozen=True)
class StrategyContext:
    params: AqeccParams
    corrupted: frozenset[int]
    scheme: str = "etss"  # "etss", "warmup" or "bare"

    @property
    def block(self) -> int:
        """Qudits per authenticated register."""
        return 1 + self.params.s


# -- realizing a plan against stored contents --------------------------------


def _edit_share(op: Op, share: ShamirShare, p: int) -> ShamirShare:
    if op.kind == "keep":
        return share
    if op.kind == "offset":
        return ShamirShare(share.index, (np.asarray(share.values) + np.asarray(op.value)) % p)
    if op.kind == "replace":
        return ShamirShare(share.index, np.asarray(op.value, dtype=np.int64) % p)
    if op.kind == "index":
        return ShamirShare(int(op.value), np.asarray(share.values).copy())
    raise ValueError(f"unknown share edit {op.kind!r}")


def _edit_mac_key(op: Op, key: MacKey, p: int) -> MacKey:
    if op.kind == "keep":
        return key
    da, db = op.value
    if op.kind == "offset":
        return MacKey((key.a + da) % p, (key.b + db) % p)
    if op.kind == "replace":
        return MacKey(da % p, db % p)
    raise ValueError(f"unknown key edit {op.kind!r}")


def _edit_tag(op: Op, j: int, tag: int, share: EtssShare, new_share: ShamirShare, p: int) -> int:
    if op.kind == "keep":
        return tag
    if op.kind == "offset":
        return (tag + int(op.value)) % p
    if op.kind == "replace":
        return int(op.value) % p
    if op.kind == "forge":
        # tag the new share under the key this register holds for party j
        msg = mac_message(new_share) % p
        return mac_tag(share.verify_keys[j], msg, p)
    raise ValueError(f"unknown tag edit {op.kind!r}")


def _edit_etss(plan: RegisterPlan, share: EtssShare, params: AqeccParams) -> EtssShare:
    p = params.p_mac
    new = _edit_share(plan.share, share.shamir, params.etss.p_share)
    keys = {j: _edit_mac_key(plan.keys.get(j, KEEP), k, p) for j, k in share.verify_keys.items()}
    tags = {j: _edit_tag(plan.tags.get(j, KEEP), j, t, share, new, p) for j, t in share.own_tags.items()}
    return EtssShare(new, keys, tags)


def _edit_warmup(plan: RegisterPlan, keys: WarmupKeys, params: AqeccParams) -> WarmupKeys:
    out = {}
    for j, arr in keys.copies.items():
        op = plan.keys.get(j, KEEP)
        if op.kind == "keep":
            out[j] = arr
        elif op.kind == "offset":
            out[j] = (np.asarray(arr) + np.asarray(op.value)) % params.p
        elif op.kind == "replace":
            out[j] = np.asarray(op.value, dtype=np.int64)
        else:
            raise ValueError(f"unknown key edit {op.kind!r}")
    return WarmupKeys(out)


def realize(plan: Plan, view: Mapping[int, Classical], params: AqeccParams) -> dict[int, Tamper]:
    out = {}
    for i, rp in plan.items():
        stored = view[i]
        if rp.classical_untouched:
            classical = None
        elif isinstance(stored, EtssShare):
            classical = _edit_etss(rp, stored, params)
        else:
            classical = _edit_warmup(rp, stored, params)
        out[i] = Tamper(classical, rp.pauli)
    return out


# -- strategies ---------------------------------------------------------------


Weighted = list[tuple[Fraction, Plan]]


@dataclass(frozen=True)
class Strategy:
    name: str
    stresses: str
    sampler: Callable[[StrategyContext, np.random.Generator], Plan]
    enumerator: Callable[[StrategyContext], Weighted]

    def draw(self, ctx: StrategyContext, rng: np.random.Generator) -> Plan:
        return self.sampler(ctx, rng)

    def enumerate(self, ctx: StrategyContext) -> Weighted:
        return self.enumerator(ctx)

    def script(self, ctx: StrategyContext, rng: np.random.Generator) -> AttackScript:
        plan = self.draw(ctx, rng)
        return AttackScript(ctx.corrupted, lambda view: realize(plan, view, ctx.params))


def _paulis(block: int, p: int, include_identity: bool) -> list[PauliVector]:
    vecs = all_vectors(2 * block, p)
    if not include_identity:
        vecs = vecs[1:]
    return [PauliVector.from_vector(v, p) for v in vecs]


def _random_pauli(ctx: StrategyContext, rng: np.random.Generator, include_identity: bool) -> PauliVector:
    p, dim = ctx.params.p, 2 * ctx.block
    while True:
        v = rng.integers(0, p, size=dim)
        if include_identity or v.any():
            return PauliVector.from_vector(v, p)


def _pauli_product(ctx: StrategyContext, include_identity: bool) -> list[tuple[Fraction, dict[int, PauliVector]]]:
    """Uniform joint distribution of independent per-register Paulis over B."""
    regs = sorted(ctx.corrupted)
    single = _paulis(ctx.block, ctx.params.p, include_identity)
    w = Fraction(1, len(single) ** len(regs))
    return [(w, dict(zip(regs, combo))) for combo in product(single, repeat=len(regs))]


def _others(ctx: StrategyContext, i: int) -> list[int]:
    return [j for j in range(1, ctx.params.n + 1) if j != i]


def _forgery_offset(params: AqeccParams) -> np.ndarray:
    """Share offset whose MAC difference polynomial has as many roots as possible.

    The tag difference is ``sum_i a**i dm_i`` with ``dm_1 = 0`` (index kept)
    and ``dm_{k+2}`` the offset of value ``k``.  Choosing it as
    ``a**2 * prod_{r=1..R} (a - r)`` gives ``R + 1`` roots in GF(p_mac).
    """
    p = params.p_mac
    roots = min(params.mac_length - 2, p - 1)
    poly = np.array([1], dtype=np.int64)  # coefficients low to high
    for r in range(1, roots + 1):
        shifted = np.concatenate([[0], poly])
        scaled = np.concatenate([poly * (-r % p), [0]])
        poly = (shifted + scaled) % p
    offset = np.zeros(params.secret_length, dtype=np.int64)
    offset[: poly.size] = poly
    return offset


def _classical_forgery(ctx: StrategyContext, rng=None) -> Plan:
    delta = _forgery_offset(ctx.params)
    return {i: RegisterPlan(share=Op("offset", delta)) for i in ctx.corrupted}


def _key_frame(ctx: StrategyContext, rng=None) -> Plan:
    delta = np.ones(ctx.params.secret_length, dtype=np.int64)
    return {i: RegisterPlan(share=Op("offset", delta), tags={j: Op("forge") for j in _others(ctx, i)})
            for i in ctx.corrupted}


def _quantum_substitution(ctx: StrategyContext, rng) -> Plan:
    return {i: RegisterPlan(pauli=_random_pauli(ctx, rng, False)) for i in ctx.corrupted}


def _quantum_substitution_all(ctx: StrategyContext) -> Weighted:
    return [(w, {i: RegisterPlan(pauli=ps[i]) for i in ps}) for w, ps in _pauli_product(ctx, False)]


def _garbage_classical(ctx: StrategyContext, i: int, rng) -> RegisterPlan:
    params = ctx.params
    pm = params.p_mac
    if rng is None:  # canonical representative for enumeration
        values = np.zeros(params.secret_length, dtype=np.int64)
        keys = {j: Op("offset", _nonzero_key_offset(ctx, None)) for j in _others(ctx, i)}
        tags = {j: Op("replace", 0) for j in _others(ctx, i)}
    else:
        values = rng.integers(0, params.etss.p_share, size=params.secret_length)
        keys = {j: Op("offset", _nonzero_key_offset(ctx, rng)) for j in _others(ctx, i)}
        tags = {j: Op("replace", int(rng.integers(0, pm))) for j in _others(ctx, i)}
    return RegisterPlan(share=Op("replace", values), keys=keys, tags=tags)


def _nonzero_key_offset(ctx: StrategyContext, rng):
    """Nonzero edit of one stored key: an ``(a, b)`` pair for MAC keys, a vector for key copies."""
    params = ctx.params
    if ctx.scheme == "warmup":
        if rng is None:
            return np.ones(params.key_length, dtype=np.int64)
        vec = rng.integers(0, params.p, size=params.key_length)
        while not vec.any():
            vec = rng.integers(0, params.p, size=params.key_length)
        return vec
    if rng is None:
        return (1, 1)
    return (int(rng.integers(1, params.p_mac)), int(rng.integers(0, params.p_mac)))


def _erasure(ctx: StrategyContext, rng) -> Plan:
    plan = {}
    for i in ctx.corrupted:
        rp = _garbage_classical(ctx, i, rng)
        plan[i] = RegisterPlan(rp.share, rp.keys, rp.tags, _random_pauli(ctx, rng, True))
    return plan


def _erasure_all(ctx: StrategyContext) -> Weighted:
    base = {i: _garbage_classical(ctx, i, None) for i in ctx.corrupted}
    return [(w, {i: RegisterPlan(base[i].share, base[i].keys, base[i].tags, ps[i]) for i in ps})
            for w, ps in _pauli_product(ctx, True)]


@lru_cache(maxsize=None)
def breaker_paulis(n: int, t: int, p: int, corrupted: frozenset[int]) -> dict[int, tuple[int, int]] | None:
    """Code-qudit Paulis on ``corrupted`` that the bare min-weight decoder gets wrong.

    Returns register -> (x, z) for the first such error in lexicographic
    order, or ``None`` when every error supported on ``corrupted`` is
    decoded correctly (min-weight ties favour low positions, so at n = 3 a
    lone register 1 cannot be used against the bare code).
    """
    from ..css import build_polynomial_code

    code = build_polynomial_code(n, t, p)
    dec = bare_decoder(code)
    regs = sorted(corrupted)
    local = all_vectors(2, p)
    for combo in product(range(local.shape[0]), repeat=len(regs)):
        x = np.zeros(n, dtype=np.int64)
        z = np.zeros(n, dtype=np.int64)
        for r, c in zip(regs, combo):
            x[r - 1], z[r - 1] = local[c]
        err = PauliVector(x, z, p)
        if not err.is_identity() and not dec.decode(err).is_identity():
            return {r: (int(x[r - 1]), int(z[r - 1])) for r in regs}
    return None


def _bare_breaker(ctx: StrategyContext, rng=None) -> Plan:
    if not ctx.corrupted:
        return {}
    params = ctx.params
    local = breaker_paulis(params.n, params.t, params.p, frozenset(ctx.corrupted))
    if local is None:  # nothing fools the decoder here; probe with a plain Z
        local = {i: (0, 1) for i in ctx.corrupted}
    return {i: RegisterPlan(pauli=PauliVector.single(ctx.block, params.p, 0, x=xz[0], z=xz[1]))
            for i, xz in local.items()}


def _warmup_case2(ctx: StrategyContext, rng) -> Plan:
    return {i: RegisterPlan(keys={j: Op("offset", _nonzero_key_offset(ctx, rng)) for j in _others(ctx, i)},
                            pauli=_random_pauli(ctx, rng, True))
            for i in ctx.corrupted}


def _warmup_case2_all(ctx: StrategyContext) -> Weighted:
    return [(w, {i: RegisterPlan(keys={j: Op("offset", _nonzero_key_offset(ctx, None)) for j in _others(ctx, i)},
                                 pauli=ps[i]) for i in ps})
            for w, ps in _pauli_product(ctx, True)]


def _warmup_case3(ctx: StrategyContext, rng) -> Plan:
    return {i: RegisterPlan(keys={_others(ctx, i)[0]: Op("offset", _nonzero_key_offset(ctx, rng))},
                            pauli=_random_pauli(ctx, rng, False))
            for i in ctx.corrupted}


def _warmup_case3_all(ctx: StrategyContext) -> Weighted:
    return [(w, {i: RegisterPlan(keys={_others(ctx, i)[0]: Op("offset", _nonzero_key_offset(ctx, None))},
                                 pauli=ps[i]) for i in ps})
            for w, ps in _pauli_product(ctx, False)]


def _single(fn) -> Callable[[StrategyContext], Weighted]:
    return lambda ctx: [(Fraction(1), fn(ctx))]


def _empty(ctx: StrategyContext, rng=None) -> Plan:
    return {}


EMPTY = Strategy("empty", "completeness: no tampering at all", _empty, _single(_empty))

LIBRARY: tuple[Strategy, ...] = (
    Strategy("classical_forgery", "share validation: tampered share with root-maximizing MAC difference",
             _classical_forgery, _single(_classical_forgery)),
    Strategy("key_frame", "key reconstruction abort: shifted shares carrying self-forged tags",
             _key_frame, _single(_key_frame)),
    Strategy("quantum_substitution", "quantum authentication soundness: uniform nonidentity Pauli",
             _quantum_substitution, _quantum_substitution_all),
    Strategy("erasure", "everything in B replaced by garbage, uniform Pauli",
             _erasure, _erasure_all),
    Strategy("bare_breaker", "the error that fools the bare min-weight decoder",
             _bare_breaker, _single(_bare_breaker)),
    Strategy("warmup_case2", "both stored keys edited, uniform Pauli",
             _warmup_case2, _warmup_case2_all),
    Strategy("warmup_case3", "one stored key edited, uniform nonidentity Pauli",
             _warmup_case3, _warmup_case3_all),
)


def strategy_library() -> list[Strategy]:
    return list(LIBRARY)


def get_strategy(name: str) -> Strategy:
    for s in (EMPTY,) + LIBRARY:
        if s.name == name:
            return s
    names = ", ".join(s.name for s in (EMPTY,) + LIBRARY)
    raise KeyError(f"unknown strategy {name!r}; available: {names}")


def strategy_names() -> list[str]:
    return [s.name for s in (EMPTY,) + LIBRARY]
