"""Exact failure probabilities for the n = 3, t = 1 instances.

The probability space is every encoder coin: the per-register Clifford keys
and pads, the Shamir coefficients and the MAC keys ``(a, b)``.  Plans are
view-oblivious, so failure splits into two independent parts.

* Classical: a tampered share is kept iff at least ``tau`` honest verifiers
  accept it.  Verifier ``j`` accepts iff ``sum_k a_j**(k+2) D_k = d_j``,
  where ``D`` is the share difference and ``d_j`` the tag difference.  The
  ``b`` half of each key makes a replaced or forged tag uniform and
  independent of everything else, and a replaced share differs from the
  honest (uniform) one by a uniform ``D``.  Counting is done over ``a`` by
  enumeration and over ``D`` by solving the linear conditions.
* Quantum: the attacked register is accepted with a nonidentity residual,
  counted over the whole symplectic group.

At n = 3 a kept tampered share makes the three shares inconsistent (abort),
and an accepted nonidentity residual is caught by the distance-2 code or,
after an erasure in the warm-up case 3, turns into a logical error.  Both
are failures, and nothing else is.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from ..aqecc import AqeccParams, bare_decode
from ..field import gaussian_solve
from ..pauli import PauliVector, all_vectors, enumerate_symplectic, sp_order
from ..qauth import _bad_mask, _images
from .strategies import Op, Plan, RegisterPlan, Strategy, StrategyContext
from .trials import soundness

KEY_SPACE_LIMIT = 2_000_000


class TooLarge(ValueError):
    """The instance is outside what exact enumeration handles."""


@dataclass(frozen=True)
class ExactResult:
    params: AqeccParams
    scheme: str
    strategy: str
    corrupted: tuple[int, ...]
    probability: Fraction
    classical_part: Fraction
    plans: int
    eps_meas: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.probability <= self.bound

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "params": {"n": self.params.n, "t": self.params.t, "p": self.params.p,
                       "s": self.params.s, "p_mac": self.params.p_mac},
            "scheme": self.scheme,
            "strategy": self.strategy,
            "corrupted": list(self.corrupted),
            "probability": f"{self.probability.numerator}/{self.probability.denominator}",
            "probability_float": float(self.probability),
            "classical_part": float(self.classical_part),
            "plans": self.plans,
            "eps_meas": self.eps_meas,
            "bound": self.bound,
            "verdict": self.verdict,
        }


@lru_cache(maxsize=8)
def _quantum_table(m: int, s: int, p: int) -> dict[bytes, Fraction]:
    """Pr[accept with nonidentity residual] for every attack on one register."""
    size = m + s
    if sp_order(size, p) > KEY_SPACE_LIMIT:
        raise TooLarge(f"Sp({2 * size},{p}) has {sp_order(size, p)} elements")
    group = enumerate_symplectic(size, p, limit=KEY_SPACE_LIMIT)
    attacks = all_vectors(2 * size, p).T
    counts = np.zeros(attacks.shape[1], dtype=np.int64)
    chunk = max(1, 4_000_000 // attacks.size)
    for lo in range(0, group.shape[0], chunk):
        counts += _bad_mask(_images(group[lo:lo + chunk], attacks, p), m, size).sum(axis=0)
    order = group.shape[0]
    return {attacks[:, k].astype(np.int64).tobytes(): Fraction(int(counts[k]), order)
            for k in range(attacks.shape[1])}


def quantum_failure(params: AqeccParams, pauli: PauliVector | None) -> Fraction:
    if pauli is None or pauli.is_identity():
        return Fraction(0)
    return _quantum_table(1, params.s, params.p)[pauli.vector.astype(np.int64).tobytes()]


# -- classical part ----------------------------------------------------------


def _tag_difference(op: Op, pm: int):
    """``("const", c)`` or ``("uniform",)``."""
    if op.kind == "keep":
        return ("const", 0)
    if op.kind == "offset":
        return ("const", int(op.value) % pm)
    if op.kind in ("replace", "forge"):
        return ("uniform",)
    raise ValueError(f"unknown tag edit {op.kind!r}")


def _powers(a: int, length: int, pm: int) -> np.ndarray:
    """Coefficient row of the share values in the MAC polynomial: a**2 .. a**(length+1)."""
    out = np.empty(length, dtype=np.int64)
    v = a * a % pm
    for k in range(length):
        out[k] = v
        v = v * a % pm
    return out


def _at_least(tau: int, exact_sets: dict[frozenset, Fraction]) -> Fraction:
    return sum((w for s, w in exact_sets.items() if len(s) >= tau), Fraction(0))


def _mobius(verifiers: list[int], all_accept) -> dict[frozenset, Fraction]:
    """Exactly-these-accept probabilities from all-of-these-accept ones."""
    subsets = [frozenset(c) for r in range(len(verifiers) + 1) for c in combinations(verifiers, r)]
    joint = {s: all_accept(s) for s in subsets}
    return {s: sum(((-1) ** (len(u) - len(s)) * joint[u] for u in subsets if s <= u), Fraction(0))
            for s in subsets}


def classical_failure(params: AqeccParams, i: int, plan: RegisterPlan) -> Fraction:
    """Pr[the share of register ``i`` changes and is still kept]."""
    pm, n = params.p_mac, params.n
    length = params.secret_length
    tau = params.etss.tau
    kind = plan.share.kind
    if kind in ("keep", "index"):
        return Fraction(0)
    verifiers = [j for j in range(1, n + 1) if j != i]
    diffs = {j: _tag_difference(plan.tags.get(j, Op()), pm) for j in verifiers}
    unif = Fraction(1, pm)

    if kind == "offset":
        delta = np.asarray(plan.share.value, dtype=np.int64) % pm
        if not delta.any():
            return Fraction(0)
        probs = {}
        for j in verifiers:
            if diffs[j][0] == "uniform":
                probs[j] = unif
            else:
                hits = sum(int(_powers(a, length, pm) @ delta % pm == diffs[j][1]) for a in range(pm))
                probs[j] = Fraction(hits, pm)

        def all_fixed(s):
            out = Fraction(1)
            for j in s:
                out *= probs[j]
            return out

        return _at_least(tau, _mobius(verifiers, all_fixed))

    if kind != "replace":
        raise ValueError(f"unknown share edit {kind!r}")
    # D uniform over GF(pm)^length; MAC points a_j uniform and independent
    const = [j for j in verifiers if diffs[j][0] == "const"]
    if pm ** len(const) > KEY_SPACE_LIMIT:
        raise TooLarge("too many MAC key combinations")
    total = Fraction(0)
    for points in product(range(pm), repeat=len(const)):
        a_of = dict(zip(const, points))

        def all_uniform_delta(s):
            w = unif ** sum(1 for j in s if diffs[j][0] == "uniform")
            rows = [j for j in s if j in a_of]
            if not rows:
                return w
            mat = np.stack([_powers(a_of[j], length, pm) for j in rows])
            rhs = np.array([diffs[j][1] for j in rows], dtype=np.int64)
            sol = gaussian_solve(mat, rhs, pm)
            if not sol.consistent:
                return Fraction(0)
            return w * Fraction(1, pm ** (length - sol.nullspace.shape[0]))

        total += _at_least(tau, _mobius(verifiers, all_uniform_delta))
    total /= pm ** len(const)

    # remove D = 0, where the share is unchanged and keeping it is harmless
    def all_zero_delta(s):
        ok = all(diffs[j][1] == 0 for j in s if diffs[j][0] == "const")
        return unif ** sum(1 for j in s if diffs[j][0] == "uniform") if ok else Fraction(0)

    return total - Fraction(1, pm**length) * _at_least(tau, _mobius(verifiers, all_zero_delta))


def _warmup_failure(params: AqeccParams, i: int, plan: RegisterPlan) -> Fraction:
    edited = set()
    for j, op in plan.keys.items():
        if op.kind == "keep":
            continue
        if op.kind != "offset" or not np.asarray(op.value).any():
            raise ValueError("the warm-up oracle needs nonzero key offsets")
        edited.add(j)
    if len(edited) == 2:  # case 2: register i is discarded outright
        return Fraction(0)
    # case 1 or 3: register i is checked with an honest copy of k_i
    return quantum_failure(params, plan.pauli)


def _bare_failure(params: AqeccParams, plan: Plan) -> Fraction:
    x = np.zeros(params.n, dtype=np.int64)
    z = np.zeros(params.n, dtype=np.int64)
    for i, rp in plan.items():
        if rp.pauli is not None:
            x[i - 1], z[i - 1] = rp.pauli.x[0], rp.pauli.z[0]
    out = bare_decode(params.code, PauliVector(x, z, params.p))
    return Fraction(int(not out.residual.is_identity()))


def exhaustive_oracle(params: AqeccParams, strategy: Strategy, corrupted, scheme: str = "etss") -> ExactResult:
    """Exact failure probability of ``strategy`` against B = ``corrupted``.

    Only n = 3, t = 1 is supported; larger instances raise :class:`TooLarge`.
    """
    if params.n != 3 or params.t != 1:
        raise TooLarge(f"exact oracle only handles n=3, t=1, got n={params.n}, t={params.t}")
    bad = tuple(sorted(int(i) for i in corrupted))
    if len(bad) > params.t:
        raise ValueError(f"|B| = {len(bad)} exceeds t = {params.t}")
    if sp_order(1 + params.s, params.p) > KEY_SPACE_LIMIT:
        raise TooLarge("authentication key space too large to enumerate")
    ctx = StrategyContext(params, frozenset(bad), scheme)
    weighted = strategy.enumerate(ctx)
    total = Fraction(0)
    classical_total = Fraction(0)
    for w, plan in weighted:
        if scheme == "bare":
            total += w * _bare_failure(params, plan)
            continue
        if not plan:
            continue
        (i, rp), = plan.items()
        if scheme == "warmup":
            total += w * _warmup_failure(params, i, rp)
            continue
        pc = classical_failure(params, i, rp)
        pq = quantum_failure(params, rp.pauli)
        classical_total += w * pc
        total += w * (1 - (1 - pc) * (1 - pq))
    sound = soundness(params.p, params.s)
    return ExactResult(params, scheme, strategy.name, bad, total, classical_total, len(weighted),
                       sound.upper_bound, 2 * params.n**2 * sound.upper_bound)


# -- error-tolerant sharing, small instance ----------------------------------


@dataclass(frozen=True)
class EtssWorstCase:
    p: int
    slot: int
    probability: Fraction  # best adversary's Pr[output is not the secret]
    best_given_view: dict  # view (s, tags...) -> chosen tamper (value, tags...)
    mac_length: int

    @property
    def bound(self) -> Fraction:
        """n t eps_mac with n = 3, t = 1."""
        return Fraction(3 * self.mac_length, self.p)


def etss_failure_table(p: int, slot: int):
    """Failure indicator for every (coins, tamper) pair at n = 3, d = 2, one-symbol secrets.

    Coins: secret, Shamir slope, and the two honest keys that verify ``slot``.
    Tamper: new share value and new tags, index kept (a changed index is
    rejected outright).  Slot ``slot``'s own keys only check honest shares,
    which keep their second honest verifier, so they do not matter.
    Returns ``(coins, views, tampers, fail)`` with ``fail[c, k]`` boolean.
    """
    f = np.arange(p)
    sec, c, a1, b1, a2, b2 = (g.reshape(-1) for g in np.meshgrid(f, f, f, f, f, f, indexing="ij"))
    share = (sec + c * slot) % p
    t1 = (b1 + a1 * slot + a1 * a1 % p * share) % p
    t2 = (b2 + a2 * slot + a2 * a2 % p * share) % p
    v, u1, u2 = (g.reshape(-1) for g in np.meshgrid(f, f, f, indexing="ij"))
    acc1 = u1[None, :] == (b1[:, None] + a1[:, None] * slot + (a1 * a1 % p)[:, None] * v[None, :]) % p
    acc2 = u2[None, :] == (b2[:, None] + a2[:, None] * slot + (a2 * a2 % p)[:, None] * v[None, :]) % p
    # a kept altered share makes the three shares inconsistent
    fail = (v[None, :] != share[:, None]) & (acc1 | acc2)
    coins = np.stack([sec, c, a1, b1, a2, b2], axis=1)
    views = np.stack([share, t1, t2], axis=1)
    tampers = np.stack([v, u1, u2], axis=1)
    return coins, views, tampers, fail


def etss_tamper_oracle(p: int, slot: int = 1) -> EtssWorstCase:
    """Exact worst case over every deterministic adversary on one slot.

    The adversary sees the slot's share and tags, so the optimum picks, per
    view, the tamper with the most failing coin assignments.
    """
    if p**6 * p**3 > 5 * 10**7:
        raise TooLarge(f"p = {p} is too large for the tamper table")
    coins, views, tampers, fail = etss_failure_table(p, slot)
    keys = views[:, 0] * p * p + views[:, 1] * p + views[:, 2]
    total = 0
    best = {}
    for key in np.unique(keys):
        rows = fail[keys == key].sum(axis=0)
        k = int(np.argmax(rows))
        total += int(rows[k])
        best[tuple(int(x) for x in views[keys == key][0])] = tuple(int(x) for x in tampers[k])
    return EtssWorstCase(p, slot, Fraction(total, coins.shape[0]), best, 2)
