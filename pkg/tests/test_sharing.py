from collections import Counter
from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from approxqecc.harness.exhaustive import etss_failure_table, etss_tamper_oracle
from approxqecc.mac import MacKey, mac_verify
from approxqecc.sharing import (
    EtssParams,
    EtssShare,
    ShamirShare,
    etss_reconstruct,
    etss_share,
    mac_message,
    shamir_reconstruct,
    shamir_share,
)
from helpers import ScriptedRng


def test_params_validation():
    assert EtssParams(3, 2, 5, 5).tau == 1
    assert EtssParams(5, 3, 7, 11).t == 2
    for bad in [(3, 4, 5, 5), (3, 2, 3, 5), (3, 2, 5, 4), (3, 2, 7, 5)]:
        with pytest.raises(ValueError):
            EtssParams(*bad)


def test_threshold_one_is_replication(rng):
    shares = shamir_share([3, 1, 4], EtssParams(4, 1, 5, 5), rng)
    assert all(sh.values.tolist() == [3, 1, 4] for sh in shares)
    assert shamir_reconstruct(shares[2:3], EtssParams(4, 1, 5, 5)).tolist() == [3, 1, 4]


def test_shares_lie_on_line_through_secret():
    params = EtssParams(3, 2, 5, 5)
    for slope in range(5):
        shares = shamir_share([2], params, ScriptedRng([[slope]]))
        assert [int(sh.values[0]) for sh in shares] == [(2 + slope * i) % 5 for i in (1, 2, 3)]
        for pair in combinations(shares, 2):
            assert shamir_reconstruct(list(pair), params).tolist() == [2]


def test_single_share_uniform_for_every_secret():
    params = EtssParams(3, 2, 5, 5)
    for secret in range(5):
        seen = Counter(int(shamir_share([secret], params, ScriptedRng([[c]]))[0].values[0]) for c in range(5))
        assert seen == Counter(range(5))


def test_tampered_share_is_inconsistent():
    params = EtssParams(3, 2, 5, 5)
    shares = shamir_share([2], params, ScriptedRng([[1]]))  # f(x) = 2 + x
    first_two = shamir_reconstruct(shares[:2], params)
    bad = ShamirShare(3, (shares[2].values + 1) % 5)
    assert first_two.tolist() == [2]
    assert shamir_reconstruct([shares[0], shares[1], bad], params) is None


def test_reconstruct_errors(rng):
    params = EtssParams(3, 2, 5, 5)
    shares = shamir_share([1], params, rng)
    with pytest.raises(ValueError):
        shamir_reconstruct(shares[:1], params)
    with pytest.raises(ValueError):
        shamir_reconstruct([shares[0], shares[0]], params)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 7), st.integers(0, 2**32 - 1), st.lists(st.integers(0, 10), min_size=1, max_size=6))
def test_any_d_subset_reconstructs(n, seed, secret):
    d = (n + 1) // 2
    params = EtssParams(n, d, 11, 13)
    shares = shamir_share(secret, params, np.random.default_rng(seed))
    idx = np.random.default_rng(seed + 1).permutation(n)[:d]
    assert shamir_reconstruct([shares[i] for i in idx], params).tolist() == secret


def test_etss_layout_and_tags(rng):
    params = EtssParams(3, 2, 5, 7)
    shares = etss_share([1, 2, 3], params, rng)
    for i, sh in enumerate(shares, start=1):
        assert sorted(sh.verify_keys) == sorted(sh.own_tags) == [j for j in (1, 2, 3) if j != i]
        for j, tag in sh.own_tags.items():
            key = shares[j - 1].verify_keys[i]
            assert mac_verify(key, mac_message(sh.shamir), tag, 7)
    res = etss_reconstruct(shares, params)
    assert res.secret.tolist() == [1, 2, 3] and all(res.valid) and res.tag_counts == (2, 2, 2)


def test_replaced_share_without_forged_tags_is_discarded(rng):
    params = EtssParams(3, 2, 101, 101)
    shares = etss_share([5, 6], params, rng)
    s1 = shares[0]
    fake = EtssShare(ShamirShare(1, (s1.shamir.values + 1) % 101),
                     {2: MacKey(0, 0), 3: s1.verify_keys[3]}, dict(s1.own_tags))
    res = etss_reconstruct([fake, shares[1], shares[2]], params)
    assert res.valid == (False, True, True)
    assert res.secret.tolist() == [5, 6]
    # corrupting slot 1's key for slot 2 leaves slot 2 with its slot-3 verifier
    assert res.tag_counts[1] == 1


def test_flipped_tag_only_is_harmless(rng):
    params = EtssParams(5, 3, 11, 101)
    shares = etss_share([1, 2, 3, 4], params, rng)
    s = shares[4]
    t = dict(s.own_tags)
    t[1] = (t[1] + 1) % 101
    res = etss_reconstruct(shares[:4] + [EtssShare(s.shamir, s.verify_keys, t)], params)
    assert res.secret.tolist() == [1, 2, 3, 4] and all(res.valid)


def test_garbage_slots_fail_validation(rng):
    params = EtssParams(3, 2, 5, 5)
    shares = etss_share([1, 2], params, rng)
    junk = EtssShare(ShamirShare(1, np.array([9, 9, 9])), {}, {2: 77})
    res = etss_reconstruct([junk, shares[1], shares[2]], params, length=2)
    assert res.valid == (False, True, True) and res.secret.tolist() == [1, 2]


def test_too_few_valid_shares_abort(rng):
    params = EtssParams(3, 2, 5, 5)
    shares = etss_share([1], params, rng)
    junk = [EtssShare(ShamirShare(i, np.array([0])), {}, {}) for i in (1, 2)]
    assert etss_reconstruct(junk + [shares[2]], params).aborted


def _table_rng(p, slot, sec, c, a1, b1, a2, b2):
    """Rng script for etss_share at n=3, d=2 with chosen coins for the keys verifying ``slot``."""
    a = np.full((3, 3), 1)
    b = np.full((3, 3), 2)
    j1, j2 = [j for j in (1, 2, 3) if j != slot]
    a[j1 - 1, slot - 1], b[j1 - 1, slot - 1] = a1, b1
    a[j2 - 1, slot - 1], b[j2 - 1, slot - 1] = a2, b2
    return ScriptedRng([[c]], a, b)


@pytest.mark.parametrize("slot", [1, 2, 3])
def test_failure_table_matches_reconstruct(slot):
    """The vectorised tamper table agrees with etss_reconstruct on sampled cells."""
    p = 5
    params = EtssParams(3, 2, p, p)
    coins, views, tampers, fail = etss_failure_table(p, slot)
    r = np.random.default_rng(slot)
    for ci, ti in zip(r.integers(0, coins.shape[0], 400), r.integers(0, tampers.shape[0], 400)):
        sec, c, a1, b1, a2, b2 = (int(v) for v in coins[ci])
        shares = etss_share([sec], params, _table_rng(p, slot, *coins[ci]))
        honest = shares[slot - 1]
        assert [int(honest.shamir.values[0])] + [honest.own_tags[j] for j in sorted(honest.own_tags)] \
            == views[ci].tolist()
        v, u1, u2 = (int(x) for x in tampers[ti])
        j1, j2 = sorted(honest.own_tags)
        forged = EtssShare(ShamirShare(slot, np.array([v])), honest.verify_keys, {j1: u1, j2: u2})
        slots = list(shares)
        slots[slot - 1] = forged
        res = etss_reconstruct(slots, params)
        wrong = res.aborted or res.secret.tolist() != [sec]
        assert wrong == bool(fail[ci, ti])


def test_view_dependent_worst_case():
    for slot in (1, 2, 3):
        worst = etss_tamper_oracle(5, slot)
        # two square roots per nonzero ratio at both verifiers: 1 - (3/5)**2
        assert worst.probability == pytest.approx(16 / 25, abs=0)
        assert worst.probability <= worst.bound


def single_view_distributions(p: int, slot: int, secrets) -> list[Counter]:
    """Exact distribution of slot ``slot``'s view for each secret, over the coins it depends on."""
    params = EtssParams(3, 2, p, p)
    out = []
    for secret in secrets:
        seen = Counter()
        for c, a1, b1, a2, b2 in product(range(p), repeat=5):
            sh = etss_share([secret], params, _table_rng(p, slot, secret, c, a1, b1, a2, b2))[slot - 1]
            seen[(int(sh.shamir.values[0]),
                  tuple(sorted((j, k.a, k.b) for j, k in sh.verify_keys.items())),
                  tuple(sorted(sh.own_tags.items())))] += 1
        out.append(seen)
    return out


def test_privacy_single_view_two_secrets():
    a, b = single_view_distributions(5, 2, [0, 3])
    assert a == b and sum(a.values()) == 5**5
