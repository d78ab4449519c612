import dataclasses
import itertools
import os
import time

import numpy as np
import pytest

from ethsocial import crypto, miners
from ethsocial.errors import (
    InvalidSubstitutionError,
    MalformedInputError,
    MiningWorkerError,
    NotFoundError,
)

# upper tail of the chi-square distribution, 255 degrees of freedom, p = 0.001
CHI_SQUARE_CRITICAL_255 = 330.52


def _without_timing(record):
    return dataclasses.replace(record, elapsed_ms=0)


def test_default_seed_is_published_hash():
    assert miners.DEFAULT_SEED == crypto.keccak256(b"ethsocial")


def test_key_stream_is_deterministic():
    first = miners.KeyStream(miners.DEFAULT_SEED)
    second = miners.KeyStream(miners.DEFAULT_SEED)
    assert [first.next_key() for _ in range(5)] == [second.next_key() for _ in range(5)]


def test_key_stream_rejects_short_seed():
    with pytest.raises(MalformedInputError):
        miners.KeyStream(b"\x00" * 31)


def test_mine_lowercase_account_default_seed():
    account = miners.mine_lowercase_account(miners.DEFAULT_SEED, max_attempts=10_000)
    assert account.attempts == 1552
    assert account.key.hex == (
        "59c0538cb6ce3cf7ddb169b2ba536f6753263c48720686898d751399fa04d103"
    )
    rendered = crypto.eip55_encode(account.address)
    assert rendered.text == "0x448a1f25214107799c1589e7ede73514664b4444"
    assert rendered.is_all_lowercase
    assert crypto.derive_address(account.key) == account.address


def test_mine_lowercase_account_is_reproducible():
    first = miners.mine_lowercase_account(miners.DEFAULT_SEED, max_attempts=10_000)
    second = miners.mine_lowercase_account(miners.DEFAULT_SEED, max_attempts=10_000)
    assert _without_timing(first) == _without_timing(second)


def test_mine_lowercase_account_exhausted():
    with pytest.raises(NotFoundError) as exc_info:
        miners.mine_lowercase_account(miners.DEFAULT_SEED, max_attempts=100)
    assert exc_info.value.stats["attempts"] == 100
    assert "elapsed_ms" in exc_info.value.stats


@pytest.mark.parametrize(
    "kwargs",
    [
        pytest.param({"max_attempts": 0}, id="no-attempts"),
        pytest.param({"workers": 0}, id="no-workers"),
        pytest.param({"rng_seed": b"short"}, id="short-seed"),
    ],
)
def test_mine_lowercase_account_rejects(kwargs):
    with pytest.raises(MalformedInputError):
        miners.mine_lowercase_account(**kwargs)


def test_mine_lowercase_account_with_workers():
    account = miners.mine_lowercase_account(
        miners.DEFAULT_SEED, max_attempts=200_000, workers=2
    )
    assert crypto.eip55_encode(account.address).is_all_lowercase
    assert crypto.derive_address(account.key) == account.address


def _failing_search(seed, max_attempts, should_stop):
    raise RuntimeError("search blew up")


def _exiting_search(seed, max_attempts, should_stop):
    os._exit(3)


@pytest.mark.parametrize(
    "search, message",
    [
        pytest.param(_failing_search, "RuntimeError: search blew up", id="raises"),
        pytest.param(_exiting_search, "without reporting back", id="exits"),
    ],
)
def test_run_parallel_reports_broken_workers(search, message):
    start = time.perf_counter()
    with pytest.raises(MiningWorkerError, match=message):
        miners._run_parallel(
            search, [(miners.derive_worker_seed(miners.DEFAULT_SEED, i), 10) for i in range(2)]
        )
    assert time.perf_counter() - start < 30


def _search_or_fail(seed, max_attempts, should_stop):
    if max_attempts == 0:
        raise RuntimeError("no budget")
    return miners._search_lowercase(seed, max_attempts, should_stop=should_stop)


def test_run_parallel_keeps_result_when_one_worker_fails():
    winner, all_stats = miners._run_parallel(
        _search_or_fail, [(miners.DEFAULT_SEED, 0), (miners.DEFAULT_SEED, 10_000)]
    )
    assert winner.attempts == 1552
    assert len(all_stats) == 2
    assert {"error": "RuntimeError: no budget"} in all_stats


def test_mined_account_record():
    account = miners.mine_lowercase_account(miners.DEFAULT_SEED, max_attempts=10_000)
    record = account.to_record()
    assert record.split("\t")[1] == "0x448a1f25214107799c1589e7ede73514664b4444"
    assert miners.MinedAccount.from_record(record) == account


def test_mined_account_record_rejects_tampering():
    account = miners.mine_lowercase_account(miners.DEFAULT_SEED, max_attempts=10_000)
    key, _, attempts, elapsed = account.to_record().split("\t")
    forged = "\t".join((key, "0x7e5f4552091a69125d5dfcb7b8c2659029395bdf", attempts, elapsed))
    with pytest.raises(MalformedInputError):
        miners.MinedAccount.from_record(forged)


def test_mine_similar_pair_default_seed():
    pair = miners.mine_similar_pair(miners.DEFAULT_SEED, time_budget=60.0)
    assert pair.is_consistent()
    assert pair.nonce == 4
    assert pair.candidates_tried == 5
    assert pair.mutation.describe() == "substitution:0:0:1"
    assert crypto.eip55_encode(pair.real).text == (
        "0x0AB6c129F916e4b8F35Ac54117795ED0ea19e502"
    )
    assert crypto.eip55_encode(pair.decoy).text == (
        "0x1AB6c129F916e4b8F35Ac54117795ED0ea19e502"
    )


def test_mine_similar_pair_is_reproducible():
    first = miners.mine_similar_pair(miners.DEFAULT_SEED, time_budget=60.0)
    second = miners.mine_similar_pair(miners.DEFAULT_SEED, time_budget=60.0)
    assert _without_timing(first) == _without_timing(second)


def test_similar_pair_candidates_are_one_mutation_away():
    address = crypto.Address.from_hex("0x0ab6c129f916e4b8f35ac54117795ed0ea19e502")
    candidates = list(miners.similar_pair_candidates(address))
    swaps = [m for _, m in candidates if m.kind == miners.MutationKind.ADJACENT_SWAP]
    substitutions = [m for _, m in candidates if m.kind == miners.MutationKind.SUBSTITUTION]
    assert len(substitutions) == 40 * 15
    assert all(len(m.modified_positions) == 2 for m in swaps)
    for decoy, mutation in candidates:
        differences = [
            index
            for index, (left, right) in enumerate(zip(decoy.hex, address.hex))
            if left != right
        ]
        assert tuple(differences) == mutation.modified_positions
        assert mutation.apply(address.hex) == decoy.hex


def test_mutation_apply_checks_old_value():
    mutation = miners.Mutation(miners.MutationKind.SUBSTITUTION, 0, "f", "0")
    with pytest.raises(MalformedInputError):
        mutation.apply("0" * 40)


@pytest.mark.parametrize(
    "charset, start_at, expected",
    [
        pytest.param("ab", "", ["", "a", "b", "aa", "ab", "ba", "bb", "aaa"]),
        pytest.param("ab", "b", ["b", "aa", "ab", "ba", "bb", "aaa", "aab", "aba"]),
        pytest.param("012", "22", ["22", "000", "001", "002", "010", "011", "012", "020"]),
    ],
)
def test_shortlex_suffixes(charset, start_at, expected):
    result = list(itertools.islice(miners.shortlex_suffixes(charset, start_at), len(expected)))
    assert result == expected


def test_find_selector_collision_with_homograph_target():
    target = crypto.compute_selector(crypto.normalize_signature("fоо()"))
    spec = miners.CollisionSearchSpec(
        target=target, name_prefix="bar", start_at="821770000"
    )
    result = miners.find_selector_collision(spec, time_budget=60.0)
    assert result.signature.canonical == "bar821770037()"
    assert result.selector == target
    assert result.trials == 38
    assert miners.mine_selector_collision(spec, time_budget=60.0) == result.signature


def test_find_selector_collision_honours_exclusions():
    target = crypto.Selector.from_hex("0x3293f02a")
    spec = miners.CollisionSearchSpec(
        target=target,
        name_prefix="bar",
        start_at="821770000",
        excluded_names=frozenset({"bar821770037"}),
    )
    with pytest.raises(NotFoundError) as exc_info:
        miners.find_selector_collision(spec, time_budget=60.0, max_trials=100)
    assert exc_info.value.stats["trials"] == 100


@pytest.mark.parametrize("truncate_bits", [8, 16])
def test_find_selector_collision_truncated(truncate_bits):
    target = crypto.Selector(crypto.keccak256(miners.DEFAULT_SEED)[:4])
    spec = miners.CollisionSearchSpec(
        target=target,
        name_prefix="f",
        charset="0123456789abcdef",
        arg_types=("address",),
        truncate_bits=truncate_bits,
    )
    result = miners.find_selector_collision(spec, time_budget=120.0)
    assert result.signature.arg_types == ("address",)
    assert result.selector.top_bits(truncate_bits) == target.top_bits(truncate_bits)
    assert result.selector == crypto.compute_selector(result.signature)


def test_find_selector_collision_with_workers():
    target = crypto.Selector(crypto.keccak256(miners.DEFAULT_SEED)[:4])
    spec = miners.CollisionSearchSpec(target=target, name_prefix="f", truncate_bits=8)
    result = miners.find_selector_collision(spec, time_budget=120.0, workers=2)
    assert result.selector.top_bits(8) == target.top_bits(8)


@pytest.mark.parametrize(
    "kwargs",
    [
        pytest.param({"truncate_bits": 12}, id="bits"),
        pytest.param({"charset": ""}, id="empty-charset"),
        pytest.param({"charset": "aa"}, id="repeated"),
        pytest.param({"charset": "a("}, id="separator"),
        pytest.param({"charset": "0123"}, id="digit-start-without-prefix"),
        pytest.param({"name_prefix": "9x"}, id="prefix"),
        pytest.param({"name_prefix": "f", "start_at": "xyz"}, id="start-outside-charset"),
    ],
)
def test_collision_search_spec_rejects(kwargs):
    with pytest.raises(MalformedInputError):
        miners.CollisionSearchSpec(target=crypto.Selector(b"\x00" * 4), **kwargs)


def test_selector_top_bytes_are_uniform():
    names = (f"sample{index}" for index in range(256 * 40))
    top_bytes = [
        crypto.compute_selector(crypto.FunctionSignature(name)).value[0] for name in names
    ]
    observed = np.bincount(top_bytes, minlength=256)
    expected = len(top_bytes) / 256
    statistic = float(np.sum((observed - expected) ** 2 / expected))
    assert statistic < CHI_SQUARE_CRITICAL_255


@pytest.mark.parametrize(
    "signature, substitutions, expected",
    [
        pytest.param("foo()", [(1, "о"), (2, "о")], "0x3293f02a"),
        pytest.param("foo()", [(1, 0x043E), (2, 0x043E)], "0x3293f02a", id="codepoints"),
        pytest.param(
            "accountRegistered(address)",
            [(0, "а"), (1, "с"), (2, "с"), (15, "е")],
            "0xf67832e0",
        ),
        pytest.param("log(address)", [], "0x2c2ecbc2", id="no-substitution"),
    ],
)
def test_homograph_twin_selector(signature, substitutions, expected):
    result = miners.homograph_twin_selector(
        crypto.normalize_signature(signature), substitutions
    )
    assert result.hex == expected


@pytest.mark.parametrize(
    "substitutions",
    [
        pytest.param([(3, "о")], id="outside-name"),
        pytest.param([(0, "о")], id="not-a-twin-of-f"),
        pytest.param([(1, "x")], id="ascii"),
    ],
)
def test_homograph_twin_selector_rejects(substitutions):
    with pytest.raises(InvalidSubstitutionError):
        miners.homograph_twin_selector(crypto.normalize_signature("foo()"), substitutions)


def test_predict_deployment_plan():
    key = crypto.PrivateKey.from_int(1)
    plan = miners.predict_deployment_plan(key, range(3))
    deployer = crypto.derive_address(key)
    assert [nonce for nonce, _ in plan] == [0, 1, 2]
    assert all(
        address == crypto.predict_contract_address(deployer, nonce)
        for nonce, address in plan
    )
    assert len({address for _, address in plan}) == 3


@pytest.mark.parametrize(
    "addresses, expected",
    [
        pytest.param([], 0.0),
        pytest.param(
            [
                "0xde709f2102306220921060314715629080e2fb77",
                "0x5aaeb6053f3e94c9b9a09f33669435e7ef1beaed",
            ],
            0.5,
        ),
        pytest.param(["0x448a1f25214107799c1589e7ede73514664b4444"], 1.0),
    ],
)
def test_lowercase_checksum_rate(addresses, expected):
    parsed = [crypto.Address.from_hex(item) for item in addresses]
    assert miners.lowercase_checksum_rate(parsed) == expected


@pytest.mark.slow
def test_find_selector_collision_24_bits():
    target = crypto.Selector(crypto.keccak256(miners.DEFAULT_SEED)[:4])
    spec = miners.CollisionSearchSpec(
        target=target, name_prefix="f", charset="0123456789abcdef", truncate_bits=24
    )
    result = miners.find_selector_collision(spec, time_budget=3600.0, workers=4)
    assert result.selector.top_bits(24) == target.top_bits(24)


def _run_seed(label: str, index: int) -> bytes:
    return crypto.keccak256(f"{label}-{index}".encode("ascii"))


@pytest.mark.slow
def test_lowercase_checksum_rate_of_random_addresses():
    generator = np.random.default_rng(20)
    raw = generator.bytes(20 * 1_000_000)
    addresses = (
        crypto.Address(raw[offset : offset + 20]) for offset in range(0, len(raw), 20)
    )
    assert 0.0002 <= miners.lowercase_checksum_rate(addresses) <= 0.0003


@pytest.mark.slow
def test_mine_lowercase_account_attempts_follow_geometric_law():
    success = 0.8125**40
    attempts = np.array(
        [
            miners.mine_lowercase_account(
                _run_seed("lowercase", index), max_attempts=200_000
            ).attempts
            for index in range(50)
        ]
    )
    assert 2000 <= np.median(attempts) <= 8000
    # five equiprobable bins of the geometric distribution, 4 degrees of freedom
    quantiles = np.arange(1, 5) / 5
    edges = np.log(1 - quantiles) / np.log(1 - success)
    observed = np.bincount(np.searchsorted(edges, attempts), minlength=5)
    expected = len(attempts) / 5
    chi_square = ((observed - expected) ** 2 / expected).sum()
    assert chi_square < 13.28


@pytest.mark.slow
def test_find_selector_collision_16_bits_median_trials():
    trials = []
    for index in range(30):
        target = crypto.Selector(_run_seed("collision", index)[:4])
        spec = miners.CollisionSearchSpec(
            target=target, name_prefix="f", charset="0123456789", truncate_bits=16
        )
        trials.append(miners.find_selector_collision(spec, time_budget=600.0).trials)
    assert 2**15 <= np.median(trials) <= 2**17


@pytest.mark.slow
def test_mine_similar_pair_within_budget():
    found = []
    for index in range(10):
        try:
            found.append(
                miners.mine_similar_pair(_run_seed("pair", index), time_budget=120.0)
            )
        except NotFoundError:
            continue
    assert len(found) >= 9
    assert all(pair.is_consistent() for pair in found)
