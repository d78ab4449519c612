"""Brute force searches behind the address and selector attacks

Every search is a module level function taking a `should_stop` callable so the
same code runs inline (single worker, deterministic) or inside a
`multiprocessing.Process` (first result wins).
"""

import dataclasses
import enum
import multiprocessing
import queue
import time
import typing

from .crypto import (
    SECP256K1_ORDER,
    Address,
    FunctionSignature,
    PrivateKey,
    Selector,
    compute_selector,
    derive_address,
    eip55_encode,
    keccak256,
    predict_contract_address,
)
from .errors import (
    InvalidSubstitutionError,
    MalformedInputError,
    MiningWorkerError,
    NotFoundError,
)
from .homograph import ConfusablesTable
from .utils import log

# keccak256(b"ethsocial"), published so runs can be reproduced
DEFAULT_SEED = bytes.fromhex(
    "847a9dfeb8e9c7a5cd3b97e01794505396760e263dfbb25c36f0c4dc669845be"
)
HEX_ALPHABET = "0123456789abcdef"
DEFAULT_NONCE_LIMIT = 4
VALID_TRUNCATIONS = (8, 16, 24, 32)
_STOP_CHECK_INTERVAL = 64
_POLL_INTERVAL = 0.5

ShouldStop = typing.Callable[[], bool]


def _never_stop() -> bool:
    return False


def _elapsed_ms(start: float) -> int:
    return int(round((time.perf_counter() - start) * 1000))


def derive_worker_seed(master_seed: bytes, worker_index: int) -> bytes:
    return keccak256(master_seed + worker_index.to_bytes(4, "big"))


def validate_seed(seed: bytes) -> bytes:
    if len(seed) != 32:
        raise MalformedInputError(f"Seed must be 32 bytes, got {len(seed)}")
    return seed


class KeyStream:
    """Deterministic private key candidates derived from a 32 byte seed"""

    def __init__(self, seed: bytes):
        self.seed = validate_seed(seed)
        self.counter = 0

    def next_key(self) -> PrivateKey:
        while True:
            material = keccak256(self.seed + self.counter.to_bytes(8, "big"))
            self.counter += 1
            if 0 < int.from_bytes(material, "big") < SECP256K1_ORDER:
                return PrivateKey(material)


@dataclasses.dataclass(frozen=True)
class MinedAccount:
    key: PrivateKey
    address: Address
    attempts: int
    elapsed_ms: int

    def to_record(self) -> str:
        return "\t".join(
            (
                self.key.hex,
                eip55_encode(self.address).text,
                str(self.attempts),
                str(self.elapsed_ms),
            )
        )

    @classmethod
    def from_record(cls, record: str) -> "MinedAccount":
        try:
            raw_key, raw_address, attempts, elapsed = record.rstrip("\n").split("\t")
        except ValueError as exc:
            raise MalformedInputError(f"Invalid mined account record: {record!r}") from exc
        key = PrivateKey.from_hex(raw_key)
        address = Address.from_hex(raw_address)
        if derive_address(key) != address:
            raise MalformedInputError(f"Key does not derive {raw_address!r}")
        return cls(key, address, int(attempts), int(elapsed))


class MutationKind(enum.Enum):
    SUBSTITUTION = "substitution"
    ADJACENT_SWAP = "adjacent_swap"


@dataclasses.dataclass(frozen=True)
class Mutation:
    kind: MutationKind
    position: int
    old: str
    new: str

    @property
    def modified_positions(self) -> typing.Tuple[int, ...]:
        if self.kind == MutationKind.SUBSTITUTION:
            result = (self.position,)
        else:
            result = (self.position, self.position + 1)
        return result

    def apply(self, lowercase_hex: str) -> str:
        end = self.position + len(self.old)
        if lowercase_hex[self.position : end] != self.old:
            raise MalformedInputError(
                f"Expected {self.old!r} at position {self.position}"
            )
        return lowercase_hex[: self.position] + self.new + lowercase_hex[end:]

    def describe(self) -> str:
        return f"{self.kind.value}:{self.position}:{self.old}:{self.new}"


def similar_pair_candidates(
    address: Address,
) -> typing.Iterator[typing.Tuple[Address, Mutation]]:
    """Yield every decoy one substitution or one adjacent swap away"""
    digits = address.hex
    for position, old in enumerate(digits):
        for new in HEX_ALPHABET:
            if new != old:
                mutation = Mutation(MutationKind.SUBSTITUTION, position, old, new)
                yield Address.from_hex(mutation.apply(digits)), mutation
    for position in range(len(digits) - 1):
        pair = digits[position : position + 2]
        if pair[0] != pair[1]:
            mutation = Mutation(MutationKind.ADJACENT_SWAP, position, pair, pair[::-1])
            yield Address.from_hex(mutation.apply(digits)), mutation


def capitalization_matches(decoy: Address, real: Address, mutation: Mutation) -> bool:
    decoy_form = eip55_encode(decoy).text[2:]
    real_form = eip55_encode(real).text[2:]
    modified = mutation.modified_positions
    return all(
        decoy_form[index] == real_form[index]
        for index in range(len(real_form))
        if index not in modified
    )


@dataclasses.dataclass(frozen=True)
class SimilarPair:
    decoy: Address
    real: Address
    deployer_key: PrivateKey
    nonce: int
    mutation: Mutation
    candidates_tried: int = 0
    elapsed_ms: int = 0

    def is_consistent(self) -> bool:
        deployer = derive_address(self.deployer_key)
        return (
            self.real == predict_contract_address(deployer, self.nonce)
            and self.mutation.apply(self.real.hex) == self.decoy.hex
            and capitalization_matches(self.decoy, self.real, self.mutation)
        )

    def to_record(self) -> str:
        return "\t".join(
            (
                self.deployer_key.hex,
                str(self.nonce),
                eip55_encode(self.real).text,
                eip55_encode(self.decoy).text,
                self.mutation.describe(),
                str(self.candidates_tried),
                str(self.elapsed_ms),
            )
        )


@dataclasses.dataclass(frozen=True)
class CollisionSearchSpec:
    target: Selector
    name_prefix: str = ""
    charset: str = "0123456789"
    arg_types: typing.Tuple[str, ...] = ()
    truncate_bits: int = 32
    excluded_names: typing.FrozenSet[str] = frozenset()
    # resume the shortlex enumeration at this suffix
    start_at: str = ""

    def __post_init__(self):
        if self.truncate_bits not in VALID_TRUNCATIONS:
            raise MalformedInputError(
                f"truncate_bits must be one of {VALID_TRUNCATIONS}, "
                f"got {self.truncate_bits}"
            )
        if not self.charset:
            raise MalformedInputError("charset must not be empty")
        if len(set(self.charset)) != len(self.charset):
            raise MalformedInputError(f"charset has repeated characters: {self.charset!r}")
        if any(c.isspace() or c in "()," for c in self.charset):
            raise MalformedInputError(f"charset has separators: {self.charset!r}")
        if self.name_prefix:
            if not _is_identifier_start(self.name_prefix[0]):
                raise MalformedInputError(
                    f"name_prefix must start with a letter: {self.name_prefix!r}"
                )
        elif not self.charset[0].isalpha():
            raise MalformedInputError(
                f"charset must start with a letter when there is no prefix: "
                f"{self.charset!r}"
            )
        if any(c not in self.charset for c in self.start_at):
            raise MalformedInputError(
                f"start_at {self.start_at!r} uses characters outside the charset"
            )


@dataclasses.dataclass(frozen=True)
class CollisionResult:
    signature: FunctionSignature
    selector: Selector
    trials: int
    elapsed_ms: int


def _is_identifier_start(char: str) -> bool:
    return char.isalpha() or char == "_"


def shortlex_suffixes(
    charset: str, start_at: str = ""
) -> typing.Iterator[str]:
    """Enumerate strings over `charset` by length, then in charset order

    Counting works like an odometer so resuming at a long `start_at` costs
    nothing.
    """

    base = len(charset)
    ranks = [charset.index(c) for c in start_at]
    while True:
        yield "".join(charset[rank] for rank in ranks)
        index = len(ranks) - 1
        while index >= 0 and ranks[index] == base - 1:
            ranks[index] = 0
            index -= 1
        if index < 0:
            ranks = [0] * (len(ranks) + 1)
        else:
            ranks[index] += 1


def is_lowercase_checksum_account(address: Address) -> bool:
    """The acceptance test of the lowercase miner"""
    return eip55_encode(address).is_all_lowercase


def _search_lowercase(
    seed: bytes, max_attempts: int, should_stop: ShouldStop = _never_stop
) -> typing.Tuple[typing.Optional[MinedAccount], typing.Dict]:
    start = time.perf_counter()
    stream = KeyStream(seed)
    attempts = 0
    while attempts < max_attempts:
        if attempts % _STOP_CHECK_INTERVAL == 0 and should_stop():
            break
        attempts += 1
        key = stream.next_key()
        address = derive_address(key)
        if is_lowercase_checksum_account(address):
            return (
                MinedAccount(key, address, attempts, _elapsed_ms(start)),
                {"attempts": attempts},
            )
    return None, {"attempts": attempts, "elapsed_ms": _elapsed_ms(start)}


def _search_similar_pair(
    seed: bytes,
    time_budget: float,
    max_nonce: int,
    should_stop: ShouldStop = _never_stop,
) -> typing.Tuple[typing.Optional[SimilarPair], typing.Dict]:
    start = time.perf_counter()
    deadline = start + time_budget
    stream = KeyStream(seed)
    keys_tried = 0
    candidates = 0
    while time.perf_counter() < deadline and not should_stop():
        key = stream.next_key()
        keys_tried += 1
        deployer = derive_address(key)
        for nonce in range(max_nonce + 1):
            real = predict_contract_address(deployer, nonce)
            candidates += 1
            for decoy, mutation in similar_pair_candidates(real):
                if capitalization_matches(decoy, real, mutation):
                    pair = SimilarPair(
                        decoy=decoy,
                        real=real,
                        deployer_key=key,
                        nonce=nonce,
                        mutation=mutation,
                        candidates_tried=candidates,
                        elapsed_ms=_elapsed_ms(start),
                    )
                    return pair, {"candidates": candidates, "keys": keys_tried}
    return None, {
        "candidates": candidates,
        "keys": keys_tried,
        "elapsed_ms": _elapsed_ms(start),
    }


def _search_collision(
    spec: CollisionSearchSpec,
    time_budget: float,
    max_trials: typing.Optional[int],
    worker_index: int = 0,
    num_workers: int = 1,
    should_stop: ShouldStop = _never_stop,
) -> typing.Tuple[typing.Optional[CollisionResult], typing.Dict]:
    start = time.perf_counter()
    deadline = start + time_budget
    wanted = spec.target.top_bits(spec.truncate_bits)
    trials = 0
    for position, suffix in enumerate(
        shortlex_suffixes(spec.charset, spec.start_at)
    ):
        if position % num_workers != worker_index:
            continue
        name = f"{spec.name_prefix}{suffix}"
        if not name or not _is_identifier_start(name[0]):
            continue
        if name in spec.excluded_names:
            continue
        if trials % _STOP_CHECK_INTERVAL == 0 and (
            time.perf_counter() > deadline or should_stop()
        ):
            break
        if max_trials is not None and trials >= max_trials:
            break
        trials += 1
        signature = FunctionSignature(name=name, arg_types=spec.arg_types)
        selector = compute_selector(signature)
        if selector.top_bits(spec.truncate_bits) == wanted:
            result = CollisionResult(signature, selector, trials, _elapsed_ms(start))
            return result, {"trials": trials}
    return None, {"trials": trials, "elapsed_ms": _elapsed_ms(start)}


def _worker_main(search, args, stop_event, result_queue):
    payload, stats = None, {}
    try:
        payload, stats = search(*args, should_stop=stop_event.is_set)
    except BaseException as exc:
        stats = {"error": f"{type(exc).__name__}: {exc}"}
        raise
    finally:
        if payload is not None:
            stop_event.set()
        result_queue.put((payload, stats))


def _run_parallel(
    search: typing.Callable,
    worker_args: typing.List[typing.Tuple],
    wait_timeout: typing.Optional[float] = None,
) -> typing.Tuple[typing.Optional[typing.Any], typing.List[typing.Dict]]:
    """Run `search` in one process per argument tuple, first result wins

    The only shared state is the stop event and the result queue. Every worker
    posts exactly one message so the statistics of unsuccessful workers are
    kept too. A worker that raised reports an `error` entry instead; if no
    worker found anything, those errors surface as `MiningWorkerError`.
    """

    stop_event = multiprocessing.Event()
    result_queue = multiprocessing.Queue()
    processes = [
        multiprocessing.Process(
            target=_worker_main,
            args=(search, args, stop_event, result_queue),
            daemon=True,
        )
        for args in worker_args
    ]
    for process in processes:
        process.start()
    deadline = None if wait_timeout is None else time.monotonic() + wait_timeout
    winner = None
    all_stats = []
    try:
        while len(all_stats) < len(processes):
            try:
                payload, stats = result_queue.get(timeout=_POLL_INTERVAL)
            except queue.Empty:
                if deadline is not None and time.monotonic() > deadline:
                    log("A mining worker did not report back in time", debug=False)
                    break
                if any(process.is_alive() for process in processes):
                    continue
                try:
                    # a worker may have flushed its message right before exiting
                    payload, stats = result_queue.get(timeout=_POLL_INTERVAL)
                except queue.Empty:
                    log("A mining worker exited without reporting back", debug=False)
                    break
            all_stats.append(stats)
            if payload is not None and winner is None:
                winner = payload
                stop_event.set()
    finally:
        stop_event.set()
        for process in processes:
            process.join(timeout=5)
            if process.is_alive():
                process.terminate()
    errors = [stats["error"] for stats in all_stats if "error" in stats]
    missing = len(processes) - len(all_stats)
    if missing and deadline is None:
        errors.append(f"{missing} worker(s) exited without reporting back")
    if winner is None and errors:
        raise MiningWorkerError("; ".join(errors))
    return winner, all_stats


def _sum_stats(all_stats: typing.List[typing.Dict], key: str) -> int:
    return sum(stats.get(key, 0) for stats in all_stats)


def mine_lowercase_account(
    rng_seed: bytes = DEFAULT_SEED, max_attempts: int = 100_000, workers: int = 1
) -> MinedAccount:
    if max_attempts < 1:
        raise MalformedInputError(f"max_attempts must be at least 1, got {max_attempts}")
    if workers < 1:
        raise MalformedInputError(f"workers must be at least 1, got {workers}")
    validate_seed(rng_seed)
    start = time.perf_counter()
    if workers == 1:
        account, stats = _search_lowercase(rng_seed, max_attempts)
        all_stats = [stats]
    else:
        per_worker = -(-max_attempts // workers)
        account, all_stats = _run_parallel(
            _search_lowercase,
            [(derive_worker_seed(rng_seed, i), per_worker) for i in range(workers)],
        )
    if account is None:
        raise NotFoundError(
            f"No all-lowercase checksum account in {max_attempts} attempts",
            stats={
                "attempts": _sum_stats(all_stats, "attempts"),
                "elapsed_ms": _elapsed_ms(start),
            },
        )
    log(
        f"Mined lowercase checksum account {account.address} after "
        f"{account.attempts} attempts"
    )
    return account


def mine_similar_pair(
    rng_seed: bytes = DEFAULT_SEED,
    time_budget: float = 120.0,
    workers: int = 1,
    max_nonce: int = DEFAULT_NONCE_LIMIT,
) -> SimilarPair:
    if time_budget <= 0:
        raise MalformedInputError(f"time_budget must be positive, got {time_budget}")
    if workers < 1:
        raise MalformedInputError(f"workers must be at least 1, got {workers}")
    validate_seed(rng_seed)
    start = time.perf_counter()
    if workers == 1:
        pair, stats = _search_similar_pair(rng_seed, time_budget, max_nonce)
        all_stats = [stats]
    else:
        pair, all_stats = _run_parallel(
            _search_similar_pair,
            [
                (derive_worker_seed(rng_seed, i), time_budget, max_nonce)
                for i in range(workers)
            ],
            wait_timeout=time_budget + 30,
        )
    if pair is None:
        raise NotFoundError(
            f"No similar address pair within {time_budget} seconds",
            stats={
                "candidates": _sum_stats(all_stats, "candidates"),
                "keys": _sum_stats(all_stats, "keys"),
                "elapsed_ms": _elapsed_ms(start),
            },
        )
    log(
        f"Mined similar pair decoy={pair.decoy} real={pair.real} "
        f"({pair.mutation.describe()})"
    )
    return pair


def find_selector_collision(
    spec: CollisionSearchSpec,
    time_budget: float = 3600.0,
    max_trials: typing.Optional[int] = None,
    workers: int = 1,
) -> CollisionResult:
    if time_budget <= 0:
        raise MalformedInputError(f"time_budget must be positive, got {time_budget}")
    if workers < 1:
        raise MalformedInputError(f"workers must be at least 1, got {workers}")
    start = time.perf_counter()
    if workers == 1:
        result, stats = _search_collision(spec, time_budget, max_trials)
        all_stats = [stats]
    else:
        per_worker = None if max_trials is None else -(-max_trials // workers)
        result, all_stats = _run_parallel(
            _search_collision,
            [(spec, time_budget, per_worker, i, workers) for i in range(workers)],
            wait_timeout=time_budget + 30,
        )
    if result is None:
        raise NotFoundError(
            f"No name colliding with {spec.target} on {spec.truncate_bits} bits",
            stats={
                "trials": _sum_stats(all_stats, "trials"),
                "elapsed_ms": _elapsed_ms(start),
            },
        )
    log(f"Found {result.signature} -> {result.selector} after {result.trials} trials")
    return result


def mine_selector_collision(
    spec: CollisionSearchSpec,
    time_budget: float = 3600.0,
    max_trials: typing.Optional[int] = None,
    workers: int = 1,
) -> FunctionSignature:
    return find_selector_collision(spec, time_budget, max_trials, workers).signature


def homograph_twin_selector(
    signature: FunctionSignature,
    substitutions: typing.Sequence[typing.Tuple[int, typing.Union[str, int]]],
    table: typing.Optional[ConfusablesTable] = None,
) -> Selector:
    """Selector of `signature` after swapping name characters for their twins

    Positions index the function name, starting at zero.
    """

    table = table or ConfusablesTable.builtin()
    chars = list(signature.name)
    for position, twin in substitutions:
        twin_char = chr(twin) if isinstance(twin, int) else twin
        if not 0 <= position < len(chars):
            raise InvalidSubstitutionError(
                f"Position {position} is outside the name {signature.name!r}"
            )
        original = signature.name[position]
        if twin_char not in table.twins(original):
            raise InvalidSubstitutionError(
                f"{twin_char!r} is not a known twin of {original!r} at position "
                f"{position}"
            )
        chars[position] = twin_char
    return compute_selector(signature.with_name("".join(chars)))


def predict_deployment_plan(
    deployer_key: PrivateKey, nonces: typing.Iterable[int]
) -> typing.List[typing.Tuple[int, Address]]:
    """Addresses that the key's account will deploy contracts at"""
    deployer = derive_address(deployer_key)
    return [(nonce, predict_contract_address(deployer, nonce)) for nonce in nonces]


def lowercase_checksum_rate(addresses: typing.Iterable[Address]) -> float:
    total = 0
    lowercase = 0
    for address in addresses:
        total += 1
        if is_lowercase_checksum_account(address):
            lowercase += 1
    return lowercase / total if total else 0.0
