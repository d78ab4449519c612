import dataclasses
import enum
import json
import os
import typing
from pathlib import Path

import toml

from .miners import DEFAULT_SEED
from .utils import strip_hex_prefix

API_KEY_ENV_VAR = "ETHERSCAN_API_KEY"
DEFAULT_CACHE_DIR = Path("~/.cache/ethsocial").expanduser()


class Network(enum.Enum):
    MAINNET = "mainnet"
    ROPSTEN = "ropsten"
    KOVAN = "kovan"
    CUSTOM = "custom"


DEFAULT_BASE_URLS = {
    Network.MAINNET: "https://api.etherscan.io/api",
    Network.ROPSTEN: "https://api-ropsten.etherscan.io/api",
    Network.KOVAN: "https://api-kovan.etherscan.io/api",
}


def _get_api_key_from_env() -> typing.Optional[str]:
    return os.getenv(API_KEY_ENV_VAR) or None


@dataclasses.dataclass
class NetworkConfig:
    """Where and how fast to talk to an explorer API"""

    name: Network
    base_url: str
    api_key: typing.Optional[str] = dataclasses.field(
        default_factory=_get_api_key_from_env
    )
    rate_limit: float = 5.0
    # seconds, None means entries never expire
    source_ttl: typing.Optional[float] = None
    tx_ttl: typing.Optional[float] = 3600.0
    max_retries: int = 5
    backoff_base: float = 0.5
    backoff_cap: float = 8.0
    timeout: float = 10.0
    cache_dir: Path = DEFAULT_CACHE_DIR

    def __post_init__(self):
        if self.rate_limit <= 0:
            raise ValueError(f"rate_limit must be positive, got {self.rate_limit!r}")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must not be negative: {self.max_retries!r}")
        if not self.base_url:
            raise ValueError(f"Network {self.name.value!r} needs a base_url")
        self.cache_dir = Path(self.cache_dir).expanduser()

    @classmethod
    def for_network(cls, network: Network, **overrides) -> "NetworkConfig":
        base_url = overrides.pop("base_url", None) or DEFAULT_BASE_URLS.get(network)
        if base_url is None:
            raise ValueError(f"Network {network.value!r} needs an explicit base_url")
        return cls(name=network, base_url=base_url, **overrides)

    @classmethod
    def from_dict(cls, raw: typing.Dict) -> "NetworkConfig":
        values = dict(raw)
        try:
            network = Network(values.pop("name", Network.MAINNET.value))
        except ValueError as exc:
            raise ValueError(f"Unknown network: {raw.get('name')!r}") from exc
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"Unknown network settings: {sorted(unknown)!r}")
        if "cache_dir" in values:
            values["cache_dir"] = Path(values["cache_dir"])
        return cls.for_network(network, **values)

    def to_json(self):
        return json.dumps(
            {
                "name": self.name.value,
                "base_url": self.base_url,
                "api_key": "***" if self.api_key else None,
                "rate_limit": self.rate_limit,
                "source_ttl": self.source_ttl,
                "tx_ttl": self.tx_ttl,
                "max_retries": self.max_retries,
                "cache_dir": str(self.cache_dir),
            }
        )


def parse_seed(raw: typing.Union[str, bytes]) -> bytes:
    if isinstance(raw, bytes):
        seed = raw
    else:
        try:
            seed = bytes.fromhex(strip_hex_prefix(raw.strip()))
        except ValueError as exc:
            raise ValueError(f"Seed must be hex encoded: {raw!r}") from exc
    if len(seed) != 32:
        raise ValueError(f"Seed must be 32 bytes, got {len(seed)}")
    return seed


@dataclasses.dataclass
class CliConfig:
    network: NetworkConfig = dataclasses.field(
        default_factory=lambda: NetworkConfig.for_network(Network.MAINNET)
    )
    confusables_path: typing.Optional[Path] = None
    workers: int = 1
    seed: bytes = DEFAULT_SEED
    output_dir: Path = Path("ethsocial-output")
    verbosity: int = 0

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers!r}")
        self.seed = parse_seed(self.seed)

    @classmethod
    def from_dict(cls, raw: typing.Dict) -> "CliConfig":
        values = dict(raw)
        network = NetworkConfig.from_dict(values.pop("network", {}))
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"Unknown configuration keys: {sorted(unknown)!r}")
        for path_key in ("confusables_path", "output_dir"):
            if values.get(path_key) is not None:
                values[path_key] = Path(values[path_key])
        return cls(network=network, **values)

    @classmethod
    def load(cls, path: typing.Optional[Path] = None) -> "CliConfig":
        if path is None:
            result = cls()
        else:
            result = cls.from_dict(toml.load(str(path)))
        return result

    def to_json(self):
        return json.dumps(
            {
                "network": json.loads(self.network.to_json()),
                "confusables_path": str(self.confusables_path)
                if self.confusables_path is not None
                else None,
                "workers": self.workers,
                "seed": self.seed.hex(),
                "output_dir": str(self.output_dir),
                "verbosity": self.verbosity,
            }
        )
