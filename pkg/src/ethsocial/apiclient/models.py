import dataclasses
import enum
import hashlib
import typing

from ..crypto import Address
from ..errors import MalformedInputError


class CacheKind(enum.Enum):
    SOURCE = "source"
    TX_LIST = "txlist"


@dataclasses.dataclass(frozen=True)
class CacheEntry:
    address: Address
    kind: CacheKind
    fetched_at: float
    payload: bytes = dataclasses.field(repr=False)
    payload_digest: str

    @staticmethod
    def digest(payload: bytes) -> str:
        return hashlib.sha256(payload).hexdigest()

    @property
    def is_intact(self) -> bool:
        return self.digest(self.payload) == self.payload_digest

    def is_fresh(self, ttl: typing.Optional[float], now: float) -> bool:
        return ttl is None or now - self.fetched_at <= ttl


@dataclasses.dataclass(frozen=True)
class SourceBundle:
    """Verified source as returned by an explorer `getsourcecode` call

    `records` holds the raw result objects, one per contract, as the explorer
    sent them. The scanner preprocessing knows how to unpack them.
    """

    address: Address
    network: str
    records: typing.Tuple[typing.Dict, ...]

    @property
    def origin(self) -> str:
        return f"{self.network}:{self.address.prefixed}"

    @property
    def contract_name(self) -> typing.Optional[str]:
        return self.records[0].get("ContractName") if self.records else None


@dataclasses.dataclass(frozen=True)
class TxRecord:
    hash: str
    from_address: str
    to_address: str
    value: int
    block_number: int = 0

    @classmethod
    def from_json(cls, raw: typing.Any) -> "TxRecord":
        if not isinstance(raw, dict):
            raise MalformedInputError(f"Transaction entry must be an object, got {raw!r}")
        try:
            return cls(
                hash=str(raw.get("hash", "")),
                from_address=str(raw.get("from") or "").lower(),
                to_address=str(raw.get("to") or "").lower(),
                value=int(raw.get("value") or 0),
                block_number=int(raw.get("blockNumber") or 0),
            )
        except (TypeError, ValueError) as exc:
            raise MalformedInputError(
                f"Invalid transaction entry {raw.get('hash', '')!r}: {exc}"
            ) from exc

    def is_outgoing_from(self, address: Address) -> bool:
        return self.from_address == address.prefixed
