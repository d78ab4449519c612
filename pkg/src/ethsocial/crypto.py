"""Deterministic Ethereum primitives

Address derivation, EIP-55 checksums, function selectors and contract address
prediction. Everything here is pure and safe to call from concurrent workers.
"""

import dataclasses
import enum
import re
import string
import typing

import coincurve
import rlp
from Crypto.Hash import keccak

from .errors import (
    InvalidKeyError,
    MalformedInputError,
    MalformedSignatureError,
)
from .utils import strip_hex_prefix

SECP256K1_ORDER = int(
    "fffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141", 16
)
MAX_ARITY = 16

_HEX_DIGITS = frozenset(string.hexdigits)
_HEX_LETTERS = frozenset("abcdef")


def keccak256(data: bytes) -> bytes:
    hasher = keccak.new(digest_bits=256)
    hasher.update(data)
    return hasher.digest()


def _parse_hex(value: str, num_bytes: int, kind: str) -> bytes:
    digits = strip_hex_prefix(value.strip())
    if len(digits) != num_bytes * 2 or not all(c in _HEX_DIGITS for c in digits):
        raise MalformedInputError(
            f"Expected {num_bytes * 2} hex digits for {kind}, got {value!r}"
        )
    return bytes.fromhex(digits)


@dataclasses.dataclass(frozen=True, order=True)
class Address:
    value: bytes

    def __post_init__(self):
        if len(self.value) != 20:
            raise MalformedInputError(
                f"An address has 20 bytes, got {len(self.value)}"
            )

    @classmethod
    def from_hex(cls, value: str) -> "Address":
        return cls(_parse_hex(value, 20, "an address"))

    @property
    def hex(self) -> str:
        return self.value.hex()

    @property
    def prefixed(self) -> str:
        return f"0x{self.value.hex()}"

    def __str__(self):
        return self.prefixed


def _apply_checksum(lowercase_hex: str) -> str:
    digest = keccak256(lowercase_hex.encode("ascii")).hex()
    return "".join(
        char.upper() if char in _HEX_LETTERS and int(digest[index], 16) >= 8 else char
        for index, char in enumerate(lowercase_hex)
    )


@dataclasses.dataclass(frozen=True)
class Eip55Address:
    text: str

    def __post_init__(self):
        if len(self.text) != 42 or not self.text.startswith("0x"):
            raise MalformedInputError(f"Not a prefixed address: {self.text!r}")
        body = self.text[2:]
        if not all(c in _HEX_DIGITS for c in body):
            raise MalformedInputError(f"Non-hex characters in {self.text!r}")
        if _apply_checksum(body.lower()) != body:
            raise MalformedInputError(f"Invalid EIP-55 capitalization: {self.text!r}")

    @property
    def is_all_lowercase(self) -> bool:
        return self.text == self.text.lower()

    def to_address(self) -> Address:
        return Address.from_hex(self.text)

    def __str__(self):
        return self.text


@dataclasses.dataclass(frozen=True)
class PrivateKey:
    scalar: bytes = dataclasses.field(repr=False)

    def __post_init__(self):
        if len(self.scalar) != 32:
            raise InvalidKeyError(f"A private key has 32 bytes, got {len(self.scalar)}")
        if not 0 < int.from_bytes(self.scalar, "big") < SECP256K1_ORDER:
            raise InvalidKeyError("Private key scalar is outside the secp256k1 range")

    @classmethod
    def from_hex(cls, value: str) -> "PrivateKey":
        try:
            raw = _parse_hex(value, 32, "a private key")
        except MalformedInputError as exc:
            raise InvalidKeyError(str(exc)) from exc
        return cls(raw)

    @classmethod
    def from_int(cls, value: int) -> "PrivateKey":
        if not 0 < value < SECP256K1_ORDER:
            raise InvalidKeyError("Private key scalar is outside the secp256k1 range")
        return cls(value.to_bytes(32, "big"))

    @property
    def hex(self) -> str:
        return self.scalar.hex()


@dataclasses.dataclass(frozen=True)
class FunctionSignature:
    name: str
    arg_types: typing.Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise MalformedSignatureError("Function name must not be empty")
        if len(self.arg_types) > MAX_ARITY:
            raise MalformedSignatureError(
                f"Arity {len(self.arg_types)} exceeds the maximum of {MAX_ARITY}"
            )

    @property
    def canonical(self) -> str:
        return f"{self.name}({','.join(self.arg_types)})"

    def with_name(self, name: str) -> "FunctionSignature":
        return dataclasses.replace(self, name=name)

    def __str__(self):
        return self.canonical


@dataclasses.dataclass(frozen=True, order=True)
class Selector:
    value: bytes

    def __post_init__(self):
        if len(self.value) != 4:
            raise MalformedInputError(f"A selector has 4 bytes, got {len(self.value)}")

    @classmethod
    def from_hex(cls, value: str) -> "Selector":
        return cls(_parse_hex(value, 4, "a selector"))

    @property
    def hex(self) -> str:
        return f"0x{self.value.hex()}"

    def top_bits(self, num_bits: int) -> int:
        return int.from_bytes(self.value, "big") >> (32 - num_bits)

    def __str__(self):
        return self.hex


class Eip55Status(enum.Enum):
    VALID_MIXED_CASE = "valid_mixed_case"
    ALL_LOWERCASE = "all_lowercase"
    ALL_UPPERCASE = "all_uppercase"
    INVALID_CHECKSUM = "invalid_checksum"
    MALFORMED = "malformed"


@dataclasses.dataclass(frozen=True)
class Eip55Validation:
    status: Eip55Status
    # NOTE: only set for inputs written in a single case, which are the
    # un-checksummed renderings of a valid address. A mixed-case string with
    # wrong capitalization is more likely a typo and leaves this False.
    case_insensitive_match: bool = False
    expected: typing.Optional[str] = None

    @property
    def is_lowercase_hazard(self) -> bool:
        return self.status == Eip55Status.ALL_LOWERCASE


def derive_address(key: PrivateKey) -> Address:
    public_point = coincurve.PrivateKey(key.scalar).public_key.format(
        compressed=False
    )
    return Address(keccak256(public_point[1:])[-20:])


def eip55_encode(address: Address) -> Eip55Address:
    return Eip55Address(f"0x{_apply_checksum(address.hex)}")


def eip55_validate(text: str) -> Eip55Validation:
    if (
        not isinstance(text, str)
        or len(text) != 42
        or not text.startswith("0x")
        or not all(c in _HEX_DIGITS for c in text[2:])
    ):
        return Eip55Validation(Eip55Status.MALFORMED)
    body = text[2:]
    expected = _apply_checksum(body.lower())
    prefixed_expected = f"0x{expected}"
    if body == expected:
        if expected == expected.lower():
            status = Eip55Status.ALL_LOWERCASE
        else:
            status = Eip55Status.VALID_MIXED_CASE
        result = Eip55Validation(status, expected=prefixed_expected)
    elif body == body.lower():
        result = Eip55Validation(
            Eip55Status.INVALID_CHECKSUM,
            case_insensitive_match=True,
            expected=prefixed_expected,
        )
    elif body == body.upper():
        result = Eip55Validation(
            Eip55Status.ALL_UPPERCASE,
            case_insensitive_match=True,
            expected=prefixed_expected,
        )
    else:
        result = Eip55Validation(
            Eip55Status.INVALID_CHECKSUM, expected=prefixed_expected
        )
    return result


def compute_selector(signature: FunctionSignature) -> Selector:
    return Selector(keccak256(signature.canonical.encode("utf-8"))[:4])


_INTEGER_TYPE_PATTERN = re.compile(r"^(u?int)(\d*)((?:\[\d*\])*)$")
_FIXED_TYPE_PATTERN = re.compile(r"^u?fixed")
_PLAIN_TYPE_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*((?:\[\d*\])*)$")
_IGNORED_QUALIFIERS = frozenset(
    ("memory", "calldata", "storage", "payable", "indexed")
)


def _split_top_level(text: str) -> typing.List[str]:
    parts = []
    depth = 0
    current = []
    for char in text:
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        if char == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(char)
    parts.append("".join(current))
    return parts


def _canonical_type(raw_param: str, raw_signature: str) -> str:
    param = re.sub(r"\s+(?=\[)", "", raw_param.strip())
    if param.startswith("("):
        depth = 0
        for index, char in enumerate(param):
            depth += {"(": 1, ")": -1}.get(char, 0)
            if depth == 0:
                break
        inner, rest = param[1:index], param[index + 1 :]
        suffix_match = re.match(r"^((?:\[\d*\])*)", rest.strip())
        suffix = suffix_match.group(1) if suffix_match else ""
        members = _split_top_level(inner) if inner.strip() else []
        canonical_members = [_canonical_type(m, raw_signature) for m in members]
        return f"({','.join(canonical_members)}){suffix}"
    tokens = [t for t in param.split() if t not in _IGNORED_QUALIFIERS]
    if not tokens:
        raise MalformedSignatureError(f"Empty parameter in {raw_signature!r}")
    type_name = tokens[0]
    if _FIXED_TYPE_PATTERN.match(type_name):
        raise MalformedSignatureError(
            f"Fixed point types are not supported: {type_name!r}"
        )
    integer_match = _INTEGER_TYPE_PATTERN.match(type_name)
    if integer_match is not None:
        base, size, suffix = integer_match.groups()
        return f"{base}{size or '256'}{suffix}"
    if _PLAIN_TYPE_PATTERN.match(type_name) is None:
        raise MalformedSignatureError(
            f"Unrecognized parameter type {type_name!r} in {raw_signature!r}"
        )
    return type_name


def normalize_signature(raw: str) -> FunctionSignature:
    text = raw.strip()
    open_index = text.find("(")
    if open_index <= 0 or not text.endswith(")"):
        raise MalformedSignatureError(f"Expected name(args), got {raw!r}")
    depth = 0
    for position, char in enumerate(text[open_index:], start=open_index):
        depth += {"(": 1, ")": -1}.get(char, 0)
        if depth < 0 or (depth == 0 and position != len(text) - 1):
            raise MalformedSignatureError(f"Unbalanced parentheses in {raw!r}")
    if depth != 0:
        raise MalformedSignatureError(f"Unbalanced parentheses in {raw!r}")
    name = text[:open_index].strip()
    if not name or any(c.isspace() for c in name):
        raise MalformedSignatureError(f"Invalid function name in {raw!r}")
    inner = text[open_index + 1 : -1]
    if inner.strip():
        arg_types = tuple(_canonical_type(p, raw) for p in _split_top_level(inner))
    else:
        arg_types = ()
    if len(arg_types) > MAX_ARITY:
        raise MalformedSignatureError(
            f"Arity {len(arg_types)} exceeds the maximum of {MAX_ARITY} in {raw!r}"
        )
    return FunctionSignature(name=name, arg_types=arg_types)


def predict_contract_address(deployer: Address, nonce: int) -> Address:
    if nonce < 0:
        raise MalformedInputError(f"Nonce must be non-negative, got {nonce}")
    encoded = rlp.encode([deployer.value, nonce])
    return Address(keccak256(encoded)[-20:])
