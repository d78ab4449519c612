"""Advisories that help a human reviewer see what the source hides

Codes follow the user-facing recommendations: R1 address change, R2 unused
hard-coded accounts, R3 look-alike addresses, R4 lowercase checksums, R5 string
comparison and R6 the inter-contract call hex viewer.
"""

import dataclasses
import enum
import itertools
import re
import typing

from ..crypto import (
    Address,
    Selector,
    compute_selector,
    eip55_encode,
    normalize_signature,
)
from ..errors import EthSocialError, MalformedInputError
from ..homograph import ZERO_WIDTH_CODEPOINTS, ConfusablesTable, ascii_fold
from ..utils import log
from .preprocess import SourceUnit, Token, TokenKind
from .signatures import (
    ScanContext,
    Signature,
    branch_conditions,
    detect_signatures,
    is_address_literal,
    require_conditions,
)

_ADDRESS_TEXT = re.compile(r"0[xX][0-9a-fA-F]{40}")


class ChainClient(typing.Protocol):
    def outgoing_tx_count(self, address: Address) -> int:
        ...


class AdvisoryCode(enum.Enum):
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"
    R5 = "R5"
    R6 = "R6"


class AdvisoryKind(enum.Enum):
    ADDRESS_CHANGE = "address_change"
    UNUSED_ACCOUNT = "unused_account"
    UNVERIFIED_ACCOUNT = "unverified_account"
    LOOKALIKE_ADDRESSES = "lookalike_addresses"
    LOWERCASE_CHECKSUM = "lowercase_checksum"
    STRING_COMPARISON = "string_comparison"
    INVISIBLE_LITERAL = "invisible_literal"
    HEX_VIEW = "hex_view"
    LITERAL_BYTES = "literal_bytes"
    MUTABLE_CALL_ARGUMENT = "mutable_call_argument"
    SELECTOR_MISMATCH = "selector_mismatch"
    SELECTOR_COLLISION = "selector_collision"


class Severity(enum.Enum):
    INFO = "info"
    WARNING = "warning"
    DANGER = "danger"


@dataclasses.dataclass(frozen=True)
class Advisory:
    code: AdvisoryCode
    kind: AdvisoryKind
    severity: Severity
    message: str
    location: typing.Optional[typing.Tuple[str, int]] = None
    details: typing.Dict[str, typing.Any] = dataclasses.field(
        default_factory=dict, compare=False
    )

    @property
    def sort_key(self):
        file_name, line = self.location or ("", 0)
        return self.code.value, file_name, line, self.kind.value, self.message

    def to_json(self) -> typing.Dict:
        return {
            "code": self.code.value,
            "kind": self.kind.value,
            "severity": self.severity.value,
            "message": self.message,
            "location": list(self.location) if self.location else None,
            "details": self.details,
        }


def hex_view(value: str) -> typing.Dict[str, typing.Any]:
    """What a hex viewer shows for a string literal"""
    return {
        "literal": value,
        "utf8_hex": value.encode("utf-8").hex(),
        "length_bytes": len(value.encode("utf-8")),
        "non_ascii": [
            f"U+{ord(char):04X}@{index}"
            for index, char in enumerate(value)
            if not char.isascii()
        ],
    }


def _selector_of(text: str) -> typing.Optional[Selector]:
    try:
        return compute_selector(normalize_signature(text))
    except MalformedInputError:
        return None


def _one_mutation_apart(first: str, second: str) -> typing.Optional[str]:
    differences = [index for index in range(len(first)) if first[index] != second[index]]
    if len(differences) == 1:
        return "substitution"
    if (
        len(differences) == 2
        and differences[1] == differences[0] + 1
        and first[differences[0]] == second[differences[1]]
        and first[differences[1]] == second[differences[0]]
    ):
        return "adjacent_swap"
    return None


def _address_occurrences(
    context: ScanContext,
) -> typing.Dict[Address, typing.Tuple[str, int]]:
    """First location of every address written as a hex literal"""
    result: typing.Dict[Address, typing.Tuple[str, int]] = {}
    for file_name, token in context.all_tokens():
        if is_address_literal(token):
            result.setdefault(Address.from_hex(token.text), (file_name, token.line))
    return result


def _check_address_change(
    context: ScanContext, hits: typing.Dict[Signature, typing.Any]
) -> typing.List[Advisory]:
    mutation = hits.get(Signature.S1)
    moves_ether = any(stack.ether_transfers for stack in context.stacks)
    if mutation is None or not moves_ether:
        return []
    return [
        Advisory(
            AdvisoryCode.R1,
            AdvisoryKind.ADDRESS_CHANGE,
            Severity.WARNING,
            "A public function can change an address in a contract that moves Ether",
            location,
            {"excerpt": context.excerpt(*location)},
        )
        for location in mutation.locations
    ]


def _check_unused_accounts(
    addresses: typing.Dict[Address, typing.Tuple[str, int]],
    chain_client: typing.Optional[ChainClient],
) -> typing.List[Advisory]:
    result = []
    for address, location in sorted(addresses.items()):
        rendered = eip55_encode(address).text
        if chain_client is None:
            result.append(
                Advisory(
                    AdvisoryCode.R2,
                    AdvisoryKind.UNVERIFIED_ACCOUNT,
                    Severity.INFO,
                    f"Check that {rendered} has at least one outgoing transaction",
                    location,
                    {"address": rendered},
                )
            )
            continue
        try:
            count = chain_client.outgoing_tx_count(address)
        except EthSocialError as exc:
            log(f"Could not check outgoing transactions of {rendered}: {exc}", debug=False)
            result.append(
                Advisory(
                    AdvisoryCode.R2,
                    AdvisoryKind.UNVERIFIED_ACCOUNT,
                    Severity.INFO,
                    f"Outgoing transactions of {rendered} could not be checked",
                    location,
                    {"address": rendered, "error": str(exc)},
                )
            )
            continue
        if count == 0:
            result.append(
                Advisory(
                    AdvisoryCode.R2,
                    AdvisoryKind.UNUSED_ACCOUNT,
                    Severity.WARNING,
                    f"{rendered} never sent a transaction, nobody may control it yet",
                    location,
                    {"address": rendered, "outgoing_tx_count": 0},
                )
            )
    return result


def _check_lookalikes(
    addresses: typing.Dict[Address, typing.Tuple[str, int]]
) -> typing.List[Advisory]:
    result = []
    for first, second in itertools.combinations(sorted(addresses), 2):
        mutation = _one_mutation_apart(first.hex, second.hex)
        if mutation is None:
            continue
        first_text = eip55_encode(first).text
        second_text = eip55_encode(second).text
        result.append(
            Advisory(
                AdvisoryCode.R3,
                AdvisoryKind.LOOKALIKE_ADDRESSES,
                Severity.DANGER,
                f"{first_text} and {second_text} differ by one {mutation.replace('_', ' ')}",
                addresses[second],
                {"addresses": [first_text, second_text], "mutation": mutation},
            )
        )
    return result


def _check_lowercase_checksums(
    context: ScanContext,
    addresses: typing.Dict[Address, typing.Tuple[str, int]],
) -> typing.List[Advisory]:
    candidates = dict(addresses)
    for literal in context.unit.string_literals:
        for match in _ADDRESS_TEXT.finditer(literal.value):
            candidates.setdefault(
                Address.from_hex(match.group()), (literal.file, literal.line)
            )
    result = []
    for address, location in sorted(candidates.items()):
        rendered = eip55_encode(address)
        if rendered.is_all_lowercase:
            result.append(
                Advisory(
                    AdvisoryCode.R4,
                    AdvisoryKind.LOWERCASE_CHECKSUM,
                    Severity.WARNING,
                    f"{rendered.text} has an all-lowercase checksum, avoid it for testing",
                    location,
                    {"address": rendered.text},
                )
            )
    return result


def _comparison_literals(
    context: ScanContext,
) -> typing.List[typing.Tuple[typing.Any, Token]]:
    """String literals used in branching or require conditions"""
    result = []
    for _, item in context.outline.all_callables():
        conditions = list(branch_conditions(item.body))
        conditions.extend(condition for _, condition in require_conditions(item.body))
        for condition in conditions:
            result.extend(
                (item, token) for token in condition if token.kind == TokenKind.STRING
            )
    return result


def _check_string_comparisons(context: ScanContext) -> typing.List[Advisory]:
    transferring = {
        id(member)
        for stack in context.stacks
        if stack.transfers
        for member in stack.members
    }
    result = []
    for item, token in _comparison_literals(context):
        value = token.value or ""
        location = (item.file, token.line)
        if id(item) in transferring:
            result.append(
                Advisory(
                    AdvisoryCode.R5,
                    AdvisoryKind.STRING_COMPARISON,
                    Severity.WARNING,
                    f"Transfer depends on comparing the string {value!r}",
                    location,
                    hex_view(value),
                )
            )
        result.append(
            Advisory(
                AdvisoryCode.R6,
                AdvisoryKind.LITERAL_BYTES,
                Severity.INFO,
                f"Compared literal holds {len(value.encode('utf-8'))} bytes",
                location,
                hex_view(value),
            )
        )
    return result


def _check_invisible_literals(context: ScanContext) -> typing.List[Advisory]:
    result = []
    for literal in context.unit.string_literals:
        invisible = [char for char in literal.value if ord(char) in ZERO_WIDTH_CODEPOINTS]
        if not invisible:
            continue
        renders_empty = len(invisible) == len(literal.value)
        message = (
            "Literal renders as an empty string but is not empty"
            if renders_empty
            else "Literal holds invisible characters"
        )
        result.append(
            Advisory(
                AdvisoryCode.R5,
                AdvisoryKind.INVISIBLE_LITERAL,
                Severity.DANGER,
                message,
                (literal.file, literal.line),
                hex_view(literal.value),
            )
        )
    return result


def _declared_selectors(
    context: ScanContext,
) -> typing.Dict[Selector, typing.List[str]]:
    result: typing.Dict[Selector, typing.List[str]] = {}
    for _, item in context.outline.all_callables():
        if item.kind != "function":
            continue
        selector = _selector_of(item.signature_text)
        if selector is not None:
            names = result.setdefault(selector, [])
            if item.signature_text not in names:
                names.append(item.signature_text)
    return result


def _check_call_arguments(
    context: ScanContext, table: ConfusablesTable
) -> typing.List[Advisory]:
    declared = _declared_selectors(context)
    declared_by_text = {
        normalize_signature(text).canonical: selector
        for selector, texts in declared.items()
        for text in texts
    }
    result = []
    seen = set()
    for stack in context.stacks:
        for call in stack.calls:
            key = (call.location, call.index)
            if key in seen:
                continue
            seen.add(key)
            literals = [token for token in call.arguments if token.kind == TokenKind.STRING]
            if not literals:
                if call.arguments:
                    result.append(
                        Advisory(
                            AdvisoryCode.R6,
                            AdvisoryKind.MUTABLE_CALL_ARGUMENT,
                            Severity.WARNING,
                            f"{call.method}() arguments are not literals and cannot be verified",
                            call.location,
                        )
                    )
                continue
            for token in literals:
                result.extend(
                    _literal_call_advisories(
                        call.method, call.location, token, declared, declared_by_text, table
                    )
                )
    return result


def _literal_call_advisories(
    method: str,
    location: typing.Tuple[str, int],
    token: Token,
    declared: typing.Dict[Selector, typing.List[str]],
    declared_by_text: typing.Dict[str, Selector],
    table: ConfusablesTable,
) -> typing.List[Advisory]:
    value = token.value or ""
    selector = _selector_of(value)
    details = hex_view(value)
    details["selector"] = selector.hex if selector is not None else None
    result = [
        Advisory(
            AdvisoryCode.R6,
            AdvisoryKind.HEX_VIEW,
            Severity.INFO,
            f"{method}() literal {value!r} is {details['utf8_hex'] or 'empty'}",
            location,
            details,
        )
    ]
    if selector is None:
        return result
    literal_canonical = normalize_signature(value).canonical
    folded = ascii_fold(value, table, drop_invisible=True)
    folded_selector = _selector_of(folded)
    if folded != value and folded_selector is not None:
        folded_canonical = normalize_signature(folded).canonical
        if folded_canonical in declared_by_text and folded_selector != selector:
            result.append(
                Advisory(
                    AdvisoryCode.R6,
                    AdvisoryKind.SELECTOR_MISMATCH,
                    Severity.DANGER,
                    f"{method}() literal looks like {folded_canonical} but selects "
                    f"{selector.hex} instead of {folded_selector.hex}",
                    location,
                    dict(details, lookalike=folded_canonical),
                )
            )
    colliding = [
        text
        for text in declared.get(selector, [])
        if normalize_signature(text).canonical != literal_canonical
    ]
    if colliding:
        result.append(
            Advisory(
                AdvisoryCode.R6,
                AdvisoryKind.SELECTOR_COLLISION,
                Severity.DANGER,
                f"{method}() literal selects {selector.hex}, which is also "
                f"{', '.join(colliding)}",
                location,
                dict(details, colliding_functions=colliding),
            )
        )
    return result


def auditor_checks(
    unit: SourceUnit,
    chain_client: typing.Optional[ChainClient] = None,
    table: typing.Optional[ConfusablesTable] = None,
    context: typing.Optional[ScanContext] = None,
) -> typing.List[Advisory]:
    context = context or ScanContext(unit)
    table = table or ConfusablesTable.builtin()
    hits = {hit.signature_id: hit for hit in detect_signatures(unit, context)}
    addresses = _address_occurrences(context)
    advisories = []
    advisories.extend(_check_address_change(context, hits))
    advisories.extend(_check_unused_accounts(addresses, chain_client))
    advisories.extend(_check_lookalikes(addresses))
    advisories.extend(_check_lowercase_checksums(context, addresses))
    advisories.extend(_check_string_comparisons(context))
    advisories.extend(_check_invisible_literals(context))
    advisories.extend(_check_call_arguments(context, table))
    return sorted(advisories, key=lambda advisory: advisory.sort_key)
