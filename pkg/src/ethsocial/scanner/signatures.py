"""Signature detectors: atomic markers of social engineering patterns

Each detector is a function registered in `SIGNATURE_DETECTORS`. Detectors
look at the token stream and the contract outline of a unit and return the
places where their marker occurs.

A "call stack" is approximated lexically: a callable's own body, its
modifiers and the functions it calls by name, one level deep, searched in the
contract and its bases.
"""

import dataclasses
import enum
import re
import typing

from .preprocess import SourceUnit, Token, TokenKind
from .structure import (
    Callable,
    Contract,
    TokenSlice,
    UnitOutline,
    matching_close,
    matching_open,
    split_top_level,
    statement_end,
    statement_start,
)

_ADDRESS_LITERAL = re.compile(r"0[xX][0-9a-fA-F]{40}")
_BYTES32_LITERAL = re.compile(r"0[xX][0-9a-fA-F]{64}")
_TOKEN_TRANSFER_METHODS = frozenset(("transferFrom", "safeTransfer", "safeTransferFrom"))
_LOW_LEVEL_CALLS = frozenset(("call", "delegatecall"))
_HASH_FUNCTIONS = frozenset(("keccak256", "sha3"))
_EXCERPT_WIDTH = 120


class Signature(enum.Enum):
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    S4 = "S4"
    S5 = "S5"
    S6 = "S6"
    S7 = "S7"
    S8 = "S8"
    S9 = "S9"
    S10 = "S10"
    S11 = "S11"
    S12 = "S12"
    S13 = "S13"
    S14 = "S14"
    S15 = "S15"
    S16 = "S16"
    S17 = "S17"
    S18 = "S18"
    S19 = "S19"
    S20 = "S20"
    S21 = "S21"
    S22 = "S22"

    @property
    def number(self) -> int:
        return int(self.value[1:])

    @property
    def description(self) -> str:
        return SIGNATURE_DESCRIPTIONS[self]


SIGNATURE_DESCRIPTIONS = {
    Signature.S1: "Non-constructor public or external function alters an address variable",
    Signature.S2: "Ether transfer with another Ether transfer in the same call stack",
    Signature.S3: "Ether transfer with a call-with-value in the same call stack",
    Signature.S4: "Ether transfer with a token transfer in the same call stack",
    Signature.S5: "Contract has a payable function",
    Signature.S6: "emit inside the call stack of a payable function",
    Signature.S7: "Constant address variable with a hard-coded value",
    Signature.S8: "Non-constant address variable with a hard-coded value",
    Signature.S9: "Ether transfer to a hard-coded address",
    Signature.S10: "Hard-coded bytes32 value",
    Signature.S11: "Ether transfer inside a branching arm",
    Signature.S12: "Token transfer inside a branching arm",
    Signature.S13: "Ether transfer with a require in the same call stack",
    Signature.S14: "Token transfer with a require in the same call stack",
    Signature.S15: "bytes32 value inside a branching condition",
    Signature.S16: "Comparison of Keccak256 hash values",
    Signature.S17: "String literal in a branching condition",
    Signature.S18: "String literal in a require condition",
    Signature.S19: "Ether transfer with call or delegatecall in the same call stack",
    Signature.S20: "Token transfer with call or delegatecall in the same call stack",
    Signature.S21: "String literal with a non-ASCII character",
    Signature.S22: "Inter-contract call status used in a require",
}


class TransferKind(enum.Enum):
    DIRECT = "direct"
    VALUE_CALL = "value_call"
    TOKEN = "token"


@dataclasses.dataclass(frozen=True)
class TransferSite:
    kind: TransferKind
    owner: Callable = dataclasses.field(repr=False)
    index: int
    token: Token
    receiver: TokenSlice = dataclasses.field(repr=False, default=())

    @property
    def moves_ether(self) -> bool:
        return self.kind != TransferKind.TOKEN

    @property
    def location(self) -> typing.Tuple[str, int]:
        return self.owner.file, self.token.line


@dataclasses.dataclass(frozen=True)
class CallSite:
    method: str
    owner: Callable = dataclasses.field(repr=False)
    index: int
    token: Token
    arguments: TokenSlice = dataclasses.field(repr=False, default=())

    @property
    def location(self) -> typing.Tuple[str, int]:
        return self.owner.file, self.token.line


@dataclasses.dataclass(frozen=True)
class SignatureHit:
    signature_id: Signature
    locations: typing.Tuple[typing.Tuple[str, int], ...]
    evidence: str

    @property
    def sort_key(self) -> typing.Tuple[str, int, int]:
        file_name, line = self.locations[0]
        return file_name, line, self.signature_id.number

    def to_json(self) -> typing.Dict:
        return {
            "signature_id": self.signature_id.value,
            "locations": [[file_name, line] for file_name, line in self.locations],
            "evidence": self.evidence,
        }

    @classmethod
    def from_json(cls, raw: typing.Dict) -> "SignatureHit":
        return cls(
            signature_id=Signature(raw["signature_id"]),
            locations=tuple((str(item[0]), int(item[1])) for item in raw["locations"]),
            evidence=raw.get("evidence", ""),
        )


Evidence = typing.Tuple[str, int]


def is_address_literal(token: Token) -> bool:
    return token.kind == TokenKind.HEX_NUMBER and bool(
        _ADDRESS_LITERAL.fullmatch(token.text)
    )


def is_bytes32_literal(token: Token) -> bool:
    return token.kind == TokenKind.HEX_NUMBER and bool(
        _BYTES32_LITERAL.fullmatch(token.text)
    )


def _call_arguments(body: TokenSlice, open_index: int) -> typing.List[TokenSlice]:
    close = matching_close(body, open_index)
    return [part for part in split_top_level(body[open_index + 1 : close]) if part]


def _receiver(body: TokenSlice, dot_index: int) -> TokenSlice:
    end = dot_index - 1
    if end < 0:
        return ()
    start = end
    if body[end].text in (")", "]"):
        start = matching_open(body, end)
        if start > 0 and body[start - 1].kind == TokenKind.IDENTIFIER:
            start -= 1
    return body[start : end + 1]


def _is_value_call(body: TokenSlice, after: int) -> bool:
    if after >= len(body):
        return False
    if body[after].text == "{":
        close = matching_close(body, after)
        options = body[after + 1 : close]
        return any(
            token.text == "value"
            and position + 1 < len(options)
            and options[position + 1].text == ":"
            for position, token in enumerate(options)
        )
    return (
        body[after].text == "."
        and after + 1 < len(body)
        and body[after + 1].text == "value"
    )


def find_transfers(item: Callable) -> typing.List[TransferSite]:
    """Ether and token transfer markers in a callable's own body"""
    body = item.body
    result = []
    for position, token in enumerate(body):
        following = body[position + 1] if position + 1 < len(body) else None
        if token.text == "." and following is not None:
            method = following.text
            after = position + 2
            has_call = after < len(body) and body[after].text == "("
            if method in ("transfer", "send") and has_call:
                arguments = _call_arguments(body, after)
                if method == "send" or len(arguments) == 1:
                    result.append(
                        TransferSite(
                            TransferKind.DIRECT,
                            item,
                            position,
                            following,
                            _receiver(body, position),
                        )
                    )
                elif len(arguments) >= 2:
                    result.append(
                        TransferSite(
                            TransferKind.TOKEN, item, position, following, arguments[0]
                        )
                    )
            elif method in _TOKEN_TRANSFER_METHODS and has_call:
                result.append(TransferSite(TransferKind.TOKEN, item, position, following))
            elif method == "call" and _is_value_call(body, after):
                result.append(
                    TransferSite(
                        TransferKind.VALUE_CALL,
                        item,
                        position,
                        following,
                        _receiver(body, position),
                    )
                )
        elif (
            token.kind == TokenKind.IDENTIFIER
            and token.text in ("transfer", "_transfer")
            and following is not None
            and following.text == "("
            and (position == 0 or body[position - 1].text not in (".", "function"))
        ):
            arguments = _call_arguments(body, position + 1)
            if token.text == "_transfer" or len(arguments) >= 2:
                result.append(TransferSite(TransferKind.TOKEN, item, position, token))
    return result


def find_low_level_calls(item: Callable) -> typing.List[CallSite]:
    body = item.body
    result = []
    for position, token in enumerate(body[:-1]):
        method = body[position + 1]
        if token.text != "." or method.text not in _LOW_LEVEL_CALLS:
            continue
        cursor = position + 2
        if cursor < len(body) and body[cursor].text == "{":
            cursor = matching_close(body, cursor) + 1
        # legacy `.value(x).gas(y)` option chains
        while (
            cursor + 2 < len(body)
            and body[cursor].text == "."
            and body[cursor + 2].text == "("
        ):
            cursor = matching_close(body, cursor + 2) + 1
        arguments: TokenSlice = ()
        if cursor < len(body) and body[cursor].text == "(":
            arguments = body[cursor + 1 : matching_close(body, cursor)]
        result.append(CallSite(method.text, item, position, method, arguments))
    return result


def _arm(body: TokenSlice, start: int) -> typing.Tuple[int, int]:
    if start < len(body) and body[start].text == "{":
        return start, matching_close(body, start)
    return start, statement_end(body, start)


def branch_arms(body: TokenSlice) -> typing.List[typing.Tuple[int, int]]:
    """Inclusive token index ranges of if/else arms and ternary statements"""
    result = []
    for position, token in enumerate(body):
        following = body[position + 1] if position + 1 < len(body) else None
        if token.kind == TokenKind.IDENTIFIER and token.text == "if":
            if following is not None and following.text == "(":
                result.append(_arm(body, matching_close(body, position + 1) + 1))
        elif token.kind == TokenKind.IDENTIFIER and token.text == "else":
            if following is not None and following.text != "if":
                result.append(_arm(body, position + 1))
        elif token.kind == TokenKind.OPERATOR and token.text == "?":
            result.append(
                (statement_start(body, position), statement_end(body, position))
            )
    return result


def branch_conditions(body: TokenSlice) -> typing.List[TokenSlice]:
    result = []
    for position, token in enumerate(body):
        if (
            token.kind == TokenKind.IDENTIFIER
            and token.text == "if"
            and position + 1 < len(body)
            and body[position + 1].text == "("
        ):
            result.append(body[position + 2 : matching_close(body, position + 1)])
        elif token.kind == TokenKind.OPERATOR and token.text == "?":
            start = statement_start(body, position)
            for cursor in range(position - 1, start - 1, -1):
                if body[cursor].text in ("=", "return", ","):
                    start = cursor + 1
                    break
            result.append(body[start:position])
    return result


def require_conditions(body: TokenSlice) -> typing.List[typing.Tuple[Token, TokenSlice]]:
    """First argument of every `require(...)` in a body"""
    result = []
    for position, token in enumerate(body[:-1]):
        if (
            token.kind == TokenKind.IDENTIFIER
            and token.text == "require"
            and body[position + 1].text == "("
        ):
            arguments = _call_arguments(body, position + 1)
            result.append((token, arguments[0] if arguments else ()))
    return result


def _in_ranges(index: int, ranges: typing.Iterable[typing.Tuple[int, int]]) -> bool:
    return any(start <= index <= end for start, end in ranges)


@dataclasses.dataclass
class StackFacts:
    entry: Callable
    contract: Contract
    members: typing.List[Callable]
    transfers: typing.List[TransferSite]
    calls: typing.List[CallSite]

    def tokens_named(self, text: str) -> typing.List[typing.Tuple[Callable, Token]]:
        return [
            (member, token)
            for member in self.members
            for token in member.body
            if token.kind == TokenKind.IDENTIFIER and token.text == text
        ]

    @property
    def ether_transfers(self) -> typing.List[TransferSite]:
        return [site for site in self.transfers if site.moves_ether]

    @property
    def token_transfers(self) -> typing.List[TransferSite]:
        return [site for site in self.transfers if not site.moves_ether]


class ScanContext:
    """Everything a detector may look at, computed once per unit"""

    def __init__(self, unit: SourceUnit):
        self.unit = unit
        self.outline = UnitOutline(unit)
        self._lines = {
            source_file.name: source_file.text.splitlines() for source_file in unit.files
        }
        self._transfers: typing.Dict[int, typing.List[TransferSite]] = {}
        self._calls: typing.Dict[int, typing.List[CallSite]] = {}
        self.stacks = [
            self._stack_facts(contract, item)
            for contract, item in self.outline.all_callables()
            if item.kind != "modifier"
        ]
        self.hard_coded_addresses = self._find_hard_coded_addresses()

    def transfers_of(self, item: Callable) -> typing.List[TransferSite]:
        key = id(item)
        if key not in self._transfers:
            self._transfers[key] = find_transfers(item)
        return self._transfers[key]

    def calls_of(self, item: Callable) -> typing.List[CallSite]:
        key = id(item)
        if key not in self._calls:
            self._calls[key] = find_low_level_calls(item)
        return self._calls[key]

    def _stack_facts(self, contract: Contract, item: Callable) -> StackFacts:
        members = self.outline.call_stack(contract, item)
        return StackFacts(
            entry=item,
            contract=contract,
            members=members,
            transfers=[site for member in members for site in self.transfers_of(member)],
            calls=[site for member in members for site in self.calls_of(member)],
        )

    def excerpt(self, file_name: str, line: int) -> str:
        lines = self._lines.get(file_name, [])
        text = lines[line - 1].strip() if 0 < line <= len(lines) else ""
        return text[:_EXCERPT_WIDTH]

    def all_tokens(self) -> typing.Iterator[typing.Tuple[str, Token]]:
        for source_file in self.unit.files:
            for token in source_file.tokens:
                yield source_file.name, token

    def address_assignments(
        self,
    ) -> typing.Iterator[typing.Tuple[Contract, Callable, Token, TokenSlice]]:
        """`name = <rhs>` statements in callable bodies whose rhs holds an address literal"""
        for contract, item in self.outline.all_callables():
            body = item.body
            for position, token in enumerate(body[:-1]):
                if token.kind != TokenKind.IDENTIFIER or body[position + 1].text != "=":
                    continue
                if position > 0 and body[position - 1].text == ".":
                    continue
                rhs = body[position + 2 : statement_end(body, position)]
                if any(is_address_literal(candidate) for candidate in rhs):
                    yield contract, item, token, body[max(position - 2, 0) : position]

    def _find_hard_coded_addresses(self) -> typing.Set[str]:
        names = set()
        for contract in self.outline.contracts:
            for variable in contract.state_variables.values():
                if variable.is_address and any(
                    is_address_literal(token) for token in variable.initializer
                ):
                    names.add(variable.name)
        for _, _, token, _ in self.address_assignments():
            names.add(token.text)
        return names

    def bytes32_names(self, contract: Contract, item: Callable) -> typing.Set[str]:
        names = {
            variable.name
            for variable in self.outline.state_variables(contract).values()
            if variable.type_name == "bytes32"
        }
        names.update(param.name for param in item.params if param.type_name == "bytes32")
        body = item.body
        for position, token in enumerate(body[:-1]):
            following = body[position + 1]
            if token.text == "bytes32" and following.kind == TokenKind.IDENTIFIER:
                names.add(following.text)
        return names


Detector = typing.Callable[[ScanContext], typing.List[Evidence]]


def _detect_address_mutation(context: ScanContext) -> typing.List[Evidence]:
    result = []
    for contract, item in context.outline.all_callables():
        if item.is_constructor or not item.is_entry_point:
            continue
        address_variables = {
            name
            for name, variable in context.outline.state_variables(contract).items()
            if variable.is_address and not variable.is_constant and not variable.is_immutable
        }
        local_names = {param.name for param in item.params}
        body = item.body
        for position, token in enumerate(body[:-1]):
            if token.kind != TokenKind.IDENTIFIER or token.text not in address_variables:
                continue
            previous = body[position - 1].text if position else ""
            if previous in ("address", "payable"):
                # local declaration shadowing the state variable
                local_names.add(token.text)
                continue
            if previous == "." or token.text in local_names:
                continue
            if body[position + 1].text == "=":
                result.append((item.file, token.line))
    return result


def _detect_double_ether_transfer(context: ScanContext) -> typing.List[Evidence]:
    result = []
    for stack in context.stacks:
        direct = [site for site in stack.transfers if site.kind == TransferKind.DIRECT]
        if len(direct) >= 2:
            result.extend(site.location for site in direct)
    return result


def _detect_transfer_with_value_call(context: ScanContext) -> typing.List[Evidence]:
    result = []
    for stack in context.stacks:
        direct = [site for site in stack.transfers if site.kind == TransferKind.DIRECT]
        value_calls = [
            site for site in stack.transfers if site.kind == TransferKind.VALUE_CALL
        ]
        if (direct and value_calls) or len(value_calls) >= 2:
            result.extend(site.location for site in direct + value_calls)
    return result


def _detect_transfer_with_token_transfer(context: ScanContext) -> typing.List[Evidence]:
    result = []
    for stack in context.stacks:
        if stack.ether_transfers and stack.token_transfers:
            result.extend(site.location for site in stack.transfers)
    return result


def _detect_payable(context: ScanContext) -> typing.List[Evidence]:
    return [
        (item.file, item.line)
        for _, item in context.outline.all_callables()
        if item.is_payable and item.kind != "modifier"
    ]


def _detect_emit_in_payable(context: ScanContext) -> typing.List[Evidence]:
    result = []
    for stack in context.stacks:
        if stack.entry.is_payable:
            result.extend(
                (member.file, token.line) for member, token in stack.tokens_named("emit")
            )
    return result


def _hard_coded_state_variables(
    context: ScanContext, constant: bool
) -> typing.List[Evidence]:
    return [
        (variable.file, variable.line)
        for contract in context.outline.contracts
        for variable in contract.state_variables.values()
        if variable.is_address
        and variable.is_constant == constant
        and any(is_address_literal(token) for token in variable.initializer)
    ]


def _detect_constant_hard_coded_address(context: ScanContext) -> typing.List[Evidence]:
    return _hard_coded_state_variables(context, constant=True)


def _detect_variable_hard_coded_address(context: ScanContext) -> typing.List[Evidence]:
    result = _hard_coded_state_variables(context, constant=False)
    for contract, item, token, declaration in context.address_assignments():
        variable = context.outline.state_variables(contract).get(token.text)
        is_local_address = any(
            previous.text in ("address", "payable") for previous in declaration
        )
        if is_local_address or (
            variable is not None and variable.is_address and not variable.is_constant
        ):
            result.append((item.file, token.line))
    return result


def _detect_transfer_to_hard_coded_address(context: ScanContext) -> typing.List[Evidence]:
    result = []
    for stack in context.stacks:
        for site in stack.ether_transfers:
            if any(
                is_address_literal(token)
                or (
                    token.kind == TokenKind.IDENTIFIER
                    and token.text in context.hard_coded_addresses
                )
                for token in site.receiver
            ):
                result.append(site.location)
    return result


def _detect_bytes32_literal(context: ScanContext) -> typing.List[Evidence]:
    return [
        (file_name, token.line)
        for file_name, token in context.all_tokens()
        if is_bytes32_literal(token)
    ]


def _transfers_in_branches(context: ScanContext, ether: bool) -> typing.List[Evidence]:
    result = []
    for _, item in context.outline.all_callables():
        arms = branch_arms(item.body)
        if not arms:
            continue
        result.extend(
            site.location
            for site in context.transfers_of(item)
            if site.moves_ether == ether and _in_ranges(site.index, arms)
        )
    return result


def _detect_ether_transfer_in_branch(context: ScanContext) -> typing.List[Evidence]:
    return _transfers_in_branches(context, ether=True)


def _detect_token_transfer_in_branch(context: ScanContext) -> typing.List[Evidence]:
    return _transfers_in_branches(context, ether=False)


def _transfers_with_require(context: ScanContext, ether: bool) -> typing.List[Evidence]:
    result = []
    for stack in context.stacks:
        sites = stack.ether_transfers if ether else stack.token_transfers
        requires = stack.tokens_named("require")
        if sites and requires:
            result.extend(site.location for site in sites)
            result.extend((member.file, token.line) for member, token in requires)
    return result


def _detect_ether_transfer_with_require(context: ScanContext) -> typing.List[Evidence]:
    return _transfers_with_require(context, ether=True)


def _detect_token_transfer_with_require(context: ScanContext) -> typing.List[Evidence]:
    return _transfers_with_require(context, ether=False)


def _detect_bytes32_in_condition(context: ScanContext) -> typing.List[Evidence]:
    result = []
    for contract, item in context.outline.all_callables():
        conditions = branch_conditions(item.body)
        if not conditions:
            continue
        names = context.bytes32_names(contract, item)
        for condition in conditions:
            for token in condition:
                if is_bytes32_literal(token) or (
                    token.kind == TokenKind.IDENTIFIER and token.text in names
                ):
                    result.append((item.file, token.line))
    return result


def _detect_hash_comparison(context: ScanContext) -> typing.List[Evidence]:
    result = []
    for _, item in context.outline.all_callables():
        body = item.body
        for position, token in enumerate(body[:-1]):
            if token.text not in _HASH_FUNCTIONS or body[position + 1].text != "(":
                continue
            close = matching_close(body, position + 1)
            before = body[position - 1].text if position else ""
            after = body[close + 1].text if close + 1 < len(body) else ""
            if before in ("==", "!=") or after in ("==", "!="):
                result.append((item.file, token.line))
    return result


def _detect_string_in_condition(context: ScanContext) -> typing.List[Evidence]:
    return [
        (item.file, token.line)
        for _, item in context.outline.all_callables()
        for condition in branch_conditions(item.body)
        for token in condition
        if token.kind == TokenKind.STRING
    ]


def _detect_string_in_require(context: ScanContext) -> typing.List[Evidence]:
    return [
        (item.file, token.line)
        for _, item in context.outline.all_callables()
        for _, condition in require_conditions(item.body)
        for token in condition
        if token.kind == TokenKind.STRING
    ]


def _transfers_with_low_level_call(
    context: ScanContext, ether: bool
) -> typing.List[Evidence]:
    result = []
    for stack in context.stacks:
        sites = stack.ether_transfers if ether else stack.token_transfers
        for site in sites:
            others = [
                call
                for call in stack.calls
                if call.owner is not site.owner or call.index != site.index
            ]
            if others:
                result.append(site.location)
                result.extend(call.location for call in others)
    return result


def _detect_ether_transfer_with_call(context: ScanContext) -> typing.List[Evidence]:
    return _transfers_with_low_level_call(context, ether=True)


def _detect_token_transfer_with_call(context: ScanContext) -> typing.List[Evidence]:
    return _transfers_with_low_level_call(context, ether=False)


def _detect_non_ascii_literal(context: ScanContext) -> typing.List[Evidence]:
    return [
        (literal.file, literal.line)
        for literal in context.unit.string_literals
        if literal.has_non_ascii
    ]


def _call_status_names(item: Callable) -> typing.Set[str]:
    """Variables assigned from the result of a call or delegatecall"""
    body = item.body
    names = set()
    for position, token in enumerate(body[:-1]):
        if token.text != "." or body[position + 1].text not in _LOW_LEVEL_CALLS:
            continue
        start = statement_start(body, position)
        statement = body[start:position]
        assignment = [
            index for index, candidate in enumerate(statement) if candidate.text == "="
        ]
        if not assignment:
            continue
        target = statement[: assignment[0]]
        names.update(
            candidate.text
            for candidate in target
            if candidate.kind == TokenKind.IDENTIFIER
            and candidate.text not in ("bool", "bytes", "memory", "var")
        )
    return names


def _detect_call_status_in_require(context: ScanContext) -> typing.List[Evidence]:
    result = []
    for stack in context.stacks:
        status_names: typing.Set[str] = set()
        for member in stack.members:
            status_names.update(_call_status_names(member))
        for member in stack.members:
            for token, condition in require_conditions(member.body):
                texts = [candidate.text for candidate in condition]
                if status_names.intersection(texts) or _LOW_LEVEL_CALLS.intersection(
                    texts
                ):
                    result.append((member.file, token.line))
    return result


SIGNATURE_DETECTORS: typing.Dict[Signature, Detector] = {
    Signature.S1: _detect_address_mutation,
    Signature.S2: _detect_double_ether_transfer,
    Signature.S3: _detect_transfer_with_value_call,
    Signature.S4: _detect_transfer_with_token_transfer,
    Signature.S5: _detect_payable,
    Signature.S6: _detect_emit_in_payable,
    Signature.S7: _detect_constant_hard_coded_address,
    Signature.S8: _detect_variable_hard_coded_address,
    Signature.S9: _detect_transfer_to_hard_coded_address,
    Signature.S10: _detect_bytes32_literal,
    Signature.S11: _detect_ether_transfer_in_branch,
    Signature.S12: _detect_token_transfer_in_branch,
    Signature.S13: _detect_ether_transfer_with_require,
    Signature.S14: _detect_token_transfer_with_require,
    Signature.S15: _detect_bytes32_in_condition,
    Signature.S16: _detect_hash_comparison,
    Signature.S17: _detect_string_in_condition,
    Signature.S18: _detect_string_in_require,
    Signature.S19: _detect_ether_transfer_with_call,
    Signature.S20: _detect_token_transfer_with_call,
    Signature.S21: _detect_non_ascii_literal,
    Signature.S22: _detect_call_status_in_require,
}


def detect_signatures(
    unit: SourceUnit, context: typing.Optional[ScanContext] = None
) -> typing.List[SignatureHit]:
    """One hit per fired signature, ordered by (file, line, signature number)"""
    context = context or ScanContext(unit)
    hits = []
    for signature, detector in SIGNATURE_DETECTORS.items():
        locations = sorted(set(detector(context)))
        if locations:
            file_name, line = locations[0]
            hits.append(
                SignatureHit(
                    signature_id=signature,
                    locations=tuple(locations),
                    evidence=context.excerpt(file_name, line),
                )
            )
    return sorted(hits, key=lambda hit: hit.sort_key)
