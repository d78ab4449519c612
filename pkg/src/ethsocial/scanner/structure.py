"""Lightweight contract outline built from the token stream

This is not a Solidity parser. It recovers just enough structure (contracts,
their bases, state variables, callables and their bodies) for the signature
detectors to reason about scopes and call stacks.
"""

import dataclasses
import typing

from .preprocess import SourceFile, SourceUnit, Token, TokenKind

VISIBILITIES = frozenset(("public", "external", "internal", "private"))
_HEADER_KEYWORDS = frozenset(
    ("view", "pure", "constant", "virtual", "override", "nonpayable", "payable")
) | VISIBILITIES
_DECLARATION_KEYWORDS = frozenset(
    ("public", "private", "internal", "constant", "immutable", "override", "payable")
)
_CALLABLE_KEYWORDS = frozenset(
    ("function", "constructor", "modifier", "fallback", "receive")
)
_SKIPPED_STATEMENTS = frozenset(("event", "error", "using", "pragma", "import"))
_OPENERS = {"(": ")", "[": "]", "{": "}"}
_CLOSERS = {closer: opener for opener, closer in _OPENERS.items()}

TokenSlice = typing.Tuple[Token, ...]


def matching_close(tokens: typing.Sequence[Token], index: int) -> int:
    """Index of the bracket closing the one at `index`, or the last index"""
    opener = tokens[index].text
    closer = _OPENERS[opener]
    depth = 0
    for position in range(index, len(tokens)):
        text = tokens[position].text
        if tokens[position].kind != TokenKind.OPERATOR:
            continue
        if text == opener:
            depth += 1
        elif text == closer:
            depth -= 1
            if depth == 0:
                return position
    return len(tokens) - 1


def matching_open(tokens: typing.Sequence[Token], index: int) -> int:
    closer = tokens[index].text
    opener = _CLOSERS[closer]
    depth = 0
    for position in range(index, -1, -1):
        if tokens[position].kind != TokenKind.OPERATOR:
            continue
        text = tokens[position].text
        if text == closer:
            depth += 1
        elif text == opener:
            depth -= 1
            if depth == 0:
                return position
    return 0


def split_top_level(
    tokens: typing.Sequence[Token], separator: str = ","
) -> typing.List[TokenSlice]:
    parts: typing.List[TokenSlice] = []
    current: typing.List[Token] = []
    depth = 0
    for token in tokens:
        if token.kind == TokenKind.OPERATOR:
            if token.text in _OPENERS:
                depth += 1
            elif token.text in _CLOSERS:
                depth -= 1
            elif token.text == separator and depth == 0:
                parts.append(tuple(current))
                current = []
                continue
        current.append(token)
    if current or parts:
        parts.append(tuple(current))
    return parts


def statement_end(tokens: typing.Sequence[Token], index: int) -> int:
    """Index of the `;` ending the statement starting at `index`"""
    position = index
    while position < len(tokens):
        text = tokens[position].text
        if tokens[position].kind == TokenKind.OPERATOR:
            if text in _OPENERS:
                position = matching_close(tokens, position)
            elif text == ";":
                return position
        position += 1
    return len(tokens) - 1


def statement_start(tokens: typing.Sequence[Token], index: int) -> int:
    position = index - 1
    while position >= 0:
        token = tokens[position]
        if token.kind == TokenKind.OPERATOR:
            if token.text in (")", "]"):
                position = matching_open(tokens, position)
            elif token.text in (";", "{", "}"):
                return position + 1
        position -= 1
    return 0


@dataclasses.dataclass(frozen=True)
class Parameter:
    type_name: str
    name: str


@dataclasses.dataclass(frozen=True)
class StateVariable:
    name: str
    type_name: str
    is_constant: bool
    is_immutable: bool
    initializer: TokenSlice
    file: str
    line: int

    @property
    def is_address(self) -> bool:
        return self.type_name == "address"


@dataclasses.dataclass(frozen=True)
class Callable:
    name: str
    kind: str
    contract: str
    file: str
    line: int
    params: typing.Tuple[Parameter, ...]
    visibility: str
    is_payable: bool
    modifiers: typing.Tuple[str, ...]
    body: TokenSlice = dataclasses.field(repr=False)

    @property
    def is_constructor(self) -> bool:
        return self.kind == "constructor"

    @property
    def signature_text(self) -> str:
        return f"{self.name}({','.join(param.type_name for param in self.params)})"

    @property
    def is_entry_point(self) -> bool:
        return self.kind in ("function", "fallback", "receive") and self.visibility in (
            "public",
            "external",
        )


@dataclasses.dataclass
class Contract:
    name: str
    kind: str
    file: str
    line: int
    bases: typing.Tuple[str, ...]
    state_variables: typing.Dict[str, StateVariable] = dataclasses.field(
        default_factory=dict
    )
    callables: typing.List[Callable] = dataclasses.field(default_factory=list)

    @property
    def functions(self) -> typing.List[Callable]:
        return [item for item in self.callables if item.kind != "modifier"]

    @property
    def modifiers(self) -> typing.Dict[str, Callable]:
        return {item.name: item for item in self.callables if item.kind == "modifier"}


_LOCATIONS = frozenset(("memory", "calldata", "storage", "indexed"))


def _join_type(tokens: TokenSlice) -> str:
    text = ""
    for token in tokens:
        if token.kind == TokenKind.IDENTIFIER and text and text[-1] not in "[(":
            text += " "
        text += token.text
    return text


def _parse_parameters(tokens: TokenSlice) -> typing.Tuple[Parameter, ...]:
    result = []
    for part in split_top_level(tokens):
        part = tuple(token for token in part if token.text not in _LOCATIONS)
        if not part:
            continue
        name = ""
        last = part[-1]
        if (
            len(part) > 1
            and last.kind == TokenKind.IDENTIFIER
            and last.text != "payable"
        ):
            name = last.text
            part = part[:-1]
        result.append(Parameter(type_name=_join_type(part), name=name))
    return tuple(result)


def _parse_header(
    header: TokenSlice,
) -> typing.Tuple[typing.Optional[str], bool, typing.Tuple[str, ...]]:
    visibility = None
    is_payable = False
    modifiers = []
    position = 0
    while position < len(header):
        token = header[position]
        following = header[position + 1] if position + 1 < len(header) else None
        has_arguments = following is not None and following.text == "("
        if token.kind == TokenKind.IDENTIFIER:
            if token.text in VISIBILITIES:
                visibility = token.text
            elif token.text == "payable":
                is_payable = True
            elif token.text not in _HEADER_KEYWORDS and token.text != "returns":
                modifiers.append(token.text)
            if has_arguments:
                position = matching_close(header, position + 1)
        position += 1
    return visibility, is_payable, tuple(modifiers)


def _parse_callable(
    tokens: TokenSlice, index: int, contract: Contract
) -> typing.Tuple[typing.Optional[Callable], int]:
    keyword = tokens[index]
    position = index + 1
    kind = keyword.text
    name = kind
    if kind in ("function", "modifier"):
        if position < len(tokens) and tokens[position].kind == TokenKind.IDENTIFIER:
            name = tokens[position].text
            position += 1
        elif kind == "function":
            # unnamed function is the pre-0.6 fallback
            kind = name = "fallback"
    params: TokenSlice = ()
    if position < len(tokens) and tokens[position].text == "(":
        close = matching_close(tokens, position)
        params = tokens[position + 1 : close]
        position = close + 1
    header_start = position
    while position < len(tokens) and tokens[position].text not in ("{", ";"):
        if tokens[position].text in _OPENERS:
            position = matching_close(tokens, position)
        position += 1
    header = tokens[header_start:position]
    body: TokenSlice = ()
    end = position
    if position < len(tokens) and tokens[position].text == "{":
        end = matching_close(tokens, position)
        body = tokens[position + 1 : end]
    if kind == "function" and name == contract.name:
        kind = "constructor"
    visibility, is_payable, modifiers = _parse_header(header)
    default_visibility = "internal" if kind == "modifier" else "public"
    item = Callable(
        name=name,
        kind=kind,
        contract=contract.name,
        file=contract.file,
        line=keyword.line,
        params=_parse_parameters(params),
        visibility=visibility or default_visibility,
        is_payable=is_payable,
        modifiers=modifiers,
        body=body,
    )
    return item, end + 1


def _parse_state_variable(
    statement: TokenSlice, file_name: str
) -> typing.Optional[StateVariable]:
    parts = split_top_level(statement, "=")
    declaration = parts[0] if parts else ()
    initializer = tuple(token for part in parts[1:] for token in part)
    names = [
        token
        for token in declaration
        if token.kind == TokenKind.IDENTIFIER and token.text not in _DECLARATION_KEYWORDS
    ]
    if len(names) < 2 and not (declaration and declaration[0].text == "mapping"):
        return None
    texts = {token.text for token in declaration}
    return StateVariable(
        name=names[-1].text,
        type_name=declaration[0].text,
        is_constant="constant" in texts,
        is_immutable="immutable" in texts,
        initializer=initializer,
        file=file_name,
        line=declaration[0].line,
    )


def _parse_contract_body(body: TokenSlice, contract: Contract) -> None:
    position = 0
    while position < len(body):
        token = body[position]
        if token.text in _CALLABLE_KEYWORDS and token.kind == TokenKind.IDENTIFIER:
            item, position = _parse_callable(body, position, contract)
            if item is not None:
                contract.callables.append(item)
        elif token.text in ("struct", "enum"):
            while position < len(body) and body[position].text != "{":
                position += 1
            position = matching_close(body, position) + 1 if position < len(body) else position
        elif token.text in _SKIPPED_STATEMENTS or token.text == ";":
            position = statement_end(body, position) + 1
        else:
            end = statement_end(body, position)
            variable = _parse_state_variable(body[position:end], contract.file)
            if variable is not None:
                contract.state_variables[variable.name] = variable
            position = end + 1


def parse_contracts(source_file: SourceFile) -> typing.List[Contract]:
    tokens = source_file.tokens
    contracts = []
    position = 0
    while position < len(tokens):
        token = tokens[position]
        if token.kind == TokenKind.IDENTIFIER and token.text in (
            "contract",
            "library",
            "interface",
        ):
            name_token = tokens[position + 1] if position + 1 < len(tokens) else None
            if name_token is None or name_token.kind != TokenKind.IDENTIFIER:
                position += 1
                continue
            cursor = position + 2
            bases = []
            while cursor < len(tokens) and tokens[cursor].text != "{":
                current = tokens[cursor]
                if current.text == "(":
                    cursor = matching_close(tokens, cursor)
                elif current.kind == TokenKind.IDENTIFIER and current.text != "is":
                    bases.append(current.text)
                cursor += 1
            if cursor >= len(tokens):
                break
            end = matching_close(tokens, cursor)
            contract = Contract(
                name=name_token.text,
                kind=token.text,
                file=source_file.name,
                line=token.line,
                bases=tuple(bases),
            )
            _parse_contract_body(tokens[cursor + 1 : end], contract)
            contracts.append(contract)
            position = end + 1
        else:
            position += 1
    return contracts


class UnitOutline:
    """Every contract of a unit, with base-contract lookups"""

    def __init__(self, unit: SourceUnit):
        self.unit = unit
        self.contracts: typing.List[Contract] = []
        for source_file in unit.files:
            self.contracts.extend(parse_contracts(source_file))
        self._by_name = {}
        for contract in self.contracts:
            self._by_name.setdefault(contract.name, contract)

    def lineage(self, contract: Contract) -> typing.List[Contract]:
        """The contract followed by all its known bases, each once"""
        result = []
        pending = [contract]
        while pending:
            current = pending.pop(0)
            if current in result:
                continue
            result.append(current)
            pending.extend(
                self._by_name[base] for base in current.bases if base in self._by_name
            )
        return result

    def state_variables(self, contract: Contract) -> typing.Dict[str, StateVariable]:
        result: typing.Dict[str, StateVariable] = {}
        for member in reversed(self.lineage(contract)):
            result.update(member.state_variables)
        return result

    def callables_named(self, contract: Contract, name: str) -> typing.List[Callable]:
        return [
            item
            for member in self.lineage(contract)
            for item in member.callables
            if item.name == name
        ]

    def call_stack(self, contract: Contract, item: Callable) -> typing.List[Callable]:
        """The callable, its modifiers and functions it calls directly by name"""
        result = [item]
        for modifier in item.modifiers:
            result.extend(
                found
                for found in self.callables_named(contract, modifier)
                if found.kind == "modifier"
            )
        body = item.body
        for position, token in enumerate(body[:-1]):
            previous = body[position - 1].text if position else ""
            if (
                token.kind == TokenKind.IDENTIFIER
                and body[position + 1].text == "("
                and previous not in (".", "function", "emit", "new")
            ):
                for found in self.callables_named(contract, token.text):
                    if found.kind != "modifier" and found not in result:
                        result.append(found)
        return result

    def all_callables(self) -> typing.Iterator[typing.Tuple[Contract, Callable]]:
        for contract in self.contracts:
            for item in contract.callables:
                yield contract, item
