"""Turn raw Solidity sources and explorer bundles into `SourceUnit`s

Comments are erased by a literal-aware tokenizer, so a `//` inside a string is
kept and a quote inside a comment is ignored. Newlines inside comments are kept
so line numbers of the stripped text match the original.
"""

import dataclasses
import enum
import json
import re
import typing
from pathlib import Path

from ..apiclient.models import SourceBundle
from ..crypto import keccak256
from ..errors import BundleParseError, UnsupportedSourceError
from ..utils import log

DEFAULT_FILE_NAME = "contract.sol"

_TOKEN_PATTERN = re.compile(
    r"""
    (?P<newline>\n)
    |(?P<space>[^\S\n]+)
    |(?P<line_comment>//[^\n]*)
    |(?P<block_comment>/\*.*?(?:\*/|\Z))
    |(?P<string>(?:unicode|hex)?
        (?:"(?:[^"\\\n]|\\.)*(?:"|(?=\n)|\Z)
        |'(?:[^'\\\n]|\\.)*(?:'|(?=\n)|\Z)))
    |(?P<hex_number>0[xX][0-9a-fA-F_]+)
    |(?P<number>\d[\d_]*(?:\.\d+)?(?:[eE]-?\d+)?)
    |(?P<identifier>[A-Za-z_$][A-Za-z0-9_$]*)
    |(?P<operator>==|!=|<=|>=|&&|\|\||=>|\+=|-=|\*=|/=|%=|\+\+|--|\*\*|<<|>>|.)
    """,
    re.DOTALL | re.VERBOSE,
)
_PRAGMA_PATTERN = re.compile(r"\bpragma\s+solidity\b")
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"', "0": "\0"}


class TokenKind(enum.Enum):
    IDENTIFIER = "identifier"
    NUMBER = "number"
    HEX_NUMBER = "hex_number"
    STRING = "string"
    OPERATOR = "operator"


@dataclasses.dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    column: int
    # decoded contents, only for string literals
    value: typing.Optional[str] = None


@dataclasses.dataclass(frozen=True)
class StringLiteral:
    value: str
    file: str
    line: int
    column: int
    prefix: str = ""

    @property
    def has_non_ascii(self) -> bool:
        return not self.value.isascii()

    @property
    def utf8(self) -> bytes:
        return self.value.encode("utf-8")


@dataclasses.dataclass(frozen=True)
class SourceFile:
    name: str
    text: str
    tokens: typing.Tuple[Token, ...] = dataclasses.field(repr=False, compare=False)


@dataclasses.dataclass(frozen=True)
class SourceUnit:
    origin: str
    files: typing.Tuple[SourceFile, ...]
    string_literals: typing.Tuple[StringLiteral, ...]
    dedup_key: bytes

    @property
    def dedup_hex(self) -> str:
        return self.dedup_key.hex()

    @property
    def network(self) -> str:
        prefix, separator, _ = self.origin.partition(":")
        return prefix if separator and prefix.isalpha() else "local"


def _decode_string_body(body: str) -> str:
    chars = []
    index = 0
    while index < len(body):
        char = body[index]
        if char != "\\" or index + 1 >= len(body):
            chars.append(char)
            index += 1
            continue
        marker = body[index + 1]
        if marker == "x" and re.fullmatch(r"[0-9a-fA-F]{2}", body[index + 2 : index + 4]):
            chars.append(chr(int(body[index + 2 : index + 4], 16)))
            index += 4
        elif marker == "u" and re.fullmatch(r"[0-9a-fA-F]{4}", body[index + 2 : index + 6]):
            chars.append(chr(int(body[index + 2 : index + 6], 16)))
            index += 6
        elif marker == "\n":
            index += 2
        else:
            chars.append(_ESCAPES.get(marker, marker))
            index += 2
    return "".join(chars)


def _string_parts(text: str) -> typing.Tuple[str, str]:
    prefix = ""
    for candidate in ("unicode", "hex"):
        if text.startswith(candidate):
            prefix = candidate
            break
    quoted = text[len(prefix) :]
    quote = quoted[0]
    body = quoted[1:-1] if len(quoted) > 1 and quoted.endswith(quote) else quoted[1:]
    return prefix, body


def tokenize(text: str) -> typing.Tuple[str, typing.List[Token]]:
    """Return the comment-stripped text and its tokens"""
    stripped = []
    tokens = []
    line = 1
    column = 1
    position = 0
    while position < len(text):
        match = _TOKEN_PATTERN.match(text, position)
        kind = match.lastgroup
        chunk = match.group()
        if kind == "block_comment":
            stripped.append("\n" * chunk.count("\n"))
        elif kind != "line_comment":
            stripped.append(chunk)
        if kind == "string":
            prefix, body = _string_parts(chunk)
            value = body if prefix == "hex" else _decode_string_body(body)
            tokens.append(Token(TokenKind.STRING, chunk, line, column, value))
        elif kind in ("hex_number", "number", "identifier", "operator"):
            tokens.append(Token(TokenKind(kind), chunk, line, column))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            column = len(chunk) - chunk.rfind("\n")
        else:
            column += len(chunk)
        position = match.end()
    return "".join(stripped), tokens


def strip_comments(text: str) -> str:
    return tokenize(text)[0]


def _is_solidity(name: str, text: str, declared_language: typing.Optional[str]) -> bool:
    if declared_language is not None:
        result = declared_language.lower() == "solidity" and not name.endswith(
            (".vy", ".json", ".yul")
        )
    else:
        result = name.endswith(".sol") or _PRAGMA_PATTERN.search(text) is not None
    return result


def _declared_language(record: typing.Dict) -> typing.Optional[str]:
    compiler = str(record.get("CompilerVersion", "")).lower()
    if compiler.startswith("vyper"):
        result = "Vyper"
    else:
        result = record.get("Language") or record.get("language")
    return result


def _files_from_sources_map(
    sources: typing.Any,
) -> typing.List[typing.Tuple[str, str]]:
    if not isinstance(sources, dict):
        raise BundleParseError(
            f"Sources must be an object of file entries, got {type(sources).__name__}"
        )
    result = []
    for name, entry in sources.items():
        if isinstance(entry, dict) and isinstance(entry.get("content"), str):
            result.append((name, entry["content"]))
        elif isinstance(entry, str):
            result.append((name, entry))
        else:
            raise BundleParseError(f"Source entry {name!r} has no content")
    return result


def _files_from_explorer_record(
    record: typing.Dict,
) -> typing.Tuple[typing.List[typing.Tuple[str, str]], typing.Optional[str]]:
    source_code = record.get("SourceCode")
    if not isinstance(source_code, str):
        raise BundleParseError("Explorer record has no SourceCode string")
    language = _declared_language(record)
    stripped = source_code.strip()
    if stripped.startswith("{{") and stripped.endswith("}}"):
        try:
            standard_input = json.loads(stripped[1:-1])
        except json.JSONDecodeError as exc:
            raise BundleParseError(f"Invalid standard JSON input: {exc}") from exc
        if not isinstance(standard_input, dict):
            raise BundleParseError("Standard JSON input must be an object")
        files = _files_from_sources_map(standard_input.get("sources", {}))
        language = standard_input.get("language", language)
    elif stripped.startswith("{"):
        try:
            sources = json.loads(stripped)
        except json.JSONDecodeError:
            sources = None
        if isinstance(sources, dict):
            if "sources" in sources:
                language = sources.get("language", language)
                sources = sources["sources"]
            files = _files_from_sources_map(sources)
        else:
            files = [(f"{record.get('ContractName') or 'contract'}.sol", source_code)]
    else:
        files = [(f"{record.get('ContractName') or 'contract'}.sol", source_code)]
    return files, language


def _extract_files(
    raw_input: typing.Any, name: typing.Optional[str]
) -> typing.List[typing.Tuple[str, str, typing.Optional[str]]]:
    """Return (name, text, declared language) triples"""
    if isinstance(raw_input, SourceBundle):
        raw_input = list(raw_input.records)
    if isinstance(raw_input, str):
        return [(name or DEFAULT_FILE_NAME, raw_input, None)]
    if isinstance(raw_input, dict):
        if "SourceCode" in raw_input:
            files, language = _files_from_explorer_record(raw_input)
        elif "sources" in raw_input:
            files = _files_from_sources_map(raw_input["sources"])
            language = raw_input.get("language")
        elif "result" in raw_input and isinstance(raw_input["result"], list):
            return _extract_files(raw_input["result"], name)
        else:
            raise BundleParseError("Unrecognized bundle: expected SourceCode or sources")
        return [(file_name, text, language) for file_name, text in files]
    if isinstance(raw_input, list):
        result = []
        for record in raw_input:
            if not isinstance(record, dict):
                raise BundleParseError("Bundle records must be objects")
            result.extend(_extract_files(record, name))
        return result
    raise BundleParseError(f"Unsupported input type {type(raw_input).__name__!r}")


def read_input(path: Path) -> typing.Any:
    """Load a path as source text or, for `.json` files, as a bundle"""
    raw_bytes = path.read_bytes()
    text = raw_bytes.decode("utf-8")
    if path.suffix.lower() == ".json":
        try:
            result = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BundleParseError(f"{str(path)!r} is not valid JSON: {exc}") from exc
    else:
        result = text
    return result


def compute_dedup_key(files: typing.Iterable[SourceFile]) -> bytes:
    normalized = " ".join(" ".join(source_file.text.split()) for source_file in files)
    return keccak256(normalized.encode("utf-8"))


def preprocess(
    raw_input: typing.Any,
    origin: typing.Optional[str] = None,
    name: typing.Optional[str] = None,
) -> SourceUnit:
    if isinstance(raw_input, Path):
        name = name or raw_input.name
        path_origin = str(raw_input)
        raw_input = read_input(raw_input)
        embedded = raw_input.get("origin") if isinstance(raw_input, dict) else None
        origin = origin or (embedded if isinstance(embedded, str) else path_origin)
    if isinstance(raw_input, SourceBundle):
        origin = origin or raw_input.origin
    candidates = _extract_files(raw_input, name)
    solidity_files = []
    for file_name, text, language in candidates:
        if name is not None and name.endswith(".sol") and language is None:
            language = "Solidity"
        if _is_solidity(file_name, text, language):
            solidity_files.append((file_name, text))
        else:
            log(f"Skipping non-Solidity file {file_name!r} of {origin!r}")
    if not solidity_files:
        raise UnsupportedSourceError(f"No Solidity content in {origin!r}")
    files = []
    literals = []
    for file_name, text in sorted(solidity_files):
        stripped, tokens = tokenize(text)
        files.append(SourceFile(name=file_name, text=stripped, tokens=tuple(tokens)))
        for token in tokens:
            if token.kind == TokenKind.STRING:
                prefix, _ = _string_parts(token.text)
                literals.append(
                    StringLiteral(
                        value=token.value or "",
                        file=file_name,
                        line=token.line,
                        column=token.column,
                        prefix=prefix,
                    )
                )
    return SourceUnit(
        origin=origin or files[0].name,
        files=tuple(files),
        string_literals=tuple(literals),
        dedup_key=compute_dedup_key(files),
    )
