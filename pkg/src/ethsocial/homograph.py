"""Confusable codepoints and invisible characters in source text"""

import dataclasses
import enum
import itertools
import typing
import unicodedata
from pathlib import Path

from .errors import ConfusablesParseError, SourceEncodingError
from .utils import excerpt, log

DEFAULT_CONFUSABLES_PATH = Path(__file__).parent / "data" / "confusables.tsv"

ZERO_WIDTH_CODEPOINTS = frozenset(
    (
        0x200B,  # zero width space
        0x200C,  # zero width non-joiner
        0x200D,  # zero width joiner
        0x2060,  # word joiner
        0xFEFF,  # zero width no-break space
    )
)

# Latin letters with Cyrillic look-alikes, as used by the attack fixtures
BUILTIN_CONFUSABLES: typing.FrozenSet[typing.Tuple[str, str, str]] = frozenset(
    (
        ("a", "а", "Cyrillic"),
        ("c", "с", "Cyrillic"),
        ("e", "е", "Cyrillic"),
        ("o", "о", "Cyrillic"),
        ("p", "р", "Cyrillic"),
        ("x", "х", "Cyrillic"),
        ("y", "у", "Cyrillic"),
        ("A", "А", "Cyrillic"),
        ("B", "В", "Cyrillic"),
        ("C", "С", "Cyrillic"),
        ("E", "Е", "Cyrillic"),
        ("H", "Н", "Cyrillic"),
        ("K", "К", "Cyrillic"),
        ("M", "М", "Cyrillic"),
        ("O", "О", "Cyrillic"),
        ("P", "Р", "Cyrillic"),
        ("T", "Т", "Cyrillic"),
        ("X", "Х", "Cyrillic"),
    )
)


class FindingKind(enum.Enum):
    CONFUSABLE = "confusable"
    ZERO_WIDTH = "zero_width"
    OTHER_NONASCII = "other_nonascii"


@dataclasses.dataclass(frozen=True)
class ConfusablesTable:
    entries: typing.FrozenSet[typing.Tuple[str, str, str]]
    _twins: typing.Dict[str, typing.Tuple[str, ...]] = dataclasses.field(
        init=False, repr=False, compare=False
    )
    _partners: typing.Dict[str, str] = dataclasses.field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        twins: typing.Dict[str, typing.List[str]] = {}
        partners: typing.Dict[str, str] = {}
        for ascii_char, twin, script in sorted(self.entries):
            if len(ascii_char) != 1 or not 0x20 <= ord(ascii_char) <= 0x7E:
                raise ValueError(f"Not a printable ASCII character: {ascii_char!r}")
            if len(twin) != 1 or twin.isascii():
                raise ValueError(f"Twin must be one non-ASCII codepoint: {twin!r}")
            known_partner = partners.get(twin)
            if known_partner is not None and known_partner != ascii_char:
                log(
                    f"Ignoring {twin!r} ({script}) as twin of {ascii_char!r}, it is "
                    f"already a twin of {known_partner!r}",
                    debug=False,
                )
                continue
            partners[twin] = ascii_char
            twins.setdefault(ascii_char, []).append(twin)
        object.__setattr__(
            self, "_twins", {k: tuple(sorted(set(v))) for k, v in twins.items()}
        )
        object.__setattr__(self, "_partners", partners)

    @classmethod
    def builtin(cls) -> "ConfusablesTable":
        return cls(entries=BUILTIN_CONFUSABLES)

    def twins(self, ascii_char: str) -> typing.Tuple[str, ...]:
        return self._twins.get(ascii_char, ())

    def partner(self, char: str) -> typing.Optional[str]:
        return self._partners.get(char)

    def merged(
        self, extra: typing.Iterable[typing.Tuple[str, str, str]]
    ) -> "ConfusablesTable":
        return ConfusablesTable(entries=frozenset(self.entries) | frozenset(extra))

    def __len__(self):
        return len(self.entries)


@dataclasses.dataclass(frozen=True)
class HomographFinding:
    line: int
    column: int
    index: int
    byte_offset: int
    codepoint: int
    kind: FindingKind
    context: str
    ascii_partner: typing.Optional[str] = None

    @property
    def char(self) -> str:
        return chr(self.codepoint)

    @property
    def codepoint_label(self) -> str:
        return f"U+{self.codepoint:04X}"

    def to_json(self) -> typing.Dict:
        return {
            "line": self.line,
            "column": self.column,
            "index": self.index,
            "byte_offset": self.byte_offset,
            "codepoint": self.codepoint_label,
            "kind": self.kind.value,
            "ascii_partner": self.ascii_partner,
            "context": self.context,
        }

    @classmethod
    def from_json(cls, raw: typing.Dict) -> "HomographFinding":
        return cls(
            line=int(raw["line"]),
            column=int(raw["column"]),
            index=int(raw.get("index", 0)),
            byte_offset=int(raw["byte_offset"]),
            codepoint=int(raw["codepoint"][2:], 16),
            kind=FindingKind(raw["kind"]),
            context=raw.get("context", ""),
            ascii_partner=raw.get("ascii_partner"),
        )


def _parse_codepoint(raw: str) -> str:
    if not raw.upper().startswith("U+"):
        raise ValueError(f"codepoint must look like U+XXXX, got {raw!r}")
    value = int(raw[2:], 16)
    return chr(value)


def load_confusables(
    path: typing.Union[str, Path],
    base: typing.Optional[ConfusablesTable] = None,
) -> ConfusablesTable:
    """Load a tab separated confusables file and merge it with the built-in set

    Rows are `ascii<TAB>U+XXXX<TAB>script`. Lines starting with `#` that are not
    themselves a row for the `#` character are comments.
    """

    base = base or ConfusablesTable.builtin()
    entries = []
    with Path(path).open(encoding="utf-8") as fh:
        for line_number, raw_line in enumerate(fh, start=1):
            line = raw_line.rstrip("\r\n")
            if not line.strip():
                continue
            if line.startswith("#") and not line.startswith("#\t"):
                continue
            columns = line.split("\t")
            if len(columns) != 3:
                raise ConfusablesParseError(
                    f"expected 3 tab separated columns, got {len(columns)}: {line!r}",
                    line_number,
                )
            ascii_char, raw_codepoint, script = columns
            if len(ascii_char) != 1 or not 0x20 <= ord(ascii_char) <= 0x7E:
                raise ConfusablesParseError(
                    f"first column must be one printable ASCII character: {line!r}",
                    line_number,
                )
            try:
                twin = _parse_codepoint(raw_codepoint.strip())
            except ValueError as exc:
                raise ConfusablesParseError(str(exc), line_number) from exc
            if twin.isascii():
                raise ConfusablesParseError(
                    f"twin {raw_codepoint!r} is an ASCII codepoint", line_number
                )
            if not script.strip():
                raise ConfusablesParseError("script name is empty", line_number)
            entries.append((ascii_char, twin, script.strip()))
    return base.merged(entries)


def load_unicode_confusables(
    path: typing.Union[str, Path],
    base: typing.Optional[ConfusablesTable] = None,
) -> ConfusablesTable:
    """Import the Unicode consortium `confusables.txt` file

    Only single codepoint sources whose skeleton is one printable ASCII
    character are kept.
    """

    base = base or ConfusablesTable.builtin()
    entries = []
    with Path(path).open(encoding="utf-8-sig") as fh:
        for line_number, raw_line in enumerate(fh, start=1):
            line = raw_line.partition("#")[0].strip()
            if not line:
                continue
            try:
                source, target = [part.strip() for part in line.split(";")[:2]]
                source_chars = "".join(chr(int(c, 16)) for c in source.split())
                target_chars = "".join(chr(int(c, 16)) for c in target.split())
            except ValueError as exc:
                raise ConfusablesParseError(str(exc), line_number) from exc
            if (
                len(source_chars) == 1
                and not source_chars.isascii()
                and len(target_chars) == 1
                and 0x20 <= ord(target_chars) <= 0x7E
            ):
                script = unicodedata.name(source_chars, "UNKNOWN").split()[0].title()
                entries.append((target_chars, source_chars, script))
    return base.merged(entries)


def default_table() -> ConfusablesTable:
    if DEFAULT_CONFUSABLES_PATH.is_file():
        result = load_confusables(DEFAULT_CONFUSABLES_PATH)
    else:
        result = ConfusablesTable.builtin()
    return result


def scan_text(
    text: typing.Union[str, bytes], table: typing.Optional[ConfusablesTable] = None
) -> typing.List[HomographFinding]:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SourceEncodingError(f"invalid UTF-8: {exc.reason}", exc.start)
    table = table or ConfusablesTable.builtin()
    findings = []
    line = 1
    column = 1
    byte_offset = 0
    for index, char in enumerate(text):
        if not char.isascii():
            codepoint = ord(char)
            partner = table.partner(char)
            if codepoint in ZERO_WIDTH_CODEPOINTS:
                kind = FindingKind.ZERO_WIDTH
            elif partner is not None:
                kind = FindingKind.CONFUSABLE
            else:
                kind = FindingKind.OTHER_NONASCII
            findings.append(
                HomographFinding(
                    line=line,
                    column=column,
                    index=index,
                    byte_offset=byte_offset,
                    codepoint=codepoint,
                    kind=kind,
                    context=excerpt(text, index, index + 1),
                    ascii_partner=partner,
                )
            )
        byte_offset += len(char.encode("utf-8"))
        if char == "\n":
            line += 1
            column = 1
        else:
            column += 1
    return findings


def twin_variants(
    text: str, table: ConfusablesTable, max_variants: int = 64
) -> typing.List[str]:
    """Enumerate homograph variants of `text`, fewest substitutions first"""
    positions = [index for index, char in enumerate(text) if table.twins(char)]
    result: typing.List[str] = []
    for size in range(1, len(positions) + 1):
        for combination in itertools.combinations(positions, size):
            choices = [table.twins(text[index]) for index in combination]
            for replacement in itertools.product(*choices):
                if len(result) >= max_variants:
                    return result
                chars = list(text)
                for index, twin in zip(combination, replacement):
                    chars[index] = twin
                result.append("".join(chars))
    return result


def ascii_fold(
    text: str, table: ConfusablesTable, drop_invisible: bool = False
) -> str:
    chars = []
    for char in text:
        if drop_invisible and ord(char) in ZERO_WIDTH_CODEPOINTS:
            continue
        chars.append(table.partner(char) or char)
    return "".join(chars)
