"""Scan many contracts, drop duplicates and tally candidates per attack"""

import dataclasses
import multiprocessing
import typing
from pathlib import Path

from ..errors import EthSocialError, MalformedInputError
from ..homograph import ConfusablesTable, scan_text
from ..utils import log
from .cnf import evaluate_cnf
from .models import AttackReport, CorpusScan, CorpusSummary, SkippedInput, TriageLabel
from .preprocess import SourceUnit, preprocess
from .signatures import detect_signatures

SOURCE_SUFFIXES = (".sol", ".json")

ScanInput = typing.Union[Path, str, SourceUnit, typing.Any]


@dataclasses.dataclass(frozen=True)
class ScanOptions:
    workers: int = 1
    annotations_path: typing.Optional[Path] = None
    table: typing.Optional[ConfusablesTable] = None

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")


def scan_unit(
    unit: SourceUnit, table: typing.Optional[ConfusablesTable] = None
) -> AttackReport:
    table = table or ConfusablesTable.builtin()
    hits = detect_signatures(unit)
    findings = []
    for source_file in unit.files:
        findings.extend(
            (source_file.name, finding) for finding in scan_text(source_file.text, table)
        )
    return AttackReport(
        origin=unit.origin,
        dedup_key=unit.dedup_hex,
        network=unit.network,
        hits=tuple(hits),
        matches=tuple(evaluate_cnf(hits)),
        homograph_findings=tuple(findings),
    )


def expand_inputs(inputs: typing.Iterable[ScanInput]) -> typing.List[ScanInput]:
    """Replace directories by the sorted source files below them"""
    result: typing.List[ScanInput] = []
    for item in inputs:
        if isinstance(item, str):
            item = Path(item)
        if isinstance(item, Path) and item.is_dir():
            result.extend(
                sorted(
                    path
                    for path in item.rglob("*")
                    if path.is_file() and path.suffix.lower() in SOURCE_SUFFIXES
                )
            )
        else:
            result.append(item)
    return result


def _describe(item: ScanInput) -> str:
    if isinstance(item, SourceUnit):
        result = item.origin
    elif isinstance(item, Path):
        result = str(item)
    else:
        result = getattr(item, "origin", repr(item)[:60])
    return result


def _scan_input(
    args: typing.Tuple[ScanInput, typing.Optional[ConfusablesTable]]
) -> typing.Union[AttackReport, SkippedInput]:
    item, table = args
    try:
        unit = item if isinstance(item, SourceUnit) else preprocess(item)
        result: typing.Union[AttackReport, SkippedInput] = scan_unit(unit, table)
    except (EthSocialError, OSError, UnicodeDecodeError) as exc:
        reason = f"{type(exc).__name__}: {exc}"
        log(f"Skipping {_describe(item)}: {reason}")
        result = SkippedInput(origin=_describe(item), reason=reason)
    return result


def load_annotations(path: Path) -> typing.Dict[str, TriageLabel]:
    """Read `origin<TAB>label` lines, skipping blanks, comments and unknown labels"""
    result = {}
    for line_number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        origin, separator, raw_label = line.rstrip("\n").partition("\t")
        if not separator:
            raise MalformedInputError(
                f"{path}:{line_number}: expected origin<TAB>label, got {line!r}"
            )
        try:
            result[origin.strip()] = TriageLabel(raw_label.strip())
        except ValueError:
            log(f"{path}:{line_number}: unknown triage label {raw_label!r}", debug=False)
    return result


def deduplicate(
    reports: typing.Iterable[AttackReport],
) -> typing.List[AttackReport]:
    """Keep the first report of every dedup key, ordered by key"""
    unique: typing.Dict[str, AttackReport] = {}
    for report in reports:
        kept = unique.setdefault(report.dedup_key, report)
        if kept is not report:
            log(f"{report.origin} duplicates {kept.origin}")
    return [unique[key] for key in sorted(unique)]


def scan_corpus(
    inputs: typing.Iterable[ScanInput], options: typing.Optional[ScanOptions] = None
) -> CorpusScan:
    options = options or ScanOptions()
    table = options.table or ConfusablesTable.builtin()
    items = [(item, table) for item in expand_inputs(inputs)]
    log(f"Scanning {len(items)} inputs with {options.workers} worker(s)")
    if options.workers > 1 and len(items) > 1:
        with multiprocessing.Pool(options.workers) as pool:
            outcomes = pool.map(_scan_input, items)
    else:
        outcomes = [_scan_input(item) for item in items]
    skipped = [outcome for outcome in outcomes if isinstance(outcome, SkippedInput)]
    reports = deduplicate(
        outcome for outcome in outcomes if isinstance(outcome, AttackReport)
    )
    if options.annotations_path is not None:
        labels = load_annotations(options.annotations_path)
        reports = [report.with_label(labels.get(report.origin)) for report in reports]
    summary = CorpusSummary.from_reports(reports, skipped=len(skipped))
    log(
        f"Scanned {summary.total} unique units, flagged {summary.flagged}, "
        f"skipped {len(skipped)}"
    )
    return CorpusScan(reports=reports, summary=summary, skipped=skipped)
