import json
import typing
from pathlib import Path

from packaging import version as packaging_version
from packaging.specifiers import SpecifierSet

from ..errors import MalformedInputError
from ..utils import log
from .cnf import AttackId
from .models import AttackReport, CorpusScan, CorpusSummary

SCHEMA_VERSION = "1.0"
SUPPORTED_SCHEMA_VERSIONS = SpecifierSet(">=1.0, <2.0")
SUMMARY_TSV_NAME = "summary.tsv"
SUMMARY_JSON_NAME = "summary.json"
SUMMARY_COLUMNS = (
    "attack_id",
    "candidates",
    "labeled_non_exploitable",
    "labeled_syntactic",
    "labeled_semantic",
)


def dumps(payload: typing.Dict) -> str:
    """Deterministic JSON: sorted keys, ASCII only, trailing newline"""
    return json.dumps(payload, sort_keys=True, ensure_ascii=True, indent=2) + "\n"


def is_supported_schema(
    raw_version: str, supported_versions: SpecifierSet = SUPPORTED_SCHEMA_VERSIONS
) -> bool:
    try:
        parsed = packaging_version.parse(raw_version)
    except packaging_version.InvalidVersion:
        return False
    return parsed in supported_versions


def report_payload(report: AttackReport) -> typing.Dict:
    return dict(report.to_json(), schema_version=SCHEMA_VERSION)


def report_file_name(report: AttackReport) -> str:
    return f"{report.dedup_key}.json"


def summary_tsv(summary: CorpusSummary) -> str:
    lines = ["\t".join(SUMMARY_COLUMNS)]
    for attack_id in AttackId:
        row = summary.rows[attack_id]
        lines.append(
            "\t".join(
                str(value)
                for value in (
                    attack_id.value,
                    row.candidates,
                    row.labeled_non_exploitable,
                    row.labeled_syntactic,
                    row.labeled_semantic,
                )
            )
        )
    return "\n".join(lines) + "\n"


def write_summary(summary: CorpusSummary, output_dir: Path) -> None:
    output_dir.mkdir(parents=True, exist_ok=True)
    (output_dir / SUMMARY_TSV_NAME).write_text(summary_tsv(summary), encoding="utf-8")
    (output_dir / SUMMARY_JSON_NAME).write_text(
        dumps(dict(summary.to_json(), schema_version=SCHEMA_VERSION)),
        encoding="utf-8",
    )


def write_reports(scan: CorpusScan, output_dir: Path) -> typing.List[Path]:
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for report in scan.reports:
        target = output_dir / report_file_name(report)
        target.write_text(dumps(report_payload(report)), encoding="utf-8")
        written.append(target)
    write_summary(scan.summary, output_dir)
    log(f"Wrote {len(written)} reports to {output_dir}")
    return written


def load_report(path: Path) -> AttackReport:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path} is not a JSON report: {exc}") from exc
    schema = str(raw.get("schema_version", ""))
    if not is_supported_schema(schema):
        raise MalformedInputError(
            f"{path} has unsupported schema version {schema!r}, "
            f"expected {SUPPORTED_SCHEMA_VERSIONS}"
        )
    try:
        return AttackReport.from_json(raw)
    except (KeyError, ValueError, TypeError) as exc:
        raise MalformedInputError(f"{path} is not a valid report: {exc}") from exc


def load_report_dir(report_dir: Path) -> typing.List[AttackReport]:
    reports = []
    for path in sorted(report_dir.glob("*.json")):
        if path.name == SUMMARY_JSON_NAME:
            continue
        reports.append(load_report(path))
    return sorted(reports, key=lambda report: report.dedup_key)


def summarize_report_dir(report_dir: Path) -> CorpusSummary:
    return CorpusSummary.from_reports(load_report_dir(report_dir))
