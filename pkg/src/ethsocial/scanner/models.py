import dataclasses
import enum
import typing

from ..homograph import HomographFinding
from .cnf import AttackId, AttackMatch
from .signatures import SignatureHit


class TriageLabel(enum.Enum):
    NON_EXPLOITABLE = "non_exploitable"
    SYNTACTICALLY_MATCHING = "syntactically_matching"
    SEMANTICALLY_EXPLOITABLE = "semantically_exploitable"


@dataclasses.dataclass(frozen=True)
class AttackReport:
    origin: str
    dedup_key: str
    network: str
    hits: typing.Tuple[SignatureHit, ...]
    matches: typing.Tuple[AttackMatch, ...]
    homograph_findings: typing.Tuple[typing.Tuple[str, HomographFinding], ...]
    # only ever set from human annotations
    triage_label: typing.Optional[TriageLabel] = None

    @property
    def is_flagged(self) -> bool:
        return bool(self.matches)

    @property
    def attack_ids(self) -> typing.Tuple[AttackId, ...]:
        return tuple(match.attack_id for match in self.matches)

    def with_label(self, label: typing.Optional[TriageLabel]) -> "AttackReport":
        return dataclasses.replace(self, triage_label=label)

    def to_json(self) -> typing.Dict:
        return {
            "origin": self.origin,
            "dedup_key": self.dedup_key,
            "network": self.network,
            "hits": [hit.to_json() for hit in self.hits],
            "matches": [match.to_json() for match in self.matches],
            "homograph_findings": [
                dict(finding.to_json(), file=file_name)
                for file_name, finding in self.homograph_findings
            ],
            "triage_label": self.triage_label.value if self.triage_label else None,
        }

    @classmethod
    def from_json(cls, raw: typing.Dict) -> "AttackReport":
        label = raw.get("triage_label")
        return cls(
            origin=raw["origin"],
            dedup_key=raw["dedup_key"],
            network=raw.get("network", "local"),
            hits=tuple(SignatureHit.from_json(item) for item in raw["hits"]),
            matches=tuple(AttackMatch.from_json(item) for item in raw["matches"]),
            homograph_findings=tuple(
                (item["file"], HomographFinding.from_json(item))
                for item in raw.get("homograph_findings", [])
            ),
            triage_label=TriageLabel(label) if label else None,
        )


@dataclasses.dataclass
class SummaryRow:
    candidates: int = 0
    labeled_non_exploitable: int = 0
    labeled_syntactic: int = 0
    labeled_semantic: int = 0

    def count(self, label: typing.Optional[TriageLabel]) -> None:
        self.candidates += 1
        if label == TriageLabel.NON_EXPLOITABLE:
            self.labeled_non_exploitable += 1
        elif label == TriageLabel.SYNTACTICALLY_MATCHING:
            self.labeled_syntactic += 1
        elif label == TriageLabel.SEMANTICALLY_EXPLOITABLE:
            self.labeled_semantic += 1


@dataclasses.dataclass
class NetworkTally:
    total: int = 0
    flagged: int = 0

    @property
    def filter_rate(self) -> float:
        return self.flagged / self.total if self.total else 0.0

    def to_json(self) -> typing.Dict:
        return {
            "total": self.total,
            "flagged": self.flagged,
            "filter_rate": round(self.filter_rate, 6),
        }


@dataclasses.dataclass
class CorpusSummary:
    rows: typing.Dict[AttackId, SummaryRow]
    networks: typing.Dict[str, NetworkTally]
    total: int = 0
    flagged: int = 0
    skipped: int = 0

    @property
    def filter_rate(self) -> float:
        """Share of unique units flagged for human review"""
        return self.flagged / self.total if self.total else 0.0

    @classmethod
    def from_reports(
        cls, reports: typing.Iterable[AttackReport], skipped: int = 0
    ) -> "CorpusSummary":
        summary = cls(
            rows={attack_id: SummaryRow() for attack_id in AttackId},
            networks={},
            skipped=skipped,
        )
        for report in reports:
            summary.total += 1
            tally = summary.networks.setdefault(report.network, NetworkTally())
            tally.total += 1
            if report.is_flagged:
                summary.flagged += 1
                tally.flagged += 1
            for attack_id in report.attack_ids:
                summary.rows[attack_id].count(report.triage_label)
        return summary

    def to_json(self) -> typing.Dict:
        return {
            "total": self.total,
            "flagged": self.flagged,
            "skipped": self.skipped,
            "filter_rate": round(self.filter_rate, 6),
            "attacks": {
                attack_id.value: dataclasses.asdict(row)
                for attack_id, row in self.rows.items()
            },
            "networks": {
                name: tally.to_json() for name, tally in sorted(self.networks.items())
            },
        }


@dataclasses.dataclass(frozen=True)
class SkippedInput:
    origin: str
    reason: str


@dataclasses.dataclass
class CorpusScan:
    reports: typing.List[AttackReport]
    summary: CorpusSummary
    skipped: typing.List[SkippedInput]
