"""Attack rules as conjunctions of signature clauses"""

import dataclasses
import enum
import typing

from .signatures import Signature, SignatureHit

S = Signature


class AttackId(enum.Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"
    A5 = "A5"
    A6 = "A6"

    @property
    def description(self) -> str:
        return ATTACK_DESCRIPTIONS[self]


ATTACK_DESCRIPTIONS = {
    AttackId.A1: "Receiver address swapped at runtime",
    AttackId.A2: "Similar-looking hard-coded receiver address",
    AttackId.A3: "Checksum-dependent validation of lowercase addresses",
    AttackId.A4: "Homograph in a compared string",
    AttackId.A5: "Homograph in an inter-contract call name",
    AttackId.A6: "Selector collision with a homograph function name",
}

Clause = typing.Tuple[Signature, ...]

_HANDLING = (S.S11, S.S12, S.S13, S.S14)

CNF_RULES: typing.Dict[AttackId, typing.Tuple[Clause, ...]] = {
    AttackId.A1: ((S.S1,), (S.S2, S.S3, S.S4), (S.S5,)),
    AttackId.A2: ((S.S2, S.S3, S.S4), (S.S5,), (S.S6,), (S.S7, S.S8), (S.S9,)),
    AttackId.A3: ((S.S5,), (S.S10,), _HANDLING, (S.S15,)),
    AttackId.A4: ((S.S5,), _HANDLING, (S.S16,), (S.S17, S.S18)),
    AttackId.A5: ((S.S5,), _HANDLING, (S.S19, S.S20), (S.S21,)),
    AttackId.A6: ((S.S5,), _HANDLING, (S.S19, S.S20), (S.S21,), (S.S22,)),
}


@dataclasses.dataclass(frozen=True)
class AttackMatch:
    attack_id: AttackId
    # per clause, the fired signatures that satisfy it
    satisfied_clauses: typing.Tuple[typing.Tuple[Signature, ...], ...]

    @property
    def witnesses(self) -> typing.Tuple[Signature, ...]:
        return tuple(clause[0] for clause in self.satisfied_clauses)

    def to_json(self) -> typing.Dict:
        return {
            "attack_id": self.attack_id.value,
            "satisfied_clauses": [
                [signature.value for signature in clause]
                for clause in self.satisfied_clauses
            ],
        }

    @classmethod
    def from_json(cls, raw: typing.Dict) -> "AttackMatch":
        return cls(
            attack_id=AttackId(raw["attack_id"]),
            satisfied_clauses=tuple(
                tuple(Signature(item) for item in clause)
                for clause in raw["satisfied_clauses"]
            ),
        )


def _fired(
    hits: typing.Iterable[typing.Union[SignatureHit, Signature]]
) -> typing.Set[Signature]:
    return {hit.signature_id if isinstance(hit, SignatureHit) else hit for hit in hits}


def evaluate_cnf(
    hits: typing.Iterable[typing.Union[SignatureHit, Signature]]
) -> typing.List[AttackMatch]:
    """Every attack whose rule the fired signatures satisfy, in A1..A6 order"""
    fired = _fired(hits)
    matches = []
    for attack_id, clauses in CNF_RULES.items():
        satisfied = tuple(
            tuple(signature for signature in clause if signature in fired)
            for clause in clauses
        )
        if all(satisfied):
            matches.append(AttackMatch(attack_id=attack_id, satisfied_clauses=satisfied))
    return matches
