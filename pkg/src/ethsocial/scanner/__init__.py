from .auditor import Advisory, AdvisoryCode, AdvisoryKind, auditor_checks
from .cnf import CNF_RULES, AttackId, AttackMatch, evaluate_cnf
from .corpus import ScanOptions, scan_corpus, scan_unit
from .models import AttackReport, CorpusScan, CorpusSummary, TriageLabel
from .preprocess import SourceUnit, preprocess
from .report import load_report, summarize_report_dir, write_reports
from .signatures import SIGNATURE_DETECTORS, Signature, SignatureHit, detect_signatures
