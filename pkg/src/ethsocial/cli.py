"""Command line entry point

`run()` maps outcomes to exit codes: 0 success, 1 findings (or an exhausted
search), 2 usage or malformed input and 3 transport failures.
"""

import dataclasses
import enum
import json
import sys
import typing
from pathlib import Path

import click
import typer

from . import __version__, apiclient, crypto, homograph, miners
from .conf import DEFAULT_BASE_URLS, CliConfig, Network, NetworkConfig, parse_seed
from .errors import (
    EthSocialError,
    MalformedInputError,
    NotAvailableError,
    NotFoundError,
    TransportError,
)
from .scanner import auditor, corpus, preprocess, report
from .utils import configure_logging

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2
EXIT_TRANSPORT = 3

app = typer.Typer(no_args_is_help=True, add_completion=False)


class OutputFormat(str, enum.Enum):
    TEXT = "text"
    STRUCTURED = "structured"


@app.callback()
def main(
    context: typer.Context,
    config: typing.Optional[Path] = typer.Option(None, help="TOML configuration file"),
    network: typing.Optional[Network] = typer.Option(None, help="Explorer network"),
    base_url: typing.Optional[str] = typer.Option(None, help="Explorer API endpoint"),
    verbose: int = typer.Option(0, "--verbose", "-v", count=True),
    output_format: OutputFormat = typer.Option(OutputFormat.TEXT, "--format"),
):
    """Tools for studying and detecting Ethereum social engineering attacks"""
    cli_config = CliConfig.load(config)
    if network is not None or base_url is not None:
        cli_config.network = _override_network(cli_config.network, network, base_url)
    cli_config.verbosity = max(cli_config.verbosity, verbose)
    configure_logging(cli_config.verbosity)
    context.obj = {
        "config": cli_config,
        "verbose": cli_config.verbosity > 0,
        "format": output_format,
    }


@app.command()
def eip55(context: typer.Context, address: str):
    """Classify the EIP-55 capitalization of an address"""
    validation = crypto.eip55_validate(address)
    if validation.status == crypto.Eip55Status.MALFORMED:
        raise MalformedInputError(f"Not an address: {address!r}")
    lines = [validation.status.value]
    if validation.expected is not None and validation.expected != address:
        lines.append(f"expected {validation.expected}")
    warning = None
    if validation.is_lowercase_hazard:
        warning = (
            "R4: all-lowercase checksum, do not use this account for testing "
            "contracts that check addresses"
        )
        lines.append(f"warning {warning}")
    _emit(
        context,
        "\n".join(lines),
        {
            "address": address,
            "status": validation.status.value,
            "expected": validation.expected,
            "case_insensitive_match": validation.case_insensitive_match,
            "warning": warning,
        },
    )


@app.command()
def derive(context: typer.Context, private_key: str):
    """Print the address controlled by a private key"""
    key = crypto.PrivateKey.from_hex(private_key)
    rendered = crypto.eip55_encode(crypto.derive_address(key))
    _emit(
        context,
        rendered.text,
        {"address": rendered.text, "all_lowercase": rendered.is_all_lowercase},
    )


@app.command()
def selector(
    context: typer.Context,
    signature: str,
    twin: typing.List[str] = typer.Option(
        [], help="POSITION:CHAR, swap a name character for its homograph twin"
    ),
):
    """Print the 4 byte selector of a function signature"""
    normalized = crypto.normalize_signature(signature)
    if twin:
        substitutions = [_parse_twin(raw) for raw in twin]
        result = miners.homograph_twin_selector(
            normalized, substitutions, _load_table(context)
        )
    else:
        result = crypto.compute_selector(normalized)
    _emit(
        context,
        result.hex,
        {"signature": normalized.canonical, "selector": result.hex, "twins": twin},
    )


@app.command()
def predict(
    context: typer.Context,
    deployer: str,
    nonce: int,
    count: int = typer.Option(1, min=1, help="Also predict the following nonces"),
):
    """Predict contract addresses deployed by an account"""
    deployer_address = crypto.Address.from_hex(deployer)
    plan = [
        (current, crypto.predict_contract_address(deployer_address, current))
        for current in range(nonce, nonce + count)
    ]
    _emit(
        context,
        "\n".join(f"{current}\t{crypto.eip55_encode(a).text}" for current, a in plan),
        {
            "deployer": crypto.eip55_encode(deployer_address).text,
            "plan": [
                {"nonce": current, "address": crypto.eip55_encode(a).text}
                for current, a in plan
            ],
        },
    )


@app.command()
def mine_lowercase(
    context: typer.Context,
    max_attempts: int = 100_000,
    seed: typing.Optional[str] = None,
    workers: typing.Optional[int] = None,
):
    """Mine an account whose EIP-55 checksum is all lowercase"""
    config = _get_config(context)
    account = miners.mine_lowercase_account(
        rng_seed=_seed(config, seed),
        max_attempts=max_attempts,
        workers=workers or config.workers,
    )
    _emit(
        context,
        account.to_record(),
        {
            "private_key": account.key.hex,
            "address": crypto.eip55_encode(account.address).text,
            "attempts": account.attempts,
            "elapsed_ms": account.elapsed_ms,
        },
    )


@app.command()
def mine_pair(
    context: typer.Context,
    time_budget: float = 120.0,
    max_nonce: int = miners.DEFAULT_NONCE_LIMIT,
    seed: typing.Optional[str] = None,
    workers: typing.Optional[int] = None,
):
    """Mine a deployer key whose future contract looks like another address"""
    config = _get_config(context)
    pair = miners.mine_similar_pair(
        rng_seed=_seed(config, seed),
        time_budget=time_budget,
        workers=workers or config.workers,
        max_nonce=max_nonce,
    )
    _emit(
        context,
        pair.to_record(),
        {
            "deployer_key": pair.deployer_key.hex,
            "nonce": pair.nonce,
            "real": crypto.eip55_encode(pair.real).text,
            "decoy": crypto.eip55_encode(pair.decoy).text,
            "mutation": pair.mutation.describe(),
            "candidates_tried": pair.candidates_tried,
            "elapsed_ms": pair.elapsed_ms,
        },
    )


@app.command()
def mine_collision(
    context: typer.Context,
    target: str,
    prefix: str = "",
    charset: str = "0123456789",
    arg_types: str = typer.Option("", help="Comma separated argument types"),
    bits: int = 32,
    start_at: str = "",
    exclude: typing.List[str] = typer.Option([], help="Names to skip"),
    time_budget: float = 3600.0,
    max_trials: typing.Optional[int] = None,
    workers: typing.Optional[int] = None,
):
    """Search for a function name whose selector matches TARGET"""
    config = _get_config(context)
    if "(" in target:
        target_selector = crypto.compute_selector(crypto.normalize_signature(target))
    else:
        target_selector = crypto.Selector.from_hex(target)
    spec = miners.CollisionSearchSpec(
        target=target_selector,
        name_prefix=prefix,
        charset=charset,
        arg_types=tuple(item.strip() for item in arg_types.split(",") if item.strip()),
        truncate_bits=bits,
        excluded_names=frozenset(exclude),
        start_at=start_at,
    )
    result = miners.find_selector_collision(
        spec, time_budget, max_trials, workers or config.workers
    )
    _emit(
        context,
        f"{result.signature.canonical}\t{result.selector.hex}",
        {
            "signature": result.signature.canonical,
            "selector": result.selector.hex,
            "target": target_selector.hex,
            "trials": result.trials,
            "elapsed_ms": result.elapsed_ms,
        },
    )


@app.command()
def homograph_scan(
    context: typer.Context,
    path: Path,
    fail_on_findings: bool = False,
):
    """List every non-ASCII character of a file"""
    findings = homograph.scan_text(path.read_bytes(), _load_table(context))
    _emit(
        context,
        "\n".join(
            f"{path}:{finding.line}:{finding.column}\t{finding.codepoint_label}\t"
            f"{finding.kind.value}\t{finding.ascii_partner or '-'}\t{finding.context}"
            for finding in findings
        ),
        {"path": str(path), "findings": [finding.to_json() for finding in findings]},
    )
    if fail_on_findings and findings:
        raise typer.Exit(EXIT_FINDINGS)


@app.command()
def scan(
    context: typer.Context,
    paths: typing.List[Path],
    output_dir: typing.Optional[Path] = None,
    annotations: typing.Optional[Path] = None,
    workers: typing.Optional[int] = None,
    fail_on_match: bool = False,
):
    """Scan contracts for social engineering attack patterns"""
    config = _get_config(context)
    options = corpus.ScanOptions(
        workers=workers or config.workers,
        annotations_path=annotations,
        table=_load_table(context),
    )
    result = corpus.scan_corpus(paths, options)
    target_dir = output_dir or config.output_dir
    report.write_reports(result, target_dir)
    _log(f"Reports written to {str(target_dir)!r}", context=context)
    lines = [
        f"{item.origin}\t{','.join(a.value for a in item.attack_ids)}"
        for item in result.reports
        if item.is_flagged
    ]
    lines.extend(f"skipped {item.origin}: {item.reason}" for item in result.skipped)
    lines.append(report.summary_tsv(result.summary).rstrip("\n"))
    _emit(
        context,
        "\n".join(lines),
        {
            "summary": result.summary.to_json(),
            "flagged": [
                item.origin for item in result.reports if item.is_flagged
            ],
            "skipped": [dataclasses.asdict(item) for item in result.skipped],
        },
    )
    if fail_on_match and result.summary.flagged:
        raise typer.Exit(EXIT_FINDINGS)


@app.command()
def audit(
    context: typer.Context,
    path: Path,
    online: bool = typer.Option(False, help="Check hard-coded accounts on the explorer"),
    fail_on_danger: bool = False,
):
    """Print reviewer advisories for one contract"""
    config = _get_config(context)
    unit = preprocess(path)
    table = _load_table(context)
    if online:
        with apiclient.get_explorer_client(config.network) as client:
            advisories = auditor.auditor_checks(unit, client, table)
    else:
        advisories = auditor.auditor_checks(unit, None, table)
    _emit(
        context,
        "\n".join(
            f"{advisory.code.value}\t{advisory.severity.value}\t"
            f"{_format_location(advisory.location)}\t{advisory.message}"
            for advisory in advisories
        ),
        {
            "origin": unit.origin,
            "advisories": [advisory.to_json() for advisory in advisories],
        },
    )
    if fail_on_danger and any(
        advisory.severity == auditor.Severity.DANGER for advisory in advisories
    ):
        raise typer.Exit(EXIT_FINDINGS)


@app.command()
def fetch(
    context: typer.Context,
    addresses: typing.List[str],
    output_dir: typing.Optional[Path] = None,
):
    """Download verified source bundles from the explorer"""
    config = _get_config(context)
    target_dir = (output_dir or config.output_dir) / "sources"
    target_dir.mkdir(parents=True, exist_ok=True)
    fetched = []
    unavailable = []
    with apiclient.get_explorer_client(config.network) as client:
        for raw_address in addresses:
            address = crypto.Address.from_hex(raw_address)
            try:
                bundle = client.fetch_source(address)
            except NotAvailableError as exc:
                _log(f"{address}: {exc}", context=context)
                unavailable.append(address.prefixed)
                continue
            target = target_dir / f"{bundle.network}_{address.prefixed}.json"
            payload = {"origin": bundle.origin, "result": list(bundle.records)}
            target.write_text(report.dumps(payload), encoding="utf-8")
            fetched.append(str(target))
    _emit(
        context,
        "\n".join(fetched + [f"not verified {item}" for item in unavailable]),
        {"fetched": fetched, "not_verified": unavailable},
    )


@app.command()
def version(context: typer.Context):
    """Print the installed version"""
    _emit(context, __version__, {"version": __version__})


@app.command(name="report")
def report_command(context: typer.Context, report_dir: Path):
    """Summarize a directory of scan reports"""
    summary = report.summarize_report_dir(report_dir)
    _emit(
        context,
        report.summary_tsv(summary).rstrip("\n")
        + f"\nflagged {summary.flagged}/{summary.total} "
        f"({summary.filter_rate:.2%})",
        {"summary": summary.to_json()},
    )


def _override_network(
    current: NetworkConfig,
    network: typing.Optional[Network],
    base_url: typing.Optional[str],
) -> NetworkConfig:
    name = network or current.name
    if base_url is None:
        base_url = (
            DEFAULT_BASE_URLS.get(name) if name != current.name else current.base_url
        )
    if base_url is None:
        raise MalformedInputError(f"Network {name.value!r} needs --base-url")
    return dataclasses.replace(current, name=name, base_url=base_url)


def _parse_twin(raw: str) -> typing.Tuple[int, str]:
    position, separator, char = raw.partition(":")
    if not separator or not position.isdigit():
        raise MalformedInputError(f"Expected POSITION:CHAR, got {raw!r}")
    if char.upper().startswith("U+"):
        char = chr(int(char[2:], 16))
    return int(position), char


def _get_config(context: typer.Context) -> CliConfig:
    return context.obj["config"]


def _seed(config: CliConfig, raw: typing.Optional[str]) -> bytes:
    return parse_seed(raw) if raw is not None else config.seed


def _load_table(context: typer.Context) -> homograph.ConfusablesTable:
    path = _get_config(context).confusables_path
    if path is not None:
        return homograph.load_confusables(path)
    return homograph.default_table()


def _format_location(location: typing.Optional[typing.Tuple[str, int]]) -> str:
    return f"{location[0]}:{location[1]}" if location else "-"


def _emit(context: typer.Context, text: str, payload: typing.Dict) -> None:
    if context.obj["format"] == OutputFormat.STRUCTURED:
        typer.echo(
            report.dumps(dict(payload, schema_version=report.SCHEMA_VERSION)).rstrip()
        )
    elif text:
        typer.echo(text)


def _log(msg, *args, context: typing.Optional[typer.Context] = None, **kwargs):
    if context is not None and context.obj.get("verbose"):
        typer.echo(msg, err=True, *args, **kwargs)


def run(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    """Run the command line and return its exit code instead of exiting"""
    arguments = list(sys.argv[1:] if argv is None else argv)
    try:
        result = app(args=arguments, standalone_mode=False, prog_name="ethsocial")
    except click.exceptions.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except NotFoundError as exc:
        typer.echo(f"error: {exc} {json.dumps(exc.stats, sort_keys=True)}", err=True)
        return EXIT_FINDINGS
    except TransportError as exc:
        typer.echo(f"error: {exc}", err=True)
        return EXIT_TRANSPORT
    except (EthSocialError, ValueError, OSError) as exc:
        typer.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    return result if isinstance(result, int) else EXIT_OK


def entry_point() -> None:
    sys.exit(run())
