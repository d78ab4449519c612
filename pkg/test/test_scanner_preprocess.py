import json

import pytest

from ethsocial.apiclient.models import SourceBundle
from ethsocial.crypto import Address
from ethsocial.errors import BundleParseError, UnsupportedSourceError
import importlib

pre = importlib.import_module("ethsocial.scanner.preprocess")

TOKEN_SOURCE = 'pragma solidity ^0.6.12;\ncontract A {\n    string s = "x";\n}\n'


def _standard_json_record(sources, language="Solidity"):
    standard_input = {"language": language, "sources": sources}
    return {
        "SourceCode": "{" + json.dumps(standard_input) + "}",
        "ContractName": "A",
        "CompilerVersion": "v0.6.12+commit.27d51765",
    }


def test_tokenize_strips_comments_and_keeps_lines():
    text = 'string s = "a // b"; // tail\nuint x; /* one\ntwo */ uint y;'
    stripped, tokens = pre.tokenize(text)
    assert stripped == 'string s = "a // b"; \nuint x; \n uint y;'
    string_token = [token for token in tokens if token.kind == pre.TokenKind.STRING][0]
    assert string_token.value == "a // b"
    assert (string_token.line, string_token.column) == (1, 12)
    last = [token for token in tokens if token.text == "y"][0]
    assert (last.line, last.column) == (3, 13)


def test_tokenize_ignores_quotes_inside_comments():
    stripped, tokens = pre.tokenize('// don\'t "stop"\nuint a;')
    assert stripped == "\nuint a;"
    assert [token.text for token in tokens] == ["uint", "a", ";"]


@pytest.mark.parametrize(
    "source, expected_value, expected_prefix",
    [
        pytest.param(r'"plain"', "plain", "", id="plain"),
        pytest.param(r"'single'", "single", "", id="single-quotes"),
        pytest.param(r'"tab\there"', "tab\there", "", id="escape"),
        pytest.param(r'"\x41\u0430"', "A\u0430", "", id="hex-and-unicode-escapes"),
        pytest.param(r'"\u200b"', "\u200b", "", id="zero-width-escape"),
        pytest.param('unicode"BТ"', "BТ", "unicode", id="unicode-prefix"),
        pytest.param('hex"00ff"', "00ff", "hex", id="hex-literal"),
        pytest.param('"unterminated\nx', "unterminated", "", id="unterminated"),
    ],
)
def test_string_literals(source, expected_value, expected_prefix):
    unit = pre.preprocess(f"contract A {{ string s = {source}; }}")
    literal = unit.string_literals[0]
    assert literal.value == expected_value
    assert literal.prefix == expected_prefix
    assert literal.has_non_ascii == (not expected_value.isascii())


def test_number_tokens():
    _, tokens = pre.tokenize(
        "address a = 0x7E5F4552091A69125d5DfCb7b8C2659029395Bdf; uint b = 1_000e3;"
    )
    kinds = {token.text: token.kind for token in tokens}
    assert kinds["0x7E5F4552091A69125d5DfCb7b8C2659029395Bdf"] == pre.TokenKind.HEX_NUMBER
    assert kinds["1_000e3"] == pre.TokenKind.NUMBER


def test_preprocess_plain_text():
    unit = pre.preprocess(TOKEN_SOURCE, origin="local-test")
    assert unit.origin == "local-test"
    assert unit.network == "local"
    assert [source_file.name for source_file in unit.files] == [pre.DEFAULT_FILE_NAME]
    assert [(literal.value, literal.line) for literal in unit.string_literals] == [("x", 3)]


def test_preprocess_path(contracts_dir):
    path = contracts_dir / "base_token.sol"
    unit = pre.preprocess(path)
    assert unit.origin == str(path)
    assert unit.files[0].name == "base_token.sol"
    assert "Minimal token" not in unit.files[0].text
    assert len(unit.files[0].text.splitlines()) == len(
        path.read_text(encoding="utf-8").splitlines()
    )


def test_preprocess_standard_json_bundle():
    record = _standard_json_record(
        {
            "contracts/b.sol": {"content": "contract B {}"},
            "contracts/a.sol": {"content": "contract A { string s = \"а\"; }"},
        }
    )
    unit = pre.preprocess([record], origin="mainnet:0x01")
    assert [source_file.name for source_file in unit.files] == [
        "contracts/a.sol",
        "contracts/b.sol",
    ]
    assert unit.network == "mainnet"
    assert unit.string_literals[0].file == "contracts/a.sol"


def test_preprocess_sources_map_without_double_braces():
    record = {
        "SourceCode": json.dumps({"x.sol": {"content": "contract X {}"}}),
        "ContractName": "X",
    }
    unit = pre.preprocess(record)
    assert [source_file.name for source_file in unit.files] == ["x.sol"]


def test_preprocess_source_bundle():
    bundle = SourceBundle(
        address=Address.from_hex("0x" + "11" * 20),
        network="ropsten",
        records=({"SourceCode": TOKEN_SOURCE, "ContractName": "A"},),
    )
    unit = pre.preprocess(bundle)
    assert unit.origin == "ropsten:0x" + "11" * 20
    assert unit.network == "ropsten"
    assert unit.files[0].name == "A.sol"


def test_preprocess_skips_non_solidity_files():
    record = _standard_json_record(
        {
            "a.sol": {"content": "contract A {}"},
            "b.vy": {"content": "owner: public(address)"},
        }
    )
    unit = pre.preprocess(record)
    assert [source_file.name for source_file in unit.files] == ["a.sol"]


def test_preprocess_rejects_vyper(fixtures_dir):
    with pytest.raises(UnsupportedSourceError) as exc_info:
        pre.preprocess(fixtures_dir / "unsupported" / "vyper_vault.json")
    assert "mainnet:0x00000000000000000000000000000000000000aa" in str(exc_info.value)


@pytest.mark.parametrize(
    "raw_input",
    [
        pytest.param({"unexpected": True}, id="unknown-object"),
        pytest.param([1, 2], id="non-object-records"),
        pytest.param({"SourceCode": "{{not json}}"}, id="broken-standard-json"),
        pytest.param({"sources": {"a.sol": {"nope": 1}}}, id="no-content"),
        pytest.param({"sources": ["x"]}, id="sources-list"),
        pytest.param({"SourceCode": '{"sources": 5}'}, id="explorer-sources-number"),
        pytest.param(
            {"SourceCode": '{{"sources": ["a.sol"]}}'}, id="standard-json-sources-list"
        ),
        pytest.param(42, id="number"),
    ],
)
def test_preprocess_rejects_malformed_bundles(raw_input):
    with pytest.raises(BundleParseError):
        pre.preprocess(raw_input)


def test_read_input_rejects_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    with pytest.raises(BundleParseError):
        pre.preprocess(path)


def test_dedup_key_ignores_comments_and_whitespace():
    first = pre.preprocess("contract A { uint x; }")
    second = pre.preprocess("// header\ncontract   A {\n  /* note */ uint x;\n}\n")
    third = pre.preprocess("contract A { uint y; }")
    assert first.dedup_key == second.dedup_key
    assert first.dedup_key != third.dedup_key
    assert len(first.dedup_key) == 32
    assert first.dedup_hex == first.dedup_key.hex()
