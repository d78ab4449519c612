import collections
import json
from pathlib import Path

from flask import Flask, jsonify, request
import flask.logging

explorer_flask_app = Flask("mock_explorer")
explorer_flask_app.logger.removeHandler(flask.logging.default_handler)

ROOT = Path(__file__).parent / "_mock_explorer_data"

VERIFIED_ADDRESS = "0x1111111111111111111111111111111111111111"
NOT_VERIFIED_ADDRESS = "0x2222222222222222222222222222222222222222"
ACTIVE_ADDRESS = "0x3333333333333333333333333333333333333333"
UNUSED_ADDRESS = "0x4444444444444444444444444444444444444444"
RATE_LIMITED_ADDRESS = "0x5555555555555555555555555555555555555555"
FAILING_ADDRESS = "0x6666666666666666666666666666666666666666"
MALFORMED_TX_ADDRESS = "0x7777777777777777777777777777777777777777"

_hits = collections.Counter()


def _load(name: str):
    with (ROOT / name).open(encoding="utf-8") as fh:
        return json.load(fh)


def _envelope(result, status="1", message="OK"):
    return jsonify({"status": status, "message": message, "result": result})


def _get_source_code(address: str):
    if address == VERIFIED_ADDRESS:
        standard_input = _load("standard_input_two_files.json")
        record = _load("getsourcecode_record.json")
        # explorers wrap standard JSON input in a second pair of braces
        record["SourceCode"] = "{" + json.dumps(standard_input) + "}"
        result = _envelope([record])
    elif address == RATE_LIMITED_ADDRESS:
        if _hits[("getsourcecode", address)] == 1:
            result = jsonify(_load("rate_limited.json"))
        else:
            result = jsonify(_load("getsourcecode_single_file.json"))
    elif address == FAILING_ADDRESS:
        result = ("upstream exploded", 500)
    else:
        result = jsonify(_load("getsourcecode_not_verified.json"))
    return result


def _tx_page(name: str):
    """Reply with the transactions at or after `startblock`, `offset` at most"""
    envelope = _load(name)
    start_block = int(request.args.get("startblock", 0))
    offset = int(request.args.get("offset", 10000))
    transactions = [
        tx for tx in envelope["result"] if int(tx["blockNumber"]) >= start_block
    ]
    envelope["result"] = transactions[:offset]
    return jsonify(envelope)


def _get_tx_list(address: str):
    if address == ACTIVE_ADDRESS:
        result = _tx_page("txlist_active.json")
    elif address == MALFORMED_TX_ADDRESS:
        result = jsonify(_load("txlist_malformed.json"))
    elif address == FAILING_ADDRESS:
        result = ("upstream exploded", 500)
    else:
        result = jsonify(_load("txlist_empty.json"))
    return result


@explorer_flask_app.route("/api")
def _mock_api():
    module = request.args.get("module")
    action = request.args.get("action")
    address = (request.args.get("address") or "").lower()
    _hits[(action, address)] += 1
    if request.args.get("apikey") != "test-key":
        result = _envelope("Invalid API Key", status="0", message="NOTOK")
    elif module == "contract" and action == "getsourcecode":
        result = _get_source_code(address)
    elif module == "account" and action == "txlist":
        result = _get_tx_list(address)
    else:
        result = _envelope("Unknown action", status="0", message="NOTOK")
    return result


@explorer_flask_app.route("/_hits")
def _mock_hits():
    return jsonify({f"{action}:{address}": count for (action, address), count in _hits.items()})


@explorer_flask_app.route("/_reset", methods=["POST"])
def _mock_reset():
    _hits.clear()
    return jsonify({"reset": True})
