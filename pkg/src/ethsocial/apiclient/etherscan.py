"""API client for Etherscan and explorers speaking the same envelope"""

import json
import typing

from .. import network
from ..crypto import Address
from ..errors import NotAvailableError, TransportError
from ..utils import log
from . import models
from .base import BaseExplorerClient

NOT_VERIFIED_MARKER = "Contract source code not verified"
NO_TRANSACTIONS_MARKER = "No transactions found"
_RATE_LIMIT_PREFIXES = ("Max calls per sec rate", "Max rate limit reached")
TX_PAGE_SIZE = 10000


class EtherscanClient(BaseExplorerClient):
    tx_page_size: int = TX_PAGE_SIZE

    def build_query(
        self, module: str, action: str, address: Address, **extra: str
    ) -> typing.Dict[str, str]:
        query = {"module": module, "action": action, "address": address.prefixed}
        query.update(extra)
        if self.config.api_key:
            query["apikey"] = self.config.api_key
        return query

    def get_source_request(self, address: Address) -> network.RequestToPerform:
        return network.RequestToPerform(
            url=self.config.base_url,
            params=self.build_query("contract", "getsourcecode", address),
        )

    def get_tx_list_request(
        self, address: Address, start_block: int = 0
    ) -> network.RequestToPerform:
        return network.RequestToPerform(
            url=self.config.base_url,
            params=self.build_query(
                "account",
                "txlist",
                address,
                startblock=str(start_block),
                endblock="99999999",
                page="1",
                offset=str(self.tx_page_size),
                sort="asc",
            ),
        )

    def fetch_tx_list_body(self, address: Address) -> bytes:
        """Collect every txlist page of `address` into a single envelope

        Explorers return at most `tx_page_size` transactions per reply and
        refuse `page * offset` beyond that, so a full page is followed by a
        request starting at the block of its last transaction. Transactions of
        that block come back twice and are dropped by hash. A page holding
        nothing new means one block fills a whole page; the walk then moves
        past that block and its overflow is not counted.
        """

        collected: typing.Dict[str, typing.Dict] = {}
        start_block = 0
        while True:
            request = self.get_tx_list_request(address, start_block)
            page = _retrieve_result(self.perform(request).response_body, "txlist")
            if not isinstance(page, list):
                raise TransportError(f"Unexpected txlist result for {address}")
            records = [models.TxRecord.from_json(raw) for raw in page]
            fresh = 0
            for record, raw in zip(records, page):
                if record.hash not in collected:
                    collected[record.hash] = raw
                    fresh += 1
            if len(page) < self.tx_page_size:
                break
            if fresh == 0:
                log(
                    f"Block {start_block} may hold more than {self.tx_page_size} "
                    f"transactions of {address}, the count may be short",
                    debug=False,
                )
                start_block = records[-1].block_number + 1
            else:
                start_block = records[-1].block_number
            log(f"Fetching txlist of {address} from block {start_block}")
        envelope = {"status": "1", "message": "OK", "result": list(collected.values())}
        return json.dumps(envelope).encode("utf-8")

    def is_rate_limited(self, reply: network.ParsedNetworkReply) -> bool:
        envelope = network.deserialize_json_response(reply.response_body)
        if not isinstance(envelope, dict) or envelope.get("message") != "NOTOK":
            return False
        result = envelope.get("result")
        return isinstance(result, str) and result.startswith(_RATE_LIMIT_PREFIXES)

    def parse_source_reply(self, address: Address, body: bytes) -> models.SourceBundle:
        result = _retrieve_result(body, "getsourcecode")
        if not isinstance(result, list) or not result:
            raise TransportError(f"Unexpected getsourcecode result for {address}")
        records = tuple(record for record in result if isinstance(record, dict))
        if not any(record.get("SourceCode") for record in records):
            raise NotAvailableError(f"{address} has no verified source code")
        return models.SourceBundle(
            address=address, network=self.config.name.value, records=records
        )

    def parse_outgoing_tx_count(self, address: Address, body: bytes) -> int:
        result = _retrieve_result(body, "txlist")
        if not isinstance(result, list):
            raise TransportError(f"Unexpected txlist result for {address}")
        transactions = [models.TxRecord.from_json(raw) for raw in result]
        return sum(1 for tx in transactions if tx.is_outgoing_from(address))


def _retrieve_result(body: bytes, action: str) -> typing.Any:
    envelope = network.deserialize_json_response(body)
    if not isinstance(envelope, dict) or "result" not in envelope:
        raise TransportError(f"Malformed explorer envelope for {action!r}")
    result = envelope["result"]
    status = str(envelope.get("status", "1"))
    if status != "1":
        message = envelope.get("message", "")
        if result == NOT_VERIFIED_MARKER:
            raise NotAvailableError(NOT_VERIFIED_MARKER)
        if message == NO_TRANSACTIONS_MARKER and action == "txlist":
            return []
        log(f"Explorer returned an error for {action!r}: {envelope}", debug=False)
        raise TransportError(f"Explorer error for {action!r}: {message} {result}")
    return result
