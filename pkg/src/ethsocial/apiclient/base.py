import typing

import httpx

from .. import network
from ..conf import NetworkConfig
from ..crypto import Address
from ..utils import log
from .cache import ExplorerCache
from .models import CacheKind, SourceBundle

T = typing.TypeVar("T")


class BaseExplorerClient:
    """Shared plumbing for explorer clients: caching, rate limiting, retries

    Subclasses describe the remote API by implementing the request builders and
    reply parsers. Parsers must raise for replies that are not worth caching.
    One instance may be shared by several threads.
    """

    config: NetworkConfig
    cache: ExplorerCache
    http_client: httpx.Client
    rate_limiter: network.RateLimiter

    def __init__(
        self,
        config: NetworkConfig,
        cache: typing.Optional[ExplorerCache] = None,
        http_client: typing.Optional[httpx.Client] = None,
        rate_limiter: typing.Optional[network.RateLimiter] = None,
    ):
        self.config = config
        self.cache = cache or ExplorerCache(config.cache_dir, config.name.value)
        self.http_client = http_client or httpx.Client(timeout=config.timeout)
        self.rate_limiter = rate_limiter or network.get_rate_limiter(
            config.base_url, config.rate_limit
        )

    @classmethod
    def from_network_config(cls, config: NetworkConfig):
        return cls(config=config)

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()

    def close(self) -> None:
        self.http_client.close()

    def get_source_request(self, address: Address) -> network.RequestToPerform:
        raise NotImplementedError

    def get_tx_list_request(
        self, address: Address, start_block: int = 0
    ) -> network.RequestToPerform:
        raise NotImplementedError

    def fetch_source_body(self, address: Address) -> bytes:
        return self.perform(self.get_source_request(address)).response_body

    def fetch_tx_list_body(self, address: Address) -> bytes:
        return self.perform(self.get_tx_list_request(address)).response_body

    def parse_source_reply(self, address: Address, body: bytes) -> SourceBundle:
        raise NotImplementedError

    def parse_outgoing_tx_count(self, address: Address, body: bytes) -> int:
        raise NotImplementedError

    def is_rate_limited(self, reply: network.ParsedNetworkReply) -> bool:
        return False

    def fetch_source(self, address: Address) -> SourceBundle:
        return self._cached_fetch(
            address,
            CacheKind.SOURCE,
            self.config.source_ttl,
            self.fetch_source_body,
            self.parse_source_reply,
        )

    def outgoing_tx_count(self, address: Address) -> int:
        return self._cached_fetch(
            address,
            CacheKind.TX_LIST,
            self.config.tx_ttl,
            self.fetch_tx_list_body,
            self.parse_outgoing_tx_count,
        )

    def _cached_fetch(
        self,
        address: Address,
        kind: CacheKind,
        ttl: typing.Optional[float],
        fetcher: typing.Callable[[Address], bytes],
        parser: typing.Callable[[Address, bytes], T],
    ) -> T:
        with self.cache.inflight(address, kind):
            cached = self.cache.lookup(address, kind, ttl)
            if cached is not None:
                log(f"Serving {kind.value} of {address} from cache")
                return parser(address, cached.payload)
            body = fetcher(address)
            result = parser(address, body)
            self.cache.store(address, kind, body)
        return result

    def perform(self, request: network.RequestToPerform) -> network.ParsedNetworkReply:
        return network.perform_request(
            self.http_client,
            request,
            self.rate_limiter,
            max_retries=self.config.max_retries,
            backoff_base=self.config.backoff_base,
            backoff_cap=self.config.backoff_cap,
            should_retry=self.is_rate_limited,
        )
