import collections
import dataclasses
import enum
import json
import threading
import time
import typing

import httpx

from .errors import TransportError
from .utils import log


class HttpMethod(enum.Enum):
    GET = "GET"
    POST = "POST"


@dataclasses.dataclass()
class ParsedNetworkReply:
    http_status_code: int
    http_status_reason: str
    response_body: bytes


@dataclasses.dataclass()
class RequestToPerform:
    url: str
    params: typing.Dict[str, str] = dataclasses.field(default_factory=dict)
    method: HttpMethod = HttpMethod.GET


def deserialize_json_response(
    contents: bytes,
) -> typing.Optional[typing.Union[typing.List, typing.Dict]]:
    decoded_contents = contents.decode("utf-8", errors="replace")
    try:
        result = json.loads(decoded_contents)
    except json.JSONDecodeError as exc:
        log(f"JSON decode error - decoded_contents: {decoded_contents[:200]}")
        log(exc, debug=False)
        result = None
    return result


class RateLimiter:
    """Sliding window limiter shared by every thread using the same client

    Over any one second window at most `rate` requests are let through. Rates
    below one request per second become a minimum spacing between requests.
    """

    def __init__(
        self,
        rate: float,
        clock: typing.Callable[[], float] = time.monotonic,
        sleep: typing.Callable[[float], None] = time.sleep,
    ):
        if rate <= 0:
            raise ValueError(f"rate must be positive, got {rate!r}")
        if rate >= 1:
            self.capacity = int(rate)
            self.period = 1.0
        else:
            self.capacity = 1
            self.period = 1.0 / rate
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._sent: typing.Deque[float] = collections.deque()

    def acquire(self) -> None:
        with self._lock:
            while True:
                now = self._clock()
                while self._sent and now - self._sent[0] >= self.period:
                    self._sent.popleft()
                if len(self._sent) < self.capacity:
                    self._sent.append(now)
                    return
                self._sleep(self.period - (now - self._sent[0]))


_rate_limiters: typing.Dict[str, RateLimiter] = {}
_rate_limiters_lock = threading.Lock()


def get_rate_limiter(key: str, rate: float) -> RateLimiter:
    """Return the process wide limiter for `key`, creating it on first use"""
    with _rate_limiters_lock:
        limiter = _rate_limiters.get(f"{key}|{rate}")
        if limiter is None:
            limiter = RateLimiter(rate)
            _rate_limiters[f"{key}|{rate}"] = limiter
        return limiter


def parse_network_reply(response: httpx.Response) -> ParsedNetworkReply:
    return ParsedNetworkReply(
        http_status_code=response.status_code,
        http_status_reason=response.reason_phrase,
        response_body=response.content,
    )


def _is_retryable_status(status_code: int) -> bool:
    return status_code == 429 or status_code >= 500


def backoff_delay(attempt: int, base: float, cap: float) -> float:
    return min(cap, base * (2**attempt))


def perform_request(
    client: httpx.Client,
    request: RequestToPerform,
    limiter: RateLimiter,
    max_retries: int = 5,
    backoff_base: float = 0.5,
    backoff_cap: float = 8.0,
    should_retry: typing.Optional[typing.Callable[[ParsedNetworkReply], bool]] = None,
    sleep: typing.Callable[[float], None] = time.sleep,
) -> ParsedNetworkReply:
    """Perform a request, retrying with exponential backoff

    Transport errors, 429 and 5xx answers are retried, as is any reply that
    `should_retry` flags (explorers report rate limiting inside a 200 body).
    Raises `TransportError` once the retries are exhausted.
    """

    last_problem = "no attempt was made"
    for attempt in range(max_retries + 1):
        limiter.acquire()
        try:
            response = client.request(
                request.method.value, request.url, params=request.params
            )
        except httpx.HTTPError as exc:
            last_problem = f"{type(exc).__name__}: {exc}"
        else:
            reply = parse_network_reply(response)
            if _is_retryable_status(reply.http_status_code):
                last_problem = (
                    f"HTTP {reply.http_status_code} {reply.http_status_reason}"
                )
            elif reply.http_status_code >= 400:
                raise TransportError(
                    f"Request to {request.url} failed with HTTP "
                    f"{reply.http_status_code} {reply.http_status_reason}"
                )
            elif should_retry is not None and should_retry(reply):
                last_problem = "remote reported rate limiting"
            else:
                return reply
        if attempt < max_retries:
            delay = backoff_delay(attempt, backoff_base, backoff_cap)
            log(f"{last_problem} for {request.url}, retrying in {delay:.2f}s")
            sleep(delay)
    raise TransportError(
        f"Request to {request.url} failed after {max_retries + 1} attempts: "
        f"{last_problem}"
    )
