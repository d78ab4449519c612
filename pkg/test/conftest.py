import multiprocessing
import time
from pathlib import Path
from wsgiref.simple_server import WSGIRequestHandler, make_server

import httpx
import pytest

import _mock_explorer
from ethsocial.conf import Network, NetworkConfig

MOCK_EXPLORER_PORT = 9100
MOCK_EXPLORER_URL = f"http://localhost:{MOCK_EXPLORER_PORT}"
FIXTURES_DIR = Path(__file__).parent / "_fixtures"
CONTRACTS_DIR = FIXTURES_DIR / "contracts"


class _QuietHandler(WSGIRequestHandler):
    def log_message(self, *args):
        pass


def _spawn_explorer_server(port=MOCK_EXPLORER_PORT):
    with make_server(
        "", port, _mock_explorer.explorer_flask_app, handler_class=_QuietHandler
    ) as http_server:
        http_server.serve_forever()


def _wait_until_up(url: str, timeout: float = 10.0) -> None:
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        try:
            httpx.get(f"{url}/_hits", timeout=0.5)
        except httpx.HTTPError:
            time.sleep(0.05)
        else:
            return
    raise RuntimeError(f"mock explorer did not start at {url}")


@pytest.fixture(scope="session")
def mock_explorer_server():
    """Spawn a new Etherscan-like http server in a new process

    The mock server is a flask application with fixed responses for a handful of
    known addresses, see `_mock_explorer`. It also counts the requests it gets,
    which tests read back from `/_hits`. The server is shutdown when a test run
    finishes.
    """

    process = multiprocessing.Process(target=_spawn_explorer_server, daemon=True)
    print("starting mock explorer server...")
    process.start()
    _wait_until_up(MOCK_EXPLORER_URL)
    yield MOCK_EXPLORER_URL
    print("terminating mock explorer server...")
    process.terminate()


@pytest.fixture()
def mock_explorer(mock_explorer_server):
    """The mock explorer with its request counters reset"""
    httpx.post(f"{mock_explorer_server}/_reset")
    return mock_explorer_server


@pytest.fixture()
def explorer_config(mock_explorer, tmp_path) -> NetworkConfig:
    return NetworkConfig.for_network(
        Network.CUSTOM,
        base_url=f"{mock_explorer}/api",
        api_key="test-key",
        rate_limit=1000.0,
        max_retries=2,
        backoff_base=0.01,
        backoff_cap=0.05,
        timeout=5.0,
        cache_dir=tmp_path / "cache",
    )


def explorer_hits(base_url: str) -> dict:
    return httpx.get(f"{base_url}/_hits").json()


@pytest.fixture()
def contracts_dir() -> Path:
    return CONTRACTS_DIR


@pytest.fixture()
def fixtures_dir() -> Path:
    return FIXTURES_DIR
