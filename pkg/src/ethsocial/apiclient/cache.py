"""On-disk explorer cache

Layout: one directory per network, one file per fetched payload named after
the lowercase address, and a sidecar `index.json`. Entries are never
overwritten; lookups return the newest one.
"""

import contextlib
import json
import os
import threading
import time
import typing
from pathlib import Path

from ..crypto import Address
from ..utils import log
from .models import CacheEntry, CacheKind

INDEX_FILE_NAME = "index.json"


class ExplorerCache:
    def __init__(
        self,
        root: Path,
        network: str,
        clock: typing.Callable[[], float] = time.time,
    ):
        self.directory = Path(root) / network
        self.clock = clock
        self._lock = threading.RLock()
        self._inflight_locks: typing.Dict[typing.Tuple[str, str], threading.Lock] = {}
        self._index: typing.Optional[typing.Dict] = None

    @property
    def index_path(self) -> Path:
        return self.directory / INDEX_FILE_NAME

    def _load_index(self) -> typing.Dict:
        if self._index is None:
            if self.index_path.is_file():
                with self.index_path.open(encoding="utf-8") as fh:
                    self._index = json.load(fh)
            else:
                self._index = {}
        return self._index

    def _write_index(self) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        temporary = self.index_path.with_suffix(".tmp")
        with temporary.open("w", encoding="utf-8") as fh:
            json.dump(self._index, fh, indent=2, sort_keys=True)
        os.replace(temporary, self.index_path)

    @contextlib.contextmanager
    def inflight(self, address: Address, kind: CacheKind):
        """Serialize fetches of the same address so only one hits the network"""
        with self._lock:
            lock = self._inflight_locks.setdefault(
                (address.hex, kind.value), threading.Lock()
            )
        with lock:
            yield

    def store(
        self,
        address: Address,
        kind: CacheKind,
        payload: bytes,
        fetched_at: typing.Optional[float] = None,
    ) -> CacheEntry:
        fetched_at = self.clock() if fetched_at is None else fetched_at
        with self._lock:
            index = self._load_index()
            entries = index.setdefault(address.hex, {}).setdefault(kind.value, [])
            file_name = f"{address.hex}.{kind.value}.{len(entries)}.json"
            self.directory.mkdir(parents=True, exist_ok=True)
            (self.directory / file_name).write_bytes(payload)
            entry = CacheEntry(
                address=address,
                kind=kind,
                fetched_at=fetched_at,
                payload=payload,
                payload_digest=CacheEntry.digest(payload),
            )
            entries.append(
                {
                    "file": file_name,
                    "fetched_at": fetched_at,
                    "digest": entry.payload_digest,
                }
            )
            self._write_index()
        return entry

    def lookup(
        self,
        address: Address,
        kind: CacheKind,
        ttl: typing.Optional[float] = None,
    ) -> typing.Optional[CacheEntry]:
        with self._lock:
            entries = self._load_index().get(address.hex, {}).get(kind.value, [])
            if not entries:
                return None
            newest = max(entries, key=lambda item: item["fetched_at"])
            path = self.directory / newest["file"]
            try:
                payload = path.read_bytes()
            except OSError as exc:
                log(f"Cache file {str(path)!r} is unreadable: {exc}", debug=False)
                return None
        entry = CacheEntry(
            address=address,
            kind=kind,
            fetched_at=newest["fetched_at"],
            payload=payload,
            payload_digest=newest["digest"],
        )
        if not entry.is_intact:
            log(f"Ignoring cache entry {str(path)!r}: digest mismatch", debug=False)
            result = None
        elif not entry.is_fresh(ttl, self.clock()):
            result = None
        else:
            result = entry
        return result
