"""Download an artifact and check it against the expected MD5."""

from __future__ import annotations

import asyncio
import logging
import os
import time
from collections.abc import AsyncIterable, Callable, Iterable
from pathlib import Path

from collision_kit.distribution.models import ClientReport
from collision_kit.exceptions import FetchError
from collision_kit.md5.core import DEFAULT_FILE_BACKEND, digest_stream, new_hasher
from collision_kit.md5.models import Digest

logger = logging.getLogger(__name__)

MAX_RETRIES = 3
DEFAULT_TIMEOUT = float(os.environ.get("COLLISION_KIT_TIMEOUT", "10"))

# Applied to every received chunk before hashing; tests use it to tamper in transit.
ChunkHook = Callable[[bytes], bytes]


def _require_httpx():
    try:
        import httpx
    except ImportError:
        raise ImportError(
            "httpx is required for client_fetch_verify. "
            "Install with: pip install collision-kit[web]"
        )
    return httpx


def _expected(expected: Digest | str) -> Digest:
    return expected if isinstance(expected, Digest) else Digest.from_hex(expected)


def _declared_length(response) -> int | None:
    value = response.headers.get("Content-Length")
    return int(value) if value is not None and value.isdigit() else None


class _Body:
    """Counts, transforms and optionally saves streamed chunks.

    A transfer cut short by the peer ends the stream instead of raising, so
    the bytes that did arrive are still hashed.
    """

    def __init__(self, hook: ChunkHook | None, dest: Path | str | None, cut: type[Exception]):
        self.hook = hook
        self.dest = dest
        self.cut = cut
        self.received = 0
        self.chunks: list[bytes] = []
        self.error = ""

    def take(self, chunk: bytes) -> bytes:
        if self.hook:
            chunk = self.hook(chunk)
        self.received += len(chunk)
        if self.dest:
            self.chunks.append(chunk)
        return chunk

    def feed(self, chunks: Iterable[bytes]) -> Iterable[bytes]:
        try:
            for chunk in chunks:
                yield self.take(chunk)
        except self.cut as e:
            self.error = str(e)

    def save(self) -> None:
        if self.dest:
            Path(self.dest).write_bytes(b"".join(self.chunks))

    def report(self, computed: Digest, expected: Digest, declared: int | None, attempts: int) -> ClientReport:
        complete = not self.error and (declared is None or self.received == declared)
        diagnostic = ""
        if not complete:
            diagnostic = f"short read: {self.received} of {declared} bytes"
            if self.error:
                diagnostic += f" ({self.error})"
        report = ClientReport(self.received, computed, expected, complete, diagnostic, attempts)
        logger.info(
            f"Fetched {self.received} bytes, md5 {computed.hex}, expected {expected.hex}: "
            f"{report.verdict}"
        )
        return report


def client_fetch_verify(
    url: str,
    expected: Digest | str,
    timeout: float = DEFAULT_TIMEOUT,
    chunk_hook: ChunkHook | None = None,
    dest: Path | str | None = None,
    source_address: str | None = None,
) -> ClientReport:
    """GET ``url``, stream the body through MD5 and compare with ``expected``.

    Connection failures are retried with exponential backoff. A body shorter
    than its Content-Length gives a failing report rather than an error.
    ``source_address`` binds the local side, so one host can play several clients.

    Raises:
        FetchError: The server is unreachable after retries or answers non-200.
    """
    httpx = _require_httpx()
    want = _expected(expected)

    for attempt in range(MAX_RETRIES):
        body = _Body(chunk_hook, dest, httpx.RemoteProtocolError)
        try:
            transport = httpx.HTTPTransport(local_address=source_address) if source_address else None
            with httpx.Client(timeout=timeout, transport=transport) as client:
                with client.stream("GET", url) as response:
                    if response.status_code != 200:
                        raise FetchError(f"GET {url} returned HTTP {response.status_code}")
                    declared = _declared_length(response)
                    computed = digest_stream(body.feed(response.iter_bytes()), DEFAULT_FILE_BACKEND)
            body.save()
            return body.report(computed, want, declared, attempt + 1)
        except (httpx.ConnectError, httpx.TimeoutException) as e:
            wait = 2**attempt
            logger.warning(f"Fetch of {url} failed ({e}), retrying in {wait}s (attempt {attempt + 1})")
            time.sleep(wait)
        except httpx.HTTPError as e:
            raise FetchError(f"Fetch of {url} failed: {e}") from e
    raise FetchError(f"Fetch of {url} failed after {MAX_RETRIES} retries")


async def _hash_body(body: _Body, chunks: AsyncIterable[bytes], backend: str) -> Digest:
    """Hash each chunk as it arrives."""
    hasher = new_hasher(backend)
    try:
        async for chunk in chunks:
            hasher.update(body.take(chunk))
    except body.cut as e:
        body.error = str(e)
    return hasher.digest()


async def async_client_fetch_verify(
    url: str,
    expected: Digest | str,
    timeout: float = DEFAULT_TIMEOUT,
    chunk_hook: ChunkHook | None = None,
    dest: Path | str | None = None,
    source_address: str | None = None,
) -> ClientReport:
    """Async variant of :func:`client_fetch_verify`."""
    httpx = _require_httpx()
    want = _expected(expected)

    for attempt in range(MAX_RETRIES):
        body = _Body(chunk_hook, dest, httpx.RemoteProtocolError)
        try:
            transport = (
                httpx.AsyncHTTPTransport(local_address=source_address) if source_address else None
            )
            async with httpx.AsyncClient(timeout=timeout, transport=transport) as client:
                async with client.stream("GET", url) as response:
                    if response.status_code != 200:
                        raise FetchError(f"GET {url} returned HTTP {response.status_code}")
                    declared = _declared_length(response)
                    computed = await _hash_body(
                        body, response.aiter_bytes(), DEFAULT_FILE_BACKEND
                    )
            body.save()
            return body.report(computed, want, declared, attempt + 1)
        except (httpx.ConnectError, httpx.TimeoutException) as e:
            wait = 2**attempt
            logger.warning(f"Fetch of {url} failed ({e}), retrying in {wait}s (attempt {attempt + 1})")
            await asyncio.sleep(wait)
        except httpx.HTTPError as e:
            raise FetchError(f"Fetch of {url} failed: {e}") from e
    raise FetchError(f"Fetch of {url} failed after {MAX_RETRIES} retries")
