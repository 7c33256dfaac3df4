"""Artifact server answering ``GET /artifact`` with a per-client variant."""

from __future__ import annotations

import logging
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import urlsplit

from collision_kit.distribution.models import RouteTable, ServeLogEntry
from collision_kit.distribution.routes import check_variant_digests, match_route
from collision_kit.exceptions import DistributionError, ServeError
from collision_kit.md5.core import iter_file

logger = logging.getLogger(__name__)

ARTIFACT_PATH = "/artifact"
SERVE_CHUNK_SIZE = 64 * 1024


class ServeLog:
    """Append-only request log, optionally mirrored to a TSV file."""

    def __init__(self, path: Path | str | None = None):
        self.path = Path(path) if path else None
        self._entries: list[ServeLogEntry] = []
        self._lock = threading.Lock()

    def append(self, entry: ServeLogEntry) -> None:
        with self._lock:
            self._entries.append(entry)
            if self.path:
                with open(self.path, "a") as fh:
                    fh.write(entry.to_line() + "\n")

    @property
    def entries(self) -> list[ServeLogEntry]:
        with self._lock:
            return list(self._entries)


class ArtifactHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: ArtifactServer

    def do_GET(self) -> None:
        if urlsplit(self.path).path != ARTIFACT_PATH:
            self.send_response(404)
            self.send_header("Content-Length", "0")
            self.send_header("Connection", "close")
            self.end_headers()
            self.close_connection = True
            return

        client_ip = self.client_address[0]
        try:
            rule, variant = match_route(client_ip, self.server.table)
        except DistributionError as e:
            logger.warning(f"Rejecting {client_ip}: {e}")
            self.send_error(400)
            return

        try:
            size = variant.stat().st_size
        except OSError as e:
            logger.error(f"Variant {variant} unavailable: {e}")
            self.send_error(500)
            return

        self.send_response(200)
        self.send_header("Content-Type", "application/octet-stream")
        self.send_header("Content-Length", str(size))
        self.send_header("Connection", "close")
        self.end_headers()
        self.close_connection = True

        sent = 0
        try:
            for chunk in iter_file(variant, self.server.chunk_size):
                self.wfile.write(chunk)
                sent += len(chunk)
        except OSError as e:
            logger.warning(f"Aborted {variant.name} to {client_ip} after {sent} of {size} bytes: {e}")
            return
        if sent != size:
            logger.warning(f"Variant {variant} changed size while streaming ({sent} != {size})")
            return

        self.server.log.append(ServeLogEntry(time.time(), client_ip, rule, str(variant), sent))
        logger.info(f"{client_ip} rule={rule} variant={variant.name} bytes={sent}")

    def log_message(self, format: str, *args) -> None:
        logger.debug(f"{self.client_address[0]} {format % args}")


class ArtifactServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(
        self,
        address: tuple[str, int],
        table: RouteTable,
        log: ServeLog | None = None,
        chunk_size: int = SERVE_CHUNK_SIZE,
    ):
        super().__init__(address, ArtifactHandler)
        self.table = table
        self.log = log or ServeLog()
        self.chunk_size = chunk_size
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}{ARTIFACT_PATH}"

    def start(self) -> ArtifactServer:
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.shutdown()
        self.server_close()
        if self._thread:
            self._thread.join()

    def __enter__(self) -> ArtifactServer:
        return self

    def __exit__(self, *exc) -> None:
        self.stop()


def parse_bind(bind: str) -> tuple[str, int]:
    host, sep, port = bind.rpartition(":")
    if not sep or not port.isdigit():
        raise ServeError(f"Bind address must be host:port, got {bind!r}")
    return host.strip("[]") or "127.0.0.1", int(port)


def serve(
    table: RouteTable,
    bind: str = "127.0.0.1:0",
    log: ServeLog | None = None,
    chunk_size: int = SERVE_CHUNK_SIZE,
) -> ArtifactServer:
    """Check variant digests, bind and start serving in a background thread.

    Raises:
        VariantDigestMismatchError: The variants do not share the published digest.
        ServeError: The address cannot be bound.
    """
    check_variant_digests(table)
    address = parse_bind(bind)
    try:
        server = ArtifactServer(address, table, log, chunk_size)
    except OSError as e:
        raise ServeError(f"Binding {bind} failed: {e}") from e
    logger.info(f"Serving {len(table.variants)} variants at {server.url}")
    return server.start()
