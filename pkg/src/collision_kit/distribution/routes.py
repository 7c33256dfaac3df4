"""Route configuration and per-client variant selection.

Config lines: ``md5 = <32 hex>``, ``default = <path>`` and
``<ip-or-cidr> = <path>``; ``#`` starts a comment. Relative paths resolve
against the config file's directory. Address rules are tried in file order and
the first match wins.
"""

from __future__ import annotations

import ipaddress
import logging
from pathlib import Path

from collision_kit.distribution.models import Route, RouteTable
from collision_kit.exceptions import (
    InvalidAddressError,
    InvalidBlockError,
    RouteConfigError,
    VariantDigestMismatchError,
)
from collision_kit.md5.core import file_digest
from collision_kit.md5.models import Digest

logger = logging.getLogger(__name__)

DEFAULT_RULE = "default"


def parse_route_config(text: str, base_dir: Path | str = ".") -> RouteTable:
    base = Path(base_dir)
    published: Digest | None = None
    default: Path | None = None
    entries: list[Route] = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise RouteConfigError(f"Line {lineno}: expected '<key> = <value>', got {raw!r}")
        if key == "md5":
            try:
                published = Digest.from_hex(value)
            except InvalidBlockError as e:
                raise RouteConfigError(f"Line {lineno}: bad md5 {value!r}: {e}") from e
        elif key == DEFAULT_RULE:
            default = base / value
        else:
            try:
                network = ipaddress.ip_network(key, strict=False)
            except ValueError as e:
                raise RouteConfigError(f"Line {lineno}: bad address or CIDR {key!r}") from e
            entries.append(Route(key, network, base / value))

    if published is None:
        raise RouteConfigError("Route config has no md5 line")
    if default is None:
        raise RouteConfigError("Route config has no default line")
    table = RouteTable(published, default, tuple(entries))
    for variant in table.variants:
        if not variant.is_file():
            raise RouteConfigError(f"Variant {variant} is not a readable file")
    return table


def load_route_table(path: Path | str) -> RouteTable:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise RouteConfigError(f"Reading route config {path} failed: {e}") from e
    table = parse_route_config(text, Path(path).parent)
    logger.info(f"Loaded {len(table.entries)} routes from {path}")
    return table


def _address(ip: str) -> ipaddress.IPv4Address | ipaddress.IPv6Address:
    try:
        address = ipaddress.ip_address(ip)
    except ValueError as e:
        raise InvalidAddressError(f"Cannot parse client address {ip!r}") from e
    if isinstance(address, ipaddress.IPv6Address) and address.ipv4_mapped:
        return address.ipv4_mapped
    return address


def match_route(ip: str, table: RouteTable) -> tuple[str, Path]:
    """The matching rule's pattern and variant, or the default."""
    address = _address(ip)
    for route in table.entries:
        if address.version == route.network.version and address in route.network:
            return route.pattern, route.variant
    return DEFAULT_RULE, table.default_variant


def route_lookup(ip: str, table: RouteTable) -> Path:
    return match_route(ip, table)[1]


def check_variant_digests(table: RouteTable) -> None:
    """Fail unless every variant hashes to the published digest."""
    for variant in table.variants:
        try:
            actual = file_digest(variant)
        except OSError as e:
            raise RouteConfigError(f"Reading variant {variant} failed: {e}") from e
        if actual != table.published_md5:
            raise VariantDigestMismatchError(
                f"Variant {variant} has md5 {actual.hex}, published {table.published_md5.hex}"
            )
    logger.info(f"All {len(table.variants)} variants match md5 {table.published_md5.hex}")
