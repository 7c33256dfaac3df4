"""Data models for the IP-conditioned distribution simulator."""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field
from pathlib import Path

from collision_kit.md5.models import Digest

IpNetwork = ipaddress.IPv4Network | ipaddress.IPv6Network

PASS = "pass"
FAIL = "fail"


@dataclass(frozen=True)
class Route:
    """One ``<ip-or-cidr> = <path>`` rule."""

    pattern: str
    network: IpNetwork
    variant: Path


@dataclass(frozen=True)
class RouteTable:
    """Ordered rules; the first match wins and unmatched clients get the default."""

    published_md5: Digest
    default_variant: Path
    entries: tuple[Route, ...] = ()

    @property
    def variants(self) -> list[Path]:
        seen = [self.default_variant]
        for route in self.entries:
            if route.variant not in seen:
                seen.append(route.variant)
        return seen


@dataclass(frozen=True)
class ServeLogEntry:
    timestamp: float
    client_ip: str
    rule: str
    variant: str
    bytes_sent: int

    def to_line(self) -> str:
        return f"{self.timestamp:.6f}\t{self.client_ip}\t{self.rule}\t{self.variant}\t{self.bytes_sent}"


@dataclass
class ClientReport:
    """Outcome of one download and digest check."""

    bytes_received: int
    computed: Digest
    expected: Digest
    complete: bool = True
    diagnostic: str = ""
    attempts: int = field(default=1, compare=False)

    @property
    def verdict(self) -> str:
        return PASS if self.complete and self.computed == self.expected else FAIL
