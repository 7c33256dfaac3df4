"""IP-conditioned artifact distribution and client-side digest verification.

The client needs httpx and is imported lazily:
    from collision_kit.distribution.client import client_fetch_verify
"""

from collision_kit.distribution.models import ClientReport, Route, RouteTable, ServeLogEntry
from collision_kit.distribution.routes import (
    check_variant_digests,
    load_route_table,
    match_route,
    parse_route_config,
    route_lookup,
)
from collision_kit.distribution.server import ArtifactServer, ServeLog, serve


def __getattr__(name):
    """Lazy imports for the httpx-backed client."""
    if name == "client_fetch_verify":
        from collision_kit.distribution.client import client_fetch_verify
        return client_fetch_verify
    if name == "async_client_fetch_verify":
        from collision_kit.distribution.client import async_client_fetch_verify
        return async_client_fetch_verify
    raise AttributeError(f"module 'collision_kit.distribution' has no attribute {name!r}")


__all__ = [
    "ArtifactServer",
    "ClientReport",
    "Route",
    "RouteTable",
    "ServeLog",
    "ServeLogEntry",
    "async_client_fetch_verify",
    "check_variant_digests",
    "client_fetch_verify",
    "load_route_table",
    "match_route",
    "parse_route_config",
    "route_lookup",
    "serve",
]
