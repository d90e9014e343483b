"""Match-history providers: local fixtures and a schema-mapped remote HTTP client."""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field

from .errors import DataError, ProviderError
from .features import MatchRecord

logger = logging.getLogger(__name__)


@dataclass
class ProviderConfig:
    mode: str = "Fixture"  # "Fixture" | "Remote"
    base_url: str | None = None
    auth_token_env: str | None = None  # environment variable holding the token
    rate_limit: float = 10.0  # requests per second
    max_attempts: int = 3
    backoff_seconds: float = 0.5
    page_size: int = 20
    items_key: str = "matches"
    next_offset_key: str = "next_offset"
    field_map: dict = field(default_factory=dict)  # our top-level key -> remote key

    def __post_init__(self):
        if self.mode not in ("Fixture", "Remote"):
            raise DataError(f"unknown provider mode {self.mode!r}")
        if self.mode == "Remote" and (not self.base_url or not self.auth_token_env):
            raise DataError("Remote mode requires base_url and auth_token_env")


class FixtureProvider:
    """Serves match histories from an in-memory or file-backed match list."""

    def __init__(self, matches):
        self._by_player: dict[str, list[MatchRecord]] = {}
        for match in matches:
            for team in match.teams:
                for slot in team.slots:
                    self._by_player.setdefault(slot.player_id, []).append(match)

    def fetch_match_history(self, player_id: str, limit: int = 60) -> tuple[list[MatchRecord], bool]:
        matches = self._by_player.get(player_id, [])
        return matches[-limit:], len(matches) < limit


class RemoteProvider:
    """Paginated HTTP client with rate limiting, retries, and per-record fault tolerance.

    The remote payload must be a JSON object with a list of match records under
    ``items_key``; top-level record keys may be renamed via ``field_map``.
    ``http_get(url, params, headers) -> (status_code, payload)`` is injectable
    for testing; the default uses requests.
    """

    def __init__(self, config: ProviderConfig, http_get=None):
        self.config = config
        self._http_get = http_get or _requests_get
        self._last_request = 0.0

    def _throttle(self) -> None:
        interval = 1.0 / self.config.rate_limit
        wait = self._last_request + interval - time.monotonic()
        if wait > 0:
            time.sleep(wait)
        self._last_request = time.monotonic()

    def _get(self, params: dict) -> dict:
        token = os.environ.get(self.config.auth_token_env, "")
        headers = {"Authorization": f"Bearer {token}"}
        last_error = None
        for attempt in range(self.config.max_attempts):
            self._throttle()
            try:
                status, payload = self._http_get(self.config.base_url, params, headers)
            except Exception as exc:  # network-level failure: retry
                last_error = exc
                time.sleep(self.config.backoff_seconds * 2**attempt)
                continue
            if status in (401, 403):
                raise ProviderError(f"authentication failed (HTTP {status})")
            if status == 429 or status >= 500:
                last_error = ProviderError(f"HTTP {status}")
                time.sleep(self.config.backoff_seconds * 2**attempt)
                continue
            if status != 200:
                raise ProviderError(f"unexpected HTTP {status}")
            return payload
        raise ProviderError(f"retries exhausted: {last_error}")

    def _map_record(self, record: dict) -> dict:
        if not self.config.field_map:
            return record
        mapped = dict(record)
        for ours, theirs in self.config.field_map.items():
            if theirs in mapped:
                mapped[ours] = mapped.pop(theirs)
        return mapped

    def fetch_match_history(self, player_id: str, limit: int = 60) -> tuple[list[MatchRecord], bool]:
        matches: list[MatchRecord] = []
        offset = 0
        truncated = False
        while len(matches) < limit:
            params = {"player": player_id, "offset": offset, "limit": self.config.page_size}
            try:
                payload = self._get(params)
            except ProviderError as exc:
                if "authentication" in str(exc):
                    raise
                logger.warning("partial history for %s: %s", player_id, exc)
                truncated = True
                break
            items = payload.get(self.config.items_key, [])
            for raw in items:
                try:
                    matches.append(MatchRecord.from_dict(self._map_record(raw)))
                except DataError as exc:
                    logger.warning("skipping malformed record for %s: %s", player_id, exc)
                if len(matches) >= limit:
                    break
            next_offset = payload.get(self.config.next_offset_key)
            if next_offset is None or not items:
                truncated = truncated or len(matches) < limit
                break
            offset = next_offset
        return matches[:limit], truncated or len(matches) < limit


def make_provider(config: ProviderConfig, fixture_matches=None, http_get=None):
    if config.mode == "Fixture":
        return FixtureProvider(fixture_matches or [])
    return RemoteProvider(config, http_get=http_get)


def fetch_match_history(provider, player_id: str, limit: int = 60) -> tuple[list[MatchRecord], bool]:
    if limit < 1:
        raise DataError("limit must be >= 1")
    return provider.fetch_match_history(player_id, limit)


@dataclass
class SnowballResult:
    matches: list
    players: set
    failed_players: dict


def snowball_sample(provider, seed_players, depth: int = 1, limit: int = 60) -> SnowballResult:
    """Breadth-first expansion over co-participants up to ``depth`` hops from the seeds.

    Matches are deduplicated by match_id; per-player provider failures are
    recorded and sampling continues.
    """
    if not seed_players:
        raise DataError("seed player list is empty")
    seen_players: set[str] = set()
    seen_matches: dict[str, MatchRecord] = {}
    failed: dict[str, str] = {}
    frontier = list(dict.fromkeys(seed_players))
    for _ in range(depth + 1):
        next_frontier: list[str] = []
        for player_id in frontier:
            if player_id in seen_players:
                continue
            seen_players.add(player_id)
            try:
                matches, _ = fetch_match_history(provider, player_id, limit)
            except ProviderError as exc:
                failed[player_id] = str(exc)
                continue
            for match in matches:
                if match.match_id not in seen_matches:
                    seen_matches[match.match_id] = match
                for team in match.teams:
                    for slot in team.slots:
                        if slot.player_id not in seen_players:
                            next_frontier.append(slot.player_id)
        frontier = list(dict.fromkeys(next_frontier))
        if not frontier:
            break
    return SnowballResult(
        matches=list(seen_matches.values()), players=seen_players, failed_players=failed
    )
