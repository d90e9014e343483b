"""File-backed corpus store: catalog, match log, histories, artifacts, manifest."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .errors import DataError
from .features import MatchRecord
from .roster import PlayerHistory
from .space import SPACE_FORMAT_VERSION, ChampionCatalog
from .winmodel import MODEL_FORMAT_VERSION

CORPUS_FORMAT_VERSION = 1


def history_to_dict(history: PlayerHistory) -> dict:
    return {
        "player_id": history.player_id,
        "region": history.region,
        "tier": history.tier,
        "division": history.division,
        "picks": dict(history.picks),
    }


def history_from_dict(payload: dict) -> PlayerHistory:
    try:
        return PlayerHistory(
            player_id=payload["player_id"],
            region=payload["region"],
            tier=payload["tier"],
            division=payload["division"],
            picks={c: int(n) for c, n in payload["picks"].items()},
        )
    except (KeyError, TypeError) as exc:
        raise DataError(f"malformed history record: {exc}") from exc


class CorpusStore:
    """One directory holding the whole corpus as streamable line-record files."""

    def __init__(self, root):
        self.root = Path(root)
        self.catalog_path = self.root / "catalog.csv"
        self.matches_path = self.root / "matches.jsonl"
        self.histories_path = self.root / "histories.jsonl"
        self.truth_path = self.root / "truth.json"
        self.artifacts_dir = self.root / "artifacts"
        self.manifest_path = self.root / "manifest.json"

    @property
    def space_path(self) -> Path:
        return self.artifacts_dir / "space.json"

    def model_path(self, name: str = "model") -> Path:
        return self.artifacts_dir / f"{name}.json"

    def ensure_dirs(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        self.artifacts_dir.mkdir(exist_ok=True)

    def save_catalog(self, catalog: ChampionCatalog) -> None:
        self.ensure_dirs()
        catalog.to_csv(self.catalog_path)

    def load_catalog(self) -> ChampionCatalog:
        if not self.catalog_path.exists():
            raise DataError(f"no catalog at {self.catalog_path}")
        return ChampionCatalog.from_csv(self.catalog_path)

    def save_matches(self, matches) -> None:
        self.ensure_dirs()
        with open(self.matches_path, "w") as fh:
            for match in matches:
                fh.write(json.dumps(match.to_dict()) + "\n")

    def load_matches(self) -> list[MatchRecord]:
        if not self.matches_path.exists():
            raise DataError(f"no match log at {self.matches_path}")
        matches = []
        with open(self.matches_path) as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    matches.append(MatchRecord.from_dict(json.loads(line)))
                except json.JSONDecodeError as exc:
                    raise DataError(f"{self.matches_path}:{line_no}: bad JSON: {exc}") from exc
        return matches

    def save_histories(self, histories) -> None:
        self.ensure_dirs()
        values = histories.values() if isinstance(histories, dict) else histories
        with open(self.histories_path, "w") as fh:
            for history in values:
                fh.write(json.dumps(history_to_dict(history)) + "\n")

    def load_histories(self) -> dict[str, PlayerHistory]:
        if not self.histories_path.exists():
            raise DataError(f"no histories at {self.histories_path}")
        out = {}
        with open(self.histories_path) as fh:
            for line in fh:
                if line.strip():
                    history = history_from_dict(json.loads(line))
                    out[history.player_id] = history
        return out

    def _tracked_files(self) -> list[Path]:
        files = [self.catalog_path, self.matches_path, self.histories_path, self.truth_path]
        if self.artifacts_dir.exists():
            files.extend(sorted(self.artifacts_dir.iterdir()))
        return [f for f in files if f.is_file()]

    def write_manifest(self, seeds: dict | None = None) -> None:
        self.ensure_dirs()
        manifest = {
            "format_versions": {
                "corpus": CORPUS_FORMAT_VERSION,
                "space": SPACE_FORMAT_VERSION,
                "model": MODEL_FORMAT_VERSION,
            },
            "seeds": seeds or {},
            "files": {
                str(f.relative_to(self.root)): _sha256(f) for f in self._tracked_files()
            },
        }
        self.manifest_path.write_text(json.dumps(manifest, indent=2))

    def verify_manifest(self) -> dict:
        if not self.manifest_path.exists():
            raise DataError(f"no manifest at {self.manifest_path}")
        manifest = json.loads(self.manifest_path.read_text())
        if manifest.get("format_versions", {}).get("corpus") != CORPUS_FORMAT_VERSION:
            raise DataError("corpus format version mismatch")
        for rel, digest in manifest.get("files", {}).items():
            path = self.root / rel
            if not path.is_file():
                raise DataError(f"manifest file missing: {rel}")
            if _sha256(path) != digest:
                raise DataError(f"manifest hash mismatch for {rel}")
        return manifest


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()
