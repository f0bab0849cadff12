"""User registry, mission log and crash-safe persistence.

Sensitive profile fields (name, surname, address, blood type) are stored
only as encrypted tokens; duplicate registrations are caught through a
keyed fingerprint so no plaintext ever needs to be compared or persisted.
All mutations go through one lock and bump a monotone revision counter,
which is also what the operator panel polls against.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
import secrets
import threading
from dataclasses import dataclass, field

from .mission import Event, MissionRecord, event_from_dict
from .secure_transport import KeyRing, TransportError, decrypt_field, encrypt_field


class StoreError(Exception):
    """Base class for registry/persistence failures."""


class DuplicateUserError(StoreError):
    """Same name, surname and address already registered."""


class MissingFieldError(StoreError):
    """A required profile field is empty."""


class UnknownUserError(StoreError):
    """No profile for that user code."""


class UnknownMissionError(StoreError):
    """No mission with that id."""


class CorruptStoreError(StoreError):
    """Persisted store failed validation on load."""


REQUIRED_PROFILE_FIELDS = ("name", "surname", "address", "blood_type")


@dataclass
class UserProfile:
    """Registered user; sensitive fields held as encrypted tokens only."""

    user_code: str
    short_url_path: str
    fingerprint: str
    tokens: dict[str, str]
    in_search: bool = False

    def to_dict(self) -> dict:
        return {
            "user_code": self.user_code,
            "short_url_path": self.short_url_path,
            "fingerprint": self.fingerprint,
            "tokens": dict(self.tokens),
            "in_search": self.in_search,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "UserProfile":
        return cls(
            user_code=d["user_code"],
            short_url_path=d["short_url_path"],
            fingerprint=d["fingerprint"],
            tokens=dict(d["tokens"]),
            in_search=d["in_search"],
        )


@dataclass
class StoredEvent:
    revision: int
    mission_id: str
    event: Event

    def to_dict(self) -> dict:
        return {"revision": self.revision, "mission_id": self.mission_id, **self.event.to_dict()}


class MissionStore:
    """Single-writer state: users, missions and the revision-stamped feed."""

    def __init__(self, keys: KeyRing, path: str | None = None):
        self.keys = keys
        self.path = path
        self.lock = threading.RLock()
        self.revision = 0
        self.users: dict[str, UserProfile] = {}
        self.short_paths: dict[str, str] = {}
        self.missions: dict[str, MissionRecord] = {}
        self.events: dict[str, list[StoredEvent]] = {}
        self.mission_order: list[str] = []

    # -- users ---------------------------------------------------------

    def _fingerprint(self, name: str, surname: str, address: str) -> str:
        material = "\x1f".join((name, surname, address)).encode("utf-8")
        return hmac.new(self.keys.mac_key, b"user-fp:" + material, hashlib.sha256).hexdigest()

    def register_user(self, name: str, surname: str, address: str, blood_type: str) -> UserProfile:
        fields = {"name": name, "surname": surname, "address": address, "blood_type": blood_type}
        for key in REQUIRED_PROFILE_FIELDS:
            if not (fields[key] or "").strip():
                raise MissingFieldError(f"profile field {key!r} is required")
        with self.lock:
            fp = self._fingerprint(name, surname, address)
            if any(u.fingerprint == fp for u in self.users.values()):
                raise DuplicateUserError("a profile with this name and address already exists")
            user_code = secrets.token_hex(16)
            while user_code in self.users:
                user_code = secrets.token_hex(16)
            # 6 urlsafe chars: the whole beacon URL must compress into 17 bytes
            short = secrets.token_urlsafe(4)
            while short in self.short_paths:
                short = secrets.token_urlsafe(4)
            profile = UserProfile(
                user_code=user_code,
                short_url_path=short,
                fingerprint=fp,
                tokens={k: encrypt_field(v, self.keys) for k, v in fields.items()},
            )
            self.users[user_code] = profile
            self.short_paths[short] = user_code
            self.revision += 1
            return profile

    def get_profile(self, user_code: str) -> dict:
        """Decrypted profile for authorized (operator) access."""
        with self.lock:
            profile = self.users.get(user_code)
            if profile is None:
                raise UnknownUserError(user_code)
            out = {k: decrypt_field(tok, self.keys) for k, tok in profile.tokens.items()}
            out["user_code"] = profile.user_code
            out["short_url_path"] = profile.short_url_path
            out["in_search"] = profile.in_search
            return out

    def passive_profile(self, short_url_path: str) -> dict | None:
        """Profile data for the public beacon URL, or None (renders as 404).

        Returns a value only when the path resolves to a registered user who
        is currently in search.
        """
        with self.lock:
            user_code = self.short_paths.get(short_url_path)
            if user_code is None:
                return None
            profile = self.users[user_code]
            if not profile.in_search:
                return None
            return {
                "user_code": profile.user_code,
                "name": decrypt_field(profile.tokens["name"], self.keys),
            }

    def set_in_search(self, user_codes, value: bool) -> None:
        with self.lock:
            missing = [c for c in user_codes if c not in self.users]
            if missing:
                raise UnknownUserError(f"user codes not registered: {missing}")
            for c in user_codes:
                self.users[c].in_search = value
            self.revision += 1

    def registered_codes(self) -> set[str]:
        with self.lock:
            return set(self.users)

    def user_url(self, user_code: str, base_url: str = "http://sar.gl") -> str:
        with self.lock:
            profile = self.users.get(user_code)
            if profile is None:
                raise UnknownUserError(user_code)
            return f"{base_url}/b/{profile.short_url_path}"

    # -- missions --------------------------------------------------------

    def add_mission(self, record: MissionRecord) -> None:
        with self.lock:
            self.missions[record.id] = record
            self.events.setdefault(record.id, [])
            if record.id not in self.mission_order:
                self.mission_order.append(record.id)
            self.revision += 1

    def get_mission(self, mission_id: str) -> MissionRecord:
        with self.lock:
            record = self.missions.get(mission_id)
            if record is None:
                raise UnknownMissionError(mission_id)
            return record

    def list_missions(self) -> list[MissionRecord]:
        with self.lock:
            return [self.missions[mid] for mid in self.mission_order]

    def append_events(self, mission_id: str, events) -> None:
        with self.lock:
            if mission_id not in self.missions:
                raise UnknownMissionError(mission_id)
            feed = self.events.setdefault(mission_id, [])
            for event in events:
                self.revision += 1
                feed.append(StoredEvent(revision=self.revision, mission_id=mission_id, event=event))

    def events_since(self, mission_id: str, since_revision: int) -> tuple[list[StoredEvent], int]:
        with self.lock:
            if mission_id not in self.missions:
                raise UnknownMissionError(mission_id)
            feed = self.events.get(mission_id, [])
            return [e for e in feed if e.revision > since_revision], self.revision

    # -- persistence ------------------------------------------------------

    def snapshot(self) -> dict:
        with self.lock:
            return {
                "revision": self.revision,
                "users": [u.to_dict() for u in self.users.values()],
                "missions": [self.missions[mid].to_dict() for mid in self.mission_order],
                "events": {
                    mid: [
                        {"revision": se.revision, "event": se.event.to_dict()}
                        for se in feed
                    ]
                    for mid, feed in self.events.items()
                },
            }

    def persist(self, path: str | None = None) -> str:
        """Write-temp + atomic rename so a crash never leaves a torn file."""
        target = path or self.path
        if not target:
            raise StoreError("no store path configured")
        data = json.dumps(self.snapshot(), separators=(",", ":")).encode("utf-8")
        tmp = f"{target}.tmp.{os.getpid()}"
        with open(tmp, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, target)
        return target

    @classmethod
    def load(cls, path: str, keys: KeyRing) -> "MissionStore":
        """Rebuild a store from disk, validating structure and decryptability."""
        try:
            with open(path, "rb") as fh:
                raw = json.load(fh)
        except (OSError, ValueError) as exc:
            raise CorruptStoreError(f"cannot read store file: {exc}") from exc
        store = cls(keys, path=path)
        try:
            store.revision = int(raw["revision"])
            if store.revision < 0:
                raise CorruptStoreError("negative revision")
            for ud in raw["users"]:
                profile = UserProfile.from_dict(ud)
                # decryptability check: wrong or rotated keys must fail loudly
                decrypt_field(profile.tokens["name"], keys)
                store.users[profile.user_code] = profile
                store.short_paths[profile.short_url_path] = profile.user_code
            for md in raw["missions"]:
                record = MissionRecord.from_dict(md)
                store.missions[record.id] = record
                store.mission_order.append(record.id)
            last_rev = 0
            for mid, feed in raw.get("events", {}).items():
                if mid not in store.missions:
                    raise CorruptStoreError(f"events for unknown mission {mid}")
                out = []
                for item in feed:
                    rev = int(item["revision"])
                    if rev <= 0 or rev > store.revision:
                        raise CorruptStoreError(f"event revision {rev} out of range")
                    out.append(
                        StoredEvent(
                            revision=rev,
                            mission_id=mid,
                            event=event_from_dict(item["event"]),
                        )
                    )
                for a, b in zip(out, out[1:]):
                    if b.revision <= a.revision:
                        raise CorruptStoreError("event revisions not strictly increasing")
                if out:
                    last_rev = max(last_rev, out[-1].revision)
                store.events[mid] = out
        except CorruptStoreError:
            raise
        except (KeyError, TypeError, ValueError, TransportError) as exc:
            raise CorruptStoreError(f"store file failed validation: {exc}") from exc
        return store
