"""Sealed JSON envelopes and at-rest field encryption.

Every packet between panel, server and drones travels as an AES-256-CBC
envelope with a fresh random IV and an HMAC-SHA256 tag computed
encrypt-then-MAC over version || iv || ciphertext. CBC alone is malleable,
so the MAC is verified in constant time before any decryption or padding
check. Stored profile fields reuse the same envelope as opaque tokens.

Wire format: version(1) || key_id(4, big-endian) || iv(16) || mac(32) ||
ciphertext, base64-encoded wherever it travels inside JSON.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import os
import struct
from dataclasses import dataclass
from typing import Any

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

ENVELOPE_VERSION = 1
MAX_PAYLOAD_BYTES = 1 << 20
_BLOCK = 16
_MAC_LEN = 32
_HEADER_LEN = 1 + 4 + 16 + _MAC_LEN


class TransportError(Exception):
    """Base class for envelope failures."""


class MacMismatchError(TransportError):
    """Authentication tag does not verify; envelope rejected untouched."""


class BadPaddingError(TransportError):
    """Plaintext padding is invalid after a verified decrypt."""


class WrongVersionError(TransportError):
    """Envelope version byte is not supported."""


class PayloadTooLargeError(TransportError):
    """Serialized payload exceeds the 1 MiB envelope limit."""


class MalformedEnvelopeError(TransportError):
    """Envelope bytes are structurally invalid."""


@dataclass(frozen=True)
class KeyRing:
    """Encryption and MAC keys; never serialized into envelopes."""

    enc_key: bytes
    mac_key: bytes
    key_id: int = 1

    def __post_init__(self) -> None:
        if len(self.enc_key) != 32 or len(self.mac_key) != 32:
            raise ValueError("enc_key and mac_key must be 32 bytes each")
        if self.enc_key == self.mac_key:
            raise ValueError("enc_key and mac_key must differ")
        if not 0 <= self.key_id <= 0xFFFFFFFF:
            raise ValueError("key_id must fit an unsigned 32-bit field")

    @classmethod
    def generate(cls, key_id: int = 1) -> "KeyRing":
        return cls(enc_key=os.urandom(32), mac_key=os.urandom(32), key_id=key_id)

    @classmethod
    def from_hex(cls, enc_hex: str, mac_hex: str, key_id: int = 1) -> "KeyRing":
        return cls(
            enc_key=bytes.fromhex(enc_hex), mac_key=bytes.fromhex(mac_hex), key_id=key_id
        )


@dataclass(frozen=True)
class SealedEnvelope:
    """An encrypted, authenticated JSON payload."""

    version: int
    key_id: int
    iv: bytes
    mac: bytes
    ciphertext: bytes

    def to_bytes(self) -> bytes:
        return (
            bytes([self.version])
            + struct.pack(">I", self.key_id)
            + self.iv
            + self.mac
            + self.ciphertext
        )

    def to_base64(self) -> str:
        return base64.b64encode(self.to_bytes()).decode("ascii")

    @classmethod
    def from_bytes(cls, data: bytes) -> "SealedEnvelope":
        if len(data) < _HEADER_LEN + _BLOCK:
            raise MalformedEnvelopeError(f"envelope too short: {len(data)} bytes")
        ciphertext = data[_HEADER_LEN:]
        if len(ciphertext) % _BLOCK != 0:
            raise MalformedEnvelopeError("ciphertext is not block-aligned")
        return cls(
            version=data[0],
            key_id=struct.unpack(">I", data[1:5])[0],
            iv=data[5:21],
            mac=data[21:53],
            ciphertext=ciphertext,
        )

    @classmethod
    def from_base64(cls, text: str) -> "SealedEnvelope":
        try:
            raw = base64.b64decode(text, validate=True)
        except (ValueError, TypeError) as exc:
            raise MalformedEnvelopeError(f"invalid base64 envelope: {exc}") from exc
        return cls.from_bytes(raw)


def canonical_json(payload: Any) -> bytes:
    """Stable JSON serialization: sorted keys, no whitespace, UTF-8."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode(
        "utf-8"
    )


def aes256_cbc_encrypt(key: bytes, iv: bytes, data: bytes) -> bytes:
    """Raw AES-256-CBC over block-aligned data (no padding applied here)."""
    enc = Cipher(algorithms.AES(key), modes.CBC(iv)).encryptor()
    return enc.update(data) + enc.finalize()


def aes256_cbc_decrypt(key: bytes, iv: bytes, data: bytes) -> bytes:
    dec = Cipher(algorithms.AES(key), modes.CBC(iv)).decryptor()
    return dec.update(data) + dec.finalize()


def _pkcs7_pad(data: bytes) -> bytes:
    n = _BLOCK - (len(data) % _BLOCK)
    return data + bytes([n]) * n


def _pkcs7_unpad(data: bytes) -> bytes:
    if not data or len(data) % _BLOCK != 0:
        raise BadPaddingError("plaintext is not block-aligned")
    n = data[-1]
    if not 1 <= n <= _BLOCK or data[-n:] != bytes([n]) * n:
        raise BadPaddingError("invalid padding bytes")
    return data[:-n]


def _mac(keys: KeyRing, version: int, iv: bytes, ciphertext: bytes) -> bytes:
    return hmac.new(keys.mac_key, bytes([version]) + iv + ciphertext, hashlib.sha256).digest()


def seal(payload: Any, keys: KeyRing, rng=None) -> SealedEnvelope:
    """Encrypt-then-MAC a JSON-serializable payload with a fresh random IV.

    ``rng`` may supply ``randbytes`` for reproducible IV streams in tests;
    the default draws from ``os.urandom``.
    """
    data = canonical_json(payload)
    if len(data) > MAX_PAYLOAD_BYTES:
        raise PayloadTooLargeError(f"payload is {len(data)} bytes, max {MAX_PAYLOAD_BYTES}")
    iv = rng.randbytes(_BLOCK) if rng is not None else os.urandom(_BLOCK)
    ciphertext = aes256_cbc_encrypt(keys.enc_key, iv, _pkcs7_pad(data))
    mac = _mac(keys, ENVELOPE_VERSION, iv, ciphertext)
    return SealedEnvelope(
        version=ENVELOPE_VERSION,
        key_id=keys.key_id,
        iv=iv,
        mac=mac,
        ciphertext=ciphertext,
    )


def open_envelope(env: SealedEnvelope, keys: KeyRing) -> Any:
    """Verify the MAC in constant time, then decrypt and parse the payload."""
    if env.version != ENVELOPE_VERSION:
        raise WrongVersionError(f"unsupported envelope version {env.version}")
    if env.key_id != keys.key_id:
        # sealed under a different key: same failure surface as a bad MAC
        raise MacMismatchError(f"envelope key id {env.key_id} does not match keyring")
    expected = _mac(keys, env.version, env.iv, env.ciphertext)
    if not hmac.compare_digest(expected, env.mac):
        raise MacMismatchError("envelope authentication failed")
    padded = aes256_cbc_decrypt(keys.enc_key, env.iv, env.ciphertext)
    data = _pkcs7_unpad(padded)
    return json.loads(data.decode("utf-8"))


def encrypt_field(plaintext: str, keys: KeyRing, rng=None) -> str:
    """Opaque at-rest token for one stored field (same envelope, base64)."""
    return seal(plaintext, keys, rng=rng).to_base64()


def decrypt_field(token: str, keys: KeyRing) -> str:
    value = open_envelope(SealedEnvelope.from_base64(token), keys)
    if not isinstance(value, str):
        raise MalformedEnvelopeError("field token does not hold a string")
    return value
