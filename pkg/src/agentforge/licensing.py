"""License and trial tokens signed with Ed25519.

A token is `base64url(payload_json) "." base64url(signature)`. The signature
covers the raw payload bytes and is checked before the JSON is parsed, so a
token with any flipped payload byte fails with reason "signature", not a
parse error. The payload carries license_id, expiry (unix seconds),
privilege, and alg.
"""

from __future__ import annotations

import base64
import binascii
import json
import time
from dataclasses import dataclass
from pathlib import Path

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from .errors import ValidationError

ALG = "ed25519"
TRIAL_DURATION_SECONDS = 72 * 3600
TRIAL_PRIVILEGE = 3


@dataclass(frozen=True)
class LicenseCheck:
    valid: bool
    reason: str | None = None
    license_id: str | None = None
    privilege: int | None = None
    expiry: int | None = None

    def to_json(self) -> dict:
        result: dict = {"valid": self.valid}
        if self.reason is not None:
            result["reason"] = self.reason
        if self.valid:
            result["license_id"] = self.license_id
            result["privilege"] = self.privilege
            result["expiry"] = self.expiry
        return result


def canonical_payload(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def sign_license(payload: dict, private_key: Ed25519PrivateKey) -> str:
    """Produce a compact token for a payload dict (alg is filled in)."""
    full = dict(payload)
    full.setdefault("alg", ALG)
    body = canonical_payload(full)
    signature = private_key.sign(body)
    return f"{_b64(body)}.{_b64(signature)}"


def issue_trial(
    private_key: Ed25519PrivateKey,
    *,
    duration_seconds: int = TRIAL_DURATION_SECONDS,
    privilege: int = TRIAL_PRIVILEGE,
    now: int | None = None,
) -> tuple[str, dict]:
    """Sign a short-lived trial token; returns (token, payload)."""
    issued = int(time.time()) if now is None else now
    payload = {
        "license_id": f"trial-{issued}",
        "expiry": issued + duration_seconds,
        "privilege": privilege,
        "alg": ALG,
    }
    return sign_license(payload, private_key), payload


def validate_license(
    token: str, public_key: Ed25519PublicKey, *, now: int | None = None
) -> LicenseCheck:
    """Check structure, signature, algorithm, and expiry of a token."""
    moment = int(time.time()) if now is None else now
    parts = token.split(".")
    if len(parts) != 2:
        return LicenseCheck(valid=False, reason="malformed")
    try:
        body = _unb64(parts[0])
        signature = _unb64(parts[1])
    except (binascii.Error, ValueError):
        return LicenseCheck(valid=False, reason="malformed")
    try:
        public_key.verify(signature, body)
    except InvalidSignature:
        return LicenseCheck(valid=False, reason="signature")
    try:
        payload = json.loads(body)
    except json.JSONDecodeError:
        return LicenseCheck(valid=False, reason="malformed")
    if not isinstance(payload, dict) or payload.get("alg") != ALG:
        return LicenseCheck(valid=False, reason="alg")
    expiry = payload.get("expiry")
    if not isinstance(expiry, int):
        return LicenseCheck(valid=False, reason="malformed")
    if expiry <= moment:
        return LicenseCheck(valid=False, reason="expired")
    return LicenseCheck(
        valid=True,
        license_id=str(payload.get("license_id", "")),
        privilege=int(payload.get("privilege", 0)),
        expiry=expiry,
    )


def generate_keypair() -> tuple[bytes, bytes]:
    """Fresh Ed25519 keypair as (private_pem, public_pem)."""
    private = Ed25519PrivateKey.generate()
    private_pem = private.private_bytes(
        serialization.Encoding.PEM,
        serialization.PrivateFormat.PKCS8,
        serialization.NoEncryption(),
    )
    public_pem = private.public_key().public_bytes(
        serialization.Encoding.PEM,
        serialization.PublicFormat.SubjectPublicKeyInfo,
    )
    return private_pem, public_pem


def load_private_key(path: str | Path) -> Ed25519PrivateKey:
    key = serialization.load_pem_private_key(Path(path).read_bytes(), password=None)
    if not isinstance(key, Ed25519PrivateKey):
        raise ValidationError(f"{path} is not an Ed25519 private key")
    return key


def load_public_key(path: str | Path) -> Ed25519PublicKey:
    key = serialization.load_pem_public_key(Path(path).read_bytes())
    if not isinstance(key, Ed25519PublicKey):
        raise ValidationError(f"{path} is not an Ed25519 public key")
    return key


def _b64(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).decode("ascii")


def _unb64(data: str) -> bytes:
    if not data:
        raise ValueError("empty segment")
    normalized = data.replace("-", "+").replace("_", "/").encode("ascii")
    return base64.b64decode(normalized, validate=True)
