"""Ciphers and key-derivation procedures recovered from the analyzed apps.

Three decryption pipelines live here, together with the matching encryptors
the fixture generator needs for round-trip tests:

* Box external-cache encryption ("Box Crypto"): a chained-SHA1 key string
  derived from the app encryption key and file ID, then salted AES-256-CBC.
* UPM password database: PBE with the PKCS#12 KDF over SHA-256, AES-256-CBC,
  salt carried in the database file at bytes 3..10.
* OneNote refresh-token blob: AES-256-CBC keyed from the AccountManager
  password string, IV from the stored seed.

Every parameter that the original apps leave implicit (KDF choice,
iteration counts, chaining encoding, key normalization) is pinned by the
constants below and exported via crypto_profile() so reports are
reproducible and the conventions are swappable in one place.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from urllib.parse import quote

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .errors import (
    CiphertextMalformed,
    CredentialIncomplete,
    CryptoInputInvalid,
    DecryptFailed,
    TokenFormatInvalid,
    UpmImageTooShort,
)

AES_BLOCK = 16

# Box Crypto conventions (see crypto_profile for the emitted record)
BOX_SHA1_ROUNDS = 10
BOX_KDF_HASH = "sha1"
BOX_KDF_ITERATIONS = 1

# UPM PBE conventions
UPM_KDF_HASH = "sha256"
UPM_DEFAULT_ITERATIONS = 20
UPM_HEADER_LEN = 3
UPM_SALT_LEN = 8
UPM_FIXTURE_MAGIC = b"UPMDB1"

# OneNote token conventions
ONENOTE_KEY_LEN = 32
ONENOTE_IV_LEN = 16

PKCS12_PURPOSE_KEY = 1
PKCS12_PURPOSE_IV = 2


def crypto_profile(upm_iterations: int = UPM_DEFAULT_ITERATIONS) -> dict:
    """All cipher/KDF decisions in effect, for embedding in reports."""
    return {
        "box": {
            "key_chain": "sha1 over utf-8 of previous round's lowercase hex, "
                         f"{BOX_SHA1_ROUNDS} rounds, seeded with key + '_' + file_id",
            "kdf": f"pkcs12-{BOX_KDF_HASH}",
            "kdf_iterations": BOX_KDF_ITERATIONS,
            "cipher": "aes-256-cbc",
            "padding": "pkcs7",
        },
        "upm": {
            "kdf": f"pkcs12-{UPM_KDF_HASH}",
            "kdf_iterations": upm_iterations,
            "cipher": "aes-256-cbc",
            "padding": "pkcs7",
            "salt_offset": UPM_HEADER_LEN,
            "salt_len": UPM_SALT_LEN,
        },
        "onenote": {
            "key": "utf-8 of account password, truncated/zero-padded to 32 bytes",
            "iv": "first 16 bytes of decoded seed",
            "cipher": "aes-256-cbc",
            "padding": "pkcs7",
        },
    }


# ---------------------------------------------------------------------------
# primitives
# ---------------------------------------------------------------------------

def pkcs12_kdf(password: str, salt: bytes, iterations: int, purpose: int,
               length: int, hash_name: str) -> bytes:
    """PKCS#12 v1 password-based derivation (RFC 7292 appendix B).

    ``password`` is encoded as big-endian UTF-16 with a two-byte NUL
    terminator (empty passwords map to the empty string, matching the
    Bouncy Castle behaviour the analyzed apps rely on).
    """
    if iterations < 1:
        raise CryptoInputInvalid("iteration count must be >= 1")
    hashfn = getattr(hashlib, hash_name)
    u = hashfn().digest_size
    v = hashfn().block_size

    pw_bytes = password.encode("utf-16-be") + b"\x00\x00" if password else b""

    diversifier = bytes([purpose]) * v

    def expand(data: bytes) -> bytearray:
        if not data:
            return bytearray()
        n = ((len(data) + v - 1) // v) * v
        return bytearray(data[i % len(data)] for i in range(n))

    work = expand(salt) + expand(pw_bytes)
    blocks_needed = (length + u - 1) // u
    out = bytearray()
    for _ in range(blocks_needed):
        digest = hashfn(diversifier + work).digest()
        for _ in range(iterations - 1):
            digest = hashfn(digest).digest()
        b_block = bytes(digest[i % u] for i in range(v))
        # work is split into v-byte chunks; each becomes (chunk + B + 1) mod 2^v
        for j in range(0, len(work), v):
            carry = 1
            for k in range(v - 1, -1, -1):
                carry += work[j + k] + b_block[k]
                work[j + k] = carry & 0xFF
                carry >>= 8
        out.extend(digest)
    return bytes(out[:length])


def _pkcs7_strip(data: bytes) -> bytes:
    if not data or len(data) % AES_BLOCK:
        raise DecryptFailed("plaintext length inconsistent with block padding")
    pad = data[-1]
    if pad < 1 or pad > AES_BLOCK or data[-pad:] != bytes([pad]) * pad:
        raise DecryptFailed("bad PKCS#7 padding")
    return data[:-pad]


def _pkcs7_pad(data: bytes) -> bytes:
    pad = AES_BLOCK - len(data) % AES_BLOCK
    return data + bytes([pad]) * pad


def _aes_cbc(key: bytes, iv: bytes, data: bytes, *, encrypt: bool) -> bytes:
    cipher = Cipher(algorithms.AES(key), modes.CBC(iv))
    ctx = cipher.encryptor() if encrypt else cipher.decryptor()
    return ctx.update(data) + ctx.finalize()


def aes_cbc_encrypt(key: bytes, iv: bytes, plaintext: bytes) -> bytes:
    """Raw AES-CBC over already block-aligned data (exposed for oracle tests)."""
    return _aes_cbc(key, iv, plaintext, encrypt=True)


def aes_cbc_decrypt(key: bytes, iv: bytes, ciphertext: bytes) -> bytes:
    return _aes_cbc(key, iv, ciphertext, encrypt=False)


# ---------------------------------------------------------------------------
# Box Crypto
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoxCryptoParams:
    """Inputs for one Box cache-file decryption.

    app_encryption_key is the long random string from the per-user
    preferences file; file_id selects the per-file salt from the matching
    salts file.
    """

    app_encryption_key: str
    file_id: str
    salt: bytes

    def validate(self) -> None:
        if not self.app_encryption_key or not self.file_id:
            raise CryptoInputInvalid("encryption key and file id must be non-empty")
        if not self.salt:
            raise CryptoInputInvalid("salt must be non-empty")


def box_derive_key(params: BoxCryptoParams) -> str:
    """Chain the app key and file ID through SHA-1 ten times.

    Each round hashes the UTF-8 bytes of the previous round's lowercase hex
    digest, so the chain is string-in/string-out; the result is a 40-char
    lowercase hex string used as the password input to the KDF.
    """
    if not params.app_encryption_key or not params.file_id:
        raise CryptoInputInvalid("encryption key and file id must be non-empty")
    current = f"{params.app_encryption_key}_{params.file_id}"
    for _ in range(BOX_SHA1_ROUNDS):
        current = hashlib.sha1(current.encode("utf-8")).hexdigest()
    return current


def _box_key_iv(params: BoxCryptoParams) -> tuple[bytes, bytes]:
    derived = box_derive_key(params)
    key = pkcs12_kdf(derived, params.salt, BOX_KDF_ITERATIONS,
                     PKCS12_PURPOSE_KEY, 32, BOX_KDF_HASH)
    iv = pkcs12_kdf(derived, params.salt, BOX_KDF_ITERATIONS,
                    PKCS12_PURPOSE_IV, 16, BOX_KDF_HASH)
    return key, iv


def box_decrypt(blob: bytes, params: BoxCryptoParams) -> bytes:
    params.validate()
    if not blob or len(blob) % AES_BLOCK:
        raise CiphertextMalformed(
            f"ciphertext length {len(blob)} is not a positive multiple of {AES_BLOCK}")
    key, iv = _box_key_iv(params)
    return _pkcs7_strip(_aes_cbc(key, iv, blob, encrypt=False))


def box_encrypt(plaintext: bytes, params: BoxCryptoParams) -> bytes:
    params.validate()
    key, iv = _box_key_iv(params)
    return _aes_cbc(key, iv, _pkcs7_pad(plaintext), encrypt=True)


# ---------------------------------------------------------------------------
# UPM password database
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UpmDatabaseImage:
    """An encrypted password database split into its documented regions."""

    header: bytes      # bytes 0..2, preserved verbatim, never interpreted
    salt: bytes        # bytes 3..10 inclusive
    ciphertext: bytes  # everything from byte 11


def upm_parse_header(db: bytes) -> UpmDatabaseImage:
    if len(db) < UPM_HEADER_LEN + UPM_SALT_LEN:
        raise UpmImageTooShort(
            f"database is {len(db)} bytes; header and salt need "
            f"{UPM_HEADER_LEN + UPM_SALT_LEN}")
    return UpmDatabaseImage(
        header=db[:UPM_HEADER_LEN],
        salt=db[UPM_HEADER_LEN:UPM_HEADER_LEN + UPM_SALT_LEN],
        ciphertext=db[UPM_HEADER_LEN + UPM_SALT_LEN:],
    )


def _upm_key_iv(password: str, salt: bytes, iterations: int) -> tuple[bytes, bytes]:
    key = pkcs12_kdf(password, salt, iterations, PKCS12_PURPOSE_KEY, 32, UPM_KDF_HASH)
    iv = pkcs12_kdf(password, salt, iterations, PKCS12_PURPOSE_IV, 16, UPM_KDF_HASH)
    return key, iv


def upm_decrypt(image: UpmDatabaseImage, password: str,
                iterations: int = UPM_DEFAULT_ITERATIONS) -> bytes:
    if not image.ciphertext or len(image.ciphertext) % AES_BLOCK:
        raise CiphertextMalformed(
            f"ciphertext length {len(image.ciphertext)} is not a positive "
            f"multiple of {AES_BLOCK}")
    key, iv = _upm_key_iv(password, image.salt, iterations)
    return _pkcs7_strip(_aes_cbc(key, iv, image.ciphertext, encrypt=False))


def upm_encrypt(plaintext: bytes, password: str, salt: bytes,
                header: bytes = b"UPM",
                iterations: int = UPM_DEFAULT_ITERATIONS) -> bytes:
    if len(salt) != UPM_SALT_LEN:
        raise CryptoInputInvalid(f"salt must be exactly {UPM_SALT_LEN} bytes")
    if len(header) != UPM_HEADER_LEN:
        raise CryptoInputInvalid(f"header must be exactly {UPM_HEADER_LEN} bytes")
    key, iv = _upm_key_iv(password, salt, iterations)
    return header + salt + _aes_cbc(key, iv, _pkcs7_pad(plaintext), encrypt=True)


def upm_brute_force(image: UpmDatabaseImage, candidates,
                    iterations: int = UPM_DEFAULT_ITERATIONS,
                    magic: bytes | None = UPM_FIXTURE_MAGIC):
    """Try candidate passwords; return (password, plaintext) or None.

    With ``magic`` set, a decryption only counts when the plaintext starts
    with it, which makes false accepts from lucky padding practically
    impossible.  Pass magic=None against real evidence, where padding
    success alone marks a candidate plaintext (~1/256 false-accept rate per
    candidate, surfaced as such by callers).
    """
    for candidate in candidates:
        try:
            plaintext = upm_decrypt(image, candidate, iterations)
        except (DecryptFailed, CiphertextMalformed):
            continue
        if magic is not None and not plaintext.startswith(magic):
            continue
        return candidate, plaintext
    return None


# ---------------------------------------------------------------------------
# OneNote refresh token
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OneNoteTokenBlob:
    """Decoded AccountManager material for one OneNote account."""

    seed: bytes          # base64-decoded _SEED
    ciphertext: bytes    # base64-decoded _PASSWORD
    key_material: str    # AccountManager password value

    def validate(self) -> None:
        if len(self.seed) < ONENOTE_IV_LEN:
            raise CryptoInputInvalid(
                f"seed must be at least {ONENOTE_IV_LEN} bytes, got {len(self.seed)}")
        if not self.ciphertext or len(self.ciphertext) % AES_BLOCK:
            raise CryptoInputInvalid(
                "ciphertext must be a positive multiple of the block size")
        if not self.key_material:
            raise CryptoInputInvalid("key material must be non-empty")


def _onenote_key(key_material: str) -> bytes:
    raw = key_material.encode("utf-8")
    return raw[:ONENOTE_KEY_LEN].ljust(ONENOTE_KEY_LEN, b"\x00")


def onenote_decrypt_refresh_token(blob: OneNoteTokenBlob) -> str:
    blob.validate()
    key = _onenote_key(blob.key_material)
    iv = blob.seed[:ONENOTE_IV_LEN]
    plaintext = _pkcs7_strip(_aes_cbc(key, iv, blob.ciphertext, encrypt=False))
    try:
        return plaintext.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecryptFailed(f"decrypted token is not UTF-8: {exc}") from None


def onenote_encrypt_refresh_token(token: str, seed: bytes, key_material: str) -> bytes:
    if len(seed) < ONENOTE_IV_LEN:
        raise CryptoInputInvalid(
            f"seed must be at least {ONENOTE_IV_LEN} bytes, got {len(seed)}")
    if not key_material:
        raise CryptoInputInvalid("key material must be non-empty")
    key = _onenote_key(key_material)
    iv = seed[:ONENOTE_IV_LEN]
    return _aes_cbc(key, iv, _pkcs7_pad(token.encode("utf-8")), encrypt=True)


# ---------------------------------------------------------------------------
# Dropbox OAuth 1.0 material
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OAuth1Material:
    consumer_key: str
    consumer_secret: str
    oauth_token: str
    token_secret: str


def split_user_token(user_token: str) -> tuple[str, str]:
    """Split the stored userToken into (oauth_token, signature second half)."""
    if user_token.count("|") != 1:
        raise TokenFormatInvalid(
            f"expected exactly one '|' delimiter, found {user_token.count('|')}")
    left, right = user_token.split("|")
    return left, right


def _pct(value: str) -> str:
    # RFC 3986 unreserved characters only, as OAuth requires
    return quote(value, safe="")


def oauth1_plaintext_header(material: OAuth1Material) -> str:
    """Build an Authorization value using the PLAINTEXT signature method.

    The signature is literally consumer_secret&token_secret; both halves
    and every other parameter value are percent-encoded.
    """
    for field in ("consumer_key", "consumer_secret", "oauth_token", "token_secret"):
        if not getattr(material, field):
            raise CredentialIncomplete(f"missing OAuth field: {field}")
    signature = f"{material.consumer_secret}&{material.token_secret}"
    params = [
        ("oauth_consumer_key", material.consumer_key),
        ("oauth_token", material.oauth_token),
        ("oauth_signature_method", "PLAINTEXT"),
        ("oauth_signature", signature),
    ]
    joined = ", ".join(f'{name}="{_pct(value)}"' for name, value in params)
    return f"OAuth {joined}"
