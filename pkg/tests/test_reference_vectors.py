"""Validate the reference implementations against published test vectors.

These tests gate everything else: the oracle-equivalence checks are only
meaningful if the oracles themselves reproduce the official vectors.
"""

from __future__ import annotations

import hashlib

import pytest

import refimpl as ref

# FIPS 180-4 (via the classic NIST examples)
SHA1_VECTORS = [
    (b"", "da39a3ee5e6b4b0d3255bfef95601890afd80709"),
    (b"abc", "a9993e364706816aba3e25717850c26c9cd0d89d"),
    (b"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq",
     "84983e441c3bd26ebaae4aa1f95129e5e54670f1"),
]

SHA256_VECTORS = [
    (b"", "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"),
    (b"abc", "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"),
    (b"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq",
     "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1"),
]

# FIPS 197 appendix C
AES_BLOCK_VECTORS = [
    ("000102030405060708090a0b0c0d0e0f",
     "00112233445566778899aabbccddeeff", "69c4e0d86a7b0430d8cdb78070b4c55a"),
    ("000102030405060708090a0b0c0d0e0f1011121314151617",
     "00112233445566778899aabbccddeeff", "dda97ca4864cdfe06eaf70a0ec0d7191"),
    ("000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f",
     "00112233445566778899aabbccddeeff", "8ea2b7ca516745bfeafc49904b496089"),
]

# NIST SP 800-38A F.2.1 / F.2.5
CBC_PLAINTEXT = (
    "6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51"
    "30c81c46a35ce411e5fbc1191a0a52eff69f2445df4f9b17ad2b417be66c3710")
CBC_IV = "000102030405060708090a0b0c0d0e0f"
CBC_VECTORS = [
    ("2b7e151628aed2a6abf7158809cf4f3c",
     "7649abac8119b246cee98e9b12e9197d5086cb9b507219ee95db113a917678b2"
     "73bed6b8e3c1743b7116e69e222295163ff1caa1681fac09120eca307586e1a7"),
    ("603deb1015ca71be2b73aef0857d77811f352c073b6108d72d9810a30914dff4",
     "f58c4c04d6e5f1ba779eabfb5f7bfbd69cfc4e967edb808d679f777bc6702c7d"
     "39f23369a9d9bacfa530e26304231461b2eb05e2c39be9fcda6c19078c6a9d1b"),
]

# The well-known PKCS#12 KDF vectors (SHA-1) originally published by
# S. Henson and reused in many library test suites.
PKCS12_KDF_VECTORS = [
    ("smeg", "0A58CF64530D823F", 1, 1, 24,
     "8AAAE6297B6CB04642AB5B077851284EB7128F1A2A7FBCA3"),
    ("smeg", "0A58CF64530D823F", 2, 1, 8, "79993DFE048D3B76"),
    ("smeg", "3D83C0E4546AC140", 3, 1, 20,
     "8D967D88F6CAA9D714800AB3D48051D63F73A312"),
    ("queeg", "05DEC959ACFF72F7", 1, 1000, 24,
     "ED2034E36328830FF09DF1E1A07DD357185DAC0D4F9EB3D4"),
    ("queeg", "263216FCC2FAB31C", 3, 1000, 20,
     "5EC4C7A80DF652294C3925B6489A7AB857C83476"),
]


@pytest.mark.parametrize("message,digest", SHA1_VECTORS)
def test_sha1_vectors(message: bytes, digest: str) -> None:
    assert ref.sha1(message).hex() == digest


def test_sha1_million_a() -> None:
    assert ref.sha1(b"a" * 1_000_000).hex() == \
        "34aa973cd4c4daa4f61eeb2bdbad27316534016f"


@pytest.mark.parametrize("message,digest", SHA256_VECTORS)
def test_sha256_vectors(message: bytes, digest: str) -> None:
    assert ref.sha256(message).hex() == digest


@pytest.mark.parametrize("key,pt,ct", AES_BLOCK_VECTORS)
def test_aes_block_vectors(key: str, pt: str, ct: str) -> None:
    key_b = bytes.fromhex(key)
    assert ref.aes_encrypt_block(key_b, bytes.fromhex(pt)).hex() == ct
    assert ref.aes_decrypt_block(key_b, bytes.fromhex(ct)).hex() == pt


@pytest.mark.parametrize("key,ct", CBC_VECTORS)
def test_aes_cbc_vectors(key: str, ct: str) -> None:
    key_b = bytes.fromhex(key)
    iv = bytes.fromhex(CBC_IV)
    pt = bytes.fromhex(CBC_PLAINTEXT)
    assert ref.aes_cbc_encrypt(key_b, iv, pt).hex() == ct
    assert ref.aes_cbc_decrypt(key_b, iv, bytes.fromhex(ct)) == pt


@pytest.mark.parametrize("password,salt,purpose,iterations,length,expected",
                         PKCS12_KDF_VECTORS)
def test_pkcs12_kdf_vectors(password: str, salt: str, purpose: int,
                            iterations: int, length: int, expected: str) -> None:
    out = ref.pkcs12_kdf(hashlib.sha1, password, bytes.fromhex(salt),
                         iterations, purpose, length)
    assert out.hex().upper() == expected


def test_reference_hashes_agree_with_hashlib() -> None:
    # sanity net over the vector set: random lengths around block boundaries
    import random
    rng = random.Random(0xC0FFEE)
    for _ in range(64):
        m = rng.randbytes(rng.randrange(0, 200))
        assert ref.sha1(m) == hashlib.sha1(m).digest()
        assert ref.sha256(m) == hashlib.sha256(m).digest()


def test_pkcs7_roundtrip() -> None:
    for n in range(0, 33):
        data = bytes(range(n % 256))[:n]
        padded = ref.pkcs7_pad(data)
        assert len(padded) % 16 == 0
        assert ref.pkcs7_unpad(padded) == data
    with pytest.raises(ValueError):
        ref.pkcs7_unpad(b"\x00" * 16)
