"""Exception types shared across the toolkit.

Hard errors are reserved for situations where continuing would produce a
misleading report (missing evidence root, malformed crypto input, refused
network access).  Recoverable conditions inside an extraction run degrade
to warnings instead; see the extractor modules.
"""


class CloudspillError(Exception):
    """Base class for all toolkit errors."""


class TreeNotFound(CloudspillError):
    """Evidence root does not exist or is not a directory."""


class PrefsMalformed(CloudspillError):
    """A shared-preferences XML file could not be parsed."""

    def __init__(self, path, offset, detail):
        super().__init__(f"{path}: malformed prefs XML at byte {offset}: {detail}")
        self.path = path
        self.offset = offset
        self.detail = detail


class DbMalformed(CloudspillError):
    """A file expected to be a SQLite-format database is not."""


class JsonMalformed(CloudspillError):
    """A JSON document failed to parse."""

    def __init__(self, position, detail):
        super().__init__(f"malformed JSON at position {position}: {detail}")
        self.position = position
        self.detail = detail


class CryptoInputInvalid(CloudspillError):
    """A cipher or KDF was called with unusable parameters."""


class CiphertextMalformed(CloudspillError):
    """Ciphertext length is not a positive multiple of the block size."""


class DecryptFailed(CloudspillError):
    """Decryption completed but the padding or content check failed."""


class UpmImageTooShort(CloudspillError):
    """A candidate password database is too short to carry header and salt."""


class TokenFormatInvalid(CloudspillError):
    """A stored token does not match its documented delimiter format."""


class FormatInvalid(CloudspillError):
    """A composite string value does not match its documented format."""


class CredentialIncomplete(CloudspillError):
    """A request was built or sent from a credential missing required fields."""


class WrongCredentialKind(CloudspillError):
    """An operation received a credential of an incompatible kind."""


class TokenExpired(CloudspillError):
    """An access token is past its expiry per the operator-supplied clock."""


class NetworkDisabled(CloudspillError):
    """send_request was invoked without explicit network consent."""


class FixtureError(CloudspillError):
    """Fixture generation or corruption could not proceed."""
