"""Credential reconstruction and replay-request building.

Static app secrets (Dropbox consumer secret, Box/OneDrive/OneNote client
identifiers) were recovered in the original analysis by decompilation and
heap inspection; they are never shipped here.  The operator supplies them
via a secrets config, and endpoint URLs come from an editable config whose
defaults point at reserved .invalid hosts, so nothing can reach a vendor
server unless deliberately reconfigured and explicitly consented to.
"""

from __future__ import annotations

import base64
import json
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path

from .crypto import OAuth1Material, oauth1_plaintext_header, split_user_token
from .errors import (
    CredentialIncomplete,
    NetworkDisabled,
    TokenExpired,
    TokenFormatInvalid,
    WrongCredentialKind,
)

KIND_OAUTH1 = "oauth1_plaintext"
KIND_OAUTH2 = "oauth2_refresh"
KIND_BASIC = "basic_password"
KIND_ENCRYPTED = "encrypted_token"
KIND_PIN = "app_pin"
KIND_KEYPAIR = "app_keypair"

REPLAYABLE = "replayable"
PARTIAL = "partial"
OPAQUE = "opaque"

BOX_ACCESS_LIFETIME_MS = 60 * 60 * 1000          # access tokens last 60 minutes
BOX_REFRESH_LIFETIME_MS = 60 * 24 * 3600 * 1000  # refresh tokens last 60 days

DEFAULT_ENDPOINTS = {
    "dropbox": {
        "list_url": "https://api.dropbox.invalid/1/metadata/dropbox/",
        "download_url": "https://api-content.dropbox.invalid/1/files/dropbox/{item}",
    },
    "box": {
        "token_url": "https://oauth.box.invalid/token",
        "list_url": "https://api.box.invalid/2.0/folders/0/items",
        "download_url": "https://api.box.invalid/2.0/files/{item}/content",
    },
    "onedrive": {
        "token_url": "https://login.live.invalid/oauth20_token.srf",
        "list_url": "https://apis.live.invalid/v5.0/me/skydrive/files",
        "download_url": "https://apis.live.invalid/v5.0/{item}/content",
    },
    "onenote": {
        "token_url": "https://login.live.invalid/oauth20_token.srf",
        "list_url": "https://apis.live.invalid/v5.0/me/notebooks",
        "download_url": "https://apis.live.invalid/v5.0/{item}/content",
    },
    "owncloud": {
        "list_url": "https://{server}/owncloud/remote.php/webdav/",
        "download_url": "https://{server}/owncloud/remote.php/webdav/{item}",
    },
}

# form fields each token endpoint requires
REFRESH_FIELDS = {
    "box": ("client_id", "client_secret", "refresh_token"),
    "onedrive": ("client_id", "refresh_token", "scope"),
    "onenote": ("client_id", "refresh_token", "scope"),
}


@dataclass
class CredentialRecord:
    app: str
    user_scope: str
    kind: str
    fields: dict = field(default_factory=dict)
    completeness: str = PARTIAL
    provenance: list[str] = field(default_factory=list)
    stale: bool | None = None
    note: str | None = None

    def as_dict(self) -> dict:
        return {
            "app": self.app,
            "user_scope": self.user_scope,
            "kind": self.kind,
            "fields": dict(self.fields),
            "completeness": self.completeness,
            "provenance": list(self.provenance),
            "stale": self.stale,
            "note": self.note,
        }

    def sort_key(self):
        return (self.app, self.user_scope, self.kind)


@dataclass
class RequestDescriptor:
    method: str
    url_template: str
    headers: dict = field(default_factory=dict)
    form_fields: dict = field(default_factory=dict)
    placeholders_unresolved: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "url_template": self.url_template,
            "headers": dict(self.headers),
            "form_fields": dict(self.form_fields),
            "placeholders_unresolved": list(self.placeholders_unresolved),
        }


def load_endpoints(path: str | Path | None) -> dict:
    endpoints = json.loads(json.dumps(DEFAULT_ENDPOINTS))
    if path is not None:
        loaded = json.loads(Path(path).read_text(encoding="utf-8"))
        for app, urls in loaded.items():
            endpoints.setdefault(app, {}).update(urls)
    return endpoints


def load_secrets(path: str | Path | None) -> dict:
    if path is None:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# reconstruction
# ---------------------------------------------------------------------------

def reconstruct_credentials(app: str, user_scope: str, cred_inputs: dict,
                            secrets: dict | None = None) -> list[CredentialRecord]:
    """Assemble credential records from extractor output plus operator secrets."""
    secrets = (secrets or {}).get(app, {})
    sources = list(cred_inputs.get("sources", []))
    creds: list[CredentialRecord] = []

    if app == "dropbox":
        user_token = cred_inputs.get("user_token")
        app_key = cred_inputs.get("app_key")
        if user_token and app_key:
            fields = {"consumer_key": app_key}
            note = None
            try:
                oauth_token, secret_half = split_user_token(user_token)
                fields["token"] = oauth_token
                fields["token_secret_half"] = secret_half
            except TokenFormatInvalid as exc:
                note = str(exc)
            consumer_secret = secrets.get("consumer_secret")
            if consumer_secret:
                fields["consumer_secret"] = consumer_secret
            complete = all(k in fields for k in
                           ("consumer_key", "consumer_secret", "token",
                            "token_secret_half"))
            creds.append(CredentialRecord(
                app=app, user_scope=user_scope, kind=KIND_OAUTH1, fields=fields,
                completeness=REPLAYABLE if complete else PARTIAL,
                provenance=sources, note=note))

    elif app == "box":
        fields = {}
        for name in ("refresh_token", "access_token", "username"):
            if cred_inputs.get(name):
                fields[name] = cred_inputs[name]
        for name in ("client_id", "client_secret"):
            if secrets.get(name):
                fields[name] = secrets[name]
        if fields:
            complete = all(k in fields for k in REFRESH_FIELDS["box"])
            creds.append(CredentialRecord(
                app=app, user_scope=user_scope, kind=KIND_OAUTH2, fields=fields,
                completeness=REPLAYABLE if complete else PARTIAL,
                provenance=sources))

    elif app in ("onedrive", "onenote"):
        entry = cred_inputs.get("dump_entry")
        fields = {}
        note = None
        if app == "onedrive" and entry is not None:
            refresh = entry.authtokens.get("refresh") or entry.password
            if refresh:
                fields["refresh_token"] = refresh
            if entry.authtokens.get("access"):
                fields["access_token"] = entry.authtokens["access"]
        elif app == "onenote":
            if cred_inputs.get("refresh_token"):
                fields["refresh_token"] = cred_inputs["refresh_token"]
            elif cred_inputs.get("token_error"):
                note = f"token decryption failed: {cred_inputs['token_error']}"
        if entry is not None:
            for key in ("scope", "user_id", "account_type"):
                if entry.userdata.get(key):
                    fields[key] = entry.userdata[key]
            expires = entry.userdata.get("expires_at")
            if expires and expires.isdigit():
                fields["expires_at_utc_ms"] = int(expires)
        if secrets.get("client_id"):
            fields["client_id"] = secrets["client_id"]
        if app == "onenote" and "refresh_token" not in fields:
            entry_present = entry is not None or cred_inputs.get("token_error")
            if entry_present:
                creds.append(CredentialRecord(
                    app=app, user_scope=user_scope, kind=KIND_ENCRYPTED,
                    fields=fields, completeness=OPAQUE,
                    provenance=sources, note=note))
        elif fields:
            complete = all(k in fields for k in REFRESH_FIELDS[app])
            creds.append(CredentialRecord(
                app=app, user_scope=user_scope, kind=KIND_OAUTH2, fields=fields,
                completeness=REPLAYABLE if complete else PARTIAL,
                provenance=sources, note=note))

    elif app == "owncloud":
        entry = cred_inputs.get("dump_entry")
        if entry is not None and entry.password is not None:
            account = entry.account_name or cred_inputs.get("select_oc_account") or ""
            username, _, server = account.partition("@")
            fields = {"username": username, "password": entry.password,
                      "server": server}
            complete = bool(username and server) and entry.password is not None
            creds.append(CredentialRecord(
                app=app, user_scope=user_scope, kind=KIND_BASIC, fields=fields,
                completeness=REPLAYABLE if complete else PARTIAL,
                provenance=sources))
        if cred_inputs.get("app_pin"):
            creds.append(CredentialRecord(
                app=app, user_scope=user_scope, kind=KIND_PIN,
                fields={"pin": cred_inputs["app_pin"]},
                completeness=PARTIAL, provenance=sources))

    elif app == "evernote":
        if cred_inputs.get("encrypted_authtoken"):
            creds.append(CredentialRecord(
                app=app, user_scope=user_scope, kind=KIND_ENCRYPTED,
                fields={"encrypted_authtoken": cred_inputs["encrypted_authtoken"]},
                completeness=OPAQUE, provenance=sources,
                note="x-thrift replay requires undocumented binary body"))

    elif app == "upm":
        if cred_inputs.get("dropbox_key") or cred_inputs.get("dropbox_secret"):
            creds.append(CredentialRecord(
                app=app, user_scope=user_scope, kind=KIND_KEYPAIR,
                fields={"consumer_key": cred_inputs.get("dropbox_key"),
                        "consumer_secret": cred_inputs.get("dropbox_secret")},
                completeness=PARTIAL, provenance=sources,
                note="app keypair only; no user token recovered"))

    return creds


def apply_expiry(creds: list[CredentialRecord], acquired_at_utc_ms: int | None,
                 now_utc_ms: int | None) -> None:
    """Derive expiry metadata and staleness flags from the operator clock.

    Box access tokens live 60 minutes past acquisition; Box refresh tokens
    go stale 60 days past acquisition.  Staleness is a flag, not a blocker.
    """
    if acquired_at_utc_ms is None:
        return
    for cred in creds:
        if cred.app != "box" or cred.kind != KIND_OAUTH2:
            continue
        if "access_token" in cred.fields and "expires_at_utc_ms" not in cred.fields:
            cred.fields["expires_at_utc_ms"] = acquired_at_utc_ms + BOX_ACCESS_LIFETIME_MS
        if "refresh_token" in cred.fields and now_utc_ms is not None:
            cred.stale = (now_utc_ms - acquired_at_utc_ms) > BOX_REFRESH_LIFETIME_MS


# ---------------------------------------------------------------------------
# request builders
# ---------------------------------------------------------------------------

def build_refresh_request(cred: CredentialRecord,
                          endpoints: dict | None = None) -> RequestDescriptor:
    if cred.kind != KIND_OAUTH2:
        raise WrongCredentialKind(
            f"refresh requests need an oauth2_refresh credential, not {cred.kind}")
    endpoints = endpoints or DEFAULT_ENDPOINTS
    url = endpoints.get(cred.app, {}).get("token_url", "")
    required = REFRESH_FIELDS.get(cred.app, REFRESH_FIELDS["box"])
    form = {"grant_type": "refresh_token"}
    unresolved = []
    for name in required:
        value = cred.fields.get(name)
        if value:
            form[name] = value
        else:
            form[name] = "{" + name + "}"
            unresolved.append(name)
    return RequestDescriptor(method="POST", url_template=url,
                             headers={"Content-Type":
                                      "application/x-www-form-urlencoded"},
                             form_fields=form,
                             placeholders_unresolved=unresolved)


def build_authenticated_request(cred: CredentialRecord, resource: str,
                                item_ref: str | None = None,
                                endpoints: dict | None = None,
                                now_utc_ms: int | None = None) -> RequestDescriptor:
    if resource not in ("list_root", "download_item"):
        raise ValueError(f"unknown resource {resource!r}")
    endpoints = endpoints or DEFAULT_ENDPOINTS
    app_urls = endpoints.get(cred.app, {})
    url = app_urls.get("list_url" if resource == "list_root" else "download_url", "")
    unresolved = []
    if "{item}" in url:
        if item_ref:
            url = url.replace("{item}", urllib.parse.quote(str(item_ref), safe=""))
        elif resource == "download_item":
            unresolved.append("item")
    if "{server}" in url:
        server = cred.fields.get("server")
        if server:
            url = url.replace("{server}", server)
        else:
            unresolved.append("server")

    headers = {}
    if cred.kind == KIND_OAUTH1:
        material_fields = ("consumer_key", "consumer_secret", "token",
                           "token_secret_half")
        missing = [f for f in material_fields if not cred.fields.get(f)]
        if missing:
            raise CredentialIncomplete(f"missing OAuth fields: {', '.join(missing)}")
        headers["Authorization"] = oauth1_plaintext_header(OAuth1Material(
            consumer_key=cred.fields["consumer_key"],
            consumer_secret=cred.fields["consumer_secret"],
            oauth_token=cred.fields["token"],
            token_secret=cred.fields["token_secret_half"]))
    elif cred.kind == KIND_OAUTH2:
        token = cred.fields.get("access_token")
        if not token:
            raise CredentialIncomplete("no access token on credential")
        expires = cred.fields.get("expires_at_utc_ms")
        if (now_utc_ms is not None and expires is not None
                and now_utc_ms > int(expires)):
            detail = ("no refresh token available"
                      if not cred.fields.get("refresh_token")
                      else "refresh the token first")
            raise TokenExpired(
                f"access token expired at {expires}; {detail}")
        headers["Authorization"] = f"Bearer {token}"
    elif cred.kind == KIND_BASIC:
        username = cred.fields.get("username")
        password = cred.fields.get("password")
        if not username or password is None:
            raise CredentialIncomplete("need username and password")
        raw = f"{username}:{password}".encode("utf-8")
        headers["Authorization"] = "Basic " + base64.b64encode(raw).decode("ascii")
    else:
        raise WrongCredentialKind(
            f"cannot build authenticated requests from {cred.kind}")
    return RequestDescriptor(method="GET", url_template=url, headers=headers,
                             placeholders_unresolved=unresolved)


# ---------------------------------------------------------------------------
# the only effectful operation
# ---------------------------------------------------------------------------

def send_request(desc: RequestDescriptor, endpoint_override: str | None,
                 allow_network: bool = False, timeout: float = 10.0) -> dict:
    """Execute one descriptor against an explicitly chosen host.

    Refuses without the consent flag AND an override URL; the default
    endpoint templates never leave this process.
    """
    if not allow_network:
        raise NetworkDisabled("network replay requires the explicit consent flag")
    if not endpoint_override:
        raise NetworkDisabled("network replay requires an endpoint override URL")
    if desc.placeholders_unresolved:
        raise CredentialIncomplete(
            "unresolved placeholders: " + ", ".join(desc.placeholders_unresolved))

    body = None
    headers = dict(desc.headers)
    if desc.method == "POST":
        body = urllib.parse.urlencode(desc.form_fields).encode("ascii")
        headers.setdefault("Content-Type", "application/x-www-form-urlencoded")
    request = urllib.request.Request(endpoint_override, data=body,
                                     headers=headers, method=desc.method)
    archive = {"request": {"method": desc.method, "url": endpoint_override,
                           "headers": headers,
                           "body": body.decode("ascii") if body else None}}
    try:
        with urllib.request.urlopen(request, timeout=timeout) as response:
            archive["response"] = {
                "status": response.status,
                "headers": dict(response.headers.items()),
                "body": response.read().decode("utf-8", "replace"),
            }
    except urllib.error.HTTPError as exc:
        archive["response"] = {
            "status": exc.code,
            "headers": dict(exc.headers.items()) if exc.headers else {},
            "body": exc.read().decode("utf-8", "replace"),
        }
    except OSError as exc:
        archive["error"] = str(exc)
    return archive
