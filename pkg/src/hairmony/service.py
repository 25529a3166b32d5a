"""HTTP annotation service backing the labeling UI.

Serves the taxonomy schema, dispenses images to label one at a time with
a lease so two labellers never get the same pending image, validates every
submitted annotation, and appends accepted records to a JSON Lines store
(flushed and fsynced before the success response, so a crash never loses
an acknowledged annotation). Restarting simply replays the store.

Endpoints (JSON unless noted):

- ``GET  /api/taxonomy``              schema document
- ``GET  /api/tasks/next``            {image_id, image_url} or 204
- ``GET  /api/images/<id>``           image bytes
- ``POST /api/annotations``           {image_id, annotator_id, annotation}
                                      -> 201, or 422 {violations: [...]}
- ``GET  /api/annotations[?image_id]``stored records
- ``GET  /api/progress``              {total, done, pending}
- ``GET  /``                          the built UI, when one is configured
"""

from __future__ import annotations

import json
import mimetypes
import os
import sys
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, quote, unquote, urlparse

from .taxonomy import (
    AnnotationError,
    HairstyleAnnotation,
    Taxonomy,
    load_taxonomy,
    validate_annotation,
)

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".webp", ".gif", ".bmp")

_FALLBACK_INDEX = b"""<!doctype html>
<html><head><meta charset="utf-8"><title>hairmony annotation service</title></head>
<body><h1>hairmony annotation service</h1>
<p>The labeling UI is not built. Build it under <code>frontend/</code> and pass
<code>--ui frontend/dist</code>, or use the JSON API under <code>/api/</code>.</p>
</body></html>
"""


class AnnotationService:
    """State and operations shared by all request handler threads."""

    def __init__(
        self,
        image_dir: str | Path,
        taxonomy_path: str | Path | Taxonomy,
        store_path: str | Path,
        ui_dir: str | Path | None = None,
        lease_seconds: float = 600.0,
    ):
        self.image_dir = Path(image_dir)
        if not self.image_dir.is_dir():
            raise FileNotFoundError(f"image directory {self.image_dir} is not readable")
        if isinstance(taxonomy_path, Taxonomy):
            self.taxonomy = taxonomy_path
            self.taxonomy_doc = None
        else:
            self.taxonomy = load_taxonomy(taxonomy_path)
            self.taxonomy_doc = json.loads(Path(taxonomy_path).read_text("utf-8"))
        self.store_path = Path(store_path)
        self.ui_dir = Path(ui_dir) if ui_dir else None
        self.lease_seconds = float(lease_seconds)

        self.images = sorted(
            p.name
            for p in self.image_dir.iterdir()
            if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
        )
        self._lock = threading.Lock()
        self._leases: dict[str, float] = {}
        self._records: list[dict] = []
        self._done: set[str] = set()
        self._replay_store()
        self._store_fh = open(self.store_path, "a", encoding="utf-8")
        self._server: ThreadingHTTPServer | None = None

    # -- store ----------------------------------------------------------

    def _replay_store(self) -> None:
        if not self.store_path.exists():
            return
        with open(self.store_path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    image_id = record["image_id"]
                    ann = HairstyleAnnotation.from_dict(record["annotation"])
                except (json.JSONDecodeError, KeyError, AnnotationError) as exc:
                    print(
                        f"warning: {self.store_path}: line {lineno}: "
                        f"skipping corrupt record ({exc})",
                        file=sys.stderr,
                    )
                    continue
                self._records.append(record)
                self._done.add(image_id)

    def _append_record(self, record: dict) -> None:
        self._store_fh.write(json.dumps(record, ensure_ascii=False) + "\n")
        self._store_fh.flush()
        os.fsync(self._store_fh.fileno())

    # -- operations -----------------------------------------------------

    def next_task(self) -> dict | None:
        """Earliest image that is neither done nor under an active lease."""
        now = time.monotonic()
        with self._lock:
            for image_id in self.images:
                if image_id in self._done:
                    continue
                expiry = self._leases.get(image_id)
                if expiry is not None and expiry > now:
                    continue
                self._leases[image_id] = now + self.lease_seconds
                return {
                    "image_id": image_id,
                    "image_url": "/api/images/" + quote(image_id),
                }
        return None

    def submit(self, doc: dict) -> tuple[int, dict]:
        """Validate and store one annotation; returns (http status, body)."""
        try:
            image_id = str(doc["image_id"])
            annotator_id = str(doc.get("annotator_id", "anonymous"))
            ann_doc = dict(doc["annotation"])
        except (KeyError, TypeError) as exc:
            return 400, {"error": f"malformed submission: {exc}"}
        if image_id not in self.images:
            return 404, {"error": f"unknown image {image_id!r}"}
        ann_doc.setdefault("style_id", image_id)
        try:
            ann = HairstyleAnnotation.from_dict(ann_doc)
            violations = validate_annotation(self.taxonomy, ann)
        except AnnotationError as exc:
            return 400, {"error": str(exc)}
        if violations:
            return 422, {"violations": [v.to_dict() for v in violations]}
        record = {
            "image_id": image_id,
            "annotator_id": annotator_id,
            "submitted_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "annotation": ann.to_dict(),
        }
        with self._lock:
            self._append_record(record)
            self._records.append(record)
            self._done.add(image_id)
            self._leases.pop(image_id, None)
        return 201, {"status": "stored", "image_id": image_id}

    def annotations(self, image_id: str | None = None) -> list[dict]:
        with self._lock:
            if image_id is None:
                return list(self._records)
            return [r for r in self._records if r["image_id"] == image_id]

    def progress(self) -> dict:
        with self._lock:
            done = len(self._done)
        return {
            "total": len(self.images),
            "done": done,
            "pending": len(self.images) - done,
        }

    def image_bytes(self, image_id: str) -> tuple[bytes, str] | None:
        if image_id not in self.images:
            return None
        path = self.image_dir / image_id
        ctype = mimetypes.guess_type(image_id)[0] or "application/octet-stream"
        return path.read_bytes(), ctype

    def ui_file(self, path: str) -> tuple[bytes, str] | None:
        if self.ui_dir is None:
            return None
        rel = path.lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())):
            return None
        if not target.is_file():
            return None
        ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        return target.read_bytes(), ctype

    # -- server lifecycle -------------------------------------------------

    def make_server(self, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
        service = self

        class Handler(_RequestHandler):
            pass

        Handler.service = service
        server = ThreadingHTTPServer((host, port), Handler)
        self._server = server
        return server

    def serve_forever(self, host: str = "127.0.0.1", port: int = 8799) -> None:
        self.make_server(host, port).serve_forever()

    def close(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None
        self._store_fh.close()


class _RequestHandler(BaseHTTPRequestHandler):
    service: AnnotationService

    def log_message(self, fmt, *args):  # keep test output quiet
        pass

    def _send_json(self, status: int, doc) -> None:
        body = json.dumps(doc, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_bytes(self, body: bytes, ctype: str, status: int = 200) -> None:
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        url = urlparse(self.path)
        path = url.path
        if path == "/api/taxonomy":
            doc = self.service.taxonomy_doc
            if doc is None:
                self._send_json(500, {"error": "taxonomy source document unavailable"})
                return
            self._send_json(200, doc)
            return
        if path == "/api/tasks/next":
            task = self.service.next_task()
            if task is None:
                self.send_response(204)
                self.send_header("Content-Length", "0")
                self.end_headers()
                return
            self._send_json(200, task)
            return
        if path.startswith("/api/images/"):
            image_id = unquote(path[len("/api/images/") :])
            found = self.service.image_bytes(image_id)
            if found is None:
                self._send_json(404, {"error": f"unknown image {image_id!r}"})
                return
            self._send_bytes(*found)
            return
        if path == "/api/annotations":
            query = parse_qs(url.query)
            image_id = query.get("image_id", [None])[0]
            self._send_json(200, self.service.annotations(image_id))
            return
        if path == "/api/progress":
            self._send_json(200, self.service.progress())
            return
        if path.startswith("/api/"):
            self._send_json(404, {"error": f"no such endpoint {path!r}"})
            return
        found = self.service.ui_file(path)
        if found is not None:
            self._send_bytes(*found)
            return
        if path in ("/", "/index.html"):
            self._send_bytes(_FALLBACK_INDEX, "text/html; charset=utf-8")
            return
        self._send_json(404, {"error": "not found"})

    def do_POST(self):
        url = urlparse(self.path)
        if url.path != "/api/annotations":
            self._send_json(404, {"error": f"no such endpoint {url.path!r}"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            doc = json.loads(self.rfile.read(length).decode("utf-8"))
        except (ValueError, json.JSONDecodeError) as exc:
            self._send_json(400, {"error": f"bad request body: {exc}"})
            return
        status, body = self.service.submit(doc)
        self._send_json(status, body)


def export_store(
    store_path: str | Path, out_path: str | Path, tax: Taxonomy | None = None
) -> int:
    """Write stored annotations as a datastore-compatible JSON Lines library.

    One line per done image (the latest record wins when an image was
    re-annotated); corrupt store lines are reported to stderr by line
    number and skipped. Returns the number of exported annotations.
    """
    store_path = Path(store_path)
    latest: dict[str, dict] = {}
    if store_path.exists():
        with open(store_path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    image_id = record["image_id"]
                    ann_doc = dict(record["annotation"])
                    ann_doc.setdefault("style_id", image_id)
                    ann = HairstyleAnnotation.from_dict(ann_doc)
                except (json.JSONDecodeError, KeyError, TypeError, AnnotationError) as exc:
                    print(
                        f"warning: {store_path}: line {lineno}: "
                        f"skipping corrupt record ({exc})",
                        file=sys.stderr,
                    )
                    continue
                if tax is not None and validate_annotation(tax, ann):
                    print(
                        f"warning: {store_path}: line {lineno}: "
                        f"skipping record with rule violations",
                        file=sys.stderr,
                    )
                    continue
                latest[image_id] = ann.to_dict()
    with open(out_path, "w", encoding="utf-8") as fh:
        for image_id in sorted(latest):
            fh.write(json.dumps(latest[image_id], ensure_ascii=False) + "\n")
    return len(latest)
