"""Annotation service: endpoints, leases, durability, and export."""

import base64
import json
import threading
import time

import pytest
import requests

from hairmony.service import AnnotationService, export_store
from hairmony.taxonomy import (
    HairstyleAnnotation,
    read_annotations,
    validate_annotation,
)

from helpers import build_annotation

# 1x1 transparent PNG
PNG_BYTES = base64.b64decode(
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR42mNk"
    "YPhfDwAChwGA60e6kgAAAABJRU5ErkJggg=="
)


@pytest.fixture
def image_dir(tmp_path):
    d = tmp_path / "images"
    d.mkdir()
    for i in range(3):
        (d / f"face_{i}.png").write_bytes(PNG_BYTES)
    return d


@pytest.fixture
def running(image_dir, tmp_path, repo_root):
    service = AnnotationService(
        image_dir=image_dir,
        taxonomy_path=repo_root / "data" / "taxonomy.v1.json",
        store_path=tmp_path / "store.jsonl",
        lease_seconds=600.0,
    )
    server = service.make_server(port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    yield service, base, tmp_path / "store.jsonl"
    service.close()
    thread.join(timeout=5)


def valid_payload(tax, image_id, **kwargs):
    ann = build_annotation(tax, image_id, **kwargs)
    doc = ann.to_dict()
    doc.pop("style_id")
    return {"image_id": image_id, "annotator_id": "tester", "annotation": doc}


class TestEndpoints:
    def test_taxonomy_roundtrip(self, running, repo_root):
        _, base, _ = running
        got = requests.get(f"{base}/api/taxonomy", timeout=5).json()
        expected = json.loads((repo_root / "data" / "taxonomy.v1.json").read_text())
        assert got == expected

    def test_image_bytes_and_content_type(self, running):
        _, base, _ = running
        resp = requests.get(f"{base}/api/images/face_0.png", timeout=5)
        assert resp.status_code == 200
        assert resp.headers["Content-Type"] == "image/png"
        assert resp.content == PNG_BYTES

    def test_unknown_image_404(self, running):
        _, base, _ = running
        assert requests.get(f"{base}/api/images/ghost.png", timeout=5).status_code == 404

    def test_progress_counts(self, running, tax):
        _, base, _ = running
        assert requests.get(f"{base}/api/progress", timeout=5).json() == {
            "total": 3,
            "done": 0,
            "pending": 3,
        }
        requests.post(
            f"{base}/api/annotations", json=valid_payload(tax, "face_1.png"), timeout=5
        ).raise_for_status()
        assert requests.get(f"{base}/api/progress", timeout=5).json() == {
            "total": 3,
            "done": 1,
            "pending": 2,
        }

    def test_fallback_index_page(self, running):
        _, base, _ = running
        resp = requests.get(base + "/", timeout=5)
        assert resp.status_code == 200
        assert "annotation service" in resp.text


class TestTasks:
    def test_lease_prevents_double_assignment(self, running):
        _, base, _ = running
        first = requests.get(f"{base}/api/tasks/next", timeout=5).json()
        second = requests.get(f"{base}/api/tasks/next", timeout=5).json()
        assert first["image_id"] != second["image_id"]
        assert first["image_url"].startswith("/api/images/")

    def test_expired_lease_requeues(self, image_dir, tmp_path, repo_root):
        service = AnnotationService(
            image_dir=image_dir,
            taxonomy_path=repo_root / "data" / "taxonomy.v1.json",
            store_path=tmp_path / "s.jsonl",
            lease_seconds=0.05,
        )
        first = service.next_task()["image_id"]
        time.sleep(0.08)
        again = service.next_task()["image_id"]
        assert first == again
        service.close()

    def test_all_done_returns_204(self, running, tax):
        _, base, _ = running
        for i in range(3):
            resp = requests.post(
                f"{base}/api/annotations",
                json=valid_payload(tax, f"face_{i}.png"),
                timeout=5,
            )
            assert resp.status_code == 201
        assert requests.get(f"{base}/api/tasks/next", timeout=5).status_code == 204

    def test_concurrent_next_unique(self, running):
        _, base, _ = running
        results = []

        def grab():
            resp = requests.get(f"{base}/api/tasks/next", timeout=5)
            if resp.status_code == 200:
                results.append(resp.json()["image_id"])

        threads = [threading.Thread(target=grab) for _ in range(3)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(results) == len(set(results)) == 3


class TestSubmission:
    def test_valid_annotation_stored_before_ack(self, running, tax):
        _, base, store_path = running
        resp = requests.post(
            f"{base}/api/annotations", json=valid_payload(tax, "face_0.png"), timeout=5
        )
        assert resp.status_code == 201
        lines = store_path.read_text().strip().splitlines()
        assert len(lines) == 1
        record = json.loads(lines[0])
        assert record["image_id"] == "face_0.png"
        assert record["annotator_id"] == "tester"

    def test_inconsistent_annotation_422_with_violations(self, running, tax):
        _, base, store_path = running
        payload = valid_payload(
            tax, "face_0.png", global_mods={"Bangs Length": "To eyebrows (~10cm)"}
        )
        resp = requests.post(f"{base}/api/annotations", json=payload, timeout=5)
        assert resp.status_code == 422
        violations = resp.json()["violations"]
        assert violations[0]["rule_id"] == "BANGS-LEN"
        assert store_path.read_text() == ""  # nothing persisted

    def test_unknown_attribute_400(self, running, tax):
        _, base, _ = running
        payload = valid_payload(tax, "face_0.png")
        payload["annotation"]["global"]["Mystery"] = "Yes"
        resp = requests.post(f"{base}/api/annotations", json=payload, timeout=5)
        assert resp.status_code == 400

    def test_unknown_image_404(self, running, tax):
        _, base, _ = running
        payload = valid_payload(tax, "ghost.png")
        assert (
            requests.post(f"{base}/api/annotations", json=payload, timeout=5).status_code
            == 404
        )

    def test_get_annotations_by_image(self, running, tax):
        _, base, _ = running
        requests.post(
            f"{base}/api/annotations", json=valid_payload(tax, "face_2.png"), timeout=5
        ).raise_for_status()
        got = requests.get(
            f"{base}/api/annotations", params={"image_id": "face_2.png"}, timeout=5
        ).json()
        assert len(got) == 1
        assert got[0]["image_id"] == "face_2.png"
        everything = requests.get(f"{base}/api/annotations", timeout=5).json()
        assert len(everything) == 1


class TestDurability:
    def test_restart_replays_store(self, image_dir, tmp_path, repo_root, tax):
        store = tmp_path / "store.jsonl"
        service = AnnotationService(
            image_dir=image_dir,
            taxonomy_path=repo_root / "data" / "taxonomy.v1.json",
            store_path=store,
        )
        status, _ = service.submit(valid_payload(tax, "face_0.png"))
        assert status == 201
        service.close()

        reborn = AnnotationService(
            image_dir=image_dir,
            taxonomy_path=repo_root / "data" / "taxonomy.v1.json",
            store_path=store,
        )
        assert reborn.progress() == {"total": 3, "done": 1, "pending": 2}
        assert reborn.next_task()["image_id"] != "face_0.png"
        reborn.close()

    def test_corrupt_line_skipped_with_warning(
        self, image_dir, tmp_path, repo_root, tax, capsys
    ):
        store = tmp_path / "store.jsonl"
        service = AnnotationService(
            image_dir=image_dir,
            taxonomy_path=repo_root / "data" / "taxonomy.v1.json",
            store_path=store,
        )
        service.submit(valid_payload(tax, "face_0.png"))
        service.submit(valid_payload(tax, "face_1.png"))
        service.close()
        lines = store.read_text().splitlines()
        lines.insert(1, "{broken json")
        store.write_text("\n".join(lines) + "\n")

        out = tmp_path / "export.jsonl"
        count = export_store(store, out, tax)
        err = capsys.readouterr().err
        assert count == 2
        assert "line 2" in err

        exported = read_annotations(out)
        assert set(exported) == {"face_0.png", "face_1.png"}
        for ann in exported.values():
            assert validate_annotation(tax, ann) == []

    def test_export_empty_store(self, tmp_path, tax):
        out = tmp_path / "export.jsonl"
        assert export_store(tmp_path / "missing.jsonl", out, tax) == 0
        assert out.read_text() == ""

    def test_export_latest_record_wins(self, image_dir, tmp_path, repo_root, tax):
        store = tmp_path / "store.jsonl"
        service = AnnotationService(
            image_dir=image_dir,
            taxonomy_path=repo_root / "data" / "taxonomy.v1.json",
            store_path=store,
        )
        service.submit(valid_payload(tax, "face_0.png"))
        service.submit(
            valid_payload(
                tax, "face_0.png", all_region_mods={"Hair Type": "Coily"}
            )
        )
        service.close()
        out = tmp_path / "export.jsonl"
        assert export_store(store, out, tax) == 1
        ann = read_annotations(out)["face_0.png"]
        assert ann.regional_values["Front"]["Hair Type"] == "Coily"


class TestStaticUI:
    def test_serves_built_ui(self, image_dir, tmp_path, repo_root):
        ui = tmp_path / "dist"
        ui.mkdir()
        (ui / "index.html").write_text("<html><body>labeler</body></html>")
        (ui / "app.js").write_text("console.log('hi')")
        service = AnnotationService(
            image_dir=image_dir,
            taxonomy_path=repo_root / "data" / "taxonomy.v1.json",
            store_path=tmp_path / "s.jsonl",
            ui_dir=ui,
        )
        server = service.make_server(port=0)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        base = f"http://127.0.0.1:{server.server_address[1]}"
        assert "labeler" in requests.get(base + "/", timeout=5).text
        assert "console" in requests.get(base + "/app.js", timeout=5).text
        assert requests.get(base + "/../secrets", timeout=5).status_code in (400, 404)
        service.close()
        thread.join(timeout=5)
