#!/usr/bin/env python3
"""Exercise the annotation service end to end on a throwaway fixture.

Starts the HTTP service on a random port, labels two images through the
REST API (one submission is rejected for inconsistency), then exports the
store as a datastore-compatible library.

Run from the repo root: python3 demos/05_annotation_service.py
"""

import base64
import json
import tempfile
import threading
from pathlib import Path
from urllib.request import Request, urlopen
from urllib.error import HTTPError

from hairmony.service import AnnotationService, export_store
from hairmony.taxonomy import load_canonical_taxonomy, read_annotations

PNG = base64.b64decode(
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR42mNk"
    "YPhfDwAChwGA60e6kgAAAABJRUJggg=="
)

root = Path(tempfile.mkdtemp(prefix="hairmony_demo_"))
images = root / "images"
images.mkdir()
for name in ("portrait_a.png", "portrait_b.png"):
    (images / name).write_bytes(PNG)

service = AnnotationService(
    image_dir=images,
    taxonomy_path="data/taxonomy.v1.json",
    store_path=root / "store.jsonl",
)
server = service.make_server(port=0)
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{server.server_address[1]}"
print("service listening at", base)


def call(method, path, body=None):
    data = json.dumps(body).encode() if body is not None else None
    req = Request(base + path, data=data, method=method)
    req.add_header("Content-Type", "application/json")
    with urlopen(req, timeout=5) as resp:
        payload = resp.read()
        return resp.status, json.loads(payload) if payload else None


tax = load_canonical_taxonomy()
schema = call("GET", "/api/taxonomy")[1]
print("taxonomy served:", len(schema["global_attributes"]), "global attributes")

annotation = {
    "global": {
        "Bangs Style": "None",
        "Bangs Length": "N/A",
        "Hair Accessories": "None",
        "Parting Location": "Central",
        "Hairline Shape": "Straight",
        "Hairline Position": "Medium",
        "Hairline Visibility": "Full",
        "Surface Appearance": "Matte",
        "Baby Hair": "No baby hair",
        "Hair Attribute Varies": "No",
    },
    "regions": {
        region: {
            "Hair Type": "Wavy",
            "Strand Styling": "None",
            "Strand Thickness": "N/A",
            "Hair Gathered": "None, not gathered",
            "Hair Direction": "Brushed/flowing down",
            "Hair Length": "Chin length",
            "Layering": "Textured/Layered",
            "Decorative patterns": "None",
        }
        for region in tax.regions
    },
}

while True:
    status, task = call("GET", "/api/tasks/next")
    if status == 204 or task is None:
        break
    image_id = task["image_id"]
    payload = {"image_id": image_id, "annotator_id": "demo", "annotation": annotation}
    if image_id == "portrait_b.png":
        # an inconsistent submission: bangs length without bangs
        bad = json.loads(json.dumps(payload))
        bad["annotation"]["global"]["Bangs Length"] = "To eyebrows (~10cm)"
        try:
            call("POST", "/api/annotations", bad)
        except HTTPError as err:
            violations = json.loads(err.read())["violations"]
            print(f"{image_id}: rejected ({err.code})", violations[0]["rule_id"])
    status, _ = call("POST", "/api/annotations", payload)
    print(f"{image_id}: stored ({status})")

print("progress:", call("GET", "/api/progress")[1])

exported = root / "annotations.jsonl"
count = export_store(root / "store.jsonl", exported, tax)
print(f"exported {count} annotations; re-validated:", list(read_annotations(exported)))

service.close()
