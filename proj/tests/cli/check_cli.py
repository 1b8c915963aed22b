#!/usr/bin/env python3
"""Black-box checks of the eval3d CLI: determinism, report schema, artifacts."""

import argparse
import json
import os
import shutil
import subprocess
import sys

import jsonschema

failures = []


def check(ok, what):
    print(("ok   " if ok else "FAIL ") + what)
    if not ok:
        failures.append(what)


def run(cli, *args):
    return subprocess.run([cli, *args], capture_output=True, text=True)


def load(path):
    with open(path) as f:
        return json.load(f)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--cli", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--work", required=True)
    a = p.parse_args()

    shutil.rmtree(a.work, ignore_errors=True)
    os.makedirs(a.work)
    schema = load(a.schema)
    config = os.path.join(a.data, "stub_run.json")

    reports = []
    for i in range(2):
        out = os.path.join(a.work, f"run{i}")
        r = run(a.cli, "run", "--config", config, "--stub-all", "--out", out)
        check(r.returncode == 0, f"run {i} exits 0 (got {r.returncode}: {r.stderr.strip()})")
        reports.append(load(os.path.join(out, "report.json")))

    stripped = [{k: v for k, v in rep.items() if k != "timings"} for rep in reports]
    check(stripped[0] == stripped[1], "reports identical apart from timings")
    check(reports[0]["status"] == "complete", "status complete")
    for name in ("geo", "sem", "struct", "align", "aes"):
        slot = reports[0]["metrics"][name]
        check(isinstance(slot, dict) and 0 <= slot["value"] <= 100, f"{name} scored")

    for i, rep in enumerate(reports):
        try:
            jsonschema.validate(rep, schema)
            check(True, f"report {i} matches schema")
        except jsonschema.ValidationError as e:
            check(False, f"report {i} matches schema: {e.message}")

    out = os.path.join(a.work, "run0")
    for art in reports[0]["artifacts"]:
        path = os.path.join(out, art["path"])
        check(os.path.isfile(path) and os.path.getsize(path) == art["bytes"],
              f"artifact {art['path']} present with listed size")
    listed = {art["path"] for art in reports[0]["artifacts"]}
    for required in ("rig.json", "heatmaps/geo_mean.ply", "heatmaps/sem_variance.ply",
                     "summary/normals.png"):
        check(required in listed, f"inventory lists {required}")

    # A missing backend skips only its metric and exits 2.
    cfg = load(config)
    cfg["mesh"] = os.path.abspath(os.path.join(a.data, cfg["mesh"]))
    cfg["allow_proxy_rgb"] = True
    cfg["metrics"] = {"sem": {"delta_dino": 0.01}}
    cfg["backends"] = {k: "stub" for k in ("features", "nvs", "perceptual", "qagen",
                                           "vqa", "aesthetic")}
    partial_cfg = os.path.join(a.work, "partial.json")
    with open(partial_cfg, "w") as f:
        json.dump(cfg, f)
    out = os.path.join(a.work, "partial")
    r = run(a.cli, "run", "--config", partial_cfg, "--out", out)
    rep = load(os.path.join(out, "report.json"))
    check(r.returncode == 2, f"missing depth backend exits 2 (got {r.returncode})")
    check(rep["metrics"]["geo"] == "skipped: no depth backend", "geo slot names the backend")
    check(rep["status"] == "partial", "status partial")
    jsonschema.validate(rep, schema)

    # A missing mesh is fatal but still leaves a report.
    cfg["mesh"] = os.path.abspath(os.path.join(a.work, "absent.obj"))
    with open(partial_cfg, "w") as f:
        json.dump(cfg, f)
    out = os.path.join(a.work, "failed")
    r = run(a.cli, "run", "--config", partial_cfg, "--out", out)
    check(r.returncode == 1, f"missing mesh exits 1 (got {r.returncode})")
    rep = load(os.path.join(out, "report.json"))
    check(rep["status"] == "failed", "status failed")
    jsonschema.validate(rep, schema)

    r = run(a.cli, "bench", "agreement", "--scores", os.path.join(a.data, "scores.jsonl"),
            "--annotations", os.path.join(a.data, "annotations.jsonl"))
    check(r.returncode == 0, "bench agreement exits 0")
    agreement = json.loads(r.stdout)
    check(abs(agreement["geo"]["agreement"] - 66.7) < 0.05, "pairwise agreement 66.7")
    check(agreement["struct"]["fixed_threshold"] == 75.8, "struct operating point 75.8")

    r = run(a.cli, "bench", "prompts", "--prompts", os.path.join(a.data, "prompts.jsonl"))
    check(r.returncode == 0 and "1 single-object, 1 multi-object" in r.stdout,
          "bench prompts counts categories")

    r = run(a.cli, "run", "--config", os.path.join(a.work, "nope.json"))
    check(r.returncode == 1 and "error" in r.stderr, "unreadable config exits 1")

    print(f"{len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
