"""Runs the CLI on small inputs and validates every emitted JSON document
against the schemas in schemas/. Also checks byte-identical reruns and
independence of experiment outputs from --jobs."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

SCHEMAS = pathlib.Path(__file__).resolve().parent.parent / "schemas"


def registry():
    resources = []
    for path in SCHEMAS.glob("*.schema.json"):
        doc = json.loads(path.read_text())
        resources.append((doc["$id"], Resource.from_contents(doc)))
    return Registry().with_resources(resources)


REG = registry()


def validate(doc, name):
    schema = json.loads((SCHEMAS / f"{name}.schema.json").read_text())
    jsonschema.Draft202012Validator(schema, registry=REG).validate(doc)


def run(cli, *args, expect=(0,)):
    proc = subprocess.run([cli, *args], capture_output=True, text=True)
    if proc.returncode not in expect:
        sys.exit(f"{' '.join(args)} exited {proc.returncode}: {proc.stderr}")
    return proc


def main(cli):
    tmp = pathlib.Path(tempfile.mkdtemp())
    failures = 0

    def check(label, doc, schema):
        nonlocal failures
        try:
            validate(doc, schema)
            print(f"ok   {label}")
        except jsonschema.ValidationError as e:
            failures += 1
            print(f"FAIL {label}: {e.message}")

    op = tmp / "h.json"
    run(cli, "--seed", "7", "--out", str(op), "gen", "--class", "k_local", "--n", "4", "--k", "2")
    check("operator", json.loads(op.read_text()), "operator.v1")
    ti = tmp / "ti.json"
    run(cli, "--seed", "3", "--out", str(ti), "gen", "--class", "ti_chain_periodic", "--n", "4")
    check("operator ti", json.loads(ti.read_text()), "operator.v1")

    check("spectrum", json.loads(run(cli, "spectrum", str(op)).stdout), "spectrum.v1")
    check("cert", json.loads(run(cli, "cert", str(op), expect=(0, 1, 2)).stdout), "cert.v1")
    check("equiv", json.loads(run(cli, "equiv", str(op), str(op)).stdout), "equiv.v1")
    search = run(cli, "--seed", "1", "search", str(ti), "--space", "ti_chain_gauge_fixed", "--starts", "2",
                 expect=(0, 1, 2))
    check("search", json.loads(search.stdout), "search.v1")

    for exp in ("lemma_check", "statement3"):
        cfg = tmp / f"{exp}.json"
        body = {"experiment": exp, "seed": 5}
        if exp == "lemma_check":
            body["n"] = 3
        else:
            body.update({"n": 4, "trials": 2, "starts": 1})
        cfg.write_text(json.dumps(body))
        outs = []
        for jobs in ("1", "2", "1"):
            out = tmp / f"{exp}-{len(outs)}"
            run(cli, "--jobs", jobs, "--out", str(out), "experiment", str(cfg), expect=(0, 1))
            outs.append(out)
        for name, schema in (("summary", "summary.v1"), ("trials", "trials.v1"), ("timing", "timing.v1")):
            check(f"{exp} {name}", json.loads((outs[0] / f"{name}.json").read_text()), schema)
        check(f"{exp} config", json.loads(json.dumps({**body, "format": "tps-spectra/experiment.v1"})), "experiment.v1")
        for name in ("summary.json", "trials.json"):
            texts = {(o / name).read_bytes() for o in outs}
            if len(texts) == 1:
                print(f"ok   {exp} {name} identical across reruns and --jobs")
            else:
                failures += 1
                print(f"FAIL {exp} {name} differs across reruns or --jobs")

    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main(sys.argv[1])
