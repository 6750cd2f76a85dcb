"""Validates CLI reports for every method against the sweep report schema."""

import argparse
import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--cli", required=True)
    parser.add_argument("--schema", required=True)
    parser.add_argument("--work", required=True)
    args = parser.parse_args()

    work = pathlib.Path(args.work)
    shutil.rmtree(work, ignore_errors=True)
    schema = json.loads(pathlib.Path(args.schema).read_text())
    validator = jsonschema.Draft202012Validator(schema)

    runs = [
        ["sweep", "--method", "son", "--samples", "5", "--lambdas", "0.5,5,50"],
        ["sweep", "--method", "lp", "--samples", "5", "--lambdas", "0.5:50:3", "--warm-start"],
        ["sweep", "--method", "linf", "--samples", "5", "--lambdas", "1,10"],
        ["cluster", "--method", "son", "--lambda", "30", "--max-iterations", "2"],
        ["omt", "--samples", "4"],
    ]
    failures = 0
    for k, run in enumerate(runs):
        out = work / str(k)
        proc = subprocess.run([args.cli, *run, "--out", str(out)], capture_output=True, text=True)
        if proc.returncode not in (0, 1):
            print(f"{run}: exit {proc.returncode}\n{proc.stderr}")
            failures += 1
            continue
        for report in sorted(out.glob("sweep-*.json")):
            errors = list(validator.iter_errors(json.loads(report.read_text())))
            for error in errors:
                print(f"{report}: {error.json_path}: {error.message}")
            failures += len(errors)
            print(f"{report}: {'ok' if not errors else 'invalid'}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
