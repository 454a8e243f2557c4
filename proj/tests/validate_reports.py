"""Runs each CLI subcommand and validates its report against docs/report.schema.json."""
import json
import subprocess
import sys

import jsonschema

CASES = [
    ["constants"],
    ["constants", "--H", "0.4", "--d", "2", "--metadata"],
    ["norm"],
    ["norm", "--method", "direct", "--beta", "0.5"],
    ["moments", "--intervals", "0,0.5;0.5,1", "--m", "2,2"],
    ["simulate", "--grid", "64"],
    ["clt-test", "--n", "4", "--grid", "64", "--paths", "40"],
    ["clt-test", "--H", "0.45", "--n", "4", "--grid", "64", "--paths", "20", "--conjecture"],
    ["verify", "--quick", "--metadata"],
]


def main():
    binary, schema_path = sys.argv[1], sys.argv[2]
    with open(schema_path) as fh:
        schema = json.load(fh)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for args in CASES:
        proc = subprocess.run([binary, *args], capture_output=True, text=True)
        label = " ".join(args)
        if proc.returncode not in (0, 1):
            print(f"FAIL {label}: exit {proc.returncode}: {proc.stderr.strip()}")
            failures += 1
            continue
        errors = sorted(validator.iter_errors(json.loads(proc.stdout)), key=str)
        for err in errors:
            print(f"FAIL {label}: {'/'.join(map(str, err.absolute_path))}: {err.message}")
        failures += bool(errors)
        if not errors:
            print(f"ok   {label}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
