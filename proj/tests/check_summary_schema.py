"""Runs the CLI on the bundled configs and validates every summary it writes."""

import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema


def main() -> int:
    cli, source, work = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    schema = json.loads((source / "schemas" / "summary.schema.json").read_text())
    shutil.rmtree(work, ignore_errors=True)

    checked = 0
    for config in ("two_device.json", "high_variance.json"):
        out = work / config.removesuffix(".json")
        subprocess.run([cli, "simulate", "--config", str(source / "configs" / config),
                        "--out", str(out)], check=True, stdout=subprocess.DEVNULL)
        for summary in sorted(out.glob("*_summary.json")):
            doc = json.loads(summary.read_text())
            jsonschema.validate(doc, schema)
            if doc["survived"] != (doc["failure_time_h"] is None):
                raise AssertionError(f"{summary}: survived disagrees with failure_time_h")
            checked += 1

    bad = subprocess.run([cli, "compare", "--config", str(source / "configs" / "two_device.json"),
                          "--policy", "op", "--out", str(work / "bad")],
                         stdout=subprocess.DEVNULL, stderr=subprocess.PIPE, text=True)
    if bad.returncode != 2 or "error" not in bad.stderr:
        raise AssertionError("single-policy compare must exit with a usage error")

    print(f"{checked} summaries valid")
    return 0 if checked == 6 else 1


if __name__ == "__main__":
    sys.exit(main())
