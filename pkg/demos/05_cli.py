# Driving the command line tool from a script
#
# Every subcommand reads JSON and writes JSON; the exit code says whether the
# input was bad (2), the request made no sense (1) or a check failed (3).

import json
import subprocess
import sys


def blform(*args, data=None):
    cmd = [sys.executable, "-m", "blform.cli", *args]
    if data is not None:
        cmd += ["-j", json.dumps(data)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr.strip()


code, out, _ = blform("membership", data={"family": 1, "theta": ["1/2"] * 6})
print(code, out)

code, out, _ = blform("flats", data={"matroid": {"vectors": [[1, 0], [0, 1], [1, 1]]}})
print(code, json.loads(out)["count"], "flats")

code, out, _ = blform("family-verify", "--n", "2", "--delta", "1/10")
print(code, "violations:", json.loads(out)["p_delta"]["violations"])

code, out, err = blform("membership", data={"family": 1, "theta": ["1/2"] * 5})
print(code, err)

code, out, err = blform("bases", data={"matroid": {"vectors": [[1, 0], [2, 0]]}})
print(code, err)

code, out, _ = blform("estimate", "--samples", "200000", data={"n": 0, "t": {"kind": "disk", "radius": 1}, "q": [{"kind": "disk", "radius": 1}]})
print(code, json.loads(out)["value"])
