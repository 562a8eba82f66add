# %% [markdown]
# # The command line
#
# Every capability is also reachable as `freetime <command> --problem file.json`.
# Reports are canonical JSON (byte-identical across runs with the same seed);
# the exit code is 0 on success, 1 on usage errors, 2 on numerical failure
# and 3 when a verification check fails.  Here the commands run in-process
# on the bundled two-body problem.

# %%
import json
import tempfile
from contextlib import redirect_stdout
from importlib import resources
from io import StringIO

from freetime.cli import run_command

problem = str(resources.files("freetime").joinpath("data/two_body_homothetic.json"))


def run(*argv):
    buf = StringIO()
    with redirect_stdout(buf):
        code = run_command(list(argv))
    text = buf.getvalue()
    return code, json.loads(text) if text.startswith("{") else text


# %%
code, rep = run("free-minimize", "--problem", problem, "--from", "start", "--to", "end")
print("free-minimize exit", code, "phi", rep["outputs"]["phi"], "tau*", rep["outputs"]["tau_star"])

code, rep = run("central-config", "--problem", problem)
print("central-config exit", code, "U0", rep["outputs"]["U0"])

code, rep = run("diagnose", "--problem", problem, "--from", "start")
print("diagnose exit", code, "I exponent", rep["outputs"]["fit_I"]["exponent"])

code, csv = run("diagnose", "--problem", problem, "--from", "start", "--format", "csv")
print("first CSV lines:", *csv.splitlines()[:3], sep="\n  ")

# %%
with tempfile.TemporaryDirectory() as d:
    out = f"{d}/report.json"
    run_command(["phi", "--problem", problem, "--from", "start", "--to", "end",
                 "--nodes", "96", "--out", out])
    first = open(out, "rb").read()
    run_command(["phi", "--problem", problem, "--from", "start", "--to", "end",
                 "--nodes", "96", "--out", out])
    print("identical reports:", first == open(out, "rb").read())
