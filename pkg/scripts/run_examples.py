"""Run every example configuration through the CLI and collect the outputs.

Usage: python scripts/run_examples.py [--out results] [--threads 4] [--trials N]
"""

import argparse
import json
import pathlib
import sys
import tempfile

from lshaped_doa.harness.cli import main as cli_main

HERE = pathlib.Path(__file__).parent
COMMANDS = {
    "example1_iterations": "sweep-iterations",
    "example2_mu": "sweep-mu",
    "example3_grid": "grid-dof",
    "example4_rmse_vs_snr": "sweep-snr",
    "example5_resolution": "resolution",
    "crb_table": "crb",
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--trials", type=int, help="override the trial count (quick looks)")
    parser.add_argument("--only", nargs="*", choices=sorted(COMMANDS))
    args = parser.parse_args()
    status = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name in args.only or COMMANDS:
            config = HERE / "configs" / f"{name}.json"
            if args.trials:
                data = json.loads(config.read_text())
                data["trials"] = args.trials
                config = pathlib.Path(tmp) / config.name
                config.write_text(json.dumps(data))
            print(f"== {name}", flush=True)
            rc = cli_main([COMMANDS[name], "--config", str(config), "--out", args.out,
                           "--threads", str(args.threads)])
            status = status or rc
    rc = cli_main(["dof-table", "--out", args.out])
    return status or rc


if __name__ == "__main__":
    sys.exit(main())
