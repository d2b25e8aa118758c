"""Run the acceptance suite and write a JSON summary next to the console report."""
import argparse
import json
from pathlib import Path

from cpstar import acceptance


def main() -> None:
    p = argparse.ArgumentParser()
    p.add_argument("--level", choices=["quick", "full"], default="full")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", type=int, nargs="+")
    p.add_argument("--json", type=Path, default=None)
    args = p.parse_args()
    results = acceptance.run_all(args.level, args.seed, args.only)
    for r in results:
        print(r.line())
    if args.json:
        args.json.write_text(json.dumps([{"criterion": r.number, "title": r.title, "passed": r.passed,
                                          "seconds": r.seconds, "details": r.details}
                                         for r in results], indent=2, default=str))
    raise SystemExit(0 if all(r.passed for r in results) else 1)


if __name__ == "__main__":
    main()
