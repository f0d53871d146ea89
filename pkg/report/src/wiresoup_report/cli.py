"""wiresoup-report: render figures from a report specification file."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import ReportSpec, render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="wiresoup-report")
    ap.add_argument("--spec", required=True, help="path to report.json")
    args = ap.parse_args(argv)
    spec_path = Path(args.spec)
    try:
        spec = ReportSpec.from_json(spec_path.read_text(), base=spec_path.parent)
        manifest = render(spec)
    except (ValueError, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return 2
    print(f"wrote {len(manifest['written'])} files to {spec.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
