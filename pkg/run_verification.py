#!/usr/bin/env python3
"""
Verification runner for the symplectic toolkit.
Runs one JSON scenario (or every preset under backend/data/scenarios).
"""

import sys
from pathlib import Path

# Add the backend directory to the Python path
backend_dir = Path(__file__).parent / 'backend'
sys.path.insert(0, str(backend_dir))


def run_all_presets():
    """Run every scenario preset and print one line per command"""
    from symplectic.cli import execute, load_spec
    from symplectic.errors import SymplecticError

    scenarios = sorted((backend_dir / 'data' / 'scenarios').glob('*.json'))
    failures = 0
    print("SCENARIO PRESETS")
    print("=" * 50)
    for path in scenarios:
        try:
            report = execute(load_spec(str(path)))
            status = "pass" if report.passed else "FAIL"
            failures += not report.passed
            print(f"{path.stem:28}: {status:>4} ({report.wall_time:.1f}s)")
        except SymplecticError as e:
            failures += 1
            print(f"{path.stem:28}: exit {e.exit_code} {e}")
    return 1 if failures else 0


def main():
    """Pass-through to the CLI, or `all` to run the presets"""
    if len(sys.argv) > 1 and sys.argv[1] == 'all':
        return run_all_presets()
    from symplectic.cli import main as cli_main
    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
