"""Reproduce both embedded case studies and write reports + plot data."""
import argparse
import sys

from epiobs.datasets import CASE_STUDIES, run_case_study


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/case_studies")
    parser.add_argument("--only", choices=sorted(CASE_STUDIES), default=None)
    args = parser.parse_args()

    ids = [args.only] if args.only else sorted(CASE_STUDIES)
    all_pass = True
    for case_id in ids:
        report = run_case_study(case_id, out_dir=args.out)
        print(f"\n=== {case_id} ===")
        print(f"theta_hat = {report['theta_hat']}")
        print(f"sse = {report['sse']:.4f}  sigma2 = {report['sigma2_hat']:.5f}"
              f"  cond(FIM) = {report['condition_number']:.4e}")
        for check in report["checks"]:
            print(f"  [{'PASS' if check['passed'] else 'FAIL'}] "
                  f"{check['name']}")
        all_pass &= report["passed"]
    print(f"\noverall: {'PASS' if all_pass else 'FAIL'}")
    return 0 if all_pass else 1


if __name__ == "__main__":
    sys.exit(main())
