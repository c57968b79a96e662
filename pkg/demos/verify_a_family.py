"""
Run one identity family numerically and exactly, then summarize, as the
``mocktheta verify`` command does.

    python3 demos/verify_a_family.py
"""

from fractions import Fraction

from mocktheta.identities import GridSpec, run_suite, suite_summary

grid = GridSpec(m=(Fraction(1, 2), Fraction(3, 2), Fraction(5, 2)))
reports = list(run_suite("LEM35,DOUBLING", grid, samples=5, mode="both"))
for r in reports:
    detail = f"max residual {r.max_residual:.1e}" if r.mode == "numeric" else f"{r.terms} exact terms agree"
    print(f"{r.id:10s} {r.mode:8s} m = {str(r.params['m']):4s} {'pass' if r.passed else 'FAIL'}  {detail}")
print(suite_summary(reports)["identities"])
