#!/usr/bin/env python3
# The scenario table: star and line as analytic extremes, four random-tree
# shapes in between. A reduced-run rendition of the full study (see the
# acceptance suite or `dlite study` for the 1000-run version).

from dlite import StudyConfig, emit_csv, run_study

config = StudyConfig(n=100, runs=150, seed=0)
report = run_study(config)

print(f"{'scenario':<8} {'radius':>6} {'orch':>7} {'chor':>7} {'ratio':>6} {'runs':>5}")
for r in report.results:
    print(f"{r.name:<8} {r.radius:>6} {r.orch_mean:>7.2f} {r.chor_mean:>7.2f} "
          f"{r.ratio_pct:>5}% {r.runs:>5}")
for note in report.notes:
    print(f"note: {note}")

out = emit_csv(report, "study-demo.csv")
print(f"\nwrote {out} (+ one histogram file per scenario)")
