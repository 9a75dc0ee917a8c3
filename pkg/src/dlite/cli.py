"""Command line front end.

Subcommands: ``study`` (scenario table with CSV output), ``closed-form``
(exact line formulas), ``load`` (per-level forwarding experiment),
``topology`` (dump one random tree) and ``serve`` (HTTP gateway).
"""

from __future__ import annotations

import argparse
import sys

from . import analysis, gateway, netsim


def _add_tree_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=100, help="number of placed nodes (sink included)")
    p.add_argument("--th-max", type=int, default=4, help="maximum node depth")
    p.add_argument("--in-max", type=int, default=3, help="router children per parent")
    p.add_argument("--n-max", type=int, default=10, help="children per parent")
    p.add_argument("--radius", type=float, default=None,
                   help="radio range as a fraction of the square (default: calibrated)")
    p.add_argument("--seed", type=int, default=0)


def _resolve_radius(args) -> float:
    if args.radius is not None:
        return args.radius
    return analysis.calibrate_radius(args.n, args.th_max, args.in_max, args.n_max, seed=args.seed)


def _cmd_study(args) -> int:
    scenarios = analysis.DEFAULT_SCENARIOS
    if args.scenario:
        byname = {s.name: s for s in analysis.DEFAULT_SCENARIOS}
        missing = [name for name in args.scenario if name not in byname]
        if missing:
            print(f"unknown scenario(s): {', '.join(missing)}", file=sys.stderr)
            return 2
        scenarios = tuple(byname[name] for name in args.scenario)
    config = analysis.StudyConfig(
        n=args.n, runs=args.runs, seed=args.seed, scenarios=scenarios, radius=args.radius
    )
    report = analysis.run_study(config)
    out = analysis.emit_csv(report, args.out)
    for r in report.results:
        print(f"{r.name}: orchestration {r.orch_mean:.2f} hops, "
              f"choreography {r.chor_mean:.2f} hops, ratio {r.ratio_pct}% "
              f"(radius {r.radius}, {r.runs} runs)")
    for note in report.notes:
        print(f"note: {note}", file=sys.stderr)
    print(f"wrote {out}")
    completed = {r.name for r in report.results}
    return 0 if all(sc.name in completed for sc in scenarios) else 1


def _cmd_closed_form(args) -> int:
    if args.n < 2:
        print("--n must be >= 2", file=sys.stderr)
        return 2
    orch = analysis.mu_orchestration(args.n)
    chor = analysis.mu_choreography(args.n)
    lines = [
        "n,orch_mean,chor_mean,ratio_pct",
        f"{args.n},{float(orch)},{round(float(chor), 4)},{round(float(100 * chor / orch), 2)}",
    ]
    text = "\n".join(lines) + "\n"
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_load(args) -> int:
    radius = _resolve_radius(args)
    params = netsim.TopologyParams(
        n=args.n, radius=radius, th_max=args.th_max,
        in_max=args.in_max, n_max=args.n_max, seed=args.seed,
    )
    topo = netsim.build_tree(params)
    pairs = args.pairs if args.pairs else int(topo.endpoint_ids().size)
    designs = list(netsim.DESIGNS) if args.design == "both" else [args.design]
    lines = ["design,sent,delivered,dropped,pdr,top_level_forwards,per_level"]
    for design in designs:
        rep = netsim.run_load_experiment(
            topo, design, pairs, args.messages, args.capacity, seed=args.seed
        )
        levels = "|".join(f"{level}:{count}" for level, count in rep.per_level.items())
        lines.append(f"{design},{rep.sent},{rep.delivered},{rep.dropped},"
                     f"{round(rep.pdr, 4)},{rep.top_level_activity},{levels}")
    text = "\n".join(lines) + "\n"
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_topology(args) -> int:
    radius = _resolve_radius(args)
    params = netsim.TopologyParams(
        n=args.n, radius=radius, th_max=args.th_max,
        in_max=args.in_max, n_max=args.n_max, seed=args.seed,
    )
    topo = netsim.build_tree(params)
    text = netsim.dump_edge_list(topo)
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out} ({int(topo.attached.sum())}/{args.n} nodes attached)")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_serve(args) -> int:
    host, _, port = args.listen.partition(":")
    gateway.serve(host or "127.0.0.1", int(port or 8080),
                  tick_rate=args.tick_rate, buffer_size=args.buffer_size)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="dlite")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("study", help="compare designs over the scenario table")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--scenario", action="append", default=None,
                   help="restrict to a named scenario (repeatable)")
    p.add_argument("--out", default="study.csv")
    p.set_defaults(func=_cmd_study)

    p = sub.add_parser("closed-form", help="exact line-topology formulas")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_closed_form)

    p = sub.add_parser("load", help="per-level forwarding and delivery ratio")
    _add_tree_flags(p)
    p.add_argument("--pairs", type=int, default=0, help="random pairs (default: one per node)")
    p.add_argument("--messages", type=int, default=30, help="messages per pair")
    p.add_argument("--capacity", type=int, default=8, help="forwards per node per round")
    p.add_argument("--design", choices=[*netsim.DESIGNS, "both"], default="both")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_load)

    p = sub.add_parser("topology", help="dump one tree as 'child parent depth x y'")
    _add_tree_flags(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_topology)

    p = sub.add_parser("serve", help="run the HTTP gateway")
    p.add_argument("--listen", default="127.0.0.1:8080")
    p.add_argument("--tick-rate", type=float, default=gateway.DEFAULT_TICK_RATE,
                   help="timer ticks per second (0 disables the clock)")
    p.add_argument("--buffer-size", type=int, default=gateway.EVENT_BUFFER_SIZE)
    p.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
