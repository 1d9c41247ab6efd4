"""Command-line front end.

Exit codes: 0 success, 2 a guarantee audit failed, 1 usage or I/O error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .approx import (
    FIVE_THIRDS,
    THIRTEEN_EIGHTHS,
    aks_tjoin,
    check_fact_odd_probability,
    check_parameters,
    christofides_tjoin,
)
from .decompose import format_decomposition, verify_decomposition
from .generate import gen_k4, gen_random_metric, with_random_penalties
from .instance import (
    Instance,
    InstanceFormatError,
    fmt_q,
    format_instance,
    metric_completion,
    parse_instance,
    parse_rational,
)
from .lp import solve_lp1
from .narrowcuts import CorrectionFlowError, check_flow_conditions, correction_flows, enumerate_narrow_cuts
from .oracle import OracleLimits, brute_force_lp1, brute_force_opt, enumerate_violated_cuts
from .prizecollect import gen_tight_example, make_pc, solve_pd, verify_pd_guarantees


class UsageError(Exception):
    pass


class AuditFailure(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    alg: str | None = None
    tau: Fraction | None = None
    alpha: Fraction | None = None
    beta: Fraction | None = None
    seed: int | None = None
    limits: OracleLimits = field(default_factory=OracleLimits)
    fmt: str = "text"
    kind: str | None = None
    n: int | None = None
    t: int | None = None
    penalties: bool = False

    def __post_init__(self) -> None:
        if self.alpha is not None or self.beta is not None:
            a = self.alpha if self.alpha is not None else Fraction(1, 5)
            b = self.beta if self.beta is not None else Fraction(2, 5)
            if a + 2 * b < 1:
                raise UsageError("alpha + 2 beta must be at least 1")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tjoin", description="Connected T-join approximation toolkit")
    p.add_argument("--format", dest="fmt", choices=["text", "structured"], default="text")
    p.add_argument("--max-tree-nodes", type=int, default=8)
    p.add_argument("--max-cut-nodes", type=int, default=20)
    p.add_argument("--max-pairing", type=int, default=10)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="run an approximation algorithm")
    s.add_argument("--alg", choices=["five-thirds", "thirteen-eighths"], required=True)
    s.add_argument("--tau", type=_rational)
    s.add_argument("--alpha", type=_rational)
    s.add_argument("--beta", type=_rational)
    s.add_argument("--seed", type=int, help="sample one tree instead of trying all")
    s.add_argument("input")

    s = sub.add_parser("lp", help="solve the relaxation exactly")
    s.add_argument("input")

    s = sub.add_parser("pd", help="prize-collecting primal-dual algorithm")
    s.add_argument("input")

    s = sub.add_parser("certify", help="narrow cuts and correction flows")
    s.add_argument("--tau", type=_rational, default=Fraction(1, 2))
    s.add_argument("input")

    s = sub.add_parser("oracle", help="brute-force optimum")
    s.add_argument("input")

    s = sub.add_parser("audit", help="run every applicable guarantee check")
    s.add_argument("input")

    s = sub.add_parser("gen", help="generate an instance")
    s.add_argument("--kind", choices=["random-metric", "k4", "pd-tight"], required=True)
    s.add_argument("--n", type=int, default=8)
    s.add_argument("--t", type=int, default=4)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--penalties", action="store_true", help="attach seeded random penalties")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    limits = OracleLimits(args.max_tree_nodes, args.max_cut_nodes, args.max_pairing)
    return RunConfig(
        command=args.command,
        input=getattr(args, "input", None),
        alg=getattr(args, "alg", None),
        tau=getattr(args, "tau", None),
        alpha=getattr(args, "alpha", None),
        beta=getattr(args, "beta", None),
        seed=getattr(args, "seed", None),
        limits=limits,
        fmt=args.fmt,
        kind=getattr(args, "kind", None),
        n=getattr(args, "n", None),
        t=getattr(args, "t", None),
        penalties=getattr(args, "penalties", False),
    ), args


class Out:
    """Collects report lines; the text format decorates ratios with a float."""

    def __init__(self, fmt: str) -> None:
        self.fmt = fmt
        self.lines: list[str] = []
        self.failed = False

    def add(self, line: str) -> None:
        if self.fmt == "structured" and " (~" in line:
            line = line.split(" (~")[0]
        self.lines.append(line)

    def extend(self, lines) -> None:
        for line in lines:
            self.add(line)

    def section(self, name: str) -> None:
        self.add(f"section {name}")

    def check(self, name: str, ok: bool | None) -> None:
        if ok is None:
            self.add(f"bound-check {name} skip")
            return
        self.add(f"bound-check {name} {'pass' if ok else 'fail'}")
        if not ok:
            self.failed = True


def _load(path: str) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance(text)


def _metric(inst: Instance, out: Out) -> Instance:
    if inst.is_metric and inst.is_complete():
        return inst
    out.add("note running on the metric completion")
    return metric_completion(inst)


def _params(cfg: RunConfig):
    tau = cfg.tau if cfg.tau is not None else Fraction(1, 2)
    alpha = cfg.alpha if cfg.alpha is not None else Fraction(1, 5)
    beta = cfg.beta if cfg.beta is not None else Fraction(2, 5)
    try:
        return check_parameters(tau, alpha, beta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_solve(cfg: RunConfig, out: Out) -> None:
    inst = _metric(_load(cfg.input), out)
    if cfg.alg == "five-thirds":
        rep = christofides_tjoin(inst, limits=cfg.limits)
        out.extend(rep.report_lines())
        out.check("five-thirds", rep.ratio is not None and rep.ratio <= FIVE_THIRDS)
        out.check("certificate", all(a.ok for a in rep.certificates))
        return
    tau, alpha, beta = _params(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = aks_tjoin(inst, tau, alpha, beta, seed=cfg.seed, limits=cfg.limits)
    out.extend(rep.report_lines())
    bound = THIRTEEN_EIGHTHS if len(inst.terminals) >= 4 else FIVE_THIRDS
    if cfg.seed is not None:
        out.add("note sampled tree; the bound holds in expectation only")
        best = min(r.f_cost for r in rep.per_tree)
        out.check("best-tree", best <= bound * rep.lp_value)
    else:
        out.check("thirteen-eighths" if bound == THIRTEEN_EIGHTHS else "five-thirds", rep.ratio <= bound)
    out.check("aggregate", rep.aggregate_ok)


def cmd_lp(cfg: RunConfig, out: Out) -> None:
    inst = _metric(_load(cfg.input), out)
    sol = solve_lp1(inst, limits=cfg.limits)
    out.add(f"value {fmt_q(sol.value)}")
    for (u, v), x in sorted(sol.x_star.items()):
        if x:
            out.add(f"edge {u} {v} {fmt_q(x)}")
    out.add(f"rows {len(sol.active_rows)}")
    out.check("no-violated-cut", not enumerate_violated_cuts(inst, sol.x_star, cfg.limits))


def _pd(cfg: RunConfig, out: Out, inst: Instance) -> None:
    pc = make_pc(inst)
    r = solve_pd(pc)
    out.extend(r.report_lines())
    audit = verify_pd_guarantees(pc, r, cfg.limits)
    for name, ok in audit.checks.items():
        out.check(name, ok)


def cmd_pd(cfg: RunConfig, out: Out) -> None:
    _pd(cfg, out, _load(cfg.input))


def cmd_certify(cfg: RunConfig, out: Out) -> None:
    inst = _metric(_load(cfg.input), out)
    sol = solve_lp1(inst, limits=cfg.limits)
    out.add(f"lp {fmt_q(sol.value)}")
    fam = enumerate_narrow_cuts(inst, sol.x_star, tau=cfg.tau, limits=cfg.limits)
    try:
        flows = correction_flows(inst, sol.x_star, fam)
    except CorrectionFlowError as exc:
        out.add(f"error {exc}")
        out.check("saturated", False)
        return
    out.extend(flows.report_lines())
    out.add(f"saturated {'yes' if flows.saturated else 'no'}")
    if flows.saturated:
        out.check("flow-conditions", not check_flow_conditions(sol.x_star, flows))
    else:
        out.add(f"mincut {fmt_q(flows.cut_capacity)}")
        out.check("min-cut", flows.cut_capacity == flows.value)


def cmd_oracle(cfg: RunConfig, out: Out) -> None:
    inst = _load(cfg.input)
    F, value = brute_force_opt(inst, cfg.limits)
    out.add(f"value {fmt_q(value)}")
    for e, m in sorted(F.mult.items()):
        out.add(f"edge {e[0]} {e[1]} {m}")
    if inst.n <= 8:
        out.add(f"lp {fmt_q(brute_force_lp1(_metric(inst, Out(cfg.fmt))))}")


def cmd_audit(cfg: RunConfig, out: Out) -> None:
    raw = _load(cfg.input)
    inst = _metric(raw, out)
    n = inst.n
    sol = None
    if n <= cfg.limits.max_nodes_cut_enum:
        out.section("lp")
        sol = solve_lp1(inst, limits=cfg.limits)
        out.add(f"value {fmt_q(sol.value)}")
        out.check("no-violated-cut", not enumerate_violated_cuts(inst, sol.x_star, cfg.limits))

        out.section("five-thirds")
        rep = christofides_tjoin(inst, lp=sol, limits=cfg.limits)
        out.add(f"cost {fmt_q(rep.cost)}")
        out.add(f"ratio {fmt_q(rep.ratio)} (~{float(rep.ratio):.6f})" if rep.ratio is not None else "ratio undefined")
        out.check("five-thirds", rep.ratio is not None and rep.ratio <= FIVE_THIRDS)
        out.check("certificate", all(a.ok for a in rep.certificates))

        out.section("thirteen-eighths")
        tau, alpha, beta = _params(cfg)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep2 = aks_tjoin(inst, tau, alpha, beta, lp=sol, limits=cfg.limits)
        out.add(f"cost {fmt_q(rep2.cost)}")
        if rep2.ratio is not None:
            out.add(f"ratio {fmt_q(rep2.ratio)} (~{float(rep2.ratio):.6f})")
        bound = THIRTEEN_EIGHTHS if len(inst.terminals) >= 4 else FIVE_THIRDS
        out.check("thirteen-eighths" if bound == THIRTEEN_EIGHTHS else "five-thirds",
                  rep2.ratio is not None and rep2.ratio <= bound)
        out.check("aggregate", rep2.aggregate_ok)
        out.check("decomposition", bool(verify_decomposition(sol.x_star, rep2.decomposition, n)))
        out.check("odd-probability", check_fact_odd_probability(inst, sol.x_star, rep2.decomposition).ok)
        out.add(format_decomposition(rep2.decomposition).rstrip("\n"))

    if n <= cfg.limits.max_nodes_tree_enum:
        out.section("oracle")
        _, opt = brute_force_opt(inst, cfg.limits)
        out.add(f"value {fmt_q(opt)}")
        if sol is not None:
            out.check("lp-below-opt", sol.value <= opt)
            out.check("five-thirds-above-opt", rep.cost >= opt)
            out.check("thirteen-eighths-above-opt", rep2.cost >= opt)

    pen = raw.penalties or {}
    if all(v in raw.terminals or v in pen for v in range(raw.n)):
        out.section("pd")
        _pd(cfg, out, raw)


COMMANDS = {
    "solve": cmd_solve,
    "lp": cmd_lp,
    "pd": cmd_pd,
    "certify": cmd_certify,
    "oracle": cmd_oracle,
    "audit": cmd_audit,
}


def cmd_gen(cfg: RunConfig) -> str:
    if cfg.kind == "k4":
        inst = gen_k4()
    elif cfg.kind == "pd-tight":
        inst = gen_tight_example(cfg.t)
    else:
        inst = gen_random_metric(cfg.n, cfg.t, cfg.seed)
    if cfg.penalties:
        inst = with_random_penalties(inst, cfg.seed + 1)
    return format_instance(inst)


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        cfg, _ = config_from_args(build_parser().parse_args(argv))
        if cfg.command == "gen":
            stdout.write(cmd_gen(cfg))
            return 0
        out = Out(cfg.fmt)
        COMMANDS[cfg.command](cfg, out)
        stdout.write("\n".join(out.lines) + "\n")
        return 2 if out.failed else 0
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return 1
    except (OSError, InstanceFormatError) as exc:
        stderr.write(f"error: {exc}\n")
        return 1
    except ValueError as exc:
        stderr.write(f"error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run())
