"""Command-line front end.

Every command emits a table: CSV (header row, LF endings) or JSON
(``{"metadata": ..., "rows": [...]}``).  Numbers are printed with 12
significant digits.  Exit status is 0 on success, 1 on a domain or
configuration error (one line on stderr), and 2 on usage errors.
"""

import argparse
import csv
import io
import json
import sys

from . import __version__
from ._errors import DomainError
from .analysis import SweepSpec, find_critical_strength, q_curve, sweep, verify_unity_optimal
from .battle import BattleModel, battle_p_general, battle_p_simple, q_constant_p, q_general, q_simple
from .config import COMMANDS, ConfigError, RunConfig, load_config, validate_parameters
from .game import (
    ClassificationThresholds,
    CoalitionVote,
    MemberProfile,
    UnityDecision,
    classify,
    expected_payoffs,
    incentive,
    perceived_q,
    unanimous_unity_is_nash,
)
from .markov import GENERATOR_NAME, SPLITTING_RULE, ConflictShape, absorption_q_solve, build_chain, simulate

__all__ = ["run", "main", "build_parser"]

DEFAULTS = {
    "R": 1.0,
    "gamma": 0.0,
    "gamma_convention": "eq10",
    "general": False,
    "m_max": 50,
    "trials": 100_000,
    "seed": 0,
    "workers": 1,
    "s_lo": 0.1,
    "s_hi": 1e4,
    "tolerance": 1e-6,
    "r_myopic": 1.0,
    "bc_naive": 1.0,
    "s_defeatist": 1e3,
    "s_complacent": 1e-3,
}

REQUIRED = {
    "battle-p": ("s", "m", "n"),
    "winprob": ("m", "n"),
    "simulate": ("m", "n"),
    "decide": ("r", "b", "c", "s_hat", "m0", "m1", "n"),
    "equilibrium": ("m0", "m1", "n", "s"),
    "classify": ("r", "b", "c", "s_hat"),
    "verify-prop1": ("s", "n"),
    "critical-s": ("n",),
    "optimal-m": ("s", "n"),
    "sweep": ("quantity",),
}


_MODEL = ("R", "gamma", "general", "gamma_convention")
_THRESHOLDS = ("r_myopic", "bc_naive", "s_defeatist", "s_complacent")

OPTIONAL = {
    "battle-p": _MODEL,
    "winprob": ("s", "p") + _MODEL,
    "simulate": ("s", "p", "trials", "seed", "workers") + _MODEL,
    "decide": _MODEL,
    "equilibrium": ("members", "r", "b", "c", "s_hat") + _MODEL,
    "classify": ("m0", "m1", "n") + _THRESHOLDS + _MODEL,
    "verify-prop1": ("m_max",) + _MODEL,
    "critical-s": ("m_max", "s_lo", "s_hi", "tolerance") + _MODEL,
    "optimal-m": ("m_max",) + _MODEL,
    "sweep": ("m_max", "gamma_convention"),
}


class UsageError(Exception):
    pass


def _member_arg(text):
    try:
        r, b, c, s_hat = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected r,b,c,s_hat (got {text!r})") from None
    return {"r": r, "b": b, "c": c, "s_hat": s_hat}


def _axis_arg(text):
    name, sep, values = text.partition("=")
    if not sep or not values:
        raise argparse.ArgumentTypeError(f"expected name=v1,v2,... (got {text!r})")
    try:
        parsed = [int(v) if v.strip().lstrip("-").isdigit() else float(v) for v in values.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric value in axis {text!r}") from None
    return name.strip(), parsed


def _common_flags():
    parent = argparse.ArgumentParser(add_help=False)
    add = parent.add_argument
    for flag, typ in (("--s", float), ("--s-hat", float), ("--m", int), ("--n", int),
                      ("--m0", int), ("--m1", int), ("--R", float), ("--gamma", float),
                      ("--r", float), ("--b", float), ("--c", float), ("--p", float),
                      ("--trials", int), ("--seed", int), ("--workers", int), ("--m-max", int),
                      ("--s-lo", float), ("--s-hi", float), ("--tolerance", float),
                      ("--r-myopic", float), ("--bc-naive", float),
                      ("--s-defeatist", float), ("--s-complacent", float)):
        add(flag, type=typ, default=None)
    add("--general", action="store_const", const=True, default=None,
        help="use the general battle model (R, gamma)")
    add("--gamma-convention", choices=("eq10", "appendix"), default=None)
    add("--quantity", default=None, help="sweep quantity")
    add("--axis", action="append", type=_axis_arg, default=[], help="sweep axis, name=v1,v2,...")
    add("--member", action="append", type=_member_arg, default=[], help="voter as r,b,c,s_hat")
    add("--format", choices=("csv", "json"), default=None)
    add("--out", default=None, help="write output here instead of stdout")
    add("--config", default=None, help="JSON run configuration")
    return parent


def build_parser():
    parser = argparse.ArgumentParser(prog="conflictruin", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    parent = _common_flags()
    for command in COMMANDS:
        sub.add_parser(command, parents=[parent])
    return parser


_FLAG_PARAMS = (
    "s", "s_hat", "m", "n", "m0", "m1", "R", "gamma", "r", "b", "c", "p", "trials", "seed",
    "workers", "m_max", "s_lo", "s_hi", "tolerance", "r_myopic", "bc_naive", "s_defeatist",
    "s_complacent", "general", "gamma_convention", "quantity",
)


def _resolve(args):
    if args.config is not None:
        config = load_config(args.config)
        if config.command != args.command:
            raise ConfigError(f"config is for command {config.command!r}, not {args.command!r}")
    else:
        config = RunConfig(args.command)
    params = dict(config.parameters)
    for key in _FLAG_PARAMS:
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    if args.member:
        params["members"] = list(args.member)
    axes = dict(config.axes)
    for name, values in args.axis:
        axes[name] = values
    validate_parameters(params)
    return RunConfig(
        command=args.command,
        parameters=params,
        axes=axes,
        output_format=args.format or config.output_format,
        output_path=args.out if args.out is not None else config.output_path,
    )


def _require(cfg):
    missing = [k for k in REQUIRED[cfg.command] if k not in cfg.parameters]
    if cfg.command in ("winprob", "simulate") and "s" not in cfg.parameters and "p" not in cfg.parameters:
        missing.append("s or p")
    if cfg.command == "sweep" and not cfg.axes:
        missing.append("axes")
    allowed = set(REQUIRED[cfg.command]) | set(OPTIONAL[cfg.command])
    unused = sorted(set(cfg.parameters) - allowed)
    if unused:
        raise UsageError(f"{cfg.command}: parameter {unused[0]!r} does not apply to this command")
    if cfg.axes and cfg.command != "sweep":
        raise UsageError(f"{cfg.command}: axes only apply to sweep")
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise UsageError(f"{cfg.command}: missing required parameter(s) {flags}")


def _use_general(p):
    return p.get("general", False) or p.get("R", 1.0) != 1.0 or p.get("gamma", 0.0) != 0.0


# --- commands ---------------------------------------------------------------
# each returns (header, rows, extra metadata)

def _battle_p(p):
    if not _use_general(p):
        return ("p",), [(battle_p_simple(p["s"], p["m"], p["n"]),)], {}
    model = BattleModel(p["s"], p["R"], p["gamma"])
    rows = [(i, battle_p_general(model, p["m"], p["n"], i, p["gamma_convention"]))
            for i in range(1, p["m"] + p["n"])]
    return ("i", "p"), rows, {}


def _winprob(p):
    if "p" in p:
        return ("method", "q"), [("closed_form_constant_p", q_constant_p(p["p"], p["m"], p["n"]))], {}
    if _use_general(p):
        model = BattleModel(p["s"], p["R"], p["gamma"])
        q = q_general(model, p["m"], p["n"], p["gamma_convention"])
        return ("method", "q"), [("closed_form_general", q)], {}
    return ("method", "q"), [("closed_form_simple", q_simple(p["s"], p["m"], p["n"]))], {}


def _simulate(p):
    shape = ConflictShape(p["m"], p["n"])
    source = p["p"] if "p" in p else BattleModel(p["s"], p["R"], p["gamma"])
    chain = build_chain(shape, source, p["gamma_convention"])
    est = simulate(chain, p["trials"], p["seed"], p["workers"])
    header = ("q_hat", "std_error", "trials", "seed", "workers", "q_exact")
    row = (est.q_hat, est.std_error, est.trials, est.seed, est.workers, absorption_q_solve(chain))
    return header, [row], {"generator": GENERATOR_NAME, "splitting_rule": SPLITTING_RULE}


def _member(p):
    return MemberProfile(r=p["r"], b=p["b"], c=p["c"], s_hat=p["s_hat"])


def _model_args(p):
    if _use_general(p):
        return p["R"], p["gamma"], p["gamma_convention"]
    return 1.0, 0.0, p["gamma_convention"]


def _decide(p):
    member, decision = _member(p), UnityDecision(p["m0"], p["m1"])
    R, gamma, conv = _model_args(p)
    q0 = perceived_q(member.s_hat, decision.m0, p["n"], R, gamma, conv)
    q1 = perceived_q(member.s_hat, decision.m1, p["n"], R, gamma, conv)
    pay = expected_payoffs(member, q0, q1)
    value = incentive(member, decision, p["n"], R, gamma, conv)
    header = ("q_m0", "q_m1", "delta_q", "status_quo", "greater_unity", "incentive", "defects")
    return header, [(q0, q1, q1 - q0, pay.status_quo, pay.greater_unity, value, value < 1.0)], {}


def _equilibrium(p):
    if "members" in p:
        members = [MemberProfile(**m) for m in p["members"]]
    elif all(k in p for k in ("r", "b", "c", "s_hat")):
        members = [_member(p)]
    else:
        members = []
    vote = CoalitionVote(members, UnityDecision(p["m0"], p["m1"]), p["n"], p["s"])
    report = unanimous_unity_is_nash(vote, *_model_args(p))
    header = ("member", "r", "b", "c", "s_hat", "q_m0_perceived", "q_m1_perceived",
              "q_m0_actual", "q_m1_actual", "incentive", "defects", "unanimous_unity_is_nash")
    rows = [(k, v.member.r, v.member.b, v.member.c, v.member.s_hat, v.q_m0_perceived,
             v.q_m1_perceived, v.q_m0_actual, v.q_m1_actual, v.incentive, v.defects, report.is_nash)
            for k, v in enumerate(report.verdicts)]
    return header, rows, {"unanimous_unity_is_nash": report.is_nash, "voters": len(members)}


def _classify(p):
    thresholds = ClassificationThresholds(p["r_myopic"], p["bc_naive"], p["s_defeatist"], p["s_complacent"])
    member = _member(p)
    flags = classify(member, thresholds)
    header = ["myopic", "naive", "collaborationist", "defeatist", "complacent"]
    row = [flags.myopic, flags.naive, flags.collaborationist, flags.defeatist, flags.complacent]
    if all(k in p for k in ("m0", "m1", "n")):
        value = incentive(member, UnityDecision(p["m0"], p["m1"]), p["n"], *_model_args(p))
        header += ["incentive", "defects"]
        row += [value, value < 1.0]
    return tuple(header), [tuple(row)], {}


def _verify(p):
    R, gamma, conv = _model_args(p)
    rep = verify_unity_optimal(p["s"], p["n"], R, gamma, p["m_max"], conv)
    v = rep.first_violation or (None, None, None)
    header = ("m_max", "monotone_decreasing", "violation_m", "q_violation_m", "q_violation_next", "q_tail")
    return header, [(rep.m_max, rep.monotone_decreasing, *v, rep.q_tail)], {}


def _critical(p):
    R, gamma, conv = _model_args(p)
    s_star = find_critical_strength(p["n"], R, gamma, p["m_max"], p["s_lo"], p["s_hi"], p["tolerance"], conv)
    return ("s_critical",), [(s_star,)], {}


def _optimal(p):
    R, gamma, conv = _model_args(p)
    qs = q_curve(p["s"], p["n"], R, gamma, p["m_max"], conv)
    best = int(qs.argmax())
    return ("optimal_m", "q_optimal"), [(best + 1, float(qs[best]))], {}


def _sweep(p, axes):
    spec = SweepSpec(axes=axes, quantity=p["quantity"], m_max=p["m_max"], convention=p["gamma_convention"])
    result = sweep(spec)
    return result.header, list(result.rows), {"notes": list(result.notes), "rows": len(result.rows)}


_HANDLERS = {
    "battle-p": _battle_p, "winprob": _winprob, "simulate": _simulate, "decide": _decide,
    "equilibrium": _equilibrium, "classify": _classify, "verify-prop1": _verify,
    "critical-s": _critical, "optimal-m": _optimal,
}


# --- output -----------------------------------------------------------------

def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def _json_value(v):
    if isinstance(v, float):
        return float(format(v, ".12g"))
    return v


def render(cfg, header, rows, extra):
    if cfg.output_format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        return buf.getvalue()
    metadata = {
        "command": cfg.command,
        "parameters": {k: _json_value(v) for k, v in sorted(cfg.parameters.items())},
        "seed": cfg.parameters.get("seed"),
        "gamma_convention": cfg.parameters.get("gamma_convention", "eq10"),
        "version": __version__,
    }
    if cfg.axes:
        metadata["axes"] = {k: [_json_value(v) for v in vals] for k, vals in cfg.axes.items()}
    metadata.update(extra)
    doc = {"metadata": metadata,
           "rows": [{h: _json_value(v) for h, v in zip(header, row)} for row in rows]}
    return json.dumps(doc, indent=2) + "\n"


def run(argv=None, stdout=None, stderr=None):
    """Run one CLI invocation and return its exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _resolve(args)
        _require(cfg)
        defaults = {k: v for k, v in DEFAULTS.items() if k in OPTIONAL[cfg.command]}
        params = {**defaults, **cfg.parameters}
        if args.command == "sweep":
            header, rows, extra = _sweep(params, cfg.axes)
        else:
            header, rows, extra = _HANDLERS[args.command](params)
        cfg.parameters = params
        text = render(cfg, header, rows, extra)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    except (DomainError, ArithmeticError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    if cfg.output_path:
        try:
            with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {cfg.output_path}: {exc.strerror}", file=stderr)
            return 1
    else:
        stdout.write(text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
