"""Command-line front end: ``gpt-restrict <command> ...``.

Exit codes: 0 success, feasible or member; 1 infeasible or non-member; 2
usage error; 3 model or validation error; 4 unsupported backend, dimension
or size.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import io
from .compatibility import JointMeter, are_compatible
from .core import Meter
from .errors import DomainError, ResourceError, UnsupportedError, ValidationError
from .io import ModelError, dumps, number_to_json, rational
from .numerics import compare
from .restrictions import (
    ClassificationResult,
    classify,
    effect_restriction_validate,
    in_noise_restriction,
    noise_content,
)
from .simulation import SimulationWitness, certify_n_tomic, simulable
from .qubit import (
    overlap_sq,
    ud_dichotomic_bound,
    ud_max_valid_q,
    ud_unrestricted_optimum,
)

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_INVALID, EXIT_UNSUPPORTED = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _number_text(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    parts = [str(x.rational)] if x.rational else []
    for r, k in x.terms:
        mag = abs(k)
        term = f"sqrt({r})" if mag == 1 else f"{mag}*sqrt({r})"
        sign = "-" if k < 0 else "+"
        parts.append(f"{sign} {term}" if parts else (f"-{term}" if k < 0 else term))
    return f"{x.decimal(8)} = " + " ".join(parts)


def _evidence_json(evidence: dict) -> dict:
    out = {}
    for k, v in evidence.items():
        if isinstance(v, SimulationWitness):
            names = [f"ray_meter_{i}" for i in range(len(v.simulators))]
            out[k] = witness_to_json(v, names)
            out["simulators"] = {n: io.meter_to_json(b) for n, b in zip(names, v.simulators)}
        elif isinstance(v, list):
            out[k] = [number_to_json(x) if not isinstance(x, int) else x for x in v]
        elif isinstance(v, int):
            out[k] = v
        else:
            out[k] = number_to_json(v)
    return out


# --------------------------------------------------------------- commands


def cmd_validate(args) -> tuple[int, dict, list[str]]:
    model = io.load_model(args.model)
    report = {"command": "validate", "model": args.model, "meters": {}, "effect_restrictions": {},
              "restrictions": {}}
    lines = [f"state space: {model.space!r}: valid"]
    ok = True
    for name in model.meters:
        problems = model.meter_problems.get(name, [])
        report["meters"][name] = {"valid": not problems, "violations": problems}
        ok &= not problems
        lines.append(f"meter {name}: " + ("valid" if not problems else "INVALID"))
        lines.extend(f"  {p}" for p in problems)
    for name, er in model.effect_restrictions.items():
        rep = effect_restriction_validate(er)
        report["effect_restrictions"][name] = {"valid": rep.ok, "violations": rep.violations}
        ok &= rep.ok
        lines.append(f"effect restriction {name}: " + ("valid" if rep.ok else "INVALID"))
        lines.extend(f"  {p}" for p in rep.violations)
    names = sorted(set(model.restrictions) | set(model.restriction_problems))
    for name in names:
        problems = list(model.restriction_problems.get(name, []))
        r = model.restrictions.get(name)
        if r is not None and r.kind == "effects":
            problems += effect_restriction_validate(r.effects).violations
        report["restrictions"][name] = {"valid": not problems, "violations": problems}
        ok &= not problems
        lines.append(f"restriction {name}: " + ("valid" if not problems else "INVALID"))
        lines.extend(f"  {p}" for p in problems)
    report["valid"] = ok
    return (EXIT_OK if ok else EXIT_NO), report, lines


def witness_to_json(w: SimulationWitness, names: list[str]) -> dict:
    return {
        "weights": [rational(p) for p in w.weights],
        "post_processings": {n: io.pp_to_json(nu) for n, nu in zip(names, w.post_processings)},
        "residual_zero": w.verify(),
    }


def witness_from_json(data: dict, target: Meter, simulators: list[Meter], names: list[str]) -> SimulationWitness:
    return SimulationWitness(
        target, tuple(simulators), tuple(Fraction(x) for x in data["weights"]),
        tuple(io.pp_from_json(data["post_processings"][n]) for n in names))


def cmd_simulate(args):
    model = io.load_model(args.model)
    target = model.meter(args.target)
    sims = [model.meter(n) for n in args.simulators]
    res = simulable(target, sims)
    report = {"command": "simulate", "target": args.target, "simulators": list(args.simulators),
              "simulable": res.feasible}
    if res.feasible:
        report["witness"] = witness_to_json(res, list(args.simulators))
        lines = [f"{args.target} is simulable from {', '.join(args.simulators)}"]
        for n, p, nu in zip(args.simulators, res.weights, res.post_processings):
            lines.append(f"  weight {p} on {n}, post-processing {[[str(x) for x in r] for r in nu.matrix]}")
        lines.append("  reconstruction residual: zero" if res.verify() else "  reconstruction residual: NONZERO")
        return EXIT_OK, report, lines
    report["certificate"] = io.farkas_to_json(res.farkas)
    report["certificate_verified"] = res.verify()
    lines = [f"{args.target} is NOT simulable from {', '.join(args.simulators)}",
             "  Farkas certificate " + ("verified" if res.verify() else "FAILED verification")]
    return EXIT_NO, report, lines


def classification_to_json(res: ClassificationResult) -> dict:
    out = {"label": res.label, "seed": res.seed, "budget": res.budget, "trail": res.trail,
           "candidates_tested": res.candidates_tested}
    if res.effect_outside is not None:
        out["effect_outside"] = io.effect_to_json(res.effect_outside)
    if res.meter_outside is not None:
        out["meter_outside"] = io.meter_to_json(res.meter_outside)
    if res.certificate is not None:
        out["certificate"] = io.farkas_to_json(res.certificate.farkas)
        out["certificate_verified"] = res.certificate.verify()
    return out


def cmd_classify(args):
    model = io.load_model(args.model)
    r = model.restriction(args.restriction)
    res = classify(r, seed=args.seed, budget=args.budget)
    report = {"command": "classify", "restriction": args.restriction, **classification_to_json(res)}
    lines = [f"restriction {args.restriction}: {res.label}"] + [f"  {t}" for t in res.trail]
    if res.meter_outside is not None:
        lines.append(f"  witness meter: {[str(e) for e in res.meter_outside.effects]}")
    return EXIT_OK, report, lines


def cmd_ntomic(args):
    model = io.load_model(args.model)
    meter = model.meter(args.meter)
    cert = certify_n_tomic(meter, args.n)
    report = {"command": "ntomic", "meter": args.meter, "n": args.n, "verdict": cert.verdict,
              "route": cert.route, "evidence": _evidence_json(cert.evidence)}
    lines = [f"{args.meter}: {cert.verdict} (n = {args.n})"]
    if cert.route:
        lines.append(f"  route: {cert.route}")
    if "sum" in cert.evidence:
        lines.append(f"  sum of maximal values: {_number_text(cert.evidence['sum'])}")
    if "witness" in cert.evidence:
        w = cert.evidence["witness"]
        used = sum(1 for p in w.weights if p)
        lines.append(f"  simulated from {used} of {len(w.simulators)} ray meters, "
                     f"each with at most {args.n} outcomes; residual " + ("zero" if w.verify() else "NONZERO"))
    return EXIT_OK, report, lines


def cmd_noise(args):
    model = io.load_model(args.model)
    meter = model.meter(args.meter)
    w = noise_content(meter)
    report = {"command": "noise", "meter": args.meter, "noise_content": number_to_json(w)}
    lines = [f"w = {_number_text(w)}"]
    if args.t is None:
        threshold = 1 - w
        report["member_for_t_at_least"] = number_to_json(threshold)
        if compare(threshold, 0) <= 0:
            lines.append("member of R_t for all t")
        else:
            lines.append(f"member of R_t exactly for t >= {_number_text(threshold)}")
        return EXIT_OK, report, lines
    t = io.parse_rational(args.t, "--t", "<command line>")
    member = in_noise_restriction(meter, t)
    report["t"] = rational(t)
    report["member"] = member
    lines.append(f"{'member' if member else 'not a member'} of R_t for t = {t}")
    return (EXIT_OK if member else EXIT_NO), report, lines


def joint_to_json(j: JointMeter) -> list[list[list[str]]]:
    return [[io.effect_to_json(g) for g in row] for row in j.grid]


def cmd_compat(args):
    model = io.load_model(args.model)
    a, b = model.meter(args.a), model.meter(args.b)
    res = are_compatible(a, b)
    report = {"command": "compat", "a": args.a, "b": args.b, "compatible": res.feasible}
    if res.feasible:
        report["joint_meter"] = joint_to_json(res)
        report["marginals_exact"] = res.verify()
        lines = [f"{args.a} and {args.b} are compatible"]
        for x, row in enumerate(res.grid):
            lines.append(f"  G[{x}] = {[str(g) for g in row]}")
        return EXIT_OK, report, lines
    report["certificate"] = io.farkas_to_json(res.farkas)
    report["certificate_verified"] = res.verify()
    lines = [f"{args.a} and {args.b} are NOT compatible",
             "  Farkas certificate " + ("verified" if res.verify() else "FAILED verification")]
    return EXIT_NO, report, lines


def _bloch(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"Bloch vector {text!r} must be three comma-separated rationals")
    return tuple(io.parse_rational(p, "--bloch", "<command line>") for p in parts)


def cmd_ud(args):
    if (args.overlap_sq is None) == (args.bloch is None):
        raise UsageError("give exactly one of --overlap-sq or --bloch")
    if args.overlap_sq is not None:
        o = io.parse_rational(args.overlap_sq, "--overlap-sq", "<command line>")
    else:
        o = overlap_sq(_bloch(args.bloch[0]), _bloch(args.bloch[1]))
    constrained = args.constraint == "dichotomic"
    bound = ud_dichotomic_bound(overlap=o)
    optimum = ud_unrestricted_optimum(overlap=o)
    opt = ud_max_valid_q(overlap=o, constraint="q1_plus_q2_le_1" if constrained else "none")
    report = {"command": "ud", "overlap_sq": rational(o), "constraint": args.constraint,
              "bound": rational(bound), "optimum": number_to_json(optimum)}
    lines = [f"overlap^2 = {o}", f"bound {bound}"]
    if constrained:
        report["optimizer"] = {"q1": rational(opt.q1), "q2": rational(opt.q2), "success": rational(opt.success)}
        lines.append(f"best dichotomic-compatible UD meter: q1 = {opt.q1}, q2 = {opt.q2}, success {opt.success}")
    else:
        report["optimizer"] = {"q1": round(opt.q1, 9), "q2": round(opt.q2, 9), "success": round(opt.success, 12)}
        lines.append(f"optimum ≈ {float(optimum):.6f} (exact {_number_text(optimum).split(' = ')[-1]})")
        lines.append(f"grid + bisection: q1 ≈ {opt.q1:.6f}, q2 ≈ {opt.q2:.6f}, success ≈ {opt.success:.9f}")
    return EXIT_OK, report, lines


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gpt-restrict", description="Meters, simulability and restrictions in GPTs.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--json", action="store_true", help="print the report as JSON")
        sp.set_defaults(func=func)
        return sp

    sp = add("validate", cmd_validate, "check every object of a model file")
    sp.add_argument("model")
    sp = add("simulate", cmd_simulate, "decide whether a meter is simulable from others")
    sp.add_argument("model")
    sp.add_argument("target")
    sp.add_argument("simulators", nargs="+")
    sp = add("classify", cmd_classify, "classify a meter restriction as R1/R2/R3")
    sp.add_argument("model")
    sp.add_argument("restriction")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=50)
    sp = add("ntomic", cmd_ntomic, "certify effective n-tomicity")
    sp.add_argument("model")
    sp.add_argument("meter")
    sp.add_argument("n", type=int)
    sp = add("noise", cmd_noise, "noise content and noise-restriction membership")
    sp.add_argument("model")
    sp.add_argument("meter")
    sp.add_argument("--t", default=None)
    sp = add("compat", cmd_compat, "decide compatibility of two meters")
    sp.add_argument("model")
    sp.add_argument("a")
    sp.add_argument("b")
    sp = add("ud", cmd_ud, "unambiguous discrimination of two pure qubit states")
    sp.add_argument("--overlap-sq", dest="overlap_sq", default=None)
    sp.add_argument("--bloch", nargs=2, metavar=("N1", "N2"), default=None)
    sp.add_argument("--constraint", choices=["none", "dichotomic"], default="none")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, report, lines = args.func(args)
    except UsageError as exc:
        return _fail(args, EXIT_USAGE, "usage", str(exc))
    except (ModelError, ValidationError) as exc:
        return _fail(args, EXIT_INVALID, "invalid", str(exc))
    except (UnsupportedError, ResourceError) as exc:
        return _fail(args, EXIT_UNSUPPORTED, "unsupported", str(exc))
    except DomainError as exc:
        return _fail(args, EXIT_USAGE, "domain", str(exc))
    report["exit_code"] = code
    if args.json:
        print(dumps(report))
    else:
        print("\n".join(lines))
    return code


def _fail(args, code: int, kind: str, message: str) -> int:
    if getattr(args, "json", False):
        print(dumps({"command": args.command, "error": kind, "message": message, "exit_code": code}))
    else:
        print(f"error: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
