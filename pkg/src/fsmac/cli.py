"""Command-line interface: ``fsmac <command> ...``.

Exit codes: 0 success, 1 I/O error, 2 invalid input, 3 numerical inconsistency,
4 verification failure. Channel paths may name a bundled example as
``bundled:<name>`` (xor_mac, modulo_q2, binary_multiplier).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .channel import (
    BinaryMultiplierSpec,
    ModuloAdditiveSpec,
    NoisyReceiverModel,
    build_binary_multiplier,
    bundled_path,
    equivalent_channel,
    load_channel,
    save_channel,
)
from .errors import (
    BudgetExceeded,
    ConsistencyError,
    OracleBudgetExceeded,
    ValidationError,
    VerificationFailed,
)
from .information import TeamPolicy, cooperative_channel, strategy_channel
from .optimize import (
    OptimizerConfig,
    _SUM,
    cooperative_objective,
    exhaustive_oracle_kernel,
    h_min_bruteforce,
    maximize_cooperative_kernel,
    maximize_sum_rate,
    uniform_coset_policy,
)
from .regions import (
    SCENARIOS,
    ScenarioDescriptor,
    auxiliary_example_channel,
    inner_bound_region,
    reduce_scenario,
    verify_auxiliary_equivalence,
    verify_binary_multiplier,
    verify_modulo_example,
)
from .simulate import SimulationParams, estimate_error

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3, 4


def _g(x: float) -> str:
    return f"{x:.17g}"


def _resolve(path: str) -> Path:
    if path.startswith("bundled:"):
        return bundled_path(path.split(":", 1)[1])
    return Path(path)


def _load(path: str):
    return load_channel(_resolve(path))


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.restarts, max_outer_iters=args.max_iters,
                           rng_seed=args.seed, threads=args.threads)


def _default_scenario(model) -> str:
    return "noisy_csir" if isinstance(model, (NoisyReceiverModel, BinaryMultiplierSpec)) else \
        "causal_noisy_csit_full_csir"


def _scenario(args, model) -> ScenarioDescriptor:
    kind = args.scenario or _default_scenario(model)
    delay_a = args.delay_a if args.delay_a is not None else (1 if kind.startswith("cooperative") or kind == "delayed" else 0)
    delay_b = args.delay_b if args.delay_b is not None else (1 if kind == "delayed" else 0)
    return ScenarioDescriptor(kind, delay_a, delay_b, _lookup(args.f_a), _lookup(args.f_b))


def _lookup(text: str | None) -> tuple[int, ...] | None:
    if not text:
        return None
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise ValidationError(f"lookup table {text!r} must be comma-separated integers") from None


def _write_manifest(target: Path, args, inputs: list[str]) -> None:
    """Record how an output was produced, next to it."""
    overrides = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    manifest = {
        "command": args.command,
        "inputs": inputs,
        "config": overrides,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    path = target / "manifest.json" if target.is_dir() else target.with_name(target.name + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=1, default=str) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    model = _load(args.path)
    kind = type(model).__name__
    detail = ""
    if hasattr(model, "alphabets"):
        detail = " " + " ".join(f"{k}={v}" for k, v in model.alphabets.to_dict().items())
    print(f"valid: {kind}{detail}")
    return EXIT_OK


def cmd_sumrate(args) -> int:
    model = _load(args.path)
    scen = _scenario(args, model)
    ch = reduce_scenario(model, scen)
    cfg = _config(args)
    if scen.cooperative:
        kernel = cooperative_channel(ch)
        res = maximize_cooperative_kernel(kernel, ch.state_dist, 1.0, cfg)
        weights, joint = cooperative_objective(1.0), True
        rows = [("joint", i, p) for i, p in enumerate(res.policy.pi_joint.ravel())]
    else:
        kernel = strategy_channel(ch)
        res = maximize_sum_rate(ch, cfg)
        weights, joint = _SUM, False
        rows = [("a", i, p) for i, p in enumerate(res.policy.pi_a)] + \
               [("b", i, p) for i, p in enumerate(res.policy.pi_b)]
    print(f"sum_rate={res.value:.6f}")
    for enc, i, p in rows:
        if p > 0:
            print(f"policy_{enc}[{i}]={p:.6f}")
    if not res.converged:
        print("warning: ascent hit the iteration cap", file=sys.stderr)
    if args.out:
        out = Path(args.out)
        lines = ["encoder,strategy,probability"] + [f"{e},{i},{_g(p)}" for e, i, p in rows]
        out.write_text("\n".join(lines) + "\n", encoding="utf-8")
        _write_manifest(out, args, [args.path])
    if args.oracle_grid:
        oracle = exhaustive_oracle_kernel(kernel, ch.state_dist, weights, args.oracle_grid, joint=joint)
        print(f"oracle={oracle:.6f}")
        if res.value < oracle - args.oracle_tol:
            print(f"error: ascent {res.value:.9f} is below the grid oracle {oracle:.9f}", file=sys.stderr)
            return EXIT_NUMERIC
    return EXIT_OK


def cmd_region(args) -> int:
    model = _load(args.path)
    scen = _scenario(args, model)
    region = inner_bound_region(model, scen, args.lambdas, _config(args))
    print(f"outer_sum_rate={region.outer_sum_rate:.6f}")
    for ra, rb in region.hull_points:
        print(f"hull {ra:.6f} {rb:.6f}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        hull = ["Ra,Rb"] + [f"{_g(x)},{_g(y)}" for x, y in region.hull_points]
        (out / "hull.csv").write_text("\n".join(hull) + "\n", encoding="utf-8")
        pent = ["lambda,Ra,Rb,Rsum,source"]
        for p in region.pentagons:
            for x, y in p.corners:
                pent.append(f"{_g(p.lambda_a)},{_g(x)},{_g(y)},{_g(p.rates.r_sum)},{p.source}")
        (out / "pentagons.csv").write_text("\n".join(pent) + "\n", encoding="utf-8")
        v = region.outer_sum_rate
        (out / "outer.csv").write_text(f"Ra,Rb\n{_g(v)},0\n0,{_g(v)}\n", encoding="utf-8")
        _write_manifest(out, args, [args.path])
    return EXIT_OK


def _policy_from_file(path: str) -> TeamPolicy:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict) or set(raw) != {"pi_a", "pi_b"}:
        raise ValidationError("policy file must be a JSON object with exactly the keys pi_a and pi_b")
    return TeamPolicy.from_user(raw["pi_a"], raw["pi_b"])


def cmd_simulate(args) -> int:
    model = _load(args.path)
    ch = reduce_scenario(model, ScenarioDescriptor(_default_scenario(model)))
    if args.policy:
        policy = _policy_from_file(args.policy)
    elif isinstance(model, ModuloAdditiveSpec):
        # the coset policy attains every bound of the region, not only the sum
        policy = uniform_coset_policy(model, h_min_bruteforce(model)[1])
    else:
        policy = maximize_sum_rate(ch, _config(args)).policy
    params = SimulationParams(args.n, args.ra, args.rb, args.epsilon, args.trials, args.seed,
                              args.budget)
    report = estimate_error(ch, policy, params, threads=args.threads)
    sys.stdout.write(report.to_csv())
    if args.out:
        out = Path(args.out)
        out.write_text(report.to_csv(), encoding="utf-8")
        _write_manifest(out, args, [args.path] + ([args.policy] if args.policy else []))
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    if args.example == "modulo":
        spec = _load(args.path or "bundled:modulo_q2")
        if not isinstance(spec, ModuloAdditiveSpec):
            raise ValidationError("verify modulo needs a modulo_additive channel file")
        report = verify_modulo_example(spec, cfg)
    elif args.example == "multiplier":
        report = verify_binary_multiplier(BinaryMultiplierSpec(args.ps, args.pr), cfg)
    else:
        ch = _load(args.path) if args.path else auxiliary_example_channel()
        report = verify_auxiliary_equivalence(ch, args.samples, rng_seed=args.seed)
    print(report.to_text())
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_equivalent(args) -> int:
    model = _load(args.path)
    if isinstance(model, BinaryMultiplierSpec):
        model = build_binary_multiplier(model)
    if not isinstance(model, NoisyReceiverModel):
        raise ValidationError("equivalent needs a noisy_receiver or binary_multiplier channel file")
    out = Path(args.output)
    save_channel(equivalent_channel(model), out)
    _write_manifest(out, args, [args.path])
    print(f"wrote {out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _threads_default() -> int:
    try:
        return max(1, int(os.environ.get("FSMAC_THREADS", "1")))
    except ValueError:
        return 1


def _add_optimizer(p: argparse.ArgumentParser) -> None:
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)


def _add_scenario(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--delay-a", type=int)
    p.add_argument("--delay-b", type=int)
    p.add_argument("--f-a", help="comma-separated map from receiver CSI to encoder a's CSI")
    p.add_argument("--f-b", help="comma-separated map from receiver CSI to encoder b's CSI")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fsmac", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fsmac {__version__}")
    parser.add_argument("--threads", type=int, default=_threads_default(),
                        help="worker cap (default: $FSMAC_THREADS or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a channel file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sumrate", help="maximize the sum rate")
    p.add_argument("path")
    _add_scenario(p)
    _add_optimizer(p)
    p.add_argument("--oracle-grid", type=int, help="cross-check against a simplex grid of this resolution")
    p.add_argument("--oracle-tol", type=float, default=1e-6)
    p.add_argument("--out", help="CSV file for the maximizing policy")
    p.set_defaults(func=cmd_sumrate)

    p = sub.add_parser("region", help="inner-bound region and outer sum-rate line")
    p.add_argument("path")
    _add_scenario(p)
    _add_optimizer(p)
    p.add_argument("--lambdas", type=int, default=33)
    p.add_argument("--out", help="directory for hull.csv, pentagons.csv and outer.csv")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("simulate", help="random-coding Monte Carlo")
    p.add_argument("path")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--policy", help="JSON file with pi_a and pi_b")
    src.add_argument("--optimal", action="store_true", help="use a sum-rate optimal policy")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ra", type=float, required=True)
    p.add_argument("--rb", type=float, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--budget", type=int, default=1 << 16, help="cap on total codewords")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV file for the report")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="check a closed-form example")
    p.add_argument("example", choices=("modulo", "multiplier", "auxiliary"))
    p.add_argument("path", nargs="?")
    p.add_argument("--pr", type=float, default=0.1)
    p.add_argument("--ps", type=float, default=0.5)
    p.add_argument("--samples", type=int, default=10_000)
    _add_optimizer(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("equivalent", help="write the equivalent complete-CSIR channel")
    p.add_argument("path")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_equivalent)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValidationError, BudgetExceeded, OracleBudgetExceeded, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except VerificationFailed as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
