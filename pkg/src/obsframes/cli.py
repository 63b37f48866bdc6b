"""Command-line interface.

Exit codes: 0 success, 2 infeasible configuration, 1 internal error.
"""

import argparse
import json
import math
import os
import sys

from . import _io
from .errors import ObsFrameError, ParameterError
from .estimation import estimate_noisy, estimation_report
from .framecore import build_frame, is_frame, leverage_scores
from .harness import ExperimentConfig, derive_seed, make_network, make_strategy, run_experiment
from .limits import limit_report
from .netmodel import LtiNetwork
from .sampling import SamplingStrategy
from .sparsify import greedy_sparsify, random_partition, randomized_sparsify, trace_csv

EXIT_OK, EXIT_INTERNAL, EXIT_INFEASIBLE = 0, 1, 2


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_network(args):
    if args.network:
        return LtiNetwork.from_json(_read(args.network))
    return make_network({"n": args.n, "a": args.a, "b": args.b, "d": args.d},
                        derive_seed(args.seed, 0))


def _load_strategy(path):
    text = _read(path)
    if path.endswith(".json"):
        return SamplingStrategy.from_json(text)
    return SamplingStrategy.from_csv(text)


def _omega(text):
    if text is None:
        return None
    return [int(v) for v in text.split(",") if v.strip()]


class Output:
    def __init__(self, directory, fmt):
        self.directory = directory
        self.fmt = fmt
        os.makedirs(directory, exist_ok=True)

    def text(self, name, text):
        _io.write_text(os.path.join(self.directory, name), text)

    def strategy(self, name, strategy):
        if self.fmt == "json":
            self.text(name + ".json", strategy.to_json())
        else:
            self.text(name + ".csv", strategy.to_csv())

    def summary(self, name, obj):
        self.text(name + ".json", _io.dumps(obj))


def cmd_generate_network(args, out):
    net = _load_network(args)
    out.text("network.json", net.to_json())
    return {"n": net.n, "norm2": net.norm2, "minpoly_degree": net.spectral.minpoly_degree}


def cmd_build_frame(args, out):
    net = _load_network(args)
    spec = {"kind": args.kind.replace("-", "_"), "omega": _omega(args.omega),
            "samples_per_location": args.samples, "tau": args.tau, "t_star": args.t_star,
            "N": args.rounds}
    if args.kind == "periodic":
        if args.delta is None:
            raise ParameterError("periodic sampling needs --delta")
        spec["delta"] = args.delta
        spec["horizon"] = args.samples
    strategy = make_strategy(net, spec, derive_seed(args.seed, 1))
    frame = build_frame(net, strategy)
    check = is_frame(frame)
    out.text("network.json", net.to_json())
    out.strategy("strategy", strategy)
    out.text("frame.csv", frame.to_csv())
    summary = {"samples": len(strategy), "is_frame": check.is_frame,
               "alpha": check.alpha, "beta": check.beta}
    out.summary("summary", summary)
    if not check:
        raise ObsFrameError("strategy does not produce a frame")
    return summary


def _frame_from_files(args):
    net = LtiNetwork.from_json(_read(args.network))
    strategy = _load_strategy(args.strategy)
    return net, strategy, build_frame(net, strategy)


def cmd_measure(args, out):
    net, strategy, frame = _frame_from_files(args)
    rep = estimation_report(frame, args.sigma).to_dict()
    rep["r_star"] = float(leverage_scores(frame).max())
    if args.trials:
        x0 = _io.make_rng(derive_seed(args.seed, 3)).standard_normal(net.n)
        mc = estimate_noisy(frame, x0, args.sigma, args.trials, derive_seed(args.seed, 4))
        rep["monte_carlo"] = mc.to_dict()
    out.summary("measures", rep)
    return rep


def cmd_sparsify(args, out):
    net, strategy, frame = _frame_from_files(args)
    seed = derive_seed(args.seed, 2)
    if args.method == "random":
        res = randomized_sparsify(frame, args.q, args.epsilon, seed)
        out.strategy("sparsified", res.kept)
        summary = res.to_dict()
        summary["seed"] = args.seed
    elif args.method == "partition":
        part = random_partition(frame, seed)
        out.strategy("partition_1", part.first.kept)
        out.strategy("partition_2", part.second.kept)
        summary = part.to_dict()
        summary["seed"] = args.seed
    else:
        res = greedy_sparsify(frame, args.measure, args.sigma, args.max_loss, args.keep_ratio)
        out.strategy("sparsified", res.kept)
        out.text("trace.csv", trace_csv(res.trace))
        summary = res.to_dict()
    out.summary("result", summary)
    return summary


def cmd_limits(args, out):
    net, strategy, frame = _frame_from_files(args)
    rd = re = None
    if is_frame(frame):
        rep = estimation_report(frame, args.sigma)
        rd, re = rep.rho_d, rep.rho_e
    lim = limit_report(net, strategy, args.sigma, args.delta, rd, re)
    out.text("limits.json", lim.to_json())
    return lim.to_dict()


def cmd_experiment(args, out):
    if args.config:
        cfg = _io.loads(_read(args.config))
    else:
        cfg = {}
    if args.name:
        cfg["experiment"] = args.name.replace("-", "_")
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.trials is not None:
        cfg["trials"] = args.trials
    config = ExperimentConfig.from_dict(cfg)
    result = run_experiment(config, out.directory, out.fmt)
    if not result.ok:
        raise ObsFrameError(result.summary["error"]["message"])
    if result.timings:
        print(_io.dumps({"timings": result.timings}), end="")
    return result.summary


def build_parser():
    p = argparse.ArgumentParser(prog="obsframes", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=None, help="master seed (u64)")
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--output", default="out", help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = p.add_subparsers(dest="command", required=True)

    def network_args(sp):
        sp.add_argument("--network", help="network JSON (else generate one)")
        sp.add_argument("--n", type=int, default=20)
        sp.add_argument("--a", type=float, default=1.0)
        sp.add_argument("--b", type=float, default=0.5)
        sp.add_argument("--d", type=float, default=0.3)

    sp = sub.add_parser("generate-network", help="random geometric network")
    network_args(sp)
    sp.set_defaults(func=cmd_generate_network)

    sp = sub.add_parser("build-frame", help="sampling strategy and its frame")
    network_args(sp)
    sp.add_argument("--kind", choices=("random", "periodic", "full-state", "sequential"),
                    default="random")
    sp.add_argument("--omega", help="comma-separated 0-based locations (default: all)")
    sp.add_argument("--samples", type=int, default=24)
    sp.add_argument("--tau", type=float, default=0.12)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--t-star", type=float, default=0.0)
    sp.add_argument("--rounds", type=int, default=12)
    sp.set_defaults(func=cmd_build_frame)

    def frame_args(sp):
        sp.add_argument("--network", required=True)
        sp.add_argument("--strategy", required=True, help="strategy .csv or .json")
        sp.add_argument("--sigma", type=float, default=0.1)

    sp = sub.add_parser("measure", help="estimation measures of a frame")
    frame_args(sp)
    sp.add_argument("--trials", type=int, default=0, help="Monte-Carlo trials (0 = skip)")
    sp.set_defaults(func=cmd_measure)

    sp = sub.add_parser("sparsify", help="sparsify a frame")
    sp.add_argument("method", choices=("random", "partition", "greedy"))
    frame_args(sp)
    sp.add_argument("--q", type=int)
    sp.add_argument("--epsilon", type=float, default=0.5)
    sp.add_argument("--measure", choices=("d", "e"), default="d")
    sp.add_argument("--keep-ratio", type=float, default=0.5)
    sp.add_argument("--max-loss", type=float, default=math.inf)
    sp.set_defaults(func=cmd_sparsify)

    sp = sub.add_parser("limits", help="fundamental limits for a strategy")
    frame_args(sp)
    sp.add_argument("--delta", type=float, help="sampling period for the Gramian limit")
    sp.set_defaults(func=cmd_limits)

    sp = sub.add_parser("experiment", help="run a configured experiment")
    sp.add_argument("name", nargs="?", help="experiment name (overrides config)")
    sp.add_argument("--trials", type=int)
    sp.set_defaults(func=cmd_experiment)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "experiment" and args.config:
        parser.error("--config only applies to the experiment subcommand")
    try:
        if args.seed is None and args.command != "experiment":
            args.seed = 0
        out = Output(args.output, args.format)
        args.func(args, out)
    except (ObsFrameError, OSError, json.JSONDecodeError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
