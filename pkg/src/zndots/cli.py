"""Command-line entry point: ``zndots <subcommand> [flags]``.

Exit status is 0 on success, 1 when a check that carries an explicit
guarantee fails (identity gaps, explicit-constant inequalities, coverage
above a bound), and 2 on invalid input.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import __version__
from . import _kernels as K
from . import dist_geometry as dist
from . import dot_geometry as dotg
from . import harness as H
from . import simplices
from ._stars import second_moment_sampled
from .ring_core import factorize


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    return [int(v) for v in text.split(",") if v.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="odd modulus >= 3")
    p.add_argument("--d", type=int, required=True, help="dimension")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--size", type=int, default=1, help="set size for the uniform generator")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--generator", default="uniform", help="uniform | divisible | full | file:<path>")
    p.add_argument("--metric", default="distance", choices=("distance", "dot", "dotproduct", "both"))
    p.add_argument("--mode", default="exact", choices=("exact", "sampled"))
    p.add_argument("--budget", type=int, default=10**6, help="tuple / sample budget")
    _output(p)


def _output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="write here instead of stdout (adds <out>.meta.json)")
    p.add_argument("--format", dest="fmt", default="csv", choices=("csv", "json"))
    p.add_argument("--threads", type=int, default=None, help="kernel thread count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zndots", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"zndots {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factor", help="factorisation, tau, gamma and phi of n")
    p.add_argument("value", type=int)
    _output(p)

    for name, text in (
        ("product-set", "dot-product set per trial"),
        ("distance-set", "distance set per trial"),
        ("mu", "ordered-pair dot-product counts per value"),
        ("stars", "average number of distinct k-stars"),
        ("mk", "second-moment statistic against its bound"),
        ("simplices", "simplex type census, density and saturation"),
    ):
        _common(sub.add_parser(name, help=text))

    p = sub.add_parser("sweep", help="product-set coverage over a grid of set sizes")
    _common(p)
    p.add_argument("--sizes", type=_int_list, default=None, help="comma list; defaults to --size")

    p = sub.add_parser("verify", help="Fourier identities and explicit-constant bounds")
    p.add_argument("--n-list", type=_int_list, default=[3, 9, 15])
    p.add_argument("--d-list", type=_int_list, default=[1, 2, 3])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=100)
    _output(p)

    p = sub.add_parser("thresholds", help="closed-form size thresholds")
    p.add_argument("n", type=int)
    p.add_argument("d", type=int)
    p.add_argument("k", type=int, nargs="?", default=None)
    p.add_argument("--ell", type=int, default=None, help="exponent when n = p**ell")
    p.add_argument("--size", type=int, default=0, help="set size to test the thresholds against")
    _output(p)
    return parser


def _config(args) -> H.ExperimentConfig:
    cfg = H.ExperimentConfig(
        n=args.n,
        d=args.d,
        k=args.k,
        generator=args.generator,
        set_size=args.size,
        trials=args.trials,
        seed=args.seed,
        mode=args.mode,
        budget=args.budget,
        metric=args.metric,
        out=args.out,
        fmt=args.fmt,
    )
    cfg.validate()
    return cfg


def _is_dot(metric: str) -> bool:
    return metric in ("dot", "dotproduct")


def _sets(cfg: H.ExperimentConfig):
    for trial in range(cfg.trials):
        yield trial, H.generate_set(cfg, trial)


def _cmd_factor(args) -> tuple[list[H.ExperimentRecord], int]:
    m = factorize(args.value)
    row = {
        "n": m.n,
        "factors": " ".join(f"{p}^{e}" for p, e in m.factors),
        "tau": m.tau,
        "gamma": m.gamma,
        "phi": m.phi,
    }
    return [H.ExperimentRecord({}, row)], 0


def _value_set_cmd(args, which) -> tuple[list[H.ExperimentRecord], int]:
    cfg = _config(args)
    records = []
    for trial, E in _sets(cfg):
        values = sorted(which(E))
        row = {"set_size": len(E), "trial": trial, "count": len(values), "values": values}
        records.append(H.ExperimentRecord(cfg.echo(), row))
    return records, 0


def _cmd_mu(args):
    cfg = _config(args)
    records = []
    for trial, E in _sets(cfg):
        hist = dotg.mu_histogram(E)
        dev = dotg.mu_deviation(E, hist)
        mean = len(E) ** 2 / E.n
        for t in range(E.n):
            row = {
                "set_size": len(E),
                "trial": trial,
                "t": t,
                "count": int(hist[t]),
                "expected": mean,
                "max_dev": dev.max_dev,
                "dev_bound": dev.bound,
                "dev_holds": dev.holds,
            }
            records.append(H.ExperimentRecord(cfg.echo(), row))
    failed = any(not r.measurements["dev_holds"] for r in records)
    return records, int(failed)


def _metric_list(metric: str) -> list[str]:
    return ["distance", "dotproduct"] if metric == "both" else ["dotproduct" if _is_dot(metric) else "distance"]


def _cmd_stars(args):
    cfg = _config(args)
    records = []
    for trial, E in _sets(cfg):
        for metric in _metric_list(cfg.metric):
            seed = [cfg.seed, trial, 2]
            fn = dotg.dot_star_average if _is_dot(metric) else dist.star_average
            avg = fn(E, cfg.k, cfg.budget, seed=seed)
            row = {
                "set_size": len(E),
                "trial": trial,
                "metric": metric,
                "estimate": avg.estimate,
                "stderr": avg.stderr,
                "exact": avg.exact,
                "samples": avg.samples,
            }
            records.append(H.ExperimentRecord(cfg.echo(), row))
    return records, 0


def _cmd_mk(args):
    cfg = _config(args)
    records = []
    failed = False
    for trial, E in _sets(cfg):
        for metric in _metric_list(cfg.metric):
            row = {"set_size": len(E), "trial": trial, "metric": metric}
            if cfg.mode == "sampled":
                seed = [cfg.seed, trial, 3]
                code = K.DOT if _is_dot(metric) else K.DISTANCE
                est = second_moment_sampled(E, cfg.k, cfg.budget, seed, code)
                row.update(value=est.estimate, stderr=est.stderr, samples=est.samples)
            elif _is_dot(metric):
                value = dotg.dot_k2_statistic(E, cfg.k)
                row["value"] = value
                if cfg.k == 1:
                    chk = dotg.dot_k1_bound_check(E, value)
                    row.update(
                        bound=chk.bound,
                        holds=chk.holds,
                        guaranteed=True,
                        bound_tau_free=chk.bound_tau_free,
                        holds_tau_free=chk.holds_tau_free,
                    )
                    failed |= not chk.holds
            else:
                chk = dist.m_k_bound_check(E, cfg.k)
                row.update(value=chk.value, bound=chk.bound, holds=chk.holds, guaranteed=chk.guaranteed)
                failed |= chk.guaranteed and not chk.holds
            records.append(H.ExperimentRecord(cfg.echo(), row))
    return records, int(failed)


def _cmd_simplices(args):
    return H.run_simplex_experiment(_config(args)), 0


def _cmd_sweep(args):
    cfg = _config(args)
    sizes = args.sizes if args.sizes is not None else [cfg.set_size]
    for s in sizes:
        if s < 1 or s > cfg.n**cfg.d:
            raise ValueError(f"set size {s} outside [1, n^d]")
    records = H.run_coverage_sweep(cfg, sizes)
    return records, int(any(r.measurements["guarantee_violated"] for r in records))


def _cmd_verify(args):
    records = H.run_identity_suite(args.n_list, args.d_list, seed=args.seed, instances=args.instances)
    return records, int(not H.suite_ok(records))


def _cmd_thresholds(args):
    m = factorize(args.n)
    reports = dotg.coverage_thresholds(m, args.d, ell=args.ell, set_size=args.size)
    if args.k is not None:
        reports.append(simplices.simplex_size_bound(m, args.d, args.k, set_size=args.size))
    records = []
    for r in reports:
        row = {
            "name": r.name,
            "bound": r.bound,
            "explicit": r.explicit,
            "vacuous": r.vacuous,
            "set_size": r.set_size,
            "applies": r.applies,
        }
        records.append(H.ExperimentRecord({"n": m.n, "d": args.d}, row))
    return records, 0


COMMANDS = {
    "factor": (_cmd_factor, None),
    "product-set": (lambda a: _value_set_cmd(a, dotg.product_set), None),
    "distance-set": (lambda a: _value_set_cmd(a, dist.distance_set), None),
    "mu": (_cmd_mu, None),
    "stars": (_cmd_stars, None),
    "mk": (_cmd_mk, None),
    "simplices": (_cmd_simplices, H.SIMPLEX_COLUMNS),
    "sweep": (_cmd_sweep, H.SWEEP_COLUMNS),
    "verify": (_cmd_verify, H.IDENTITY_COLUMNS),
    "thresholds": (_cmd_thresholds, None),
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        K.set_threads(args.threads)
    handler, columns = COMMANDS[args.command]
    try:
        records, status = handler(args)
        command = " ".join(sys.argv[1:] if argv is None else argv)
        text = H.write_records(records, args.out, args.fmt, columns, command=command)
    except (ValueError, OSError) as exc:
        print(f"zndots {args.command}: {exc}", file=sys.stderr)
        return 2
    if args.out is None:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
