"""Command-line front end.

Subcommands:

* ``gen``           write a synthetic dataset (and QF matrix for histograms)
* ``ptolemaicity``  inequality satisfaction rates over sampled quadruples
* ``bench``         filtering-power benchmark (cost per mode and k)
* ``regions``       which bound filters what, at fixed-radius k-NN
* ``grid``          bound-to-distance ratio map over a planar grid
* ``query``         one range query against a built index, with stats

Output is CSV on stdout unless ``--out`` is given.  Every randomized
command takes ``--seed`` and is deterministic given it: running a command
twice with the same arguments produces byte-identical output.
"""

from __future__ import annotations

import argparse
import sys

from . import data as data_mod
from . import datagen, experiments, ptolemaicity
from .distances import QFMatrix, make_distance
from .index import FilterMode, build, linear_scan, range_query
from .pivots import (
    estimate_max_distance,
    estimate_max_distance_sweep,
    random_select,
    sss_select,
)


def resolve_distance(text):
    """Distance from a CLI spec: a plain name, ``qf:<matrix file>``, or a
    ``sqrt:`` prefix around either."""
    t = text.strip()
    if t.lower().startswith("sqrt:"):
        from .distances import sqrt_metric

        return sqrt_metric(resolve_distance(t[5:]))
    if t.lower().startswith("qf:"):
        return make_distance("qf", qf_matrix=QFMatrix(data_mod.load_matrix(t[3:])))
    return make_distance(t)


def _genspec_from_args(args):
    return datagen.GenSpec(
        kind=args.kind,
        n=args.n,
        dim=args.dim,
        clusters=args.clusters,
        variance=args.variance,
        seed=args.seed,
    )


def _add_gen_args(sub, with_kind_default=None):
    sub.add_argument("--kind", choices=datagen.KINDS, default=with_kind_default,
                     required=with_kind_default is None)
    sub.add_argument("--n", type=int, default=1000)
    sub.add_argument("--dim", type=int, default=10,
                     help="vector dimension, set universe size, or histogram bins")
    sub.add_argument("--clusters", type=int, default=10)
    sub.add_argument("--variance", type=float, default=0.1)


def _add_data_source(sub):
    src = sub.add_mutually_exclusive_group(required=True)
    src.add_argument("--dataset", help="path to a dataset file (fixed data every run)")
    src.add_argument("--gen", dest="kind", choices=datagen.KINDS,
                     help="generate the dataset, fresh per run")
    sub.add_argument("--n", type=int, default=1000)
    sub.add_argument("--dim", type=int, default=10)
    sub.add_argument("--clusters", type=int, default=10)
    sub.add_argument("--variance", type=float, default=0.1)


def _data_source(args):
    """(GenSpec or None, DataSet or None) from --dataset/--gen arguments."""
    if args.dataset is not None:
        return None, data_mod.DataSet.load(args.dataset)
    return _genspec_from_args(args), None


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommand bodies


def _cmd_gen(args):
    spec = _genspec_from_args(args)
    if spec.kind == "histograms":
        ds, matrix = datagen.synthetic_histograms(spec.n, spec.dim, spec.seed)
        if args.matrix_out:
            data_mod.save_matrix(matrix.array, args.matrix_out)
    elif spec.kind == "words":
        ds = datagen.random_words(spec.n, args.min_len, args.max_len, spec.seed)
    else:
        ds = datagen.generate(spec)
    return data_mod.format_dataset(ds)


def _cmd_ptolemaicity(args):
    gen, ds = _data_source(args)
    d = resolve_distance(args.distance)
    if ds is not None and ds.kind != d.kind:
        raise ValueError(f"distance {d.name} needs {d.kind} objects, dataset has {ds.kind}")
    report = ptolemaicity.ptolemaicity_rate(
        gen if gen is not None else ds,
        d,
        quadruples=args.quadruples,
        runs=args.runs,
        eps_rel=args.eps_rel,
        seed=args.seed,
        labeling=args.labeling,
    )
    return report.CSV_HEADER + "\n" + report.csv_row() + "\n"


def _bench_config(args, gen, ds, d):
    return experiments.BenchConfig(
        distance=d,
        gen=gen,
        data=ds,
        pivot_strategy=args.pivots,
        alpha=args.alpha,
        m_estimator=args.m_estimator,
        m_value=args.m_value,
        random_m=args.m,
        modes=tuple(FilterMode.parse(m) for m in args.modes.split(",")),
        ks=tuple(int(k) for k in args.ks.split(",")),
        queries=args.queries,
        runs=args.runs,
        seed=args.seed,
        exclude_self=args.exclude_self,
    )


def _cmd_bench(args):
    gen, ds = _data_source(args)
    d = resolve_distance(args.distance)
    cfg = _bench_config(args, gen, ds, d)
    rows = experiments.bench_filtering(cfg)
    return experiments.rows_to_csv(experiments.BENCH_HEADER, rows)


def _cmd_regions(args):
    gen, ds = _data_source(args)
    d = resolve_distance(args.distance)
    cfg = experiments.BenchConfig(
        distance=d,
        gen=gen,
        data=ds,
        queries=args.queries,
        runs=args.runs,
        seed=args.seed,
        exclude_self=args.exclude_self,
    )
    counts = [int(c) for c in args.pivot_counts.split(",")]
    rows = experiments.relative_power(cfg, counts, k=args.k)
    return experiments.rows_to_csv(experiments.REGIONS_HEADER, rows)


def _parse_point(text):
    return tuple(float(t) for t in text.split(","))


def _cmd_grid(args):
    d = resolve_distance(args.distance)
    spec = tuple(float(t) for t in args.grid.split(","))
    if len(spec) != 6:
        raise ValueError("--grid needs xmin,xmax,nx,ymin,ymax,ny")
    rows = experiments.bound_accuracy_grid(
        d,
        q=_parse_point(args.q),
        p=_parse_point(args.p),
        s=_parse_point(args.s),
        grid=spec,
    )
    return experiments.rows_to_csv(experiments.GRID_HEADER, rows)


def _cmd_query(args):
    ds = data_mod.DataSet.load(args.dataset)
    d = resolve_distance(args.distance)
    if ds.kind != d.kind:
        raise ValueError(f"distance {d.name} needs {d.kind} objects, dataset has {ds.kind}")
    if not 0 <= args.query_id < len(ds):
        raise ValueError(f"query id {args.query_id} out of range for n={len(ds)}")
    if args.pivots == "random":
        pivot_set = random_select(ds, args.m, args.seed)
    else:
        if args.m_value is not None:
            m_est = args.m_value
        elif args.m_estimator == "sweep":
            m_est = estimate_max_distance_sweep(ds, d.clone(), seed=args.seed)
        else:
            m_est = estimate_max_distance(ds, d.clone(), 10 * len(ds), args.seed)
        pivot_set = sss_select(ds, d.clone(), args.alpha, m_est, args.seed)
    table = build(ds, d, pivot_set)
    mode = FilterMode.parse(args.mode)
    q = ds.get(args.query_id)
    oracle = set(linear_scan(ds, d.clone(), q, args.radius))
    result, stats = range_query(table, q, args.radius, mode, oracle=oracle)
    header = "qid,radius,mode,m,resultCount,pivotDistances,candidates,total,falseNegatives,results"
    row = ",".join(
        (
            str(args.query_id),
            repr(args.radius),
            mode.value,
            str(table.m),
            str(len(result)),
            str(stats.pivot_distances),
            str(stats.candidates),
            str(stats.total),
            str(stats.false_negatives),
            ";".join(str(i) for i in result),
        )
    )
    return header + "\n" + row + "\n"


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ptolemaic",
        description="Pivot filtering with triangular and Ptolemaic bounds",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen", help="write a synthetic dataset")
    _add_gen_args(p)
    p.add_argument("--min-len", type=int, default=3, help="shortest word (words kind)")
    p.add_argument("--max-len", type=int, default=12, help="longest word (words kind)")
    p.add_argument("--matrix-out", help="also write the histogram QF matrix here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)

    p = subs.add_parser("ptolemaicity", help="inequality satisfaction rates")
    _add_data_source(p)
    p.add_argument("--distance", required=True)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--quadruples", type=int, default=10000)
    p.add_argument("--eps-rel", type=float, default=1e-9)
    p.add_argument("--labeling", choices=ptolemaicity.LABELINGS, default="sampled")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ptolemaicity)

    p = subs.add_parser("bench", help="filtering-power benchmark")
    _add_data_source(p)
    p.add_argument("--distance", required=True)
    p.add_argument("--pivots", choices=("sss", "random"), default="sss")
    p.add_argument("--alpha", type=float, default=0.4)
    p.add_argument("--m-estimator", choices=("sweep", "pairs"), default="sweep")
    p.add_argument("--m-value", type=float, help="explicit max-distance estimate")
    p.add_argument("--m", type=int, default=16, help="pivot count for --pivots random")
    p.add_argument(
        "--modes", default="triangular,ptolemaic-full,ptolemaic-partial,combined"
    )
    p.add_argument("--ks", default="10,20,30,40,50")
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--exclude-self", action="store_true",
                   help="radius covers k neighbors besides the query itself")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bench)

    p = subs.add_parser("regions", help="bound contribution breakdown")
    _add_data_source(p)
    p.add_argument("--distance", required=True)
    p.add_argument("--pivot-counts", default="10")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--exclude-self", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_regions)

    p = subs.add_parser("grid", help="bound accuracy over a planar grid")
    p.add_argument("--distance", default="l2")
    p.add_argument("--q", default="-1,0")
    p.add_argument("--p", default="0,0")
    p.add_argument("--s", default="1,0")
    p.add_argument("--grid", default="-3,3,121,-3,3,121",
                   help="xmin,xmax,nx,ymin,ymax,ny")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_grid)

    p = subs.add_parser("query", help="one range query with stats")
    p.add_argument("--dataset", required=True)
    p.add_argument("--distance", required=True)
    p.add_argument("--query-id", type=int, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--mode", default="combined")
    p.add_argument("--pivots", choices=("sss", "random"), default="random")
    p.add_argument("--m", type=int, default=8, help="pivot count for --pivots random")
    p.add_argument("--alpha", type=float, default=0.4)
    p.add_argument("--m-estimator", choices=("sweep", "pairs"), default="sweep")
    p.add_argument("--m-value", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_query)

    return parser


def cli_main(argv):
    """Run one subcommand; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        text = args.func(args)
        _emit(text, args.out)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry():
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    entry()
