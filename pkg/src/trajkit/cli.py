"""Command-line interface.

Subcommands: validate, info, relate, distmat, cluster, resample.
Exit codes: 0 success, 1 data/validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from . import clustering as cl
from . import io as tio
from .distance import BaseDistance
from .errors import (
    BothDegenerate,
    DegenerateRegion,
    DimensionUnsupported,
    EmptyMatchSet,
    TooFewClusters,
    TrajkitError,
    ValidationError,
)
from .model import bounding_region, path_length, resample, time_span
from .similarity import (
    MATRIX_METRICS,
    continuity_score,
    discrete_frechet,
    dtw,
    edit_distance_edr,
    lcss,
    spatial_distance,
)
from .spatial import direction_relation, measurement_compare, topological_relation
from .temporal import allen_relation, temporal_overlap_ratio

JOBS_ENV = "TRAJKIT_JOBS"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trajkit",
        description="Trajectory similarity and clustering toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, context=True):
        p.add_argument("points", help="points CSV (traj_id,t,x,y[,z])")
        p.add_argument("--config", help="key = value configuration file")
        if context:
            p.add_argument("--context", help="context CSV (traj_id,point_index,key,value)")
            p.add_argument("--semantics", help="semantics CSV (traj_id,start_index,end_index,label)")

    p = sub.add_parser("validate", help="parse and validate input files")
    add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("info", help="per-trajectory summary")
    add_common(p)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("relate", help="pairwise relations and distances of two trajectories")
    add_common(p)
    p.add_argument("--a", required=True, help="first trajectory id")
    p.add_argument("--b", required=True, help="second trajectory id")
    p.set_defaults(func=cmd_relate)

    p = sub.add_parser("distmat", help="compute a pairwise distance matrix")
    add_common(p)
    p.add_argument("--metric", choices=MATRIX_METRICS, help="distance metric (default from config)")
    p.add_argument("--out", required=True, help="output matrix CSV")
    p.add_argument("--jobs", type=int, help=f"worker processes (default ${JOBS_ENV} or 1)")
    p.set_defaults(func=cmd_distmat)

    p = sub.add_parser("cluster", help="cluster a distance matrix")
    p.add_argument("points", nargs="?", help="points CSV (when computing the matrix here)")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--context", help="context CSV")
    p.add_argument("--semantics", help="semantics CSV")
    p.add_argument("--matrix", help="precomputed matrix CSV (instead of points)")
    p.add_argument("--metric", choices=MATRIX_METRICS, help="metric when computing the matrix")
    p.add_argument("--jobs", type=int, help="worker processes for matrix computation")
    p.add_argument("--algo", required=True, choices=("dbscan", "agglo", "kmedoids"))
    p.add_argument("--eps", type=float, help="dbscan: neighborhood radius")
    p.add_argument("--min-pts", type=int, dest="min_pts", help="dbscan: core threshold")
    p.add_argument("--linkage", choices=cl.LINKAGES, help="agglo: linkage")
    p.add_argument("--k", type=int, help="agglo/kmedoids: cluster count")
    p.add_argument("--height", type=float, help="agglo: cut height")
    p.add_argument("--seed", type=int, help="kmedoids: seed echoed into the result")
    p.add_argument("--out", required=True, help="output clusters CSV")
    p.add_argument("--dendrogram", help="agglo: also write the merge list CSV")
    p.add_argument("--report", help="also write a text report")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("resample", help="resample trajectories onto k uniform timestamps")
    add_common(p, context=False)
    p.add_argument("--k", required=True, type=int, help="target point count (>= 2)")
    p.add_argument("--out", required=True, help="output points CSV")
    p.set_defaults(func=cmd_resample)

    return parser


def _run_config(args) -> tio.RunConfig:
    return tio.read_config(args.config) if args.config else tio.RunConfig()


def _bundle(args, cfg: tio.RunConfig) -> tio.DatasetBundle:
    return tio.load_dataset(
        args.points,
        context_path=getattr(args, "context", None),
        semantics_path=getattr(args, "semantics", None),
        schema=cfg.schema,
        mode=cfg.mode,
    )


def _jobs(args, cfg: tio.RunConfig) -> int:
    if getattr(args, "jobs", None) is not None:
        return args.jobs
    if cfg.jobs is not None:
        return cfg.jobs
    env = os.environ.get(JOBS_ENV)
    return int(env) if env else 1


def cmd_validate(args) -> int:
    cfg = _run_config(args)
    bundle = _bundle(args, cfg)
    for traj_id, enriched in bundle.trajectories.items():
        extras = []
        if enriched.context is not None:
            extras.append("context")
        if enriched.episodes:
            extras.append(f"{len(enriched.episodes)} episodes")
        suffix = f" ({', '.join(extras)})" if extras else ""
        print(f"{traj_id}: {len(enriched)} points, dim {enriched.trajectory.dimension}, ok{suffix}")
    print(f"{len(bundle)} trajectories valid")
    return 0


def cmd_info(args) -> int:
    cfg = _run_config(args)
    bundle = _bundle(args, cfg)
    base = BaseDistance(bundle.base_mode)
    for traj_id, enriched in bundle.trajectories.items():
        traj = enriched.trajectory
        span = time_span(traj)
        line = (
            f"{traj_id}: {len(traj)} points, duration {span.length:g}, "
            f"path length {path_length(traj, base):g}"
        )
        if traj.dimension == 2:
            r = bounding_region(traj)
            line += f", bounds [{r.x_min:g}, {r.x_max:g}] x [{r.y_min:g}, {r.y_max:g}]"
        print(line)
    return 0


def cmd_relate(args) -> int:
    cfg = _run_config(args)
    bundle = _bundle(args, cfg)
    for wanted in (args.a, args.b):
        if wanted not in bundle.trajectories:
            raise ValidationError(wanted, "not present in the points file")
    e1 = bundle.trajectories[args.a]
    e2 = bundle.trajectories[args.b]
    t1, t2 = e1.trajectory, e2.trajectory
    sim = cfg.similarity
    base = BaseDistance(bundle.base_mode)

    span1, span2 = time_span(t1), time_span(t2)
    print(f"allen = {allen_relation(span1, span2)}")
    try:
        print(f"temporal_overlap = {temporal_overlap_ratio(span1, span2):.6f}")
    except BothDegenerate:
        print("temporal_overlap = n/a (both spans are instants)")

    try:
        r1, r2 = bounding_region(t1), bounding_region(t2)
        try:
            print(f"topological = {topological_relation(r1, r2)}")
        except DegenerateRegion:
            print("topological = n/a (degenerate bounding region)")
        print(f"direction = {direction_relation(r1, r2)}")
    except DimensionUnsupported:
        print("topological = n/a (2-D only)")
        print("direction = n/a (2-D only)")

    m = measurement_compare(t1, t2, base)
    print(f"longer = {m.longer}")
    print(f"longer_duration = {m.longer_duration}")
    print(f"length_ratio = {m.length_ratio:.6f}")

    lockstep_cfg = replace(sim, spatial_metric="euclidean_lockstep", mode=bundle.base_mode)
    print(f"euclidean_lockstep = {spatial_distance(e1, e2, lockstep_cfg):.6f}")
    print(f"frechet = {discrete_frechet(t1, t2, base):.6f}")
    print(f"dtw = {dtw(t1, t2, base):.6f}")
    res = lcss(t1, t2, sim.epsilon, sim.delta, base)
    print(f"lcss_length = {res.length}")
    print(f"lcss_similarity = {res.similarity:.6f}")
    print(f"edr = {edit_distance_edr(t1, t2, sim.epsilon, base)}")
    try:
        print(f"continuity = {continuity_score(res.matches):.6f}")
    except EmptyMatchSet:
        print("continuity = n/a (no matched points)")
    return 0


def _compute_matrix(bundle, metric, cfg, jobs):
    sim = sim_with_mode(cfg.similarity, bundle.base_mode)
    if metric == "composite":
        return cl.composite_distance_matrix(
            bundle.enriched(), sim, jobs=jobs, schema=bundle.schema or None
        )
    return cl.distance_matrix(bundle.enriched(), metric, sim, jobs=jobs), None


def sim_with_mode(sim, base_mode):
    return sim if sim.mode == base_mode else replace(sim, mode=base_mode)


def cmd_distmat(args) -> int:
    cfg = _run_config(args)
    bundle = _bundle(args, cfg)
    metric = args.metric or cfg.metric
    matrix, _ = _compute_matrix(bundle, metric, cfg, _jobs(args, cfg))
    tio.write_matrix_csv(matrix, args.out)
    print(f"wrote {matrix.n} x {matrix.n} {metric} matrix to {args.out}")
    return 0


def cmd_cluster(args) -> int:
    if (args.matrix is None) == (args.points is None):
        return _usage_error("provide either a points file or --matrix, not both")
    cfg = _run_config(args)
    dimension_summary = None
    if args.matrix:
        matrix = tio.read_matrix_csv(args.matrix)
    else:
        bundle = _bundle(args, cfg)
        metric = args.metric or cfg.metric
        matrix, dimension_summary = _compute_matrix(bundle, metric, cfg, _jobs(args, cfg))

    eps = args.eps if args.eps is not None else cfg.eps
    min_pts = args.min_pts if args.min_pts is not None else cfg.min_pts
    linkage = args.linkage or cfg.linkage or "average"
    k = args.k if args.k is not None else cfg.k
    height = args.height if args.height is not None else cfg.height
    seed = args.seed if args.seed is not None else cfg.seed

    dendro = None
    if args.algo == "dbscan":
        if eps is None:
            return _usage_error("dbscan requires --eps")
        result = cl.dbscan(matrix, eps, min_pts)
    elif args.algo == "agglo":
        if (k is None) == (height is None):
            return _usage_error("agglo requires exactly one of --k or --height")
        dendro = cl.agglomerative(matrix, linkage)
        result = cl.cut_dendrogram(dendro, k=k, height=height)
    else:
        if k is None:
            return _usage_error("kmedoids requires --k")
        out = cl.k_medoids(matrix, k, seed)
        result = out.result
        print("medoids = " + ", ".join(out.medoid_ids))

    tio.write_clusters_csv(result, args.out)
    if args.dendrogram:
        if dendro is None:
            return _usage_error("--dendrogram is only valid with --algo agglo")
        tio.write_dendrogram_csv(dendro, args.dendrogram)
    sil = None
    try:
        sil = cl.silhouette(matrix, result)
    except TooFewClusters:
        pass
    if args.report:
        tio.write_report(
            args.report,
            parameters={"algorithm": args.algo, **result.params},
            dimension_summary=dimension_summary,
            silhouette=sil,
            cluster_result=result,
        )
    noise = f", {result.noise_count} noise" if result.noise_count else ""
    sil_text = "n/a" if sil is None else f"{sil:.4f}"
    print(f"{result.k} clusters{noise}, silhouette {sil_text}; wrote {args.out}")
    return 0


def _usage_error(message: str) -> int:
    print(f"usage error: {message}", file=sys.stderr)
    return 2


def cmd_resample(args) -> int:
    if args.k < 2:
        return _usage_error("--k must be >= 2")
    cfg = _run_config(args)
    bundle = _bundle(args, cfg)
    resampled = []
    for traj_id, enriched in bundle.trajectories.items():
        try:
            resampled.append(resample(enriched.trajectory, args.k))
        except TrajkitError as exc:
            raise ValidationError(traj_id, exc) from exc
    tio.write_points_csv(resampled, args.out)
    print(f"wrote {len(resampled)} trajectories at {args.k} points to {args.out}")
    return 0


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except TrajkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
