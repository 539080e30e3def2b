"""Command-line surface: generate, embed, metrics, project, and the
diagnostic harnesses. Every command writes a .manifest.json next to its
primary output; `--from-manifest` replays a recorded run.

Exit codes: 0 success, 2 usage, 3 data error, 4 numeric failure.
"""

import argparse
import sys
import time

import numpy as np

from . import __version__
from .angles import full_angle_matrix
from .data import DataMatrix
from .datagen import KINDS, DatasetSpec, generate
from .errors import AnglemapError, BadDims, BadSpec
from .fileio import (
    RunManifest,
    manifest_path,
    now_stamp,
    read_data_csv,
    read_embedding_csv,
    read_manifest,
    write_data_csv,
    write_embedding_csv,
    write_loss_trace_csv,
    write_scatter_svg,
    write_xy_csv,
)
from .geometry import apply_rotation, equator_rotation_search, mercator_project
from .metrics import compute_report
from .rng import METRIC_TAG, stream
from .spectral import (
    effective_rank,
    generate_spiked,
    latent_angles,
    naive_angle_estimates,
    pca,
    sample_distinct_triples,
    spectral_angle_estimates,
)
from .trainer import PRESETS, TrainConfig, fit


def _finish(command, params, inputs, outputs, t0, deterministic):
    manifest = RunManifest(
        command=command,
        params=params,
        seed=params.get("seed"),
        inputs=[str(p) for p in inputs],
        outputs=[str(p) for p in outputs],
        wall_time=time.perf_counter() - t0,
        deterministic=deterministic,
        created=now_stamp(),
    )
    manifest.write(manifest_path(outputs[0]))
    return 0


def cmd_generate(params, deterministic=True):
    t0 = time.perf_counter()
    spec = DatasetSpec(kind=params["kind"], n=params.get("n"), seed=params["seed"])
    params = dict(params, n=spec.n)
    data = generate(spec)
    out = params["out"]
    write_data_csv(out, data)
    print(f"wrote {data.n}x{data.d} {spec.kind} dataset to {out}")
    return _finish("generate", params, [], [out], t0, deterministic)


def _train_config(params) -> TrainConfig:
    preset = PRESETS.get(params.get("preset") or "", {})
    iterations = params.get("iterations")
    milestones = params.get("milestones")
    if iterations is None:
        iterations = preset.get("iterations", 1000)
    if milestones is None:
        milestones = preset.get("schedule_milestones", (350,))
    return TrainConfig(
        rank_r=params.get("rank"),
        iterations=iterations,
        learning_rate=params.get("learning_rate", 0.01),
        schedule_milestones=tuple(milestones),
        schedule_factor=params.get("schedule_factor", 0.1),
        batch_size=params.get("batch_size", 64),
        subsample_m=params.get("subsample", 64),
        seed=params["seed"],
        loss_space=params.get("loss_space", "cosine"),
        init_scheme=params.get("init_scheme", "padded_band"),
    )


def cmd_embed(params, deterministic=True):
    t0 = time.perf_counter()
    data = read_data_csv(params["input"])
    cfg = _train_config(params)
    params = dict(
        params,
        iterations=cfg.iterations,
        milestones=list(cfg.schedule_milestones),
        rank=cfg.resolve_rank(data.n, data.d),
    )
    lr_trace = []
    report = fit(data, cfg, progress=lambda it, value, lr: lr_trace.append(lr))
    out = params["out"]
    trace_out = params.get("loss_out") or (str(out).rsplit(".", 1)[0] + "_loss.csv")
    params["loss_out"] = trace_out
    write_embedding_csv(out, report.final_embedding)
    write_loss_trace_csv(trace_out, report.loss_trace, lr_trace)
    final = report.loss_trace[-1].value if report.loss_trace else float("nan")
    print(
        f"embedded {data.n} points (rank {report.rank_used}, "
        f"{cfg.iterations} iterations, final loss {final:.6f}, "
        f"{report.dropped_triples_total} dropped triples) -> {out}"
    )
    return _finish(
        "embed", params, [params["input"]], [out, trace_out], t0, deterministic
    )


def cmd_metrics(params, deterministic=True):
    t0 = time.perf_counter()
    data = read_data_csv(params["data"])
    emb = read_embedding_csv(params["embedding"])
    rank = params.get("rank") or min(50, data.n, data.d)
    params = dict(params, rank=rank)
    report = compute_report(
        data,
        emb,
        rank=rank,
        k_nn=params.get("k", 50),
        density_nn=params.get("density_nn", 25),
        angle_subsample=params.get("angle_subsample", 64),
        seed=params["seed"],
    )
    out = params["out"]
    csv_out = str(out).rsplit(".", 1)[0] + ".csv"
    with open(out, "w") as fh:
        fh.write(report.to_text())
    with open(csv_out, "w") as fh:
        fh.write(report.to_csv())
    for name, value in report.scores().items():
        print(f"{name}: {value:.4f}")
    return _finish(
        "metrics",
        params,
        [params["data"], params["embedding"]],
        [out, csv_out],
        t0,
        deterministic,
    )


def cmd_project(params, deterministic=True):
    t0 = time.perf_counter()
    emb = read_embedding_csv(params["embedding"])
    rot = equator_rotation_search(emb, params.get("granularity", 40))
    xy = mercator_project(apply_rotation(emb, rot))
    labels = None
    if params.get("color_by_label"):
        labeled = read_data_csv(params["color_by_label"])
        if labeled.n != emb.n:
            raise BadDims(
                f"label source has {labeled.n} rows, embedding has {emb.n}"
            )
        labels = labeled.labels
    out = params["out"]
    if params.get("format", "svg") == "svg":
        write_scatter_svg(out, xy, labels)
    else:
        write_xy_csv(out, xy)
    print(
        f"projected {emb.n} points (rotation alpha={rot.alpha:.4f}, "
        f"beta={rot.beta:.4f}) -> {out}"
    )
    inputs = [params["embedding"]]
    if params.get("color_by_label"):
        inputs.append(params["color_by_label"])
    return _finish("project", params, inputs, [out], t0, deterministic)


def cmd_theorem_harness(params, deterministic=True):
    t0 = time.perf_counter()
    r = params["r"]
    if r < 1:
        raise BadDims("r >= 1 required: the harness needs a signal component")
    sigmas = params["sigmas"]
    if len(sigmas) != r:
        raise BadSpec(f"need {r} sigma values, got {len(sigmas)}")
    model = generate_spiked(params["n"], params["d"], r, sigmas, params["seed"])
    triples = sample_distinct_triples(params["n"], params["triples"], params["seed"])
    truth = latent_angles(model, triples)
    spectral_est = spectral_angle_estimates(model.X, r, triples)
    naive_est = naive_angle_estimates(model.X, triples)
    err_spec = np.abs(spectral_est - truth)
    err_naive = np.abs(naive_est - truth)
    ordered = err_spec.mean() < err_naive.mean()

    out = params["out"]
    csv_out = str(out).rsplit(".", 1)[0] + ".csv"
    lines = [
        f"n={params['n']} d={params['d']} r={r} sigmas={list(sigmas)} "
        f"triples={params['triples']} seed={params['seed']}",
        f"spectral mean_abs_err={err_spec.mean()!r} median_abs_err={np.median(err_spec)!r}",
        f"naive    mean_abs_err={err_naive.mean()!r} median_abs_err={np.median(err_naive)!r}",
        f"spectral_beats_naive={'pass' if ordered else 'fail'}",
    ]
    with open(out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    with open(csv_out, "w") as fh:
        fh.write("estimator,mean_abs_err,median_abs_err\n")
        fh.write(f"spectral,{err_spec.mean()!r},{np.median(err_spec)!r}\n")
        fh.write(f"naive,{err_naive.mean()!r},{np.median(err_naive)!r}\n")
    for line in lines:
        print(line)
    return _finish(
        "theorem-harness", params, [], [out, csv_out], t0, deterministic
    )


def cmd_effective_rank(params, deterministic=True):
    t0 = time.perf_counter()
    data = read_data_csv(params["data"])
    rank = params.get("rank") or min(50, data.n, data.d)
    n_anchors = params["anchors"]
    if n_anchors > data.n:
        print(f"warning: {n_anchors} anchors requested, clipping to n={data.n}")
        n_anchors = data.n
    params = dict(params, rank=rank, anchors=n_anchors)
    scores = pca(data, rank).scores
    rng = stream(params["seed"], METRIC_TAG, 1)
    anchors = np.sort(rng.choice(data.n, size=n_anchors, replace=False))
    ranks = []
    for a in anchors:
        mat = full_angle_matrix(scores, int(a))
        cos = mat.cosines
        keep = np.setdiff1d(np.arange(cos.shape[0]), mat.degenerate)
        s = np.linalg.svd(cos[np.ix_(keep, keep)], compute_uv=False)
        ranks.append(effective_rank(s))
    ranks = np.asarray(ranks)

    out = params["out"]
    hist_out = str(out).rsplit(".", 1)[0] + "_hist.csv"
    with open(out, "w") as fh:
        fh.write("anchor,effective_rank\n")
        for a, er in zip(anchors, ranks):
            fh.write(f"{a},{er!r}\n")
    counts, edges = np.histogram(ranks, bins=min(20, max(3, n_anchors // 5)))
    with open(hist_out, "w") as fh:
        fh.write("bin_left,bin_right,count\n")
        for i, c in enumerate(counts):
            fh.write(f"{edges[i]!r},{edges[i + 1]!r},{c}\n")
    print(
        f"effective rank over {n_anchors} anchors: mean={ranks.mean():.3f}, "
        f"min={ranks.min():.3f}, max={ranks.max():.3f}"
    )
    return _finish(
        "effective-rank", params, [params["data"]], [out, hist_out], t0, deterministic
    )


_COMMANDS = {
    "generate": cmd_generate,
    "embed": cmd_embed,
    "metrics": cmd_metrics,
    "project": cmd_project,
    "theorem-harness": cmd_theorem_harness,
    "effective-rank": cmd_effective_rank,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anglemap",
        description="Angle-preserving sphere embeddings: data generation, "
        "training, evaluation, and 2D map export.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--from-manifest", metavar="FILE", help="replay a recorded run"
    )
    parser.add_argument(
        "--threads", type=int, default=None, help="cap BLAS thread pools"
    )
    parser.add_argument(
        "--deterministic",
        action="store_true",
        help="force single-threaded serial reductions",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("generate", help="write a synthetic dataset CSV")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("embed", help="train a sphere embedding from a data CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--iters", dest="iterations", type=int, default=None)
    p.add_argument("--lr", dest="learning_rate", type=float, default=0.01)
    p.add_argument(
        "--milestones", type=int, nargs="*", default=None, metavar="ITER"
    )
    p.add_argument("--schedule-factor", dest="schedule_factor", type=float, default=0.1)
    p.add_argument("--batch", dest="batch_size", type=int, default=64)
    p.add_argument("--subsample", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--loss-space", dest="loss_space", choices=("cosine", "angle"), default="cosine")
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p.add_argument(
        "--init-scheme",
        dest="init_scheme",
        choices=("padded_band", "zero_based"),
        default="padded_band",
    )

    p = sub.add_parser("metrics", help="score an embedding against its data")
    p.add_argument("--data", required=True)
    p.add_argument("--embedding", required=True)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--density-nn", dest="density_nn", type=int, default=25)
    p.add_argument("--angle-subsample", dest="angle_subsample", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("project", help="equator-align and export the 2D map")
    p.add_argument("--embedding", required=True)
    p.add_argument("--granularity", type=int, default=40)
    p.add_argument("--format", choices=("svg", "csv"), default="svg")
    p.add_argument(
        "--color-by-label",
        dest="color_by_label",
        metavar="DATA_CSV",
        help="data CSV whose label column colors the points",
    )
    p.add_argument("--out", required=True)

    p = sub.add_parser(
        "theorem-harness",
        help="compare spectral vs naive angle estimates on a spiked model",
    )
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--d", type=int, default=300)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--sigmas", type=float, nargs="+", default=[100.0, 100.0, 100.0])
    p.add_argument("--triples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser(
        "effective-rank", help="effective ranks of per-anchor angle matrices"
    )
    p.add_argument("--data", required=True)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--anchors", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    return parser


def _params_from_args(args) -> dict:
    skip = {"command", "from_manifest", "threads", "deterministic"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.from_manifest:
        manifest = read_manifest(args.from_manifest)
        command, params = manifest.command, manifest.params
        deterministic = manifest.deterministic
    elif args.command:
        command, params = args.command, _params_from_args(args)
        deterministic = args.deterministic
    else:
        parser.print_usage(sys.stderr)
        return 2

    limit = 1 if (args.deterministic or deterministic) else args.threads
    try:
        from threadpoolctl import threadpool_limits

        with threadpool_limits(limits=limit):
            return _COMMANDS[command](params, deterministic=deterministic)
    except AnglemapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
