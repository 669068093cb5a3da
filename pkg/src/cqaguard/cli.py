"""Command-line driver.

Subcommands: gen, train, replay, score, diag, serve, export-report.
Exit codes: 0 success, 1 usage error, 2 data/contract error, 3 internal
invariant violation or unexpected failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .diagnostics import diagnostic_report
from .errors import DataContractError, InternalInvariantError
from .features import feature_vector
from .logistic import classify, read_model, train, write_model
from .replay import (
    ADAPTIVE,
    FIXED,
    ReplayConfig,
    read_replay_report,
    replay,
    roc_split_experiment,
    write_replay_report,
)
from .features import build_training_set
from .sessions import CAMPAIGN, load_corpus, write_corpus
from .server import build_server, load_server_config
from .synth import SyntheticConfig, generate_synthetic
from .text import UserSpamCounts, WordStats, apply_label


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="cqaguard", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    p = sub.add_parser("gen",
                       help="generate a labeled synthetic corpus")
    p.add_argument("--out", required=True, help="corpus file to write")
    p.add_argument("--total", type=int, default=4998)
    p.add_argument("--campaign", type=int, default=None,
                   help="campaign session count (default: scaled 2147/4998)")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--users", type=int, default=420)
    p.add_argument("--posters", type=int, default=80)
    p.add_argument("--campaign-vocab", type=int, default=220)
    p.add_argument("--normal-vocab", type=int, default=800)
    p.add_argument("--shared-vocab", type=int, default=200)
    p.add_argument("--templates", type=int, default=11)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("train",
                       help="train a model from a labeled corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="model snapshot file to write")
    _add_train_flags(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("replay",
                       help="run the adaptive/fixed replay experiment")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="iteration report file to write")
    p.add_argument("--fixed", action="store_true",
                   help="freeze the seed model instead of retraining")
    p.add_argument("--seed-size", type=int, default=200)
    p.add_argument("--batch-size", type=int, default=200)
    _add_train_flags(p)
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("score",
                       help="score sessions with a trained model")
    p.add_argument("--model", required=True, help="model snapshot file")
    p.add_argument("--state", required=True,
                   help="labeled corpus that rebuilds the count database")
    p.add_argument("--input", required=True, help="sessions to score")
    p.add_argument("--out", default=None, help="verdict file (default stdout)")
    p.add_argument("--min-support", type=int, default=5)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("diag",
                       help="per-class distribution diagnostics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_diag)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", required=True, help="key=value server config file")
    p.add_argument("--listen", default=None, help="host:port override")
    p.add_argument("--corpus", default=None,
                   help="labeled corpus to preload before serving")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("export-report",
                       help="emit plot-ready tables from a replay report")
    p.add_argument("--report", required=True, help="replay report file")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--corpus", default=None,
                   help="labeled corpus for the fixed-split ROC table")
    p.add_argument("--train-size", type=int, default=3500)
    p.add_argument("--split-seed", type=int, default=0)
    p.set_defaults(func=_cmd_export)

    return parser


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--max-iters", type=int, default=20000)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--min-support", type=int, default=5)


def _cmd_gen(args) -> int:
    campaign = args.campaign
    if campaign is None:
        campaign = round(args.total * 2147 / 4998)
    if args.total <= 0:
        raise DataContractError("--total must be positive")
    if not 0 <= campaign <= args.total:
        raise DataContractError("--campaign must be between 0 and --total")
    cfg = SyntheticConfig(
        total_sessions=args.total,
        campaign_fraction=campaign / args.total,
        n_users=args.users,
        n_paid_posters=args.posters,
        campaign_vocab_size=args.campaign_vocab,
        normal_vocab_size=args.normal_vocab,
        shared_vocab_size=args.shared_vocab,
        template_count=args.templates,
        rng_seed=args.seed,
    )
    sessions = generate_synthetic(cfg)
    write_corpus(sessions, args.out)
    n_campaign = sum(1 for s in sessions if s.label == CAMPAIGN)
    print(
        f"wrote {len(sessions)} sessions "
        f"({n_campaign} campaign, {len(sessions) - n_campaign} normal) to {args.out}"
    )
    return 0


def _build_state(sessions):
    stats = WordStats()
    counts = UserSpamCounts()
    for s in sessions:
        if s.label is not None:
            apply_label(stats, counts, s, s.label)
    return stats, counts


def _cmd_train(args) -> int:
    corpus = load_corpus(args.corpus)
    stats, counts = _build_state(corpus)
    X, y, neutral = build_training_set(
        corpus, stats, counts, min_support=args.min_support
    )
    model = train(
        X, y,
        lr=args.lr, max_iters=args.max_iters, tol=args.tol,
        version=1, neutral_sgtext=neutral,
    )
    write_model(model, args.out)
    print(
        f"trained model v{model.version} on {model.trained_count} sessions -> {args.out}"
    )
    return 0


def _cmd_replay(args) -> int:
    corpus = load_corpus(args.corpus)
    cfg = ReplayConfig(
        seed_size=args.seed_size,
        batch_size=args.batch_size,
        mode=FIXED if args.fixed else ADAPTIVE,
        lr=args.lr,
        max_iters=args.max_iters,
        tol=args.tol,
        min_support=args.min_support,
    )
    reports = replay(corpus, cfg)
    write_replay_report(reports, args.out)
    print(f"{cfg.mode} replay: {len(reports)} iterations -> {args.out}")
    return 0


def _cmd_score(args) -> int:
    model = read_model(args.model)
    state_corpus = load_corpus(args.state)
    stats, counts = _build_state(state_corpus)
    targets = load_corpus(args.input)
    lines = ["url\tscore\tlabel"]
    for s in targets:
        fv = feature_vector(
            s, stats, counts,
            neutral=model.neutral_sgtext,
            min_support=args.min_support,
        )
        label, score = classify(model, fv)
        lines.append(f"{s.url}\t{score!r}\t{label}")
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"scored {len(targets)} sessions -> {args.out}")
    return 0


def _cmd_diag(args) -> int:
    corpus = load_corpus(args.corpus)
    report = diagnostic_report(corpus)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    cdf_lines = ["feature\tclass\tvalue\tcumulative_probability"]
    for item in report:
        for cls, table in (("normal", item.cdf_normal), ("campaign", item.cdf_campaign)):
            for value, prob in table.points:
                cdf_lines.append(f"{item.feature}\t{cls}\t{value!r}\t{prob!r}")
    (out_dir / "cdf.tsv").write_text("\n".join(cdf_lines) + "\n", encoding="utf-8")

    verdict_lines = ["feature\tks_statistic\tverdict"]
    for item in report:
        verdict_lines.append(f"{item.feature}\t{item.ks!r}\t{item.verdict}")
    (out_dir / "verdicts.tsv").write_text(
        "\n".join(verdict_lines) + "\n", encoding="utf-8"
    )
    for item in report:
        print(f"{item.feature}: ks={item.ks:.4f} -> {item.verdict}")
    return 0


def _cmd_serve(args) -> int:
    config = load_server_config(args.config)
    host = port = None
    if args.listen is not None:
        raw_host, sep, raw_port = args.listen.rpartition(":")
        if not sep or not raw_host:
            raise DataContractError("--listen must be host:port")
        try:
            port = int(raw_port)
        except ValueError:
            raise DataContractError("--listen port must be an integer") from None
        host = raw_host
    preload = load_corpus(args.corpus) if args.corpus else ()
    server = build_server(config, host=host, port=port, preload=preload)
    bound_host, bound_port = server.address
    print(f"serving on http://{bound_host}:{bound_port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
        server.app.store.close()
    return 0


def _cmd_export(args) -> int:
    reports = read_replay_report(args.report)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def cell(v):
        return "" if v is None else repr(v)

    metric_lines = [
        "iteration\ttraining_size\ttest_size\ttp\tfp\ttn\tfn"
        "\tprecision\trecall\tf_measure\taccuracy"
    ]
    theta_lines = ["iteration\ttheta_0\ttheta_1\ttheta_2\ttheta_3"]
    for r in reports:
        m = r.metrics
        metric_lines.append(
            f"{r.iteration_index}\t{r.training_size}\t{r.test_size}"
            f"\t{m.tp}\t{m.fp}\t{m.tn}\t{m.fn}"
            f"\t{cell(m.precision)}\t{cell(m.recall)}\t{cell(m.f_measure)}"
            f"\t{m.accuracy!r}"
        )
        theta_lines.append(
            f"{r.iteration_index}\t" + "\t".join(repr(t) for t in r.theta_snapshot)
        )
    (out_dir / "metrics_over_time.tsv").write_text(
        "\n".join(metric_lines) + "\n", encoding="utf-8"
    )
    (out_dir / "theta_over_time.tsv").write_text(
        "\n".join(theta_lines) + "\n", encoding="utf-8"
    )
    written = ["metrics_over_time.tsv", "theta_over_time.tsv"]

    if args.corpus is not None:
        corpus = load_corpus(args.corpus)
        experiment = roc_split_experiment(
            corpus, train_size=args.train_size, rng_seed=args.split_seed
        )
        roc_lines = ["threshold\tfpr\ttpr"]
        for point in experiment.points:
            roc_lines.append(f"{point.threshold!r}\t{point.fpr!r}\t{point.tpr!r}")
        (out_dir / "roc.tsv").write_text("\n".join(roc_lines) + "\n", encoding="utf-8")
        written.append("roc.tsv")
    print(f"wrote {', '.join(written)} to {out_dir}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if getattr(args, "func", None) is None:
        print("usage error: a subcommand is required (see --help)", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - last resort
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
