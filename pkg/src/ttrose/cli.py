"""Command-line interface: certify | census | spectrum | upper | entropy | folds | inp.

Exit codes: 0 success, 2 inconclusive certification, 1 error.  All file
output is deterministic for fixed flags and seed (no timestamps; sorted
keys); timing goes to the console only.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import census as census_mod
from . import family, folds, nielsen
from .rosemap import MapParseError, parse_map

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


def _parse_lengths(text: str):
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if ".." in chunk:
            a, b = chunk.split("..", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(chunk))
    if not out:
        raise ValueError("empty --len")
    return out


def _parse_inner_word(text: str):
    return tuple(int(ch) for ch in text)


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_map(args):
    with open(args.map_file, encoding="utf-8") as fh:
        return parse_map(fh.read())


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def cmd_certify(args) -> int:
    if args.word:
        z = _parse_inner_word(args.word)
        w = family.wrap_word(args.rank, z)
        cert = family.certify(args.rank, w, tol=args.tol)
    elif args.map_file:
        cert = family.certify_map(_load_map(args), tol=args.tol)
    else:
        print("certify needs --word or --map-file", file=sys.stderr)
        return EXIT_ERROR
    if args.format == "json":
        _emit(_json(cert.to_dict()), args.out)
    else:
        lines = []
        for key, value in cert.to_dict().items():
            if key == "schema":
                continue
            lines.append(f"{key}: {value}")
        _emit("\n".join(lines) + "\n", args.out)
    if args.out or args.format != "json":
        d = cert.to_dict()
        print(
            "certify: lone_axis=%s ageometric_fully_irreducible=%s index=%s"
            % (d["lone_axis"], d["ageometric_fully_irreducible"], d["index"]),
            file=sys.stderr,
        )
    return EXIT_INCONCLUSIVE if cert.inconclusive else EXIT_OK


def cmd_census(args) -> int:
    rows = census_mod.census(
        args.rank,
        _parse_lengths(args.len),
        mode=args.mode,
        count=args.count,
        seed=args.seed,
        tol=args.tol,
    )
    text = (
        census_mod.rows_to_csv(rows)
        if args.format == "csv"
        else census_mod.rows_to_jsonl(rows)
    )
    _emit(text, args.out)
    for row in rows:
        print(
            f"n={row.n}: tested={row.words_tested} certified={row.words_certified} "
            f"classes={row.conjugacy_classes} matrices={row.distinct_matrices} "
            f"elapsed={row.elapsed:.2f}s",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_spectrum(args) -> int:
    rows = census_mod.spectrum(
        args.rank,
        _parse_lengths(args.len),
        mode=args.mode,
        count=args.count,
        seed=args.seed,
        tol=args.tol,
    )
    if args.format == "csv":
        fields = [
            "n",
            "words_tested",
            "words_certified",
            "distinct_matrices",
            "distinct_char_polys",
            "distinct_lambda_buckets",
            "matrix_count_bound",
            "matrix_bound_ok",
        ]
        lines = [",".join(fields)]
        for row in rows:
            lines.append(",".join(str(row[f]) for f in fields))
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(census_mod.rows_to_jsonl(rows), args.out)
    return EXIT_OK


def cmd_upper(args) -> int:
    result = census_mod.upper_bound_experiment(args.rank, args.norm_budget, tol=args.tol)
    _emit(_json(result), args.out)
    if not result["entry_bound_ok"]:
        print("entry bound violated", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_entropy(args) -> int:
    if args.census:
        points = []
        with open(args.census, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                row = json.loads(line)
                points.append((math.log(row["n"]), float(row["conjugacy_classes"])))
        est = census_mod.entropy_estimate(points)
    elif args.synthetic:
        a, b, t0, t1 = args.synthetic.split(",")
        a, b = float(a), float(b)
        pts = [
            (t, (b**t) * math.log(a)) for t in range(int(t0), int(t1) + 1)
        ]
        est = census_mod.entropy_estimate(pts, scale="log")
    else:
        print("entropy needs --census <jsonl> or --synthetic a,b,t0,t1", file=sys.stderr)
        return EXIT_ERROR
    _emit(_json(est.to_dict()), args.out)
    return EXIT_OK


def cmd_folds(args) -> int:
    if args.word:
        w = family.wrap_word(args.rank, _parse_inner_word(args.word))
        g = family.build_family_map(args.rank, w)
    elif args.map_file:
        g = _load_map(args)
    else:
        print("folds needs --word or --map-file", file=sys.stderr)
        return EXIT_ERROR
    seq = folds.stallings_decomposition(g, granularity=args.granularity)
    payload = seq.to_dict()
    payload["replay_ok"] = folds.replay(g, seq)
    payload["fold_count_report"] = folds.fold_count_report(g)
    _emit(_json(payload), args.out)
    return EXIT_OK if payload["replay_ok"] else EXIT_ERROR


def cmd_inp(args) -> int:
    if args.word:
        w = family.wrap_word(args.rank, _parse_inner_word(args.word))
        g = family.build_family_map(args.rank, w)
    elif args.map_file:
        g = _load_map(args)
    else:
        print("inp needs --word or --map-file", file=sys.stderr)
        return EXIT_ERROR
    outcome = nielsen.unfolding_inp_search(
        g, period=args.period, max_depth=args.depth, tol=args.tol
    )
    payload = {
        "schema": 1,
        "status": outcome.status,
        "period": args.period,
        "candidates": [c.describe() for c in outcome.candidates],
        "notes": outcome.notes,
    }
    _emit(_json(payload), args.out)
    return EXIT_INCONCLUSIVE if outcome.status == "inconclusive" else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ttrose",
        description="train track calculus on rose graphs: certification and counting",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, rank_default=3):
        p.add_argument("--rank", type=int, default=rank_default)
        p.add_argument("--tol", type=float, default=1e-12)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("certify", help="run the certification pipeline on a word or map file")
    common(p)
    p.add_argument("--word", help="inner word digits, e.g. 23322")
    p.add_argument("--map-file")
    p.set_defaults(func=cmd_certify)

    for name, func in (("census", cmd_census), ("spectrum", cmd_spectrum)):
        p = sub.add_parser(name, help=f"{name} over full inner words")
        common(p)
        p.add_argument("--len", required=True, help="lengths: N, N..M, or comma list")
        p.add_argument("--mode", choices=["exhaustive", "sample"], default="exhaustive")
        p.add_argument("--count", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)

    p = sub.add_parser("upper", help="exhaustive expanding-irreducible count, norm-bounded")
    common(p, rank_default=2)
    p.add_argument("--norm-budget", type=int, required=True)
    p.set_defaults(func=cmd_upper, tol=1e-9)

    p = sub.add_parser("entropy", help="principal/secondary entropy regression")
    common(p)
    p.add_argument("--census", help="census JSONL file")
    p.add_argument("--synthetic", help="a,b,t0,t1 for omega(t)=a^(b^t)")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("folds", help="Stallings fold decomposition")
    common(p)
    p.add_argument("--word")
    p.add_argument("--map-file")
    p.add_argument("--granularity", choices=["maximal", "single"], default="maximal")
    p.set_defaults(func=cmd_folds)

    p = sub.add_parser("inp", help="unfolding search for indivisible Nielsen paths")
    common(p)
    p.add_argument("--word")
    p.add_argument("--map-file")
    p.add_argument("--period", type=int, default=1)
    p.add_argument("--depth", type=int, default=None)
    p.set_defaults(func=cmd_inp, tol=1e-9)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors; 2 means inconclusive here
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (MapParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except nielsen.InconclusiveCertificationError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
