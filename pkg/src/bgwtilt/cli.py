"""Command-line front end.

Every subcommand reads its distribution and set family from JSON files, takes
randomness only from ``--seed`` and writes either ``key=value`` lines or a CSV
whose first line is ``# config-hash=<hex>``.  Exit status is 0 on success,
2 when the configuration cannot be read and 3 when a computation rejects its
input.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

from . import exact, family, multitype, sample
from .dist import IntSet, Pmf, uniform
from .family import DirParam, SetFamily, TiltParam, parse_vector
from .tree import OrderedTree


class ConfigError(Exception):
    """Unreadable or inconsistent command-line configuration."""


# configuration


def _read_json(path) -> object:
    if path is None:
        raise ConfigError("a required file argument is missing")
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _load_pmf(path) -> Pmf:
    try:
        return Pmf.from_json_obj(_read_json(path))
    except (ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad distribution in {path}: {exc}") from exc


def _load_family(args, pmf: Pmf | None = None) -> SetFamily:
    pmf = pmf if pmf is not None else _load_pmf(args.pmf)
    try:
        return SetFamily.from_json_obj(pmf, _read_json(args.family))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad set family in {args.family}: {exc}") from exc


def _vector(text, name: str, exact_values: bool = True) -> tuple:
    if text is None:
        raise ConfigError(f"--{name} is required")
    try:
        return parse_vector(str(text), exact=exact_values)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse --{name} {text!r}") from exc


def _counts(text, name: str = "counts") -> tuple:
    try:
        return tuple(int(x) for x in str(text).split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse --{name} {text!r}") from exc


def _schedule(text) -> list[tuple]:
    if text is None:
        raise ConfigError("--schedule is required")
    return [_counts(part, "schedule") for part in str(text).split(";") if part.strip()]


def _number(text, name: str):
    try:
        return parse_vector(str(text))[0]
    except (ValueError, ZeroDivisionError, IndexError) as exc:
        raise ConfigError(f"cannot parse --{name} {text!r}") from exc


def config_hash(args) -> str:
    """Hash of the resolved flags and the bytes of every referenced file."""
    payload = {}
    for key, value in sorted(vars(args).items()):
        if key in ("func", "config", "out"):
            continue
        payload[key] = value
        if key in FILE_FLAGS and value is not None:
            try:
                payload[key + ":bytes"] = hashlib.sha256(Path(value).read_bytes()).hexdigest()
            except OSError:
                pass
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


FILE_FLAGS = ("pmf", "family", "p", "pprime")


def _csv(args, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# config-hash={config_hash(args)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


# subcommands


def cmd_tilt(args) -> str:
    F = _load_family(args)
    theta = _number(args.theta, "theta")
    if args.alpha is not None:
        p = family.p_dir(F, DirParam(theta, _vector(args.alpha, "alpha")))
    else:
        p = family.tilde_p(F, TiltParam(theta, _vector(args.beta, "beta")))
    return json.dumps(p.to_json_obj(), sort_keys=True) + "\n"


def cmd_critical(args) -> str:
    F = _load_family(args)
    sol = family.solve_critical(F, _vector(args.alpha, "alpha"))
    if sol.theta is None:
        raise ValueError(f"no critical tilt: {sol.reason}")
    theta = float(sol.theta)
    line = "theta=inf" if math.isinf(theta) else f"theta={theta:.12f}"
    if sol.degenerate:
        line += " degenerate=true"
    return line + "\n"


def cmd_generic(args) -> str:
    F = _load_family(args)
    v = family.is_generic(F, _vector(args.alpha, "alpha"))
    if v:
        return "generic=true\n"
    return f"generic=false clause={v.reason}\n"


def cmd_aperiodic(args) -> str:
    F = _load_family(args)
    alpha = _vector(args.alpha, "alpha")
    v = family.is_aperiodic(F, alpha)
    return f"aperiodic={'true' if v else 'false'} gcd={family.gamma_gcd(F, alpha)}\n"


def cmd_sample(args) -> str:
    F = _load_family(args)
    n = _counts(args.counts)
    if len(n) != F.J:
        raise ConfigError(f"--counts has {len(n)} entries, family has {F.J} classes")
    lines = []
    for i in range(args.number):
        rng = sample.make_rng(args.seed, i)
        lines.append(sample.sample_conditioned(F, n, rng, strategy=args.strategy).serialize())
    return "\n".join(lines) + "\n"


def cmd_rizzolo(args) -> str:
    try:
        t = OrderedTree.parse(args.tree)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.pmf is not None:
        F = _load_family(args)
    else:
        # without a distribution the support is the classes plus the tree's degrees
        F = _family_from_sets(_read_json(args.family), t)
    typed, _ = multitype.rizzolo(t, F)
    return typed.serialize() + "\n"


def _family_from_sets(obj, t: OrderedTree) -> SetFamily:
    try:
        sets = [IntSet.from_json_obj(s) for s in obj["sets"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad set family: {exc}") from exc
    degrees = set(t.degrees)
    for A in sets:
        if not A.is_finite():
            raise ConfigError("infinite classes need --pmf")
        degrees |= set(A.finite_part())
    try:
        return SetFamily(uniform(sorted(degrees)), sets)
    except ValueError as exc:
        raise ConfigError(f"bad set family: {exc}") from exc


def cmd_limit(args) -> str:
    F = _load_family(args)
    alpha = _vector(args.alpha, "alpha")
    p_alpha = family.critical_distribution(F, alpha)
    rows = []
    for n in _schedule(args.schedule):
        d = exact.local_limit_distance(F, alpha, n, args.height, degree_cap=args.degree_cap,
                                       p_alpha=p_alpha)
        # the distance is computed exactly, so its standard error is zero
        rows.append([";".join(map(str, n)), _fmt(d.tv), "0.0", _fmt(d.missing[0] + d.missing[1])])
    return _csv(args, ["n", "tv", "stderr", "missing_mass"], rows)


def cmd_ratio(args) -> str:
    F = _load_family(args)
    alpha = _vector(args.alpha, "alpha")
    shift = _counts(args.shift, "shift")
    if len(shift) != F.J:
        raise ConfigError(f"--shift has {len(shift)} entries, family has {F.J} classes")
    p_alpha = family.critical_distribution(F, alpha)
    rows = [[";".join(map(str, pt.n)), _fmt(pt.ratio), pt.status]
            for pt in exact.strong_ratio_check(p_alpha, F, _schedule(args.schedule), shift)]
    return _csv(args, ["n", "ratio", "status"], rows)


def cmd_counterexample(args) -> str:
    if args.nmin % 2 == 0 or args.nmin < 3 or args.step % 2:
        raise ConfigError("--nmin must be odd and at least 3, --step even")
    rows = []
    for n in range(args.nmin, args.nmax + 1, args.step):
        r = exact.counterexample_ratio(args.p0, args.p2, args.b, args.eps, n, args.c)
        rows.append([r.n, _fmt(r.log_b1), _fmt(r.log_b2), _fmt(r.ratio)])
    return _csv(args, ["n", "log_b1", "log_b2", "ratio"], rows)


def cmd_oracle(args) -> str:
    p = _load_pmf(args.p)
    p_prime = _load_pmf(args.pprime)
    try:
        F = SetFamily.from_json_obj(p, _read_json(args.family))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad set family in {args.family}: {exc}") from exc
    v = exact.compatibility_oracle(F, p_prime, args.bound)
    line = (f"compatible={'true' if v else 'false'} classes={v.checked_classes} "
            f"trees={v.checked_trees}")
    if not v:
        line += f" counts={','.join(map(str, v.counts))} tree={v.tree.serialize()}"
    return line + "\n"


# parser


def _common(sp, alpha: bool = True):
    sp.add_argument("--pmf", help="distribution JSON file")
    sp.add_argument("--family", help="set family JSON file")
    if alpha:
        sp.add_argument("--alpha", help="direction, e.g. 0.6,0.4")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bgwtilt", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of flag defaults")
    parser.add_argument("--out", help="write output here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("tilt", help="tilted distribution in a tilt or direction parametrization")
    _common(sp)
    sp.add_argument("--theta", default="1")
    sp.add_argument("--beta", help="class weights, e.g. 1/2,3/4")
    sp.set_defaults(func=cmd_tilt)

    sp = sub.add_parser("critical", help="critical tilt in a direction")
    _common(sp)
    sp.set_defaults(func=cmd_critical)

    sp = sub.add_parser("generic", help="genericity of a direction")
    _common(sp)
    sp.set_defaults(func=cmd_generic)

    sp = sub.add_parser("aperiodic", help="aperiodicity of a direction")
    _common(sp)
    sp.set_defaults(func=cmd_aperiodic)

    sp = sub.add_parser("sample", help="trees conditioned on class counts")
    _common(sp, alpha=False)
    sp.add_argument("--counts", required=False, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--number", type=int, default=1)
    sp.add_argument("--strategy", choices=("dp", "rejection", "cycle"), default="dp")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("rizzolo", help="remove A_0 vertices from a tree")
    _common(sp, alpha=False)
    sp.add_argument("--tree")
    sp.set_defaults(func=cmd_rizzolo)

    sp = sub.add_parser("limit", help="TV distance to the Kesten tree along a schedule")
    _common(sp)
    sp.add_argument("--schedule", help="count vectors separated by ';', e.g. 6,4;12,8")
    sp.add_argument("--height", type=int, default=1)
    sp.add_argument("--degree-cap", type=int, default=None)
    sp.set_defaults(func=cmd_limit)

    sp = sub.add_parser("ratio", help="strong ratio along a schedule")
    _common(sp)
    sp.add_argument("--schedule")
    sp.add_argument("--shift", default=None)
    sp.set_defaults(func=cmd_ratio)

    sp = sub.add_parser("counterexample", help="root condensation probabilities")
    sp.add_argument("--p0", type=float, default=0.72)
    sp.add_argument("--p2", type=float, default=0.08)
    sp.add_argument("--b", type=float, default=0.5)
    sp.add_argument("--c", type=float, default=None)
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--nmin", type=int, default=201)
    sp.add_argument("--nmax", type=int, default=2001)
    sp.add_argument("--step", type=int, default=2)
    sp.set_defaults(func=cmd_counterexample)

    sp = sub.add_parser("oracle", help="exact oracles")
    osub = sp.add_subparsers(dest="oracle", required=True)
    op = osub.add_parser("compat", help="compatibility of two distributions")
    op.add_argument("--p")
    op.add_argument("--pprime")
    op.add_argument("--family")
    op.add_argument("--bound", type=int, default=12)
    op.set_defaults(func=cmd_oracle)
    return parser


def _apply_config(parser, argv) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    obj = _read_json(args.config)
    if not isinstance(obj, dict):
        raise ConfigError("a config file must hold a JSON object")
    given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, value in obj.items():
        key = key.replace("-", "_")
        if not hasattr(args, key):
            raise ConfigError(f"unknown config key {key!r}")
        if key not in given:
            setattr(args, key, value)
    return args


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        if args.command == "sample" and args.counts is None:
            raise ConfigError("--counts is required")
        if args.command == "rizzolo" and args.tree is None:
            raise ConfigError("--tree is required")
        text = args.func(args)
    except ConfigError as exc:
        print(f"bgwtilt: configuration error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TimeoutError, ZeroDivisionError, OverflowError) as exc:
        print(f"bgwtilt: rejected: {exc}", file=sys.stderr)
        return 3
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
