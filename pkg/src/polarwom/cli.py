"""Command-line entry point.

Exit codes: 0 success (or condition holds), 1 condition fails
(check-condition only), 2 usage, config or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .channels import less_noisy_condition, mutual_info_xs, mutual_info_xy
from .codec import apply_write, decode, encode, freeze_bits
from .config import ConfigError, ExperimentConfig, construct, load_config
from .construction import IndexPartition, containment_report, exact_profile, save_json
from .harness import reports_to_csv, simulate, summarize
from .polar import InvalidInputError


class UsageError(Exception):
    pass


def _dump(obj: dict) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _write(path, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def read_bits(path) -> np.ndarray:
    with open(path) as fh:
        text = "".join(fh.read().split())
    if text and set(text) - {"0", "1"}:
        raise UsageError(f"{path}: expected an ASCII string of 0/1 characters")
    return np.frombuffer(text.encode(), dtype=np.uint8) - ord("0") if text else np.zeros(0, np.uint8)


def write_bits(path, bits) -> None:
    _write(path, "".join(str(int(b)) for b in bits))


def read_symbols(path) -> np.ndarray:
    """Space-separated symbol indices; a bare 0/1 string is read one symbol per character."""
    with open(path) as fh:
        text = fh.read().strip()
    try:
        if " " in text or "\n" in text or "\t" in text:
            return np.array([int(t) for t in text.split()], dtype=np.intp)
        return np.array([int(c) for c in text], dtype=np.intp)
    except ValueError:
        raise UsageError(f"{path}: expected integer symbol indices") from None


def write_symbols(path, y) -> None:
    _write(path, " ".join(str(int(v)) for v in y))


def _config(args) -> ExperimentConfig:
    if not getattr(args, "config", None):
        raise UsageError("--config is required")
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg.construction_seed = cfg.harness_seed = args.seed
    return cfg


def _partition(path, N: int) -> IndexPartition:
    with open(path) as fh:
        part = IndexPartition.from_json(json.load(fh))
    if part.N != N:
        raise UsageError(f"partition N={part.N} does not match config N={N}")
    return part


def _freeze(args, cfg, part):
    if getattr(args, "freeze", None):
        return freeze_bits(part, read_bits(args.freeze))
    return freeze_bits(part, cfg.freeze)


# ---------------------------------------------------------------- commands

def cmd_construct(args) -> int:
    cfg = _config(args)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    con = construct(cfg, workers=args.workers)
    echo = {"config": cfg.to_dict()}
    save_json(con.profile_state.to_json(echo), os.path.join(out, "profile_state.json"))
    save_json(con.profile_obs.to_json(echo), os.path.join(out, "profile_obs.json"))
    save_json(con.partition.to_json(), os.path.join(out, "partition.json"))
    rep = containment_report(con.partition)
    p = con.partition
    print(f"N={p.N} thresholds=({p.threshold_high:g}, {p.threshold_low:g})")
    print(f"|F|={len(p.F)} |G|={len(p.G)} message bits={len(p.message_set)}")
    print(f"design rate: {rep['design_rate']:.4f}")
    verdict = "holds" if rep["holds"] else f"VIOLATED at {len(rep['violations'])} indices"
    print(f"containment G subset of F: {verdict}")
    return 0


def cmd_check_condition(args) -> int:
    cfg = _config(args)
    model, ch = cfg.model, cfg.channel
    holds, margin = less_noisy_condition(model, ch)
    print(f"I(X;S) = {mutual_info_xs(model):.4f}")
    print(f"I(X;Y) = {mutual_info_xy(model, ch):.4f}")
    print(f"margin = {margin:+.4f}")
    print(f"verdict: {'holds' if holds else 'fails'}")
    return 0 if holds else 1


def cmd_simulate(args) -> int:
    cfg = _config(args)
    if not args.partition:
        raise UsageError("--partition is required")
    part = _partition(args.partition, cfg.N)
    trials = args.trials or cfg.trials
    reports = []
    for point in cfg.points():
        if point.N != part.N:
            raise UsageError(f"sweep point N={point.N} does not match partition N={part.N}")
        freeze = _freeze(args, point, part)
        results = simulate(point.model, point.channel, part, freeze, trials, point.harness_seed)
        reports.append(summarize(results, point.model, point.channel, part, point.to_dict()))
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    body = {"config": cfg.to_dict(), "partition": os.path.basename(args.partition),
            "points": [r.to_json() for r in reports]}
    _write(os.path.join(out, "report.json"), _dump(body))
    _write(os.path.join(out, "report.csv"), reports_to_csv(reports))
    for i, r in enumerate(reports):
        small = " (n<30)" if r.small_sample else ""
        print(f"point {i}: FER={r.frame_error_rate:.4f} [{r.fer_ci_low:.4f}, {r.fer_ci_high:.4f}]{small} "
              f"BER={r.bit_error_rate:.3g} rate={r.design_rate:.4f} containment={r.containment_holds}")
    return 0


def cmd_encode(args) -> int:
    cfg = _config(args)
    for flag in ("partition", "state", "message", "out"):
        if not getattr(args, flag):
            raise UsageError(f"--{flag} is required")
    part = _partition(args.partition, cfg.N)
    s = read_bits(args.state)
    msg = read_bits(args.message)
    if s.size != part.N:
        raise UsageError(f"state has {s.size} bits, expected {part.N}")
    if msg.size != len(part.message_set):
        raise UsageError(f"message has {msg.size} bits, partition carries {len(part.message_set)}")
    rng = np.random.default_rng(args.seed if args.seed is not None else cfg.harness_seed)
    res = encode(s, part, msg, _freeze(args, cfg, part), cfg.model, rng)
    write_bits(args.out, res.codeword)
    if args.stored:
        write_bits(args.stored, apply_write(s, res.codeword))
    if res.wom_violations:
        print(f"warning: {res.wom_violations} cells at 0 would need a 1", file=sys.stderr)
    return 0


def cmd_decode(args) -> int:
    cfg = _config(args)
    for flag in ("partition", "received", "out"):
        if not getattr(args, flag):
            raise UsageError(f"--{flag} is required")
    part = _partition(args.partition, cfg.N)
    y = read_symbols(args.received)
    if y.size != part.N:
        raise UsageError(f"received block has {y.size} symbols, expected {part.N}")
    write_bits(args.out, decode(y, part, _freeze(args, cfg, part), cfg.model, cfg.channel))
    return 0


def cmd_write(args) -> int:
    for flag in ("state", "codeword", "out"):
        if not getattr(args, flag):
            raise UsageError(f"--{flag} is required")
    s, x = read_bits(args.state), read_bits(args.codeword)
    if s.size != x.size:
        raise UsageError(f"state has {s.size} bits but codeword has {x.size}")
    write_bits(args.out, apply_write(s, x))
    return 0


def cmd_exact_oracle(args) -> int:
    cfg = _config(args)
    N = args.n or cfg.N
    body = {"config": cfg.to_dict(), "N": N}
    if args.kind in ("state", "both"):
        body["STATE"] = exact_profile(cfg.model, None, N).values.tolist()
    if args.kind in ("observation", "both"):
        body["OBSERVATION"] = exact_profile(cfg.model, cfg.channel, N).values.tolist()
    text = _dump(body)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON experiment config")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file or directory")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="override config seeds")

    p = argparse.ArgumentParser(prog="polarwom", description="Polar codes for noisy write-once memory.")
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", parents=[common], help="estimate profiles and build F, G")
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("check-condition", parents=[common], help="test I(X;Y) >= I(X;S)")
    c.set_defaults(func=cmd_check_condition)

    c = sub.add_parser("simulate", parents=[common], help="run the end-to-end experiment")
    c.add_argument("--partition")
    c.add_argument("--trials", type=int)
    c.add_argument("--freeze", help="file of freeze bits (default: config policy)")
    c.set_defaults(func=cmd_simulate)

    c = sub.add_parser("encode", parents=[common], help="encode a message against a cell state")
    c.add_argument("--partition")
    c.add_argument("--state", help="file with the current cell state bits")
    c.add_argument("--message", help="file with the message bits")
    c.add_argument("--freeze")
    c.add_argument("--stored", help="also write the cell contents after programming")
    c.set_defaults(func=cmd_encode)

    c = sub.add_parser("decode", parents=[common], help="decode a received block")
    c.add_argument("--partition")
    c.add_argument("--received", help="file with received symbols")
    c.add_argument("--freeze")
    c.set_defaults(func=cmd_decode)

    c = sub.add_parser("write", parents=[common], help="program a codeword over a cell state")
    c.add_argument("--state")
    c.add_argument("--codeword")
    c.set_defaults(func=cmd_write)

    c = sub.add_parser("exact-oracle", parents=[common], help="exact entropy profiles for N <= 8")
    c.add_argument("--n", type=int)
    c.add_argument("--kind", choices=("state", "observation", "both"), default="both")
    c.set_defaults(func=cmd_exact_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UsageError, InvalidInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, json.JSONDecodeError) as exc:
        print(f"error: malformed input file: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
