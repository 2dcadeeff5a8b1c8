"""Command line entry point: ``covertwalk {analytic,simulate,sweep,optimize,demo}``.

Parameter precedence, lowest first: built-in defaults, sweep preset,
``--config`` file, explicit flags. The config file is flat ``key = value``
text using the flag names (``lambda`` or ``lam``; dashes or underscores)::

    # fig2-like run
    s = 50
    r = 10
    k = 3
    n-values = 3-10
    trials = 20000
"""
from __future__ import annotations

import argparse
import contextlib
import hashlib
import json
import sys

from . import analytic
from .codec import CodecError, decode, encode
from .optimizer import EmptyGridError, grid_evaluate, pareto_frontier, verify_optimal_n
from .params import DelayModel, ParameterError, SystemParams, WalkModel
from .rng import Stream
from .simcore import run_trial
from .sweep import PRESET_BASE, PRESETS, SweepSpec, make_row, run_sweep, write_csv

DEFAULTS = dict(s=50, r=10, m=10.0, k=3, n=5, lam=1.0, w=50.0, model=1, walk="iid", trials=100_000, seed=0)

INT_KEYS = {"s", "r", "k", "n", "model", "trials", "seed", "threads", "r_max"}
FLOAT_KEYS = {"m", "lam", "w"}
LIST_KEYS = {"k_values", "n_values", "r_values"}
BOOL_KEYS = {"json", "theory_only"}
STR_KEYS = {"walk", "out", "preset", "backend", "message", "message_file", "transcript"}


def parse_int_list(text):
    """``"1-3,10,15"`` -> ``[1, 2, 3, 10, 15]``."""
    values = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = (int(x) for x in part.split("-", 1))
            if hi < lo:
                raise ParameterError(f"empty range {part!r}")
            values.extend(range(lo, hi + 1))
        else:
            values.append(int(part))
    if not values:
        raise ParameterError(f"empty value list {text!r}")
    return values


def _convert(key, raw):
    try:
        if key in INT_KEYS:
            return int(raw)
        if key in FLOAT_KEYS:
            return float(raw)
        if key in LIST_KEYS:
            return parse_int_list(raw)
        if key in BOOL_KEYS:
            return str(raw).strip().lower() in ("1", "true", "yes", "on")
    except ValueError:
        raise ParameterError(f"bad value for {key}: {raw!r}") from None
    return str(raw).strip()


def load_config(path):
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            sep = "=" if "=" in line else ":"
            if sep not in line:
                raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = (x.strip() for x in line.split(sep, 1))
            key = key.replace("-", "_")
            if key == "lambda":
                key = "lam"
            if key not in INT_KEYS | FLOAT_KEYS | LIST_KEYS | BOOL_KEYS | STR_KEYS:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _convert(key, raw)
    return values


def resolve(args, preset_aware=False):
    values = dict(DEFAULTS)
    config = load_config(args.config) if args.config else {}
    flags = {k: v for k, v in vars(args).items() if v is not None and k not in ("command", "func", "config")}
    preset = flags.get("preset") or config.get("preset")
    if preset_aware and preset:
        if preset not in PRESETS:
            raise ParameterError(f"unknown preset {preset!r}; choose from {', '.join(sorted(PRESETS))}")
        values.update(PRESET_BASE)
        values.update(PRESETS[preset])
    values.update(config)
    values.update(flags)
    return values


def params_from(values):
    return SystemParams(s=values["s"], r=values["r"], m=values["m"], k=values["k"], n=values["n"],
                        lam=values["lam"], w=values["w"])


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def cmd_analytic(args):
    v = resolve(args)
    params = params_from(v)
    model = DelayModel.parse(v["model"])
    report = {
        "model": int(model),
        **params.as_dict(),
        "chunk_length": params.chunk_length,
        "p_d": analytic.detection_probability(params),
        "p_c": analytic.covertness_probability(params),
        "expected_dissemination": analytic.expected_dissemination(params, model),
        "expected_collection": analytic.expected_collection(params, model),
        "expected_total": analytic.expected_total(params, model),
    }
    report["lambda"] = report.pop("lam")
    if v.get("json"):
        print(json.dumps(report))
        return 0
    print(f"model {int(model)}: s={params.s} r={params.r} m={params.m:g} k={params.k} n={params.n} "
          f"lambda={params.lam:g} W={params.w:g} (chunk length {params.chunk_length:g})")
    print(f"P_d       {report['p_d']!r}")
    print(f"P_c       {report['p_c']!r}")
    print(f"E[T_dis]  {report['expected_dissemination']!r}")
    print(f"E[T_col]  {report['expected_collection']!r}")
    print(f"E[T_tot]  {report['expected_total']!r}")
    return 0


def cmd_simulate(args):
    v = resolve(args)
    params = params_from(v)
    if v["trials"] < 1:
        raise ParameterError(f"trials must be >= 1 (got {v['trials']})")
    transcript = open(v["transcript"], "w") if v.get("transcript") else None
    try:
        with _output(v.get("out")) as fh:
            row = make_row(params, v["model"], v["walk"], v["trials"], v["seed"], backend=v.get("backend"),
                           threads=v.get("threads"), transcript=transcript)
            if v.get("json"):
                fh.write(json.dumps(row.as_dict()) + "\n")
            else:
                write_csv([row], fh)
    finally:
        if transcript is not None:
            transcript.close()
    return 0


def cmd_sweep(args):
    v = resolve(args, preset_aware=True)
    spec = SweepSpec(
        s=v["s"], r=v["r"], m=v["m"], k=v["k"], n=v["n"], lam=v["lam"], w=v["w"],
        model=v["model"], walk=v["walk"],
        r_values=v.get("r_values"), k_values=v.get("k_values"), n_values=v.get("n_values"),
        trials=v["trials"], seed=v["seed"], simulate=not v.get("theory_only"), out=v.get("out"),
    )
    spec.grid()  # validate before touching the output or simulating
    with _output(spec.out) as fh:
        rows = run_sweep(spec, backend=v.get("backend"), threads=v.get("threads"))
        write_csv(rows, fh)
    return 0


def cmd_optimize(args):
    v = resolve(args)
    base = params_from({**v, "k": 1, "n": 1})
    model = DelayModel.parse(v["model"])
    k_values = v.get("k_values") or list(range(1, base.r + 1))
    n_values = v.get("n_values") or list(range(1, base.r + 1))
    points = grid_evaluate(base, k_values, n_values, model)
    front = pareto_frontier(points)
    check = verify_optimal_n(v.get("r_max") or 60) if model is DelayModel.MODEL2 else None
    if v.get("out"):
        with _output(v["out"]) as fh:
            fh.write("k,n,p_c,expected_total\n")
            for p in front:
                fh.write(f"{p.k},{p.n},{p.p_c!r},{p.expected_total!r}\n")
    if v.get("json"):
        out = {
            "model": int(model),
            "points": len(points),
            "frontier": [dict(k=p.k, n=p.n, p_c=p.p_c, expected_total=p.expected_total) for p in front],
        }
        if check is not None:
            out["optimal_n_check"] = dict(r_max=check.r_max, checked=check.checked, ties=check.ties,
                                          mismatches=len(check.mismatches))
        print(json.dumps(out))
        return 0
    print(f"Pareto frontier, model {int(model)} ({len(front)} of {len(points)} points)")
    print(f"{'k':>3} {'n':>3} {'P_c':>12} {'E[T_tot]':>12}")
    for p in front:
        print(f"{p.k:>3} {p.n:>3} {p.p_c:>12.6g} {p.expected_total:>12.6g}")
    if check is not None:
        print(f"closed-form optimal n vs exhaustive search, 1 <= k <= r <= {check.r_max}: "
              f"{len(check.mismatches)} mismatches ({check.checked} pairs, {check.ties} ties)")
        for r, k, closed, winners in check.mismatches:
            print(f"  mismatch r={r} k={k}: closed form {closed}, exhaustive {winners}")
    return 0


def _describe(data: bytes):
    try:
        text = data.decode("utf-8")
        if text.isprintable() and len(text) <= 200:
            return repr(text)
    except UnicodeDecodeError:
        pass
    return f"{len(data)} bytes, sha256 {hashlib.sha256(data).hexdigest()[:16]}"


def cmd_demo(args):
    v = resolve(args)
    params = params_from(v)
    model = DelayModel.parse(v["model"])
    walk = WalkModel.parse(v["walk"])
    if v.get("message_file"):
        with open(v["message_file"], "rb") as fh:
            message = fh.read()
    elif v.get("message") is not None:
        message = v["message"].encode("utf-8")
    else:
        raise ParameterError("give --message or --message-file")
    if not message:
        raise ParameterError("message must be non-empty")

    chunks = encode(message, params.k, params.n)
    log, collected = [], []
    outcome = run_trial(Stream(v["seed"], 0), params, model, walk,
                        payloads=chunks.payloads(), collected=collected, log=log)
    recovered = decode(collected, params.k, params.n, chunks.message_length)
    if recovered != message:
        raise RuntimeError("decoded message differs from the input")

    transmissions = [e for e in log if e[0] in ("deposit", "retrieve")]
    if v.get("json"):
        print(json.dumps({
            "message_bytes": len(message), "chunk_bytes": chunks.chunk_length,
            "transmissions": len(transmissions),
            "dissemination_time": outcome.dissemination_time, "collection_time": outcome.collection_time,
            "total_time": outcome.total_time, "detections": outcome.detections,
            "detected": outcome.detected, "recovered": recovered == message,
        }))
        return 0
    print(f"message: {_describe(message)}")
    print(f"encoded into n={params.n} chunks of {chunks.chunk_length} bytes, any k={params.k} recover it")
    print(f"graph: s={params.s} vertices, r={params.r} relays; model {int(model)}, walk {walk.value}, seed {v['seed']}")
    detected_at = {(t, vert) for ev, t, vert, _ in log if ev == "detected"}
    for i, (ev, t, vert, chunk) in enumerate(transmissions, 1):
        who = "Alice -> relay" if ev == "deposit" else "relay -> Bob"
        flag = "  [seen by warden]" if (t, vert) in detected_at else ""
        print(f"  transmission {i}: {who} at vertex {vert}, chunk {chunk}, t={t:.3f}{flag}")
    print(f"transmissions: {len(transmissions)}")
    print(f"dissemination: {outcome.dissemination_time:.3f} ({outcome.dissemination_steps} visits)")
    print(f"collection:    {outcome.collection_time:.3f} ({outcome.collection_steps} visits)")
    print(f"total time:    {outcome.total_time:.3f}")
    print(f"recovered: {_describe(recovered)} (matches input)")
    print(f"verdict: {'detected' if outcome.detected else 'covert'} "
          f"({outcome.detections} of {outcome.transmissions} transmissions seen)")
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("protocol parameters")
    g.add_argument("--s", type=int, help="graph vertices (default 50)")
    g.add_argument("--r", type=int, help="relays (default 10)")
    g.add_argument("--m", type=float, help="message length in bits (default 10)")
    g.add_argument("--k", type=int, help="data chunks (default 3)")
    g.add_argument("--n", type=int, help="encoded chunks (default 5)")
    g.add_argument("--lambda", dest="lam", type=float, help="transmission tail rate (default 1)")
    g.add_argument("--w", type=float, help="warden window W (default 50)")
    g.add_argument("--model", choices=["1", "2"], help="delay model (default 1)")
    g.add_argument("--walk", choices=["iid", "noselfloop"], help="walk model (default iid)")
    g.add_argument("--trials", type=int, help="Monte Carlo trials (default 100000)")
    g.add_argument("--seed", type=int, help="master seed (default 0)")
    g.add_argument("--threads", type=int, help="worker threads for the simulator")
    g.add_argument("--backend", choices=["numba", "numpy"], help="simulation kernel backend")
    g.add_argument("--out", help="output path (default stdout)")
    g.add_argument("--json", action="store_const", const=True, help="machine-readable output")
    g.add_argument("--config", help="flat key = value parameter file")

    parser = argparse.ArgumentParser(prog="covertwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", parents=[common], help="closed-form covertness and delays")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo run, one CSV row")
    p.add_argument("--transcript", help="write per-trial event log (JSON lines) here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="grid of theory + simulation rows as CSV")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--k-values", dest="k_values", type=parse_int_list, help="e.g. 1-5 or 1,2,5")
    p.add_argument("--n-values", dest="n_values", type=parse_int_list)
    p.add_argument("--r-values", dest="r_values", type=parse_int_list)
    p.add_argument("--theory-only", dest="theory_only", action="store_const", const=True,
                   help="skip simulation; sim columns stay empty")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", parents=[common], help="Pareto frontier over (k, n)")
    p.add_argument("--k-values", dest="k_values", type=parse_int_list)
    p.add_argument("--n-values", dest="n_values", type=parse_int_list)
    p.add_argument("--r-max", dest="r_max", type=int, help="range for the optimal-n check (default 60)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("demo", parents=[common], help="encode, walk, collect and decode one message")
    p.add_argument("--message", help="literal message text")
    p.add_argument("--message-file", dest="message_file", help="read the message from a file")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, CodecError, EmptyGridError, OSError) as exc:
        print(f"covertwalk {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
