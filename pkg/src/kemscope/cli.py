"""Command-line front end.

Every subcommand parses arguments, seeds, calls one library function and
serializes the result.  CSV goes to stdout by default and the effective
configuration is echoed to stderr as ``#`` lines; ``--json`` instead wraps
everything in one envelope on stdout.

Exit codes: 0 success, 1 validation failure (KAT mismatch, malformed input
file), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import __version__, bench_harness, cer_analysis
from . import compression_lab as lab
from . import handshake_model as hs
from .mlkem_core import kat, kem
from .mlkem_core.params import STANDARD, KemParams, ParameterError, get_preset

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    def __init__(self, message: str, results=None):
        super().__init__(message)
        self.results = results


class Report:
    """Results payload plus its CSV rendering."""

    def __init__(self, results, rows: list[dict] | None = None, text: str | None = None):
        self.results = results
        self.rows = rows
        self.text = text

    def csv(self) -> str:
        if self.text is not None:
            return self.text
        if not self.rows:
            return ""
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(self.rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()


# subcommands that consume randomness draw a seed when none is given
RANDOMIZED = {"kem keygen", "kem encaps", "dfr", "quantizer", "bench"}


def _params(name: str) -> KemParams:
    try:
        return get_preset(name)
    except (KeyError, ParameterError) as exc:
        raise UsageError(str(exc)) from None


def _read_hex(value: str | None, path: str | None, what: str) -> bytes:
    if (value is None) == (path is None):
        raise UsageError(f"give exactly one of --{what} or --{what}-file")
    text = value if value is not None else Path(path).read_text()
    try:
        return bytes.fromhex("".join(text.split()))
    except ValueError:
        raise UsageError(f"--{what} is not valid hex") from None


def _pairs(text: str) -> list[tuple[int, int]]:
    try:
        out = []
        for item in text.split(";"):
            du, dv = item.split(",")
            out.append((int(du), int(dv)))
        return out
    except ValueError:
        raise UsageError(f"--pairs expects 'du,dv;du,dv', got {text!r}") from None


# --- subcommand adapters -------------------------------------------------

def cmd_cer(args) -> Report:
    if args.table1:
        records = cer_analysis.cer_table()
    else:
        if args.k is None:
            raise UsageError("cer needs --table1 or --k/--du/--dv")
        records = [cer_analysis.cer_record(args.label or f"k={args.k}", args.k, args.du, args.dv, args.k_bits)]
    rows = [r.as_row() for r in records]
    return Report(rows, text=cer_analysis.to_csv(records))


def cmd_kem_keygen(args) -> Report:
    params = _params(args.params)
    if args.seed_hex:
        material = _read_hex(args.seed_hex, None, "seed-hex")
    else:
        material = kem.derive_seeds(args.seed, 0, 1, 64)[0]
    pair = kem.keygen(params, material)
    row = {"params": params.name, "ek": pair.encaps_key.hex(), "dk": pair.decaps_key.hex()}
    return Report(row, [row])


def cmd_kem_encaps(args) -> Report:
    params = _params(args.params)
    ek = _read_hex(args.ek, args.ek_file, "ek")
    randomness = _read_hex(args.m, None, "m") if args.m else kem.derive_seeds(args.seed, 0, 1, 32)[0]
    ct, ss = kem.encaps(params, ek, randomness)
    row = {"params": params.name, "ct": bytes(ct).hex(), "ss": ss.hex()}
    return Report(row, [row])


def cmd_kem_decaps(args) -> Report:
    params = _params(args.params)
    dk = _read_hex(args.dk, args.dk_file, "dk")
    ct = _read_hex(args.ct, args.ct_file, "ct")
    row = {"params": params.name, "ss": kem.decaps(params, dk, ct).hex()}
    return Report(row, [row])


def cmd_kem_kat(args) -> Report:
    params = _params(args.params) if args.params else None
    try:
        report = kat.validate_kat(args.file, params)
    except kat.KatParseError as exc:
        raise ValidationFailure(f"{args.file}: {exc}") from None
    rows = [{"vector": r.vector, "stage": r.stage, "passed": r.passed, "detail": r.detail} for r in report.results]
    results = {"ok": report.ok, "failing_vectors": report.failing_vectors, "stages": rows}
    if not report.ok:
        raise ValidationFailure(f"KAT mismatch in vector(s) {report.failing_vectors}", Report(results, rows))
    return Report(results, rows)


def _quantizer(args) -> lab.QuantizerSpec:
    if args.quantizer == "uniform":
        return lab.QuantizerSpec.uniform(args.du, args.dv)
    if args.quantizer == "semi_compressed":
        return lab.QuantizerSpec.semi_compressed(args.du)
    params = _params(args.params)
    u = lab.harvest_coefficients(params, args.train_trials, args.seed, "u")
    u_book = lab.train_lloyd_max(args.du, u, args.iterations, args.seed)
    v_book = None
    if args.dv < 12:
        v = lab.harvest_coefficients(params, args.train_trials, args.seed, "v")
        v_book = lab.train_lloyd_max(args.dv, v, args.iterations, args.seed)
    return lab.QuantizerSpec.lloyd_max(u_book, v_book, dv=args.dv)


def cmd_dfr(args) -> Report:
    params = _params(args.params)
    args.du = params.du if args.du is None else args.du
    args.dv = params.dv if args.dv is None else args.dv
    est = lab.estimate_dfr(params, _quantizer(args), args.trials, args.seed, workers=args.workers)
    row = est.to_dict()
    return Report(row, [row])


def cmd_quantizer(args) -> Report:
    params = _params(args.params)
    rows = lab.compare_quantizers(params, _pairs(args.pairs), args.trials, args.seed,
                                  training_trials=args.train_trials, iterations=args.iterations,
                                  workers=args.workers)
    dicts = [r.to_dict() for r in rows]
    return Report(dicts, dicts)


def _calibration(path: str | None) -> hs.Calibration:
    if path is None:
        return hs.SHIPPED_CALIBRATION
    with open(path, newline="") as fh:
        observed = [(r["kex"], r["auth"], float(r["total"])) for r in csv.DictReader(fh)]
    return hs.calibrate_base(observed)


def cmd_payload(args) -> Report:
    calibration = _calibration(args.calibrate)
    if args.table2:
        rows = hs.payload_table(calibration=calibration)
    else:
        if not (args.kex and args.auth):
            raise UsageError("payload needs --table2 or --kex and --auth")
        rows = [hs.handshake_payload(args.kex, args.auth, calibration)]
    dicts = [r.as_row() for r in rows]
    return Report({"rows": dicts, "calibration": calibration.report()}, text=hs.to_csv(rows))


def cmd_trace(args) -> Report:
    if args.synthesize:
        breakdown = hs.handshake_payload(args.kex, args.auth)
        records = hs.synthesize_trace(breakdown)
        summary = hs.analyze_trace(records)
        header = f"{breakdown.kex} + {breakdown.auth}, total {summary.total}"
        return Report({"records": [[r.direction.value, r.payload_len] for r in records],
                       "summary": summary.to_dict()}, text=hs.format_trace(records, header))
    if not args.file:
        raise UsageError("trace needs --file or --synthesize")
    try:
        records = hs.load_trace(args.file)
    except hs.TraceParseError as exc:
        raise ValidationFailure(f"{args.file}: {exc}") from None
    summary = hs.analyze_trace(records).to_dict()
    return Report(summary, [summary])


def cmd_rate(args) -> Report:
    if args.input:
        result = hs.rate_from_json(Path(args.input).read_text())
    else:
        profile = hs.NetProfile(args.delay, args.loss, args.rto, args.rtts, args.packets)
        result = hs.simulate_handshake_rate(profile, args.crypto_time, args.duration)
    d = result.to_dict()
    row = {**d["profile"], **{k: v for k, v in d.items() if k != "profile"}}
    return Report(d, [row])


def cmd_bench(args) -> Report:
    sets = [_params(p) for p in args.params.split(",")] if args.params else list(STANDARD)
    suite = bench_harness.bench_suite(sets, args.min_duration, args.seed, args.warmup, args.repeats, args.batch)
    return Report(suite.to_dict(), text=bench_harness.to_csv(suite.results))


# --- parser ----------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON envelope instead of CSV")
    common.add_argument("--seed", type=int, help="master seed (drawn and printed when omitted)")
    common.add_argument("--config", help="key=value file; command-line flags override it")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="kemscope", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name: str, handler: Callable, help: str, target=sub) -> argparse.ArgumentParser:
        p = target.add_parser(name, parents=[common], help=help, description=help)
        p.set_defaults(handler=handler)
        return p

    p = add("cer", cmd_cer, "ciphertext expansion rate")
    p.add_argument("--table1", action="store_true", help="the six reference configurations")
    p.add_argument("--k", type=int)
    p.add_argument("--du", type=int, default=10)
    p.add_argument("--dv", type=int, default=4)
    p.add_argument("--k-bits", type=int, default=cer_analysis.DEFAULT_K_BITS)
    p.add_argument("--label")

    p = sub.add_parser("kem", help="ML-KEM operations and known-answer validation")
    ksub = p.add_subparsers(dest="kem_command", required=True, metavar="OP")
    p = add("keygen", cmd_kem_keygen, "generate a key pair", ksub)
    p.add_argument("--params", default="ML-KEM-768")
    p.add_argument("--seed-hex", help="explicit 64-byte d||z seed")
    p = add("encaps", cmd_kem_encaps, "encapsulate to a public key", ksub)
    p.add_argument("--params", default="ML-KEM-768")
    p.add_argument("--ek")
    p.add_argument("--ek-file")
    p.add_argument("--m", help="explicit 32-byte randomness")
    p = add("decaps", cmd_kem_decaps, "decapsulate a ciphertext", ksub)
    p.add_argument("--params", default="ML-KEM-768")
    p.add_argument("--dk")
    p.add_argument("--dk-file")
    p.add_argument("--ct")
    p.add_argument("--ct-file")
    p = add("kat", cmd_kem_kat, "validate a known-answer vector file", ksub)
    p.add_argument("--file", required=True)
    p.add_argument("--params", help="force a parameter set instead of inferring it")

    def quantizer_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--params", default="ML-KEM-512")
        p.add_argument("--trials", type=int, default=10_000)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--train-trials", type=int, default=500)
        p.add_argument("--iterations", type=int, default=50)

    p = add("dfr", cmd_dfr, "Monte-Carlo decryption failure rate")
    quantizer_args(p)
    p.add_argument("--quantizer", choices=[k.value for k in lab.QuantizerKind], default="uniform")
    p.add_argument("--du", type=int, help="default: the preset's du")
    p.add_argument("--dv", type=int, help="default: the preset's dv")

    p = add("quantizer", cmd_quantizer, "compare uniform, Lloyd-Max and semi-compressed quantizers")
    quantizer_args(p)
    p.add_argument("--pairs", default="6,4;10,4", help="du,dv pairs separated by ';'")

    p = add("payload", cmd_payload, "TLS 1.3 handshake payload bytes")
    p.add_argument("--table2", action="store_true", help="the ten reference configurations")
    p.add_argument("--kex")
    p.add_argument("--auth")
    p.add_argument("--calibrate", help="CSV of kex,auth,total observations to fit the base from")

    p = add("trace", cmd_trace, "sum payload bytes of a c2s/s2c trace")
    p.add_argument("--file")
    p.add_argument("--synthesize", action="store_true", help="emit the synthetic trace for --kex/--auth")
    p.add_argument("--kex", default="MLKEM768")
    p.add_argument("--auth", default="RSA")

    p = add("rate", cmd_rate, "handshakes completed under delay and loss")
    p.add_argument("--input", help="JSON profile file")
    p.add_argument("--delay", type=float, default=0.0, help="one-way delay in seconds")
    p.add_argument("--loss", type=float, default=0.0)
    p.add_argument("--rto", type=float, default=1.0)
    p.add_argument("--rtts", type=int, default=3)
    p.add_argument("--packets", type=int, default=8)
    p.add_argument("--crypto-time", type=float, default=0.005)
    p.add_argument("--duration", type=float, default=11.0)

    p = add("bench", cmd_bench, "keygen/encaps/decaps throughput")
    p.add_argument("--params", help="comma-separated presets (default: the three standard sets)")
    p.add_argument("--min-duration", type=float, default=1.0)
    p.add_argument("--warmup", type=int, default=bench_harness.DEFAULT_WARMUP)
    p.add_argument("--repeats", type=int, default=bench_harness.DEFAULT_REPEATS)
    p.add_argument("--batch", type=int, default=bench_harness.DEFAULT_BATCH)
    return parser


def load_config(path: str) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("["):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value.strip("\"'")
    return values


def _subparser(parser: argparse.ArgumentParser, args) -> argparse.ArgumentParser:
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices[args.command]
    if args.command == "kem":
        sub = next(a for a in sub._actions if isinstance(a, argparse._SubParsersAction)).choices[args.kem_command]
    return sub


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str], args) -> argparse.Namespace:
    sub = _subparser(parser, args)
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in load_config(args.config).items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            defaults[key] = action.type(value) if action.type else value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _echo(args) -> dict:
    skip = {"handler", "json", "config", "seed", "command", "kem_command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    name = args.command + (f" {args.kem_command}" if args.command == "kem" else "")
    try:
        if args.config:
            args = _apply_config(parser, argv, args)
        if args.seed is None and name in RANDOMIZED:
            args.seed = secrets.randbits(63)
            print(f"# drawn seed: {args.seed}", file=stderr)
        if args.seed is not None and args.seed < 0:
            raise UsageError("--seed must be non-negative")
        code, report, error = EXIT_OK, args.handler(args), None
    except UsageError as exc:
        print(f"kemscope {name}: error: {exc}", file=stderr)
        return EXIT_USAGE
    except ValidationFailure as exc:
        code, report, error = EXIT_INVALID, exc.results, str(exc)
    except (ValueError, KeyError, OSError) as exc:
        # bad argument values rejected by the library
        print(f"kemscope {name}: error: {exc}", file=stderr)
        return EXIT_USAGE

    if error:
        print(f"kemscope {name}: {error}", file=stderr)
    if args.json:
        envelope = {
            "tool_version": __version__,
            "subcommand": name,
            "params_echo": _echo(args),
            "results": report.results if report else None,
            "seed": args.seed,
        }
        if error:
            envelope["error"] = error
        stdout.write(json.dumps(envelope, indent=2, default=str) + "\n")
    else:
        echo = {"tool_version": __version__, "subcommand": name, **_echo(args), "seed": args.seed}
        for key, value in echo.items():
            print(f"# {key}={value}", file=stderr)
        if report:
            stdout.write(report.csv())
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
