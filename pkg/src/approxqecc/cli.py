"""Command-line driver: encode, attack, decode, view and experiment.

Exit codes: 0 success or pass, 1 fail verdict, 2 usage error, 3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields, replace
from itertools import combinations
from pathlib import Path

import numpy as np

from .aqecc import AqeccParams, apply_attack, decode, encode, encode3_warmup
from .harness.exhaustive import TooLarge, exhaustive_oracle
from .harness.strategies import StrategyContext, get_strategy, strategy_library, strategy_names
from .harness.trials import SCHEMES, run_trials
from .serialize import (
    REPORT,
    VERSION,
    ParseError,
    adversary_view_doc,
    codeword_doc,
    dumps,
    loads,
    outcome_doc,
    params_doc,
    parse_codeword,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 3
    t: int = 1
    p: int = 3
    s: int = 1
    p_mac: int | None = None
    strategy: str = "empty"  # or "all"
    registers: object = None  # list of labels, "all", or None for the last t registers
    trials: int = 1000
    seed: int = 0
    mode: str = "monte_carlo"  # or "exhaustive"
    scheme: str = "etss"
    out: str | None = None

    def params(self) -> AqeccParams:
        try:
            return AqeccParams(self.n, self.t, self.p, self.s, self.p_mac)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def strategies(self):
        if self.strategy == "all":
            return strategy_library()
        try:
            return [get_strategy(self.strategy)]
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None

    def subsets(self) -> list[tuple[int, ...]]:
        n, t = self.n, self.t
        if self.registers == "all":
            return [c for r in range(t + 1) for c in combinations(range(1, n + 1), r)]
        if self.registers is None:
            return [tuple(range(n - t + 1, n + 1))]
        return [tuple(self.registers)]


_CONFIG_TYPES = {"n": int, "t": int, "p": int, "s": int, "p_mac": (int, type(None)), "strategy": str,
                 "trials": int, "seed": int, "mode": str, "scheme": str, "out": (str, type(None))}


def _parse_registers(text: str):
    if text == "all":
        return "all"
    if text.strip() == "":
        return []
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--registers takes comma-separated labels or 'all', got {text!r}") from None


def load_config(path: str | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    doc = loads(_read(path))
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(doc) - known - {"format", "version", "traps"}
    if unknown:
        raise ParseError(f"unknown config keys: {sorted(unknown)}")
    if "traps" in doc:
        doc["s"] = doc.pop("traps")
    doc.pop("format", None)
    doc.pop("version", None)
    for key, kind in _CONFIG_TYPES.items():
        if key in doc and (not isinstance(doc[key], kind) or isinstance(doc[key], bool)):
            raise ParseError(f"config field {key!r} has the wrong type")
    regs = doc.get("registers")
    if regs is not None and regs != "all" and not (
            isinstance(regs, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in regs)):
        raise ParseError("config field 'registers' must be a list of labels or 'all'")
    return ExperimentConfig(**doc)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc.strerror}") from None


def _config_from_args(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    overrides = {}
    for name, attr in (("n", "n"), ("t", "t"), ("p", "p"), ("traps", "s"), ("strategy", "strategy"),
                       ("trials", "trials"), ("seed", "seed"), ("out", "out")):
        value = getattr(args, name, None)
        if value is not None:
            overrides[attr] = value
    if getattr(args, "registers", None) is not None:
        overrides["registers"] = _parse_registers(args.registers)
    cfg = replace(cfg, **overrides)
    if cfg.scheme not in SCHEMES:
        raise UsageError(f"unknown scheme {cfg.scheme!r}; choose from {', '.join(SCHEMES)}")
    if cfg.mode not in ("monte_carlo", "exhaustive"):
        raise UsageError(f"unknown mode {cfg.mode!r}")
    return cfg


# -- commands ----------------------------------------------------------------


def cmd_encode(args) -> int:
    cfg = _config_from_args(args)
    params = cfg.params()
    rng = np.random.default_rng(cfg.seed)
    if cfg.scheme == "warmup":
        try:
            cw = encode3_warmup(params, rng)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    elif cfg.scheme == "etss":
        cw = encode(params, rng)
    else:
        raise UsageError("encode supports the etss and warmup schemes")
    _emit(dumps(codeword_doc(cw)), cfg.out)
    return EXIT_OK


def cmd_attack(args) -> int:
    cw = parse_codeword(_read(args.codeword))
    if args.strategy is None:
        raise UsageError("attack needs --strategy")
    try:
        strategy = get_strategy(args.strategy)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    regs = _parse_registers(args.registers) if args.registers is not None else []
    if regs == "all":
        raise UsageError("attack needs explicit --registers")
    bad = frozenset(regs)
    if len(bad) > cw.params.t or any(not 1 <= i <= cw.params.n for i in bad):
        raise UsageError(f"--registers must name at most t = {cw.params.t} labels in 1..{cw.params.n}")
    rng = np.random.default_rng(args.seed or 0)
    ctx = StrategyContext(cw.params, bad, cw.scheme)
    tampered = apply_attack(cw, strategy.script(ctx, rng))
    _emit(dumps(codeword_doc(tampered)), args.out)
    return EXIT_OK


def cmd_decode(args) -> int:
    cw = parse_codeword(_read(args.codeword))
    outcome = decode(cw.without_ground_truth())
    _emit(dumps(outcome_doc(outcome, cw)), args.out)
    return EXIT_OK


def cmd_view(args) -> int:
    cw = parse_codeword(_read(args.codeword))
    regs = _parse_registers(args.registers) if args.registers is not None else []
    if regs == "all":
        regs = list(range(1, cw.params.n + 1))
    if any(not 1 <= i <= cw.params.n for i in regs):
        raise UsageError(f"register labels must lie in 1..{cw.params.n}")
    _emit(dumps(adversary_view_doc(cw, regs)), args.out)
    return EXIT_OK


def run_experiment(cfg: ExperimentConfig) -> dict:
    params = cfg.params()
    runs = []
    for strategy in cfg.strategies():
        for bad in cfg.subsets():
            if len(bad) > params.t or any(not 1 <= i <= params.n for i in bad):
                raise UsageError(f"B = {list(bad)} is not a set of at most t = {params.t} labels")
            if cfg.mode == "exhaustive":
                try:
                    res = exhaustive_oracle(params, strategy, bad, cfg.scheme)
                except TooLarge as exc:
                    raise UsageError(f"exhaustive mode refused: {exc}") from None
                runs.append(res.to_dict())
            else:
                runs.append(run_trials(params, strategy, bad, cfg.trials, cfg.seed, cfg.scheme).to_dict())
    return {
        "format": REPORT,
        "version": VERSION,
        "config": {"params": params_doc(params), "strategy": cfg.strategy, "mode": cfg.mode,
                   "scheme": cfg.scheme, "trials": cfg.trials if cfg.mode == "monte_carlo" else None,
                   "seed": cfg.seed},
        "runs": runs,
        "verdict": "pass" if all(r["verdict"] == "pass" for r in runs) else "fail",
    }


def cmd_experiment(args) -> int:
    cfg = _config_from_args(args)
    report = run_experiment(cfg)
    _emit(dumps(report), cfg.out)
    return EXIT_OK if report["verdict"] == "pass" else EXIT_FAIL


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="approxqecc", allow_abbrev=False,
                                     description="Authenticated-register approximate QECC simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, params=True):
        if params:
            p.add_argument("--config", help="JSON config file; flags override its values")
            p.add_argument("--n", type=int)
            p.add_argument("--t", type=int)
            p.add_argument("--p", type=int, help="qudit dimension (prime)")
            p.add_argument("--traps", type=int, help="trap qudits per register")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output path (default stdout)")

    enc = sub.add_parser("encode", allow_abbrev=False, help="write an honest codeword")
    common(enc)
    enc.set_defaults(func=cmd_encode)

    att = sub.add_parser("attack", allow_abbrev=False, help="tamper with a codeword file")
    att.add_argument("codeword")
    att.add_argument("--strategy", help=f"one of {', '.join(strategy_names())}")
    att.add_argument("--registers", help="comma-separated corrupted labels")
    common(att, params=False)
    att.set_defaults(func=cmd_attack)

    dec = sub.add_parser("decode", allow_abbrev=False, help="decode a codeword file and print the trace")
    dec.add_argument("codeword")
    dec.add_argument("--out")
    dec.set_defaults(func=cmd_decode)

    view = sub.add_parser("view", allow_abbrev=False, help="export what the given registers hold classically")
    view.add_argument("codeword")
    view.add_argument("--registers", help="comma-separated labels or 'all'")
    view.add_argument("--out")
    view.set_defaults(func=cmd_view)

    exp = sub.add_parser("experiment", allow_abbrev=False, help="run trials or the exact oracle")
    common(exp)
    exp.add_argument("--strategy", help=f"'all' or one of {', '.join(strategy_names())}")
    exp.add_argument("--registers", help="comma-separated labels, or 'all' for every B with |B| <= t")
    exp.add_argument("--trials", type=int)
    exp.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(json.dumps({"error": "parse", "message": str(exc)}), file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
