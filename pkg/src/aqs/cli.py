"""Command-line front end.

Subcommands: ``demo`` (the fixed four-qubit reference walkthrough), ``run``
(one configurable protocol run), ``attack`` (forgery, impersonation, and
tamper experiments), ``report`` (gate-count and depth accounting without
measurement sampling).

Exit codes: 0 success; 1 verification failed while ``--expect-accept`` (or
during demo); 2 configuration error; 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import attacks, qstate, reports
from .cipher import EulerMode, Scheme
from .errors import AqsError, ConfigError
from .protocol import (
    MessageSpec,
    RunConfig,
    TamperSpec,
    VerifyMode,
    Wiring,
    run_protocol,
)

DEMO_KEY_BITS = "1010"
DEMO_LAMBDAS = (math.pi / 3, math.pi / 4, math.pi / 6, math.pi / 8)
DEMO_ALPHA = 1.0 / math.sqrt(3.0)
DEMO_BETA = 1j * math.sqrt(2.0 / 3.0)
DEMO_QUBITS = 4
DEMO_SHOTS = 1024

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--qubits", type=int, default=4, help="register size n")
    p.add_argument("--scheme", choices=[s.value for s in Scheme], default="cu")
    p.add_argument("--euler-mode", choices=[m.value for m in EulerMode],
                   default="diagonal")
    p.add_argument("--seed-keys", type=int, default=0)
    p.add_argument("--seed-lambda", type=int, default=0)
    p.add_argument("--seed-shots", type=int, default=0)
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--wiring", choices=[w.value for w in Wiring], default="relay",
                   help="relay: verifier forwards the message register; "
                        "direct: signer hands it to the arbiter")
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--reveal-secrets", action="store_true",
                   help="include key bits and signing angles in the transcript")
    p.add_argument("--expect-accept", action="store_true",
                   help="exit 1 if verification rejects")
    p.add_argument("--compare", type=Path, default=None, metavar="CSV",
                   help="histogram CSV to compare against the exact distribution")


def _add_message_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--message", default=None, metavar="BITS",
                   help="classical message bits; default is a random product state")
    p.add_argument("--seed-message", type=int, default=0,
                   help="seed for the random product message")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aqs",
        description="Arbitrated quantum signature protocol simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    # The demo is a pinned scenario, so it only takes output-side flags.
    demo = sub.add_parser("demo", help="fixed four-qubit reference walkthrough")
    demo.add_argument("--seed-shots", type=int, default=0)
    demo.add_argument("--shots", type=int, default=DEMO_SHOTS)
    demo.add_argument("--out", type=Path, default=None, help="output directory")
    demo.add_argument("--reveal-secrets", action="store_true")
    demo.add_argument("--compare", type=Path, default=None, metavar="CSV")

    run = sub.add_parser("run", help="one configurable protocol run")
    _add_common(run)
    _add_message_flags(run)

    attack = sub.add_parser("attack", help="adversary experiments")
    _add_common(attack)
    _add_message_flags(attack)
    attack.add_argument("--sweep", choices=["pauli"], default=None,
                        help="run the scheme x sigma-class forgery sweep")
    attack.add_argument("--class", dest="sigma_class",
                        choices=list(attacks.SIGMA_CLASSES), default=None,
                        help="restrict the sweep to one sigma class")
    attack.add_argument("--impersonate", choices=list(attacks.KNOWLEDGE_LEVELS),
                        default=None, help="impersonation at a knowledge level")
    attack.add_argument("--tamper", choices=["tag-flip", "message-x"], default=None,
                        help="in-transit tampering experiment")
    attack.add_argument("--tamper-channel",
                        choices=["signer-verifier", "verifier-kgc"],
                        default="verifier-kgc")
    attack.add_argument("--trials", type=int, default=100)
    attack.add_argument("--seed", type=int, default=0,
                        help="sweep seed (per-trial streams derive from it)")
    attack.add_argument("--verbose", action="store_true",
                        help="include per-trial detail in the JSON report")

    report = sub.add_parser("report", help="gate/depth accounting, no sampling")
    _add_common(report)
    _add_message_flags(report)

    return parser


def _message_spec(args: argparse.Namespace, n: int) -> MessageSpec:
    if getattr(args, "message", None) is not None:
        if len(args.message) != n:
            raise ConfigError(
                f"--message has {len(args.message)} bits but --qubits is {n}"
            )
        return MessageSpec.classical(args.message)
    rng = np.random.default_rng(getattr(args, "seed_message", 0))
    return MessageSpec.random_product(n, rng)


def _config_from_args(args: argparse.Namespace,
                      message: MessageSpec | None = None) -> RunConfig:
    n = args.qubits
    return RunConfig(
        n=n,
        message=message if message is not None else _message_spec(args, n),
        scheme=Scheme(args.scheme),
        euler_mode=EulerMode(args.euler_mode),
        wiring=Wiring(args.wiring),
        verify_mode=VerifyMode.EXACT,
        seed_keys=args.seed_keys,
        seed_lambda=args.seed_lambda,
        seed_shots=args.seed_shots,
        shots=args.shots,
    )


def _write(out_dir: Path, name: str, text: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text)


def _outcome_line(outcome) -> str:
    parts = [f"accepted={str(outcome.accepted).lower()}", f"stage={outcome.stage}"]
    if outcome.overlap_sq is not None:
        parts.append(f"overlap_sq={outcome.overlap_sq:.12g}")
    return " ".join(parts)


def _compare_against(result, csv_path: Path) -> float:
    if result.recovered_state is None:
        raise ConfigError("nothing to compare: run rejected before state compare")
    external = qstate.ShotHistogram.from_csv(csv_path.read_text())
    return reports.compare_histograms(
        external, qstate.distribution(result.recovered_state)
    )


def _emit_run_outputs(result, args: argparse.Namespace,
                      extra_files: dict[str, str] | None = None) -> None:
    print(_outcome_line(result.outcome))
    tv = None
    if args.compare is not None:
        tv = _compare_against(result, args.compare)
        print(f"tv_distance={tv:.12g}")
    if args.out is None:
        return
    _write(args.out, "transcript.json",
           result.transcript.to_json(reveal_secrets=args.reveal_secrets) + "\n")
    _write(args.out, "outcome.csv", result.transcript.summary_csv_row())
    if result.histogram is not None:
        _write(args.out, "histogram.csv", result.histogram.to_csv())
    if tv is not None:
        _write(args.out, "comparison.json",
               json.dumps({"tv_distance": tv}, sort_keys=True) + "\n")
    for name, text in (extra_files or {}).items():
        _write(args.out, name, text)


def cmd_demo(args: argparse.Namespace) -> int:
    message = MessageSpec.uniform_qubit(DEMO_QUBITS, DEMO_ALPHA, DEMO_BETA)
    config = RunConfig(
        n=DEMO_QUBITS,
        message=message,
        scheme=Scheme.CHAINED_CU,
        euler_mode=EulerMode.DIAGONAL,
        wiring=Wiring.DIRECT,
        seed_shots=args.seed_shots,
        shots=args.shots,
        inject_key_bits=DEMO_KEY_BITS,
        inject_lambdas=DEMO_LAMBDAS,
    )
    result = run_protocol(config)
    initial = qstate.distribution(result.message_state)
    gate = reports.GateCountReport.from_ops(result.ops)
    depth = reports.DepthReport.from_ops(result.ops)

    print(_outcome_line(result.outcome))
    label = int("0110", 2)
    print(f"prob(|0110>)={initial[label]:.5f}")
    print(f"gate_total={gate.total} sequential_depth={depth.sequential_depth} "
          f"asap_depth={depth.asap_depth}")

    tv = None
    if args.compare is not None:
        tv = _compare_against(result, args.compare)
        print(f"tv_distance={tv:.12g}")

    if args.out is not None:
        _write(args.out, "initial_distribution.csv",
               reports.distribution_to_csv(initial))
        _write(args.out, "post_distribution.csv",
               reports.distribution_to_csv(
                   qstate.distribution(result.recovered_state)))
        _write(args.out, "histogram.csv", result.histogram.to_csv())
        _write(args.out, "transcript.json",
               result.transcript.to_json(reveal_secrets=args.reveal_secrets) + "\n")
        _write(args.out, "report.json", reports.circuit_report_json(result.ops) + "\n")
        if tv is not None:
            _write(args.out, "comparison.json",
                   json.dumps({"tv_distance": tv}, sort_keys=True) + "\n")

    return EXIT_OK if result.outcome.accepted else EXIT_REJECTED


def cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = run_protocol(config)
    _emit_run_outputs(result, args)
    if args.expect_accept and not result.outcome.accepted:
        return EXIT_REJECTED
    return EXIT_OK


def cmd_attack(args: argparse.Namespace) -> int:
    modes = [m for m in (args.sweep, args.impersonate, args.tamper) if m is not None]
    if len(modes) != 1:
        raise ConfigError(
            "pick exactly one of --sweep, --impersonate, --tamper"
        )

    if args.sweep is not None:
        rows = attacks.forgery_sweep(
            args.qubits, args.trials, args.seed, collect_details=args.verbose
        )
        rows = [
            r for r in rows
            if r.scheme == args.scheme
            and (args.sigma_class is None or r.sigma_class == args.sigma_class)
        ]
        csv_text = attacks.reports_to_csv(rows)
        print(csv_text, end="")
        if args.out is not None:
            _write(args.out, "attack_report.csv", csv_text)
            _write(args.out, "attack_report.json",
                   attacks.reports_to_json(rows, verbose=args.verbose) + "\n")
        return EXIT_OK

    if args.impersonate is not None:
        report = attacks.impersonation_attempt(
            args.qubits, args.trials, args.seed, knowledge=args.impersonate,
            collect_details=args.verbose,
        )
        csv_text = attacks.reports_to_csv([report])
        print(csv_text, end="")
        print(f"hash_pass_count={report.hash_pass_count}")
        if args.out is not None:
            _write(args.out, "attack_report.csv", csv_text)
            _write(args.out, "attack_report.json",
                   attacks.reports_to_json([report], verbose=args.verbose) + "\n")
        return EXIT_OK

    if args.tamper == "tag-flip":
        spec = TamperSpec(channel=args.tamper_channel, tag_flip_bit=0)
    else:
        spec = TamperSpec(channel=args.tamper_channel,
                          message_pauli="X" + "I" * (args.qubits - 1))
    config = _config_from_args(args)
    outcome = attacks.tamper_in_transit(config, spec)
    print(_outcome_line(outcome))
    if args.out is not None:
        _write(args.out, "tamper_outcome.json",
               json.dumps(outcome.to_payload(), sort_keys=True) + "\n")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = run_protocol(config, sample_histogram=False)
    text = reports.circuit_report_json(result.ops)
    print(text)
    if args.compare is not None:
        tv = _compare_against(result, args.compare)
        print(f"tv_distance={tv:.12g}")
    if args.out is not None:
        _write(args.out, "report.json", text + "\n")
    return EXIT_OK


_COMMANDS = {
    "demo": cmd_demo,
    "run": cmd_run,
    "attack": cmd_attack,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except AqsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
