#!/usr/bin/env python3
"""
Executor de experimentos.

Uso:
  python cli.py scenarios
  python cli.py simulate --scenario fig4 [--out DIR] [--method rk4] [--dt 0.01] [--steps 250]
  python cli.py predict  --config exp.json [--out DIR]
  python cli.py analyze  --scenario three_dirac --param alpha=0.01
  python cli.py verify   [--seed 0] [--only 1,2]

Códigos de saída: 0 sucesso, 2 config/cenário/argumento inválido,
3 passo de Euler (negatividade ou limite), 4 E/S, 1 demais falhas
(inclusive critério de aceitação reprovado).
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

sys.path.insert(0, str(Path(__file__).resolve().parent))

from experiment_config import ExperimentConfig, load_config, with_overrides
from runtime_settings import LOG_LEVEL
from simulation_errors import INVALID_ARGUMENT, SimulationError

logger = logging.getLogger("cli")

COMMANDS = ("simulate", "predict", "analyze", "scenarios", "verify")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Dinâmica de colisões com reversão")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="arquivo JSON do experimento")
    parser.add_argument("--scenario", help="cenário embutido (ver `scenarios`)")
    parser.add_argument("--param", action="append", default=[], metavar="CHAVE=VALOR",
                        help="parâmetro do cenário; pode repetir")
    parser.add_argument("--out", help="diretório de saída")
    parser.add_argument("--seed", type=int, default=None, help="semente para cenários/testes aleatórios")
    parser.add_argument("--method", choices=("euler", "rk4", "expm", "picard"))
    parser.add_argument("--dt", type=float)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--snapshot-every", type=int, dest="snapshot_every")
    parser.add_argument("--only", help="critérios de aceitação, ex.: 1,2,5")
    return parser


def parse_params(items: List[str]) -> Dict[str, str]:
    params: Dict[str, str] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise SimulationError(INVALID_ARGUMENT, f"--param espera CHAVE=VALOR: {item!r}")
        params[key.strip()] = value.strip()
    return params


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    from scenarios import resolve_scenario, scenario_library

    if bool(args.config) == bool(args.scenario):
        raise SimulationError(INVALID_ARGUMENT, "informe exatamente um de --config/--scenario")
    if args.config:
        config = load_config(args.config)
    else:
        params = parse_params(args.param)
        info = next((s for s in scenario_library() if s.name == args.scenario), None)
        if args.seed is not None and info is not None and "seed" in info.params:
            params.setdefault("seed", str(args.seed))
        config = resolve_scenario(args.scenario, params)
    config = with_overrides(
        config,
        method=args.method,
        dt=args.dt,
        steps=args.steps,
        snapshot_every=args.snapshot_every,
    )
    if args.seed is not None:
        config = config.model_copy(update={"seed": args.seed})
    return config


def cmd_scenarios() -> int:
    from scenarios import scenario_library

    for info in scenario_library():
        params = ", ".join(f"{k}={v}" for k, v in info.params.items())
        print(f"{info.name:22s} {info.description}")
        if params:
            print(f"{'':22s} parâmetros: {params}")
    return 0


def cmd_verify(seed: int, only: Optional[str]) -> int:
    from acceptance_suite import run_acceptance

    selected = [int(x) for x in only.split(",") if x.strip()] if only else None
    results = run_acceptance(seed=seed, only=selected)
    for r in results:
        status = "OK   " if r.passed else "FALHA"
        print(f"[{status}] {r.number}. {r.name} ({r.elapsed_s:.2f}s)")
        for key, value in r.details.items():
            print(f"         {key}: {value}")
    return 0 if all(r.passed for r in results) else 1


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        if args.command == "scenarios":
            return cmd_scenarios()
        if args.command == "verify":
            return cmd_verify(args.seed or 0, args.only)

        from run_service import run

        config = resolve_config(args)
        run(config, command=args.command, out=args.out)
        return 0
    except SimulationError as e:
        logger.error("run_failed command=%s code=%s message=%s", args.command, e.code, e.message)
        print(f"erro: {e}", file=sys.stderr)
        return e.exit_status()


if __name__ == "__main__":
    sys.exit(main())
