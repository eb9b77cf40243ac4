from __future__ import annotations

"""
Exporta a config JSON resolvida de cada cenário embutido, como ponto de
partida para experimentos customizados (`cli.py ... --config`).

Uso (a partir da raiz do projeto):

  python scripts/export_scenario_configs.py [DIRETÓRIO]

Default: configs/. Os cenários de grade saem com n reduzido (FIG_EXPORT_N) para o
JSON ficar legível.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from scenarios import resolve_scenario, scenario_names  # noqa: E402

FIG_EXPORT_N = 24


def main() -> None:
    target = Path(sys.argv[1] if len(sys.argv) > 1 else "configs")
    target.mkdir(parents=True, exist_ok=True)
    for name in scenario_names():
        params = {"n": FIG_EXPORT_N} if name.startswith("fig") else {}
        config = resolve_scenario(name, params)
        path = target / f"{name}.json"
        path.write_text(json.dumps(config.model_dump(mode="json"), indent=2) + "\n", encoding="utf-8")
        print(f"{name:22s} -> {path}")


if __name__ == "__main__":
    main()
