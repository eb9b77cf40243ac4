"""Testes do script que exporta as configs dos cenários embutidos."""
import runpy
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from experiment_config import load_config
from scenarios import scenario_names


def test_exporta_um_json_valido_por_cenario(tmp_path, monkeypatch, capsys):
    target = tmp_path / "configs"
    monkeypatch.setattr(sys, "argv", ["export_scenario_configs.py", str(target)])

    runpy.run_path(str(ROOT / "scripts" / "export_scenario_configs.py"), run_name="__main__")

    written = sorted(p.stem for p in target.glob("*.json"))
    assert written == sorted(scenario_names())
    assert "fig4" in capsys.readouterr().out
    for name in written:
        config = load_config(target / f"{name}.json")
        assert config.name
