"""Pipelines predict/analyze/simulate e artefatos gravados em disco."""
from __future__ import annotations

import json
import sys
import tempfile
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from experiment_config import with_overrides
from report_pdf_service import build_run_summary_pdf, component_rows
from run_service import (
    component_report,
    fit_series,
    plot_scripts,
    run,
    run_analyze,
    run_predict,
    run_simulation,
)
from scenarios import resolve_scenario
from simulation_errors import IO_ERROR, SimulationError

COMPONENT_KEYS = ["id", "points", "indices", "case", "mass", "partner", "reverse", "orbit",
                  "eta", "rate_lower_bound", "constant_C", "beta"]


class TestPipelines(unittest.TestCase):
    def test_predict_sem_cotas(self):
        result = run_predict(resolve_scenario("epsilon_family"))
        self.assertEqual([list(c) for c in result.components], [COMPONENT_KEYS] * 2)
        self.assertTrue(all(c["rate_lower_bound"] is None for c in result.components))
        np.testing.assert_allclose(result.prediction.f_infty.values, 0.25)

    def test_analyze_familia_epsilon(self):
        report = run_analyze(resolve_scenario("epsilon_family")).report
        self.assertEqual(report["count_bound"], 4)
        self.assertTrue(report["gap_intervals"])
        self.assertAlmostEqual(report["spectral_gap"], 1.0)
        self.assertAlmostEqual(report["entropy_rate_from_spectrum"], 2.0)
        self.assertAlmostEqual(report["min_rate_lower_bound"], 0.25)
        self.assertEqual(report["components"][0]["case"], "pair-ii")
        self.assertAlmostEqual(report["components"][0]["constant_C"], 4.0)

    def test_analyze_fora_do_circulo(self):
        report = run_analyze(resolve_scenario("gap_interval")).report
        self.assertIsNone(report["count_bound"])
        self.assertIsNone(report["gap_intervals"])
        isolated = [c for c in report["components"] if c["case"] == "isolated"]
        self.assertEqual(len(isolated), 1)
        self.assertIsNone(isolated[0]["rate_lower_bound"])

    def test_simulacao_ajusta_taxa(self):
        result = run_simulation(resolve_scenario("epsilon_family"))
        self.assertEqual(result.trajectory.method, "expm")
        self.assertAlmostEqual(result.fit.lambda_, 2.0, places=6)
        self.assertGreater(result.fit.r_squared, 0.999)
        self.assertLessEqual(result.conservation.mass_drift, 1e-14)

    def test_sem_ajuste_quando_ja_em_equilibrio(self):
        result = run_simulation(resolve_scenario("four_atoms"))
        self.assertIsNone(fit_series(result.series))
        self.assertIsNone(result.fit)

    def test_relatorio_reaproveita_predicao(self):
        result = run_predict(resolve_scenario("four_atoms"))
        report = component_report(result.prediction)
        self.assertEqual(len(report), 4)
        self.assertTrue(all(c["beta"] == 1.0 for c in report))


class TestArtefatos(unittest.TestCase):
    def _simulate_into(self, out: Path, **overrides):
        config = with_overrides(resolve_scenario("epsilon_family"), steps=20, **overrides)
        return run(config, command="simulate", out=out)

    def test_arquivos_da_simulacao(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / "eps"
            result = self._simulate_into(out)
            names = sorted(p.name for p in out.iterdir())
            self.assertEqual(names, sorted(result.outputs))
            self.assertEqual(
                names,
                sorted(["prediction.csv", "snapshots.csv", "diagnostics.csv", "components.json",
                        "profiles.gp", "masses.gp", "entropy.gp", "manifest.json"]),
            )
            snapshots = (out / "snapshots.csv").read_text(encoding="utf-8").splitlines()
            self.assertEqual(snapshots[0], "t,index,point,f")
            self.assertEqual(len(snapshots), 1 + 21 * 4)
            prediction = np.loadtxt(out / "prediction.csv", delimiter=",", skiprows=1)
            np.testing.assert_allclose(prediction[:, 1], 0.25)
            manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
            self.assertEqual(manifest["command"], "simulate")
            self.assertEqual(manifest["config"]["integrator"]["steps"], 20)
            self.assertEqual(manifest["method_used"], "expm")
            self.assertIn("numpy", manifest["versions"])
            header = (out / "diagnostics.csv").read_text(encoding="utf-8").splitlines()[0]
            self.assertTrue(header.startswith("t,mass_total,mass_upper,mass_lower,H,D,tv_to_finfty"))

    def test_execucoes_identicas(self):
        with tempfile.TemporaryDirectory() as tmp:
            a, b = Path(tmp) / "a", Path(tmp) / "b"
            self._simulate_into(a)
            self._simulate_into(b)
            for name in ("prediction.csv", "snapshots.csv", "diagnostics.csv", "components.json", "manifest.json"):
                with self.subTest(name=name):
                    self.assertEqual((a / name).read_bytes(), (b / name).read_bytes())

    def test_predict_e_analyze(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = resolve_scenario("three_dirac")
            run(config, command="predict", out=Path(tmp) / "p")
            run(config, command="analyze", out=Path(tmp) / "a")
            self.assertEqual(sorted(p.name for p in (Path(tmp) / "p").iterdir()),
                             ["components.json", "manifest.json", "prediction.csv"])
            analysis = json.loads((Path(tmp) / "a" / "analysis.json").read_text(encoding="utf-8"))
            self.assertAlmostEqual(analysis["spectral_gap"], 0.2, places=9)

    def test_log_da_execucao(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertLogs("run_logging", level="INFO") as logs:
                self._simulate_into(Path(tmp) / "eps")
        text = logs.output[-1]
        self.assertIn("command=simulate", text)
        self.assertIn("cases=pair-ii,pair-ii", text)
        self.assertIn("method=expm", text)

    def test_saida_invalida(self):
        with tempfile.TemporaryDirectory() as tmp:
            blocker = Path(tmp) / "arquivo"
            blocker.write_text("x", encoding="utf-8")
            with self.assertLogs("run_logging", level="INFO") as logs:
                with self.assertRaises(SimulationError) as ctx:
                    self._simulate_into(blocker)
            self.assertEqual(ctx.exception.code, IO_ERROR)
            self.assertIn("error=IO_ERROR", logs.output[-1])

    def test_pdf(self):
        config = resolve_scenario("epsilon_family")
        data = config.model_dump()
        data["diagnostics"]["pdf_report"] = True
        with tempfile.TemporaryDirectory() as tmp:
            from experiment_config import parse_config

            result = run(parse_config(data), command="simulate", out=Path(tmp))
            self.assertIn("run_summary.pdf", result.outputs)
            self.assertTrue((Path(tmp) / "run_summary.pdf").read_bytes().startswith(b"%PDF"))
        rows = component_rows(result)
        self.assertEqual(rows[0][0], "id")
        self.assertEqual(len(rows), 3)
        self.assertTrue(build_run_summary_pdf(result).startswith(b"%PDF"))

    def test_scripts_gnuplot(self):
        result = run_simulation(with_overrides(resolve_scenario("epsilon_family"), steps=10))
        scripts = plot_scripts(result.series, len(result.trajectory), 4)
        self.assertIn("every ::0::3", scripts["profiles.gp"])
        self.assertIn("every ::40::43", scripts["profiles.gp"])
        self.assertIn("using 1:5", scripts["entropy.gp"])


if __name__ == "__main__":
    unittest.main()
