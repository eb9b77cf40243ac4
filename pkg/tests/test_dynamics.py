"""Gerador linear em h, integradores e o esquema de Euler na medida."""
from __future__ import annotations

import math
import sys
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import dynamics
from dynamics import (
    build_generator,
    collision_operator,
    euler_simulate,
    euler_step_bound,
    grid_collision_operator,
    integrate_h,
    rescale_time_for_mass,
    simulate,
    snapshot_grid,
)
from experiment_config import build_experiment
from kernel import custom_kernel, indicator_kernel, smooth_kernel
from measure import grid_density, odd_coordinate, point_masses, symmetric_part
from scenarios import resolve_scenario, three_dirac
from simulation_errors import (
    EMPTY_SUPPORT,
    INVALID_ARGUMENT,
    NEGATIVITY_ABORT,
    STEP_SIZE,
    SimulationError,
)
from space import atomic_circle, reflected_interval, torus_grid


def _experiment(name, **params):
    return build_experiment(resolve_scenario(name, params))


def _epsilon_closed_form(t):
    """f(0) da família ε: ¼(1 + e^{−t})."""
    return 0.25 * (1.0 + np.exp(-np.asarray(t)))


def _three_dirac_poly(a, b, g):
    s = a * a + b * b + g * g + 2 * (a * b + a * g + b * g)
    return np.array([1.0, 2.0, 4.0 * s, 32.0 * a * b * g])


class TestGerador(unittest.TestCase):
    def setUp(self):
        exp = _experiment("epsilon_family", eps=0.1)
        self.f = exp.initial
        self.kernel = exp.kernel
        self.mu = symmetric_part(self.f)
        self.A = build_generator(self.mu, self.kernel)

    def test_h_inicial_e_autovetor(self):
        h0 = odd_coordinate(self.f, self.mu)
        np.testing.assert_allclose(self.A.apply(h0.values), -h0.values, atol=1e-15)
        np.testing.assert_allclose(self.A.gamma, 1.0)

    def test_lacuna_espectral(self):
        self.assertAlmostEqual(self.A.spectral_gap(), 1.0)
        np.testing.assert_allclose(np.sort(np.real(self.A.eigenvalues())), [-1.0, 0.0], atol=1e-14)
        np.testing.assert_array_equal(self.A.odd_representatives(), [0, 1])

    def test_pontos_fixos_fora_dos_representantes(self):
        space = reflected_interval([0.0, 0.5, 1.0])
        table = np.where(space.distances > 1.0, space.distances - 1.0, 0.0)
        mu = point_masses(space, [0.1, 0.2, 0.4, 0.2, 0.1])
        A = build_generator(mu, custom_kernel(space, table))
        zero = space.index_of(0.0)
        self.assertNotIn(zero, A.odd_representatives().tolist())
        self.assertEqual(A.odd_representatives().size, 2)

    def test_suporte_vazio(self):
        space = atomic_circle([0.0])
        with self.assertRaises(SimulationError) as ctx:
            build_generator(point_masses(space, [0.0, 0.0]), indicator_kernel(space, math.pi / 2))
        self.assertEqual(ctx.exception.code, EMPTY_SUPPORT)

    def test_tres_diracs(self):
        a, b, g = 0.1, 0.2, 0.2
        exp = build_experiment(three_dirac(a, b, g))
        A = build_generator(symmetric_part(exp.initial), exp.kernel)
        expected = -2.0 * np.array([[b + g, b, g], [a, a + g, g], [a, b, a + b]])
        np.testing.assert_allclose(A.odd_restriction(), expected, atol=1e-15)
        np.testing.assert_allclose(A.characteristic_polynomial(), _three_dirac_poly(a, b, g), atol=1e-12)
        roots = np.sort(np.real(A.eigenvalues()))
        self.assertAlmostEqual(roots[-1], -0.2, places=10)
        self.assertAlmostEqual(A.spectral_gap(), 0.2, places=10)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(min_value=0.01, max_value=0.24), st.floats(min_value=0.01, max_value=0.24))
    def test_polinomio_tres_diracs(self, a, b):
        g = 0.5 - a - b
        exp = build_experiment(three_dirac(a, b, g))
        A = build_generator(symmetric_part(exp.initial), exp.kernel)
        np.testing.assert_allclose(A.characteristic_polynomial(), _three_dirac_poly(a, b, g), atol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.integers(min_value=0, max_value=179), min_size=1, max_size=6, unique=True),
        st.data(),
    )
    def test_espectro_impar_real_e_nao_positivo(self, degrees, data):
        space = atomic_circle([d * math.pi / 180.0 for d in degrees])
        half = data.draw(st.lists(st.floats(min_value=0.05, max_value=1.0),
                                  min_size=len(degrees), max_size=len(degrees)))
        masses = np.concatenate([half, half])
        mu = point_masses(space, masses / masses.sum())
        A = build_generator(mu, indicator_kernel(space, math.pi / 2))
        eig = A.eigenvalues()
        self.assertLessEqual(float(np.max(np.real(eig))), 1e-9)
        self.assertLessEqual(float(np.max(np.abs(np.imag(eig)))), 1e-6)


class TestIntegradores(unittest.TestCase):
    def setUp(self):
        exp = _experiment("epsilon_family", eps=0.1)
        self.f = exp.initial
        self.kernel = exp.kernel
        self.mu = symmetric_part(self.f)
        self.h0 = odd_coordinate(self.f, self.mu)
        self.A = build_generator(self.mu, self.kernel)
        self.t = np.array([0.0, 0.5, 1.0, 5.0])

    def test_solucao_fechada(self):
        for method, tol in (("expm", 1e-12), ("rk4", 1e-9), ("picard", 1e-9)):
            with self.subTest(method=method):
                traj = integrate_h(self.h0, self.A, self.t, method, max_step=0.01)
                self.assertEqual(traj.method, method)
                np.testing.assert_allclose(traj.values[:, 0], _epsilon_closed_form(self.t), atol=tol)
                np.testing.assert_allclose(traj.values.sum(axis=1), 1.0, atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(
        st.lists(st.integers(min_value=0, max_value=179), min_size=1, max_size=5, unique=True),
        st.floats(min_value=0.3, max_value=math.pi - 0.3),
        st.data(),
    )
    def test_rk4_concorda_com_expm_em_instancia_aleatoria(self, degrees, alpha, data):
        space = atomic_circle([d * math.pi / 180.0 for d in degrees])
        raw = np.asarray(data.draw(st.lists(st.floats(min_value=0.05, max_value=1.0),
                                            min_size=space.size, max_size=space.size)))
        f = point_masses(space, raw / raw.sum())
        mu = symmetric_part(f)
        h0 = odd_coordinate(f, mu)
        A = build_generator(mu, indicator_kernel(space, alpha))
        t = np.array([0.0, 5.0])
        exact = integrate_h(h0, A, t, "expm")
        approx = integrate_h(h0, A, t, "rk4", max_step=0.01)
        self.assertLessEqual(float(np.max(np.abs(approx.values[-1] - exact.values[-1]))), 1e-7)

    def test_grade_de_tempo_invalida(self):
        for grid in ([0.5, 1.0], [0.0, 1.0, 1.0], []):
            with self.subTest(grid=grid):
                with self.assertRaises(SimulationError) as ctx:
                    integrate_h(self.h0, self.A, grid)
                self.assertEqual(ctx.exception.code, INVALID_ARGUMENT)

    def test_metodo_desconhecido(self):
        with self.assertRaises(SimulationError) as ctx:
            simulate(self.f, self.kernel, "leapfrog", 0.1, 10)
        self.assertEqual(ctx.exception.code, INVALID_ARGUMENT)

    def test_expm_cai_para_rk4_em_suporte_grande(self):
        exp = _experiment("fig1", n=40)
        with self.assertLogs("dynamics", level="WARNING") as logs:
            traj = simulate(exp.initial, exp.kernel, "expm", 0.01, 5)
        self.assertEqual(traj.method, "rk4")
        self.assertTrue(any("expm_fallback" in line for line in logs.output))

    def test_grade_de_snapshots(self):
        np.testing.assert_allclose(snapshot_grid(0.1, 7, 3), [0.0, 0.3, 0.6, 0.7])
        traj = simulate(self.f, self.kernel, "rk4", 0.05, 10, 5)
        np.testing.assert_allclose(traj.times, [0.0, 0.25, 0.5])

    def test_quatro_atomos_constante(self):
        exp = _experiment("four_atoms")
        traj = simulate(exp.initial, exp.kernel, "rk4", 0.1, 20, 10)
        for j in range(len(traj)):
            np.testing.assert_allclose(traj.values[j], exp.initial.values, atol=1e-14)


class TestEuler(unittest.TestCase):
    def setUp(self):
        exp = _experiment("epsilon_family", eps=0.1)
        self.f = exp.initial
        self.kernel = exp.kernel

    def test_recorrencia_exata(self):
        dt = 0.1
        traj = euler_simulate(self.f, self.kernel, dt, 20, 5)
        np.testing.assert_allclose(traj.times, [0.0, 0.5, 1.0, 1.5, 2.0])
        expected = 0.25 * (1.0 + (1.0 - dt) ** np.array([0, 5, 10, 15, 20]))
        np.testing.assert_allclose(traj.values[:, 0], expected, atol=1e-14)
        np.testing.assert_allclose(traj.h[:, 0], (1.0 - dt) ** np.array([0, 5, 10, 15, 20]), atol=1e-13)

    def test_limite_de_passo(self):
        self.assertAlmostEqual(euler_step_bound(self.kernel, 1.0), 0.5)
        with self.assertRaises(SimulationError) as ctx:
            euler_simulate(self.f, self.kernel, 0.6, 10)
        self.assertEqual(ctx.exception.code, STEP_SIZE)
        self.assertEqual(ctx.exception.exit_status(), 3)

    def test_aborta_em_negatividade(self):
        with patch.object(dynamics, "euler_step_bound", return_value=math.inf):
            with self.assertRaises(SimulationError) as ctx:
                euler_simulate(self.f, self.kernel, 3.0, 5)
        self.assertEqual(ctx.exception.code, NEGATIVITY_ABORT)
        self.assertEqual(ctx.exception.details["step"], 1)
        self.assertAlmostEqual(ctx.exception.details["value"], -0.25)

    def test_conserva_massa_e_parte_simetrica(self):
        exp = _experiment("fig1", n=30)
        traj = euler_simulate(exp.initial, exp.kernel, 0.01, 50, 10)
        mu = symmetric_part(exp.initial).values
        for j in range(len(traj)):
            f = traj.measure_at(j)
            self.assertAlmostEqual(f.total_mass, 1.0, delta=1e-12)
            np.testing.assert_allclose(symmetric_part(f).values, mu, atol=1e-12)


class TestOperador(unittest.TestCase):
    def test_grade_igual_ao_operador_geral(self):
        n = 8
        space = torus_grid(n)
        kernel = smooth_kernel(space, math.pi / 2, 0.3)
        rng = np.random.default_rng(4)
        f = grid_density(space, rng.uniform(0.0, 1.0, 2 * n))
        np.testing.assert_allclose(
            grid_collision_operator(f.values, kernel, n), collision_operator(f, kernel), atol=1e-15
        )

    def test_taxa_tem_soma_nula(self):
        space = reflected_interval([0.2, 0.5, 0.9])
        inv = space.involution
        rng = np.random.default_rng(8)
        for _ in range(20):
            raw = rng.uniform(0.0, 1.0, size=(6, 6))
            table = raw + raw.T
            table = table + table[np.ix_(inv, inv)]
            f = point_masses(space, rng.uniform(0.0, 1.0, 6))
            self.assertAlmostEqual(float(collision_operator(f, custom_kernel(space, table)).sum()), 0.0, delta=1e-13)

    def test_reescala_de_massa(self):
        times, values = rescale_time_for_mass(np.array([0.0, 1.0, 2.0]), np.array([[2.0, 4.0]]), 2.0)
        np.testing.assert_allclose(times, [0.0, 2.0, 4.0])
        np.testing.assert_allclose(values, [[1.0, 2.0]])
        with self.assertRaises(SimulationError):
            rescale_time_for_mass(np.zeros(1), np.zeros(1), 0.0)

    def test_reescala_corresponde_a_dinamica(self):
        exp = _experiment("epsilon_family", eps=0.1)
        rho = 0.5
        heavy = exp.initial.with_values(rho * exp.initial.values)
        traj = euler_simulate(heavy, exp.kernel, 0.01, 100, 100)
        times, values = rescale_time_for_mass(traj.times, traj.values, rho)
        unit = euler_simulate(exp.initial, exp.kernel, 0.005, 100, 100)
        np.testing.assert_allclose(times, unit.times)
        np.testing.assert_allclose(values, unit.values, atol=1e-14)


if __name__ == "__main__":
    unittest.main()
