"""Medidas discretas: decomposição f = (1+h)μ, massas, TV e W1 no círculo."""
from __future__ import annotations

import math
import sys
import unittest
from pathlib import Path

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from measure import (
    DiscreteMeasure,
    atoms,
    grid_density,
    half_masses,
    normalized,
    odd_coordinate,
    point_masses,
    reconstruct,
    symmetric_part,
    total_mass,
    tv_distance,
    wasserstein1_circle,
    wasserstein1_transport_oracle,
)
from simulation_errors import (
    DIMENSION_MISMATCH,
    INVALID_ARGUMENT,
    NOT_CIRCLE_SPACE,
    NOT_PROBABILITY,
    SPACE_MISMATCH,
    SimulationError,
)
from space import arc_distance, atomic_circle, reflected_interval, torus_grid


def _dirichlet_strategy(size: int):
    return st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=size, max_size=size).filter(
        lambda xs: sum(xs) > 1e-3
    )


class TestConstrutores(unittest.TestCase):
    def test_grid_density_usa_peso_de_celula(self):
        space = torus_grid(5)
        f = grid_density(space, np.full(10, 1.0 / (2 * math.pi)))
        self.assertAlmostEqual(f.cell_weight, math.pi / 5)
        self.assertAlmostEqual(f.total_mass, 1.0)
        self.assertTrue(f.is_probability())

    def test_atoms_somam_posicoes_repetidas(self):
        space = atomic_circle([0.0, 1.0])
        f = atoms(space, [(0.0, 0.25), (1.0, 0.5), (0.0, 0.25)])
        self.assertAlmostEqual(f.values[0], 0.5)
        self.assertAlmostEqual(total_mass(f), 1.0)

    def test_massa_negativa(self):
        with self.assertRaises(SimulationError) as ctx:
            atoms(atomic_circle([0.0]), [(0.0, -0.1)])
        self.assertEqual(ctx.exception.code, INVALID_ARGUMENT)

    def test_dimensao(self):
        with self.assertRaises(SimulationError) as ctx:
            DiscreteMeasure(torus_grid(2), np.ones(3))
        self.assertEqual(ctx.exception.code, DIMENSION_MISMATCH)

    def test_normalized(self):
        f = normalized(point_masses(atomic_circle([0.0]), [2.0, 2.0]))
        np.testing.assert_allclose(f.values, [0.5, 0.5])
        with self.assertRaises(SimulationError) as ctx:
            normalized(point_masses(atomic_circle([0.0]), [0.0, 0.0]))
        self.assertEqual(ctx.exception.code, NOT_PROBABILITY)

    def test_suporte_relativo(self):
        f = point_masses(atomic_circle([0.0, 1.0]), [0.5, 1e-15, 0.5, 0.0])
        np.testing.assert_array_equal(f.support(), [0, 2])


class TestDecomposicao(unittest.TestCase):
    def setUp(self):
        self.space = atomic_circle([0.0, math.pi / 2 + 0.1])
        self.f = atoms(self.space, [(0.0, 0.5), (math.pi / 2 + 0.1, 0.5)])

    def test_h_impar_e_reconstrucao(self):
        mu = symmetric_part(self.f)
        np.testing.assert_allclose(mu.values, 0.25)
        h = odd_coordinate(self.f, mu)
        np.testing.assert_allclose(h.full(), [1.0, 1.0, -1.0, -1.0])
        self.assertEqual(h.oddness_defect(), 0.0)
        np.testing.assert_allclose(reconstruct(h).values, self.f.values)

    def test_mu_errada(self):
        wrong = self.f.with_values(np.full(4, 0.25) + np.array([0.01, 0, -0.01, 0]))
        with self.assertRaises(SimulationError) as ctx:
            odd_coordinate(self.f, wrong)
        self.assertEqual(ctx.exception.code, INVALID_ARGUMENT)

    def test_ponto_fixo_tem_h_zero(self):
        space = reflected_interval([0.0, 0.5])
        f = point_masses(space, [0.1, 0.6, 0.3])
        h = odd_coordinate(f, symmetric_part(f))
        self.assertEqual(h.full()[1], 0.0)
        self.assertLessEqual(h.oddness_defect(), 1e-15)


class TestMassas(unittest.TestCase):
    def test_half_masses_circulo(self):
        space = atomic_circle([0.0, math.pi / 2])
        f = point_masses(space, [0.1, 0.2, 0.3, 0.4])  # 0, π/2, −π, −π/2
        upper, lower = half_masses(f)
        self.assertAlmostEqual(upper, 0.3)
        self.assertAlmostEqual(lower, 0.7)

    def test_half_masses_intervalo_ignora_zero(self):
        f = point_masses(reflected_interval([0.0, 0.5]), [0.2, 0.5, 0.3])
        self.assertEqual(half_masses(f), (0.3, 0.2))

    def test_tv(self):
        space = atomic_circle([0.0])
        f = point_masses(space, [1.0, 0.0])
        g = point_masses(space, [0.25, 0.75])
        self.assertAlmostEqual(tv_distance(f, g), 0.75)
        with self.assertRaises(SimulationError) as ctx:
            tv_distance(f, point_masses(atomic_circle([1.0]), [1.0, 0.0]))
        self.assertEqual(ctx.exception.code, SPACE_MISMATCH)


class TestWasserstein(unittest.TestCase):
    def test_diracs(self):
        space = atomic_circle([0.0, math.pi / 2])
        f = point_masses(space, [1.0, 0.0, 0.0, 0.0])
        g = point_masses(space, [0.0, 1.0, 0.0, 0.0])
        self.assertAlmostEqual(wasserstein1_circle(f, g), math.pi / 2)

    def test_caminho_pela_emenda(self):
        space = atomic_circle([-3.0, 3.0])
        f = point_masses(space, [1.0, 0.0, 0.0, 0.0])
        g = point_masses(space, [0.0, 1.0, 0.0, 0.0])
        self.assertAlmostEqual(wasserstein1_circle(f, g), 2 * math.pi - 6.0)

    def test_exige_circulo_e_probabilidade(self):
        space = reflected_interval([0.5])
        f = point_masses(space, [0.5, 0.5])
        with self.assertRaises(SimulationError) as ctx:
            wasserstein1_circle(f, f)
        self.assertEqual(ctx.exception.code, NOT_CIRCLE_SPACE)
        circle = atomic_circle([0.0])
        with self.assertRaises(SimulationError) as ctx:
            wasserstein1_circle(point_masses(circle, [0.5, 0.0]), point_masses(circle, [0.5, 0.5]))
        self.assertEqual(ctx.exception.code, NOT_PROBABILITY)

    @settings(max_examples=80, deadline=None)
    @given(
        st.lists(st.integers(min_value=0, max_value=179), min_size=1, max_size=5, unique=True),
        st.data(),
    )
    def test_igual_ao_oraculo_de_transporte(self, degrees, data):
        space = atomic_circle([d * math.pi / 180.0 for d in degrees])
        a = np.asarray(data.draw(_dirichlet_strategy(space.size)))
        b = np.asarray(data.draw(_dirichlet_strategy(space.size)))
        f = point_masses(space, a / a.sum())
        g = point_masses(space, b / b.sum())
        self.assertAlmostEqual(wasserstein1_circle(f, g), wasserstein1_transport_oracle(f, g), delta=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.integers(min_value=0, max_value=179), min_size=1, max_size=5, unique=True),
        st.data(),
    )
    def test_dualidade_com_funcoes_lipschitz(self, degrees, data):
        space = atomic_circle([d * math.pi / 180.0 for d in degrees])
        a = np.asarray(data.draw(_dirichlet_strategy(space.size)))
        b = np.asarray(data.draw(_dirichlet_strategy(space.size)))
        f = point_masses(space, a / a.sum())
        g = point_masses(space, b / b.sum())
        w1 = wasserstein1_circle(f, g)
        anchors = data.draw(st.lists(
            st.tuples(st.floats(min_value=-math.pi, max_value=math.pi), st.floats(min_value=0.0, max_value=2.0)),
            min_size=1, max_size=4,
        ))
        # ínfimo de cones de inclinação 1: 1-Lipschitz na distância de arco
        psi = np.array([min(c + arc_distance(x, y) for y, c in anchors) for x in space.coords])
        for sign in (1.0, -1.0):
            gap = float(np.dot(sign * psi, f.masses) - np.dot(sign * psi, g.masses))
            self.assertLessEqual(gap, w1 + 1e-9)

    def test_grade(self):
        space = torus_grid(6)
        rng = np.random.default_rng(3)
        f = grid_density(space, rng.uniform(0.1, 1.0, 12))
        g = grid_density(space, rng.uniform(0.1, 1.0, 12))
        f, g = normalized(f), normalized(g)
        self.assertAlmostEqual(wasserstein1_circle(f, g), wasserstein1_transport_oracle(f, g), delta=1e-9)


if __name__ == "__main__":
    unittest.main()
