"""Espaços de estados: grade do toro, círculo atômico e intervalo refletido."""
from __future__ import annotations

import math
import sys
import unittest
from pathlib import Path

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from simulation_errors import INVALID_ARGUMENT, SimulationError
from space import (
    arc_distance,
    atomic_circle,
    normalize_angle,
    reflected_interval,
    space_from_block,
    torus_grid,
    validate_space,
)


class TestNormalizeAngle(unittest.TestCase):
    def test_intervalo_meio_aberto(self):
        self.assertAlmostEqual(normalize_angle(math.pi), -math.pi)
        self.assertLess(arc_distance(normalize_angle(3 * math.pi), math.pi), 1e-12)
        self.assertTrue(-math.pi <= normalize_angle(3 * math.pi) < math.pi)
        self.assertAlmostEqual(normalize_angle(-math.pi), -math.pi)
        self.assertAlmostEqual(normalize_angle(0.5), 0.5)

    def test_arc_distance_pega_o_menor_arco(self):
        self.assertAlmostEqual(arc_distance(-3.0, 3.0), 2 * math.pi - 6.0)
        self.assertAlmostEqual(arc_distance(0.0, math.pi), math.pi)


class TestTorusGrid(unittest.TestCase):
    def test_layout(self):
        space = torus_grid(4)
        self.assertEqual(space.size, 8)
        self.assertAlmostEqual(space.coords[0], -math.pi)
        self.assertEqual(space.coords[4], 0.0)
        np.testing.assert_array_equal(space.involution, (np.arange(8) + 4) % 8)
        self.assertAlmostEqual(space.metric(0, 4), math.pi)
        self.assertAlmostEqual(space.metric(0, 7), math.pi / 4)
        self.assertEqual(validate_space(space), [])

    def test_distancia_invariante_pela_involucao(self):
        space = torus_grid(7)
        inv = space.involution
        np.testing.assert_array_equal(space.distances[np.ix_(inv, inv)], space.distances)

    def test_n_invalido(self):
        with self.assertRaises(SimulationError) as ctx:
            torus_grid(1)
        self.assertEqual(ctx.exception.code, INVALID_ARGUMENT)


class TestAtomicCircle(unittest.TestCase):
    def test_fecho_vem_depois_das_entradas(self):
        space = atomic_circle([0.0, math.pi / 2 + 0.1])
        self.assertEqual(space.size, 4)
        self.assertAlmostEqual(space.coords[0], 0.0)
        self.assertAlmostEqual(space.coords[1], math.pi / 2 + 0.1)
        self.assertAlmostEqual(space.coords[2], -math.pi)
        self.assertAlmostEqual(space.coords[3], -math.pi / 2 + 0.1)
        np.testing.assert_array_equal(space.involution, [2, 3, 0, 1])

    def test_antipodas_ja_presentes_nao_duplicam(self):
        space = atomic_circle([0.3, 0.3 + math.pi])
        self.assertEqual(space.size, 2)
        self.assertEqual(validate_space(space), [])

    def test_angulos_duplicados(self):
        with self.assertRaises(SimulationError) as ctx:
            atomic_circle([0.2, 0.2 + 2 * math.pi])
        self.assertEqual(ctx.exception.code, INVALID_ARGUMENT)

    def test_index_of(self):
        space = atomic_circle([1.0])
        self.assertEqual(space.index_of(1.0), 0)
        self.assertEqual(space.index_of(1.0 - 2 * math.pi), 0)
        self.assertEqual(space.index_of(1.0 + math.pi), 1)
        with self.assertRaises(SimulationError):
            space.index_of(0.5)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(min_value=0, max_value=359), min_size=1, max_size=6, unique=True))
    def test_axiomas_em_instancias_aleatorias(self, degrees):
        angles = [d * math.pi / 180.0 - math.pi for d in degrees]
        unique = []
        for a in angles:
            if all(arc_distance(a, u) > 1e-9 and arc_distance(a + math.pi, u) > 1e-9 for u in unique):
                unique.append(a)
        space = atomic_circle(unique)
        self.assertEqual(space.size, 2 * len(unique))
        self.assertEqual(validate_space(space), [])


class TestReflectedInterval(unittest.TestCase):
    def test_reflexo_e_ponto_fixo(self):
        space = reflected_interval([0.0, 0.5, 1.0])
        np.testing.assert_allclose(space.coords, [-1.0, -0.5, 0.0, 0.5, 1.0])
        np.testing.assert_array_equal(space.involution, [4, 3, 2, 1, 0])
        self.assertEqual(space.reverse(2), 2)
        self.assertAlmostEqual(space.metric(0, 4), 2.0)
        self.assertEqual(validate_space(space), [])

    def test_fora_do_intervalo(self):
        with self.assertRaises(SimulationError):
            reflected_interval([1.5])


class TestSpaceFromBlock(unittest.TestCase):
    def test_tipos(self):
        self.assertEqual(space_from_block("torus_grid", n=3).size, 6)
        self.assertEqual(space_from_block("atomic_circle", angles=[0.0]).size, 2)
        self.assertEqual(space_from_block("reflected_interval", points=[0.5]).size, 2)
        with self.assertRaises(SimulationError):
            space_from_block("esfera")


if __name__ == "__main__":
    unittest.main()
