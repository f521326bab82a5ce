# SPDX-License-Identifier: LGPL-3.0-or-later
import numpy as np

from curvedg.euler import GasModel, primitive_to_conserved

GAS = GasModel(1.4)


def random_states(n, seed=0, speed=1.5, gas=GAS):
    """n admissible conserved states with density and pressure in [0.5, 2]."""
    rng = np.random.default_rng(seed)
    rho = rng.uniform(0.5, 2.0, n)
    p = rng.uniform(0.5, 2.0, n)
    v = rng.uniform(-speed, speed, (n, 3))
    return primitive_to_conserved(rho, v, p, gas)


def random_normals(n, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def uniform_values(state, n_elements, n_basis):
    return np.tile(np.asarray(state, dtype=float)[None, :, None], (n_elements, 1, n_basis))


def perturbed_values(nodes, seed=0, amplitude=0.1, gas=GAS):
    """Admissible nodal states (K, 5, Np) scattered around rho = p = 1 at rest."""
    rng = np.random.default_rng(seed)
    K, Np, _ = nodes.shape
    rho = 1.0 + amplitude * rng.uniform(-1, 1, (K, Np))
    p = 1.0 + amplitude * rng.uniform(-1, 1, (K, Np))
    v = amplitude * rng.uniform(-1, 1, (K, Np, 3))
    return primitive_to_conserved(rho, v, p, gas).transpose(0, 2, 1).copy()
