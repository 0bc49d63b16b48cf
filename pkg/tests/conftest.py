"""Shared fixtures: reference configurations and solved pipelines.

Heavy artifacts (lattice tables, solves) are session-scoped so the many
tests that need the weak-scattering reference pipeline share one build.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cylgrating import (GratingConfig, build_scatter_table, lattice_table,
                        assemble, solve_direct)

# weak-scattering reference: eps_r = 1.2, a/d = 0.1, theta_i = 1.2 rad,
# k_r d = 4.0, generic in-plane angle keeping clear of grating anomalies
THETA_REF = 1.2
K0_REF = 4.0 / math.sin(THETA_REF)


def weak_cfg(**kw) -> GratingConfig:
    base = dict(radius_a=0.1, spacing_d=1.0, eps_r=1.2, mu_r=1.0,
                k0=K0_REF, theta_i=THETA_REF, phi_i=0.3)
    base.update(kw)
    return GratingConfig(**base)


# strong coupling: Neumann iteration diverges here (measured ratio ~1.9)
DIVERGENT = dict(radius_a=0.3, spacing_d=1.0, eps_r=9.0, mu_r=1.0,
                 k0=5.8 / math.sin(1.1), theta_i=1.1, phi_i=0.0)


@pytest.fixture(scope="session")
def weak_config():
    return weak_cfg()


@pytest.fixture(scope="session")
def zero_contrast_config():
    return weak_cfg(eps_r=1.0, mu_r=1.0)


@pytest.fixture(scope="session")
def normal_incidence_config():
    return weak_cfg(eps_r=2.0, theta_i=math.pi / 2.0, k0=4.0, phi_i=0.25)


@pytest.fixture(scope="session")
def divergent_config():
    return GratingConfig(**DIVERGENT)


@pytest.fixture(scope="session")
def weak_pipeline(weak_config):
    """(single table, lattice table, direct solution) at N = 8."""
    n = 8
    single = build_scatter_table(n, weak_config)
    lat = lattice_table(n, weak_config, 1e-8)
    return single, lat, solve_direct(assemble(n, single, lat))


@pytest.fixture(scope="session")
def zero_pipeline(zero_contrast_config):
    n = 8
    single = build_scatter_table(n, zero_contrast_config)
    lat = lattice_table(n, zero_contrast_config, 1e-8)
    return single, lat, solve_direct(assemble(n, single, lat))
