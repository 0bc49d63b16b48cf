"""Multiple scattering by an infinite grating of dielectric circular
cylinders at oblique plane-wave incidence.

The package computes the coupled TM/TE multiple-scattering coefficients of
the grating, exterior z-component fields, and far-field amplitude matrices,
from three ingredients: isolated-cylinder scattering matrices, Schlömilch
lattice sums of Hankel functions, and a truncated dense solve (or Neumann
iteration) of the coupling equations.
"""

__version__ = "0.1.0"

from .cylinder import (GratingConfig, Wavenumbers, CylinderBlocks,
                       SingleScatterMatrix, SingleScatterTable,
                       derive_wavenumbers, coupling_factor, blocks,
                       scatter_matrix, wait_matrix, dimensional_scatter,
                       build_scatter_table)
from .errors import (ConfigError, DivergenceError, DomainError, EngineError,
                     EvanescentInteriorError, LatticeTableError,
                     NonConvergenceError, RangeOverflowError, ResonanceError,
                     SingularSystemError, WoodAnomalyError)
from .fields import (AmplitudeMatrix, FieldGrid, FieldSample, LocalPoint,
                     exterior_fields, feed_orders_needed, grating_amplitude,
                     grid_scan, incident_ez, single_amplitude)
from .lattice import (LatticeTable, SchlomilchSum, lattice_table, schlomilch,
                      wood_margin)
from .solver import (CoefficientSet, SystemAssembly, assemble,
                     default_truncation, residual, single_scattering,
                     solve_direct, solve_neumann)

__all__ = [
    "__version__",
    # cylinder
    "GratingConfig", "Wavenumbers", "CylinderBlocks", "SingleScatterMatrix",
    "SingleScatterTable", "derive_wavenumbers", "coupling_factor", "blocks",
    "scatter_matrix", "wait_matrix", "dimensional_scatter", "build_scatter_table",
    # lattice
    "LatticeTable", "SchlomilchSum", "lattice_table", "schlomilch", "wood_margin",
    # solver
    "CoefficientSet", "SystemAssembly", "assemble", "default_truncation",
    "residual", "single_scattering", "solve_direct", "solve_neumann",
    # fields
    "AmplitudeMatrix", "FieldGrid", "FieldSample", "LocalPoint",
    "exterior_fields", "feed_orders_needed", "grating_amplitude", "grid_scan",
    "incident_ez", "single_amplitude",
    # errors
    "EngineError", "DomainError", "RangeOverflowError", "ConfigError",
    "EvanescentInteriorError", "ResonanceError", "WoodAnomalyError",
    "NonConvergenceError", "LatticeTableError", "SingularSystemError",
    "DivergenceError",
]
