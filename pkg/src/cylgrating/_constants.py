"""Free-space electromagnetic constants (SI)."""

import math

MU_0 = 4.0e-7 * math.pi          # vacuum permeability, H/m
C_0 = 299_792_458.0              # speed of light, m/s
EPS_0 = 1.0 / (MU_0 * C_0 * C_0)  # vacuum permittivity, F/m

# Free-space wave impedance and admittance; the impedance equals mu_0 * c.
XI_0 = MU_0 * C_0                # sqrt(mu_0 / eps_0), ohm
ETA_0 = 1.0 / XI_0               # sqrt(eps_0 / mu_0), siemens

EULER_GAMMA = 0.5772156649015329
