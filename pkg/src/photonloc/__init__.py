"""Two-photon localisation and delocalisation in coupled nonlinear cavities.

Closed-system dynamics in the two-photon sector, dissipative and
dephasing master equations, and Green-function dynamics of linear cavity
arrays, with preset datasets and a CLI for reproducing the headline
results deterministically.
"""

__version__ = "0.1.0"

from .cavity_array import ArrayConfig, ArrayInitialState  # noqa: F401
from .coherent import InitialAngles, TwoPhotonState  # noqa: F401
from .errors import (  # noqa: F401
    DegeneracyError,
    IntegrationError,
    NumericsError,
    PhotonlocError,
    UndefinedCorrelationError,
    ValidationError,
)
from .fock import SystemParams  # noqa: F401
from .open_system import DecayRates, MomentVector  # noqa: F401
