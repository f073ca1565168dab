"""edgelab: a numerical laboratory for edge statistics of non-Hermitian random matrices.

Submodules
----------
ensemble     i.i.d. and Ginibre ensembles, the Ornstein-Uhlenbeck interpolation
spectral     eigenvalues, singular values and the Hermitized resolvent
dyson        the scalar self-consistent equation on the imaginary axis
girko        test functions, linear statistics and Girko's identity
kernel       complex Ginibre limiting kernels and the edge density profile
stats        Monte Carlo accumulators, fits and two-sample tests
experiments  Monte Carlo experiments producing tables and summaries
io, cli      persistence and the ``edgelab`` command
"""

__version__ = "0.1.0"

from .errors import ConfigError, NumericalError  # noqa: E402,F401
