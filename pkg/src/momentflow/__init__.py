"""momentflow: concentration-diffusion cycles in small Navier-Stokes flows.

Pipeline: design a sign-change system for prescribed times, realize it as an
oscillating divergence-free datum, evolve it pseudo-spectrally, accumulate
the moment matrix K(t), and classify the far-field decay exponent over time.
A separate module measures the linear (heat-flow) concentration contrast of
slowly decaying oscillatory data.
"""

__version__ = "0.1.0"

from ._kernels import HAVE_COMPILED

__all__ = ["HAVE_COMPILED", "__version__"]
