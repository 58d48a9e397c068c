"""Special functions, bump functions and oscillatory quadrature."""

from .bessel import bessel_j, bessel_k0, bessel_y0
from .bump import BumpSum, SmoothBump
from .quadrature import QuadratureResult, fixed_panels, integrate

__all__ = ["bessel_j", "bessel_y0", "bessel_k0", "SmoothBump", "BumpSum", "QuadratureResult", "integrate", "fixed_panels"]
