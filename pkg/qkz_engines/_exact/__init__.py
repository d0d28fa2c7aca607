from .gaussian import GaussianRational, ZERO, ONE, I
from .ratfunc import RationalFunction
