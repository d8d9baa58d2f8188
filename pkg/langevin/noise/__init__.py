from .grid import *
from .sampler import *
from .integrals import *
