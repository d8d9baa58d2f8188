from .state import *
from .semigroup import *
from .solvers import *
from .moments import *
