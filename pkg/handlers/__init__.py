from .convergence.convergence_commands import *
from .probability.probability_commands import *
from .invariants.invariant_commands import *
from .lattice.lattice_commands import *
