from .bounds import *
from .curves import *
from .probability import *
from .invariants import *
