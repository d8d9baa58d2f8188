from .intervals import *
from .chains import *
from .classes import *
