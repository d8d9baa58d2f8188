from .base import *
from .bump import *
from .adversarial import *
