from metaxfer.nn.mlp import *
from metaxfer.nn.adam import *
from metaxfer.nn.transfer import *
