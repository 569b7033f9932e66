from metaxfer.meta.dataset import *
from metaxfer.meta.preprocess import *
from metaxfer.meta.split import *
