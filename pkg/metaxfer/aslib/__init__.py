from metaxfer.aslib.arff import *
from metaxfer.aslib.scenario import *
from metaxfer.aslib.datamgr import *
from metaxfer.aslib.synthetic import write_synthetic_scenario
