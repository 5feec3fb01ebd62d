"""Conditioning-aware extreme learning machines trained by a beetle antennae swarm."""

from .bas import BasConfig, bas_search
from .data import Dataset, load_dataset, synthetic_sinc
from .elm import Activation, ElmModel, ElmParams, EvalReport, evaluate, predict
from .mbas import Role, SwarmConfig, mbas_search
from .numerics import INFINITE, condition_number, l2_norm, pseudoinverse, svd
from .trainer import (FitnessSpec, TrainConfig, train_bas_elm, train_mbas_elm,
                      train_plain_elm)

__version__ = "0.1.0"
