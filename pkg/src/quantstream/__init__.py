"""Streaming multi-quantile estimation by smoothed SGD with simultaneous inference."""
from .Band import Band
from .BandReport import BandReport
from .BahadurTerms import BahadurTerms
from .BridgeSpec import BridgeSpec
from .Checkpoint import Checkpoint
from .ConditionalConfig import ConditionalConfig
from .ConditionalState import ConditionalState
from .CoverageCell import CoverageCell
from .CoverageTable import CoverageTable
from .CrossingReport import CrossingReport
from .Dgp import Dgp
from .EstimateMode import EstimateMode
from .ExperimentPlan import ExperimentPlan
from .InferenceReport import InferenceReport
from .OutputFormat import OutputFormat
from .QQData import QQData
from .QuantileGrid import QuantileGrid
from .QuantileState import QuantileState
from .ReservoirSample import ReservoirSample
from .ScheduleConfig import ScheduleConfig
from .SparsityEstimate import SparsityEstimate
from .SparsityMode import SparsityMode
from .TailCurve import TailCurve
from .errors import ConfigError, DomainError, InputError, NumericError, QuantStreamError, QuantStreamWarning

__version__ = "0.1.0"

__all__ = [
    "Band", "BandReport", "BahadurTerms", "BridgeSpec", "Checkpoint", "ConditionalConfig",
    "ConditionalState", "CoverageCell", "CoverageTable", "CrossingReport", "Dgp", "EstimateMode",
    "ExperimentPlan", "InferenceReport", "OutputFormat", "QQData", "QuantileGrid", "QuantileState",
    "ReservoirSample", "ScheduleConfig", "SparsityEstimate", "SparsityMode", "TailCurve",
    "ConfigError", "DomainError", "InputError", "NumericError", "QuantStreamError", "QuantStreamWarning",
]
