"""QoS-aware user association for two-tier heterogeneous cellular networks."""

from .algorithms import (AlgorithmResult, max_probability, max_rate_assoc, qos_distributed,
                         ye_distributed)
from .config import ScenarioConfig, SolverOpts, load_config
from .core import Association, Budget, DemandProfile, resource_demand
from .estimators import (MaxProbabilityAssociation, MaxRateAssociation, QoSDistributedAssociation,
                         YeAssociation)
from .exceptions import ConfigurationError, DomainError, InstanceTooLargeError, SolverError

__version__ = "0.1.0"

__all__ = [
    "AlgorithmResult", "Association", "Budget", "ConfigurationError", "DemandProfile",
    "DomainError", "InstanceTooLargeError", "MaxProbabilityAssociation", "MaxRateAssociation",
    "QoSDistributedAssociation", "ScenarioConfig", "SolverError", "SolverOpts", "YeAssociation",
    "load_config", "max_probability", "max_rate_assoc", "qos_distributed", "resource_demand",
    "ye_distributed",
]
