"""Downlink coverage of a typical vehicle in an urban crossroad V2X model."""
from .analytic import CoverageResult, coverage, laplace_los_pcp, laplace_los_ppp, laplace_nlos, laplace_s
from .config import NlosRoadMode, RoadCase, ScenarioConfig, Thinning, VehicleModel
from .channel import Carrier, FrequencyProfile, GaussianPattern, OmniPattern
from .errors import NumericalError, ParameterError
from .quadrature import QuadratureSpec

__version__ = "0.1.0"
