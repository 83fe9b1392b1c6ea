"""Lifetime-maximising monitor selection for point-coverage sensor networks.

Each round picks a set of active monitors by simulated annealing (or a
waiting-time contest), routes their data to super nodes over fewest-hop relay
paths and charges first-order radio energy, until some target can no longer
be covered.
"""

__version__ = "0.1.0"

from .model import NetworkConfig, ObjectiveWeights, SAParams, place_uniform  # noqa: E402
from .simulation import run_batch, run_simulation, run_sweep  # noqa: E402

__all__ = ["NetworkConfig", "ObjectiveWeights", "SAParams", "place_uniform",
           "run_batch", "run_simulation", "run_sweep", "__version__"]
