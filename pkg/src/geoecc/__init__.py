"""Geographic eccentricity measurement and geographic-routing simulation.

Measures whether a localized network (node positions plus a communication
graph) is fit for geographic routing, builds the canonical simulation of
the plane the network collectively maintains, runs navigation engines and
generic routing over it, and simulates the distributed protocols that
compute per-node zones or prove the network unfit at a given locality k.
"""

__version__ = "0.1.0"
