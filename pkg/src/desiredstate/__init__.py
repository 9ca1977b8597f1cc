"""Desired-state management for distributed component applications.

A declarative description of components, hosts and constraints is compiled
into a pseudo-boolean constraint problem, compliant configurations are
enumerated, and a chosen configuration is enacted and maintained inside a
deterministic deployment simulator.
"""

__version__ = "0.1.0"
