"""Exact finite-scale computations for local, colocal and antilocal module classes."""

__version__ = "0.1.0"

from .rings import ZZ, ModularRing, PolyRing, QuotientPolyRing, ring_from_descriptor, unit_ideal_witness
from .modules import FPModule, ModuleMap, cyclic_module, free_module
from .scenarios import Report, emit_report, list_scenarios, run_scenario

__all__ = ["ZZ", "ModularRing", "PolyRing", "QuotientPolyRing", "ring_from_descriptor", "unit_ideal_witness",
           "FPModule", "ModuleMap", "cyclic_module", "free_module",
           "Report", "emit_report", "list_scenarios", "run_scenario", "__version__"]
