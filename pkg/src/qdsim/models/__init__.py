from . import dirac, jaynes_cummings, neutrino

__all__ = ["dirac", "jaynes_cummings", "neutrino"]
