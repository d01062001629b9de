"""Echo-spectroscopy simulation laboratory.

Computes highly excited eigenstates of hard-wall atom-optics billiards,
eigenstate stability under boundary deformations, 1D gravito-optical trap
spectra, and Ramsey/echo microwave pulse-sequence signals for thermal
ensembles.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
