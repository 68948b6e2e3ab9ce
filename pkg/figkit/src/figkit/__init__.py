"""Static figure regeneration from SK annealing benchmark CSVs."""

from .figures import (
    clamp_log,
    fig1,
    fig2,
    fig3,
    fig4,
    fig5,
    make_figures,
    quadratic_fit,
)
from .loading import MissingInputError, SchemaError

__version__ = "0.1.0"
