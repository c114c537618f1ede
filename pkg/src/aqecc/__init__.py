"""Approximate error-correcting codes in magnetization sectors of spin chains."""
from .codes import CodeSpace, CodewordSpec, Model, schmidt_weights, scaling_curve, select_code_space
from .errors import AqeccError
from .kl import code_error_bound, verify_code

__version__ = "0.1.0"

__all__ = [
    "AqeccError",
    "CodeSpace",
    "CodewordSpec",
    "Model",
    "code_error_bound",
    "scaling_curve",
    "schmidt_weights",
    "select_code_space",
    "verify_code",
]
