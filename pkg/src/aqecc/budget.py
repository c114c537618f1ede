"""Memory cap shared by every routine that materializes full state vectors."""
import os

from .errors import BudgetError

BYTES_PER_AMPLITUDE = 16  # complex128
# 20000 amplitudes admits 2**14 and 3**9 but not 2**15 or 3**10.
DEFAULT_BUDGET_BYTES = 20_000 * BYTES_PER_AMPLITUDE
ENV_VAR = "AQECC_BUDGET_BYTES"


def max_amplitudes():
    raw = os.environ.get(ENV_VAR)
    nbytes = int(raw) if raw else DEFAULT_BUDGET_BYTES
    return nbytes // BYTES_PER_AMPLITUDE


def check_dimension(site_dim, n_sites, what="state vector"):
    """Raise BudgetError if ``site_dim**n_sites`` amplitudes exceed the cap."""
    dim = site_dim ** n_sites
    cap = max_amplitudes()
    if dim > cap:
        raise BudgetError(
            f"{what} of dimension {site_dim}^{n_sites} = {dim} exceeds the "
            f"budget of {cap} amplitudes (set {ENV_VAR} to raise it)"
        )
    return dim
