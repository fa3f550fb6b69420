"""Independent ground truth: Wick enumeration, cumulant transforms, Monte Carlo."""
from .cumulants import all_cumulants_from_raw, connected_from_raw, raw_from_cumulants, set_partitions
from .wick import (
    Entry,
    Trace,
    WickQuery,
    connected_series,
    entry_cumulant,
    gaussian_moment,
    interacting_moment,
    invariant_cumulant,
    logz,
    partition_function,
    wick_exact,
)
from .montecarlo import McEstimate, ModelRun, canonical_moments, haar_unitaries, mc_haar, mc_model
