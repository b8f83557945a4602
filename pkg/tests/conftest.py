import numpy as np


def spectral_norm(x) -> float:
    if hasattr(x, "to_array"):
        x = x.to_array()
    return float(np.linalg.norm(x, ord=2))
