"""Hypothesis strategies for points of the disc."""

import numpy as np
from hypothesis import strategies as st


def disc_points(r_max=0.95):
    return st.builds(
        lambda r, t: complex(r * np.cos(t), r * np.sin(t)),
        st.floats(0.0, r_max), st.floats(0.0, 2 * np.pi),
    )


def separated_sets(n_min=1, n_max=4, r_max=0.8, min_sep=0.05):
    def ok(pts):
        return all(abs((a - b) / (1 - np.conj(b) * a)) > min_sep
                   for i, a in enumerate(pts) for b in pts[:i])
    return st.lists(disc_points(r_max), min_size=n_min, max_size=n_max).filter(ok)
