import logging

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.linalg import eigvals

from hardybear.config import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)


def trim(coeffs) -> np.ndarray:
    """Drop vanishing highest-order coefficients (ascending order)."""
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    nonzero = np.flatnonzero(coeffs)
    if nonzero.size == 0:
        return np.zeros(1, dtype=complex)
    return coeffs[: nonzero[-1] + 1]


def roots_with_multiplicity(coeffs, cluster_tol: float = DEFAULT_TOLERANCES.root_cluster) -> list[tuple[complex, int]]:
    """Roots of the polynomial with ascending coefficients `coeffs`, with multiplicities.

    Exact zeros at the origin are split off first. The remaining roots are
    eigenvalues of the companion matrix; a root of multiplicity k is smeared
    into a cluster of radius about cluster_tol^(1/k), so eigenvalues closer than
    sqrt(cluster_tol) are linked (single linkage) and replaced by their centroid.

    Returns:
        list[tuple[complex, int]]: (root, multiplicity) sorted by modulus.
    """
    coeffs = trim(coeffs)
    if coeffs.size == 1:
        return []

    n_zero = int(np.flatnonzero(coeffs)[0])
    coeffs = coeffs[n_zero:]

    roots: list[tuple[complex, int]] = [(0j, n_zero)] if n_zero else []
    if coeffs.size == 1:
        return roots

    eigenvalues = eigvals(P.polycompanion(coeffs)) if coeffs.size > 2 else np.array([-coeffs[0] / coeffs[1]])
    if eigenvalues.size == 1:
        roots.append((complex(eigenvalues[0]), 1))
    else:
        points = np.column_stack([eigenvalues.real, eigenvalues.imag])
        labels = fcluster(linkage(points, method="single"), t=np.sqrt(cluster_tol), criterion="distance")
        for label in np.unique(labels):
            members = eigenvalues[labels == label]
            roots.append((complex(members.mean()), int(members.size)))
        logger.debug("clustered %d eigenvalues into %d roots", eigenvalues.size, len(np.unique(labels)))

    return sorted(roots, key=lambda item: (abs(item[0]), np.angle(item[0])))


def from_roots(roots: list[tuple[complex, int]]) -> np.ndarray:
    """Monic polynomial (ascending coefficients) with the given roots and multiplicities."""
    expanded = [root for root, mult in roots for _ in range(mult)]
    if not expanded:
        return np.ones(1, dtype=complex)
    return np.asarray(P.polyfromroots(expanded), dtype=complex)
