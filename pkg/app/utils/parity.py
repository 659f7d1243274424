import numpy as np


# --- Node vectors ---
def odd_part(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """
    Odd part of samples on a node set symmetric about the origin.

    Args:
        values (np.ndarray): Samples; reflection reverses `axis`.
        axis (int): Axis carrying the reflected coordinate. Defaults to 0.

    Returns:
        np.ndarray: ½(f − f∘reflection), exactly antisymmetric.
    """
    return 0.5 * (values - np.flip(values, axis=axis))


def even_part(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """
    Even part of samples on a node set symmetric about the origin.

    Args:
        values (np.ndarray): Samples; reflection reverses `axis`.
        axis (int): Axis carrying the reflected coordinate. Defaults to 0.

    Returns:
        np.ndarray: ½(f + f∘reflection), exactly symmetric.
    """
    return 0.5 * (values + np.flip(values, axis=axis))


# --- Matrices acting on node vectors ---
def odd_matrix(matrix: np.ndarray) -> np.ndarray:
    """Project so that J·D·J = −D, J being the node reversal (first-derivative structure)."""
    return 0.5 * (matrix - matrix[::-1, ::-1])


def even_matrix(matrix: np.ndarray) -> np.ndarray:
    """Project so that J·D·J = D (second-derivative structure)."""
    return 0.5 * (matrix + matrix[::-1, ::-1])


def reflection_indices(m: int, axis: str) -> np.ndarray:
    """
    Permutation of interior vector indices realizing x → −x or y → −y.

    Vectors are flattened with the x-index varying fastest, k = i + m·j.

    Args:
        m (int): Interior nodes per direction.
        axis (str): 'x' or 'y'.

    Returns:
        np.ndarray: Index array p with (Pv)[k] = v[p[k]].
    """
    grid = np.arange(m * m).reshape((m, m), order='F')
    flipped = grid[::-1, :] if axis == 'x' else grid[:, ::-1]
    return flipped.flatten(order='F')


def pairing_basis(m: int, parity: str) -> np.ndarray:
    """
    Orthonormal basis of the even or odd vectors of length m (m odd, center node kept).

    Args:
        m (int): Vector length.
        parity (str): 'even' or 'odd'.

    Returns:
        np.ndarray: m × k matrix with orthonormal columns.
    """
    half = m // 2
    sign = 1.0 if parity == 'even' else -1.0
    columns = half + (1 if parity == 'even' and m % 2 else 0)
    basis = np.zeros((m, columns))
    scale = 1.0 / np.sqrt(2.0)
    for k in range(half):
        basis[k, k] = scale
        basis[m - 1 - k, k] = sign * scale
    if columns > half:
        basis[half, half] = 1.0
    return basis
