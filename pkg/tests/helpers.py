import numpy as np

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def loglog_slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def random_matrix(rng, dim, scale=1.0):
    M = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * M / np.linalg.norm(M)


def random_spd(rng, dim, eps=0.1):
    M = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return M @ M.conj().T + eps * np.eye(dim)


def random_unitary(rng, dim):
    Q, R = np.linalg.qr(random_matrix(rng, dim))
    return Q * (np.diag(R) / np.abs(np.diag(R)))
