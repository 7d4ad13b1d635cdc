"""Reference values used by the comparison scripts, keyed by
``(beta, omega, n, S)`` or noise level."""

COND = {
    (0.1, 1.9, 16, 16): (2021.13, 62.31), (0.5, 1.5, 16, 16): (731.46, 85.61),
    (0.9, 1.1, 16, 16): (1370.83, 108.14), (0.1, 1.9, 16, 32): (4124.81, 63.03),
    (0.5, 1.5, 16, 32): (1499.79, 86.36), (0.9, 1.1, 16, 32): (3655.00, 107.30),
    (0.1, 1.9, 32, 16): (7656.42, 65.81), (0.5, 1.5, 32, 16): (1511.39, 97.70),
    (0.9, 1.1, 32, 16): (1687.82, 136.21), (0.1, 1.9, 32, 32): (15643.64, 66.66),
    (0.5, 1.5, 32, 32): (2787.31, 98.67), (0.9, 1.1, 32, 32): (4430.20, 135.51),
}

ITERS = {
    (0.1, 1.9, 16, 16): (174, 8), (0.1, 1.9, 16, 32): (257, 8),
    (0.1, 1.9, 32, 16): (320, 9), (0.1, 1.9, 32, 32): (475, 8),
    (0.5, 1.5, 16, 16): (117, 10), (0.5, 1.5, 16, 32): (146, 11),
    (0.5, 1.5, 32, 16): (181, 11), (0.5, 1.5, 32, 32): (217, 11),
    (0.9, 1.1, 16, 16): (112, 13), (0.9, 1.1, 16, 32): (154, 13),
    (0.9, 1.1, 32, 16): (151, 15), (0.9, 1.1, 32, 32): (199, 15),
}

# beta = 0.1, omega = 1.9; (n, S) -> {(eps, lambda): error}
RECON = {
    (16, 16): [0.0165, 0.0133, 0.0506, 0.1328, 0.0721, 0.2571, 0.3573, 0.2108, 0.6351],
    (32, 32): [0.0438, 0.0173, 0.0526, 0.1241, 0.0594, 0.2400, 0.4186, 0.3003, 0.6227],
    (64, 64): [0.0579, 0.0194, 0.0510, 0.1628, 0.0552, 0.2393, 0.5085, 0.3732, 0.6115],
}
NOISE_LAMBDA = [
    (0.001, 1e-5), (0.001, 1e-4), (0.001, 1e-3),
    (0.01, 1e-4), (0.01, 1e-3), (0.01, 1e-2),
    (0.1, 1e-3), (0.1, 1e-2), (0.1, 1e-1),
]
