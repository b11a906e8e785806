"""Independent reference implementations used to grade the fast paths.

Everything here is deliberately naive: literal summation, explicit
python loops, textbook elimination. Slow is fine, these only ever run
on small instances. None of it imports the package under test.
"""

import math

import numpy as np


def dft_magnitude(frame, fft_size):
    """O(n^2) DFT magnitude of a zero-padded frame, bins 0..fft_size/2."""
    x = np.zeros(fft_size)
    x[:len(frame)] = frame
    out = []
    for k in range(fft_size // 2 + 1):
        re = im = 0.0
        for n in range(fft_size):
            angle = -2.0 * math.pi * k * n / fft_size
            re += x[n] * math.cos(angle)
            im += x[n] * math.sin(angle)
        out.append(math.hypot(re, im))
    return np.array(out)


def literal_cepstrum(log_values, cepstral_count, dct_norm_len):
    """O_i = sum_{b=1..B} L_b cos(i (b - 1/2) pi / N_f), i = 1..D."""
    out = []
    for i in range(1, cepstral_count + 1):
        acc = 0.0
        for b, level in enumerate(log_values, start=1):
            acc += level * math.cos(i * (b - 0.5) * math.pi / dct_norm_len)
        out.append(acc)
    return np.array(out)


def reference_subtractive(data, radius, accept_ratio=0.5, reject_ratio=0.15):
    """Step-by-step potential clustering, plain loops throughout.

    Returns (selected_indices, centers, potentials_at_selection).
    """
    data = np.asarray(data, dtype=float)
    n, dim = data.shape
    alpha = 4.0 / radius ** 2
    beta = 4.0 / (1.5 * radius) ** 2

    def sqdist(i, point):
        return sum((data[i, k] - point[k]) ** 2 for k in range(dim))

    potentials = []
    for i in range(n):
        potentials.append(sum(math.exp(-alpha * sqdist(i, data[j]))
                              for j in range(n)))

    indices = []
    selected_pots = []
    first = None
    while True:
        best = max(range(n), key=lambda i: potentials[i])  # first max wins
        p_star = potentials[best]
        if first is None:
            first = p_star
        elif p_star > accept_ratio * first:
            pass
        elif p_star < reject_ratio * first:
            break
        else:
            d_min = min(math.sqrt(sqdist(best, data[i])) for i in indices)
            if d_min / radius + p_star / first < 1.0:
                potentials[best] = 0.0
                continue
        indices.append(best)
        selected_pots.append(p_star)
        for i in range(n):
            potentials[i] -= p_star * math.exp(-beta * sqdist(i, data[best]))
    return indices, data[indices].copy(), np.array(selected_pots)


def gauss_solve(a, b):
    """Gaussian elimination with partial pivoting; b may be a matrix."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    single = b.ndim == 1
    if single:
        b = b[:, None]
    n = a.shape[0]
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(a[col:, col])))
        if a[pivot, col] == 0.0:
            raise ZeroDivisionError("singular system")
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            b[[col, pivot]] = b[[pivot, col]]
        for row in range(col + 1, n):
            factor = a[row, col] / a[col, col]
            a[row, col:] -= factor * a[col, col:]
            b[row] -= factor * b[col]
    x = np.zeros_like(b)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1:] @ x[row + 1:]) / a[row, row]
    return x[:, 0] if single else x


def naive_forward(x, centers, widths, weights, bias):
    """Term-by-term summation of the RBF combiner output."""
    outputs = np.array(bias, dtype=float).copy()
    for i in range(len(centers)):
        phi = math.exp(-sum((x[k] - centers[i][k]) ** 2
                            for k in range(len(x))) / widths[i])
        outputs += phi * np.asarray(weights[i], dtype=float)
    return outputs


def naive_distortion(features, centers):
    """Mean nearest-center Euclidean distance via a double loop."""
    total = 0.0
    for row in features:
        best = math.inf
        for center in centers:
            d = math.sqrt(sum((row[k] - center[k]) ** 2
                              for k in range(len(row))))
            best = min(best, d)
        total += best
    return total / len(features)
