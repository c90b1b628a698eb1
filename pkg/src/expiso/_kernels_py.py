"""Numpy implementations of the grid sweeps, used when the extension is absent."""
import numpy as np


def axis_pass(d, forward, boundary_source, cap):
    n = d.shape[1]
    if n == 0:
        return
    first = 0 if forward else n - 1
    if boundary_source:
        np.minimum(d[:, first, :], 1, out=d[:, first, :])
    order = range(1, n) if forward else range(n - 2, -1, -1)
    step = -1 if forward else 1
    buf = np.empty_like(d[:, 0, :], dtype=np.int32)
    for i in order:
        np.add(d[:, i + step, :], 1, out=buf, dtype=np.int32)
        np.minimum(buf, cap, out=buf)
        np.minimum(d[:, i, :], buf, out=d[:, i, :], casting="unsafe")


def mass_histogram_2d(d, w0, w1, nbins):
    hist = np.zeros(nbins)
    for i in range(d.shape[0]):
        row = d[i]
        keep = row < nbins
        hist += w0[i] * np.bincount(row[keep], weights=w1[keep], minlength=nbins)[:nbins]
    return hist


def mass_histogram_3d(d, w0, w1, w2, nbins):
    hist = np.zeros(nbins)
    plane_w = np.multiply.outer(w1, w2)
    for i in range(d.shape[0]):
        plane = d[i]
        keep = plane < nbins
        hist += w0[i] * np.bincount(plane[keep], weights=plane_w[keep], minlength=nbins)[:nbins]
    return hist


def diagonal_counts(occ):
    r, c = occ.shape
    if r == 0 or c == 0:
        return np.zeros(0, dtype=np.int64)
    out = np.zeros(r + c - 1, dtype=np.int64)
    for i in range(r):
        out[i:i + c] += occ[i].astype(bool)
    return out
