"""
Covariance descriptors

Builds SPD points from numeric arrays that were already decoded from images or
video frames:
- brodatz_pixel_features: intensity and derivative magnitudes per pixel (k=5)
- ethz_pixel_features: position, colour and colour-derivative magnitudes per pixel (k=11)
- dct_features / frame_set_features: leading 2-D DCT coefficients per image of a set
- covariance_descriptor / set_covariance: sample covariance plus a ridge

Derivatives are central differences; border pixels are excluded.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.fft import dctn
from scipy.ndimage import zoom

from .exceptions import FeatureError, RankDeficient
from .spd import _frozen, pd_floor

logger = logging.getLogger(__name__)

MIN_GRID = 5


@dataclass(frozen=True)
class FeatureTable:
    """M feature vectors of dimension k, one per row."""

    rows: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise FeatureError(f"feature table must be 2-D, got shape {rows.shape}")
        if rows.shape[0] < 2:
            raise FeatureError(f"need at least two feature vectors, got {rows.shape[0]}")
        if rows.shape[1] < 1:
            raise FeatureError("feature vectors must have at least one entry")
        if not np.all(np.isfinite(rows)):
            raise FeatureError("feature table has non-finite entries")
        object.__setattr__(self, "rows", _frozen(rows.copy()))

    @property
    def dim(self):
        return self.rows.shape[1]

    def __len__(self):
        return self.rows.shape[0]


def table_features(rows, provenance="table"):
    return FeatureTable(np.asarray(rows, dtype=float), provenance)


def default_ridge(cov):
    """1e-6 times the mean variance."""
    cov = np.atleast_2d(cov)
    return 1e-6 * float(np.trace(cov)) / cov.shape[0]


def resolve_ridge(table: FeatureTable, ridge=None):
    """The ridge a descriptor of `table` is built with: `ridge`, or the default when None."""
    if ridge is None:
        return default_ridge(np.cov(table.rows, rowvar=False, ddof=1))
    return float(ridge)


def covariance_descriptor(table: FeatureTable, ridge=None):
    """Sample covariance (normalized by M − 1) of the table rows plus ridge·I.

    Raises:
        RankDeficient: the ridged covariance is not positive definite; the
            exception carries a ridge that would make it so.
    """
    cov = np.atleast_2d(np.cov(table.rows, rowvar=False, ddof=1))
    if ridge is None:
        ridge = default_ridge(cov)
    if ridge < 0:
        raise ValueError(f"ridge must be nonnegative, got {ridge}")
    cov = cov + ridge * np.eye(cov.shape[0])
    cov = (cov + cov.T) / 2.0
    values = np.linalg.eigvalsh(cov)
    if values[0] <= pd_floor(values[-1]):
        scale = max(float(np.trace(cov)) / cov.shape[0], 1.0)
        suggested = ridge - min(values[0], 0.0) + 1e-6 * scale
        raise RankDeficient(
            f"covariance of {table.provenance or 'table'} is not positive definite at ridge {ridge:.3e} "
            f"(min eigenvalue {values[0]:.3e}); try ridge >= {suggested:.3e}",
            min_eigenvalue=float(values[0]),
            suggested_ridge=float(suggested),
        )
    return _frozen(cov)


def set_covariance(vectors: FeatureTable, ridge=None):
    """Covariance of a set of feature vectors (image set or frame sequence), mean-centred over the set."""
    centred = FeatureTable(vectors.rows - vectors.rows.mean(axis=0), vectors.provenance)
    return covariance_descriptor(centred, ridge=ridge)


def _grid(a, channels=None):
    a = np.asarray(a, dtype=np.float64)
    expected = 2 if channels is None else 3
    if a.ndim != expected or (channels is not None and a.shape[2] != channels):
        shape = "(rows, cols)" if channels is None else f"(rows, cols, {channels})"
        raise FeatureError(f"expected a grid of shape {shape}, got {a.shape}")
    if a.shape[0] < MIN_GRID or a.shape[1] < MIN_GRID:
        raise FeatureError(f"grid must be at least {MIN_GRID}x{MIN_GRID}, got {a.shape[0]}x{a.shape[1]}")
    if not np.all(np.isfinite(a)):
        raise FeatureError("grid has non-finite entries")
    return a


def _central_differences(img):
    centre = img[1:-1, 1:-1]
    left, right = img[1:-1, :-2], img[1:-1, 2:]
    up, down = img[:-2, 1:-1], img[2:, 1:-1]
    dx = (right - left) / 2.0
    dy = (down - up) / 2.0
    dxx = right - 2.0 * centre + left
    dyy = down - 2.0 * centre + up
    return centre, dx, dy, dxx, dyy


def brodatz_pixel_features(gray):
    """Rows [I, |∂I/∂x|, |∂I/∂y|, |∂²I/∂x²|, |∂²I/∂y²|] for every interior pixel."""
    gray = _grid(gray)
    centre, dx, dy, dxx, dyy = _central_differences(gray)
    rows = np.stack([centre, np.abs(dx), np.abs(dy), np.abs(dxx), np.abs(dyy)], axis=-1)
    return FeatureTable(rows.reshape(-1, 5), "brodatz")


def ethz_pixel_features(rgb):
    """Rows [x, y, R, G, B, R′, G′, B′, R″, G″, B″] for every interior pixel.

    x is the column and y the row of the pixel; ′ is √(dx² + dy²) and ″ is
    √(dxx² + dyy²) of each channel.
    """
    rgb = _grid(rgb, channels=3)
    h, w = rgb.shape[:2]
    ys, xs = np.mgrid[1 : h - 1, 1 : w - 1]
    colour, first, second = [], [], []
    for c in range(3):
        centre, dx, dy, dxx, dyy = _central_differences(rgb[:, :, c])
        colour.append(centre)
        first.append(np.hypot(dx, dy))
        second.append(np.hypot(dxx, dyy))
    rows = np.stack([xs, ys, *colour, *first, *second], axis=-1).astype(np.float64)
    return FeatureTable(rows.reshape(-1, 11), "ethz")


@lru_cache(maxsize=32)
def _zigzag(rows, cols):
    order = sorted(
        ((i, j) for i in range(rows) for j in range(cols)),
        key=lambda ij: (ij[0] + ij[1], ij[0] if (ij[0] + ij[1]) % 2 else -ij[0]),
    )
    index = np.array(order)
    return index[:, 0], index[:, 1]


def dct_features(gray, k):
    """First `k` orthonormal type-II 2-D DCT coefficients in zig-zag order."""
    gray = np.asarray(gray, dtype=np.float64)
    if gray.ndim != 2 or gray.size == 0:
        raise FeatureError(f"expected a non-empty 2-D grid, got shape {gray.shape}")
    if not 1 <= k <= gray.size:
        raise FeatureError(f"k must be between 1 and {gray.size}, got {k}")
    coefficients = dctn(gray, type=2, norm="ortho")
    i, j = _zigzag(*gray.shape)
    return coefficients[i[:k], j[:k]]


def _resize(frame, shape):
    rows, cols = shape
    if rows < 1 or cols < 1:
        raise FeatureError(f"resize target must be positive, got {rows}x{cols}")
    out = zoom(frame, (rows / frame.shape[0], cols / frame.shape[1]), order=1, mode="nearest", grid_mode=True)
    if out.shape != (rows, cols):
        raise FeatureError(f"resize produced {out.shape}, expected {(rows, cols)}")
    return out


def frame_set_features(frames, k, subtract_mean_frame=False, normalize_variance=False, resize=None):
    """DCT feature table of an image set or frame sequence.

    `resize` is an optional (rows, cols) every frame is linearly interpolated to
    first. Then optionally subtracts the mean frame and divides every pixel by
    its standard deviation over the set before the transform.
    """
    frames = [np.asarray(f, dtype=np.float64) for f in frames]
    if not frames or any(f.ndim != 2 or f.size == 0 for f in frames):
        raise FeatureError("frames must be non-empty 2-D grids")
    if resize is not None:
        frames = [_resize(f, resize) for f in frames]
    if len({f.shape for f in frames}) != 1:
        raise FeatureError("frames must be equally sized 2-D grids")
    stack = np.stack(frames)
    if subtract_mean_frame:
        stack = stack - stack.mean(axis=0)
    if normalize_variance:
        std = stack.std(axis=0)
        stack = stack / np.where(std > 0, std, 1.0)
    rows = np.stack([dct_features(f, k) for f in stack])
    return FeatureTable(rows, "dct-set")
