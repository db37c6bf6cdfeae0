"""Mask and field file formats, plus seeded outlier injection.

Masks are netpbm files: P1/P2/P5 graymaps or P4 bitmaps are read, P5 is
written. A pixel ``(m, n)`` of the mask is the image pixel at row ``m``,
column ``n``.

Fields use the LSF1 binary layout::

    bytes 0-3    b"LSF1"
    bytes 4-7    M, uint32 little-endian
    bytes 8-11   N, uint32 little-endian
    bytes 12-15  zero
    then M*N float64 little-endian values, with m varying fastest
"""

import struct
from pathlib import Path

import numpy as np

LSF1_MAGIC = b"LSF1"
_HEADER = struct.Struct("<4sIII")

MASK64 = (1 << 64) - 1


class FormatError(ValueError):
    pass


def _tokens(data, start, count):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    out = []
    i = start
    while len(out) < count:
        while i < len(data) and data[i:i + 1].isspace():
            i += 1
        if i < len(data) and data[i:i + 1] == b"#":
            while i < len(data) and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < len(data) and not data[j:j + 1].isspace() and data[j:j + 1] != b"#":
            j += 1
        if j == i:
            raise FormatError("truncated netpbm header")
        out.append(data[i:j])
        i = j
    return out, i


def load_mask(path):
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic not in (b"P1", b"P2", b"P4", b"P5"):
        raise FormatError(f"{path}: unsupported netpbm magic {magic!r}")
    bitmap = magic in (b"P1", b"P4")
    (w, h, *rest), pos = _tokens(data, 2, 2 if bitmap else 3)
    width, height = int(w), int(h)
    maxval = 1 if bitmap else int(rest[0])
    if magic == b"P1":
        digits = [c for c in data[pos:].decode("ascii") if c in "01"]
        # P1 digits need not be whitespace separated; comments are not expected in the raster
        values = np.array(digits[:width * height], dtype=np.int64)
    elif magic == b"P2":
        values = np.array(data[pos:].split()[:width * height], dtype=np.int64)
    elif magic == b"P4":
        row_bytes = (width + 7) // 8
        raw = np.frombuffer(data[pos + 1:pos + 1 + row_bytes * height], dtype=np.uint8)
        if raw.size < row_bytes * height:
            raise FormatError(f"{path}: short payload")
        values = np.unpackbits(raw.reshape(height, row_bytes), axis=1)[:, :width].ravel()
    else:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        raw = np.frombuffer(data[pos + 1:pos + 1 + width * height * dtype.itemsize], dtype=dtype)
        values = raw.astype(np.int64)
    if values.size < width * height:
        raise FormatError(f"{path}: short payload")
    img = values.reshape(height, width)
    bad = (img != 0) & (img != maxval)
    if bad.any():
        m, n = np.argwhere(bad)[0]
        raise FormatError(f"{path}: non-binary value {img[m, n]} at pixel ({m}, {n})")
    # in P1/P4 a 1 bit is black; treat black ink as foreground
    return img != 0


def save_mask(mask, path):
    mask = np.asarray(mask, dtype=bool)
    height, width = mask.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (width, height))
        fh.write(np.where(mask, 255, 0).astype(np.uint8).tobytes())


def save_pgm_ascii(image, path, maxval=255):
    image = np.asarray(image, dtype=np.int64)
    height, width = image.shape
    lines = [b"P2", b"%d %d" % (width, height), b"%d" % maxval]
    lines += [b" ".join(b"%d" % v for v in row) for row in image]
    Path(path).write_bytes(b"\n".join(lines) + b"\n")


def save_heatmap(field, path):
    """Linear 8-bit grayscale rendering of a field (for eyeballing level sets)."""
    f = np.asarray(field, dtype=np.float64)
    lo, hi = f.min(), f.max()
    scaled = np.zeros(f.shape) if hi == lo else (f - lo) / (hi - lo)
    height, width = f.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (width, height))
        fh.write(np.round(scaled * 255).astype(np.uint8).tobytes())


def dump_field(field, path):
    f = np.asarray(field, dtype=np.float64)
    if f.ndim != 2:
        raise ValueError(f"expected a 2-D field, got shape {f.shape}")
    M, N = f.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(LSF1_MAGIC, M, N, 0))
        # m fastest: Fortran order of the (M, N) array
        fh.write(f.astype("<f8").tobytes(order="F"))


def load_field(path):
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: short header")
    magic, M, N, reserved = _HEADER.unpack_from(data)
    if magic != LSF1_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if reserved != 0 or M == 0 or N == 0:
        raise FormatError(f"{path}: bad shape or reserved field")
    payload = data[_HEADER.size:]
    if len(payload) < 8 * M * N:
        raise FormatError(f"{path}: short payload")
    if len(payload) > 8 * M * N:
        raise FormatError(f"{path}: trailing bytes after payload")
    return np.frombuffer(payload, dtype="<f8").reshape((M, N), order="F").astype(np.float64)


class XorShift64Star:
    """xorshift64* generator seeded through one splitmix64 step.

    ``next()`` returns 64-bit unsigned integers; ``below(n)`` draws
    uniformly from ``range(n)`` by rejection, so no modulo bias.
    """

    def __init__(self, seed):
        z = (int(seed) + 0x9E3779B97F4A7C15) & MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        z ^= z >> 31
        self.state = z or 0x9E3779B97F4A7C15

    def next(self):
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & MASK64

    def below(self, n):
        if n <= 0:
            raise ValueError("range must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next()
            if r < limit:
                return r % n


def add_outliers(mask, count, seed):
    """Turn ``count`` distinct background pixels on, chosen by a partial Fisher-Yates shuffle."""
    mask = np.asarray(mask, dtype=bool)
    if count < 0:
        raise ValueError("count must be nonnegative")
    background = np.flatnonzero(~mask)
    if count > background.size:
        raise ValueError(f"asked for {count} outliers but only {background.size} background pixels")
    rng = XorShift64Star(seed)
    pool = background.copy()
    for i in range(count):
        j = i + rng.below(pool.size - i)
        pool[i], pool[j] = pool[j], pool[i]
    out = mask.copy()
    out.flat[pool[:count]] = True
    return out
