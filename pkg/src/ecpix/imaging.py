"""Netpbm image I/O, block partitioning, and the zigzag scan.

Only the binary Netpbm formats are supported: P5 (grayscale) and P6
(RGB), maxval 255.  Header tokens may be separated by arbitrary
whitespace and '#' comments; exactly one whitespace byte separates the
maxval from the raster.  ASCII variants (P2/P3) are rejected.

partition() splits an image into N x N blocks per channel, row-major
within a channel (left to right, top to bottom) and channel-major
overall; the right/bottom edges are zero-padded to whole blocks, and
assemble() crops the padding back off.

The zigzag scan is the JPEG-style anti-diagonal traversal: it starts at
(0,0), first moves right, and alternates diagonal direction, visiting
every cell of an N x N block exactly once.

ImageBuffer is immutable once constructed; all transforms here are pure.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import (
    CorruptFileError,
    ParameterError,
    StructureError,
    UnsupportedFormatError,
)

_WHITESPACE = b" \t\r\n\x0b\x0c"


@dataclass(frozen=True)
class ImageBuffer:
    """width x height x channels of 8-bit samples, row-major, interleaved."""

    width: int
    height: int
    channels: int
    pixels: bytes

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ParameterError("image dimensions must be positive")
        if self.channels not in (1, 3):
            raise ParameterError("channels must be 1 (grayscale) or 3 (RGB)")
        want = self.width * self.height * self.channels
        if len(self.pixels) != want:
            raise ParameterError(
                f"pixel buffer holds {len(self.pixels)} bytes, expected {want}"
            )

    @classmethod
    def from_array(cls, arr: np.ndarray) -> ImageBuffer:
        """Build from a (h, w) or (h, w, c) uint8 array."""
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3 or arr.shape[2] not in (1, 3):
            raise ParameterError(f"expected (h, w[, 1|3]) array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            raise ParameterError("pixel array must be uint8")
        h, w, c = arr.shape
        return cls(w, h, c, np.ascontiguousarray(arr).tobytes())

    def as_array(self) -> np.ndarray:
        """Read-only (h, w, c) uint8 view of the raster."""
        arr = np.frombuffer(self.pixels, dtype=np.uint8)
        return arr.reshape(self.height, self.width, self.channels)

    def channel(self, index: int) -> np.ndarray:
        if not 0 <= index < self.channels:
            raise ParameterError(f"image has {self.channels} channel(s), no channel {index}")
        return self.as_array()[:, :, index]


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Next header token, skipping whitespace and '#' comments."""
    n = len(data)
    while pos < n:
        c = data[pos:pos + 1]
        if c == b"#":
            while pos < n and data[pos:pos + 1] not in b"\r\n":
                pos += 1
        elif c in _WHITESPACE:
            pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos:pos + 1] not in _WHITESPACE and data[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise CorruptFileError("image header ended unexpectedly")
    return data[start:pos], pos


def parse_netpbm(data: bytes) -> ImageBuffer:
    magic = data[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    elif magic in (b"P1", b"P2", b"P3", b"P4", b"P7"):
        raise UnsupportedFormatError(
            f"Netpbm variant {magic.decode('ascii', 'replace')} not supported; need binary P5/P6"
        )
    else:
        raise UnsupportedFormatError("not a Netpbm file (bad magic)")

    pos = 2
    fields = []
    for _ in range(3):
        token, pos = _next_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError:
            raise CorruptFileError(f"non-numeric header token {token!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise CorruptFileError(f"bad image dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedFormatError(f"only maxval 255 supported, got {maxval}")
    if pos >= len(data) or data[pos:pos + 1] not in _WHITESPACE:
        raise CorruptFileError("missing whitespace between header and raster")
    pos += 1  # single whitespace byte, then raster

    want = width * height * channels
    raster = data[pos:pos + want]
    if len(raster) < want:
        raise CorruptFileError(
            f"raster truncated: expected {want} bytes, found {len(raster)}"
        )
    return ImageBuffer(width, height, channels, raster)


def encode_netpbm(img: ImageBuffer) -> bytes:
    magic = b"P5" if img.channels == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, img.width, img.height)
    return header + img.pixels


def read_image(path) -> ImageBuffer:
    with open(path, "rb") as fh:
        return parse_netpbm(fh.read())


def write_image(img: ImageBuffer, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_netpbm(img))


@dataclass(frozen=True)
class BlockGrid:
    """An image cut into N x N blocks, padded to whole blocks per channel.

    ``blocks`` has shape (channels, blocks_y * blocks_x, N, N); block j of
    a channel sits at row j // blocks_x, column j % blocks_x.
    """

    n: int
    blocks_x: int
    blocks_y: int
    orig_width: int
    orig_height: int
    channels: int
    blocks: np.ndarray

    @property
    def padded_width(self) -> int:
        return self.blocks_x * self.n

    @property
    def padded_height(self) -> int:
        return self.blocks_y * self.n

    @property
    def blocks_per_channel(self) -> int:
        return self.blocks_x * self.blocks_y


def padded_size(value: int, n: int) -> int:
    return -(-value // n) * n


def partition(img: ImageBuffer, n: int) -> BlockGrid:
    """Split into N x N blocks with minimal zero padding on right/bottom."""
    if n not in (8, 16, 32):
        raise ParameterError(f"block size must be 8, 16 or 32, got {n}")
    bw = padded_size(img.width, n) // n
    bh = padded_size(img.height, n) // n
    padded = np.zeros((bh * n, bw * n, img.channels), dtype=np.uint8)
    padded[: img.height, : img.width, :] = img.as_array()
    # (h, w, c) -> (c, by, n, bx, n) -> (c, by*bx, n, n)
    blocks = (
        padded.transpose(2, 0, 1)
        .reshape(img.channels, bh, n, bw, n)
        .swapaxes(2, 3)
        .reshape(img.channels, bh * bw, n, n)
        .copy()
    )
    return BlockGrid(
        n=n, blocks_x=bw, blocks_y=bh,
        orig_width=img.width, orig_height=img.height,
        channels=img.channels, blocks=blocks,
    )


def assemble(grid: BlockGrid) -> ImageBuffer:
    """Exact inverse of partition(): rebuild the raster and crop padding."""
    c, nb, n, n2 = grid.blocks.shape
    if (n != grid.n or n2 != grid.n or c != grid.channels
            or nb != grid.blocks_per_channel):
        raise StructureError("block array shape disagrees with grid metadata")
    padded = (
        grid.blocks
        .reshape(c, grid.blocks_y, grid.blocks_x, n, n)
        .swapaxes(2, 3)
        .reshape(c, grid.padded_height, grid.padded_width)
        .transpose(1, 2, 0)
    )
    cropped = padded[: grid.orig_height, : grid.orig_width, :]
    return ImageBuffer.from_array(np.ascontiguousarray(cropped))


def zigzag_order(n: int) -> list[tuple[int, int]]:
    """Zigzag traversal of an n x n block as (row, col) pairs.

    Anti-diagonal d holds cells (i, d-i); odd diagonals are walked with
    the row increasing (down-left), even ones with it decreasing
    (up-right), which makes the first move from (0,0) go right.
    """
    if n < 1:
        raise ParameterError("block size must be positive")
    order = []
    for d in range(2 * n - 1):
        lo = max(0, d - n + 1)
        hi = min(d, n - 1)
        rows = range(lo, hi + 1) if d % 2 == 1 else range(hi, lo - 1, -1)
        order.extend((i, d - i) for i in rows)
    return order


@functools.lru_cache(maxsize=None)
def _zigzag_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    order = zigzag_order(n)
    rows = np.array([r for r, _ in order], dtype=np.intp)
    cols = np.array([c for _, c in order], dtype=np.intp)
    return rows, cols


def zigzag_flatten(block: np.ndarray) -> np.ndarray:
    """2D block -> 1D array of length N*N in zigzag order."""
    if block.ndim != 2 or block.shape[0] != block.shape[1]:
        raise StructureError(f"expected a square block, got shape {block.shape}")
    rows, cols = _zigzag_indices(block.shape[0])
    return block[rows, cols]


def zigzag_unflatten(arr: np.ndarray, n: int) -> np.ndarray:
    """Exact inverse of zigzag_flatten for an n x n block."""
    arr = np.asarray(arr)
    if arr.ndim != 1 or arr.shape[0] != n * n:
        raise StructureError(f"expected {n * n} values for an {n}x{n} block, got {arr.shape}")
    rows, cols = _zigzag_indices(n)
    block = np.empty((n, n), dtype=arr.dtype)
    block[rows, cols] = arr
    return block
