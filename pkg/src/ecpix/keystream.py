"""Chaos-driven elliptic-curve keystream generation.

The generator walks a point sequence on a binary curve,

    U_i = [i * (1 + b_i)]G + U0         i = 1, 2, ...

where G is the base point, U0 the secret initial point, and the bit b_i
comes from thresholding a logistic-map orbit at 0.5: after each
iteration s <- r*s*(1-s), the bit is 0 when s <= 0.5 and 1 otherwise.
So each step emits [i]G + U0 or [2i]G + U0.

Points become key bytes by serializing the x-coordinate of each affine
U_i big-endian, keeping the low floor(m/8) whole bytes (minimum one byte
for toy fields).  Points at infinity contribute nothing but still
consume an index and a chaos bit.  This extraction rule is part of the
key-file contract: two implementations agreeing on it produce identical
keystreams.

Determinism: the map update uses only IEEE-754 double multiply/subtract
with a fixed evaluation order, so identical key material yields a
bit-identical keystream on any conforming platform.

A KeystreamGenerator is a sequential mutable object; do not share one
between threads without external coordination.  Distinct generators are
fully independent.
"""

from __future__ import annotations

import json
import math
import secrets
import threading
from collections import OrderedDict
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .curves import (
    CURVE_REGISTRY,
    DEFAULT_CURVE_NAME,
    INFINITY,
    CurveParams,
    NamedCurve,
    Point,
    get_curve,
)
from .errors import FormatError, KeyMaterialError, ParameterError
from .gf2m import BinaryField

BLOCK_SIZES = (8, 16, 32)

#: Degenerate logistic-map seeds (fixed points and short cycles at r=4).
_FORBIDDEN_SEEDS = (0.0, 0.25, 0.5, 0.75, 1.0)
_SEED_MARGIN = 1e-14


def validate_chaos_seed(s: float) -> None:
    """Reject seeds on which the logistic map degenerates."""
    if not _SEED_MARGIN < s < 1.0 - _SEED_MARGIN:
        raise ParameterError(f"chaos seed {s!r} outside ({_SEED_MARGIN}, 1 - {_SEED_MARGIN})")
    if any(s == bad for bad in _FORBIDDEN_SEEDS):
        raise ParameterError(f"chaos seed {s!r} is a fixed point / short cycle")


class LogisticMap:
    """Logistic-map bit source: s <- r*s*(1-s), bit = [s > 0.5]."""

    __slots__ = ("state", "r", "step_index")

    def __init__(self, seed: float, r: float = 4.0):
        validate_chaos_seed(seed)
        if not 0.0 < r <= 4.0:
            raise ParameterError(f"map parameter r={r!r} outside (0, 4]")
        self.state = float(seed)
        self.r = float(r)
        self.step_index = 0

    def next_bit(self) -> int:
        s = self.r * self.state * (1.0 - self.state)
        self.state = s
        self.step_index += 1
        return 1 if s > 0.5 else 0

    def next_bits(self, n: int) -> np.ndarray:
        """n successive bits as a uint8 array (same sequence as next_bit)."""
        out = np.empty(n, dtype=np.uint8)
        s = self.state
        r = self.r
        for k in range(n):
            s = r * s * (1.0 - s)
            out[k] = 1 if s > 0.5 else 0
        self.state = s
        self.step_index += n
        return out


def bytes_per_point(field_params: BinaryField) -> int:
    """Key bytes contributed by one affine point: floor(m/8), at least 1."""
    return max(1, field_params.m // 8)


class KeystreamGenerator:
    """Stateful point-sequence generator with a byte pool.

    ``bit_source`` is anything with a ``next_bit()`` method (and
    optionally ``next_bits(n)``); production code uses a LogisticMap,
    tests may force bits.
    """

    def __init__(self, curve: CurveParams, generator: Point, u0: Point,
                 bit_source, use_fast: bool | None = None):
        for name, p in (("generator", generator), ("u0", u0)):
            if p.is_infinity or not curve.contains(p.x, p.y):
                raise ParameterError(f"{name} must be an affine point on the curve")
        self.curve = curve
        self.g = generator
        self.u0 = u0
        self.bits = bit_source
        self.bytes_per_point = bytes_per_point(curve.field)
        self._w = INFINITY  # running [i-1]G
        self._i = 1  # next index
        self._pool = bytearray()
        if use_fast is None:
            use_fast = _kernels.HAVE_NUMBA and curve.field.m <= _kernels.MAX_FAST_DEGREE
        elif use_fast and not (_kernels.HAVE_NUMBA and curve.field.m <= _kernels.MAX_FAST_DEGREE):
            raise ParameterError("fast path unavailable for this field/platform")
        self._fast = use_fast
        if self._fast:
            f = curve.field
            self._poly_l = _kernels.to_limbs(f.poly)
            self._a_l = _kernels.to_limbs(int(curve.a))
            self._gx_l = _kernels.to_limbs(int(generator.x))
            self._gy_l = _kernels.to_limbs(int(generator.y))
            self._u0x_l = _kernels.to_limbs(int(u0.x))
            self._u0y_l = _kernels.to_limbs(int(u0.y))

    @property
    def index(self) -> int:
        """Index i of the next point to be generated (starts at 1)."""
        return self._i

    def next_point(self) -> Point:
        """One generator step; may return the point at infinity."""
        bit = self.bits.next_bit()
        w = self.curve.add(self._w, self.g)  # [i]G
        s = self.curve.double(w) if bit else w
        u = self.curve.add(s, self.u0)
        self._w = w
        self._i += 1
        return u

    def next_bytes(self, n: int) -> bytes:
        """The next n keystream bytes (n >= 1); surplus bytes stay pooled."""
        if n < 1:
            raise ParameterError("need n >= 1 keystream bytes")
        while len(self._pool) < n:
            missing = n - len(self._pool)
            points = -(-missing // self.bytes_per_point)
            if self._fast:
                self._run_fast(max(points, 64))
            else:
                self._run_reference(points)
        out = bytes(self._pool[:n])
        del self._pool[:n]
        return out

    def _run_reference(self, points: int) -> None:
        mask = (1 << (8 * self.bytes_per_point)) - 1
        for _ in range(points):
            u = self.next_point()
            if not u.is_infinity:
                self._pool += (int(u.x) & mask).to_bytes(self.bytes_per_point, "big")

    def _run_fast(self, points: int) -> None:
        if hasattr(self.bits, "next_bits"):
            bits = self.bits.next_bits(points)
        else:
            bits = np.array([self.bits.next_bit() for _ in range(points)], dtype=np.uint8)
        if self._w.is_infinity:
            wx = np.zeros(_kernels.NLIMBS, np.uint64)
            wy = np.zeros(_kernels.NLIMBS, np.uint64)
            winf = True
        else:
            wx = _kernels.to_limbs(int(self._w.x))
            wy = _kernels.to_limbs(int(self._w.y))
            winf = False
        out = np.empty(points * self.bytes_per_point, dtype=np.uint8)
        written, winf = _kernels.keystream_fill(
            bits, wx, wy, winf, self._gx_l, self._gy_l, self._u0x_l, self._u0y_l,
            self._a_l, self._poly_l, self.curve.field.m, self.bytes_per_point, out,
        )
        self._pool += out[:written].tobytes()
        self._i += points
        if winf:
            self._w = INFINITY
        else:
            f = self.curve.field
            self._w = Point(
                f.element(_kernels.from_limbs(wx)), f.element(_kernels.from_limbs(wy))
            )


@dataclass(frozen=True)
class KeyMaterial:
    """The full secret: curve, base point, per-channel U0, chaos seed, IV.

    One U0 entry keys a grayscale image; three key the R, G, B channels
    (same G and chaos seed, so the channels differ only in U0).
    """

    curve: CurveParams
    generator: Point
    u0: tuple[Point, ...]
    chaos_seed: float
    chaos_r: float = 4.0
    iv: bytes | None = None
    scheme: int = 1
    block_size: int = 8
    curve_name: str | None = None

    def __post_init__(self) -> None:
        if self.scheme not in (1, 2):
            raise KeyMaterialError(f"scheme must be 1 or 2, got {self.scheme}")
        if self.block_size not in BLOCK_SIZES:
            raise KeyMaterialError(f"block size must be one of {BLOCK_SIZES}")
        if len(self.u0) not in (1, 3):
            raise KeyMaterialError("need exactly 1 (grayscale) or 3 (RGB) U0 points")
        for p in (self.generator, *self.u0):
            if p.is_infinity or not self.curve.contains(p.x, p.y):
                raise KeyMaterialError("G and every U0 must be affine points on the curve")
        if len(self.u0) == 3 and len(set(self.u0)) != 3:
            raise KeyMaterialError("RGB key needs three distinct U0 points")
        try:
            validate_chaos_seed(self.chaos_seed)
        except ParameterError as e:
            raise KeyMaterialError(str(e)) from None
        if not 0.0 < self.chaos_r <= 4.0:
            raise KeyMaterialError(f"chaos_r={self.chaos_r!r} outside (0, 4]")
        if self.scheme == 2:
            want = self.block_size * self.block_size
            if self.iv is None or len(self.iv) != want:
                raise KeyMaterialError(f"scheme 2 needs an IV of exactly {want} bytes")

    @property
    def channels(self) -> int:
        return len(self.u0)

    def stream_identity(self, channel: int) -> tuple:
        """Hashable identity of one channel's keystream (cache key).

        The byte stream depends only on these values, not on scheme,
        block size, or IV.
        """
        u0 = self.u0[channel]
        f = self.curve.field
        return (
            f.m, f.poly, int(self.curve.a), int(self.curve.b),
            int(self.generator.x), int(self.generator.y),
            int(u0.x), int(u0.y), self.chaos_seed, self.chaos_r,
        )

    def make_generator(self, channel: int, use_fast: bool | None = None) -> KeystreamGenerator:
        if not 0 <= channel < len(self.u0):
            raise ParameterError(f"key has no channel {channel}")
        return KeystreamGenerator(
            self.curve, self.generator, self.u0[channel],
            LogisticMap(self.chaos_seed, self.chaos_r), use_fast=use_fast,
        )


class _StreamCache:
    """Grow-on-demand keystream prefixes, keyed by generator identity.

    derive_block_keys for different block sizes, or for encrypt followed
    by decrypt, re-reads the same deterministic stream; caching the
    prefix avoids recomputing the point sequence.
    """

    def __init__(self, max_entries: int = 16):
        self._max = max_entries
        self._lock = threading.Lock()
        self._entries: OrderedDict[tuple, tuple[KeystreamGenerator, bytearray]] = OrderedDict()

    def fetch(self, km: KeyMaterial, channel: int, nbytes: int) -> bytes:
        key = km.stream_identity(channel)
        with self._lock:
            entry = self._entries.get(key)
            if entry is None:
                entry = (km.make_generator(channel), bytearray())
                self._entries[key] = entry
                if len(self._entries) > self._max:
                    self._entries.popitem(last=False)
            else:
                self._entries.move_to_end(key)
            gen, buf = entry
            if len(buf) < nbytes:
                buf += gen.next_bytes(nbytes - len(buf))
            return bytes(buf[:nbytes])

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()


_stream_cache = _StreamCache()


def clear_keystream_cache() -> None:
    _stream_cache.clear()


def derive_block_keys(km: KeyMaterial, channel: int, num_blocks: int) -> list[bytes]:
    """num_blocks consecutive N*N-byte key blocks for one channel."""
    if not 0 <= channel < km.channels:
        raise ParameterError(f"key has {km.channels} channel(s), no channel {channel}")
    if num_blocks < 1:
        raise ParameterError("need at least one block")
    n2 = km.block_size * km.block_size
    stream = _stream_cache.fetch(km, channel, num_blocks * n2)
    return [stream[j * n2:(j + 1) * n2] for j in range(num_blocks)]


# ---------------------------------------------------------------------------
# Key file format (JSON)
# ---------------------------------------------------------------------------
# {
#   "curve": "sect163k1"
#            | {"m": int, "poly_hex": str, "a_hex": str, "b_hex": str,
#               "gx_hex": str, "gy_hex": str},
#   "u0": [{"x_hex": str, "y_hex": str}, ...],          # 1 or 3 entries
#   "chaos_seed": "0.123...",                            # decimal string
#   "chaos_r": "4.0",                                    # optional
#   "iv_hex": "...",                                     # scheme 2 only
#   "scheme": 1 | 2,
#   "block_size": 8 | 16 | 32
# }
# Reduction polynomials of custom curves are verified irreducible only
# for m <= 20; standardized field sizes are trusted as given.


def key_material_to_dict(km: KeyMaterial) -> dict:
    if km.curve_name is not None:
        curve_entry: str | dict = km.curve_name
    else:
        f = km.curve.field
        poly_width = (f.m + 1 + 3) // 4
        curve_entry = {
            "m": f.m,
            "poly_hex": format(f.poly, f"0{poly_width}x"),
            "a_hex": km.curve.a.to_hex(),
            "b_hex": km.curve.b.to_hex(),
            "gx_hex": km.generator.x.to_hex(),
            "gy_hex": km.generator.y.to_hex(),
        }
    out = {
        "curve": curve_entry,
        "u0": [{"x_hex": p.x.to_hex(), "y_hex": p.y.to_hex()} for p in km.u0],
        "chaos_seed": repr(km.chaos_seed),
        "chaos_r": repr(km.chaos_r),
        "scheme": km.scheme,
        "block_size": km.block_size,
    }
    if km.iv is not None:
        out["iv_hex"] = km.iv.hex()
    return out


def key_material_from_dict(data: dict) -> KeyMaterial:
    try:
        curve_entry = data["curve"]
        u0_entries = data["u0"]
        seed_str = data["chaos_seed"]
        scheme = data["scheme"]
        block_size = data["block_size"]
    except (KeyError, TypeError) as e:
        raise FormatError(f"key file missing field: {e}") from None

    if isinstance(curve_entry, str):
        named = get_curve(curve_entry)
        curve, g, curve_name = named.curve, named.generator, named.name
    elif isinstance(curve_entry, dict):
        try:
            m = int(curve_entry["m"])
            poly = int(curve_entry["poly_hex"], 16)
            fld = BinaryField(m, poly)
            curve = CurveParams(
                fld, fld.parse_hex(curve_entry["a_hex"]), fld.parse_hex(curve_entry["b_hex"])
            )
            g = curve.point(
                fld.parse_hex(curve_entry["gx_hex"]), fld.parse_hex(curve_entry["gy_hex"])
            )
        except KeyError as e:
            raise FormatError(f"custom curve missing field: {e}") from None
        except ParameterError as e:
            raise KeyMaterialError(f"bad custom curve: {e}") from None
        curve_name = None
    else:
        raise FormatError("curve must be a name or a parameter object")

    try:
        u0 = tuple(
            curve.point(
                curve.field.parse_hex(entry["x_hex"]), curve.field.parse_hex(entry["y_hex"])
            )
            for entry in u0_entries
        )
    except (KeyError, TypeError) as e:
        raise FormatError(f"bad u0 entry: {e}") from None
    except ParameterError as e:
        raise KeyMaterialError(f"bad u0 point: {e}") from None

    try:
        seed = float(seed_str)
        r = float(data.get("chaos_r", "4.0"))
    except (TypeError, ValueError):
        raise FormatError("chaos_seed / chaos_r must be decimal strings") from None

    iv = None
    if "iv_hex" in data:
        try:
            iv = bytes.fromhex(data["iv_hex"])
        except (TypeError, ValueError):
            raise FormatError("iv_hex is not valid hex") from None

    return KeyMaterial(
        curve=curve, generator=g, u0=u0, chaos_seed=seed, chaos_r=r,
        iv=iv, scheme=int(scheme), block_size=int(block_size), curve_name=curve_name,
    )


def save_key_material(km: KeyMaterial, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(key_material_to_dict(km), fh, indent=2)
        fh.write("\n")


def load_key_material(path) -> KeyMaterial:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise FormatError(f"key file is not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise FormatError("key file must hold a JSON object")
    return key_material_from_dict(data)


def generate_key_material(curve_name: str = DEFAULT_CURVE_NAME, channels: int = 1,
                          scheme: int = 1, block_size: int = 8) -> KeyMaterial:
    """Fresh random key material from OS randomness.

    U0 points are random multiples of G; the chaos seed is drawn until
    it passes validation; scheme-2 keys get a random IV.
    """
    if channels not in (1, 3):
        raise ParameterError("channels must be 1 or 3")
    named = get_curve(curve_name)
    curve, g = named.curve, named.generator
    scalar_bound = named.order if named.order is not None else curve.field.order * 2

    u0: list[Point] = []
    while len(u0) < channels:
        k = secrets.randbelow(scalar_bound - 1) + 1
        p = curve.scalar_mul(k, g)
        if p.is_infinity or p in u0:
            continue
        u0.append(p)

    while True:
        seed = secrets.randbits(53) / float(1 << 53)
        try:
            validate_chaos_seed(seed)
            break
        except ParameterError:
            continue

    iv = secrets.token_bytes(block_size * block_size) if scheme == 2 else None
    return KeyMaterial(
        curve=curve, generator=g, u0=tuple(u0), chaos_seed=seed,
        iv=iv, scheme=scheme, block_size=block_size, curve_name=named.name,
    )


def with_scheme(km: KeyMaterial, scheme: int, block_size: int | None = None) -> KeyMaterial:
    """Copy of a key retargeted at another scheme/block size.

    Used by tests and the repro grid; a scheme-2 target without an IV of
    the right size gets a fresh random one.
    """
    n = km.block_size if block_size is None else block_size
    iv = km.iv
    if scheme == 2 and (iv is None or len(iv) != n * n):
        iv = secrets.token_bytes(n * n)
    if scheme == 1:
        iv = None
    return replace(km, scheme=scheme, block_size=n, iv=iv)


def monobit_fraction(stream: bytes) -> float:
    """Fraction of one-bits in a byte string (keystream sanity check)."""
    if not stream:
        raise ParameterError("empty stream")
    bits = np.unpackbits(np.frombuffer(stream, dtype=np.uint8))
    return float(bits.mean())


__all__ = [
    "BLOCK_SIZES",
    "KeyMaterial",
    "KeystreamGenerator",
    "LogisticMap",
    "bytes_per_point",
    "clear_keystream_cache",
    "derive_block_keys",
    "generate_key_material",
    "key_material_from_dict",
    "key_material_to_dict",
    "load_key_material",
    "monobit_fraction",
    "save_key_material",
    "validate_chaos_seed",
    "with_scheme",
]
