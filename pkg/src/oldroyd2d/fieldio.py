"""Binary serialization of spectral fields.

Record layout (little-endian):

    magic   4 bytes  b"O2DF"
    version u32      currently 1
    rank    u8       1 = scalar, 2 = vector, 3 = symmetric tensor
    n       u32      grid points per axis
    payload rank * n*n complex numbers, row-major, each stored as a
            (real, imag) pair of 64-bit floats

A file may hold several records back to back; a saved simulation state is
a vector record (velocity) followed by a symmetric-tensor record (stress).
"""

import struct
from fractions import Fraction

import numpy as np

from .fields import SpectralScalar, SpectralSymTensor, SpectralVector
from .grid import TorusGrid

MAGIC = b"O2DF"
VERSION = 1
_HEADER = struct.Struct("<4sIBI")

_RANK_OF = {SpectralScalar: 1, SpectralVector: 2, SpectralSymTensor: 3}


def write_field(fh, field) -> None:
    """Append one field record to a binary stream."""
    rank = _RANK_OF.get(type(field))
    if rank is None:
        raise TypeError(f"not a spectral field: {type(field).__name__}")
    fh.write(_HEADER.pack(MAGIC, VERSION, rank, field.grid.n))
    for comp in field.components:
        fh.write(np.ascontiguousarray(comp.coeffs, dtype="<c16").tobytes())


def read_field(fh, dealias_fraction=Fraction(2, 3)):
    """Read one field record; returns None at a clean end of stream."""
    head = fh.read(_HEADER.size)
    if len(head) == 0:
        return None
    if len(head) < _HEADER.size:
        raise ValueError("truncated record header")
    magic, version, rank, n = _HEADER.unpack(head)
    if magic != MAGIC:
        raise ValueError("not an o2df field file (bad magic)")
    if version != VERSION:
        raise ValueError(f"unsupported o2df version {version}")
    if rank not in (1, 2, 3):
        raise ValueError(f"invalid field rank {rank}")
    grid = TorusGrid(n, dealias_fraction)
    comps = []
    for _ in range(rank):
        raw = fh.read(16 * n * n)
        if len(raw) < 16 * n * n:
            raise ValueError("truncated record payload")
        coeffs = np.frombuffer(raw, dtype="<c16").reshape(n, n).astype(np.complex128)
        comps.append(SpectralScalar(grid, coeffs))
    if rank == 1:
        return comps[0]
    if rank == 2:
        return SpectralVector(*comps)
    return SpectralSymTensor(*comps)


def save_fields(path, fields) -> None:
    with open(path, "wb") as fh:
        for field in fields:
            write_field(fh, field)


def load_fields(path, dealias_fraction=Fraction(2, 3)):
    out = []
    with open(path, "rb") as fh:
        while True:
            field = read_field(fh, dealias_fraction)
            if field is None:
                return out
            out.append(field)
