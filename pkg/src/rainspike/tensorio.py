"""Flat binary container for named float32 tensors.

Layout (little-endian):
  magic "TNSR" | version u16 | count u32
  per tensor: name_len u16 | name utf-8 | dtype u8 (0 = f32) | ndim u8 |
              dims u32 * ndim
  then each tensor's payload in table order, float32 little-endian.
"""

import struct

import numpy as np

MAGIC = b"TNSR"
VERSION = 1
DTYPE_F32 = 0


def write_tensors(tensors, path):
    """tensors: dict name -> ndarray (stored as float32)."""
    header = [MAGIC, struct.pack("<HI", VERSION, len(tensors))]
    payloads = []
    for name, arr in tensors.items():
        arr = np.ascontiguousarray(arr, dtype="<f4")
        encoded = name.encode("utf-8")
        header.append(struct.pack("<H", len(encoded)))
        header.append(encoded)
        header.append(struct.pack("<BB", DTYPE_F32, arr.ndim))
        header.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        payloads.append(arr.tobytes())
    with open(path, "wb") as f:
        for chunk in header:
            f.write(chunk)
        for chunk in payloads:
            f.write(chunk)


def read_tensors(path):
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:4] != MAGIC:
        raise ValueError(f"bad magic: {raw[:4]!r}")
    version, count = struct.unpack_from("<HI", raw, 4)
    if version != VERSION:
        raise ValueError(f"unsupported version: {version}")
    offset = 10
    table = []
    for _ in range(count):
        (name_len,) = struct.unpack_from("<H", raw, offset)
        offset += 2
        name = raw[offset : offset + name_len].decode("utf-8")
        offset += name_len
        dtype, ndim = struct.unpack_from("<BB", raw, offset)
        offset += 2
        if dtype != DTYPE_F32:
            raise ValueError(f"unsupported dtype tag: {dtype}")
        shape = struct.unpack_from(f"<{ndim}I", raw, offset)
        offset += 4 * ndim
        table.append((name, shape))
    tensors = {}
    for name, shape in table:
        n = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(raw, dtype="<f4", count=n, offset=offset)
        offset += 4 * n
        tensors[name] = arr.reshape(shape).astype(np.float64)
    return tensors
