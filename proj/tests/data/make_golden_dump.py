"""Writes golden_4x8.ksh with Python's struct module, independently of the C++ writer.

Payload value at (i, j) is i + j / 8 - 0.375, plus one subnormal and one
negative zero so that bit patterns are exercised.
"""
import struct
from pathlib import Path

n1, n2 = 4, 8
ly1, ly2, t = 12.566370614359172, 6.283185307179586, 0.25
values = [i + j / 8 - 0.375 for i in range(n1) for j in range(n2)]
values[5] = 5e-324
values[6] = -0.0

out = bytearray(b"KSH1")
out += struct.pack("<III", 1, n1, n2)
out += struct.pack("<ddd", ly1, ly2, t)
out += struct.pack("<%dd" % len(values), *values)
Path(__file__).with_name("golden_4x8.ksh").write_bytes(bytes(out))
