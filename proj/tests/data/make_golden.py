#!/usr/bin/env python3
"""Writes the golden NAF1/NPF1 fixtures with nothing but `struct`.

Kept independent of the C++ encoder so the reader is checked against a
second implementation of the byte layout. Rerun only if the fixtures are
meant to change.
"""
import pathlib
import struct

HERE = pathlib.Path(__file__).resolve().parent


def name(s):
    raw = s.encode("utf-8")
    return struct.pack("<H", len(raw)) + raw


def naf():
    m = 3
    out = b"NAF1" + struct.pack("<HII", 1, m, 2)
    # f32, pre-residual, stage 0, 3 x 2
    out += name("conv1") + struct.pack("<BBBI", 0, 0, 0, 2)
    out += struct.pack("<6f", 1.5, -2.0, 0.25, 3.0, 0.0, -0.125)
    # f64, post-residual, stage 1, 3 x 1, non-ASCII name
    out += name("block1/out·post") + struct.pack("<BBBI", 1, 1, 1, 1)
    out += struct.pack("<3d", 0.1, 2.0, -7.5)
    return out


def npf():
    out = b"NPF1" + struct.pack("<III", 2, 4, 3)
    out += struct.pack("<4H", 0, 1, 2, 1)
    out += name("m0") + struct.pack("<4H", 0, 1, 1, 1)
    out += name("seed-1") + struct.pack("<4H", 2, 1, 2, 0)
    return out


if __name__ == "__main__":
    (HERE / "two_layers.naf").write_bytes(naf())
    (HERE / "ensemble.npf").write_bytes(npf())
