#!/usr/bin/env python3
"""Writes the byte-level reference files for the FMAP1 / RCUB1 encoders.

Independent of the C++ code: headers are compact JSON with sorted keys, payloads are
little-endian float32. Run from any directory; files land next to this script.
"""
import json
import os
import struct

HERE = os.path.dirname(os.path.abspath(__file__))


def header(obj):
    return json.dumps(obj, separators=(",", ":"), sort_keys=True)


def f32(values):
    return b"".join(struct.pack("<f", v) for v in values)


def grid(nx, ny, pitch, origin, u=(1.0, 0.0, 0.0), v=(0.0, 1.0, 0.0)):
    return {"origin_m": list(origin), "axis_u": list(u), "axis_v": list(v),
            "nx": nx, "ny": ny, "pitch_m": pitch}


def pulse(laser=700.0, wait=1500.0, shots=100, c0=0.05, counts=10000.0, read=0.0):
    return {"laser_ns": laser, "wait_ns": wait, "n_shots": shots, "c0": c0,
            "counts_ref": counts, "read_noise": read}


def write(name, data):
    with open(os.path.join(HERE, name), "wb") as f:
        f.write(data)


def polarized():
    g = grid(3, 2, 2e-06, (-3e-06, -2e-06, 1.2e-05))
    h = {"grid": g, "component": "sigma-", "units": "T", "k": 1, "channels": ["b"]}
    vals = [0.0, 1e-06, 2.5e-05, -3e-06, 0.0001, 7.5e-07]
    write("polarized_3x2.fmap", b"FMAP1\n" + header(h).encode() + b"\n" + f32(vals))


def phasor():
    g = grid(2, 1, 5e-07, (0.0, 0.0, 1.4e-05), u=(0.0, 0.0, 1.0), v=(1.0, 0.0, 0.0))
    ch = ["bx_re", "bx_im", "by_re", "by_im", "bz_re", "bz_im"]
    h = {"grid": g, "component": "phasor", "units": "T", "k": 6, "channels": ch}
    vals = [1e-06, -2e-06, 3e-06, 0.0, -5e-07, 2.5e-07,
            0.0, 0.0, 1.5e-05, -1.5e-05, 4e-06, 8e-06]
    write("phasor_2x1.fmap", b"FMAP1\n" + header(h).encode() + b"\n" + f32(vals))


def cube():
    g = grid(2, 2, 1e-06, (0.0, 0.0, 0.0))
    dt = [0.0, 10.0, 20.0]
    h = {"grid": g, "dt_list_ns": dt, "pulse": pulse(), "seed": 42, "frames": 3}
    frames = [[0.0, 0.0, 0.0, 0.0],
              [0.01, 0.02, -0.005, 0.03],
              [0.04, 0.05, 0.0125, -0.001]]
    payload = b"".join(f32(f) for f in frames)
    write("cube_2x2x3.rcub", b"RCUB1\n" + header(h).encode() + b"\n" + payload)


def stream():
    g = grid(2, 1, 1e-06, (0.0, 0.0, 0.0))
    p = pulse(shots=50)
    out = b""
    for ts, on, vals in [(0.35, False, [0.001, -0.002]), (1.05, True, [0.03, 0.04])]:
        h = {"grid": g, "dt_list_ns": [30.0], "pulse": p, "seed": None, "frames": 1,
             "timestamp_ms": ts, "mw_on": on}
        out += b"RCUB1\n" + header(h).encode() + b"\n" + f32(vals)
    write("stream_2x1.rcubs", out)


if __name__ == "__main__":
    polarized()
    phasor()
    cube()
    stream()
