#!/usr/bin/env python3
"""Writes the small RadioML-style pickle fixtures used by the unit tests.

Each fixture is a dict {(modulation, snr): ndarray[N, 2, W]} with
value = base + n/8 + c/16 + w/256, where base is 1, 2, 3 for the groups
('AM-DSB', -20), ('AM-DSB', 18), ('QPSK', 2). The dict is written in a
scrambled key order so loaders must sort.
"""
import pickle
import sys
from pathlib import Path

import numpy as np

W = 8
GROUPS = [(("QPSK", 2), 3, 2), (("AM-DSB", -20), 1, 3), (("AM-DSB", 18), 2, 1)]


def frames(base, count, dtype):
    n = np.arange(count).reshape(count, 1, 1)
    c = np.arange(2).reshape(1, 2, 1)
    w = np.arange(W).reshape(1, 1, W)
    return (base + n / 8 + c / 16 + w / 256).astype(dtype)


def table(dtype="<f4"):
    return {key: frames(base, count, dtype) for key, base, count in GROUPS}


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for proto in (0, 2, 4):
        (out / f"radioml_p{proto}.pkl").write_bytes(pickle.dumps(table(), protocol=proto))
    (out / "radioml_f8be.pkl").write_bytes(pickle.dumps(table(">f8"), protocol=2))
    bad_shape = {("BPSK", 0): np.zeros((2, 3, W), dtype="<f4")}
    (out / "radioml_badshape.pkl").write_bytes(pickle.dumps(bad_shape, protocol=2))
    unknown = {("FOO", 0): np.zeros((1, 2, W), dtype="<f4")}
    (out / "radioml_unknown.pkl").write_bytes(pickle.dumps(unknown, protocol=2))
    # A non-numpy global must be refused, not executed.
    (out / "evil.pkl").write_bytes(b"cos\nsystem\n(S'true'\ntR.")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data")
