"""Writes WFDB fixtures with the reference `wfdb` Python package.

Produces records `fx2` (two channels) and `fx1` (one channel, odd sample
count) in format 212, an annotation file for `fx2` with long gaps, aux
notes and modifier fields, and CSV files holding what `wfdb` reads back.
"""
import csv
import sys
from pathlib import Path

import numpy as np
import wfdb

out = Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/fixtures")
out.mkdir(parents=True, exist_ok=True)
rng = np.random.default_rng(20240611)

n = 5000
adu2 = np.stack(
    [
        rng.integers(-2048, 2048, n),
        (600 * np.sin(np.arange(n) / 37.0)).astype(int) + rng.integers(-50, 50, n),
    ],
    axis=1,
).astype(np.int16)
adu2[0] = [-2048, 2047]
adu2[1] = [-1, 0]
wfdb.wrsamp(
    "fx2", fs=360, units=["mV", "mV"], sig_name=["MLII", "V5"], d_signal=adu2, fmt=["212", "212"],
    adc_gain=[200.0, 100.0], baseline=[1024, -3], write_dir=str(out),
)

adu1 = rng.integers(-2048, 2048, (7, 1)).astype(np.int16)
wfdb.wrsamp(
    "fx1", fs=250, units=["mV"], sig_name=["ECG"], d_signal=adu1, fmt=["212"], adc_gain=[50.0], baseline=[0],
    write_dir=str(out),
)

samples = np.array([10, 200, 201, 1500, 1500, 2600, 4000, 4999, 70000])
symbols = ["N", "V", "+", "N", "A", "|", "~", "N", "N"]
aux = ["", "", "(AFIB", "", "", "", "noise", "", ""]
subtype = np.array([0, 0, 0, 2, 0, 0, 1, 0, 0])
chan = np.array([0, 0, 0, 0, 1, 0, 0, 0, 0])
num = np.array([0, 0, 0, 0, 0, 3, 0, 0, 0])
wfdb.wrann(
    "fx2", "atr", samples, symbol=symbols, subtype=subtype, chan=chan, num=num, aux_note=aux, fs=360,
    write_dir=str(out),
)

for name in ["fx2", "fx1"]:
    rec = wfdb.rdrecord(str(out / name), physical=False)
    phys = wfdb.rdrecord(str(out / name)).p_signal
    with open(out / f"{name}_expected.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow([f"adu{c}" for c in range(rec.n_sig)] + [f"mv{c}" for c in range(rec.n_sig)])
        for i in range(rec.sig_len):
            w.writerow(list(rec.d_signal[i]) + [repr(float(v)) for v in phys[i]])

ann = wfdb.rdann(str(out / "fx2"), "atr")
with open(out / "fx2_ann_expected.csv", "w", newline="") as f:
    w = csv.writer(f)
    w.writerow(["sample", "code"])
    for s, sym in zip(ann.sample, ann.symbol):
        w.writerow([int(s), wfdb.io.annotation.ann_label_table.set_index("symbol").loc[sym, "label_store"]])
print("wrote fixtures to", out)
