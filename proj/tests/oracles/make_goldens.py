#!/usr/bin/env python3
"""Independent reference values for the C++ test suites.

Re-running this script regenerates tests/data/*.csv and prints the frozen
constants frozen in tests/oracle_values.hpp.
Only numpy / scipy / scikit-learn are used; nothing here calls into the C++
library.
"""
import pathlib

import numpy as np
from scipy import stats
from sklearn.metrics import accuracy_score, cohen_kappa_score, f1_score

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def aer_reference(x, factor, literal):
    # Address-event thresholding of first differences, last difference repeated.
    d = np.diff(x)
    d = np.append(d, d[-1])
    mu = d.mean()
    sd = d.std(ddof=1)
    hi = mu + factor * sd
    lo = hi if literal else mu - factor * sd
    s = np.zeros(len(x), dtype=int)
    s[d > hi] = 1
    s[d < lo] = -1
    return s


def golden_channels():
    rng = np.random.RandomState(20211015)
    n = 64
    t = np.arange(n)
    rows = [
        np.full(n, 5.0),                                   # constant
        t.astype(float),                                   # ramp
        np.tile([0.0, 1.0], n // 2),                       # alternating
        np.sin(2 * np.pi * t / 16.0),                      # sinusoid
        np.cumsum(rng.normal(size=n)),                     # random walk
        rng.normal(scale=30.0, size=n),                    # white noise, uV scale
        np.where(t == 20, 50.0, 0.0) + rng.normal(scale=0.1, size=n),  # transient
        np.round(rng.uniform(-100, 100, size=n), 2),       # quantised
        np.exp(-t / 10.0) * 40.0,                          # decay
        np.sin(2 * np.pi * t / 7.0) + 0.5 * np.sin(2 * np.pi * t / 3.0),
    ]
    return np.vstack(rows)


def write_csv(path, m, fmt):
    with open(path, "w") as f:
        for row in m:
            f.write(",".join(fmt(v) for v in row) + "\n")


def make_aer():
    x = golden_channels()
    write_csv(DATA / "aer_input.csv", x, lambda v: repr(float(v)))
    for literal, name in ((False, "symmetric"), (True, "literal")):
        s = np.vstack([aer_reference(r, 0.5, literal) for r in x])
        write_csv(DATA / f"aer_golden_{name}.csv", s, lambda v: str(int(v)))


def confusion_fixtures():
    rng = np.random.RandomState(7)
    cms = [
        [[10, 0], [0, 10]],
        [[5, 5], [5, 5]],
        [[8, 2], [3, 7]],
        [[0, 10], [10, 0]],
        [[10, 0], [10, 0]],
        [[6, 2, 2], [1, 7, 2], [0, 3, 7]],
        [[20, 0, 0], [0, 20, 0], [0, 0, 20]],
        [[1, 0], [0, 0]],
    ]
    while len(cms) < 20:
        k = 2 + len(cms) % 3
        cms.append(rng.randint(0, 12, size=(k, k)).tolist())
    return cms


def expand(cm):
    yt, yp = [], []
    for i, row in enumerate(cm):
        for j, c in enumerate(row):
            yt += [i] * c
            yp += [j] * c
    return yt, yp


def make_metrics():
    print("// confusion matrix -> accuracy, macro F1, kappa (scikit-learn)")
    for cm in confusion_fixtures():
        yt, yp = expand(cm)
        labels = list(range(len(cm)))
        acc = accuracy_score(yt, yp)
        f1 = f1_score(yt, yp, labels=labels, average="macro", zero_division=0)
        if len(set(yt) | set(yp)) == 1:
            kap = 0.0  # sklearn returns nan when p_e = 1
        else:
            kap = cohen_kappa_score(yt, yp, labels=labels)
        print(f"{{{cm!r}, {acc!r}, {f1!r}, {kap!r}}},")


def make_ttest():
    print("// Welch t-test (scipy.stats.ttest_ind, equal_var=False)")
    cases = [
        ([2.1, 2.5, 2.3], [3.0, 3.2, 3.1]),
        ([1.0, 2.0, 3.0, 4.0, 5.0], [2.0, 4.0, 6.0]),
        ([0.032, 0.029, 0.035, 0.031], [0.009, 0.0091, 0.0089, 0.0092, 0.0088]),
    ]
    for a, b in cases:
        r = stats.ttest_ind(a, b, equal_var=False)
        print(f"{{{a!r}, {b!r}, {float(r.statistic)!r}, {float(r.pvalue)!r}}},")


if __name__ == "__main__":
    DATA.mkdir(exist_ok=True)
    make_aer()
    make_metrics()
    make_ttest()
