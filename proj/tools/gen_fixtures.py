#!/usr/bin/env python3
"""Regenerate the bundled fixtures with mpmath.

Zeros: gamma_1..gamma_10 at 1000 significant digits.
Constants: pi, e, phi, sqrt2, ln2 at 10000 significant digits.
Values are computed with 40 guard digits and truncated (never rounded).
A manifest with sha256 hashes is written next to each file set.
"""
import argparse
import hashlib
import os

import mpmath

GUARD = 40


def truncated_digits(x, digits):
    s = mpmath.nstr(x, digits + GUARD, strip_zeros=False, min_fixed=-10**9, max_fixed=10**9)
    assert "e" not in s
    out, sig, started = [], 0, False
    for ch in s:
        if ch == ".":
            out.append(ch)
            continue
        if ch != "0":
            started = True
        out.append(ch)
        if started:
            sig += 1
            if sig == digits:
                break
    return "".join(out)


def write_set(outdir, manifest_name, files, count, digits):
    lines = ["url=bundled", f"count={count}", f"digits={digits}"]
    for name in files:
        with open(os.path.join(outdir, name), "rb") as f:
            data = f.read()
        lines.append(f"{name} {len(data)} {hashlib.sha256(data).hexdigest()}")
    with open(os.path.join(outdir, manifest_name), "w") as f:
        f.write("\n".join(lines) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "fixtures"))
    ap.add_argument("--zeros", type=int, default=10)
    ap.add_argument("--zero-digits", type=int, default=1000)
    ap.add_argument("--const-digits", type=int, default=10000)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    mpmath.mp.dps = args.zero_digits + GUARD + 10
    with open(os.path.join(args.out, "zeros_1000.txt"), "w") as f:
        for n in range(1, args.zeros + 1):
            f.write(truncated_digits(mpmath.zetazero(n).imag, args.zero_digits) + "\n")
    write_set(args.out, "zeros.manifest", ["zeros_1000.txt"], args.zeros, args.zero_digits)

    mpmath.mp.dps = args.const_digits + GUARD + 10
    consts = {
        "pi": mpmath.pi,
        "e": mpmath.e,
        "phi": (1 + mpmath.sqrt(5)) / 2,
        "sqrt2": mpmath.sqrt(2),
        "ln2": mpmath.log(2),
    }
    names = []
    for key, val in consts.items():
        name = f"{key}_10000.txt"
        with open(os.path.join(args.out, name), "w") as f:
            f.write(truncated_digits(+val, args.const_digits) + "\n")
        names.append(name)
    write_set(args.out, "constants.manifest", names, len(names), args.const_digits)


if __name__ == "__main__":
    main()
