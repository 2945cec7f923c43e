#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
#
# Expands the quasi-cyclic (1296, 648) rate-1/2 LDPC base matrix (lifting
# size Z = 54, the IEEE 802.11n/ac construction) into an alist file.
#
#   python3 data/make_alist.py > data/ldpc_1296_648.alist

Z = 54
BASE = """
40 -1 -1 -1 22 -1 49 23 43 -1 -1 -1  1  0 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1
50  1 -1 -1 48 35 -1 -1 13 -1 30 -1 -1  0  0 -1 -1 -1 -1 -1 -1 -1 -1 -1
39 50 -1 -1  4 -1  2 -1 -1 -1 -1 49 -1 -1  0  0 -1 -1 -1 -1 -1 -1 -1 -1
33 -1 -1 38 37 -1 -1  4  1 -1 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1 -1 -1 -1
45 -1 -1 -1  0 22 -1 -1 20 42 -1 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1 -1 -1
51 -1 -1 48 35 -1 -1 -1 44 -1 18 -1 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1 -1
47 11 -1 -1 -1 17 -1 -1 51 -1 -1 -1  0 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1
 5 -1 25 -1  6 -1 45 -1 13 40 -1 -1 -1 -1 -1 -1 -1 -1 -1  0  0 -1 -1 -1
33 -1 -1 34 24 -1 -1 -1 23 -1 -1 46 -1 -1 -1 -1 -1 -1 -1 -1  0  0 -1 -1
 1 -1 27 -1  1 -1 -1 -1 38 -1 44 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1  0  0 -1
-1 18 -1 -1 23 -1 -1  8  0 35 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1  0  0
49 -1 17 -1 30 -1 -1 -1 34 -1 -1 19  1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1  0
"""


def main():
    base = [[int(v) for v in line.split()] for line in BASE.strip().splitlines()]
    mb, nb = len(base), len(base[0])
    m, n = mb * Z, nb * Z
    rows = [[] for _ in range(m)]
    cols = [[] for _ in range(n)]
    for i, line in enumerate(base):
        for j, shift in enumerate(line):
            if shift < 0:
                continue
            for r in range(Z):
                row, col = i * Z + r, j * Z + (r + shift) % Z
                rows[row].append(col)
                cols[col].append(row)
    for lst in rows + cols:
        lst.sort()
    max_col = max(len(c) for c in cols)
    max_row = max(len(r) for r in rows)
    out = [f"{n} {m}", f"{max_col} {max_row}",
           " ".join(str(len(c)) for c in cols),
           " ".join(str(len(r)) for r in rows)]
    for c in cols:
        out.append(" ".join(str(v + 1) for v in c + [-1] * (max_col - len(c))))
    for r in rows:
        out.append(" ".join(str(v + 1) for v in r + [-1] * (max_row - len(r))))
    print("\n".join(out))


if __name__ == "__main__":
    main()
