"""Pure-Python Floyd-Warshall closure over exact integers.

Matrices are flat row-major lists of length ``n * n`` holding Python ints,
with ``None`` standing for +infinity. Same contract as ``_dbmcore``.
"""


def close_flat(cells, n):
    """Return ``(closed_cells, consistent)``.

    ``consistent`` is False as soon as some diagonal entry goes negative;
    the returned matrix is then meaningless.
    """
    rows = [list(cells[i * n:(i + 1) * n]) for i in range(n)]
    for k in range(n):
        rk = rows[k]
        for i in range(n):
            ri = rows[i]
            dik = ri[k]
            if dik is None:
                continue
            for j in range(n):
                dkj = rk[j]
                if dkj is None:
                    continue
                s = dik + dkj
                dij = ri[j]
                if dij is None or s < dij:
                    ri[j] = s
        for i in range(n):
            if rows[i][i] < 0:
                return None, False
    return [v for r in rows for v in r], True
