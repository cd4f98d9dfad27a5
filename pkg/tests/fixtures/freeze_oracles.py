"""Recompute the frozen oracle values in derived.json (slow; run by hand).

    python tests/fixtures/freeze_oracles.py
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE.parent))

from oracles import (  # noqa: E402
    NaiveReadout,
    mu_list,
    naive_block_scheme,
    naive_census,
    naive_claim_indices,
    periods_of,
)


def shortlex_symbols():
    n = 1
    while True:
        for v in range(2**n):
            yield from (int(c) for c in format(v, f"0{n}b"))
        n += 1


def main():
    out = {}
    out["block_7"] = naive_block_scheme([7], [[0, 1, 0, 0]], 74)
    out["block_42"] = naive_block_scheme([7, 6], [[0, 1, 0, 0], [0, 0, 0, 1, 0, 0, 0, 0, 0]], 67)

    ks, _ = naive_claim_indices(periods_of("3^k", 10**6), 10**6, 4, 400)
    out["claim_3k_1e6"] = ks
    ks, _ = naive_claim_indices(periods_of("10^k", 10**5), 10**5, 4, 2000)
    out["claim_10k_1e5"] = ks

    # z of the 3^k readout on [1, 3^9]
    eng = NaiveReadout(periods_of("3^k", 3**9), 3**9).run()
    z = eng.z()
    out["z_3k_zero_counts"] = {str(3**k): 3**k - sum(z[: 3**k]) for k in range(1, 10)}
    out["z_3k_first_positions"] = [
        i for i in range(1, 60) if eng.cell[i][1]
    ][:20]

    # strong correlation on 10^k at 10^6
    n = 10**6
    mu = mu_list(n)
    eng = NaiveReadout(periods_of("10^k", n), n)
    sym = [0] * (n + 1)
    while True:
        i = eng.step()
        if i is None:
            break
        k = eng.k
        for j in range(i, n + 1, eng.periods[k - 1] if k <= len(eng.periods) else n + 1):
            if eng.cell[j][0] == k:
                sym[j] = mu[i]
    total = sum(sym[i] * mu[i] for i in range(1, n + 1))
    out["strong_10k_1e6"] = {"sum": total, "A_n": total / n}
    out["squarefree_1e6"] = str(Fraction(sum(1 for v in mu[1:] if v), n))
    out["mertens_1e6"] = sum(mu[1:])

    # Example 7.2 on 3^k at 10^6 with k_m = claim_3k_1e6
    y = [0] * n
    src = shortlex_symbols()
    for m, k in enumerate(out["claim_3k_1e6"], start=1):
        for t in range(m):
            y[k + t] = next(src)
    eng = NaiveReadout(periods_of("3^k", n), n)
    xs = [0] * (n + 1)
    while True:
        i = eng.step()
        if i is None:
            break
        k = eng.k
        p = eng.periods[k - 1] if k <= len(eng.periods) else n + 1
        for j in range(i, n + 1, p):
            if eng.cell[j][0] == k:
                xs[j] = y[k - 1]
    xs = xs[1:]
    out["words_census_x"] = {str(m): naive_census(xs, m) for m in (1, 4, 8, 12)}
    out["words_census_y"] = {str(m): naive_census(y[: eng.k], m) for m in (1, 2, 3, 4, 5, 6)}

    (HERE / "derived.json").write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")
    print(json.dumps(out, sort_keys=True)[:2000])


if __name__ == "__main__":
    main()
