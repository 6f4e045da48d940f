"""Regenerate the bundled q-expansion data pack with PARI/GP (via cypari2).

For each level the pack holds a saturated Z-basis of M_2(Gamma0(N)) and,
for higher weights, a basis wherever the constructive provider (Eisenstein
series, products, eta quotients) cannot certify the space on its own.

    python tools/make_datapack.py            # default levels and weights
    python tools/make_datapack.py --levels 1-30 --max-weight 12
"""

from __future__ import annotations

import argparse
from pathlib import Path

import cypari2

from mfgens.bases import BasisProvider, ProviderGap, QExpRecord, parse_qexp_records, write_qexp_file
from mfgens.modcurve import dim_mk_gamma0, sturm_bound_gamma0
from mfgens.qseries import ZZ, QExpansion

DEFAULT_LEVELS = list(range(1, 31)) + [49, 50]
# precision covers weights up to this bound at every level
PREC_WEIGHT = 40

pari = cypari2.Pari()
pari.allocatemem(2 * 10**9)


def pari_basis(N: int, k: int, prec: int) -> list[list[int]]:
    """Saturated integral basis of M_k(Gamma0(N)) on the first ``prec`` coefficients."""
    mf = pari(f"mfinit([{N},{k}],4)")
    M = pari.mfcoefs(mf, prec - 1)
    Z = pari.matrixqz(M, -2)
    cols = int(pari.matsize(Z)[1])
    rows = int(pari.matsize(Z)[0])
    out = [[int(Z[i, j]) for i in range(rows)] for j in range(cols)]
    if len(out) != dim_mk_gamma0(N, k):
        raise RuntimeError(f"PARI returned {len(out)} forms at ({N},{k}), expected {dim_mk_gamma0(N, k)}")
    return out


def parse_levels(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def build_level(N: int, max_weight: int, outdir: Path) -> Path:
    prec = sturm_bound_gamma0(N, PREC_WEIGHT)
    path = outdir / f"level{N:03d}.qexp"
    records: list[QExpRecord] = []
    for k in range(2, max_weight + 1, 2):
        if dim_mk_gamma0(N, k) == 0:
            continue
        if k > 2:
            write_qexp_file(path, records)
            prov = BasisProvider(N, prec, data_paths=[path])
            try:
                prov.qbasis(k)
                continue
            except ProviderGap:
                pass
        for row in pari_basis(N, k, prec):
            records.append(QExpRecord(N, k, ZZ, QExpansion.from_ints(row, ZZ)))
    header = [
        f"saturated Z-bases of M_k(Gamma0({N})) computed with PARI/GP mfinit/mfcoefs/matrixqz",
        "format: N k RING PREC : c0 c1 ...",
    ]
    write_qexp_file(path, records, header)
    with path.open(encoding="utf-8") as fh:
        parse_qexp_records(fh, str(path))
    return path


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--levels", default=None, help="e.g. 1-30,49,50")
    ap.add_argument("--max-weight", type=int, default=12)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "src" / "mfgens" / "data")
    args = ap.parse_args()
    levels = parse_levels(args.levels) if args.levels else DEFAULT_LEVELS
    args.out.mkdir(parents=True, exist_ok=True)
    for N in levels:
        path = build_level(N, args.max_weight, args.out)
        weights = sorted({int(line.split()[1]) for line in path.read_text().splitlines() if line and line[0] != "#"})
        print(f"level {N}: weights {weights} -> {path.name}")


if __name__ == "__main__":
    main()
