"""Bases of M_k(Gamma0(N)) as truncated q-expansions.

Bases come from layered providers.  Eisenstein series and products of
lower-weight forms (plus holomorphic eta quotients) are tried first; when
their span falls short of the dimension formula, q-expansions ingested from
data files fill the gap.  A span is certified once its rank reaches
dim M_k(Gamma0(N)) and the precision is at least the Sturm bound.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .arith import divisors, is_rational_square, lcm
from .etaforms import EtaQuotient, eta_quotient_qexp
from .exactlinalg import RowEchelon, saturate
from .kernels import WORK_PRIMES, echelon_mod, mul_trunc_mod
from .modcurve import cusps_gamma0, dim_mk_gamma0, sturm_bound_gamma0
from .qseries import QQ, ZZ, CoeffRing, QExpansion, RingError, eisenstein_qexp, weight2_eisenstein

__all__ = [
    "GradedBasis",
    "QExpRecord",
    "ProviderGap",
    "eisenstein_basis_gamma0",
    "holomorphic_eta_quotients",
    "product_span_basis",
    "echelon_basis",
    "parse_qexp_records",
    "format_qexp_record",
    "ingest_qexp_file",
    "write_qexp_file",
    "integral_saturated_basis",
    "default_data_paths",
    "BasisProvider",
]

DATA_ENV = "MFGENS_DATA"


class ProviderGap(RuntimeError):
    """No certified basis is available for a requested weight."""


@dataclass(frozen=True)
class GradedBasis:
    level: int
    weight: int
    ring: CoeffRing
    vectors: tuple[QExpansion, ...]
    provenance: tuple[str, ...]
    certified_complete: bool
    saturated: bool = False

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def prec(self) -> int:
        return min((v.prec for v in self.vectors), default=0)

    @property
    def expected_dim(self) -> int:
        return dim_mk_gamma0(self.level, self.weight)

    def rows(self) -> list[list[int]]:
        """Integer coefficient rows (each vector scaled by its denominator)."""
        return [list(v.numerators) for v in self.vectors]


# --------------------------------------------------------------------------
# constructive providers


def eisenstein_basis_gamma0(N: int, k: int, prec: int) -> list[QExpansion]:
    """E_k(dz) for d | N (k >= 4), or the weight-2 combinations for d | N, d > 1."""
    if k < 2 or k % 2:
        raise ValueError(f"need even k >= 2, got {k}")
    if k == 2:
        return [weight2_eisenstein(d, prec) for d in divisors(N) if d > 1]
    return [eisenstein_qexp(k, d, prec) for d in divisors(N)]


@lru_cache(maxsize=None)
def _order_matrix(N: int) -> tuple[np.ndarray, tuple[int, ...]]:
    # 24 * order at each cusp = A @ r, with rows scaled to integers
    divs = divisors(N)
    rows = []
    for c in cusps_gamma0(N):
        rows.append([Fraction(c.width * gcd(d, c.denominator) ** 2, d) for d in divs])
    scale = 1
    for row in rows:
        for x in row:
            scale = lcm(scale, x.denominator)
    A = np.array([[int(x * scale) for x in row] for row in rows], dtype=np.int64)
    return A, (24 * scale,) + divs


def holomorphic_eta_quotients(N: int, k: int, max_candidates: int = 50_000) -> list[EtaQuotient]:
    """Eta quotients in M_k(Gamma0(N)) with every exponent in a small box.

    The box [-B, B] shrinks with the number of divisors so that at most
    ``max_candidates`` exponent vectors are examined; this is a heuristic
    source of extra forms, not an exhaustive search.
    """
    if k < 1 or k % 2:
        return []
    A, meta = _order_matrix(N)
    unit, divs = meta[0], meta[1:]
    n = len(divs)
    if n == 1:
        cand = np.array([[2 * k]], dtype=np.int64)
    else:
        B = 2 * k + 4
        while (2 * B + 1) ** (n - 1) > max_candidates and B > 1:
            B -= 1
        free = np.array(list(itertools.product(range(-B, B + 1), repeat=n - 1)), dtype=np.int64)
        last = 2 * k - free.sum(axis=1, keepdims=True)
        cand = np.hstack([free, last])
    orders = cand @ A.T  # unit * order
    ok = np.all(orders >= 0, axis=1) & np.all(orders % unit == 0, axis=1)
    out = []
    for row in cand[ok]:
        ex = {d: int(r) for d, r in zip(divs, row)}
        num = den = 1
        for d, r in ex.items():
            if r > 0:
                num *= d**r
            elif r < 0:
                den *= d ** (-r)
        if is_rational_square(num, den):
            out.append(EtaQuotient(N, ex))
    return out


def echelon_basis(vectors: Sequence[QExpansion], ring: CoeffRing = QQ) -> list[QExpansion]:
    """Reduced echelon basis over Q: pivots increasing, pivot coefficient 1."""
    return _echelon(vectors, ring)[0]


def _echelon(vectors: Sequence[QExpansion], ring: CoeffRing) -> tuple[list[QExpansion], list[int]]:
    # also reports, per output row, which input vector introduced its pivot
    if not vectors:
        return [], []
    prec = min(v.prec for v in vectors)
    ech = RowEchelon(prec)
    sources = []
    for i, v in enumerate(vectors):
        if ech.add(list(v.numerators[:prec])):
            sources.append(i)
    order = sorted(range(len(ech.rows)), key=lambda i: ech.pivots[i])
    rows = [[Fraction(x) for x in ech.rows[i]] for i in order]
    pivs = [ech.pivots[i] for i in order]
    # back-substitute so that pivot columns are clean
    for i in range(len(rows) - 1, -1, -1):
        c = pivs[i]
        inv = 1 / rows[i][c]
        rows[i] = [x * inv for x in rows[i]]
        for j in range(i):
            t = rows[j][c]
            if t:
                rows[j] = [x - t * y for x, y in zip(rows[j], rows[i])]
    return [QExpansion(r, ring) for r in rows], [sources[i] for i in order]


def _select_independent(
    candidates: Sequence[tuple[str, object]], target: int, prec: int, compute_mod, compute_exact
) -> tuple[list[QExpansion], list[str]]:
    """Pick up to ``target`` Q-independent candidates using a mod-p screen."""
    if not candidates:
        return [], []
    picked: list[int] = []
    for p in WORK_PRIMES[:2]:
        mods = np.array([compute_mod(c, p) for _, c in candidates], dtype=np.int64)
        r, idx, _ = echelon_mod(mods, p, target)
        if r > len(picked):
            picked = idx
        if r >= target:
            break
    # independence mod p implies independence over Q
    vecs = [compute_exact(candidates[i][1]) for i in picked]
    tags = [candidates[i][0] for i in picked]
    return vecs, tags


def product_span_basis(
    N: int,
    k: int,
    prec: int,
    known: Mapping[int, Sequence[QExpansion]],
    extra: Sequence[tuple[str, QExpansion]] = (),
    use_eta: bool = True,
) -> GradedBasis:
    """Span of Eisenstein series, products of known lower-weight forms, and eta quotients.

    ``known`` maps weights to spanning lists (ideally bases) of lower
    weights.  ``extra`` adds tagged vectors such as ingested series.  The
    result is an echelon basis over Q, certified when its rank equals
    dim M_k(Gamma0(N)).
    """
    dim = dim_mk_gamma0(N, k)
    if dim == 0:
        return GradedBasis(N, k, QQ, (), (), True)
    cands: list[tuple[str, object]] = []
    for f in eisenstein_basis_gamma0(N, k, prec):
        cands.append(("eisenstein", f))
    for j in sorted(known):
        if j < 2 or 2 * j > k or (k - j) not in known:
            continue
        left, right = known[j], known[k - j]
        for a, f in enumerate(left):
            for b, g in enumerate(right):
                if j == k - j and b < a:
                    continue
                cands.append(("product", (f, g)))
    if use_eta:
        for E in holomorphic_eta_quotients(N, k):
            cands.append(("eta", E))
    for tag, f in extra:
        cands.append((tag, f))

    residues: dict[tuple[int, int], np.ndarray] = {}

    def reduced(f: QExpansion, p: int) -> np.ndarray:
        key = (id(f), p)
        if key not in residues:
            residues[key] = np.array([x % p for x in f.numerators[:prec]], dtype=np.int64)
        return residues[key]

    def mod(c, p):
        if isinstance(c, QExpansion):
            return reduced(c, p)
        if isinstance(c, EtaQuotient):
            return [x % p for x in eta_quotient_qexp(c, prec).numerators]
        f, g = c
        return mul_trunc_mod(reduced(f, p), reduced(g, p), prec, p)

    def exact(c):
        if isinstance(c, QExpansion):
            return c.truncate(prec)
        if isinstance(c, EtaQuotient):
            return eta_quotient_qexp(c, prec)
        f, g = c
        return (f.truncate(prec) * g.truncate(prec)).retag(QQ)

    vecs, tags = _select_independent(cands, dim, prec, mod, exact)
    basis, src = _echelon(vecs, QQ)
    certified = len(basis) == dim and prec >= sturm_bound_gamma0(N, k)
    return GradedBasis(N, k, QQ, tuple(basis), tuple(tags[i] for i in src), certified)


# --------------------------------------------------------------------------
# data files


@dataclass(frozen=True)
class QExpRecord:
    level: int
    weight: int
    ring: CoeffRing
    qexp: QExpansion


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_qexp_record(N: int, k: int, ring: CoeffRing, f: QExpansion) -> str:
    """One data-file line: ``N k RING PREC : c0 c1 ...``."""
    coeffs = " ".join(_format_coeff(c) for c in f.coeffs)
    return f"{N} {k} {ring} {f.prec} : {coeffs}"


def _parse_coeff(tok: str) -> Fraction:
    return Fraction(tok)


def parse_qexp_records(lines: Iterable[str], source: str = "<input>", check_sturm: bool = True) -> list[QExpRecord]:
    out = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        where = f"{source}:{lineno}"
        head, sep, body = line.partition(":")
        if not sep:
            raise ValueError(f"{where}: missing ':' separator")
        fields = head.split()
        if len(fields) != 4:
            raise ValueError(f"{where}: header needs 'N k RING PREC', got {head.strip()!r}")
        try:
            N, k, prec = int(fields[0]), int(fields[1]), int(fields[3])
            ring = CoeffRing.parse(fields[2], N)
        except ValueError as exc:
            raise ValueError(f"{where}: {exc}") from None
        if N < 1 or prec < 1:
            raise ValueError(f"{where}: level and precision must be positive")
        try:
            coeffs = [_parse_coeff(t) for t in body.split()]
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"{where}: malformed coefficient") from None
        if len(coeffs) != prec:
            raise ValueError(f"{where}: declared precision {prec} but {len(coeffs)} coefficients")
        if check_sturm and k >= 2 and prec < sturm_bound_gamma0(N, k):
            raise ValueError(f"{where}: precision {prec} below the Sturm bound {sturm_bound_gamma0(N, k)}")
        for i, c in enumerate(coeffs):
            if not ring.admits(c):
                raise ValueError(f"{where}: coefficient {c} at q^{i} is not in {ring}")
        try:
            f = QExpansion(coeffs, ring)
        except RingError as exc:
            raise ValueError(f"{where}: {exc}") from None
        out.append(QExpRecord(N, k, ring, f))
    return out


def ingest_qexp_file(path) -> list[QExpRecord]:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return parse_qexp_records(fh, str(path))


def write_qexp_file(path, records: Iterable[QExpRecord], header: Sequence[str] = ()) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for h in header:
            fh.write(f"# {h}\n")
        for rec in records:
            fh.write(format_qexp_record(rec.level, rec.weight, rec.ring, rec.qexp) + "\n")


def default_data_paths() -> list[Path]:
    """Data directory from $MFGENS_DATA, else the bundled pack."""
    env = os.environ.get(DATA_ENV)
    if env:
        return [Path(p) for p in env.split(os.pathsep) if p]
    return [Path(__file__).with_name("data")]


# --------------------------------------------------------------------------
# integral structure


def integral_saturated_basis(b: GradedBasis, ring: CoeffRing = ZZ) -> GradedBasis:
    """A-basis of M_k(Gamma0(N), A) from a certified Q-basis.

    Over Z and Z[1/M] this is the HNF basis of the saturated coefficient
    lattice; by the Sturm bound, integrality of the first coefficients
    forces integrality of the whole form, so this lattice is M_k(Z).
    Over Q the input basis is returned unchanged.
    """
    if not b.certified_complete:
        raise ProviderGap(f"basis of weight {b.weight} at level {b.level} is not certified")
    if ring.kind == "Q":
        return b
    rows = b.rows()
    sat = saturate(rows) if rows else []
    vecs = tuple(QExpansion.from_ints(r, ring) for r in sat)
    return GradedBasis(b.level, b.weight, ring, vecs, ("saturated",) * len(vecs), True, True)


class BasisProvider:
    """Certified bases of M_k(Gamma0(N)) at a fixed working precision.

    Results are cached per weight.  Lower weights feed the product layer of
    higher ones, so requests are served in increasing weight internally.
    """

    def __init__(self, N: int, prec: int, data_paths: Optional[Sequence] = None, use_eta: bool = True) -> None:
        self.N = N
        self.prec = prec
        self.use_eta = use_eta
        self._q: dict[int, GradedBasis] = {}
        self._z: dict[int, GradedBasis] = {}
        self._records: dict[int, list[QExpansion]] = {}
        self._data_prec: dict[int, int] = {}
        paths = default_data_paths() if data_paths is None else [Path(p) for p in data_paths]
        for p in paths:
            self._load(p)

    def _load(self, path: Path) -> None:
        files: list[Path] = []
        if path.is_dir():
            files = sorted(path.glob(f"level{self.N:03d}*.qexp")) or sorted(path.glob("*.qexp"))
        elif path.exists():
            files = [path]
        for f in files:
            with f.open(encoding="utf-8") as fh:
                lines = [ln for ln in fh if ln.split(None, 1)[:1] == [str(self.N)] or ln.startswith("#")]
            for rec in parse_qexp_records(lines, str(f)):
                if rec.level != self.N:
                    continue
                self._records.setdefault(rec.weight, []).append(rec.qexp)
                self._data_prec[rec.weight] = min(self._data_prec.get(rec.weight, rec.qexp.prec), rec.qexp.prec)

    def data_weights(self) -> list[int]:
        return sorted(self._records)

    def qbasis(self, k: int) -> GradedBasis:
        """Certified echelon basis over Q (raises ProviderGap)."""
        if k in self._q:
            b = self._q[k]
        else:
            b = self._build(k)
        if not b.certified_complete:
            raise ProviderGap(
                f"level {self.N} weight {k}: span has rank {len(b)} of {b.expected_dim} at precision {self.prec}"
            )
        return b

    def zbasis(self, k: int) -> GradedBasis:
        """Saturated Z-basis (HNF order) of M_k(Gamma0(N), Z)."""
        if k not in self._z:
            self._z[k] = integral_saturated_basis(self.qbasis(k), ZZ)
        return self._z[k]

    def basis(self, k: int, ring: CoeffRing) -> GradedBasis:
        return self.qbasis(k) if ring.kind == "Q" else self.zbasis(k)

    def _build(self, k: int) -> GradedBasis:
        N, prec = self.N, self.prec
        known: dict[int, Sequence[QExpansion]] = {}
        for j in range(2, k - 1, 2):
            try:
                known[j] = self.zbasis(j).vectors
            except ProviderGap:
                continue
        b = product_span_basis(N, k, prec, known, use_eta=self.use_eta)
        if not b.certified_complete and k in self._records and self._data_prec[k] >= prec:
            extra = [("ingested", f.truncate(prec)) for f in self._records[k]]
            b = product_span_basis(N, k, prec, known, extra=extra, use_eta=self.use_eta)
        self._q[k] = b
        return b
