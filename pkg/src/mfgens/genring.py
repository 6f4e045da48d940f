"""Minimal generators of the graded ring of modular forms on Gamma0(N).

The search walks up the even weights.  At each weight k it asks whether
every form in an A-basis of M_k(Gamma0(N), A) is an A-combination of
products of generators already found; forms that are not become new
generators.  A T-form bounds the weights that need checking, and the
coverage test on vanishing orders usually stops the walk much earlier.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .bases import BasisProvider, ProviderGap
from .etaforms import TForm, default_tform, scholl_solve_tform, validate_tform
from .exactlinalg import RowEchelon, hnf_basis, membership_over_ring, pivots
from .kernels import WORK_PRIMES, echelon_mod, mul_trunc_mod
from .modcurve import dim_mk_sl2, sturm_bound_gamma0, weight_bound_complex
from .qseries import QQ, ZZ, CoeffRing, QExpansion, eisenstein_qexp, qexp_div_unit, valuation, victor_miller_basis

__all__ = [
    "Generator",
    "GeneratorSet",
    "isobaric_monomials",
    "monomial_valuations",
    "covers",
    "coverage_halt_check",
    "scholl_reduction_step",
    "tform_weight_bound",
    "algorithm1",
    "run_level",
    "TableRow",
    "table_report",
    "format_table",
    "EXPECTED_RATIONAL",
    "EXPECTED_LOCALIZED",
]

log = logging.getLogger(__name__)

HALT_TFORM = "tform_bound"
HALT_TRICK = "coverage_trick"


def weight_cap(K: int) -> str:
    return f"weight_cap({K})"


# Published maximal generator weights: level -> (weight, cap or None when complete).
_RATIONAL_ROWS = (
    "6 4 6 2 4 2 6 2 2 4 4 2 6 2 2 2 4 2 6 2 6 2 4 2 4 4 2 2 4 2 "
    "6 2 2 4 2 2 6 2 6 2 4 2 6 2 2 2 4 2 6:12 4:12 2 2 4 2 2 2 6 4 4 2 "
    "6 2 2 2 4 2 6 2 2 2 4 2 6 4 2 2 2 2 6 2 2 4 4 2 4 2 2 2 4 2 "
    "6 2 6 2 2 2 6 2 2 2 4 2 6 2 2 4 4 2 6 2 6 2 4 2 2 2 2 2 2 2 "
    "2 4 2 2 4:10 2 6 2 6 4 4 2 6 2 2 2 4 2 6 2 2 2 2 2 4 4 6:8 2 4 2"
)


def _parse_rows(text: str) -> dict[int, tuple[int, Optional[int]]]:
    out = {}
    for n, tok in enumerate(text.split(), 1):
        w, _, cap = tok.partition(":")
        out[n] = (int(w), int(cap) if cap else None)
    return out


EXPECTED_RATIONAL = _parse_rows(_RATIONAL_ROWS)
EXPECTED_LOCALIZED = {
    1: (6, None), 2: (4, None), 3: (6, None), 4: (2, 30), 5: (4, None), 6: (2, 16), 7: (6, None),
    8: (2, 16), 9: (2, 18), 10: (4, 12), 11: (4, None), 13: (6, None), 17: (4, None), 19: (6, None),
}


@dataclass(frozen=True)
class Generator:
    weight: int
    qexp: QExpansion
    source: str

    @property
    def valuation(self):
        return valuation(self.qexp)


@dataclass
class GeneratorSet:
    level: int
    ring: CoeffRing
    entries: list[Generator] = field(default_factory=list)
    halted_by: Optional[str] = None
    complete: bool = False
    checked_to: int = 2
    cap: Optional[int] = None
    notes: list[str] = field(default_factory=list)

    def add(self, g: Generator) -> None:
        self.entries.append(g)

    @property
    def weights(self) -> list[int]:
        return [g.weight for g in self.entries]

    @property
    def max_weight(self) -> int:
        return max(self.weights, default=0)

    def counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for g in self.entries:
            out[g.weight] = out.get(g.weight, 0) + 1
        return dict(sorted(out.items()))

    def sorted_entries(self) -> list[Generator]:
        return sorted(self.entries, key=lambda g: (g.weight, g.valuation))

    def record(self) -> str:
        """``N ring maxweight halt {k:count,...}``."""
        counts = ",".join(f"{k}:{c}" for k, c in self.counts().items())
        return f"{self.level} {self.ring} {self.max_weight} {self.halted_by} {{{counts}}}"


def parse_generator_record(line: str) -> tuple[int, str, int, str, dict[int, int]]:
    N, ring, w, halt, counts = line.split()
    body = counts.strip("{}")
    parsed = {}
    if body:
        for item in body.split(","):
            k, c = item.split(":")
            parsed[int(k)] = int(c)
    return int(N), ring, int(w), halt, parsed


# --------------------------------------------------------------------------
# monomials and the coverage test


def _as_pairs(gens) -> list[tuple[int, QExpansion]]:
    if isinstance(gens, GeneratorSet):
        return [(g.weight, g.qexp) for g in gens.entries]
    return [(g.weight, g.qexp) if isinstance(g, Generator) else (g[0], g[1]) for g in gens]


def _multisets(weights: Sequence[int], k: int, start: int = 0):
    # exponent vectors e with sum e_i w_i = k
    if k == 0:
        yield ()
        return
    for i in range(start, len(weights)):
        w = weights[i]
        if w <= k:
            for rest in _multisets(weights, k - w, i):
                yield (i,) + rest


def isobaric_monomials(gens, k: int, prec: Optional[int] = None) -> list[QExpansion]:
    """All products of generators whose weights sum to k, one per exponent vector."""
    pairs = _as_pairs(gens)
    if not pairs or k <= 0:
        return []
    if prec is None:
        prec = min(f.prec for _, f in pairs)
    weights = [w for w, _ in pairs]
    cache: dict[tuple[int, ...], QExpansion] = {(): QExpansion.one(prec, ZZ)}

    def build(idx: tuple[int, ...]) -> QExpansion:
        if idx not in cache:
            cache[idx] = build(idx[:-1]) * pairs[idx[-1]][1].truncate(prec)
        return cache[idx]

    return [build(idx) for idx in _multisets(weights, k)]


def monomial_valuations(gens, k: int, ring: CoeffRing = QQ) -> set[int]:
    """Vanishing orders of weight-k monomials whose leading coefficient is a unit."""
    pairs = [(w, valuation(f), f.leading_coefficient()) for w, f in _as_pairs(gens)]
    usable = [(w, v) for w, v, c in pairs if c != 0 and ring.is_unit(c)]
    S: dict[int, set[int]] = {0: {0}}
    for j in range(1, k + 1):
        acc: set[int] = set()
        for w, v in usable:
            if w <= j and (j - w) in S:
                acc.update(x + v for x in S[j - w])
        if acc:
            S[j] = acc
    return S.get(k, set())


def covers(S: Iterable[int], r: int) -> bool:
    have = set(S)
    return all(i in have for i in range(r + 1))


def coverage_halt_check(gens, k: int, r: int, ring: CoeffRing = QQ) -> bool:
    """True when weight-k monomials realise every vanishing order 0..r.

    Requires a weight-2 generator with a unit constant term, which keeps the
    coverage when the weight goes up.
    """
    pairs = _as_pairs(gens)
    if not any(w == 2 and ring.is_unit(f[0]) for w, f in pairs if f[0]):
        return False
    return covers(monomial_valuations(pairs, k, ring), r)


def _span_valuations(rows: Sequence[Sequence[int]], ring: CoeffRing) -> set[int]:
    # vanishing orders with a unit leading coefficient in the A-span of rows
    if ring.kind == "Q":
        ech = RowEchelon(len(rows[0]) if rows else 0)
        for r in rows:
            ech.add(r)
        return set(ech.pivots)
    return {c for c, v in pivots(hnf_basis(rows)) if ring.is_unit(v)}


# --------------------------------------------------------------------------
# Scholl's reduction


def scholl_reduction_step(F: QExpansion, k: int, T: TForm, prec: Optional[int] = None) -> tuple[QExpansion, QExpansion]:
    """Write F = G + T H with G of level one and H of weight k - w(T)."""
    m = dim_mk_sl2(k)
    r = T.vanishing_order
    if m < r:
        raise ValueError(f"dim M_{k}(SL2(Z)) = {m} is below the vanishing order {r} of T")
    prec = prec or F.prec
    F = F.truncate(min(prec, F.prec))
    vm = victor_miller_basis(k, F.prec)
    G = QExpansion.zero(F.prec, F.ring)
    for i, f in enumerate(vm):
        c = F[i]
        if c:
            G = G + f.scale(c)
    Tq = T.expansion(F.prec, F.ring.unify(T.ring))
    H = qexp_div_unit(F - G, Tq)
    return G, H


def tform_weight_bound(T: TForm) -> int:
    """Largest weight the search must visit: every even k with m_k < r, and 4, 6, w(T)."""
    r = T.vanishing_order
    # m_k >= k // 12, so nothing beyond 12 r can have m_k < r
    low = [k for k in range(4, 12 * r + 14, 2) if dim_mk_sl2(k) < r]
    return max(low + [6, T.weight])


# --------------------------------------------------------------------------
# the search


def _int_rows(vectors: Sequence[QExpansion]) -> list[list[int]]:
    return [list(v.numerators) for v in vectors]


def _unit_ratio(num: int, den: int, ring: CoeffRing) -> bool:
    return ring.is_unit(Fraction(num, den))


def algorithm1(
    N: int,
    ring: CoeffRing,
    provider: Optional[BasisProvider] = None,
    T: Optional[TForm] = None,
    cap: Optional[int] = None,
    *,
    cap_is_bound: bool = False,
    use_trick: bool = True,
    prec: Optional[int] = None,
    progress: Optional[Callable[[str], None]] = None,
) -> GeneratorSet:
    """Minimal generators of M(Gamma0(N), ring) up to the weight the inputs justify.

    With a certified T-form the walk ends at the T-form bound or earlier by
    the coverage test; otherwise it ends at ``cap``.  ``cap_is_bound`` marks
    a cap that is a proven generation bound, so the result counts as complete.
    """
    if T is None and cap is None:
        raise ValueError("need a T-form or a weight cap")
    if cap is not None and (cap < 2 or cap % 2):
        raise ValueError(f"cap must be even and >= 2, got {cap}")
    if T is not None:
        if T.level != N:
            raise ValueError(f"T-form has level {T.level}, not {N}")
        rep = validate_tform(T, ring)
        if not rep.ok:
            raise ArithmeticError("uncertified T-form: " + "; ".join(rep.lines()))
    r = T.vanishing_order if T is not None else None
    k_tform = tform_weight_bound(T) if T is not None else None
    if k_tform is not None and (cap is None or k_tform <= cap):
        stop, stop_reason = k_tform, HALT_TFORM
    else:
        stop, stop_reason = cap, weight_cap(cap)
    need = sturm_bound_gamma0(N, stop)
    if r is not None:
        need = max(need, r + 2)
    if prec is None:
        prec = need
    if prec < need:
        raise ValueError(f"precision {prec} below the required {need}")
    if provider is None:
        provider = BasisProvider(N, prec)
    elif provider.prec < prec:
        raise ValueError(f"provider precision {provider.prec} below the required {prec}")
    say = progress or (lambda msg: log.info(msg))

    out = GeneratorSet(N, ring, cap=cap)
    exact = ring.kind == "Q"

    def gap(k: int, exc: Exception) -> GeneratorSet:
        out.halted_by = f"provider_gap({k})"
        out.complete = False
        out.notes.append(str(exc))
        say(f"level {N} weight {k}: provider gap ({exc})")
        return out

    def basis_vectors(k: int) -> list[QExpansion]:
        return [v.truncate(prec) for v in provider.basis(k, ring).vectors]

    try:
        b2 = basis_vectors(2)
    except ProviderGap as exc:
        return gap(2, exc)
    for i, v in enumerate(b2):
        out.add(Generator(2, v, f"M2[{i}]"))
    spans: dict[int, list[QExpansion]] = {0: [QExpansion.one(prec, ZZ)], 2: b2}
    covered: dict[int, bool] = {}
    unit_weight2 = False
    if b2:
        S2 = _span_valuations(_int_rows(b2), ring)
        unit_weight2 = 0 in S2
    step_d: dict[int, tuple[str, QExpansion]] = {
        4: ("E4", eisenstein_qexp(4, 1, prec).retag(ring)),
        6: ("E6", eisenstein_qexp(6, 1, prec).retag(ring)),
    }
    if T is not None:
        step_d.setdefault(T.weight, ("T", T.expansion(prec, ring)))
    say(f"level {N} ring {ring}: weights up to {stop}, precision {prec}"
        + (f", T-form weight {T.weight} order {r}" if T is not None else ""))

    for k in range(4, stop + 1, 2):
        try:
            basis = basis_vectors(k)
        except ProviderGap as exc:
            return gap(k, exc)
        d = len(basis)
        cands = _spanning_products(out.entries, spans, k, prec)
        new = _non_members(basis, cands, ring, exact, prec)
        for i in new:
            out.add(Generator(k, basis[i], f"M{k}[{i}]"))
        if k in step_d:
            name, f = step_d[k]
            pool = cands + [basis[i] for i in new]
            if _non_members([f], pool, ring, exact, prec):
                out.add(Generator(k, f, name))
                out.notes.append(f"{name} added at weight {k} by the explicit check")
        spans[k] = basis
        out.checked_to = k
        say(f"level {N} weight {k}: dim {d}, {len(new)} new generator(s)")
        if T is not None and use_trick and d:
            covered[k] = covers(_span_valuations(_int_rows(basis), ring), r)
            if covered[k] and (unit_weight2 or covered.get(k - 2, False)):
                out.halted_by = HALT_TRICK
                out.complete = True
                return out
    out.halted_by = stop_reason
    out.complete = stop_reason == HALT_TFORM or cap_is_bound
    return out


def _spanning_products(gens: Sequence[Generator], spans: dict[int, list[QExpansion]], k: int, prec: int):
    """Forms spanning the weight-k part of the subalgebra generated by ``gens``.

    Every weight below k is already fully generated, so g times a basis of
    M_{k - w(g)} spans the same module as all monomials of weight k.
    """
    out = []
    for g in gens:
        if g.weight < k and (k - g.weight) in spans:
            for x in spans[k - g.weight]:
                out.append((g.qexp, x))
        elif g.weight == k:
            out.append((g.qexp, None))
    return out


def _materialize(c, prec: int) -> QExpansion:
    f, x = c
    return f.truncate(prec) if x is None else f.truncate(prec) * x.truncate(prec)


def _mod_matrix(cands, prec: int, p: int) -> np.ndarray:
    cache: dict[int, np.ndarray] = {}

    def red(f: QExpansion) -> np.ndarray:
        key = id(f)
        if key not in cache:
            cache[key] = np.array([x % p for x in f.numerators[:prec]], dtype=np.int64)
        return cache[key]

    rows = []
    for c in cands:
        if isinstance(c, QExpansion):
            rows.append(red(c))
        elif c[1] is None:
            rows.append(red(c[0]))
        else:
            rows.append(mul_trunc_mod(red(c[0]), red(c[1]), prec, p))
    return np.array(rows, dtype=np.int64).reshape(len(rows), prec)


def _non_members(basis: Sequence[QExpansion], cands, ring: CoeffRing, exact_q: bool, prec: int) -> list[int]:
    """Indices of basis forms outside the ring-span of the candidates.

    Basis forms found outside are added to the span before later ones are
    tested, so the returned forms are needed one after another.
    """
    d = len(basis)
    if d == 0:
        return []
    if cands:
        # full rank mod p certifies the Q-span (rank can only drop mod p)
        p = WORK_PRIMES[0]
        rank = echelon_mod(_mod_matrix(cands, prec, p), p, d)[0]
    else:
        rank = 0
    if exact_q and rank == d:
        return []
    vecs = [_materialize(c, prec) if not isinstance(c, QExpansion) else c for c in cands]
    if exact_q:
        ech = RowEchelon(prec)
        for v in vecs:
            ech.add(list(v.numerators))
        out = []
        for i, b in enumerate(basis):
            if ech.add(list(b.numerators)):
                out.append(i)
        return out
    # over Z or Z[1/M]: compare the HNF of the span with the saturated basis
    L = hnf_basis(_int_rows(vecs)) if vecs else []
    S = _int_rows(basis)
    if len(L) == d:
        ratio_num = prod(v for _, v in pivots(L))
        ratio_den = prod(v for _, v in pivots(hnf_basis(S)))
        if _unit_ratio(ratio_num, ratio_den, ring):
            return []
    out = []
    for i, b in enumerate(S):
        if L and membership_over_ring(b, L, ring) is not None:
            continue
        out.append(i)
        L = hnf_basis(L + [b])
    return out


# --------------------------------------------------------------------------
# level runs and tables


def run_level(
    N: int,
    ring: CoeffRing,
    cap: Optional[int] = None,
    data_paths=None,
    use_trick: bool = True,
    progress: Optional[Callable[[str], None]] = None,
    tform: Optional[str] = None,
    default_cap: int = 40,
    prec: Optional[int] = None,
) -> GeneratorSet:
    """Pick bounds and a T-form for one level, then run the search.

    Over Q the generation bound from the absence of elliptic points (6) or
    squarefree level (10) is used when it applies; other levels, and all
    runs over Z[1/M], rely on a T-form and the coverage test, with
    ``default_cap`` limiting the walk when no cap is given.
    """
    T = None
    cap_is_bound = False
    if ring.kind == "Q" and cap is None:
        bound = weight_bound_complex("Gamma0", N)
        if bound is not None:
            cap, cap_is_bound = bound, True
    if ring.kind != "Q" or cap is None or tform is not None:
        base_ring = ring if ring.kind != "Q" else ZZ
        if tform == "scholl" and N > 1:
            T = scholl_solve_tform(N, base_ring)
        else:
            T = default_tform(N, base_ring)
        if ring.kind == "Q":
            T = TForm(T.source, T.weight, T.vanishing_order, T.qexp.retag(QQ), QQ)
        if cap is None:
            cap = default_cap
    need_w = cap if cap is not None else default_cap
    if T is not None:
        need_w = min(need_w, tform_weight_bound(T))
    need = sturm_bound_gamma0(N, need_w)
    if T is not None:
        need = max(need, T.vanishing_order + 2)
    if prec is None:
        prec = need
    elif prec < need:
        raise ValueError(f"precision {prec} below the required {need}")
    provider = BasisProvider(N, prec, data_paths=data_paths)
    return algorithm1(N, ring, provider, T, cap, cap_is_bound=cap_is_bound, use_trick=use_trick,
                      prec=prec, progress=progress)


@dataclass(frozen=True)
class TableRow:
    level: int
    weight: int
    cap: Optional[int]
    halted_by: str
    expected: Optional[tuple[int, Optional[int]]] = None

    @property
    def complete(self) -> bool:
        return self.cap is None

    def matches(self, strict_cap: bool = False) -> Optional[bool]:
        if self.expected is None:
            return None
        w, c = self.expected
        if self.weight != w:
            return False
        if strict_cap:
            return c == self.cap
        # a published complete row must be complete here too
        return not (c is None and self.cap is not None)


def table_report(
    levels: Iterable[int],
    ring_policy: str = "Q",
    caps: Optional[dict[int, int]] = None,
    data_paths=None,
    progress: Optional[Callable[[str], None]] = None,
) -> list[TableRow]:
    """One row per level: max generator weight and the cap when incomplete."""
    rows = []
    for N in levels:
        ring = CoeffRing.parse(ring_policy, N)
        cap = (caps or {}).get(N)
        gs = run_level(N, ring, cap=cap, data_paths=data_paths, progress=progress)
        expected = (EXPECTED_RATIONAL if ring.kind == "Q" else EXPECTED_LOCALIZED).get(N)
        rows.append(TableRow(N, gs.max_weight, None if gs.complete else gs.checked_to, gs.halted_by, expected))
    return rows


def format_table(rows: Sequence[TableRow]) -> str:
    lines = [f"{'Level N':>7} | {'generated in weight':>19} | {'up to weight':>12}"]
    for row in rows:
        cap = "--" if row.cap is None else str(row.cap)
        lines.append(f"{row.level:>7} | {row.weight:>19} | {cap:>12}")
    return "\n".join(lines)
