from fractions import Fraction
from pathlib import Path

import pytest

from mfgens.bases import (
    BasisProvider,
    GradedBasis,
    ProviderGap,
    QExpRecord,
    default_data_paths,
    echelon_basis,
    eisenstein_basis_gamma0,
    format_qexp_record,
    holomorphic_eta_quotients,
    ingest_qexp_file,
    integral_saturated_basis,
    parse_qexp_records,
    product_span_basis,
    write_qexp_file,
)
from mfgens.etaforms import orders_at_cusps
from mfgens.exactlinalg import membership_over_ring
from mfgens.modcurve import dim_mk_gamma0, sturm_bound_gamma0
from mfgens.qseries import QQ, ZZ, CoeffRing, QExpansion, delta_qexp, eisenstein_qexp

from oracles import rank_fraction

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "mfgens" / "data"


def rows(vectors):
    return [list(v.coeffs) for v in vectors]


def same_span(a, b):
    return rank_fraction(rows(a)) == rank_fraction(rows(b)) == rank_fraction(rows(a) + rows(b))


def test_eisenstein_layer():
    assert len(eisenstein_basis_gamma0(11, 2, 10)) == 1
    assert eisenstein_basis_gamma0(1, 4, 10) == [eisenstein_qexp(4, 1, 10)]
    six = eisenstein_basis_gamma0(6, 4, 30)
    assert len(six) == 4 and rank_fraction(rows(six)) == 4


def test_product_span_level_one():
    prec = 10
    E4, E6 = eisenstein_qexp(4, 1, prec), eisenstein_qexp(6, 1, prec)
    b = product_span_basis(1, 12, prec, {4: [E4], 6: [E6], 8: [E4 * E4]}, use_eta=False)
    assert b.certified_complete and len(b) == 2
    assert b.vectors[1] == delta_qexp(prec)


def test_product_span_level_eleven():
    prec = sturm_bound_gamma0(11, 4) + 5
    w2 = product_span_basis(11, 2, prec, {})
    assert w2.certified_complete and len(w2) == 2
    b = product_span_basis(11, 4, prec, {2: w2.vectors})
    assert b.certified_complete and len(b) == dim_mk_gamma0(11, 4) == 4


def test_eisenstein_only_is_incomplete():
    b = product_span_basis(11, 2, 20, {}, use_eta=False)
    assert not b.certified_complete and len(b) == 1


def test_rank_never_exceeds_dimension():
    for N in (2, 5, 6, 11, 13):
        for k in (2, 4, 6):
            b = product_span_basis(N, k, sturm_bound_gamma0(N, k) + 3, {})
            assert len(b) <= dim_mk_gamma0(N, k)


def test_holomorphic_eta_quotients_are_holomorphic():
    for E in holomorphic_eta_quotients(6, 4):
        assert E.weight == 4
        assert all(o >= 0 and o.denominator == 1 for _, o in orders_at_cusps(E))


def test_echelon_convention():
    prec = 8
    E4 = eisenstein_qexp(4, 1, prec)
    vecs = echelon_basis([E4 ** 3, eisenstein_qexp(6, 1, prec) ** 2])
    assert vecs[0][0] == 1 and vecs[0][1] == 0
    assert vecs[1] == delta_qexp(prec).retag(QQ)


# ---- data files ----------------------------------------------------------

def test_record_round_trip(tmp_path):
    D = delta_qexp(3)
    line = format_qexp_record(1, 12, ZZ, D)
    assert line == "1 12 Z 3 : 0 1 -24"
    rec = parse_qexp_records([line])[0]
    assert (rec.level, rec.weight, rec.ring, rec.qexp) == (1, 12, ZZ, D)
    f = QExpansion([1, Fraction(1, 2), 0, Fraction(5, 6)], CoeffRing.localized(6))
    path = tmp_path / "x.qexp"
    write_qexp_file(path, [QExpRecord(1, 2, f.ring, f)], header=["test"])
    back = ingest_qexp_file(path)
    assert back[0].qexp == f and back[0].ring == CoeffRing.localized(6)


def test_ingest_delta_file(tmp_path):
    path = tmp_path / "delta.qexp"
    path.write_text(format_qexp_record(1, 12, ZZ, delta_qexp(5)) + "\n")
    rec = ingest_qexp_file(path)[0]
    assert rec.qexp == delta_qexp(5)


@pytest.mark.parametrize(
    "line, message",
    [
        ("1 12 Z 1 : 0", "Sturm"),
        ("1 4 Z/1_6 2 : 1 1/7", "not in Z/1_6"),
        ("1 4 Z 2 1 240", "separator"),
        ("1 4 Z 3 : 1 240", "declared precision"),
        ("1 4 W 2 : 1 240", "cannot parse ring"),
        ("1 4 Z 2 : 1 x", "malformed"),
    ],
)
def test_ingest_errors(line, message):
    with pytest.raises(ValueError, match=message) as err:
        parse_qexp_records(["# header", line], "f.qexp")
    assert "f.qexp:2" in str(err.value)


def test_bundled_pack_parses_and_lies_in_spans():
    files = sorted(DATA_DIR.glob("level*.qexp"))
    assert len(files) >= 32
    for path in files:
        recs = ingest_qexp_file(path)
        if not recs:
            # level 1 has no weight-2 forms and needs no data
            continue
        N = recs[0].level
        by_weight = {}
        for r in recs:
            by_weight.setdefault(r.weight, []).append(r.qexp)
        for k, vecs in by_weight.items():
            assert len(vecs) == dim_mk_gamma0(N, k)
            prec = min(v.prec for v in vecs)
            constructive = product_span_basis(N, k, prec, {})
            if constructive.certified_complete:
                assert same_span(constructive.vectors, [v.truncate(prec) for v in vecs])
            else:
                # whatever the constructive layer did find must sit inside the data span
                for v in constructive.vectors:
                    assert membership_over_ring(list(v.coeffs), [list(w.truncate(prec).coeffs) for w in vecs], QQ) is not None


# ---- saturation ----------------------------------------------------------

def test_saturation_level_one_weight_twelve():
    prec = 6
    q = echelon_basis([eisenstein_qexp(4, 1, prec) ** 3, delta_qexp(prec)])
    b = GradedBasis(1, 12, QQ, tuple(q), ("x", "x"), True)
    z = integral_saturated_basis(b, ZZ)
    assert z.saturated and z.vectors[1] == delta_qexp(prec)
    assert integral_saturated_basis(z, ZZ).vectors == z.vectors
    tripled = GradedBasis(1, 12, QQ, tuple(v.scale(3) for v in z.vectors), ("x", "x"), True)
    assert integral_saturated_basis(tripled, ZZ).vectors == z.vectors
    with pytest.raises(ProviderGap):
        integral_saturated_basis(GradedBasis(1, 12, QQ, tuple(q[:1]), ("x",), False))


def test_saturated_lattice_is_integral_forms():
    # E4 - E4(2z) has all coefficients divisible by 240, so M_4(Gamma0(2), Z) contains it / 240
    P = BasisProvider(2, 20, data_paths=[])
    z = P.zbasis(4)
    diff = (eisenstein_qexp(4, 1, 20) - eisenstein_qexp(4, 2, 20)).scale(Fraction(1, 240))
    assert membership_over_ring(list(diff.coeffs), z.rows(), ZZ) is not None


# ---- provider ------------------------------------------------------------

def test_provider_uses_data_only_for_gaps():
    N, prec = 13, sturm_bound_gamma0(13, 10) + 2
    bare = BasisProvider(N, prec, data_paths=[])
    with pytest.raises(ProviderGap):
        bare.qbasis(4)
    full = BasisProvider(N, prec, data_paths=[DATA_DIR])
    b = full.qbasis(4)
    assert b.certified_complete and "ingested" in b.provenance
    assert "ingested" not in full.qbasis(2).provenance


def test_provider_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("MFGENS_DATA", str(tmp_path))
    assert default_data_paths() == [tmp_path]
    assert BasisProvider(13, 10).data_weights() == []
    monkeypatch.delenv("MFGENS_DATA")
    assert default_data_paths() == [DATA_DIR]
    assert 4 in BasisProvider(13, 10).data_weights()


def test_two_certified_bases_agree():
    N, prec = 11, 30
    a = BasisProvider(N, prec, data_paths=[]).qbasis(6)
    b = BasisProvider(N, prec, data_paths=[DATA_DIR], use_eta=False).qbasis(6)
    assert same_span(a.vectors, b.vectors)
