import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellsurj.arith import Poly, RationalFunction
from ellsurj.curves import QT, FpT, TraceSample, WeierstrassCurve, quadratic_twist, trace_samples
from ellsurj.errors import InvalidLevel, PreconditionFailed, UnsupportedParameters
from ellsurj.groups import Mat2Mod, det_sign_character, gl2_generators, twisted_graph_subgroup
from ellsurj.surjectivity import (
    CERTIFIED,
    INCONCLUSIVE,
    brute_force_image,
    certify_pair,
    certify_product,
    certify_single,
    pair_witness,
    validate_witness_soundness,
    witness_classes,
)

from oracles import gl2_tuples, naive_trace


def samples_from_pairs(pairs, ell):
    return [TraceSample(k, (tr % ell,), det % ell, ell) for k, (tr, det) in enumerate(pairs)]


def test_empty_samples_inconclusive():
    c = certify_single([], 17)
    assert c.status == INCONCLUSIVE and c.missing == ["W1", "W2", "W3"]


def test_full_gl2_17_certifies():
    ell = 17
    pairs = sorted({((a + d) % ell, (a * d - b * c) % ell) for a, b, c, d in gl2_tuples(ell)})
    c = certify_single(samples_from_pairs(pairs, ell), ell)
    assert c.certified and not c.small_ell_mode


def test_zero_trace_never_certifies():
    ell = 19
    c = certify_single(samples_from_pairs([(0, d) for d in range(1, ell)], ell), ell)
    assert c.status == INCONCLUSIVE and {"W1", "W2"} <= set(c.missing)


def test_small_ell_requires_mode():
    with pytest.raises(InvalidLevel):
        certify_single([], 7, small_ell=False)
    assert certify_single([], 7).small_ell_mode


@pytest.mark.parametrize("ell", [5, 7, 11, 13])
def test_witness_soundness_small_ell(ell):
    rep = validate_witness_soundness(ell)
    assert rep.ok
    assert "W2" in rep.missing["borel"]
    assert "W2" in rep.missing["split_cartan_normalizer"]
    assert "W1" in rep.missing["nonsplit_cartan_normalizer"]
    assert any(k.startswith("exceptional_") for k in rep.missing)
    for k, v in rep.missing.items():
        if k.startswith("exceptional_"):
            assert "W3" in v


def test_exceptional_types_found():
    assert {k for k in validate_witness_soundness(11).missing if k.startswith("exceptional")} == {
        "exceptional_12",
        "exceptional_24",
        "exceptional_60",
    }
    assert {k for k in validate_witness_soundness(7).missing if k.startswith("exceptional")} == {
        "exceptional_12",
        "exceptional_24",
    }


E1 = WeierstrassCurve(1, 1)
E2 = WeierstrassCurve(-1, 1)


def test_pair_identical_curves_never_certified():
    for ell in (7, 11, 13, 37):
        s = trace_samples([E1, E1], 500, ell)
        assert pair_witness(s, ell, 0, 1) is None


def test_pair_twist_never_certified():
    for ell in (7, 11, 13, 37):
        s = trace_samples([E1, quadratic_twist(E1, -1)], 500, ell)
        assert pair_witness(s, ell, 0, 1) is None


def test_pair_non_isogenous_certified_at_7():
    s = trace_samples([E1, E2], 100, 7)
    r = certify_pair(s, 7)
    assert r.status == CERTIFIED and r.witness is not None
    place = r.witness
    a1, a2 = naive_trace(1, 1, place), naive_trace(-1, 1, place)
    assert (a1 * a1 - a2 * a2) % 7


def test_certify_pair_needs_certified_singles():
    s = samples_from_pairs([(0, 1)], 19)
    s = [TraceSample(x.place, (0, 1), 1, 19) for x in s]
    with pytest.raises(PreconditionFailed):
        certify_pair(s, 19)


def test_pair_obstruction_on_twisted_graph_at_5():
    ell = 5
    H = twisted_graph_subgroup(gl2_generators(ell), Mat2Mod(1, 1, 0, 1, ell), det_sign_character(ell))
    samples = [
        TraceSample(k, (h.mats[0].trace, h.mats[1].trace), h.det, ell) for k, h in enumerate(H.members())
    ]
    assert any(s.traces[0] != s.traces[1] for s in samples)
    assert pair_witness(samples, ell, 0, 1) is None


def test_product_n1_matches_single():
    s = trace_samples([E1], 1000, 19)
    p = certify_product(s, 19)
    single = certify_single(s, 19)
    assert p.singles[0] == single and p.status == single.status


def test_product_n2_certified():
    s = trace_samples([E1, E2], 1000, 19)
    assert certify_product(s, 19).certified


def test_product_names_missing_pair():
    s = trace_samples([E1, E2, E2], 1000, 19)
    cert = certify_product(s, 19)
    assert cert.status == INCONCLUSIVE
    assert cert.missing_pairs() == [(1, 2)]
    assert cert.pairs[(0, 1)] is not None and cert.pairs[(0, 2)] is not None
    assert any("pair (1, 2)" in n for n in cert.notes)


def test_product_rejects_ell_at_most_5():
    with pytest.raises(InvalidLevel):
        certify_product([], 5, n=2)


def test_report_wording_avoids_exceptional():
    s = trace_samples([E1, E1], 200, 7)
    text = repr(certify_product(s, 7).to_dict()).lower()
    assert "exceptional" not in text


sample_strategy = st.lists(
    st.tuples(st.integers(0, 22), st.integers(0, 22), st.integers(1, 22)), max_size=40
)


def _mk(rows, ell=23):
    return [TraceSample(k, (a % ell, b % ell), d % ell, ell) for k, (a, b, d) in enumerate(rows)]


@settings(max_examples=80)
@given(sample_strategy, sample_strategy)
def test_certify_product_monotone(rows, extra):
    base = _mk(rows)
    more = base + [TraceSample(len(rows) + k, s.traces, s.det, 23) for k, s in enumerate(_mk(extra))]
    if certify_product(base, 23, n=2).certified:
        assert certify_product(more, 23, n=2).certified


@settings(max_examples=80)
@given(sample_strategy, st.randoms())
def test_certificate_independent_of_order(rows, rnd):
    s = _mk(rows)
    shuffled = list(s)
    rnd.shuffle(shuffled)
    assert certify_product(s, 23, n=2) == certify_product(shuffled, 23, n=2)


def test_witness_classes_low_projective_order_fail_w3():
    # scalar, order-2 (trace 0) and order-3 (tr^2 = det) elements miss W3
    assert "W3" not in witness_classes(2, 1, 17)
    assert "W3" not in witness_classes(0, 3, 17)
    assert "W3" not in witness_classes(1, 1, 17)


def test_brute_force_image():
    p = 11
    c = WeierstrassCurve(RationalFunction(Poly.t(p)), RationalFunction(Poly([1], p)), FpT(p))
    img = brute_force_image(c, 5)
    bad = sum(1 for x in range(p) if (4 * x**3 + 27) % p == 0)
    assert sum(img.values()) == p - bad
    expected = {}
    for x in range(p):
        if (4 * x**3 + 27) % p:
            key = (naive_trace(x, 1, p) % 5, p % 5)
            expected[key] = expected.get(key, 0) + 1
    assert dict(img) == expected


def test_brute_force_rejects_isotrivial_and_large_p():
    p = 11
    iso = WeierstrassCurve(RationalFunction(Poly([1], p)), RationalFunction(Poly([1], p)), FpT(p))
    with pytest.raises(PreconditionFailed):
        brute_force_image(iso, 5)
    c = WeierstrassCurve(RationalFunction(Poly.t(53)), RationalFunction(Poly([1], 53)), FpT(53))
    with pytest.raises(UnsupportedParameters):
        brute_force_image(c, 5)
    with pytest.raises(UnsupportedParameters):
        brute_force_image(WeierstrassCurve(RationalFunction(Poly.t()), RationalFunction(Poly([1])), QT), 5)
