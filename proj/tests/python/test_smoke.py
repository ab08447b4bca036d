import json
import math
from fractions import Fraction

import pytest

import specmix


def test_family_eval_big_ints():
    fam = specmix.polynomial_family([[0, 1], [0, 0, 1]])
    assert len(fam) == 2
    n = 10**40
    assert fam.eval(2, n) == n * n
    assert fam.independent() == (True, True)


def test_solve_profile_exact_fractions():
    fam = specmix.polynomial_family([[0, 1], [0, 0, 1]])
    x = specmix.solve_profile(fam, "10")
    assert x == [Fraction(1, 2), Fraction(1)]
    assert specmix.solve_profile(fam, [0, 1]) == [Fraction(1), Fraction(1, 2)]


def test_poly_pipeline_round_trip():
    fam = specmix.polynomial_family([[0, 1]])
    sols = {"0": specmix.solve_profile(fam, "0"), "1": specmix.solve_profile(fam, "1")}
    anchor = specmix.poly_anchor(fam, sols, K=3)
    assert specmix.verify_poly_anchor(fam, sols, anchor)
    assert anchor.n == sorted(anchor.n)

    mu = specmix.poly_measure(sols["1"], anchor, 3)
    assert len(mu) == 3
    again = specmix.measure_from_json(mu.to_json())
    assert again.to_json() == mu.to_json()

    table = specmix.verify_profile(mu, fam, anchor, "1", K=2, m_lo=-1, m_hi=1, eps=1e-4)
    assert len(table) == 6  # one member, k in {1,2}, m in {-1,0,1}
    for row in table.rows():
        bound = specmix.poly_chain_bound(fam, row["j"], anchor, row["k"])
        assert row["error"] <= 2 * float(bound) + 2e-4
    assert "j,k,m,sigma_shifted,sigma_target,error,radius" in table.to_csv()


def test_certified_sigma_matches_enumeration():
    mu = specmix.measure_from_json(json.dumps({
        "levels": [{"C": "1/4", "A": 2}, {"C": "1/8", "A": 3}],
        "tail": {"kind": "geometric", "ratio": "1/2", "scale": "0/1"},
    }))
    for m in range(-5, 6):
        value, radius = mu.sigma(m)
        assert abs(value.real - mu.sigma_exact(m)) <= radius + 1e-12
        assert abs(value.imag) <= 1e-15
    v0, _ = mu.sigma(0)
    assert v0 == 1


def test_prime_construction_characters():
    spec = specmix.prime_spec(2, [2, 3])
    assert spec.M == 5
    assert spec.q == [2, 3]  # proper subsets only: j=1 in {1}, j=2 in {2}
    anchor = specmix.prime_anchor(spec, 3)
    fam = specmix.prime_family(spec)
    for idx in range(4):
        key = spec.xi(idx)
        p = spec.prime(idx)
        c = max(int(p) - 1, 1)
        for j in (1, 2):
            want = 1.0 if key[j - 1] == "0" else 0.0
            got = specmix.character_average(fam.eval(j, 1), p, c)
            assert abs(got - want) < 1e-12
    mu = specmix.prime_measure(spec, 0, anchor, 3)
    assert len(mu) == 3


def test_general_search_reverifies():
    fam = specmix.polynomial_family([[0, 1]])
    anchor, alphas = specmix.search_general(fam, ["0", "1"], K=2, scan_bound=20000, seed=11)
    assert set(alphas) == {"0", "1"}
    assert all(isinstance(a, Fraction) for a in alphas["0"])
    assert specmix.verify_general(fam, anchor, alphas)
    mu = specmix.general_measure(alphas["1"])
    assert len(mu) == 2
    dev = specmix.general_chain_deviation(fam, alphas["1"], [1], anchor, 1, 1, 2)
    bound = specmix.general_chain_bound(fam, alphas["1"], anchor, 1, 1, 2)
    assert dev <= bound


def test_weyl_quarter_rotation_cancels():
    fam = specmix.polynomial_family([[0, 1]])
    assert specmix.weyl_sum(fam, [1], Fraction(1, 4), 4) == 0
    rep = specmix.equidistribution(fam, [Fraction(1, 4)], 4, box=1)
    assert rep["M"] == 4
    assert all(abs(v) < 1e-15 for _, v in rep["sums"])


def test_glue_identity_and_metric_bound():
    ident = specmix.identity_automorphism(3)
    cyc = specmix.cyclic_automorphism(1, 3)
    glued = specmix.glue_pieces([Fraction(1, 2)], [cyc, ident], 1)
    assert glued.G == 4
    res = specmix.convex_identity_residual(glued, [cyc, ident], [Fraction(1, 2)],
                                           1, 1, [1, 2, 3])
    assert res == 0
    rot = specmix.cyclic_automorphism(1, glued.G)
    rep = specmix.metric_bound_check(rot, glued, [cyc, ident], [Fraction(1, 2)], 1)
    assert rep["ok"]
    assert rep["slack"] >= 0
    assert rep["lhs"] + rep["slack"] == rep["rhs"]


def test_run_config_writes_artifacts(tmp_path):
    out = tmp_path / "run"
    config = {
        "measure": {
            "levels": [{"C": "1/2", "A": 2}],
            "tail": {"kind": "geometric", "ratio": "1/2", "scale": "0/1"},
        },
        "M_list": [0, 4],
        "out": str(out),
    }
    rc, err = specmix.run_config(json.dumps(config), "wiener")
    assert rc == 0 and err == ""
    report = json.loads((out / "wiener.json").read_text())
    assert report["values"][0]["value"] == "1"
    assert math.isclose(float(report["values"][1]["value"]), 5.0 / 9.0, rel_tol=1e-12)


def test_errors_surface_as_module_exception():
    with pytest.raises(specmix.Error, match="parse-error"):
        specmix.measure_from_json("{}")
    with pytest.raises(specmix.Error, match="invalid-permutation"):
        specmix.automorphism([0, 0, 1, 1])
    rc, err = specmix.run_config(json.dumps({"dir": "/nonexistent-dir"}), "verify")
    assert rc == 1
    assert json.loads(err)["error"]["code"]
