import math

import pytest

import pssforge


def test_expression_operations():
    assert pssforge.normalize("z1*z1 - z1^2") == "0"
    assert pssforge.normalize("s^2 - r", {"s": "r"}) == "0"
    assert pssforge.normalize(pssforge.total_dx("z1") + " - z2") == "0"
    assert pssforge.normalize(pssforge.partial("z^2*z1", "z") + " - 2*z*z1") == "0"
    assert pssforge.substitute("a*z1", {"a": "2"}) == pssforge.normalize("2*z1")
    assert pssforge.eval_numeric("sin(z)*eta", {"z": 0.5, "eta": 2.0}) == pytest.approx(2 * math.sin(0.5))
    assert pssforge.to_latex("z1") == "z_{1}"


def test_errors_map_to_python_exceptions():
    with pytest.raises(pssforge.ParseError):
        pssforge.normalize("z1 + * z")
    with pytest.raises(ValueError):
        pssforge.catalog("nls")
    with pytest.raises(pssforge.FormatError):
        pssforge.verify({"delta": 2, "f": []}, {"class": "a"})
    with pytest.raises(pssforge.NumericError):
        pssforge.curvature("kdv", "breather")


def test_catalog_entries_verify():
    names = pssforge.catalog_names()
    assert len(names) == 15
    for name in ("sine-gordon", "kdv", "camassa-holm"):
        inst = pssforge.catalog(name)
        assert inst["name"] == name
        report = pssforge.verify(inst["coframe"], inst["equation"], zcr=True)
        assert report["pass"]
        assert report["residuals"] == ["0", "0", "0"]


def test_broken_coframe_fails():
    inst = pssforge.catalog("sine-gordon")
    coframe = dict(inst["coframe"])
    coframe["f"] = [list(row) for row in coframe["f"]]
    coframe["f"][0][1] = "0"
    assert not pssforge.verify(coframe, inst["equation"])["pass"]


def test_construct_branch():
    spec = {"branch": "T35-II", "sign": "+", "delta": -1,
            "params": {"eta": "1", "gamma": "1", "sigma": "0", "r": "1"}}
    inst = pssforge.construct(spec)
    assert pssforge.verify(inst["coframe"], inst["equation"])["pass"]


def test_conservation_series():
    inst = pssforge.catalog("sine-gordon")
    out = pssforge.conservation(inst["coframe"], inst["equation"], order=2)
    assert out["closed_form"]
    assert len(out["pairs"]) == 2
    assert all(p["verified"] for p in out["pairs"])


def test_curvature_and_properties():
    report = pssforge.curvature("sine-gordon", "kink", 301, 301)
    assert report["pass"]
    assert report["max_abs_K_plus_delta"] < 1e-3
    results = pssforge.properties(cases=20, seed=7)
    assert len(results) == 5
    assert all(r["pass"] for r in results)
