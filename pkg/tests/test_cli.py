import json
import math
import random

import pytest

from conftest import synthetic_cloud
from quasicomb import serial
from quasicomb.cli import main
from quasicomb.cosets import diff
from quasicomb.distributions import CombDistribution, canonical, comb, isclose, term
from quasicomb.lattice import Coset, Lattice, canonicalize, subgroup
from quasicomb.presets import PRESETS, sine_comb, unbounded_comb
from quasicomb.testfn import gaussian

Z2 = Lattice.standard(2)


@pytest.fixture
def write(tmp_path):
    def _write(name, obj, kind=None):
        p = tmp_path / name
        serial.save(p, obj, kind)
        return str(p)
    return _write


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_fourier_of_standard_comb(write, capsys):
    p = write("z2.json", comb(Coset(Z2)))
    code, out, _ = run(["fourier", p], capsys)
    assert code == 0
    assert canonical(serial.loads(out)) == canonical(comb(Coset(Z2)))


def test_fourier_of_unbounded_comb(write, tmp_path, capsys):
    p = write("x1.json", unbounded_comb())
    out_path = tmp_path / "hat.json"
    code, _, _ = run(["fourier", p, "--out", str(out_path)], capsys)
    assert code == 0
    (t,) = serial.load(out_path, "distribution").terms
    assert t.k == (1, 0) and t.m == (0, 0)
    assert complex(t.coeff.coefficients[0]) == pytest.approx(1j / (2 * math.pi))
    code, out, _ = run(["ifourier", str(out_path)], capsys)
    assert code == 0 and isclose(serial.loads(out), unbounded_comb())


def test_output_is_deterministic(write, capsys):
    p = write("sine.json", sine_comb())
    first = run(["fourier", p], capsys)[1]
    second = run(["fourier", p], capsys)[1]
    assert first == second and first.endswith("\n")


def test_malformed_input(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{ nope")
    code, _, err = run(["fourier", str(p)], capsys)
    assert code == 2 and "error" in err
    code, _, _ = run(["fourier", str(tmp_path / "missing.json")], capsys)
    assert code == 2


def test_wrong_kind(write, capsys):
    p = write("z2.json", Z2)
    assert run(["fourier", p], capsys)[0] == 2


def test_unsupported_term(write, capsys):
    f = CombDistribution(2, (term(Coset(subgroup([[1, 0]], 2)), 1),))
    p = write("thin.json", f)
    assert run(["fourier", p], capsys)[0] == 3


def test_pair(write, capsys):
    d = write("z1.json", comb(Coset(Lattice.standard(1))))
    t = write("g.json", gaussian(1))
    code, out, err = run(["pair", d, t], capsys)
    assert code == 0
    re_, im = serial.loads(out)["value"]
    assert abs(im) < 1e-15 and re_ == pytest.approx(1.0864348112133082, abs=1e-12)
    assert "bound" in err


def test_poisson_check(write, capsys):
    L = write("l.json", canonicalize([[1, 1], [-1, 1]]))
    t = write("g.json", gaussian(2, a=0.3, center=(0.2, 0.1)))
    code, out, _ = run(["poisson-check", L, t], capsys)
    assert code == 0 and serial.loads(out)["ok"] is True
    # an impossible tolerance is a failed check, not a crash
    assert run(["poisson-check", L, t, "--tol", "1e-300"], capsys)[0] == 4


def test_lattice_commands(write, capsys):
    a = write("a.json", Z2)
    b = write("b.json", canonicalize([[2, 0], [1, 3]]))
    code, out, _ = run(["lattice", "dual", a], capsys)
    assert code == 0 and serial.loads(out) == Z2
    code, out, _ = run(["lattice", "intersect", a, b], capsys)
    assert code == 0 and serial.loads(out) == canonicalize([[2, 0], [1, 3]])
    code, out, _ = run(["lattice", "index", b, a], capsys)
    assert code == 0 and serial.loads(out)["index"] == 6
    assert run(["lattice", "intersect", a], capsys)[0] == 2


def test_rank_deficient_intersection(write, capsys):
    a = write("a.json", Z2)
    b = write("b.json", subgroup([[1, 1]], 2))
    code, out, err = run(["lattice", "intersect", a, b], capsys)
    assert code == 0 and "rank 1" in err
    doc = json.loads(out)
    assert doc["meta"]["rank"] == 1
    assert serial.loads(out) == subgroup([[1, 1]], 2)
    # exact and numeric lattices do not mix
    c = write("c.json", canonicalize([[1, 0], [0, math.sqrt(2)]]))
    assert run(["lattice", "intersect", a, c], capsys)[0] == 2


def test_normalize(write, capsys):
    e = diff(Coset(Z2), Coset(Z2.scaled(2)))
    p = write("e.json", e)
    code, out, err = run(["normalize", p], capsys)
    assert code == 0
    sysm = serial.loads(out)
    assert len(sysm.full_rank_cosets) == 3 and not sysm.residue
    assert "3 disjoint cosets" in err


def test_detect_from_csv(tmp_path, capsys):
    cosets, P = synthetic_cloud(random.Random(11), half=20)
    p = tmp_path / "cloud.csv"
    p.write_text("".join(f"{float(x)!r},{float(y)!r}\n" for x, y in P))
    code, out, _ = run(["detect", "--input", str(p), "--dim", "2"], capsys)
    assert code == 0
    fit = serial.loads(out)
    assert not fit.uncovered and not fit.overcover
    assert len(fit.cosets) <= 3


def test_detect_no_fit(tmp_path, capsys):
    p = tmp_path / "one.csv"
    p.write_text("0.5,0.25\n")
    assert run(["detect", "--input", str(p)], capsys)[0] == 4


def test_almost_periods(write, capsys):
    p = write("sine.json", sine_comb())
    code, out, _ = run(["almost-periods", p, "--epsilon", "0.5", "--window", "0", "200",
                        "--direction", "1", "0"], capsys)
    assert code == 0
    rep = serial.loads(out)
    assert rep["periods"] and math.isfinite(rep["max_gap"])
    assert run(["almost-periods", p, "--term", "7"], capsys)[0] == 2


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_verify_examples(name, capsys):
    code, out, err = run(["verify-example", name], capsys)
    assert code == 0 and "PASS" in err
    assert serial.loads(out)["ok"] is True


def test_unknown_example(capsys):
    assert run(["verify-example", "nope"], capsys)[0] == 2
