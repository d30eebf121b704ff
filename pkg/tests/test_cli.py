import json
import random
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from btcompact import jsonio
from btcompact.apartment import Box, Corner, LatticeSeqSpec
from btcompact.cli import main
from btcompact.group_action import MonomialElement, ProjElement, RootGroupElement
from btcompact.lattice_building import LatticeClass, ball, common_frame
from btcompact.local_arith import INF, NEG_INF
from btcompact.norm_points import NormPoint
from btcompact.selftest import random_full_rank, random_lattice, random_point, random_ray

POINT_12 = '{"support":[1,2],"coords":{"1":"2","2":"0"}}'


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def run_json(capsys, *argv):
    status, out, err = run(capsys, *argv)
    assert status == 0, err
    return json.loads(out)


# --- JSON round trips ---------------------------------------------------------

@given(st.integers(0, 10**6))
def test_round_trips(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3, 5])
    n = rng.randint(2, 4)

    def again(obj, enc, dec, *extra):
        text = json.dumps(enc(obj))
        back = dec(json.loads(text), *extra)
        assert back == obj
        assert json.dumps(enc(back)) == text

    again(random_lattice(rng, n, p, rng.randint(1, n)), jsonio.lattice_json, jsonio.lattice_from_json)
    again(random_point(rng, n), jsonio.point_json, jsonio.point_from_json)
    again(random_ray(rng, n), jsonio.ray_json, jsonio.ray_from_json)
    again(LatticeSeqSpec(p, (1, 2), (0, 3)), jsonio.seq_json, jsonio.seq_from_json)
    box = Box.around([Fraction(rng.randint(-5, 5), 2) for _ in range(n - 1)], Fraction(1, 3))
    again(box, jsonio.nbhd_json, jsonio.nbhd_from_json)
    again(Corner((1,), box), jsonio.nbhd_json, jsonio.nbhd_from_json)
    again(NormPoint(p, random_full_rank(rng, n, 2, p), (Fraction(1, 2), 0)), jsonio.norm_json, jsonio.norm_from_json)
    again(ProjElement(random_full_rank(rng, n, n, p)), jsonio.element_json, jsonio.element_from_json)
    again(MonomialElement((2, 1), (1, -1)), jsonio.element_json, jsonio.element_from_json)
    again(RootGroupElement(1, 2, Fraction(-1, 3)), jsonio.element_json, jsonio.element_from_json)
    x, y = random_lattice(rng, n, p, 1), random_lattice(rng, n, p, n)
    again(common_frame(x, y), jsonio.frame_json, jsonio.frame_from_json)
    for v in (INF, NEG_INF, Fraction(-7, 3), Fraction(4)):
        assert jsonio.ext_from_json(jsonio.ext_json(v)) == v


def test_schema_errors():
    with pytest.raises(jsonio.SchemaError):
        jsonio.point_from_json({"support": [1], "coords": {"2": "0"}}, 3)
    with pytest.raises(jsonio.SchemaError):
        jsonio.lattice_from_json({"basis": [["x"]]}, 3)
    with pytest.raises(jsonio.SchemaError):
        jsonio.element_from_json({"foo": 1})
    with pytest.raises(jsonio.SchemaError):
        jsonio.point_from_json({"support": [1], "coords": {"1": "0"}})


# --- commands -------------------------------------------------------------------

def test_ball_dot(capsys, tmp_path):
    sidecar = tmp_path / "labels.json"
    status, out, _ = run(capsys, "ball", "--p", "3", "--n", "2", "--radius", "2", "--sidecar", str(sidecar))
    assert status == 0
    assert out.startswith("graph building {")
    assert out.count("label=") == 17 and out.count(" -- ") == 16
    labels = json.loads(sidecar.read_text())
    assert len(labels) == 17
    g = ball(LatticeClass.standard(2, 3), 2)
    assert {jsonio.lattice_from_json(v) for v in labels.values()} == set(g.vertices)


def test_ball_json_and_table(capsys):
    data = run_json(capsys, "ball", "--p", "2", "--n", "2", "--radius", "3", "--format", "json")
    assert len(data["vertices"]) == 22
    status, out, _ = run(capsys, "ball", "--p", "2", "--n", "2", "--radius", "1", "--format", "table")
    assert status == 0 and len(out.strip().splitlines()) == 1 + 4


def test_output_is_deterministic(capsys):
    first = run(capsys, "ball", "--p", "3", "--n", "3", "--radius", "1")
    second = run(capsys, "ball", "--p", "3", "--n", "3", "--radius", "1")
    assert first == second
    a = run(capsys, "selftest", "--seed", "7", "--scale", "0.02")
    b = run(capsys, "selftest", "--seed", "7", "--scale", "0.02")
    assert a == b and a[0] == 0


def test_prime_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("BTCOMPACT_PRIME", "2")
    data = run_json(capsys, "neighbors", "--lattice", '{"basis":[["1","0"],["0","1"]]}')
    assert len(data) == 3 and all(c["p"] == 2 for c in data)


def test_f_value(capsys):
    assert run_json(capsys, "f-value", "--n", "3", "--root", "1,3", "--point", POINT_12) == "-inf"
    assert run_json(capsys, "f-value", "--n", "3", "--root", "3,1", "--point", POINT_12, "--oracle") == "inf"
    assert run_json(capsys, "f-value", "--n", "3", "--root", "1,2", "--point", POINT_12, "--oracle") == "-2"
    omega = f'[{POINT_12}, {{"support":[1,2,3],"coords":{{"1":"0","2":"0","3":"0"}}}}]'
    assert run_json(capsys, "f-value", "--n", "3", "--root", "1,3", "--points", omega) == "0"


def test_lattice_commands(capsys):
    std = '{"basis":[["1","0"],["0","1"]]}'
    m = '{"basis":[["3","0"],["0","1"]]}'
    assert run_json(capsys, "adjacent", "--a", std, "--b", m) == {"adjacent": True, "rel_pos": [0, 1]}
    assert run_json(capsys, "simplex", "--classes", f"[{std}, {m}]") == {"simplex": True}
    pt = run_json(capsys, "phi", "--lattice", '{"basis":[["9","0"],["0","0"],["0","1"]]}')
    assert pt == {"n": 3, "support": [1, 3], "coords": {"1": "0", "3": "2"}}
    back = run_json(capsys, "phi-inv", "--point", json.dumps(pt))
    assert back["basis"] == [["9", "0"], ["0", "0"], ["0", "1"]]
    frame = run_json(capsys, "common-apartment", "--x", '{"basis":[["1"],["3"]]}', "--y", std)
    assert frame["verified"] is True


def test_apartment_commands(capsys):
    assert run_json(capsys, "chart", "--n", "3", "--point", POINT_12) == {"i": 1, "chart": {"2": "2", "3": "inf"}}
    pt = run_json(capsys, "chart-inv", "--i", "1", "--chart", '{"2":"2","3":"inf"}')
    assert pt == {"n": 3, "support": [1, 2], "coords": {"1": "2", "2": "0"}}
    c = run_json(capsys, "contract", "--n", "3", "--point", POINT_12, "--t", "1/2")
    assert c["coords"] == {"1": "1", "2": "1/2", "3": "0"}
    nb = '{"I":[1,2],"box":[["1","3"],["-1","1"]]}'
    assert run_json(capsys, "nbhd-contains", "--n", "3", "--nbhd", nb, "--point", POINT_12) == {"contains": True}
    ray = '{"base":{"n":3,"support":[1,2,3],"coords":{"1":"0","2":"0","3":"0"}},"direction":["0","0","1"]}'
    out = run_json(capsys, "limit-ray", "--ray", ray, "--certify", "3")
    assert out["limit"]["support"] == [1, 2] and None not in out["tail_starts"]
    out = run_json(capsys, "limit-lattices", "--seq", '{"p":3,"base":[0,0,0],"slopes":[0,0,1]}')
    assert out["limit"]["basis"] == [["1", "0"], ["0", "1"], ["0", "0"]]


def test_group_commands(capsys):
    out = run_json(capsys, "act", "--element", '{"matrix":[["3","0"],["0","1"]]}', "--point", '{"basis":[["1","0"],["0","1"]]}')
    assert out["basis"] == [["3", "0"], ["0", "1"]]
    out = run_json(capsys, "act", "--n", "3", "--element", '{"perm":[2,1,3],"vals":[0,0,0]}', "--point", POINT_12)
    assert out["coords"] == {"1": "0", "2": "2"}
    out = run_json(capsys, "stabilizes", "--n", "3", "--element", '{"i":3,"j":1,"omega":"1"}', "--points", f"[{POINT_12}]")
    assert out == {"stabilizes": False, "star_condition": True}
    out = run_json(capsys, "restrict", "--n", "3", "--element", '{"i":1,"j":2,"omega":"1/3"}', "--I", "1,2")
    assert out["psi"] == "-1" and out["root_element"] == {"i": 1, "j": 2, "omega": "1/3"}


def test_exit_codes(capsys):
    assert run(capsys, "phi", "--lattice", "{not json")[0] == 2
    assert run(capsys, "phi", "--lattice", '{"basis": 5}')[0] == 2
    assert run(capsys, "f-value", "--root", "1", "--n", "3", "--point", POINT_12)[0] == 2
    status, _, err = run(capsys, "phi-inv", "--n", "3", "--point", '{"support":[1,2],"coords":{"1":"1/2","2":"0"}}')
    assert status == 3 and "vertex" in err
    status, _, err = run(capsys, "neighbors", "--p", "11", "--lattice", '{"basis":[["1","0"],["0","1"]]}')
    assert status == 3 and "guardrail" in err
    assert run(capsys, "neighbors", "--p", "11", "--override-guardrails", "--lattice", '{"basis":[["1","0"],["0","1"]]}')[0] == 0
    assert run(capsys, "phi", "--p", "4", "--lattice", '{"basis":[["1"]]}')[0] == 3
    assert run(capsys, "phi", "--format", "dot", "--lattice", '{"basis":[["1"]]}')[0] == 2


def test_input_from_file(capsys, tmp_path):
    f = tmp_path / "pt.json"
    f.write_text(POINT_12)
    assert run_json(capsys, "f-value", "--n", "3", "--root", "1,2", "--point", f"@{f}") == "-2"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "btcompact", "f-value", "--n", "3", "--root", "1,3", "--point", POINT_12],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout) == "-inf"
