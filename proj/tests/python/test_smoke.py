import json
import os
from pathlib import Path

import pytest

import sketchmap

DATA = Path(os.environ.get("SKETCHMAP_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))

needs_solver = pytest.mark.skipif(not sketchmap.available_solvers(), reason="no SMT solver on PATH")


def test_parse_and_simulate_spec():
    prog = sketchmap.parse_spec("(spec (inputs (a 4) (b 4)) (pipeline 1) (add a b))")
    assert prog.inputs == {"a": 4, "b": 4}
    assert prog.width == 4
    assert prog.simulate({"a": [3, 9, 15], "b": [4, 9, 1]}, 2) == [0, 7, 2]


def test_errors_are_python_exceptions():
    with pytest.raises(sketchmap.ParseError):
        sketchmap.parse_spec("(spec (inputs (a 4)) (frob a))")
    with pytest.raises(sketchmap.WidthError):
        sketchmap.parse_spec("(spec (inputs (a 4) (b 3)) (add a b))")
    with pytest.raises(sketchmap.SketchmapError):
        sketchmap.load_arch(str(DATA / "arch" / "missing.yml"))


def test_templates_and_architectures():
    names = [t["name"] for t in sketchmap.list_templates()]
    assert names == ["dsp", "bitwise", "bitwise-with-carry", "comparison", "multiplication"]
    assert sketchmap.load_arch(str(DATA / "arch" / "sofa.yml")).implementations == ["LUT4"]


def test_btor2_import():
    and2 = sketchmap.import_btor2(str(DATA / "models" / "and2.btor2"))
    assert and2.simulate({"a": [0, 1, 1, 0], "b": [0, 0, 1, 1]}, 3) == [0, 0, 1, 0]
    with pytest.raises(sketchmap.MissingInit):
        sketchmap.import_btor2(str(DATA / "models" / "uninit.btor2"))


@needs_solver
def test_synthesize_and_emit():
    arch = sketchmap.load_arch(str(DATA / "arch" / "generic-lut-carry.yml"))
    spec = sketchmap.parse_spec("(spec (inputs (a 3) (b 3)) (add a b))")
    sketch = sketchmap.generate_sketch("bitwise-with-carry", [("a", 3), ("b", 3)], 3, arch)
    assert sketch.holes
    result = sketchmap.synthesize(spec, sketch)
    assert result["status"] == "success"
    impl = result["program"]
    assert impl.hole_free
    for a in range(8):
        for b in range(8):
            assert impl.simulate({"a": [a], "b": [b]}, 0) == [(a + b) % 8]
    verilog = sketchmap.to_structural_verilog(impl, "adder")
    assert verilog.startswith("module adder")
    netlist = sketchmap.to_json_netlist(impl)
    assert "top" in json.loads(netlist)["modules"]
    back = sketchmap.from_json_netlist(netlist)
    assert sketchmap.netlists_isomorphic(impl, back)
    with pytest.raises(sketchmap.NotStructural):
        sketchmap.to_structural_verilog(spec)


@needs_solver
def test_run_map_exit_codes(tmp_path):
    spec = tmp_path / "add2.spec"
    spec.write_text("(spec (inputs (a 2) (b 2)) (add a b))")
    arch = str(DATA / "arch" / "generic-lut-carry.yml")
    assert sketchmap.run_map(str(spec), "bitwise", arch)["exit_code"] == 2
    out = tmp_path / "out.v"
    r = sketchmap.run_map(str(spec), "bitwise-with-carry", arch, out_path=str(out))
    assert r["exit_code"] == 0 and r["status"] == "success"
    assert out.read_text().startswith("module top")
    assert sketchmap.run_map(str(spec), "bitwise", str(tmp_path / "nope.yml"))["exit_code"] == 1


def test_benchgen(tmp_path):
    corpus = sketchmap.benchgen("minidsp", str(tmp_path))
    assert len(corpus) == 13 * 9 * 4
    assert (tmp_path / "manifest.csv").read_text().splitlines()[0] == "name,file,shape,width,depth,expressible"
