import json
import random
import shutil
import subprocess
import sys
from fractions import Fraction

import pytest

from afrkit.afr.model import afr_as_system, build_afr, model_from_json
from afrkit.cli import main
from afrkit.flex import ResourceSet, serialize_resources
from afrkit.instances import random_resource_set
from afrkit.linear import sample_vertex

from conftest import sink_resource, two_step_pair, unit_resource


def write(path, text):
    path.write_text(text)
    return str(path)


def res_doc(rs):
    return serialize_resources(list(rs), "json")


def res(rid="a", pmin=("0",), pmax=("1",), emin=("0",), emax=("1",)):
    return {"id": rid, "p_min": list(pmin), "p_max": list(pmax), "e_min": list(emin), "e_max": list(emax)}


@pytest.fixture
def single(tmp_path):
    return write(tmp_path / "one.json", json.dumps({"resources": [res()]}))


@pytest.fixture
def bad_rate(tmp_path):
    return write(tmp_path / "bad.json", json.dumps({"resources": [
        res(pmin=("0", "0"), pmax=("1", "1"), emin=("0", "0"), emax=("1", "3"))]}))


class TestValidate:
    def test_ok(self, single, capsys):
        assert main(["validate", single]) == 0
        assert "a: ok" in capsys.readouterr().out

    def test_violation_names_interval(self, bad_rate, capsys):
        assert main(["validate", bad_rate]) == 1
        out = capsys.readouterr().out
        assert "violation" in out and "t=2" in out

    def test_tighten(self, bad_rate, tmp_path):
        out = tmp_path / "fixed.json"
        assert main(["validate", bad_rate, "--tighten", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["resources"][0]["e_max"] == ["1", "2"]
        assert main(["validate", str(out)]) == 0

    @pytest.mark.parametrize("text", ["{oops", json.dumps({"resources": [{"id": "a"}]}), "[1, 2]"])
    def test_parse_error(self, tmp_path, text):
        assert main(["validate", write(tmp_path / "x.json", text)]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "none.json")]) == 2

    def test_unknown_command(self):
        assert main(["frobnicate"]) == 2


class TestBuild:
    def test_singleton(self, single, capsys):
        assert main(["build", single]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["constraints"] == [{"S": [1], "lo": "0", "hi": "1"}]
        assert doc["stats"]["directions"] == 1 and doc["stats"]["inequalities"] == 2

    def test_t3_counts(self, tmp_path, capsys):
        rs = random_resource_set(random.Random(0), 2, 3)
        assert main(["build", write(tmp_path / "r.json", res_doc(rs))]) == 0
        stats = json.loads(capsys.readouterr().out)["stats"]
        assert (stats["directions"], stats["inequalities"]) == (7, 14)

    def test_threads_do_not_change_output(self, tmp_path):
        rs = random_resource_set(random.Random(2), 3, 4)
        src = write(tmp_path / "r.json", res_doc(rs))
        outs = []
        for k in ("1", "3"):
            out = tmp_path / f"m{k}.json"
            assert main(["build", src, "--threads", k, "--no-stats", "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_csv(self, single, capsys):
        assert main(["build", single, "--format", "csv"]) == 0
        cap = capsys.readouterr()
        assert cap.out.splitlines()[1:] == ["1,0,1"]
        assert "stats" in cap.err

    def test_invalid_resources(self, bad_rate):
        assert main(["build", bad_rate]) == 1


class TestAlgebra:
    def test_merge_equals_build(self, tmp_path):
        a, b = unit_resource(), sink_resource()
        paths = []
        for name, group in (("a", [a]), ("b", [b]), ("ab", [a, b])):
            src = write(tmp_path / f"{name}.json", res_doc(ResourceSet(tuple(group))))
            out = tmp_path / f"{name}.afr.json"
            assert main(["build", src, "--contributions", "--no-stats", "--out", str(out)]) == 0
            paths.append(out)
        merged = tmp_path / "merged.json"
        assert main(["merge", str(paths[0]), str(paths[1]), "--out", str(merged)]) == 0
        assert merged.read_bytes() == paths[2].read_bytes()

    def test_merge_associative(self, tmp_path):
        rs = random_resource_set(random.Random(5), 3, 2)
        paths = []
        for r in rs:
            out = tmp_path / f"{r.id}.afr.json"
            src = write(tmp_path / f"{r.id}.json", res_doc(ResourceSet((r,))))
            assert main(["build", src, "--no-stats", "--out", str(out)]) == 0
            paths.append(str(out))
        left, right = tmp_path / "l.json", tmp_path / "r.json"
        main(["merge", paths[0], paths[1], "--out", str(tmp_path / "ab.json")])
        main(["merge", str(tmp_path / "ab.json"), paths[2], "--out", str(left)])
        main(["merge", paths[1], paths[2], "--out", str(tmp_path / "bc.json")])
        main(["merge", paths[0], str(tmp_path / "bc.json"), "--out", str(right)])
        assert left.read_bytes() == right.read_bytes()

    def test_merge_horizon_mismatch(self, tmp_path):
        e1, e2 = tmp_path / "e1.json", tmp_path / "e2.json"
        main(["empty", "--T", "1", "--out", str(e1)])
        main(["empty", "--T", "2", "--out", str(e2)])
        assert main(["merge", str(e1), str(e2)]) == 1

    def test_add_to_empty(self, single, tmp_path):
        empty, added, direct = (tmp_path / n for n in ("e.json", "a.json", "d.json"))
        assert main(["empty", "--T", "1", "--out", str(empty)]) == 0
        assert main(["add", str(empty), single, "--out", str(added)]) == 0
        assert main(["build", single, "--no-stats", "--out", str(direct)]) == 0
        assert model_from_json(added.read_text()).bounds((1,)) == model_from_json(direct.read_text()).bounds((1,))

    def test_corrupt_model(self, tmp_path):
        assert main(["merge", write(tmp_path / "m.json", '{"T": 1}')]) == 2


@pytest.fixture
def pair_files(tmp_path):
    rs = two_step_pair()
    src = write(tmp_path / "pair.json", res_doc(rs))
    model = tmp_path / "pair.afr.json"
    main(["build", src, "--no-stats", "--out", str(model)])
    return rs, src, str(model)


class TestProfiles:
    def test_inside(self, pair_files, tmp_path, capsys):
        _, _, model = pair_files
        capsys.readouterr()
        assert main(["check", model, write(tmp_path / "p.json", '{"E": ["1", "2"]}')]) == 0
        assert json.loads(capsys.readouterr().out) == {"inside": True, "violations": []}

    def test_outside(self, pair_files, tmp_path, capsys):
        _, _, model = pair_files
        capsys.readouterr()
        assert main(["check", model, write(tmp_path / "p.json", '{"E": ["2", "-1"]}')]) == 1
        doc = json.loads(capsys.readouterr().out)
        assert not doc["inside"] and [2] in [v["S"] for v in doc["violations"]]

    def test_wrong_length(self, pair_files, tmp_path):
        _, _, model = pair_files
        assert main(["check", model, write(tmp_path / "p.json", '{"E": ["1"]}')]) == 2

    def test_disaggregate_sums(self, pair_files, tmp_path):
        rs, src, _ = pair_files
        vertex = sample_vertex(afr_as_system(build_afr(rs)), {"E(1)": 1, "E(2)": -1})
        E = [vertex["E(1)"], vertex["E(2)"]]
        prof = write(tmp_path / "p.json", json.dumps({"E": [str(v) for v in E]}))
        out = tmp_path / "alloc.json"
        assert main(["disaggregate", src, prof, "--out", str(out)]) == 0
        alloc = json.loads(out.read_text())["allocations"]
        for t in range(2):
            assert sum(Fraction(traj[t]) for traj in alloc.values()) == E[t]

    def test_disaggregate_outside(self, pair_files, tmp_path):
        _, src, _ = pair_files
        assert main(["disaggregate", src, write(tmp_path / "p.json", '{"E": ["9", "9"]}')]) == 1


class TestCompareOracle:
    @pytest.mark.parametrize("rs", [
        ResourceSet((unit_resource(),)),
        ResourceSet((unit_resource(), sink_resource())),
        two_step_pair(),
    ], ids=["single", "intervals", "pair"])
    def test_reference_instances(self, rs, tmp_path, capsys):
        assert main(["compare-oracle", write(tmp_path / "r.json", res_doc(rs))]) == 0
        assert json.loads(capsys.readouterr().out)["equivalent"] is True

    def test_guard(self, tmp_path, capsys):
        rs = random_resource_set(random.Random(0), 3, 5)
        assert main(["compare-oracle", write(tmp_path / "r.json", res_doc(rs))]) == 3
        assert "refused" in capsys.readouterr().err

    def test_corrupted_model(self, pair_files, tmp_path):
        _, src, model = pair_files
        doc = json.loads(open(model).read())
        doc["constraints"][0]["hi"] = str(Fraction(doc["constraints"][0]["hi"]) + 1)
        bad = write(tmp_path / "bad.afr.json", json.dumps(doc))
        assert main(["compare-oracle", src, "--afr", bad]) == 1
        assert main(["compare-oracle", src, "--afr", model]) == 0


class TestTheorems:
    def test_json_report(self, tmp_path, capsys):
        out = tmp_path / "rep.json"
        code = main(["theorems", "--seeds", "3", "--sizes", "2x2,3x3",
                     "--checks", "method1,theorem2-b", "--json", str(out)])
        assert code == 0
        rows = json.loads(out.read_text())
        assert len(rows) == 2 * 3  # sizes are cycled across seeds
        assert set(rows[0]) == {"check", "seed", "N", "T", "pass"}
        assert "method1" in capsys.readouterr().out

    def test_mutant_fails(self):
        assert main(["theorems", "--seeds", "10", "--sizes", "3x3",
                     "--checks", "soundness,theorem2-a", "--mutant", "b1-sign"]) == 1

    @pytest.mark.parametrize("argv", [["--sizes", "3by3"], ["--checks", "nonsense"]])
    def test_bad_args(self, argv):
        assert main(["theorems", "--seeds", "1", *argv]) == 2


def test_bench_small(capsys):
    assert main(["bench", "--N", "5,10,20", "--T", "3", "--repeats", "1"]) == 0
    out = capsys.readouterr().out
    assert "R^2 linear_in_N@T=3" in out and "MISMATCH" not in out


@pytest.mark.skipif(shutil.which("afrkit") is None, reason="console script not installed")
def test_console_script(single):
    proc = subprocess.run(["afrkit", "validate", single], capture_output=True, text=True)
    assert proc.returncode == 0


def test_module_entry(single):
    proc = subprocess.run([sys.executable, "-m", "afrkit", "validate", single], capture_output=True, text=True)
    assert proc.returncode == 0
