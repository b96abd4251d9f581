import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from selfaffine import cli
from selfaffine.affine_core import validate_system
from selfaffine.augmented_tree import expand
from selfaffine.errors import NotPlanar, SpecFormatError
from selfaffine.files import (SystemSpec, cached_neighbor_set, export_graph, load_fixture, load_neighbors,
                              parse_spec, read_ppm, render, render_array, serialize_spec, store_neighbors,
                              system_key, verdict_to_records)
from selfaffine.neighbor_set import compute
from selfaffine.report import ReportConfig, report_json, run_report
from selfaffine.simplicity import decide

FIXTURE_DIGITS = {
    "d1": [[0, 0], [0, 1], [0, 2], [1, 2], [1, 3], [2, 0], [2, 1]],
}


def test_fixtures_parse(example):
    for name in ("d1", "d2", "d3"):
        spec = load_fixture(name)
        assert spec.matrix == [[3, 0], [0, 4]]
        assert len(spec.digits) == 7
    assert load_fixture("d1").digits == FIXTURE_DIGITS["d1"]


@pytest.mark.parametrize("text, fragment", [
    ('{"matrix": [[2]], "digits": []}', "digits"),
    ('{"matrix": [[2, 0]], "digits": [[0, 0]]}', "not square"),
    ('{"matrix": [[2]], "digits": [[0], [1, 1]]}', "digits[1]"),
    ('{"matrix": [[2]], "digits": [[0], [0.5]]}', "digits[1][0]"),
    ('{"matrix": [[2]]}', "missing field 'digits'"),
    ('{"matrix": [[2]], "digits": [[0]], "colour": 1}', "unknown field"),
    ('{"matrix": [[2]], "digits": [[0]], "limits": {"max_rounds": 0}}', "limits.max_rounds"),
    ('{"matrix": [[2]],\n "digits": [[0]]\n "label": "x"}', ":3:"),
])
def test_parse_errors(tmp_path, text, fragment):
    p = tmp_path / "bad.json"
    p.write_text(text)
    with pytest.raises(SpecFormatError) as err:
        parse_spec(p)
    assert fragment in str(err.value)


small_int = st.integers(-5, 5)


@settings(max_examples=60, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(
    d=st.integers(1, 3),
    data=st.data(),
)
def test_round_trip(tmp_path, d, data):
    matrix = data.draw(st.lists(st.lists(small_int, min_size=d, max_size=d), min_size=d, max_size=d))
    digits = data.draw(st.lists(st.lists(small_int, min_size=d, max_size=d), min_size=1, max_size=5))
    label = data.draw(st.one_of(st.none(), st.text(max_size=8)))
    limits = data.draw(st.one_of(st.none(), st.fixed_dictionaries({"max_rounds": st.integers(1, 99)})))
    spec = SystemSpec(matrix, digits, label, data.draw(st.booleans()), limits)
    p = tmp_path / "spec.json"
    p.write_text(serialize_spec(spec))
    assert parse_spec(p) == spec


def test_cache_round_trip(tmp_path, example):
    s = example["d2"]
    ns = cached_neighbor_set(s, "K", tmp_path)
    files = list(tmp_path.iterdir())
    assert len(files) == 1 and files[0].name == system_key(s) + ".json"
    again = load_neighbors(s, tmp_path)
    assert again.vectors == compute(s).vectors == ns.vectors
    # keys separate systems and modes
    assert system_key(s, "K") != system_key(s, "box") != system_key(example["d3"], "K")


def test_cache_rejects_corrupt_entries(tmp_path, example):
    s = example["d1"]
    ns = compute(s)
    path = store_neighbors(ns, tmp_path)
    record = json.loads(path.read_text())
    record["vectors"] = [[0, 0], [5, 5]]
    path.write_text(json.dumps(record))
    assert load_neighbors(s, tmp_path) is None
    assert cached_neighbor_set(s, "K", tmp_path).vectors == ns.vectors
    path.write_text("{ not json")
    assert load_neighbors(s, tmp_path) is None


def test_cache_env_override(tmp_path, monkeypatch, example):
    monkeypatch.setenv("SELFAFFINE_CACHE_DIR", str(tmp_path / "env"))
    cached_neighbor_set(example["d1"])
    assert len(list((tmp_path / "env").iterdir())) == 1


def test_cache_stores_transition_table(tmp_path, example):
    s = example["d3"]
    ns = compute(s)
    path = store_neighbors(ns, tmp_path, decide(s, ns))
    table = json.loads(path.read_text())["simplicity"]
    assert table["status"] == "Simple" and len(table["types"]) == len(table["transitions"])


def test_graph_export(tmp_path, neighbors):
    ns = neighbors["cantor"]
    t = expand(ns.system, ns, 3)
    export_graph(t, "records", tmp_path / "g.jsonl")
    rows = [json.loads(line) for line in (tmp_path / "g.jsonl").read_text().splitlines()]
    assert sum(r["kind"] == "vertex" for r in rows) == 15
    assert not any(r["kind"] == "edge" for r in rows)
    export_graph(t, "dot", tmp_path / "g.dot")
    dot = (tmp_path / "g.dot").read_text()
    assert dot.startswith("graph") and "dashed" not in dot
    nd = neighbors["dyadic"]
    export_graph(expand(nd.system, nd, 3), "dot", tmp_path / "p.dot")
    assert (tmp_path / "p.dot").read_text().count("dashed") == 1 + 3 + 7
    with pytest.raises(ValueError):
        export_graph(t, "gml", tmp_path / "g.gml")


def test_certificate_records(neighbors):
    ns = neighbors["d1"]
    rows = [json.loads(x) for x in verdict_to_records(decide(ns.system, ns)).splitlines()]
    assert rows[0]["kind"] == "verdict" and rows[0]["status"] == "Simple"
    assert sum(r["kind"] == "type" for r in rows) == 2


def test_render_counts_and_determinism(tmp_path, example):
    img = render(example["d1"], 4, 81, 256, tmp_path / "a.ppm")
    assert int(img.sum()) == 7 ** 4
    render(example["d1"], 4, 81, 256, tmp_path / "b.ppm")
    assert (tmp_path / "a.ppm").read_bytes() == (tmp_path / "b.ppm").read_bytes()
    assert np.array_equal(read_ppm(tmp_path / "a.ppm"), img)
    assert (tmp_path / "a.ppm").read_bytes().startswith(b"P6\n81 256\n255\n")


def test_render_level_zero_is_full_box(example):
    assert render_array(example["d1"], 0, 30, 20).all()


def test_render_examples_differ(example):
    a = render_array(example["d1"], 4, 81, 256)
    b = render_array(example["d2"], 4, 81, 256)
    assert not np.array_equal(a, b)


def test_render_general_matrix_and_errors(example):
    s = validate_system([[1, -1], [1, 1]], [[0, 0], [1, 0]])
    img = render_array(s, 10, 64, 64)
    assert 0 < img.sum() <= 2 ** 10
    with pytest.raises(NotPlanar):
        render_array(validate_system([[3]], [[0], [2]]), 2, 10, 10)


def test_report_determinism_and_content():
    specs = [load_fixture("d1"), load_fixture("d2")]
    cfg = ReportConfig(depth=3, seed=4)
    a, b = report_json(run_report(specs, cfg)), report_json(run_report(specs, cfg))
    assert a == b
    rep = json.loads(a)
    assert rep["equivalence"][0]["w_equivalent"]["value"] == "Yes"

    def claims(node):
        if isinstance(node, dict):
            if "evidence" in node and "value" in node:
                yield node
            for v in node.values():
                yield from claims(v)
        elif isinstance(node, list):
            for v in node:
                yield from claims(v)

    kinds = {c["evidence"] for c in claims(rep)}
    assert kinds <= {"certificate", "empirical", "theorem-citation"}
    assert kinds == {"certificate", "empirical", "theorem-citation"}
    for c in claims(rep):
        if c["evidence"] == "theorem-citation":
            assert c.get("theorem")


def _run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_commands(tmp_path, capsys):
    fx = Path(cli.__file__).parent / "fixtures"
    d1, d3 = str(fx / "d1.json"), str(fx / "d3.json")
    code, out, _ = _run(["validate", d1], capsys)
    assert code == 0 and json.loads(out)["q"] == 12
    code, out, _ = _run(["neighbors", d1, "--cache-dir", str(tmp_path / "c")], capsys)
    assert json.loads(out)["size"] == 3
    code, out, _ = _run(["simplicity", d3, "--export", str(tmp_path / "t.jsonl")], capsys)
    assert json.loads(out)["status"] == "Simple" and (tmp_path / "t.jsonl").exists()
    code, out, _ = _run(["simplicity", d3, "--limits", "max_rounds=2"], capsys)
    assert json.loads(out)["status"] == "Inconclusive"
    code, out, _ = _run(["dimension", d3], capsys)
    assert json.loads(out)["hausdorff_dim"] == pytest.approx(1.5964, abs=1e-4)
    code, out, _ = _run(["equiv", d1, d3], capsys)
    rep = json.loads(out)
    assert rep["w_equivalent"] == "Yes" and rep["euclidean_lipschitz"] == "No"
    code, _, err = _run(["render", d1, "--depth", "3", "--size", "27x64", "-o", str(tmp_path / "x.ppm")], capsys)
    assert code == 0 and "343 filled" in err
    code, _, _ = _run(["graph", d1, "--depth", "2", "--format", "records", "-o", str(tmp_path / "g.jsonl")], capsys)
    assert code == 0
    code, _, _ = _run(["report", d1, d3, "--depth", "2", "-o", str(tmp_path / "r.json")], capsys)
    assert code == 0 and json.loads((tmp_path / "r.json").read_text())["format"] == "selfaffine.report/1"


def test_cli_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"matrix": [[1, 1], [0, 2]], "digits": [[0, 0]]}')
    code, _, err = _run(["validate", str(bad)], capsys)
    assert code == 1 and "NotExpanding" in err
    code, _, err = _run(["render", str(bad)], capsys)
    assert code == 2
    with pytest.raises(SystemExit):
        cli.main(["simplicity", str(bad), "--limits", "speed=3"])
