import csv
import io
import json
from importlib import resources

import jsonschema
import pytest

from cohalab.cli import main
from cohalab.commvar import CountPolynomial
from cohalab.hallalg import ModuleClassTable
from cohalab.mcgroupoid import GroupoidCard
from cohalab.schemas import load_schema, outputs_schema_name
from cohalab.series import LaurentBiSeries, feit_fine_series


def run(tmp_path, *argv, name="out.json"):
    path = tmp_path / name
    code = main([*argv, "--output", str(path)])
    text = path.read_text()
    return code, text


def record(tmp_path, *argv):
    code, text = run(tmp_path, *argv)
    rec = json.loads(text)
    assert rec["exit_code"] == code
    validate(rec)
    return rec


def validate(rec):
    jsonschema.validate(rec, load_schema("record"))
    if "outputs" in rec:
        jsonschema.validate(rec["outputs"], load_schema(outputs_schema_name(rec["command"])))


def test_commvar_count_example(tmp_path):
    rec = record(tmp_path, "commvar", "count", "--variety", "commuting", "--n", "1", "--p", "2")
    assert rec["outputs"] == {"count": 4}
    assert rec["inputs"]["p"] == 2 and rec["version"]


def test_pbw_affine_matches_feitfine(tmp_path):
    a = record(tmp_path, "series", "pbw", "--betti", "0,0,0,0,1", "--N", "2", "--K", "3")
    b = record(tmp_path, "series", "feitfine", "--N", "2", "--K", "3")
    assert a["outputs"]["series"] == b["outputs"]["series"]
    assert LaurentBiSeries.from_json(a["outputs"]["series"]) == feit_fine_series(2, 3)


def test_feitfine_eval_at(tmp_path):
    rec = record(tmp_path, "series", "feitfine", "--N", "2", "--K", "2", "--eval-at", "2")
    v = rec["outputs"]["values"][2]
    assert (v["numerator"], v["denominator"]) == (44, 3)


def test_hall_assoc_example(tmp_path):
    rec = record(tmp_path, "hall", "assoc", "--lmax", "3", "--p", "2")
    assert rec["exit_code"] == 0
    assert rec["outputs"]["violations"] == []


def test_hall_product_and_table(tmp_path):
    rec = record(tmp_path, "hall", "product", "--lhs", "n1-0", "--rhs", "n1-0")
    assert sum(r["numerator"] for r in rec["outputs"]["product"]) == 6
    rec = record(tmp_path, "hall", "table", "--nmax", "2", "--p", "2")
    t = ModuleClassTable.from_json(rec["outputs"])
    assert [len(t.by_length[n]) for n in range(3)] == [1, 4, 28]


def test_power_structure(tmp_path):
    rec = record(tmp_path, "series", "power-structure", "--q", "2", "--N", "2")
    assert rec["outputs"]["equal"] is True


def test_interpolate_round_trip(tmp_path):
    rec = record(tmp_path, "commvar", "interpolate", "--variety", "nilcommuting", "--n", "2", "--degree", "5")
    assert CountPolynomial.from_json(rec["outputs"]).coefficients == (0, -1, 1, 1)


def test_mc_commands(tmp_path):
    rec = record(tmp_path, "mc", "card", "--catalog-entry", "ad-action")
    assert GroupoidCard.from_json(rec["outputs"]["card"]).orbit_count == 9
    rec = record(tmp_path, "mc", "compare", "--lhs", "abelian-zero-d", "--rhs", "abelian-acyclic-summand")
    assert rec["exit_code"] == 0
    rec = record(tmp_path, "mc", "fibration", "--catalog-entry", "split-extension")
    assert rec["outputs"]["pinned_sign"] == 1


# ------------------------------------------------------------ exit codes

def test_precondition_exit_code(tmp_path):
    rec = record(tmp_path, "commvar", "count", "--variety", "commuting", "--n", "1", "--p", "6")
    assert rec["exit_code"] == 2
    assert rec["error"]["type"] == "PreconditionError"
    assert "outputs" not in rec


def test_infeasible_exit_code(tmp_path):
    rec = record(tmp_path, "commvar", "count", "--variety", "commuting", "--n", "2", "--p", "11",
                 "--method", "brute")
    assert rec["exit_code"] == 4
    assert rec["error"]["type"] == "InfeasibleError"


def test_expectation_exit_code(tmp_path):
    data = json.loads(resources.files("cohalab.data").joinpath("mc_catalog.json").read_text())
    for e in data["entries"]:
        if e["id"] == "zero":
            e["expected"]["orbit_count"] = 2
    bad = tmp_path / "catalog.json"
    bad.write_text(json.dumps(data))
    rec = record(tmp_path, "mc", "card", "--catalog-entry", "zero", "--catalog", str(bad))
    assert rec["exit_code"] == 3
    assert rec["outputs"]["matches_expected"] is False


def test_unknown_catalog_entry(tmp_path):
    rec = record(tmp_path, "mc", "card", "--catalog-entry", "nope")
    assert rec["exit_code"] == 2


def test_interpolation_with_low_degree_is_a_finding(tmp_path):
    rec = record(tmp_path, "commvar", "interpolate", "--variety", "commuting", "--n", "2", "--degree", "4")
    assert rec["exit_code"] == 3


# ------------------------------------------------------------ determinism and formats

@pytest.mark.parametrize("argv", [
    ("hall", "commutators", "--lmax", "2", "--p", "2"),
    ("series", "feitfine", "--N", "3", "--K", "2"),
    ("mc", "card", "--catalog-entry", "nonabelian-acyclic"),
])
def test_deterministic_payload(tmp_path, argv):
    a = record(tmp_path, *argv)
    b = record(tmp_path, *argv)
    a.pop("wall_time"), b.pop("wall_time")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_csv_for_flat_table(tmp_path):
    code, text = run(tmp_path, "hall", "table", "--nmax", "2", "--p", "2", "--format", "csv", name="t.csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert set(rows[0]) == {"sub", "quotient", "middle", "count"}
    assert sum(int(r["count"]) for r in rows if r["sub"] == "n1-0" and r["quotient"] == "n1-0") == 6


def test_csv_refused_for_nested_record(tmp_path):
    code, text = run(tmp_path, "series", "feitfine", "--N", "1", "--K", "1", "--format", "csv")
    assert code == 2
    assert json.loads(text)["error"]["type"] == "PreconditionError"


def test_stdout_when_no_output_path(capsys):
    assert main(["commvar", "count", "--variety", "nilcommuting", "--n", "2", "--p", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["outputs"]["count"] == 10
