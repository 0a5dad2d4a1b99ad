import json

import pytest

from cdgalab.cli import main


def write(tmp_path, doc, name="problem.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def torus_problem(upto=2):
    return {
        "version": "1",
        "task": "cohomology",
        "algebras": {
            "T": {
                "type": "free",
                "generators": [["t1", 1], ["t2", 1]],
                "differential": {},
                "cutoff": 3,
            }
        },
        "task_args": {"algebra": "T", "upto": upto},
    }


def run_cli(capsys, args):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_torus_cohomology_task(tmp_path, capsys):
    path = write(tmp_path, torus_problem())
    code, out, _ = run_cli(capsys, [path, "--format", "machine"])
    assert code == 0
    report = json.loads(out)
    assert report["result"]["dims"] == [1, 2, 1]
    prods = report["result"]["nonzero_products"]
    assert any(a == [1, 0] and b == [1, 1] for a, b, _ in prods)


def test_minimal_model_task_cp2(tmp_path, capsys):
    doc = {
        "version": "1",
        "task": "minimal-model",
        "algebras": {"A": {"type": "power-quotient", "degree": 2, "power": 3, "cutoff": 7}},
        "task_args": {"target": "A", "upto": 6},
    }
    code, out, _ = run_cli(capsys, [write(tmp_path, doc), "--format", "machine"])
    assert code == 0
    report = json.loads(out)
    gens = report["result"]["generators"]
    assert sorted(d for _, d in gens) == [2, 5]
    dy = report["result"]["differentials"][gens[1][0] if gens[1][1] == 5 else gens[0][0]]
    assert "^3" in dy
    assert report["result"]["model"]["type"] == "free"


def test_malformed_file_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, _, err = run_cli(capsys, [str(p)])
    assert code == 2
    assert "input error" in err


def test_missing_reference_exit_2(tmp_path, capsys):
    doc = torus_problem()
    doc["task_args"]["algebra"] = "nope"
    code, _, err = run_cli(capsys, [write(tmp_path, doc)])
    assert code == 2


def test_decimal_literals_rejected(tmp_path, capsys):
    doc = {
        "version": "1",
        "task": "cohomology",
        "algebras": {
            "T": {
                "type": "free",
                "generators": [["x", 2], ["y", 3]],
                "differential": {"y": [[1.5, {"x": 2}]]},
                "cutoff": 4,
            }
        },
        "task_args": {"algebra": "T", "upto": 3},
    }
    code, _, err = run_cli(capsys, [write(tmp_path, doc)])
    assert code == 2
    assert "rational" in err


def test_loop_model_task(tmp_path, capsys):
    doc = {
        "version": "1",
        "task": "loop-model",
        "algebras": {
            "CP1": {
                "type": "free",
                "generators": [["x", 2], ["y", 3]],
                "differential": {"y": [["1", {"x": 2}]]},
                "cutoff": 6,
            }
        },
        "task_args": {"model": "CP1", "upto": 4},
    }
    code, out, _ = run_cli(capsys, [write(tmp_path, doc), "--format", "machine"])
    assert code == 0
    report = json.loads(out)
    assert report["result"]["cohomology_dims"] == [1, 1, 1, 1, 1]
    degs = sorted(d for _, d in report["result"]["generators"])
    assert degs == [1, 2, 2, 3]


def test_glue_task_circle_with_verify(tmp_path, capsys):
    doc = {
        "version": "1",
        "task": "glue",
        "algebras": {
            "I": {"type": "simplex-forms", "dim": 1, "total_degree": 2, "cutoff": 5},
            "P": {"type": "point", "cutoff": 5},
            "QQ": {"type": "product", "factors": ["P", "P"], "cutoff": 5},
        },
        "morphisms": {
            "ev": {
                "source": "I",
                "target": "QQ",
                "matrices": {"0": [["1", "0", "0"], ["1", "1", "1"]]},
            },
            "diag": {"source": "P", "target": "QQ", "matrices": {"0": [["1"], ["1"]]}},
        },
        "task_args": {"f": "ev", "g": "diag", "upto": 4},
    }
    code, out, _ = run_cli(capsys, [write(tmp_path, doc), "--format", "machine", "--verify"])
    assert code == 0
    report = json.loads(out)
    assert report["result"]["cohomology_dims"] == [1, 1, 0, 0]
    assert report["verify"]["exact"] is True
    assert report["verify"]["connecting_ranks"][0] == 1


def test_suspend_task_and_roundtrip(tmp_path, capsys):
    doc = {
        "version": "1",
        "task": "suspend",
        "algebras": {"S2": {"type": "power-quotient", "degree": 2, "power": 2, "cutoff": 6}},
        "task_args": {"model": "S2", "upto": 5},
    }
    code, out, _ = run_cli(capsys, [write(tmp_path, doc), "--format", "machine"])
    assert code == 0
    report = json.loads(out)
    assert report["result"]["cohomology_dims"] == [1, 0, 0, 1, 0]
    assert report["result"]["positive_products_vanish"] is True
    # round-trip: the emitted algebra must re-ingest and recompute
    emitted = report["result"]["algebra"]
    doc2 = {
        "version": "1",
        "task": "cohomology",
        "algebras": {"X": emitted},
        "task_args": {"algebra": "X", "upto": 4},
    }
    code2, out2, _ = run_cli(capsys, [write(tmp_path, doc2, "again.json"), "--format", "machine"])
    assert code2 == 0
    report2 = json.loads(out2)
    assert report2["result"]["dims"] == [1, 0, 0, 1, 0]


def test_gamma_task_forms_system(tmp_path, capsys):
    doc = {
        "version": "1",
        "task": "gamma",
        "complexes": {"K": {"vertices": [0, 1, 2], "maximal": [[0, 1], [1, 2], [0, 2]]}},
        "systems": {"E": {"type": "forms", "base": "K", "total_degree": 2, "cutoff": 3}},
        "task_args": {"system": "E", "upto": 2},
    }
    code, out, _ = run_cli(capsys, [write(tmp_path, doc), "--format", "machine"])
    assert code == 0
    report = json.loads(out)
    assert report["result"]["cohomology_dims"] == [1, 1]


def test_ss_task_with_verify(tmp_path, capsys):
    doc = {
        "version": "1",
        "task": "ss",
        "complexes": {"K": {"vertices": [0, 1, 2], "maximal": [[0, 1], [1, 2], [0, 2]]}},
        "systems": {"E": {"type": "forms", "base": "K", "total_degree": 2, "cutoff": 4}},
        "task_args": {"system": "E", "p_max": 1, "q_max": 1},
    }
    code, out, _ = run_cli(capsys, [write(tmp_path, doc), "--format", "machine", "--verify"])
    assert code == 0
    report = json.loads(out)
    assert report["result"]["E2"]["0,0"] == 1
    assert report["result"]["E2"]["1,0"] == 1
    assert report["verify"]["e2_matches_local_coefficients"] is True
    assert report["verify"]["einfty_matches_target"] is True


def test_explicit_system_ingestion(tmp_path, capsys):
    # constant Q-fiber system over an edge via explicit tables
    doc = {
        "version": "1",
        "task": "gamma",
        "algebras": {"P": {"type": "point", "cutoff": 3}},
        "complexes": {"K": {"vertices": [0, 1], "maximal": [[0, 1]]}},
        "systems": {
            "E": {
                "type": "explicit",
                "base": "K",
                "fibers": {"0": "P", "1": "P", "0,1": "P"},
                "restrictions": {
                    "0,1|0": {"source": "P", "target": "P", "matrices": {"0": [["1"]]}},
                    "0,1|1": {"source": "P", "target": "P", "matrices": {"0": [["1"]]}},
                },
            }
        },
        "task_args": {"system": "E", "upto": 2},
    }
    code, out, _ = run_cli(capsys, [write(tmp_path, doc), "--format", "machine"])
    assert code == 0
    report = json.loads(out)
    assert report["result"]["dims"][0] == 1


def test_check_admissible_task(tmp_path, capsys):
    doc = {
        "version": "1",
        "task": "check-admissible",
        "task_args": {"n_max": 2, "samples": 5, "seed": 1},
    }
    code, out, _ = run_cli(capsys, [write(tmp_path, doc), "--format", "machine"])
    assert code == 0
    report = json.loads(out)
    assert report["result"]["acyclicity"] is True
    assert report["result"]["failures"] == []


def test_subcommand_overrides_task_field(tmp_path, capsys):
    doc = torus_problem()
    doc["task"] = "gamma"  # wrong on purpose; subcommand wins
    path = write(tmp_path, doc)
    code, out, _ = run_cli(capsys, ["cohomology", path, "--format", "machine"])
    assert code == 0
    assert json.loads(out)["task"] == "cohomology"


def test_machine_output_deterministic(tmp_path, capsys):
    path = write(tmp_path, torus_problem())
    _, out1, _ = run_cli(capsys, [path, "--format", "machine"])
    _, out2, _ = run_cli(capsys, [path, "--format", "machine"])
    assert out1 == out2


def test_upto_flag_overrides(tmp_path, capsys):
    path = write(tmp_path, torus_problem(upto=2))
    code, out, _ = run_cli(capsys, [path, "--format", "machine", "--upto", "1"])
    assert code == 0
    assert json.loads(out)["result"]["dims"] == [1, 2]


def test_cutoff_flag_fills_missing_cutoff(tmp_path, capsys):
    doc = torus_problem()
    del doc["algebras"]["T"]["cutoff"]
    path = write(tmp_path, doc)
    code, _, err = run_cli(capsys, [path])
    assert code == 2  # no cutoff anywhere
    code, out, _ = run_cli(capsys, [path, "--cutoff", "3", "--format", "machine"])
    assert code == 0
    assert json.loads(out)["result"]["dims"] == [1, 2, 1]


def test_ss_verify_mismatch_exits_1(tmp_path, capsys):
    # a literal constant system is not thickened by base forms, so the
    # second-page comparison genuinely fails: exit code 1
    doc = {
        "version": "1",
        "task": "ss",
        "algebras": {"P": {"type": "point", "cutoff": 4}},
        "complexes": {"K": {"vertices": [0, 1, 2], "maximal": [[0, 1], [1, 2], [0, 2]]}},
        "systems": {
            "E": {
                "type": "explicit",
                "base": "K",
                "fibers": {
                    "0": "P", "1": "P", "2": "P",
                    "0,1": "P", "1,2": "P", "0,2": "P",
                },
                "restrictions": {
                    f"{a},{b}|{i}": {"source": "P", "target": "P", "matrices": {"0": [["1"]]}}
                    for (a, b) in [(0, 1), (1, 2), (0, 2)]
                    for i in (0, 1)
                },
            }
        },
        "task_args": {"system": "E", "p_max": 1, "q_max": 1},
    }
    code, out, _ = run_cli(capsys, [write(tmp_path, doc), "--format", "machine", "--verify"])
    assert code == 1
    report = json.loads(out)
    assert report["verify"]["e2_matches_local_coefficients"] is False
