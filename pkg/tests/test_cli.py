"""End-to-end CLI tests: every subcommand runs in-process against a
temporary directory, and output files are parsed back and checked
against library-level recomputations or hand-derived values."""

import json
import math

import numpy as np
import pytest

import rotspec.cli as cli
from rotspec.approx import ConvergenceRow, ConvergenceTable
from rotspec.cli import dumps_17g, main
from rotspec.errors import ConvergenceFailure, InvalidInput
from rotspec.matmodel import OperatorSpec

GOLDEN = "surd:(-1+1*sqrt(5))/2"
U2V_JSON = '{"canonical": {"a+": [1,0], "a-": [0,0], "b+": [2,0], "b-": [0,0]}}'


class TestDumps17g:
    def test_floats_round_trip(self):
        for x in (0.1, 1 / 3, math.pi, 1e-300, 6.02214076e23, -0.0, 4.0):
            assert float(dumps_17g(x)) == x
        assert dumps_17g(0.1) == "0.10000000000000001"
        assert dumps_17g(np.float64(0.1)) == "0.10000000000000001"

    def test_scalars(self):
        assert dumps_17g(True) == "true"
        assert dumps_17g(None) == "null"
        assert dumps_17g(5) == "5"
        assert dumps_17g(np.int32(7)) == "7"
        assert dumps_17g('say "hi"') == json.dumps('say "hi"')

    def test_nested_document_parses(self):
        doc = {"a": [1.5, {"b": None, "ok": False}], "c": "x", "n": 3}
        assert json.loads(dumps_17g(doc)) == doc

    def test_empty_containers(self):
        assert dumps_17g({}) == "{}"
        assert dumps_17g([]) == "[]"

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidInput):
            dumps_17g(math.nan)
        with pytest.raises(InvalidInput):
            dumps_17g({"x": math.inf})

    def test_unsupported_type(self):
        with pytest.raises(TypeError):
            dumps_17g({"x": {1, 2}})


class TestExpand:
    def test_golden_table(self, capsys):
        assert main(["expand", "--theta", GOLDEN, "--terms", "6"]) == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert "# theta = surd:(-1+1*sqrt(5))/2" in out
        assert "# periodic_part = (0, 1)" in out
        header = out.index("k,a_k,p_k,q_k,gap,bound")
        rows = out[header + 1:]
        assert len(rows) == 7  # k = 0..6
        assert rows[1] == "1,1,1,1,0.38196601125010515,0.5"
        assert rows[4] == "4,1,3,5,0.018033988749894848,0.025000000000000001"
        qs = [int(r.split(",")[3]) for r in rows]
        assert qs == [1, 1, 2, 3, 5, 8, 13]  # Fibonacci denominators
        for r in rows:  # strict gap < bound for irrational theta
            gap, bound = map(float, r.split(",")[4:6])
            assert 0 < gap < bound

    def test_rational_terminates_with_equality_row(self, capsys):
        assert main(["expand", "--theta", "rational:7/10"]) == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert "# terminating expansion: theta is rational" in out
        assert out[-1] == "3,3,7,10,0,-"
        k2 = out[-2].split(",")
        assert k2[4] == k2[5] == "0.033333333333333333"  # gap == bound == 1/30

    def test_validation_and_exit_codes(self, capsys):
        assert main(["expand", "--terms", "5"]) == 2  # no theta anywhere
        assert "usage error" in capsys.readouterr().err
        assert main(["expand", "--theta", GOLDEN, "--terms", "0"]) == 2
        capsys.readouterr()
        assert main(["expand", "--theta", "rational:0/1"]) == 3  # outside (0,1)
        assert "error:" in capsys.readouterr().err

    def test_decimal_budget(self, capsys):
        # ten digits certify 22 golden quotients: 8 works, 25 does not
        assert main(["expand", "--theta", "decimal:0.6180339887", "--terms", "8"]) == 0
        capsys.readouterr()
        assert main(["expand", "--theta", "decimal:0.6180339887", "--terms", "25"]) == 3
        assert "certifies only" in capsys.readouterr().err

    def test_uncertifiable_decimal(self, capsys):
        assert main(["expand", "--theta", "decimal:0.5"]) == 3
        capsys.readouterr()


class TestSpectrum:
    def test_writes_cloud_and_certificate(self, tmp_path, capsys):
        code = main(["spectrum", "--theta", GOLDEN, "--level", "3",
                     "--out-dir", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "spectrum: n=3 q_pair=(2, 3) points=5" in out
        csv = (tmp_path / "spectrum_cloud.csv").read_text()
        assert csv.startswith("re,im\n")
        assert len(csv.strip().splitlines()) == 6  # header + q_2 + q_3 points
        doc = json.loads((tmp_path / "spectrum_certificate.json").read_text())
        assert doc["q_pair"] == [2, 3]
        assert doc["epsilon_sharp"] == 55.91143287610732
        assert doc["mode"] == "normal_hausdorff"
        assert len(doc["cloud"]) == 5

    def test_format_selection(self, tmp_path, capsys):
        main(["spectrum", "--theta", GOLDEN, "--level", "3",
              "--out-dir", str(tmp_path), "--format", "csv"])
        capsys.readouterr()
        assert (tmp_path / "spectrum_cloud.csv").exists()
        assert not (tmp_path / "spectrum_certificate.json").exists()

    def test_error_exit_codes(self, tmp_path, capsys):
        base = ["spectrum", "--out-dir", str(tmp_path)]
        assert main(base + ["--theta", "rational:1/3"]) == 3
        assert main(base + ["--theta", GOLDEN, "--level", "12", "--max-q", "100"]) == 3
        assert main(base + ["--theta", GOLDEN, "--spec",
                            '{"terms": [{"u": 1, "v": 1, "re": 1, "im": 0}]}']) == 3
        assert main(base + ["--theta", GOLDEN, "--spec", U2V_JSON]) == 3
        capsys.readouterr()


class TestPseudospectrum:
    ARGS = ["pseudospectrum", "--theta", GOLDEN, "--level", "2",
            "--epsilon", "1.0", "--region", "-6", "6", "-6", "6",
            "--resolution", "10", "8"]

    def test_writes_grids_report_and_pgm(self, tmp_path, capsys):
        code = main(self.ARGS + ["--out-dir", str(tmp_path),
                                 "--format", "csv", "--format", "json",
                                 "--format", "pgm"])
        assert code == 0
        out = capsys.readouterr().out
        assert "certified=True" in out
        assert "rate=O(1/q_{n-1} + 1/q_n)" in out
        for name in ("grid_prev.csv", "grid_curr.csv", "grid_prev.pgm",
                     "grid_curr.pgm", "sandwich_report.json"):
            assert (tmp_path / name).exists()
        assert (tmp_path / "grid_prev.csv").read_text().startswith("re,im,sigma_min\n")
        pgm = (tmp_path / "grid_prev.pgm").read_bytes()
        assert pgm.startswith(b"P5\n10 8\n65535\n")
        assert len(pgm) == len(b"P5\n10 8\n65535\n") + 10 * 8 * 2
        doc = json.loads((tmp_path / "sandwich_report.json").read_text())
        assert doc["certified"] is True
        assert doc["inclusion_verified"] is True
        assert doc["epsilon"] == 1.0
        assert doc["q_pair"] == [1, 2]

    def test_jobs_do_not_change_output_bytes(self, tmp_path, capsys):
        for jobs, sub in ((1, "a"), (4, "b")):
            main(self.ARGS + ["--out-dir", str(tmp_path / sub), "--jobs", str(jobs),
                              "--format", "csv"])
        capsys.readouterr()
        for name in ("grid_prev.csv", "grid_curr.csv"):
            assert (tmp_path / "a" / name).read_bytes() == \
                (tmp_path / "b" / name).read_bytes()

    def test_epsilon_validation(self, tmp_path, capsys):
        base = ["pseudospectrum", "--theta", GOLDEN, "--out-dir", str(tmp_path)]
        assert main(base) == 2  # epsilon required
        assert main(base + ["--epsilon", "0"]) == 2
        assert main(base + ["--epsilon", "-1"]) == 2
        capsys.readouterr()


class TestButterfly:
    def test_row_counts(self, tmp_path, capsys):
        code = main(["butterfly", "--q-max", "6", "--out-dir", str(tmp_path)])
        assert code == 0
        assert "butterfly: q_max=6 fractions=12 rows=49" in capsys.readouterr().out
        lines = (tmp_path / "butterfly.csv").read_text().strip().splitlines()
        assert lines[0] == "p,q,eigenvalue"
        assert len(lines) == 50
        doc = json.loads((tmp_path / "butterfly_summary.json").read_text())
        assert doc["fractions"] == 12 and doc["rows"] == 49

    def test_degenerate_q1(self, tmp_path, capsys):
        main(["butterfly", "--q-max", "1", "--out-dir", str(tmp_path)])
        capsys.readouterr()
        assert (tmp_path / "butterfly.csv").read_text() == "p,q,eigenvalue\n0,1,4\n"

    def test_qmax2_eigenvalues(self, tmp_path, capsys):
        main(["butterfly", "--q-max", "2", "--out-dir", str(tmp_path)])
        capsys.readouterr()
        lines = (tmp_path / "butterfly.csv").read_text().strip().splitlines()
        assert len(lines) == 4  # header + 1 + 2
        half = [float(r.split(",")[2]) for r in lines if r.startswith("1,2,")]
        assert half == pytest.approx([-2 * math.sqrt(2), 2 * math.sqrt(2)], abs=1e-14)

    def test_rejects_nonhermitian_spec(self, tmp_path, capsys):
        code = main(["butterfly", "--q-max", "3", "--out-dir", str(tmp_path),
                     "--spec", '{"terms": [{"u": 1, "v": 0, "re": 1, "im": 0}]}'])
        assert code == 3
        assert "hermitian" in capsys.readouterr().err

    def test_qmax_validation(self, tmp_path, capsys):
        assert main(["butterfly", "--q-max", "0", "--out-dir", str(tmp_path)]) == 2
        capsys.readouterr()


class TestOnesided:
    def test_cloud_kind(self, tmp_path, capsys):
        code = main(["onesided", "--theta", GOLDEN, "--n-list", "10,50",
                     "--out-dir", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "onesided: n=10 p=6 radius=34.949266426002588 kind=cloud" in out
        for n, count in ((10, 10), (50, 50)):
            lines = (tmp_path / f"onesided_n{n}.csv").read_text().strip().splitlines()
            assert lines[0] == "re,im" and len(lines) == count + 1
        doc = json.loads((tmp_path / "onesided_summary.json").read_text())
        certs = doc["certificates"]
        assert [c["n"] for c in certs] == [10, 50]
        assert [c["p"] for c in certs] == [6, 31]
        assert certs[0]["radius"] == 34.94926642600259
        assert certs[1]["radius"] == 15.629787098458582
        assert all(c["kind"] == "cloud" for c in certs)

    def test_grid_kind_for_nonnormal_model(self, tmp_path, capsys):
        code = main(["onesided", "--theta", GOLDEN, "--n-list", "5",
                     "--spec", U2V_JSON, "--resolution", "6", "6",
                     "--region", "-4", "4", "-4", "4",
                     "--out-dir", str(tmp_path), "--format", "csv",
                     "--format", "json", "--format", "pgm"])
        assert code == 0
        assert "kind=grid" in capsys.readouterr().out
        assert (tmp_path / "onesided_n5.csv").read_text().startswith("re,im,sigma_min\n")
        assert (tmp_path / "onesided_n5.pgm").read_bytes().startswith(b"P5\n6 6\n")
        doc = json.loads((tmp_path / "onesided_summary.json").read_text())
        assert doc["certificates"][0]["kind"] == "grid"
        assert doc["certificates"][0]["resolution"] == [6, 6]

    def test_n_list_validation(self, tmp_path, capsys):
        base = ["onesided", "--theta", GOLDEN, "--out-dir", str(tmp_path)]
        assert main(base) == 2
        assert main(base + ["--n-list", ","]) == 2
        capsys.readouterr()


class TestConverge:
    def test_ladder_passes(self, tmp_path, capsys):
        code = main(["converge", "--theta", GOLDEN, "--n-range", "3:6",
                     "--out-dir", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert out.count("ok=True") == 4
        lines = (tmp_path / "convergence.csv").read_text().strip().splitlines()
        assert lines[0] == "n,q_prev,q_n,epsilon_sharp,epsilon_clean,empirical_dH"
        assert len(lines) == 5
        doc = json.loads((tmp_path / "convergence.json").read_text())
        assert doc["all_verified"] is True
        assert doc["reference_n"] == 6
        assert [r["n"] for r in doc["rows"]] == [3, 4, 5, 6]
        assert doc["rows"][-1]["empirical_dH"] == 0.0

    def test_range_validation(self, tmp_path, capsys):
        base = ["converge", "--theta", GOLDEN, "--out-dir", str(tmp_path)]
        assert main(base) == 2
        assert main(base + ["--n-range", "3-6"]) == 2
        assert main(base + ["--n-range", "6:3"]) == 2
        capsys.readouterr()

    def test_violation_exits_5_after_writing(self, tmp_path, capsys, monkeypatch):
        spec = OperatorSpec.canonical(1, 1, 1, 1)
        bad_row = ConvergenceRow(n=3, q_prev=2, q_n=3, epsilon_sharp=1.0,
                                 epsilon_clean=2.0, empirical_dh=10.0,
                                 certified_bound=1.5)
        table = ConvergenceTable(theta="x", spec=spec, rows=(bad_row,),
                                 reference_n=3)
        monkeypatch.setattr(cli, "convergence_study", lambda *a, **k: table)
        code = main(["converge", "--theta", GOLDEN, "--n-range", "3:3",
                     "--out-dir", str(tmp_path)])
        assert code == 5
        err = capsys.readouterr().err
        assert "certificate violation" in err
        # artifacts are still written for post-mortem inspection
        assert (tmp_path / "convergence.csv").exists()
        doc = json.loads((tmp_path / "convergence.json").read_text())
        assert doc["all_verified"] is False

    def test_numerical_failure_exits_4(self, tmp_path, capsys, monkeypatch):
        def boom(*a, **k):
            raise ConvergenceFailure("eigensolver stalled")
        monkeypatch.setattr(cli, "convergence_study", boom)
        code = main(["converge", "--theta", GOLDEN, "--n-range", "3:3",
                     "--out-dir", str(tmp_path)])
        assert code == 4
        assert "numerical failure" in capsys.readouterr().err


class TestConfigAndSpecResolution:
    def test_config_supplies_and_flag_overrides(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"theta": GOLDEN, "terms": 5}))
        assert main(["expand", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert len(out[out.index("k,a_k,p_k,q_k,gap,bound") + 1:]) == 6
        assert main(["expand", "--config", str(cfg), "--terms", "3"]) == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert len(out[out.index("k,a_k,p_k,q_k,gap,bound") + 1:]) == 4

    def test_config_spec_and_qmax(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"q_max": 1}))
        assert main(["butterfly", "--config", str(cfg),
                     "--out-dir", str(tmp_path)]) == 0
        capsys.readouterr()
        assert (tmp_path / "butterfly_summary.json").exists()
        doc = json.loads((tmp_path / "butterfly_summary.json").read_text())
        assert doc["q_max"] == 1 and doc["rows"] == 1
        cfg.write_text(json.dumps({"q_max": 1, "spec": json.loads(U2V_JSON)}))
        assert main(["butterfly", "--config", str(cfg),
                     "--out-dir", str(tmp_path)]) == 3  # config spec not hermitian
        capsys.readouterr()

    def test_config_validation(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"tehta": GOLDEN}))
        assert main(["expand", "--config", str(bad)]) == 3
        assert "unknown config keys" in capsys.readouterr().err
        bad.write_text(json.dumps([1, 2]))
        assert main(["expand", "--config", str(bad)]) == 3
        assert main(["expand", "--config", str(tmp_path / "missing.json")]) == 3
        capsys.readouterr()

    def test_spec_sources(self, tmp_path, capsys):
        spec_file = tmp_path / "spec.json"
        spec_file.write_text('{"canonical": {"a+": [1,0], "a-": [1,0], '
                             '"b+": [1,0], "b-": [1,0]}}')
        assert main(["butterfly", "--q-max", "1", "--spec-file", str(spec_file),
                     "--out-dir", str(tmp_path)]) == 0
        capsys.readouterr()
        assert (tmp_path / "butterfly.csv").read_text() == "p,q,eigenvalue\n0,1,4\n"
        assert main(["butterfly", "--q-max", "1", "--spec", "{not json",
                     "--out-dir", str(tmp_path)]) == 3
        assert main(["butterfly", "--q-max", "1",
                     "--spec-file", str(tmp_path / "nope.json"),
                     "--out-dir", str(tmp_path)]) == 3
        capsys.readouterr()

    def test_mutually_exclusive_spec_flags(self, tmp_path, capsys):
        code = main(["butterfly", "--q-max", "1", "--spec", "{}",
                     "--spec-file", "x.json", "--out-dir", str(tmp_path)])
        assert code == 2
        capsys.readouterr()

    def test_no_or_unknown_subcommand(self, capsys):
        assert main([]) == 2
        assert main(["frobnicate"]) == 2
        capsys.readouterr()
