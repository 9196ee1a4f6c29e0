"""Golden tests for the command-line front end."""

import math
import random
import subprocess
import sys

import pytest

from rangecube.cli import main, run_bench, run_script

CUBE_2X2 = "2\n2 2\nint\n1 2 3 4\n"
ZERO_2X2 = "2\n2 2\nint\n0 0 0 0\n"


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestQueryGolden:
    def test_prefix_script(self, files, capsys):
        cube = files("cube.txt", CUBE_2X2)
        script = files("s.txt", "prefix 1 1\n")
        code, out, err = run(capsys, ["query", "prefix:op=sum", cube, script, "--oracle"])
        assert code == 0
        assert err == ""
        assert out == "10\n# ops queries=1 updates=0\n# counters prefix_lookups_max=4\n"

    def test_fenwick_update_script(self, files, capsys):
        cube = files("zero.txt", ZERO_2X2)
        script = files("s.txt", "update 0 0 5\nprefix 1 1\n")
        code, out, err = run(capsys, ["query", "fenwick", cube, script, "--oracle"])
        assert code == 0
        assert out.splitlines()[0] == "5"

    def test_update_rejected_for_rmq(self, files, capsys):
        cube = files("zero.txt", ZERO_2X2)
        script = files("s.txt", "update 0 0 5\n")
        code, out, err = run(capsys, ["query", "rmq", cube, script])
        assert code == 1
        assert "unsupported verb 'update'" in err
        assert "line 1" in err

    def test_unknown_verb_with_line_number(self, files, capsys):
        cube = files("cube.txt", CUBE_2X2)
        script = files("s.txt", "prefix 1 1\nfrobnicate 1\n")
        code, out, err = run(capsys, ["query", "prefix", cube, script])
        assert code == 1
        assert "line 2" in err and "frobnicate" in err

    def test_out_of_bounds_reports_line(self, files, capsys):
        cube = files("cube.txt", CUBE_2X2)
        script = files("s.txt", "prefix 1 1\nprefix 9 9\n")
        code, out, err = run(capsys, ["query", "prefix", cube, script])
        assert code == 1
        assert "line 2" in err

    def test_rmq_script(self, files, capsys):
        cube = files("cube.txt", "1\n5\nint\n3 1 4 1 5\n")
        script = files("s.txt", "rmq 1 3\nrmq 0 4\n")
        code, out, err = run(capsys, ["query", "rmq:mode=min", cube, script, "--oracle"])
        assert code == 0
        assert out.splitlines()[:2] == ["1", "1"]
        code, out, err = run(capsys, ["query", "rmq:mode=max", cube, script, "--oracle"])
        assert out.splitlines()[:2] == ["4", "5"]

    def test_hybrid_matches_fenwick_output(self, files, capsys):
        rng = random.Random(11)
        dims = (4, 4)
        values = [rng.randint(-9, 9) for _ in range(16)]
        cube = files(
            "cube.txt", "2\n4 4\nint\n" + " ".join(map(str, values)) + "\n"
        )
        lines = ["update 2 3 7", "prefix 3 3", "query 1 2 0 3", "prefix 0 0"]
        script = files("s.txt", "\n".join(lines) + "\n")
        outputs = []
        for struct in ("fenwick", "hybrid:k=2,q=1", "hybrid:k=2,q=2", "prefix"):
            if struct == "prefix":
                sc = files("s2.txt", "prefix 0 0\n")
                code, out, err = run(capsys, ["query", struct, cube, sc, "--oracle"])
                assert code == 0
                continue
            code, out, err = run(capsys, ["query", struct, cube, script, "--oracle"])
            assert code == 0
            outputs.append([l for l in out.splitlines() if not l.startswith("#")])
        assert outputs[0] == outputs[1] == outputs[2]

    def test_cube_median_script(self, files, capsys):
        cube = files("cube.txt", "2\n3 3\nint\n1 1 1 1 1 1 1 1 1\n")
        scales = files("scales.txt", "0 1 2\n0 1 2\n")
        script = files("s.txt", "cube-median 0 2 0 2\n")
        code, out, err = run(
            capsys, ["query", f"median:scales={scales}", cube, script, "--oracle"]
        )
        assert code == 0
        assert out.splitlines()[0] == "1 1 12"

    def test_median_1d_script(self, files, capsys):
        cube = files("w.txt", "1\n4\nint\n1 1 1 1\n")
        scales = files("scales.txt", "1 2 3 10\n")
        script = files("s.txt", "median 0 2\nmedian 0 3\n")
        code, out, err = run(
            capsys, ["query", f"median:scales={scales}", cube, script, "--oracle"]
        )
        assert code == 0
        assert out.splitlines()[:2] == ["1 2", "1 10"]

    def test_kmedian_script(self, files, capsys):
        cube = files("w.txt", "1\n3\nint\n1 1 1\n")
        scales = files("scales.txt", "0 4 10\n")
        script = files("s.txt", "kmedian 1 4\nkmedian 3 0\n")
        code, out, err = run(
            capsys, ["query", f"kmedian:scales={scales}", cube, script, "--oracle"]
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0].split()[0] == "6"
        assert lines[1].split()[0] == "0"

    def test_select_script(self, files, capsys):
        arrays = files("arr.txt", "1 2\n1 2\n")
        script = files("s.txt", "select 2\nselect 2 1\nagg-select 3\nagg-select 4 1\n")
        code, out, err = run(capsys, ["query", "select:op=sum", arrays, script, "--oracle"])
        assert code == 0
        assert [l for l in out.splitlines() if not l.startswith("#")] == [
            "3",
            "3",
            "8",
            "12",
        ]

    def test_overflow_rejection(self, files, capsys):
        big = 1 << 61
        cube = files("cube.txt", f"1\n4\nint\n{big} 0 0 0\n")
        script = files("s.txt", "prefix 3\n")
        code, out, err = run(capsys, ["query", "prefix:op=sum", cube, script])
        assert code == 1
        assert "overflow" in err

    def test_product_needs_float_cube(self, files, capsys):
        cube = files("cube.txt", CUBE_2X2)
        script = files("s.txt", "prefix 1 1\n")
        code, out, err = run(capsys, ["query", "prefix:op=product", cube, script])
        assert code == 1
        assert "float" in err

    def test_product_float_cube(self, files, capsys):
        cube = files("cube.txt", "2\n2 2\nfloat\n1.0 2.0 3.0 4.0\n")
        script = files("s.txt", "query 0 1 0 1\n")
        code, out, err = run(capsys, ["query", "prefix:op=product", cube, script, "--oracle"])
        assert code == 0
        assert out.splitlines()[0] == "24"

    def test_malformed_cube_file(self, files, capsys):
        cube = files("cube.txt", "1\n3\nint\n1 2\n")
        script = files("s.txt", "prefix 0\n")
        code, out, err = run(capsys, ["query", "prefix", cube, script])
        assert code == 1
        assert "expected value" in err

    def test_unknown_structure(self, files, capsys):
        cube = files("cube.txt", CUBE_2X2)
        script = files("s.txt", "prefix 1 1\n")
        code, out, err = run(capsys, ["query", "btree", cube, script])
        assert code == 1
        assert "unknown structure" in err


class TestOracleCorpus:
    def test_oracle_mode_full_corpus(self, files, tmp_path):
        """Random scripts over every structure kind run clean in oracle mode."""
        rng = random.Random(99)
        dims = (4, 3)
        values = [rng.randint(-20, 20) for _ in range(12)]
        cube_path = files("cube.txt", "2\n4 3\nint\n" + " ".join(map(str, values)) + "\n")
        lines = []
        for _ in range(40):
            roll = rng.random()
            if roll < 0.4:
                c = [rng.randrange(4), rng.randrange(3)]
                lines.append(f"update {c[0]} {c[1]} {rng.randint(-9, 9)}")
            elif roll < 0.7:
                b = [rng.randrange(4), rng.randrange(3)]
                lines.append(f"prefix {b[0]} {b[1]}")
            else:
                lo = [rng.randrange(4), rng.randrange(3)]
                hi = [rng.randint(lo[0], 3), rng.randint(lo[1], 2)]
                lines.append(f"query {lo[0]} {hi[0]} {lo[1]} {hi[1]}")
        script = files("dyn.txt", "\n".join(lines) + "\n")
        for struct in ("fenwick", "fenwick:op=xor", "hybrid:k=2,q=1", "hybrid:k=1,q=0"):
            out = run_script(cube_path, struct, script, oracle=True)
            assert out  # no mismatch raised

        rmq_lines = []
        for _ in range(30):
            lo = [rng.randrange(4), rng.randrange(3)]
            hi = [rng.randint(lo[0], 3), rng.randint(lo[1], 2)]
            rmq_lines.append(f"rmq {lo[0]} {hi[0]} {lo[1]} {hi[1]}")
        rmq_script = files("rmq.txt", "\n".join(rmq_lines) + "\n")
        for struct in ("rmq:mode=min", "rmq:mode=max"):
            run_script(cube_path, struct, rmq_script, oracle=True)

    def test_identical_outputs_across_structures(self, files):
        rng = random.Random(123)
        values = [rng.randint(-20, 20) for _ in range(16)]
        cube_path = files("cube.txt", "2\n4 4\nint\n" + " ".join(map(str, values)) + "\n")
        lines = []
        for _ in range(30):
            if rng.random() < 0.5:
                b = [rng.randrange(4), rng.randrange(4)]
                lines.append(f"prefix {b[0]} {b[1]}")
            else:
                lo = [rng.randrange(4), rng.randrange(4)]
                hi = [rng.randint(lo[0], 3), rng.randint(lo[1], 3)]
                lines.append(f"query {lo[0]} {hi[0]} {lo[1]} {hi[1]}")
        script = files("q.txt", "\n".join(lines) + "\n")
        results = []
        for struct in ("prefix", "fenwick", "hybrid", "hybrid:k=4,q=2"):
            out = run_script(cube_path, struct, script, oracle=True)
            results.append([l for l in out if not l.startswith("#")])
        assert all(r == results[0] for r in results)


class TestBench:
    def test_deterministic(self):
        a = run_bench(8, 2, None, None, 0.5, 60, 42)
        b = run_bench(8, 2, None, None, 0.5, 60, 42)
        assert a == b

    def test_q_d_update_bound(self):
        rows = run_bench(16, 2, [4], [2], 1.0, 80, 7, csv=True)
        header = rows[0].split(",")
        row = rows[1].split(",")
        assert int(row[header.index("upd_max")]) <= 2**2
        assert int(row[header.index("upd_bound")]) == 4

    def test_measured_within_bounds(self):
        rows = run_bench(16, 2, [4], [1], 0.5, 100, 3, csv=True)
        header = rows[0].split(",")
        row = rows[1].split(",")
        assert int(row[header.index("upd_max")]) <= int(row[header.index("upd_bound")])
        assert int(row[header.index("qry_max")]) <= int(row[header.index("qry_bound")])
        assert int(row[header.index("upd_bound")]) == 2 * (4 + 4)

    def test_parameter_overflow(self, capsys):
        code = main(["bench", "--n", "300", "--d", "4", "--seed", "1"])
        captured = capsys.readouterr()
        assert code == 1
        assert "overflow" in captured.err


class TestTopLevelCommands:
    def test_median_command(self, files, capsys):
        cube = files("cube.txt", "2\n3 3\nint\n1 1 1 1 1 1 1 1 1\n")
        scales = files("scales.txt", "0 1 2\n0 1 2\n")
        code, out, err = run(capsys, ["median", cube, scales, "0", "2", "0", "2"])
        assert code == 0
        assert out == "1 1 12\n"

    def test_median_zero_box(self, files, capsys):
        cube = files("cube.txt", "2\n2 2\nint\n0 0 0 1\n")
        scales = files("scales.txt", "0 1\n0 1\n")
        code, out, err = run(capsys, ["median", cube, scales, "0", "0", "0", "0"])
        assert code == 1
        assert "positive weight" in err

    def test_select_command(self, files, capsys):
        arrays = files("arr.txt", "1 2\n1 2\n")
        code, out, err = run(capsys, ["select", arrays, "--op", "sum", "--k", "2"])
        assert code == 0 and out == "3\n"
        code, out, err = run(
            capsys, ["select", arrays, "--op", "sum", "--agg", "sum", "--k", "3"]
        )
        assert code == 0 and out == "8\n"
        code, out, err = run(
            capsys, ["select", arrays, "--op", "max", "--k", "4"]
        )
        assert code == 0 and out == "2\n"

    def test_select_float_eps(self, files, capsys):
        arrays = files("arr.txt", "0.5 1.5\n0.25 0.75\n")
        code, out, err = run(
            capsys, ["select", arrays, "--op", "sum", "--k", "4", "--eps", "1e-9"]
        )
        assert code == 0
        assert abs(float(out) - 2.25) < 1e-6


def test_console_entry_point(tmp_path):
    cube = tmp_path / "cube.txt"
    cube.write_text(CUBE_2X2)
    script = tmp_path / "s.txt"
    script.write_text("prefix 1 1\n")
    proc = subprocess.run(
        [sys.executable, "-m", "rangecube", "query", "prefix", str(cube), str(script)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "10"
