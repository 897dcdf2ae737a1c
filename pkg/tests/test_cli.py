import pytest

from ssfmlab.cli import main

TINY = """
span_km = 20
power_dbm = 6
candidate_spp = 6
candidate_dz_km = 2
benchmark_spp = 12
benchmark_dz_km = 0.5
n_symbols = 16
seeds = 2
filter_fraction = {fraction}
"""


@pytest.fixture
def config(tmp_path):
    def write(name="scenario.txt", fraction="0.8", extra=""):
        path = tmp_path / name
        path.write_text(TINY.format(fraction=fraction) + extra, encoding="utf-8")
        return str(path)

    return write


@pytest.fixture(autouse=True)
def in_tmp_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


class TestPropagate:
    def test_writes_default_trace(self, config, tmp_path, capsys):
        assert main(["propagate", "--config", config()]) == 0
        out = tmp_path / "propagate.csv"
        assert out.exists()
        assert out.read_text(encoding="utf-8").startswith("t_ps,re,im\n")
        assert "wrote" in capsys.readouterr().out

    def test_honors_out_path(self, config, tmp_path):
        target = tmp_path / "wave.csv"
        assert main(["propagate", "--config", config(), "--out", str(target)]) == 0
        assert target.exists()

    def test_needs_numeric_fraction(self, config):
        assert main(["propagate", "--config", config(fraction="optimize")]) == 2

    def test_seed_override(self, config, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(["propagate", "--config", config(), "--seeds", "3,4", "--out", str(a)]) == 0
        assert main(["propagate", "--config", config(), "--seeds", "4,3", "--out", str(b)]) == 0
        assert a.read_bytes() != b.read_bytes()  # first listed seed is propagated

    def test_missing_config_file(self, tmp_path):
        assert main(["propagate", "--config", str(tmp_path / "nope.txt")]) == 2

    def test_malformed_config_file(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("span_km == 3\n", encoding="utf-8")
        assert main(["propagate", "--config", str(bad)]) == 2


class TestNsd:
    def test_compares_two_run_specs(self, config, capsys):
        reference = config("ref.txt", fraction="1.0")
        candidate = config("cand.txt", fraction="0.8")
        assert main(["nsd", reference, candidate]) == 0
        out = capsys.readouterr().out
        assert out.startswith("nsd = ")
        assert "over 2 seed(s)" in out

    def test_writes_value_file(self, config, tmp_path):
        reference = config("ref.txt", fraction="1.0")
        out = tmp_path / "value.csv"
        assert main(["nsd", reference, reference, "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "nsd"
        assert float(lines[1]) == 0.0  # identical specs

    def test_rejects_mismatched_spans(self, config, tmp_path):
        reference = config("ref.txt", fraction="1.0")
        other = tmp_path / "far.txt"
        other.write_text(
            TINY.format(fraction="1.0").replace("span_km = 20", "span_km = 40"),
            encoding="utf-8",
        )
        assert main(["nsd", reference, str(other)]) == 2

    def test_overflow_everywhere_exits_3(self, tmp_path):
        spec = tmp_path / "gain.txt"
        spec.write_text(
            "span_km = 400\npower_dbm = 6\ncandidate_spp = 6\ncandidate_dz_km = 10\n"
            "benchmark_spp = 12\nbenchmark_dz_km = 10\nn_symbols = 16\nseeds = 1\n"
            "filter_fraction = 1.0\nalpha_per_km = -2\n",
            encoding="utf-8",
        )
        assert main(["nsd", str(spec), str(spec)]) == 3


class TestSweep:
    def test_writes_axis_csv(self, config, tmp_path):
        assert main(["sweep", "--axis", "distance", "--values", "10,20", "--config", config()]) == 0
        lines = (tmp_path / "sweep_distance.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("distance_km,")
        assert len(lines) == 3

    def test_bandwidth_axis(self, config, tmp_path):
        out = tmp_path / "bw.csv"
        code = main(
            ["sweep", "--axis", "bandwidth", "--values", "0.7,1.0", "--config", config(), "--out", str(out)]
        )
        assert code == 0
        assert out.read_text(encoding="utf-8").startswith("filter_fraction,")

    def test_bad_values_exit_2(self, config):
        assert main(["sweep", "--axis", "power", "--values", "3,x", "--config", config()]) == 2

    def test_unwritable_output_exits_4(self, config, tmp_path):
        out = tmp_path / "no_dir" / "out.csv"
        code = main(["sweep", "--axis", "distance", "--values", "10", "--config", config(), "--out", str(out)])
        assert code == 4


class TestOptimizeBandwidth:
    def test_prints_best_fraction(self, config, capsys):
        code = main(
            ["optimize-bandwidth", "--config", config(fraction="optimize"), "--fractions", "0.7:0.1:1.0"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "best filter_fraction = " in out
        assert "unfiltered nsd = " in out

    def test_writes_table(self, config, tmp_path):
        out = tmp_path / "table.csv"
        code = main(
            [
                "optimize-bandwidth",
                "--config",
                config(fraction="optimize"),
                "--fractions",
                "0.8,1.0",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "filter_fraction,nsd_without_lpf,nsd_with_lpf,chosen_fraction"
        assert len(lines) == 3

    def test_uses_grid_from_scenario_file(self, config, capsys):
        path = config(fraction="optimize", extra="optimize_fractions = 0.9,1.0\n")
        assert main(["optimize-bandwidth", "--config", path]) == 0
        assert "best filter_fraction" in capsys.readouterr().out


class TestReproduce:
    def test_fig2_writes_summary_and_traces(self, tmp_path):
        code = main(["reproduce", "fig2", "--desk-scale", "--seeds", "1", "--out", "fig2"])
        assert code == 0
        assert (tmp_path / "fig2_summary.csv").exists()
        assert (tmp_path / "fig2_trace_benchmark.csv").exists()
        for spp in (30, 10, 8, 6, 4):
            assert (tmp_path / f"fig2_trace_spp{spp}_unfiltered.csv").exists()
            assert (tmp_path / f"fig2_trace_spp{spp}_filtered.csv").exists()
        header = (tmp_path / "fig2_summary.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header == "samples_per_symbol,nsd_without_lpf,nsd_with_lpf,chosen_fraction"

    def test_rejects_unknown_preset(self):
        with pytest.raises(SystemExit):
            main(["reproduce", "fig7"])
