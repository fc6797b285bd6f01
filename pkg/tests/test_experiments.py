import csv
from types import SimpleNamespace

import numpy as np
import pytest

import experiments
import params
import utils
from errors import TangencyRisk
from interval import Interval
from lohner import SolverConfig
from poincare import CoordinateFrame


def read_csv(path):
    with open(path) as infile:
        return list(csv.reader(infile))


def test_parse_defaults():
    args = params.parse_args(["fixed", "--system", "michelson"])
    assert args.strategy == "all"
    assert args.sizes == [-10, -9, -8, -7, -6, -5, -4, -3, -2]
    assert args.solver_config.order == 20
    assert args.polish is None
    assert args.logdir.endswith("poincare")
    assert "order: 20" in params.print_args(args)


def test_parse_lists_and_flags():
    args = params.parse_args(["vdp", "--section", "cto", "--deltas=-6,-5", "--no-polish", "--order", "12"])
    assert args.deltas == [-6.0, -5.0]
    assert args.polish is False
    assert args.solver_config.order == 12


@pytest.mark.parametrize(
    "argv",
    [
        ["fixed", "--system", "lorenz"],
        ["fixed", "--system", "michelson", "--order", "4"],
        ["vdp", "--min-step", "1", "--max-step", "0.1"],
        ["vdp", "--jobs", "0"],
        ["fixed", "--system", "michelson", "--sizes=-5,-6"],
        ["vdp", "--deltas=-10"],
        ["varying", "--system", "michelson", "--samples", "50"],
        ["angles"],
    ],
)
def test_usage_errors_exit_with_two(argv):
    with pytest.raises(SystemExit) as err:
        params.parse_args(argv)
    assert err.value.code == 2


def test_format_float_keeps_seventeen_digits(tmp_path):
    path = str(tmp_path / "out.csv")
    utils.write_csv(path, ["a", "b"], [[0.1, "t"], [-6.0, 0.5]])
    rows = read_csv(path)
    assert rows == [["a", "b"], ["0.10000000000000001", "t"], ["-6", "0.5"]]
    assert float(rows[1][0]) == 0.1


def test_json_log_accepts_numpy(tmp_path):
    path = str(tmp_path / "log.json")
    utils.write_log_to_json(path, {"b": np.float64(0.25), "a": np.arange(2)})
    with open(path) as infile:
        text = infile.read()
    assert text.index('"a"') < text.index('"b"')
    assert "0.25" in text
    assert utils.format_seconds(3725.5) == "1 hr 2 min 5.50 sec"


def fake_enclosure(T, z):
    return SimpleNamespace(return_time=T, z=z)


def test_table_rows():
    job = experiments.RowJob("fixed", "michelson", "diag+flowdir", "standard", -6.0, SolverConfig())
    T = Interval(10.0, 10.0 + 2e-6)
    z = Interval([-1e-7, -1e-5, -2e-8], [1e-7, 1e-5, 2e-8])
    rows = experiments.table_rows(job, fake_enclosure(T, z), z, 1e-6)
    assert [row[4] for row in rows] == ["t", "1", "2", "3"]
    assert rows[0][:4] == ["michelson", "diag+flowdir", "standard", -6.0]
    assert np.isclose(rows[0][7], 2.0)
    assert np.isclose(rows[2][7], 20.0)

    vdp = experiments.RowJob("vdp", "vanderpol", "cto", "cto", -4.0, SolverConfig())
    rows = experiments.table_rows(vdp, fake_enclosure(Interval(6.3, 6.3 + 3e-8), z[:2]), z[:2], 1e-4)
    assert np.isclose(rows[0][7], 3.0, rtol=1e-6)
    assert np.isclose(rows[2][7], 1e-5 / 1e-4)


def test_check_rows():
    key = ("fixed", "michelson", "diag+flowdir", "standard", -6, "2")
    lo, hi = experiments.ACCEPTANCE_BANDS[key]
    good = ["michelson", "diag+flowdir", "standard", -6.0, "2", 0.0, 1.0, 0.5 * (lo + hi)]
    bad = good[:7] + [2.0 * hi]
    error = ["michelson", "diag+flowdir", "standard", -6.0, "t", "", "", "ERROR:TangencyRisk"]
    unasserted = ["michelson", "diag+flowdir", "standard", -3.0, "2", 0.0, 1.0, 1e9]

    assert experiments.check_rows("fixed", [good, unasserted])[0] == experiments.EXIT_OK
    assert experiments.check_rows("fixed", [good, bad])[0] == experiments.EXIT_ASSERTION
    assert experiments.check_rows("fixed", [bad, error])[0] == experiments.EXIT_SOLVER


def test_failed_rows_carry_error_name(monkeypatch):
    def failing(job):
        raise TangencyRisk("crossing speed contains zero")

    monkeypatch.setattr(experiments, "enclose_row", failing)
    jobs = [
        experiments.RowJob("fixed", "michelson", "cartesian", "standard", k, SolverConfig())
        for k in (-6.0, -5.0)
    ]
    results = experiments.run_jobs(jobs, 1)
    assert [result.job.log10_s for result in results] == [-6.0, -5.0]
    for result in results:
        assert result.rows[0][4] == "t"
        assert result.rows[0][-1] == "ERROR:TangencyRisk"
        assert result.error.startswith("TangencyRisk")


def test_initial_sets():
    point = np.array([0.0, 1.0, 0.0])
    B = np.array([[1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [0.0, -0.8, 0.6]])
    frame = CoordinateFrame.custom(point, B, "diag+flowdir")
    setup = experiments.Setup(None, point, None, frame, frame, [1])
    X = experiments.initial_set(setup, "fixed", 1e-4)
    assert X.kind == "tripleton"
    assert X.r0.lo[0] == 0.0 and X.r0.hi[0] == 0.0
    assert X.enclose().contains(point + B @ np.array([0.0, 0.5e-4, -0.5e-4]))

    vdp_frame = CoordinateFrame.custom(np.array([2.0, 0.0]), np.eye(2), "orthogonal")
    vdp_setup = experiments.Setup(None, np.array([2.0, 0.0]), None, vdp_frame, vdp_frame, [1])
    segment = experiments.initial_set(vdp_setup, "vdp", 1e-3).enclose()
    assert segment.contains(Interval([2.0 - 1e-3, 0.0], [2.0 + 1e-3, 0.0]))
    assert segment.diam()[1] < 1e-15


def test_orbit_and_angles_commands(tmp_path):
    orbit_path = str(tmp_path / "orbit.csv")
    code = experiments.main(["orbit", "--system", "vanderpol", "--points", "50", "--out", orbit_path])
    assert code == 0
    rows = read_csv(orbit_path)
    assert rows[0] == ["t", "x", "y"]
    assert len(rows) == 51
    assert float(rows[1][0]) == 0.0

    angles_path = str(tmp_path / "angles.csv")
    code = experiments.main(["angles", "--system", "vanderpol", "--samples", "40", "--out", angles_path])
    assert code == 0
    rows = read_csv(angles_path)
    assert rows[0] == ["t", "cos_gamma"]
    assert len(rows) == 41
    assert all(abs(float(row[1])) <= 1.0 + 1e-12 for row in rows[1:])


def test_property_suite_cheap_checks():
    suite = experiments.PropertySuite(SolverConfig(order=15), seed=42, samples=10)
    rng = np.random.default_rng(42)
    assert suite.check_representation_eval(rng)[0]
    assert suite.check_verified_inverse(rng)[0]
    assert suite.check_solver_containment(rng)[0]


@pytest.mark.slow
def test_vdp_orthogonal_rows_within_bands(tmp_path):
    path = str(tmp_path / "vdp.csv")
    code = experiments.main(["vdp", "--deltas=-6,-5", "--check", "--out", path])
    assert code == 0
    rows = read_csv(path)
    assert rows[0] == experiments.CSV_HEADER
    by_coord = {(row[3], row[4]): row for row in rows[1:]}
    for delta in ("-6", "-5"):
        lo, hi = float(by_coord[(delta, "1")][5]), float(by_coord[(delta, "1")][6])
        assert lo - 1e-9 <= 0.0 <= hi + 1e-9
        assert 0.14 <= float(by_coord[(delta, "1")][7]) <= 0.57


@pytest.mark.slow
def test_vdp_rows_are_reproducible(tmp_path):
    first = str(tmp_path / "first.csv")
    second = str(tmp_path / "second.csv")
    experiments.main(["vdp", "--section", "cto", "--deltas=-4", "--out", first])
    experiments.main(["vdp", "--section", "cto", "--deltas=-4", "--out", second, "--jobs", "2"])
    with open(first) as a, open(second) as b:
        assert a.read() == b.read()


@pytest.mark.slow
def test_michelson_flowdir_ratio(tmp_path):
    path = str(tmp_path / "fixed.csv")
    code = experiments.main(
        ["fixed", "--system", "michelson", "--strategy", "diag+flowdir", "--sizes=-6", "--check", "--out", path]
    )
    assert code == 0
    rows = {row[4]: row for row in read_csv(path)[1:]}
    assert 21.5723 * 0.98 <= float(rows["2"][7]) <= 21.5723 * 1.05
    assert float(rows["3"][7]) < 0.1


@pytest.fixture(scope="module")
def suite():
    return experiments.PropertySuite(SolverConfig(), seed=42, samples=20)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["cto_residual", "newton_contract", "cto_slope", "sliding_slope"])
def test_property_checks_pass(suite, name):
    check = dict(suite.checks())[name]
    passed, detail = check(np.random.default_rng(42))
    assert passed, detail


@pytest.mark.slow
def test_strategy_gap_on_michelson():
    ratios = {}
    for strategy in ("diag+normal", "diag+flowdir"):
        job = experiments.RowJob("fixed", "michelson", strategy, "standard", -6.0, SolverConfig())
        _, z, s = experiments.enclose_row(job)
        ratios[strategy] = float(z.diam()[2]) / s
    assert ratios["diag+normal"] > 10.0
    assert ratios["diag+flowdir"] < 0.1
