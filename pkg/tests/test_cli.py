import numpy as np
import pytest

from fsgrating import cli

EX1_INI = """\
[problem]
omega = 3.141592653589793
rho = 1
rho_f = 1
lambda = 1
mu = 1
theta = 0.5235987755982988
kappa = 1
period = 1
h1 = 1
h2 = -1
profile = 0:0, 1:0

[pml]
delta = 3
sigma_re = 64
sigma_im = 64
t = 2

[run]
tol = 0
tau = 0.5
max_iter = 8
h0 = 0.3
dof_cap = 4000
"""

CORNER_INI = EX1_INI.replace("profile = 0:0, 1:0",
                             "profile = 0:0, 0.5:0.5, 1:0")


@pytest.fixture
def ex1_ini(tmp_path):
    path = tmp_path / "ex1.ini"
    path.write_text(EX1_INI)
    return str(path)


def test_config_roundtrip(ex1_ini, tmp_path):
    problem, pml, run = cli.parse_config(ex1_ini)
    dumped = cli.dump_config(problem, pml, run)
    echo = tmp_path / "echo.ini"
    echo.write_text(dumped)
    problem2, pml2, run2 = cli.parse_config(str(echo))
    assert problem2 == problem
    assert pml2 == pml
    assert run2 == run


def test_overrides(ex1_ini):
    problem, pml, run = cli.parse_config(
        ex1_ini, ["problem.kappa=2.5", "pml.delta=1.5", "run.max_iter=3"])
    assert problem.kappa == 2.5
    assert pml.delta1 == 1.5 and pml.delta2 == 1.5
    assert run["max_iter"] == 3
    with pytest.raises(cli.ConfigError):
        cli.parse_config(ex1_ini, ["nonsense"])


def test_dump_config_flag(ex1_ini, capsys):
    code = cli.main(["adapt", "--config", ex1_ini, "--dump-config"])
    assert code == 0
    out = capsys.readouterr().out
    assert "[problem]" in out and "profile" in out


def test_params_meets_target(ex1_ini, capsys):
    code = cli.main(["params", "--config", ex1_ini, "--target", "1e-8",
                     "--set", "pml.sigma_re=1", "--set", "pml.sigma_im=1"])
    assert code == 0
    out = capsys.readouterr().out
    vals = {}
    for line in out.strip().split("\n"):
        key, _, value = line.partition("=")
        vals[key.strip()] = value.strip()
    assert float(vals["F1*sqrt(period)"]) <= 1e-8
    assert float(vals["F2*sqrt(period)"]) <= 1e-8


def test_params_unreachable_exits_budget(ex1_ini):
    code = cli.main(["params", "--config", ex1_ini, "--target", "1e-8",
                     "--set", "pml.delta=1e-18"])
    assert code == 5


def test_adapt_writes_csv_and_exits_budget(ex1_ini, tmp_path):
    out = tmp_path / "out"
    code = cli.main(["adapt", "--config", ex1_ini, "--out", str(out),
                     "--vtk-every", "2"])
    assert code == 5  # tol 0 is never reached inside the budget
    csv = (out / "convergence.csv").read_text().strip().split("\n")
    assert csv[0] == "iter,dof,eps_f,eps_p,e_h,seconds"
    dofs = [int(line.split(",")[1]) for line in csv[1:]]
    assert all(b > a for a, b in zip(dofs, dofs[1:]))
    assert (out / "fields_0000.vtk").exists()


def test_adapt_converged_exits_zero(ex1_ini, tmp_path):
    code = cli.main(["adapt", "--config", ex1_ini, "--out", str(tmp_path),
                     "--set", "run.tol=5"])
    assert code == 0


def test_solve_writes_vtk(ex1_ini, tmp_path):
    out = tmp_path / "solveout"
    code = cli.main(["solve", "--config", ex1_ini, "--out", str(out)])
    assert code == 0
    text = (out / "solution.vtk").read_text().split("\n")
    assert text[0] == "# vtk DataFile Version 3.0"
    assert text[2] == "ASCII"
    assert text[3] == "DATASET UNSTRUCTURED_GRID"
    n_pts = int(text[4].split()[1])
    cells_line = 5 + n_pts
    assert text[cells_line].startswith("CELLS ")
    n_cells = int(text[cells_line].split()[1])
    assert f"POINT_DATA {n_pts}" in text
    assert f"CELL_DATA {n_cells}" in text
    for name in ("p_re", "p_im", "u1_re", "u1_im", "u2_re", "u2_im"):
        assert f"SCALARS {name} double 1" in text
    assert "SCALARS eta double 1" in text
    assert "SCALARS region int 1" in text


def test_verify_flat_reports_slopes(ex1_ini, tmp_path, capsys):
    code = cli.main(["verify-flat", "--config", ex1_ini,
                     "--out", str(tmp_path), "--set", "run.dof_cap=3000",
                     "--set", "run.max_iter=9"])
    assert code == 0
    out = capsys.readouterr().out
    assert "slope of log e_h" in out
    csv = (tmp_path / "convergence.csv").read_text().strip().split("\n")
    assert csv[1].split(",")[4] != ""   # e_h column populated


def test_verify_flat_rejects_corner_profile(tmp_path):
    path = tmp_path / "corner.ini"
    path.write_text(CORNER_INI)
    code = cli.main(["verify-flat", "--config", str(path),
                     "--out", str(tmp_path)])
    assert code == 2


def test_spectral_check(ex1_ini, tmp_path, capsys):
    code = cli.main(["spectral-check", "--config", ex1_ini,
                     "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 3
    table = (tmp_path / "modes.csv").read_text().strip().split("\n")
    assert table[0].startswith("n,")
    assert len(table) > 10


def test_exit_codes_for_error_families(ex1_ini, tmp_path):
    assert cli.main(["adapt", "--config", str(tmp_path / "missing.ini"),
                     "--out", str(tmp_path)]) == 2
    # geometry family: impossible mesh size
    assert cli.main(["solve", "--config", ex1_ini, "--out", str(tmp_path),
                     "--set", "run.h0=-0.5"]) == 3
    # config family: Wood anomaly at grazing incidence
    grazing = repr(np.pi / 2 - 1e-13)
    assert cli.main(["solve", "--config", ex1_ini, "--out", str(tmp_path),
                     "--set", f"problem.theta={grazing}"]) == 2
