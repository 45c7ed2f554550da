import numpy as np
import pytest

from demonsim import units
from demonsim.channels import chi_from_text
from demonsim.cli import (
    CSV_HEADER,
    DEFAULT_KT_PEV,
    DEFAULT_PHI,
    SweepGrid,
    SweepRow,
    _row_to_csv,
    cmd_sweep,
    cmd_tomography,
    main,
    sweep_rows,
)


def read_rows(path):
    lines = path.read_text().strip().splitlines()
    return lines[0], [line.split(",") for line in lines[1:]]


def test_default_sweep_grid(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--out", str(out), "--no-plots"])
    assert code == 0
    header, rows = read_rows(out)
    assert header == CSV_HEADER
    assert len(rows) == len(DEFAULT_KT_PEV) * len(DEFAULT_PHI)
    # temperature is the outer loop
    first_block = rows[: len(DEFAULT_PHI)]
    assert all(r[0] == first_block[0][0] for r in first_block)
    phis = [float(r[1]) for r in first_block]
    assert phis == pytest.approx(list(DEFAULT_PHI))
    for r in rows:
        assert float(r[2]) == pytest.approx(np.sin(float(r[1]) / 2.0) ** 2, abs=1e-15)
        assert abs(float(r[8]) - 1.0) <= 1e-9
        assert r[9] in ("0", "1")


def test_csv_round_trips_to_full_precision(tmp_path):
    out = tmp_path / "rt.csv"
    grid = SweepGrid(kt_values=(2.6, 13.8), phi_values=(0.0, 0.37))
    rows, _ = cmd_sweep(grid, str(out), plots=False)
    _, parsed = read_rows(out)
    for row, cells in zip(rows, parsed):
        assert float(cells[3]) == row.sigma_nats  # %.17g is lossless for doubles
        assert float(cells[7]) == row.mutual_info_nats


def test_explicit_grid_flags(tmp_path):
    out = tmp_path / "grid.csv"
    code = main(
        [
            "sweep",
            "--kt-min", "3.0", "--kt-max", "5.0", "--kt-steps", "3",
            "--phi-min", "0.0", "--phi-max", "1.0", "--phi-steps", "2",
            "--out", str(out), "--no-plots",
        ]
    )
    assert code == 0
    _, rows = read_rows(out)
    assert len(rows) == 6
    assert [float(r[0]) for r in rows] == pytest.approx([3, 3, 4, 4, 5, 5])
    assert [float(r[1]) for r in rows] == pytest.approx([0, 1, 0, 1, 0, 1])


def test_partial_grid_flags_error(tmp_path):
    with pytest.raises(SystemExit):
        main(["sweep", "--kt-min", "3.0", "--out", str(tmp_path / "x.csv"), "--no-plots"])


def test_beta_internal_mode(tmp_path):
    out = tmp_path / "beta.csv"
    code = main(
        [
            "sweep", "--beta-internal",
            "--kt-min", "1.0", "--kt-max", "2.0", "--kt-steps", "2",
            "--phi-min", "0.0", "--phi-max", "0.0", "--phi-steps", "1",
            "--out", str(out), "--no-plots",
        ]
    )
    assert code == 0
    _, rows = read_rows(out)
    # the CSV column stays in peV regardless of the input convention
    expected = [units.kt_pev_from_beta_internal(b, 3.0) for b in (1.0, 2.0)]
    assert [float(r[0]) for r in rows] == pytest.approx(expected)


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "kt-min = 3.0\nkt-max = 5.0\nkt-steps = 3\n"
        "phi-min = 0.0\nphi-max = 1.0\nphi-steps = 2\n"
        "# comment line\n"
    )
    out = tmp_path / "cfg.csv"
    code = main(
        ["sweep", "--config", str(cfg), "--kt-steps", "2", "--out", str(out), "--no-plots"]
    )
    assert code == 0
    _, rows = read_rows(out)
    # kt-steps came from the flag, the rest from the file
    assert len(rows) == 2 * 2
    assert sorted({r[0] for r in rows}) == ["3", "5"]


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("volume = 11\n")
    with pytest.raises(SystemExit):
        main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "x.csv"), "--no-plots"])


def test_row_writer_refuses_broken_identity():
    row = SweepRow(
        kt_pev=2.6, phi_rad=0.0, p01=0.0, sigma_nats=-0.1, i_gain_nats=0.2,
        avg_kl_nats=0.0, delta_s_f_nats=0.1, mutual_info_nats=0.69,
        fluct_avg=1.5, demon=1,
    )
    with pytest.raises(ValueError):
        _row_to_csv(row)


def test_sweep_figures_are_rendered(tmp_path):
    grid = SweepGrid(kt_values=(2.6, 4.2), phi_values=(0.0, np.pi / 4))
    out = tmp_path / "fig.csv"
    rows, written = cmd_sweep(grid, str(out), plots=True)
    assert len(rows) == 4
    names = {p.split("/")[-1] for p in written}
    assert names == {
        "fig.csv",
        "fig_entropy_production.png",
        "fig_bounds.png",
        "fig_tradeoff_terms.png",
    }
    for p in written:
        assert (tmp_path / p.split("/")[-1]).stat().st_size > 0


def test_noise_flag_keeps_rows_valid(tmp_path):
    grid = SweepGrid(kt_values=(4.2,), phi_values=(0.5,), noise_q=0.1)
    rows, _ = cmd_sweep(grid, str(tmp_path / "n.csv"), plots=False)
    assert abs(rows[0].fluct_avg - 1.0) <= 1e-9


def test_tomography_outputs(tmp_path):
    out_dir = tmp_path / "tomo"
    delta, written = cmd_tomography(np.pi / 4, 0.0, str(out_dir), plots=False)
    assert set(written) == {"chi_measurement.txt", "chi_protocol.txt", "delta.txt"}
    chi = chi_from_text((out_dir / "chi_measurement.txt").read_text())
    assert np.allclose(chi.matrix, np.diag([0.5, 0.5, 0.0, 0.0]), atol=1e-12)
    body = (out_dir / "delta.txt").read_text().splitlines()
    assert body[0].startswith("phi=")
    assert float(body[1].split("=")[1]) == pytest.approx(delta)
    assert delta > 0.0


def test_tomography_noisy_variants_and_figures(tmp_path):
    out_dir = tmp_path / "tomo_noisy"
    delta, written = cmd_tomography(0.3, 0.05, str(out_dir), plots=True)
    assert "chi_measurement_noisy.txt" in written
    assert "chi_protocol_noisy.txt" in written
    assert "chi_measurement.png" in written
    assert "process_distance.png" in written
    lines = (out_dir / "delta.txt").read_text().splitlines()
    assert lines[2].startswith("delta_ideal=")
    # noise adds distance on top of the mismatch alone
    assert delta > float(lines[2].split("=")[1])


def test_tomography_cli_entry(tmp_path):
    out_dir = tmp_path / "t"
    code = main(["tomography", "--phi", "0.0", "--out-dir", str(out_dir), "--no-plots"])
    assert code == 0
    lines = (out_dir / "delta.txt").read_text().splitlines()
    assert float(lines[1].split("=")[1]) == pytest.approx(0.0, abs=1e-12)


def test_verify_cli(capsys):
    assert main(["verify", "--seed", "5"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.count("ok  ") == 9


def test_verify_detects_injected_nonunital(capsys):
    assert main(["verify", "--seed", "5", "--inject-nonunital"]) == 1
    out = capsys.readouterr().out
    assert "FAIL work_paths" in out


def test_sweep_rows_helper_matches_cli(tmp_path):
    grid = SweepGrid(kt_values=(2.6,), phi_values=(0.0,))
    rows = sweep_rows(grid)
    assert len(rows) == 1
    assert rows[0].mutual_info_nats == pytest.approx(np.log(2), abs=1e-12)
