import numpy as np

from demonsim.channels import channel_to_chi
from demonsim.cli import SweepGrid, sweep_rows
from demonsim.figures import (
    render_chi_figure,
    render_distance_figure,
    render_sweep_figures,
)
from demonsim.protocol import ProtocolConfig, measurement_channel


def test_render_sweep_figures_full_grid(tmp_path):
    rows = sweep_rows(SweepGrid(kt_values=(2.6, 4.2), phi_values=(0.0, 0.5)))
    paths = render_sweep_figures(rows, str(tmp_path / "out.csv"))
    assert len(paths) == 3
    for p in paths:
        assert p.endswith(".png")
        assert (tmp_path / p.split("/")[-1]).stat().st_size > 0


def test_render_sweep_figures_singleton_axes(tmp_path):
    # one temperature: the heatmap degrades to line plots without crashing
    rows = sweep_rows(SweepGrid(kt_values=(4.2,), phi_values=(0.0, 0.3, 0.6)))
    paths = render_sweep_figures(rows, str(tmp_path / "s.csv"))
    assert len(paths) == 3


def test_render_chi_and_distance_figures(tmp_path):
    chi = channel_to_chi(measurement_channel(ProtocolConfig(kt_pev=2.6)))
    p1 = render_chi_figure(chi, "measurement", str(tmp_path / "chi.png"))
    phis = np.linspace(0, np.pi / 2, 5)
    deltas = np.linspace(0, 0.5, 5)
    p2 = render_distance_figure(phis, deltas, 0.3, 0.11, str(tmp_path / "d.png"))
    for p in (p1, p2):
        assert (tmp_path / p.split("/")[-1]).stat().st_size > 0
