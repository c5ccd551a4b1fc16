import pytest

from sfplots.csvio import SchemaError
from sfplots.figures import PlotSpec, plot_scaling_loglog, plot_theta_curves
from plot_fixtures import write_scan_csv, write_scaling_csv


def theta_spec(inputs, out, **kw):
    return PlotSpec(inputs=inputs, output=str(out), kind="theta_curves", **kw)


def scaling_spec(inputs, out, **kw):
    return PlotSpec(
        inputs=inputs, output=str(out), kind="scaling_loglog", **kw
    )


class TestThetaCurves:
    def test_renders_both_series(self, scan_csv, tmp_path):
        out = tmp_path / "fig.svg"
        plot_theta_curves(theta_spec([scan_csv], out))
        body = out.read_text()
        assert ">SP<" in body and ">HA<" in body

    def test_single_zero_row_per_protocol(self, tmp_path):
        path = write_scan_csv(
            tmp_path / "tiny.csv", [("SP", 0.0, 0.0), ("HA", 0.0, 0.0)]
        )
        out = tmp_path / "tiny.svg"
        plot_theta_curves(theta_spec([path], out))
        assert out.exists() and out.stat().st_size > 0

    def test_gamma_c_guides(self, scan_csv, tmp_path):
        out_a = tmp_path / "a.svg"
        out_b = tmp_path / "b.svg"
        plot_theta_curves(theta_spec([scan_csv], out_a))
        plot_theta_curves(
            theta_spec([scan_csv], out_b, gamma_c={"SP": 0.1, "HA": 0.2})
        )
        # the guided figure carries two extra vertical line elements
        assert out_b.read_text().count("<path") > out_a.read_text().count("<path")

    def test_missing_column_names_it(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("gamma,theta\n0.1,0.0\n")
        with pytest.raises(SchemaError, match="protocol"):
            plot_theta_curves(theta_spec([str(bad)], tmp_path / "x.svg"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            plot_theta_curves(
                theta_spec([str(tmp_path / "absent.csv")], tmp_path / "x.svg")
            )


class TestScalingLoglog:
    def test_exact_slope_annotation(self, square_scaling_csv, tmp_path):
        out = tmp_path / "inset.svg"
        plot_scaling_loglog(scaling_spec([square_scaling_csv], out))
        body = out.read_text()
        assert "slope 2.000" in body  # SP series is exactly quadratic
        assert "slope 1.500" in body

    def test_no_fit_overlay(self, square_scaling_csv, tmp_path):
        out = tmp_path / "scatter.svg"
        plot_scaling_loglog(
            scaling_spec([square_scaling_csv], out, fit_overlay=False)
        )
        assert "slope" not in out.read_text()

    def test_refuses_two_sizes(self, tmp_path):
        path = write_scaling_csv(
            tmp_path / "short.csv", [(10, "SP", 5.0), (100, "SP", 50.0)]
        )
        with pytest.raises(ValueError, match="3 distinct"):
            plot_scaling_loglog(scaling_spec([path], tmp_path / "x.svg"))

    def test_deterministic_bytes(self, square_scaling_csv, tmp_path):
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        plot_scaling_loglog(scaling_spec([square_scaling_csv], a))
        plot_scaling_loglog(scaling_spec([square_scaling_csv], b))
        assert a.read_bytes() == b.read_bytes()


class TestSpecValidation:
    def test_unknown_kind(self, scan_csv, tmp_path):
        spec = PlotSpec(inputs=[scan_csv], output=str(tmp_path / "x.svg"), kind="pie")
        with pytest.raises(ValueError, match="kind"):
            spec.validate()

    def test_empty_inputs(self, tmp_path):
        spec = PlotSpec(inputs=[], output=str(tmp_path / "x.svg"), kind="theta_curves")
        with pytest.raises(ValueError):
            spec.validate()
