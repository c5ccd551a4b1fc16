import json

import numpy as np
import pytest

from sfroute.graph import save_edge_list
from sfroute.harness import (
    ConfigError,
    ExperimentConfig,
    derive_seed,
    fit_exponent,
    fit_scaling_csv,
    make_graph,
    read_csv,
    scaling_study,
    scan_gamma,
    write_csv,
    SCAN_FIELDS,
)
from graph_fixtures import star_graph


class TestExperimentConfig:
    def test_defaults_validate(self):
        cfg = ExperimentConfig()
        cfg.validate()
        assert cfg.n_list == [250, 500, 1000, 2000, 4000]
        assert cfg.exponent == 2.5

    def test_from_json_with_overrides(self, tmp_path):
        f = tmp_path / "cfg.json"
        f.write_text(json.dumps({"n_list": [100], "master_seed": 7}))
        cfg = ExperimentConfig.from_json(
            f, overrides={"master_seed": 9, "replicas": None}
        )
        assert cfg.n_list == [100]
        assert cfg.master_seed == 9
        assert cfg.replicas == 10  # None override is ignored

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown"):
            ExperimentConfig.from_dict({"n_lst": [100]})

    @pytest.mark.parametrize(
        "bad",
        [
            {"n_list": []},
            {"n_list": [1]},
            {"exponent": 2.0},
            {"k_min": 0},
            {"cutoff": "bogus"},
            {"protocols": ["XX"]},
            {"protocols": []},
            {"ha_fraction": 1.0},
            {"gammas": [1.5]},
            {"t_meas": 0},
            {"replicas": 0},
        ],
    )
    def test_validation_rejects(self, bad):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(bad)

    def test_cutoff_modes(self):
        cfg = ExperimentConfig()
        assert cfg.cutoff_for(10000) == 100
        cfg.cutoff = 12
        assert cfg.cutoff_for(10000) == 12
        cfg.cutoff = None
        assert cfg.cutoff_for(50) == 49

    def test_json_round_trip(self):
        cfg = ExperimentConfig(master_seed=5)
        again = ExperimentConfig.from_dict(json.loads(cfg.to_json_string()))
        assert again == cfg


class TestDeriveSeed:
    def test_deterministic(self):
        assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)

    def test_distinct_coordinates_differ(self):
        seen = {derive_seed(0, i, j) for i in range(10) for j in range(10)}
        assert len(seen) == 100

    def test_order_sensitive(self):
        assert derive_seed(0, 1, 2) != derive_seed(0, 2, 1)


class TestMakeGraph:
    def test_connected_and_sized(self):
        cfg = ExperimentConfig(n_list=[120])
        g, meta = make_graph(120, cfg, seed=derive_seed(3, 0))
        assert g.is_connected()
        assert g.n == meta["realized_n"] <= 120
        assert meta["realized_n"] >= 100  # giant component dominates

    def test_graph_file_short_circuit(self, tmp_path):
        path = tmp_path / "star.txt"
        save_edge_list(star_graph(5), path)
        cfg = ExperimentConfig(graph_file=str(path))
        g, meta = make_graph(None, cfg, seed=0)
        assert g.n == 5
        assert meta == {"target_n": 5, "realized_n": 5, "retries": 0}


class TestScanGamma:
    def _star_cfg(self, tmp_path, **kw):
        path = tmp_path / "star.txt"
        save_edge_list(star_graph(5), path)
        base = dict(
            graph_file=str(path),
            protocols=["SP"],
            gammas=[0.0, 0.1, 0.5],
            t_warm=100,
            t_meas=500,
            replicas=2,
            master_seed=4,
        )
        base.update(kw)
        return ExperimentConfig(**base)

    def test_rows_and_gamma_zero(self, tmp_path):
        cfg = self._star_cfg(tmp_path)
        rows = scan_gamma(cfg)
        assert len(rows) == 6  # 3 gammas x 2 replicas
        for row in rows:
            if row["gamma"] == 0.0:
                assert row["theta"] == 0.0
        # supercritical star point is clearly positive
        assert all(r["theta"] > 0.2 for r in rows if r["gamma"] == 0.5)

    def test_rows_sorted_and_written(self, tmp_path):
        cfg = self._star_cfg(tmp_path)
        out = tmp_path / "scan.csv"
        rows = scan_gamma(cfg, out_path=out)
        keys = [(r["protocol"], r["gamma"], r["replica"]) for r in rows]
        assert keys == sorted(keys)
        parsed = read_csv(out)
        assert [r["theta"] for r in parsed] == [r["theta"] for r in rows]

    def test_needs_gamma_grid(self, tmp_path):
        cfg = self._star_cfg(tmp_path, gammas=[])
        with pytest.raises(ConfigError, match="gamma"):
            scan_gamma(cfg)

    def test_rejects_multiple_sizes(self):
        cfg = ExperimentConfig(n_list=[100, 200], gammas=[0.1])
        with pytest.raises(ConfigError):
            scan_gamma(cfg)

    def test_rejects_large_n(self):
        cfg = ExperimentConfig(n_list=[4000], gammas=[0.1])
        with pytest.raises(ConfigError, match="2000"):
            scan_gamma(cfg)


class TestScalingStudy:
    def test_shape_and_predictions(self):
        cfg = ExperimentConfig(
            n_list=[60, 90, 120], replicas=1, master_seed=11
        )
        rows = scaling_study(cfg)
        assert len(rows) == 6  # 3 sizes x 2 protocols
        for row in rows:
            assert row["protocol"] in ("SP", "HA")
            assert row["B"] > 0
            assert 0 < row["gamma_c_exact"] < row["gamma_c_paper"] <= 1.0

    def test_deterministic_rerun(self, tmp_path):
        cfg = ExperimentConfig(n_list=[60], replicas=2, master_seed=3)
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        scaling_study(cfg, out_path=a)
        scaling_study(cfg, out_path=b)
        assert a.read_bytes() == b.read_bytes()


class TestFitExponent:
    def test_exact_power_law(self):
        pairs = [(n, 2.0 * n**2) for n in (10, 20, 40, 80)]
        fit = fit_exponent(pairs)
        assert fit.slope == pytest.approx(2.0, abs=1e-12)
        assert fit.intercept == pytest.approx(np.log(2.0), abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0)

    def test_median_absorbs_outlier_replica(self):
        pairs = [(n, n**1.5) for n in (10, 20, 40)] * 3
        pairs.append((20, 1e6))  # single wild replica
        fit = fit_exponent(pairs)
        assert fit.slope == pytest.approx(1.5, abs=1e-12)

    def test_constant_data(self):
        fit = fit_exponent([(10, 5.0), (20, 5.0), (40, 5.0)])
        assert fit.slope == pytest.approx(0.0, abs=1e-12)
        assert fit.r_squared == 1.0

    def test_too_few_sizes(self):
        with pytest.raises(ValueError, match="3 distinct"):
            fit_exponent([(10, 1.0), (20, 2.0)])

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            fit_exponent([(10, 0.0), (20, 2.0), (40, 3.0)])
        with pytest.raises(ValueError):
            fit_exponent([(-1, 1.0), (20, 2.0), (40, 3.0)])

    def test_fit_scaling_csv_groups_by_protocol(self):
        rows = [
            {"N": n, "protocol": p, "B": n ** (2.0 if p == "SP" else 1.5)}
            for n in (10, 20, 40)
            for p in ("SP", "HA")
        ]
        fits = fit_scaling_csv(rows)
        assert fits["SP"].slope == pytest.approx(2.0, abs=1e-12)
        assert fits["HA"].slope == pytest.approx(1.5, abs=1e-12)


class TestCsvIo:
    def test_header_comments(self, tmp_path):
        cfg = ExperimentConfig(master_seed=2)
        out = tmp_path / "x.csv"
        rows = [
            {"protocol": "SP", "gamma": 0.1, "theta": 0.05, "replica": 0, "seed": 9}
        ]
        write_csv(out, SCAN_FIELDS, rows, cfg)
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# version=")
        assert lines[1].startswith("# config=")
        assert json.loads(lines[1].split("=", 1)[1])["master_seed"] == 2
        assert lines[2] == ",".join(SCAN_FIELDS)

    def test_float_round_trip_is_lossless(self, tmp_path):
        theta = 0.1 + 0.2  # not exactly representable as 0.3
        out = tmp_path / "x.csv"
        write_csv(
            out,
            SCAN_FIELDS,
            [{"protocol": "SP", "gamma": 1 / 3, "theta": theta, "replica": 0, "seed": 1}],
        )
        row = read_csv(out)[0]
        assert row["theta"] == theta
        assert row["gamma"] == 1 / 3
        assert row["seed"] == 1 and isinstance(row["seed"], int)
