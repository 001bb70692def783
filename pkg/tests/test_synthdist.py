import io
import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from rankmetrics.synthdist import (
    REAL,
    SYNTHETIC,
    CitationSeries,
    ConfigError,
    EnsembleConfig,
    GridError,
    LognormalSpec,
    build_grid,
    combine_series,
    generate_ensemble,
    load_config,
    sample_series,
    series_label,
    write_specs_csv,
    write_values_csv,
)


def test_default_world_grid_counts():
    config = EnsembleConfig(4.0, 2.0, 200, (800, 400, 200), seed=1)
    specs = build_grid(config)
    assert len(specs) == 600
    assert sum(s.n for s in specs) == 280_000
    assert config.total_papers == 280_000
    assert specs[0].label == "aa"
    assert specs[-1].label == "xb"
    assert len({s.label for s in specs}) == 600


def test_degenerate_grid():
    specs = build_grid(EnsembleConfig(3.0, 3.0, 1, (100,)))
    assert len(specs) == 1
    assert specs[0].mu == 3.0
    assert specs[0].n == 100


def test_three_point_spacing():
    specs = build_grid(EnsembleConfig(4.0, 2.0, 3, (10,)))
    assert [s.mu for s in specs] == [4.0, 3.0, 2.0]


def test_single_mu_with_distinct_endpoints_rejected():
    with pytest.raises(GridError):
        build_grid(EnsembleConfig(4.0, 2.0, 1, (10,)))


def test_labels_continue_past_two_letters():
    assert series_label(0) == "aa"
    assert series_label(599) == "xb"
    assert series_label(675) == "zz"
    assert series_label(676) == "aaa"
    labels = [series_label(i) for i in range(1500)]
    assert len(set(labels)) == 1500


@given(
    mu_count=st.integers(1, 20),
    sizes=st.lists(st.integers(1, 50), min_size=1, max_size=4),
)
@settings(max_examples=100, deadline=None)
def test_grid_labels_unique_totals_match(mu_count, sizes):
    config = EnsembleConfig(3.0, 3.0 if mu_count == 1 else 2.0, mu_count, tuple(sizes))
    specs = build_grid(config)
    assert len(specs) == mu_count * len(sizes)
    assert len({s.label for s in specs}) == len(specs)
    assert sum(s.n for s in specs) == config.total_papers


def test_sample_log_mean_near_mu():
    spec = LognormalSpec("s", 3.0, 1.1, 10_000)
    series = sample_series(spec, seed=11, stream_id=0)
    assert abs(np.mean(np.log(series.values)) - 3.0) < 3 * 1.1 / math.sqrt(10_000)


def test_sample_vanishing_variance():
    spec = LognormalSpec("s", 0.0, 1e-12, 5)
    series = sample_series(spec, seed=1, stream_id=0)
    assert np.all(np.abs(series.values - 1.0) < 1e-9)


def test_sample_determinism_bytes():
    spec = LognormalSpec("s", 2.5, 1.1, 1000)
    a = sample_series(spec, seed=99, stream_id=3)
    b = sample_series(spec, seed=99, stream_id=3)
    assert a.values.tobytes() == b.values.tobytes()


def test_streams_are_independent():
    spec = LognormalSpec("s", 2.5, 1.1, 100)
    a = sample_series(spec, seed=99, stream_id=0)
    b = sample_series(spec, seed=99, stream_id=1)
    assert not np.array_equal(a.values, b.values)


def test_log_values_pass_ks_in_most_seeds():
    # lognormality gate for the sampler: KS p-value above the 1% level
    # in at least 95% of seeds
    spec = LognormalSpec("s", 3.0, 1.1, 10_000)
    passed = 0
    seeds = range(40)
    for seed in seeds:
        series = sample_series(spec, seed=seed, stream_id=0)
        stat = scipy.stats.kstest(np.log(series.values), "norm", args=(3.0, 1.1))
        passed += stat.pvalue > 0.01
    assert passed >= 0.95 * len(seeds)


def test_combine_sizes():
    parts = [
        sample_series(LognormalSpec("a", 3.0, 1.1, 800), 1, 0),
        sample_series(LognormalSpec("b", 3.0, 1.1, 800), 1, 1),
        sample_series(LognormalSpec("c", 3.0, 1.1, 400), 1, 2),
    ]
    combined = combine_series(parts, "big")
    assert combined.n == 2000
    assert combined.label == "big"
    assert np.array_equal(combined.values[:800], parts[0].values)


def test_combine_single_identity():
    part = sample_series(LognormalSpec("a", 3.0, 1.1, 50), 1, 0)
    relabeled = combine_series([part], "z")
    assert relabeled.label == "z"
    assert np.array_equal(relabeled.values, part.values)


def test_combine_empty_rejected():
    with pytest.raises(ValueError):
        combine_series([], "x")


def test_combine_mixed_origin_rejected():
    synth = CitationSeries("a", [1.0, 2.0], origin=SYNTHETIC)
    real = CitationSeries("b", [1, 2], origin=REAL)
    with pytest.raises(ValueError):
        combine_series([synth, real], "x")


def test_ensemble_reproducible_and_order_free():
    config = EnsembleConfig(4.0, 2.0, 5, (30, 20), seed=123)
    one = generate_ensemble(config)
    two = generate_ensemble(config)
    threaded = generate_ensemble(config, jobs=4)
    for s1, s2, s3 in zip(one.series, two.series, threaded.series):
        assert s1.values.tobytes() == s2.values.tobytes() == s3.values.tobytes()


def test_series_validation():
    with pytest.raises(ValueError):
        CitationSeries("a", [1.0, 0.0], origin=SYNTHETIC)
    with pytest.raises(ValueError):
        CitationSeries("a", [1.5], origin=REAL)
    with pytest.raises(ValueError):
        CitationSeries("a", [-1], origin=REAL)
    ok = CitationSeries("a", [0, 3, 2], origin=REAL)
    assert ok.n == 3


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "grid.cfg"
    path.write_text(
        "# comment\nmu_start = 4.0\nmu_end = 2.0\nmu_count = 200\n"
        "sizes = 800,400,200\nseed = 42\n"
    )
    config = load_config(path)
    assert config == EnsembleConfig(4.0, 2.0, 200, (800, 400, 200), seed=42)


@pytest.mark.parametrize(
    "text",
    [
        "mu_start = 4.0\n",  # missing keys
        "mu_start = 4.0\nmu_end = 2.0\nmu_count = 2\nsizes = 10\nseed = 1\nbogus = 3\n",
        "mu_start4.0\nmu_end = 2.0\nmu_count = 2\nsizes = 10\nseed = 1\n",
        "mu_start = 4.0\nmu_start = 3.0\nmu_end = 2.0\nmu_count = 2\nsizes = 10\nseed = 1\n",
    ],
)
def test_config_file_rejects_bad_text(tmp_path, text):
    path = tmp_path / "bad.cfg"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_config(path)


def test_csv_exports():
    config = EnsembleConfig(4.0, 2.0, 2, (3, 2), seed=5)
    ensemble = generate_ensemble(config)
    spec_buf, value_buf = io.StringIO(), io.StringIO()
    write_specs_csv(ensemble.specs, spec_buf)
    write_values_csv(ensemble.series, value_buf)
    spec_lines = spec_buf.getvalue().splitlines()
    assert spec_lines[0] == "label,mu,sigma,n"
    assert len(spec_lines) == 1 + 4
    value_lines = value_buf.getvalue().splitlines()
    assert value_lines[0] == "label,value"
    assert len(value_lines) == 1 + config.total_papers
