"""Growth model: determinism, distributional fidelity, calibration."""

from __future__ import annotations

from collections import Counter, deque

import numpy as np
import pytest
from scipy import stats

from gridpatterns.errors import CalibrationError, InputFormatError
from gridpatterns.generator import (
    CalibrationResult,
    GeneratedPattern,
    GeneratorConfig,
    _grow,
    calibrate_p_one_plus,
    format_calibration_trace,
    format_generated_pattern,
    generate_ensemble,
    generate_pattern,
    measure_p_one_plus_generated,
    parse_generated_pattern,
    read_generated_patterns,
    write_generated_patterns,
)
from gridpatterns.network import Network
from gridpatterns.patterns import Pattern, degree_sequence
from gridpatterns.rng import substream
from gridpatterns.zipf import ZipfModel


def _config(s: float, p: float, **kwargs) -> GeneratorConfig:
    return GeneratorConfig(size_model=ZipfModel(s), p_one_plus=p, **kwargs)


def _pattern(*lines) -> Pattern:
    return Pattern(frozenset(lines))


def _connected(lines) -> bool:
    lines = set(lines)
    adjacency: dict[str, set[str]] = {}
    for a, b in lines:
        adjacency.setdefault(a, set()).add(b)
        adjacency.setdefault(b, set()).add(a)
    start = next(iter(adjacency))
    seen = {start}
    queue = deque([start])
    while queue:
        bus = queue.popleft()
        for other in adjacency[bus]:
            if other not in seen:
                seen.add(other)
                queue.append(other)
    return seen == set(adjacency)


def test_config_validation():
    with pytest.raises(ValueError):
        _config(4.0, -0.1)
    with pytest.raises(ValueError):
        _config(4.0, 1.1)
    with pytest.raises(ValueError):
        _config(4.0, 0.5, p_circuits=2.0)


def test_generated_pattern_validation():
    pat = _pattern(("A", "B"), ("B", "C"))
    with pytest.raises(ValueError):
        GeneratedPattern(pat, frozenset({("C", "D")}), 2, 2)
    with pytest.raises(ValueError):
        GeneratedPattern(pat, frozenset(), 2, 1)
    with pytest.raises(ValueError):
        GeneratedPattern(pat, frozenset(), 1, 2)
    ok = GeneratedPattern(pat, frozenset({("A", "B")}), 5, 2)
    assert ok.saturated
    assert not GeneratedPattern(pat, frozenset(), 2, 2).saturated


def test_single_line_network_always_single_line_patterns():
    # Zipf targets are capped at the network line count
    net = Network([("A", "B")])
    for gp in generate_ensemble(net, _config(1.5, 0.5), 40):
        assert gp.pattern.lines == {("A", "B")}
        assert gp.target_size == 1
        assert gp.achieved_size == 1
        assert not gp.saturated


def test_grow_along_forced_path(path4):
    # only degree-1 attachments exist on a path, so growth is forced
    rng = substream(3)
    lines = _grow(path4, ("A", "B"), 3, 0.0, rng)
    assert lines == {("A", "B"), ("B", "C"), ("C", "D")}
    lines = _grow(path4, ("B", "C"), 2, 0.7, substream(4))
    assert lines in ({("A", "B"), ("B", "C")}, {("B", "C"), ("C", "D")})


def test_grow_respects_target(mesh480):
    rng = substream(9)
    for target in (1, 2, 5, 12):
        lines = _grow(mesh480, mesh480.lines[0], target, 0.4, rng)
        assert len(lines) == target
        assert _connected(lines)


def test_forced_initial_line(star4):
    config = _config(2.0, 0.5, initial_weights={("A", "X"): 1.0})
    for gp in generate_ensemble(star4, config, 30):
        assert ("A", "X") in gp.pattern.lines


def test_star_growth_ignores_p_one_plus(star4):
    # on a star only one candidate side is ever non-empty, so the side-choice
    # draw is never consumed and p_one_plus cannot change the stream
    low = generate_ensemble(star4, _config(2.0, 0.0, seed=5), 60)
    high = generate_ensemble(star4, _config(2.0, 1.0, seed=5), 60)
    assert low == high
    sizes = {gp.achieved_size for gp in low}
    assert sizes == {1, 2, 3, 4}


def test_same_seed_reproducible(mesh480):
    config = _config(3.0, 0.4, p_circuits=0.3, seed=21)
    assert generate_ensemble(mesh480, config, 50) == generate_ensemble(mesh480, config, 50)
    changed = generate_ensemble(mesh480, _config(3.0, 0.4, p_circuits=0.3, seed=22), 50)
    assert changed != generate_ensemble(mesh480, config, 50)


def test_workers_do_not_change_results(mesh480):
    config = _config(2.5, 0.6, p_circuits=0.2, seed=13)
    serial = generate_ensemble(mesh480, config, 42, workers=1)
    parallel = generate_ensemble(mesh480, config, 42, workers=3)
    assert serial == parallel


def test_ensemble_count_validation(path3):
    assert generate_ensemble(path3, _config(2.0, 0.5), 0) == []
    with pytest.raises(ValueError):
        generate_ensemble(path3, _config(2.0, 0.5), -1)


def test_initial_weights_validation(path3):
    rng = substream(0)
    with pytest.raises(ValueError):
        generate_pattern(path3, _config(2.0, 0.5, initial_weights={("Q", "Z"): 1.0}), rng)
    with pytest.raises(ValueError):
        generate_pattern(path3, _config(2.0, 0.5, initial_weights={("A", "B"): -1.0}), rng)
    with pytest.raises(ValueError):
        generate_pattern(path3, _config(2.0, 0.5, initial_weights={("A", "B"): 0.0}), rng)


def test_initial_weights_frequencies(path3):
    config = _config(20.0, 0.5, initial_weights={("A", "B"): 3.0, ("B", "C"): 1.0}, seed=7)
    ensemble = generate_ensemble(path3, config, 2000)
    counts = Counter(next(iter(gp.pattern.lines)) for gp in ensemble if gp.achieved_size == 1)
    freq = counts[("A", "B")] / sum(counts.values())
    assert freq == pytest.approx(0.75, abs=0.03)


def test_size_distribution_matches_model(mesh480):
    model = ZipfModel(4.09)
    config = GeneratorConfig(size_model=model, p_one_plus=0.3, seed=2)
    ensemble = generate_ensemble(mesh480, config, 1500)
    observed = Counter(min(gp.achieved_size, 4) for gp in ensemble)
    probs = [float(model.pmf(k)) for k in (1, 2, 3)]
    probs.append(1.0 - sum(probs))
    counts = [observed.get(k, 0) for k in (1, 2, 3, 4)]
    result = stats.chisquare(counts, [p * len(ensemble) for p in probs])
    assert result.pvalue > 0.01


def test_generated_patterns_are_connected_subgraphs(mesh480):
    config = _config(2.0, 0.5, p_circuits=0.5, seed=17)
    for gp in generate_ensemble(mesh480, config, 300):
        assert gp.pattern.lines <= mesh480.line_set
        assert _connected(gp.pattern.lines)
        assert gp.achieved_size == len(gp.pattern.lines)
        assert gp.achieved_size <= gp.target_size <= mesh480.n_lines
        assert not gp.saturated
        for line in gp.extra_circuits:
            assert mesh480.multiplicity[line] >= 2


def test_p_circuits_edge_values(mesh480):
    none = generate_ensemble(mesh480, _config(2.5, 0.5, p_circuits=0.0, seed=3), 200)
    assert all(not gp.extra_circuits for gp in none)
    every = generate_ensemble(mesh480, _config(2.5, 0.5, p_circuits=1.0, seed=3), 200)
    for gp in every:
        expected = {line for line in gp.pattern.lines if mesh480.multiplicity[line] >= 2}
        assert gp.extra_circuits == expected
    # growth streams are shared: p_circuits only adds draws after growth
    assert [gp.pattern for gp in none] == [gp.pattern for gp in every]


def test_measure_hand_values():
    chain = GeneratedPattern(_pattern(("A", "B"), ("B", "C"), ("C", "D")), frozenset(), 3, 3)
    star = GeneratedPattern(_pattern(("A", "X"), ("B", "X"), ("C", "X")), frozenset(), 3, 3)
    single = GeneratedPattern(_pattern(("A", "B")), frozenset(), 1, 1)
    assert measure_p_one_plus_generated([chain]) == pytest.approx(1.0)
    assert measure_p_one_plus_generated([star]) == pytest.approx(0.0)
    assert measure_p_one_plus_generated([chain, star]) == pytest.approx(0.5)
    assert measure_p_one_plus_generated([single]) is None
    assert measure_p_one_plus_generated([]) is None


def test_measured_value_increases_with_p(mesh480):
    values = []
    for p in (0.0, 0.5, 1.0):
        ensemble = generate_ensemble(mesh480, _config(2.5, p, seed=29), 3000)
        values.append(measure_p_one_plus_generated(ensemble))
    assert values[0] < values[1] < values[2]


def test_calibration_round_trip(mesh480):
    # common random numbers make the generated value an exact function of p,
    # so calibrating to a measured value recovers a nearby parameter
    probe = generate_ensemble(mesh480, _config(4.09, 0.3, seed=0), 10_000)
    target = measure_p_one_plus_generated(probe)
    result = calibrate_p_one_plus(
        mesh480,
        _config(4.09, 0.5, seed=0),
        target,
        ensemble_size=10_000,
        tolerance=0.01,
    )
    assert result.converged
    assert abs(result.generated_value - target) <= result.tolerance
    assert abs(result.p_one_plus - 0.3) < 0.1
    # endpoints first, then nested brackets
    assert result.steps[0].p_one_plus == 0.0
    assert result.steps[1].p_one_plus == 1.0
    for earlier, later in zip(result.steps[2:], result.steps[3:]):
        assert later.low >= earlier.low
        assert later.high <= earlier.high
        assert earlier.low <= later.p_one_plus <= earlier.high


def test_calibration_unreachable_target(mesh480):
    with pytest.raises(CalibrationError) as info:
        calibrate_p_one_plus(
            mesh480, _config(4.09, 0.5, seed=0), 0.0, ensemble_size=4000, tolerance=0.005
        )
    err = info.value
    assert err.target == 0.0
    assert err.low is not None and err.low > 0.0
    assert err.high is not None


def test_calibration_endpoint_accepted(star4):
    # stars never branch at degree-1 buses, so the measured value is 0 at
    # every p and the low endpoint matches a target of 0 immediately
    result = calibrate_p_one_plus(
        star4, _config(2.0, 0.5, seed=1), 0.0, ensemble_size=2000, tolerance=0.005
    )
    assert result.converged
    assert result.p_one_plus == 0.0
    assert len(result.steps) == 1


def test_calibration_target_validation(path3):
    with pytest.raises(ValueError):
        calibrate_p_one_plus(path3, _config(2.0, 0.5), 1.5, ensemble_size=100)


def test_saturation_on_small_network(path3):
    lines = _grow(path3, ("A", "B"), 10, 0.5, substream(1))
    assert lines == {("A", "B"), ("B", "C")}
    gp = GeneratedPattern(Pattern(frozenset(lines)), frozenset(), 10, 2)
    assert gp.saturated


def test_calibration_trace_format(star4):
    result = calibrate_p_one_plus(
        star4, _config(2.0, 0.5, seed=1), 0.0, ensemble_size=1000, tolerance=0.005
    )
    text = format_calibration_trace(result)
    assert "target: 0.000000" in text
    assert "step 0: p_one_plus=0.000000" in text
    assert text.endswith("converged: true\n")


def test_generated_pattern_text_round_trip():
    gp = GeneratedPattern(
        _pattern(("A", "B"), ("B", "C")), frozenset({("A", "B")}), 2, 2
    )
    text = format_generated_pattern(gp)
    assert text == "A-B;B-C|+A-B"
    back = parse_generated_pattern(text)
    assert back.pattern.lines == gp.pattern.lines
    assert back.extra_circuits == gp.extra_circuits
    assert back.target_size == back.achieved_size == 2


def test_parse_generated_pattern_rejects_malformed():
    with pytest.raises(ValueError):
        parse_generated_pattern("A-B|B-C")
    with pytest.raises(ValueError):
        parse_generated_pattern("A-B|+B-C")


def test_generated_pattern_file_round_trip(tmp_path, mesh480):
    config = _config(2.5, 0.5, p_circuits=0.5, seed=31)
    ensemble = generate_ensemble(mesh480, config, 150)
    path = tmp_path / "generated.txt"
    write_generated_patterns(path, ensemble)
    back = read_generated_patterns(path)
    assert len(back) == len(ensemble)
    for original, parsed in zip(ensemble, back):
        assert parsed.pattern.lines == original.pattern.lines
        assert parsed.extra_circuits == original.extra_circuits
    assert measure_p_one_plus_generated(back) == measure_p_one_plus_generated(ensemble)


def test_read_generated_patterns_error_has_line_number(tmp_path):
    path = tmp_path / "generated.txt"
    path.write_text("A-B;B-C\nA-B|+B-C\n")
    with pytest.raises(InputFormatError, match="line 2"):
        read_generated_patterns(path)


def test_generated_degree_sequences_are_plausible(mesh480):
    # growth at p=1 prefers chain extension; p=0 prefers thickening
    chains = generate_ensemble(mesh480, _config(2.0, 1.0, seed=41), 400)
    chain_seqs = [degree_sequence(gp.pattern) for gp in chains if gp.achieved_size == 3]
    assert chain_seqs.count((2, 2, 1, 1)) > len(chain_seqs) * 0.8
    stars = generate_ensemble(mesh480, _config(2.0, 0.0, seed=41), 400)
    star_seqs = [degree_sequence(gp.pattern) for gp in stars if gp.achieved_size == 3]
    assert star_seqs.count((3, 1, 1, 1)) > len(star_seqs) * 0.8
