"""Growth model that generates outage patterns on a network.

Each pattern starts from one seed line, draws a target size from the Zipf
size model truncated at the network line count, then grows one adjacent line
at a time.  At every step the candidate lines split by whether they touch
the pattern at a bus of degree 1 or of degree 2 and higher; the degree-1
side is taken with probability ``p_one_plus`` when both sides are
available.  Finally each multi-circuit line in the pattern picks up an extra
parallel circuit with probability ``p_circuits``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

import numpy as np

from .errors import CalibrationError, InputFormatError
from .lines import Line, format_line, parse_line
from .network import Network, partition_attachable
from .patterns import Pattern, format_pattern, p_one_plus_observed, parse_pattern
from .rng import substream
from .zipf import ZipfModel


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters of the growth model.

    ``initial_weights`` optionally biases the seed-line draw; lines missing
    from the map get weight 0, and None means uniform over all lines.
    """

    size_model: ZipfModel
    p_one_plus: float
    p_circuits: float = 0.0
    initial_weights: Mapping[Line, float] | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_one_plus <= 1.0:
            raise ValueError(f"p_one_plus must lie in [0, 1], got {self.p_one_plus}")
        if not 0.0 <= self.p_circuits <= 1.0:
            raise ValueError(f"p_circuits must lie in [0, 1], got {self.p_circuits}")


@dataclass(frozen=True)
class GeneratedPattern:
    """One generated pattern plus its extra-circuit outcomes."""

    pattern: Pattern
    extra_circuits: frozenset[Line]
    target_size: int
    achieved_size: int

    def __post_init__(self):
        if not self.extra_circuits <= self.pattern.lines:
            raise ValueError("extra circuits must be lines of the pattern")
        if self.achieved_size != len(self.pattern.lines):
            raise ValueError("achieved_size must equal the pattern line count")
        if self.achieved_size > self.target_size:
            raise ValueError("achieved_size cannot exceed target_size")

    @property
    def saturated(self) -> bool:
        """True when growth ran out of attachable lines before the target."""
        return self.achieved_size < self.target_size


class _Sampler:
    """Precomputed draw tables for one (network, config) pair."""

    def __init__(self, network: Network, config: GeneratorConfig):
        self.network = network
        self.config = config
        self.k_max = network.n_lines
        if config.initial_weights is None:
            self.cum_weights = None
        else:
            weights = np.zeros(network.n_lines)
            unknown = set(config.initial_weights) - network.line_set
            if unknown:
                raise ValueError(f"initial weights for lines outside the network: {sorted(unknown)[:3]}")
            for i, line in enumerate(network.lines):
                w = float(config.initial_weights.get(line, 0.0))
                if w < 0:
                    raise ValueError(f"negative initial weight for line {line}")
                weights[i] = w
            total = weights.sum()
            if total <= 0:
                raise ValueError("initial weights sum to zero")
            self.cum_weights = np.cumsum(weights / total)

    def initial_line(self, rng: np.random.Generator) -> Line:
        if self.cum_weights is None:
            return self.network.lines[int(rng.integers(self.network.n_lines))]
        idx = int(np.searchsorted(self.cum_weights, rng.random(), side="right"))
        return self.network.lines[min(idx, self.network.n_lines - 1)]


def _grow(network: Network, first: Line, target: int, p_one_plus: float, rng) -> set[Line]:
    """Grow a connected line set from ``first`` toward ``target`` lines.

    Stops early only if both candidate sides are empty, which on a connected
    network means the pattern already covers every line.
    """
    lines = {first}
    degrees = {first[0]: 1, first[1]: 1}
    while len(lines) < target:
        at_deg1, at_deg2 = partition_attachable(network, lines, degrees)
        if at_deg1 and at_deg2:
            side = at_deg1 if rng.random() < p_one_plus else at_deg2
        elif at_deg1:
            side = at_deg1
        elif at_deg2:
            side = at_deg2
        else:
            break
        line = side[int(rng.integers(len(side)))]
        lines.add(line)
        for bus in line:
            degrees[bus] = degrees.get(bus, 0) + 1
    return lines


def generate_pattern(network: Network, config: GeneratorConfig, rng: np.random.Generator) -> GeneratedPattern:
    """Generate a single pattern, drawing everything from ``rng``."""
    return _generate_one(_Sampler(network, config), rng)


def _generate_one(sampler: _Sampler, rng: np.random.Generator) -> GeneratedPattern:
    config = sampler.config
    network = sampler.network
    first = sampler.initial_line(rng)
    target = config.size_model.sample_size(rng, sampler.k_max)
    if target == 1:
        lines = {first}
    else:
        lines = _grow(network, first, target, config.p_one_plus, rng)
    extra: list[Line] = []
    if config.p_circuits > 0.0:
        for line in sorted(lines):
            if network.multiplicity.get(line, 1) >= 2 and rng.random() < config.p_circuits:
                extra.append(line)
    return GeneratedPattern(
        pattern=Pattern(frozenset(lines)),
        extra_circuits=frozenset(extra),
        target_size=target,
        achieved_size=len(lines),
    )


def _ensemble_chunk(network: Network, config: GeneratorConfig, start: int, stop: int) -> list[GeneratedPattern]:
    sampler = _Sampler(network, config)
    return [_generate_one(sampler, substream(config.seed, i)) for i in range(start, stop)]


def generate_ensemble(
    network: Network, config: GeneratorConfig, count: int, workers: int = 1
) -> list[GeneratedPattern]:
    """Generate ``count`` patterns, pattern i drawn from stream (seed, i).

    The per-pattern streams make the result identical for any ``workers``
    value; workers only change how the index range is divided.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    if count == 0:
        return []
    if workers <= 1:
        return _ensemble_chunk(network, config, 0, count)
    chunk = max(1, -(-count // (workers * 4)))
    bounds = list(range(0, count, chunk)) + [count]
    out: list[GeneratedPattern] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_ensemble_chunk, network, config, lo, hi)
            for lo, hi in itertools.pairwise(bounds)
        ]
        for future in futures:
            out.extend(future.result())
    return out


def measure_p_one_plus_generated(generated: Iterable[GeneratedPattern]) -> float | None:
    """Branching-probability estimate over generated patterns.

    Uses the same pooled estimator as for observed patterns, so calibration
    compares like with like.  Returns None when no generated pattern has 3
    or more lines.
    """
    return p_one_plus_observed(g.pattern for g in generated)


@dataclass(frozen=True)
class CalibrationStep:
    """One evaluation of the generated branching probability."""

    index: int
    p_one_plus: float
    generated_value: float
    low: float
    high: float


@dataclass(frozen=True)
class CalibrationResult:
    """Outcome of calibrating ``p_one_plus`` to an observed target."""

    p_one_plus: float
    generated_value: float
    target: float
    tolerance: float
    converged: bool
    steps: tuple[CalibrationStep, ...]


def calibrate_p_one_plus(
    network: Network,
    config: GeneratorConfig,
    target: float,
    *,
    ensemble_size: int = 1_000_000,
    tolerance: float = 0.005,
    max_iterations: int = 20,
    workers: int = 1,
) -> CalibrationResult:
    """Find the ``p_one_plus`` whose generated value matches the target.

    Bisection on [0, 1].  Every iterate regenerates the ensemble from the
    same per-pattern streams (config.seed is held fixed), so the generated
    value is a deterministic, nearly monotone function of the parameter and
    the bisection is not chasing sampling noise.

    Raises CalibrationError when the target lies outside what the network
    can produce at the endpoints, or when no generated pattern ever has 3
    or more lines.
    """
    if not 0.0 <= target <= 1.0:
        raise ValueError(f"target must lie in [0, 1], got {target}")
    steps: list[CalibrationStep] = []

    def evaluate(p: float, low: float, high: float) -> float:
        ensemble = generate_ensemble(network, replace(config, p_one_plus=p), ensemble_size, workers)
        value = measure_p_one_plus_generated(ensemble)
        if value is None:
            raise CalibrationError(
                "no generated pattern had 3 or more lines; the network or "
                "size model cannot express the branching statistic",
                target=target,
            )
        steps.append(CalibrationStep(len(steps), p, value, low, high))
        return value

    def result(p: float, value: float, converged: bool) -> CalibrationResult:
        return CalibrationResult(p, value, target, tolerance, converged, tuple(steps))

    g_low = evaluate(0.0, 0.0, 1.0)
    if abs(g_low - target) <= tolerance:
        return result(0.0, g_low, True)
    g_high = evaluate(1.0, 0.0, 1.0)
    if abs(g_high - target) <= tolerance:
        return result(1.0, g_high, True)
    if not min(g_low, g_high) < target < max(g_low, g_high):
        raise CalibrationError(
            f"target {target:.4f} is unreachable: generated value spans "
            f"[{min(g_low, g_high):.4f}, {max(g_low, g_high):.4f}] over p_one_plus in [0, 1]",
            target=target,
            low=g_low,
            high=g_high,
        )
    increasing = g_high > g_low
    low, high = 0.0, 1.0
    mid, g_mid = 0.5, g_low
    for _ in range(max_iterations):
        mid = 0.5 * (low + high)
        g_mid = evaluate(mid, low, high)
        if abs(g_mid - target) <= tolerance:
            return result(mid, g_mid, True)
        if (g_mid < target) == increasing:
            low = mid
        else:
            high = mid
    return result(mid, g_mid, False)


def format_calibration_trace(calibration: CalibrationResult) -> str:
    """Structured text form of a calibration run."""
    lines = [
        f"target: {calibration.target:.6f}",
        f"tolerance: {calibration.tolerance:.6f}",
    ]
    for step in calibration.steps:
        lines.append(
            f"step {step.index}: p_one_plus={step.p_one_plus:.6f} "
            f"generated={step.generated_value:.6f} "
            f"bracket=[{step.low:.6f},{step.high:.6f}]"
        )
    lines.append(f"calibrated_p_one_plus: {calibration.p_one_plus:.6f}")
    lines.append(f"generated_value: {calibration.generated_value:.6f}")
    lines.append(f"converged: {str(calibration.converged).lower()}")
    return "\n".join(lines) + "\n"


def format_generated_pattern(generated: GeneratedPattern) -> str:
    """Pattern text plus a ``|+FROM-TO`` suffix per extra circuit."""
    text = format_pattern(generated.pattern.lines)
    for line in sorted(generated.extra_circuits):
        text += f"|+{format_line(line)}"
    return text


def parse_generated_pattern(text: str) -> GeneratedPattern:
    """Parse one line of a generated-ensemble file.

    Reading recovers the lines and extra circuits; the target size is not
    stored, so it is taken to equal the achieved size.
    """
    parts = text.strip().split("|")
    lines = parse_pattern(parts[0])
    extra: set[Line] = set()
    for token in parts[1:]:
        if not token.startswith("+"):
            raise ValueError(f"malformed extra-circuit token: {token!r}")
        extra.add(parse_line(token[1:]))
    if not extra <= lines:
        raise ValueError("extra circuit on a line not in the pattern")
    return GeneratedPattern(
        pattern=Pattern(frozenset(lines)),
        extra_circuits=frozenset(extra),
        target_size=len(lines),
        achieved_size=len(lines),
    )


def write_generated_patterns(path, generated: Iterable[GeneratedPattern]) -> None:
    """Write one generated pattern per line in input order."""
    with open(path, "w", newline="") as fh:
        for gp in generated:
            fh.write(format_generated_pattern(gp))
            fh.write("\n")


def read_generated_patterns(path) -> list[GeneratedPattern]:
    """Read a file written by :func:`write_generated_patterns`."""
    out: list[GeneratedPattern] = []
    with open(path) as fh:
        for lineno, text in enumerate(fh, start=1):
            text = text.strip()
            if not text:
                continue
            try:
                out.append(parse_generated_pattern(text))
            except ValueError as exc:
                raise InputFormatError(f"{path}: line {lineno}: {exc}") from exc
    return out
