"""Pattern matrices linking usage counts to measured capacity loss.

A cycle test at constant current ``i_bat`` that reaches ``n_cyc`` full cycles
at depth of discharge ``dod`` sweeps the SoC bands inside its swing
``2 * n_cyc / dod`` times. Each sweep of a band takes
``C_Q / (i_bat * n_bd)`` hours, so the lost charge of the record is the sum,
over covered bands, of that time-weighted count times the band's side current.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateCoverageError, IllPosedSystemError, InvalidArgumentError
from .types import SocGrid, uniform_soc_grid

COVERAGE_RULES = ("ranked", "interval")
_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class CycleTestRecord:
    dod: float
    n_cyc: float
    q_s: float

    def __post_init__(self):
        if not 0.0 < self.dod <= 1.0:
            raise InvalidArgumentError(f"DoD must lie in (0, 1], got {self.dod!r}")
        if not self.n_cyc > 0:
            raise InvalidArgumentError(f"cycle count must be positive, got {self.n_cyc!r}")
        if not self.q_s > 0:
            raise InvalidArgumentError(f"lost charge must be positive, got {self.q_s!r}")


@dataclass(frozen=True)
class CycleTestSet:
    """Cycle-test records taken at one battery current.

    Records are stored sorted by ascending DoD.
    """

    i_bat: float
    cell_capacity_ah: float
    records: Tuple[CycleTestRecord, ...]
    soc_grid: SocGrid

    def __post_init__(self):
        if not self.i_bat > 0 or not self.cell_capacity_ah > 0:
            raise InvalidArgumentError("test current and cell capacity must be positive")
        records = tuple(sorted(self.records, key=lambda r: r.dod))
        if len(records) < self.soc_grid.band_count:
            raise InvalidArgumentError(
                f"{len(records)} records cannot identify {self.soc_grid.band_count} bands"
            )
        object.__setattr__(self, "records", records)

    @property
    def traverse_time(self) -> float:
        return band_traverse_time(self.cell_capacity_ah, self.i_bat, self.soc_grid.band_count)


@dataclass(frozen=True, eq=False)
class PatternSystem:
    """Linear system ``matrix @ side_currents = rhs``.

    ``matrix`` is in hours, ``rhs`` in Ah. ``column_labels[k]`` is the
    ``(soc_band_center, current_rate)`` pair of unknown ``k``.
    ``divergent_rows`` lists rows whose band coverage differs between the
    ranked and the interval coverage rules (cycle-test builds only).
    ``cell_capacity_ah`` is carried along when the tests share one cell.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    column_labels: Tuple[Tuple[float, float], ...]
    divergent_rows: Tuple[int, ...] = ()
    cell_capacity_ah: Optional[float] = None

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        rhs = np.array(self.rhs, dtype=float)
        if matrix.ndim != 2 or matrix.size == 0:
            raise InvalidArgumentError("pattern matrix must be a non-empty 2-D array")
        if rhs.shape != (matrix.shape[0],):
            raise InvalidArgumentError(f"rhs shape {rhs.shape} does not match {matrix.shape[0]} rows")
        if np.any(matrix < 0) or not np.all(np.isfinite(matrix)):
            raise InvalidArgumentError("pattern matrix entries must be finite and nonnegative")
        labels = tuple((float(s), float(r)) for s, r in self.column_labels)
        if len(labels) != matrix.shape[1]:
            raise InvalidArgumentError("one column label per unknown is required")
        matrix.setflags(write=False)
        rhs.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "column_labels", labels)
        object.__setattr__(self, "divergent_rows", tuple(self.divergent_rows))

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def rates(self) -> Tuple[float, ...]:
        seen = []
        for _, rate in self.column_labels:
            if rate not in seen:
                seen.append(rate)
        return tuple(seen)

    @classmethod
    def from_counts(
        cls, counts, traverse_times, rhs, column_labels, cell_capacity_ah=None
    ) -> "PatternSystem":
        """Build a system from raw per-(band, rate) visit counts.

        ``counts[i, k]`` is how often measurement ``i`` visited unknown ``k``
        and ``traverse_times[k]`` the time (h) one visit lasts. This is the
        general arbitrary-stimulus form; cycle tests are one generator of it.
        """
        counts = np.asarray(counts, dtype=float)
        times = np.asarray(traverse_times, dtype=float)
        if counts.ndim != 2 or times.shape != (counts.shape[1],):
            raise InvalidArgumentError("need one traverse time per column of counts")
        if np.any(times <= 0):
            raise InvalidArgumentError("traverse times must be positive")
        return cls(counts * times, rhs, column_labels, (), cell_capacity_ah)


def pattern_count(record: CycleTestRecord) -> float:
    """Band visits per record, ``2 * n_cyc / dod``."""
    if record.dod == 0:
        raise InvalidArgumentError("DoD must be nonzero")
    return 2.0 * record.n_cyc / record.dod


def band_traverse_time(c_q: float, i_bat: float, n_bd: int) -> float:
    """Hours needed to cross one of ``n_bd`` SoC bands at current ``i_bat``."""
    if not c_q > 0 or not i_bat > 0:
        raise InvalidArgumentError("capacity and current must be positive")
    if int(n_bd) != n_bd or n_bd < 1:
        raise InvalidArgumentError(f"band count must be a positive integer, got {n_bd!r}")
    return c_q / (i_bat * n_bd)


def covered_bands(dod: float, soc_grid: SocGrid) -> FrozenSet[int]:
    """Indices of band centres inside the swing ``[0.5 - dod/2, 0.5 + dod/2]``."""
    if not 0.0 < dod <= 1.0:
        raise InvalidArgumentError(f"DoD must lie in (0, 1], got {dod!r}")
    lo, hi = 0.5 - dod / 2.0, 0.5 + dod / 2.0
    covered = frozenset(
        l for l, c in enumerate(soc_grid.band_centers) if lo - _EDGE_TOL <= c <= hi + _EDGE_TOL
    )
    if not covered:
        raise DegenerateCoverageError(f"DoD {dod} covers no band centre of {soc_grid.band_centers}")
    return covered


def ranked_bands(rank: int, soc_grid: SocGrid) -> FrozenSet[int]:
    """The ``rank`` band centres nearest to SoC 0.5, lower SoC first on ties.

    With records ordered by DoD, the k-th shallowest swing covers k bands, so
    every deeper test adds exactly one band to the staircase.
    """
    if rank < 1:
        raise InvalidArgumentError("rank starts at 1")
    order = sorted(range(soc_grid.band_count), key=lambda l: (round(abs(soc_grid.band_centers[l] - 0.5), 12), l))
    return frozenset(order[: min(rank, soc_grid.band_count)])


def _record_coverage(test: CycleTestSet, coverage: str) -> Tuple[List[FrozenSet[int]], List[int]]:
    distinct = sorted({r.dod for r in test.records})
    ranked = [ranked_bands(distinct.index(r.dod) + 1, test.soc_grid) for r in test.records]
    interval = []
    for r in test.records:
        try:
            interval.append(covered_bands(r.dod, test.soc_grid))
        except DegenerateCoverageError:
            if coverage == "interval":
                raise
            interval.append(frozenset())
    divergent = [i for i, (a, b) in enumerate(zip(ranked, interval)) if a != b]
    return (ranked if coverage == "ranked" else interval), divergent


def build_pattern_system(test: CycleTestSet, coverage: str = "ranked") -> PatternSystem:
    """Assemble the staircase pattern system of one cycle-test set.

    Row ``i`` holds ``T_b * p_i`` in every column covered by record ``i``.
    ``coverage="ranked"`` grows the covered set by one band per deeper DoD
    (the layout of the published worked example); ``coverage="interval"`` uses
    :func:`covered_bands`. Rows where the two rules disagree are reported in
    ``divergent_rows``.

    Raises
    ------
    DegenerateCoverageError
        A record covers no band under the interval rule.
    IllPosedSystemError
        The matrix lacks full column rank.
    """
    if coverage not in COVERAGE_RULES:
        raise InvalidArgumentError(f"unknown coverage rule {coverage!r}; use one of {COVERAGE_RULES}")
    bands, divergent = _record_coverage(test, coverage)
    t_b = test.traverse_time
    n_bd = test.soc_grid.band_count
    matrix = np.zeros((len(test.records), n_bd))
    for i, (record, cols) in enumerate(zip(test.records, bands)):
        matrix[i, sorted(cols)] = t_b * pattern_count(record)
    rank = np.linalg.matrix_rank(matrix)
    if rank < n_bd:
        raise IllPosedSystemError(
            f"pattern matrix at {test.i_bat} A has rank {rank} < {n_bd} columns "
            f"under the {coverage!r} coverage rule",
            rank=int(rank),
            columns=n_bd,
        )
    labels = tuple((c, test.i_bat) for c in test.soc_grid.band_centers)
    return PatternSystem(
        matrix, [r.q_s for r in test.records], labels, tuple(divergent), test.cell_capacity_ah
    )


def assemble_multirate(systems: Sequence[PatternSystem]) -> PatternSystem:
    """Stack per-rate systems into one block-diagonal system."""
    systems = list(systems)
    if not systems:
        raise InvalidArgumentError("at least one system is required")
    if len(systems) == 1:
        return systems[0]
    rates = [r for s in systems for r in s.rates]
    if len(set(rates)) != len(rates):
        raise InvalidArgumentError(f"duplicate current rates in blocks: {rates}")
    capacities = {s.cell_capacity_ah for s in systems}
    capacity = capacities.pop() if len(capacities) == 1 else None
    rows = sum(s.shape[0] for s in systems)
    cols = sum(s.shape[1] for s in systems)
    matrix = np.zeros((rows, cols))
    rhs = np.zeros(rows)
    labels: list = []
    divergent: list = []
    r0 = c0 = 0
    for s in systems:
        m, n = s.shape
        matrix[r0:r0 + m, c0:c0 + n] = s.matrix
        rhs[r0:r0 + m] = s.rhs
        labels.extend(s.column_labels)
        divergent.extend(r0 + i for i in s.divergent_rows)
        r0 += m
        c0 += n
    return PatternSystem(matrix, rhs, tuple(labels), tuple(divergent), capacity)


def cycle_test_sets(rows: Iterable[dict], bands) -> List[CycleTestSet]:
    """Group cycle-test rows by current into :class:`CycleTestSet` objects.

    ``rows`` hold keys ``i_bat_a, c_q_ah, dod, n_cyc, q_s_ah``. ``bands`` is a
    band count applied to every current, or a sequence with one entry per
    distinct current in order of first appearance. Entries may be an integer
    band count or an explicit :class:`SocGrid`.
    """
    grouped: dict = {}
    capacity: dict = {}
    for row in rows:
        i_bat = float(row["i_bat_a"])
        c_q = float(row["c_q_ah"])
        if capacity.setdefault(i_bat, c_q) != c_q:
            raise InvalidArgumentError(f"inconsistent cell capacity for current {i_bat} A")
        grouped.setdefault(i_bat, []).append(
            CycleTestRecord(float(row["dod"]), float(row["n_cyc"]), float(row["q_s_ah"]))
        )
    if not grouped:
        raise InvalidArgumentError("no cycle-test rows")
    currents = list(grouped)
    if isinstance(bands, (int, SocGrid)):
        bands = [bands] * len(currents)
    bands = list(bands)
    if len(bands) != len(currents):
        raise InvalidArgumentError(f"{len(bands)} band specs for {len(currents)} distinct currents")
    sets = []
    for i_bat, spec in zip(currents, bands):
        grid = spec if isinstance(spec, SocGrid) else uniform_soc_grid(spec)
        sets.append(CycleTestSet(i_bat, capacity[i_bat], tuple(grouped[i_bat]), grid))
    return sets


__all__ = [
    "COVERAGE_RULES",
    "CycleTestRecord",
    "CycleTestSet",
    "PatternSystem",
    "pattern_count",
    "band_traverse_time",
    "covered_bands",
    "ranked_bands",
    "build_pattern_system",
    "assemble_multirate",
    "cycle_test_sets",
]
