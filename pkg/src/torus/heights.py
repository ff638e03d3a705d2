"""
높이 수열 αx_n + βy_n mod 1 과 그 분포 측정.

- `heights`: 보행의 모든 위치에서 높이를 계산합니다 (시작점 포함, n+1 개).
- `gap_analysis`: 원 위 최대 빈 호(largest gap)와 δ-덮임 측도.
- `equidistribution_report`: 히스토그램, 균등분포 대비 최대 편차, 이산 불일치도(discrepancy).
- `density_reproductions`: 문헌의 Fibonacci 실험 쌍들을 다시 돌려 조밀/회피 판정을 표로 냅니다.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from src.torus.sequences import (IrrationalPair, StepSequence, STEP_VECTORS, fibonacci_rules,
                                 substitution_sequence)

# 높이 차이 검사의 반올림 허용오차.
RECURRENCE_TOL = 1e-12

_PHI = (1 + math.sqrt(5)) / 2
# 문헌에서 "조밀"로 관찰된 쌍과 "구간을 피함"으로 관찰된 쌍.
DENSE_PAIRS = {
    "(sqrt2, sqrt3)": (math.sqrt(2), math.sqrt(3)),
    "(pi, pi^2)": (math.pi, math.pi ** 2),
    "(pi, sqrt2)": (math.pi, math.sqrt(2)),
    "(pi, pi^3)": (math.pi, math.pi ** 3),
    "(pi^3, pi)": (math.pi ** 3, math.pi),
    "(pi, e)": (math.pi, math.e),
    "(e, pi)": (math.e, math.pi),
    "(sqrt2, phi)": (math.sqrt(2), _PHI),
}
AVOID_PAIRS = {
    "(2(2-sqrt3)/(1+sqrt5), sqrt3)": (2 * (2 - math.sqrt(3)) / (1 + math.sqrt(5)), math.sqrt(3)),
    "(2(2-sqrt2)/(1+sqrt5), sqrt2)": (2 * (2 - math.sqrt(2)) / (1 + math.sqrt(5)), math.sqrt(2)),
}
DENSE_MAX_GAP = 0.01
AVOID_MIN_GAP = 0.02
SWAPPED_LETTER_STEPS = {"0": "U", "1": "R"}


@dataclass(frozen=True)
class HeightTrace:
    """
    높이 수열.

    Attributes:
        values (np.ndarray): (αx_n + βy_n) mod 1, n = 0..len(seq). values[0] 은 시작점의 높이.
        pair (IrrationalPair): 사용한 (α, β).
        kind (str): 원천 보행 라벨.
    """
    values: np.ndarray
    pair: IrrationalPair
    kind: str = "steps"

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)

    def recurrence_ok(self, tol: float = RECURRENCE_TOL) -> bool:
        """연속 높이의 차이가 mod 1 에서 ±α 또는 ±β 인지 검사합니다."""
        if self.values.size < 2:
            return True
        diff = np.diff(self.values)
        allowed = np.array([self.pair.alpha, self.pair.beta, -self.pair.alpha, -self.pair.beta])
        dev = (diff[:, None] - allowed[None, :]) % 1.0
        dev = np.minimum(dev, 1.0 - dev)
        return bool(np.all(dev.min(axis=1) <= tol))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"n": np.arange(self.values.size), "height": self.values})


@dataclass(frozen=True)
class CoverageReport:
    """
    높이 집합의 덮임 보고서.

    Attributes:
        n: 표본 수.
        resolution: δ.
        covered_measure: 표본에서 δ 이내인 점들의 측도.
        largest_gap: 가장 긴 빈 호(원) 또는 빈 구간(interval 이 있을 때)의 길이.
        gap_start: 그 빈 호의 시작점.
        interval: 구간 검사일 때 (lo, hi). 원 검사면 None.
        passed: 구간 검사에서 δ-조밀 판정. 원 검사면 None.
    """
    n: int
    resolution: float
    covered_measure: float
    largest_gap: float
    gap_start: float
    interval: tuple[float, float] | None = None
    passed: bool | None = None

    def to_frame(self) -> pd.DataFrame:
        row = {"n": self.n, "delta": self.resolution, "covered_measure": self.covered_measure,
               "largest_gap": self.largest_gap, "gap_start": self.gap_start}
        if self.interval is not None:
            row.update({"interval_lo": self.interval[0], "interval_hi": self.interval[1],
                        "passed": self.passed})
        return pd.DataFrame([row])


def heights(seq: StepSequence, pair: IrrationalPair) -> HeightTrace:
    """
    보행의 위치 (x_n, y_n) 에서 αx_n + βy_n mod 1.

    정수 좌표의 곱을 분할 계산(`IrrationalPair.lattice_heights`)으로 정확히 더하므로
    긴 보행에서도 누적 오차가 생기지 않습니다.
    """
    pos = seq.positions()
    frac, _ = pair.lattice_heights(pos[:, 0], pos[:, 1])
    return HeightTrace(frac, pair, seq.kind)


def gap_analysis(trace: HeightTrace | np.ndarray, delta: float) -> CoverageReport:
    """
    원 [0,1) 위에서 가장 긴 빈 호와 δ-덮임 측도를 잽니다.

    빈 호 g 마다 덮인 길이는 min(g, 2δ) 이므로 덮임 측도는 Σ min(g_i, 2δ) 입니다.

    Raises:
        ValueError: δ ∉ (0, 0.5) 또는 빈 수열.
    """
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta 는 (0, 0.5) 안에 있어야 합니다: {delta}")
    values = trace.values if isinstance(trace, HeightTrace) else np.asarray(trace, dtype=float)
    if values.size == 0:
        raise ValueError("빈 높이 수열입니다.")
    pts = np.unique(np.mod(values, 1.0))
    gaps = np.diff(np.append(pts, pts[0] + 1.0))
    k = int(np.argmax(gaps))
    covered = float(np.sum(np.minimum(gaps, 2.0 * delta)))
    return CoverageReport(int(values.size), float(delta), min(covered, 1.0), float(gaps[k]), float(pts[k]))


def interval_coverage(values: np.ndarray, interval: tuple[float, float], delta: float) -> CoverageReport:
    """구간 I 위의 덮임. passed 는 I 의 모든 점이 표본에서 δ 이내인지 (최대 빈 구간 ≤ 2δ 이고 양끝 포함)."""
    lo, hi = interval
    pts = np.unique(np.asarray(values, dtype=float))
    pts = pts[(pts >= lo) & (pts <= hi)]
    if pts.size == 0:
        return CoverageReport(0, float(delta), 0.0, hi - lo, lo, (lo, hi), False)
    inner = np.diff(pts)
    edges = np.array([pts[0] - lo, hi - pts[-1]])
    k = int(np.argmax(inner)) if inner.size else 0
    largest = float(inner[k]) if inner.size else 0.0
    start = float(pts[k]) if inner.size else float(pts[0])
    covered = float(np.sum(np.minimum(inner, 2.0 * delta)) + np.sum(np.minimum(edges, delta)))
    passed = bool(largest <= 2.0 * delta and edges.max() <= delta)
    if edges.max() > largest:
        largest, start = float(edges.max()), (lo if edges[0] >= edges[1] else float(pts[-1]))
    return CoverageReport(int(pts.size), float(delta), covered, largest, start, (float(lo), float(hi)), passed)


@dataclass(frozen=True)
class EquidistributionReport:
    n: int
    counts: np.ndarray
    max_deviation: float
    discrepancy: float

    def to_frame(self) -> pd.DataFrame:
        bins = self.counts.size
        return pd.DataFrame({"bin_lo": np.arange(bins) / bins, "bin_hi": np.arange(1, bins + 1) / bins,
                             "count": self.counts, "frequency": self.counts / max(1, self.n)})


def equidistribution_report(trace: HeightTrace | np.ndarray, bins: int = 100) -> EquidistributionReport:
    """
    높이의 경험 분포를 측정합니다. 균등분포 여부는 판정하지 않습니다.

    Returns:
        EquidistributionReport: bin 별 개수, bin 빈도와 1/bins 의 최대 차이(상대),
            별 불일치도 sup_x |F_n(x) − x|.
    """
    if bins < 1:
        raise ValueError(f"bins 는 1 이상이어야 합니다: {bins}")
    values = trace.values if isinstance(trace, HeightTrace) else np.asarray(trace, dtype=float)
    if values.size == 0:
        raise ValueError("빈 높이 수열입니다.")
    n = values.size
    counts = np.bincount(np.minimum((values * bins).astype(np.int64), bins - 1), minlength=bins)
    max_dev = float(np.max(np.abs(counts / n - 1.0 / bins)) * bins)
    s = np.sort(values)
    i = np.arange(1, n + 1)
    disc = float(max(np.max(i / n - s), np.max(s - (i - 1) / n)))
    return EquidistributionReport(int(n), counts, max_dev, disc)


def prefix_coverage(trace: HeightTrace, delta: float, checkpoints) -> pd.DataFrame:
    """중첩 접두사(n₁ < n₂ < …)마다 덮임을 잽니다. covered_measure 는 n 에 대해 비감소입니다."""
    rows = []
    for n in sorted(int(c) for c in checkpoints):
        rep = gap_analysis(trace.values[:n], delta)
        rows.append({"n": n, "covered_measure": rep.covered_measure, "largest_gap": rep.largest_gap})
    return pd.DataFrame(rows, columns=["n", "covered_measure", "largest_gap"])


def density_reproductions(n_list=(10 ** 5, 10 ** 6), delta: float = 1e-3,
                          letter_steps: dict[str, str] | None = None) -> pd.DataFrame:
    """
    문헌의 Fibonacci 실험 쌍들을 (mod 1 로 줄여) 다시 돌립니다.

    판정: 가장 큰 n 에서 largest_gap ≤ 0.01 이면 "dense", 모든 n 에서 ≥ 0.02 이면 "avoids",
    그 외는 "undecided". 문헌의 관찰과 다르면 WARNING 으로 남기고 표에 agrees=False 로 적습니다.
    letter_steps 를 주지 않으면 기본 사상(0 → α)과 뒤바꾼 사상(0 → β) 을 모두 돌립니다.

    Returns:
        DataFrame[label, expected, mapping, alpha, beta, n, largest_gap, covered_measure, verdict, agrees]
    """
    n_list = sorted(int(n) for n in n_list)
    if not n_list:
        raise ValueError("n_list 가 비어 있습니다.")
    mappings = ([("0->alpha", None), ("0->beta", SWAPPED_LETTER_STEPS)] if letter_steps is None
                else [("custom", letter_steps)])
    cases = [(label, "dense", ab) for label, ab in DENSE_PAIRS.items()]
    cases += [(label, "avoids", ab) for label, ab in AVOID_PAIRS.items()]

    rows = []
    for map_label, steps in mappings:
        seq = substitution_sequence(fibonacci_rules(), "0", n_list[-1], steps)
        for label, expected, (a, b) in cases:
            pair = IrrationalPair.checked(a % 1.0, b % 1.0)
            trace = heights(seq, pair)
            gaps = []
            for n in n_list:
                rep = gap_analysis(trace.values[:n + 1], delta)
                gaps.append(rep)
            if gaps[-1].largest_gap <= DENSE_MAX_GAP:
                verdict = "dense"
            elif all(r.largest_gap >= AVOID_MIN_GAP for r in gaps):
                verdict = "avoids"
            else:
                verdict = "undecided"
            agrees = verdict == expected
            if not agrees:
                logging.warning(f"Fibonacci reproduction {label} [{map_label}]: observed {verdict}, "
                                f"literature reports {expected} (largest gap {gaps[-1].largest_gap:.4g})")
            for n, rep in zip(n_list, gaps):
                rows.append({"label": label, "expected": expected, "mapping": map_label,
                             "alpha": pair.alpha, "beta": pair.beta, "n": n,
                             "largest_gap": rep.largest_gap, "covered_measure": rep.covered_measure,
                             "verdict": verdict, "agrees": agrees})
    return pd.DataFrame(rows)
