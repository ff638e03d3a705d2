"""
Farey 분수 위의 β 프로파일과 유리점 모서리(corner) 측정.

β(p/q) = p/q 주기 최소화 배치의 평균 작용. |p/q| ≤ 2, q ≤ Q 인 모든 기약분수에서 계산하고,
convex-core 의 볼록성 인증서와 Legendre 변환(α)을 그대로 재사용합니다.

- `beta_profile`: 분수별 최소화를 (선택적으로 스레드 풀에서) 실행하고 분수 키로 병합합니다.
- `corner_gap`: 가장 가까운 Farey 이웃들로 잰 오른쪽 − 왼쪽 기울기.
- `alpha_from_beta`: α = β* (평평한 조각이 β 의 모서리에 대응합니다).
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np
import pandas as pd

from config.config import CFG
from src.convex.duality import legendre_transform
from src.convex.profile import NonConvexProfileError, SampledConvexProfile, check_convexity
from src.fk.generating_function import GeneratingFunction
from src.fk.minimizer import PeriodicConfiguration, minimize_periodic


def farey_fractions(Q: int, bound: float = 2.0) -> list[Fraction]:
    """|p/q| ≤ bound, 1 ≤ q ≤ Q 인 기약분수를 오름차순으로 돌려줍니다."""
    if Q < 1:
        raise ValueError(f"Q 는 1 이상이어야 합니다: {Q}")
    out = set()
    for q in range(1, Q + 1):
        pmax = int(np.floor(bound * q))
        for p in range(-pmax, pmax + 1):
            out.add(Fraction(p, q))
    return sorted(out)


def _fraction_seed(seed: int, f: Fraction) -> int:
    """분수마다 독립적이고 스레드 순서와 무관한 시드."""
    return int(np.random.SeedSequence([seed, f.denominator, f.numerator + 10_000]).generate_state(1)[0])


@dataclass(frozen=True)
class BetaProfile:
    """
    Farey 분수 p/q (q ≤ Q) → β 값 사상.

    Attributes:
        entries (dict[Fraction, float]): 분수별 β 값.
        Q (int): Farey 깊이.
        gf (GeneratingFunction): 원천 생성 함수.
        configurations (dict[Fraction, PeriodicConfiguration]): 분수별 최소화 배치.
    """
    entries: dict
    Q: int
    gf: GeneratingFunction
    configurations: dict = field(default_factory=dict, compare=False)

    def fractions(self) -> list[Fraction]:
        return sorted(self.entries)

    def as_profile(self, tol_convex: float | None = None) -> SampledConvexProfile:
        fr = self.fractions()
        return SampledConvexProfile(
            np.array([float(f) for f in fr]),
            np.array([self.entries[f] for f in fr]),
            self.gf.label,
            labels=tuple(f"{f.numerator}/{f.denominator}" for f in fr),
            tol_convex=CFG.TOL_CONVEX if tol_convex is None else tol_convex,
        )

    def to_frame(self) -> pd.DataFrame:
        fr = self.fractions()
        return pd.DataFrame({
            "p": [f.numerator for f in fr],
            "q": [f.denominator for f in fr],
            "rho": [float(f) for f in fr],
            "beta": [self.entries[f] for f in fr],
        })


def beta_profile(gf: GeneratingFunction, Q: int, restarts: int | None = None, seed: int = 0,
                 workers: int = 1, bound: float = 2.0) -> BetaProfile:
    """
    |p/q| ≤ bound, q ≤ Q 인 모든 기약분수에서 β(p/q) 를 계산합니다.

    Args:
        gf (GeneratingFunction): 생성 함수.
        Q (int): Farey 깊이 (≥ 2).
        restarts (int, optional): 분수당 무작위 재시작 수.
        seed (int): 기준 시드. 분수별 시드는 (seed, p, q) 에서 결정적으로 파생됩니다.
        workers (int): 스레드 수. 결과는 분수 키로 병합되므로 workers 와 무관합니다.

    Raises:
        ConvergenceError: 어떤 분수의 최소화가 실패하면 그 분수를 메시지에 담아 다시 올립니다.
        NonConvexProfileError: 결과가 볼록성 인증서를 통과하지 못하면.
    """
    if Q < 2:
        raise ValueError(f"Q 는 2 이상이어야 합니다: {Q}")
    fractions = farey_fractions(Q, bound)

    def solve(f: Fraction) -> PeriodicConfiguration:
        try:
            return minimize_periodic(gf, f.numerator, f.denominator, restarts, _fraction_seed(seed, f))
        except Exception as e:
            e.args = (f"fraction {f}: {e}",) + e.args[1:]
            raise

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            confs = list(pool.map(solve, fractions))
    else:
        confs = [solve(f) for f in fractions]

    entries = {f: c.average_action for f, c in zip(fractions, confs)}
    profile = BetaProfile(entries, Q, gf, dict(zip(fractions, confs)))
    bad = check_convexity(np.array([float(f) for f in fractions]),
                          np.array([entries[f] for f in fractions]), CFG.TOL_CONVEX)
    if bad is not None:
        raise NonConvexProfileError(bad[0], bad[1], gf.label)
    logging.info(f"beta profile {gf.label} Q={Q}: {len(entries)} fractions")
    return profile


def _neighbours(profile: BetaProfile, at: Fraction, side: int, count: int) -> list[Fraction]:
    fr = profile.fractions()
    i = fr.index(at)
    if side < 0:
        picked = fr[max(0, i - count):i][::-1]
    else:
        picked = fr[i + 1:i + 1 + count]
    return picked


def corner_gap(profile: BetaProfile, at: Fraction, extrapolate: bool = True) -> float:
    """
    유리점 `at` 에서 β 의 오른쪽 − 왼쪽 기울기 차이.

    가장 가까운 Farey 이웃 h₁ 과 그 다음 이웃 h₂ 의 차분몫 D(h₁), D(h₂) 를
    h → 0 으로 1차 외삽합니다: D₀ = (h₂·D(h₁) − h₁·D(h₂)) / (h₂ − h₁).
    2차 함수에서는 외삽이 정확하므로 적분 가능한(K=0) 경우 모서리가 0 이 됩니다.
    `extrapolate=False` 이면 가장 가까운 이웃의 차분몫만 씁니다.

    Raises:
        ValueError: `at` 이나 필요한 이웃이 프로파일에 없을 때.
    """
    at = Fraction(at)
    if at not in profile.entries:
        raise ValueError(f"{at} 가 프로파일에 없습니다.")
    need = 2 if extrapolate else 1
    b0 = profile.entries[at]

    def slope(side: int) -> float:
        nb = _neighbours(profile, at, side, need)
        if len(nb) < need:
            raise ValueError(f"{at} 의 {'왼쪽' if side < 0 else '오른쪽'} Farey 이웃이 부족합니다.")
        hs = [abs(float(f - at)) for f in nb]
        ds = [(profile.entries[f] - b0) / float(f - at) for f in nb]
        if not extrapolate:
            return ds[0]
        (h1, h2), (d1, d2) = hs, ds
        return (h2 * d1 - h1 * d2) / (h2 - h1)

    gap = slope(+1) - slope(-1)
    if gap < -1e-9:
        logging.warning(f"corner_gap at {at}: negative gap {gap:.3e} (profile not convex at resolution)")
    return max(gap, 0.0)


def alpha_from_beta(profile: BetaProfile, dual_grid: Iterable[float]) -> SampledConvexProfile:
    """β 프로파일의 Legendre 변환 α(c) = max_ρ (c·ρ − β(ρ))."""
    return legendre_transform(profile.as_profile(), dual_grid)
