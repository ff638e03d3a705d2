"""
주기 최소화 배치(periodic minimizing configuration) 탐색.

회전수 p/q 인 q 사이트 배치의 작용을 최소화합니다.
1. 시작점: 강체 회전 x_i = i·p/q 1개 + `restarts` 개의 무작위 시작점 (seed 로 결정적).
2. 역추적(backtracking) 경사 하강으로 기울기를 줄이고,
3. 기울기가 작아지고 헤시안이 양의 준정부호이면 뉴턴 단계로 마무리(polish)합니다.
   K=0 처럼 평행이동 영모드(zero mode)가 있으면 `lstsq` 의 최소 노름 해를 씁니다.
4. 모든 시작점 중 평균 작용이 가장 작은 배치를 돌려줍니다.

유리 회전수에서 최소화 배치는 주기 궤도이고, 원 위에서 강체 회전과 같은 순환 순서를 가집니다.
`is_cyclically_monotone` 이 이 성질을 정확히 검사합니다.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from config.config import CFG
from src.fk.generating_function import GeneratingFunction, action, action_gradient, action_hessian

# 경사 하강에서 뉴턴 보정으로 넘어가는 기울기 크기.
NEWTON_SWITCH = 1e-4


@dataclass(frozen=True)
class PeriodicConfiguration:
    """
    주기 배치. x_{i+q} = x_i + p 로 양방향 무한 상태를 나타냅니다.

    Attributes:
        p, q: 회전수 p/q (gcd(p, q) = 1).
        positions: x_0 … x_{q−1}. x_0 ∈ [0, 1) 로 정규화되어 있습니다.
        average_action: (1/q) Σ h(x_i, x_{i+1}).
        residual: 반환 시점의 기울기 max-norm.
        source: 생성 함수 라벨.
    """
    p: int
    q: int
    positions: tuple[float, ...]
    average_action: float
    residual: float
    source: str = ""

    @property
    def x(self) -> np.ndarray:
        return np.asarray(self.positions, dtype=float)

    def recompute_action(self, gf: GeneratingFunction) -> float:
        return action(gf, self.x, self.p) / self.q


class ConvergenceError(RuntimeError):
    """반복 상한 안에 수렴하지 못했을 때. 가장 좋은 반복값과 잔차를 함께 전달합니다."""

    def __init__(self, best: PeriodicConfiguration, residual: float, message: str = ""):
        self.best = best
        self.residual = residual
        super().__init__(message or f"minimize_periodic {best.p}/{best.q} did not converge "
                                    f"(residual {residual:.3e})")


def _descend(gf: GeneratingFunction, x: np.ndarray, p: int, tol: float, max_iter: int):
    """한 시작점에서 경사 하강 + 뉴턴 마무리. (x, 기울기 norm, 반복 횟수) 를 돌려줍니다."""
    step = 0.25
    W = action(gf, x, p)
    g = action_gradient(gf, x, p)
    gn = float(np.max(np.abs(g)))
    it = 0
    while gn > tol and it < max_iter:
        it += 1
        if gn < NEWTON_SWITCH:
            H = action_hessian(gf, x, p)
            if np.linalg.eigvalsh(H)[0] >= -1e-10:
                dx = np.linalg.lstsq(H, -g, rcond=1e-12)[0]
                x_new = x + dx
                g_new = action_gradient(gf, x_new, p)
                gn_new = float(np.max(np.abs(g_new)))
                if gn_new < gn:
                    x, g, gn = x_new, g_new, gn_new
                    W = action(gf, x, p)
                    continue
        # Armijo 역추적
        gg = float(np.dot(g, g))
        while True:
            x_new = x - step * g
            W_new = action(gf, x_new, p)
            if W_new <= W - 0.5 * step * gg or step < 1e-12:
                break
            step *= 0.5
        x, W = x_new, W_new
        g = action_gradient(gf, x, p)
        gn = float(np.max(np.abs(g)))
        step = min(step * 1.5, 0.5)
    return x, gn, it


def _normalize(x: np.ndarray) -> np.ndarray:
    """정수 평행이동으로 x_0 ∈ [0, 1) 이 되게 합니다 (작용 불변)."""
    return x - math.floor(x[0])


def minimize_periodic(gf: GeneratingFunction, p: int, q: int, restarts: int | None = None,
                      seed: int = 0, max_iter: int | None = None,
                      grad_tol: float | None = None) -> PeriodicConfiguration:
    """
    회전수 p/q 의 주기 최소화 배치를 찾습니다.

    Args:
        gf (GeneratingFunction): 생성 함수.
        p (int): 감김수(winding).
        q (int): 주기 (≥ 1, gcd(p, q) = 1).
        restarts (int, optional): 무작위 시작점 개수 (≥ 1). 기본 CFG.FK_RESTARTS.
        seed (int): 난수 시드. 같은 시드면 결과가 비트 단위로 같습니다.
        max_iter (int, optional): 시작점당 반복 상한. 기본 CFG.FK_MAX_ITER.
        grad_tol (float, optional): 반환 기울기 max-norm 상한. 기본 CFG.FK_GRAD_TOL.

    Returns:
        PeriodicConfiguration: 시작점들 중 평균 작용이 가장 작은 수렴 배치.

    Raises:
        ValueError: 전제 조건 위반.
        ConvergenceError: 어떤 시작점도 반복 상한 안에 수렴하지 못한 경우.
    """
    restarts = CFG.FK_RESTARTS if restarts is None else restarts
    max_iter = CFG.FK_MAX_ITER if max_iter is None else max_iter
    grad_tol = CFG.FK_GRAD_TOL if grad_tol is None else grad_tol
    if q < 1:
        raise ValueError(f"q 는 1 이상이어야 합니다: {q}")
    if math.gcd(p, q) != 1:
        raise ValueError(f"gcd({p}, {q}) != 1")
    if restarts < 1:
        raise ValueError(f"restarts 는 1 이상이어야 합니다: {restarts}")

    rng = np.random.default_rng(seed)
    rigid = np.arange(q) * (p / q)
    starts = [rigid]
    for _ in range(restarts):
        # 강체 회전 + 무작위 위상 + 작은 섭동.
        starts.append(rigid + rng.uniform(0.0, 1.0) + rng.uniform(-0.25, 0.25, q) / q)

    best, best_fail = None, None
    for x0 in starts:
        x, gn, it = _descend(gf, x0.copy(), p, grad_tol, max_iter)
        x = _normalize(x)
        conf = PeriodicConfiguration(p, q, tuple(x.tolist()), action(gf, x, p) / q, gn, gf.label)
        if gn <= grad_tol:
            if best is None or conf.average_action < best.average_action:
                best = conf
        else:
            logging.warning(f"{gf.label} {p}/{q}: start did not converge after {it} iterations "
                            f"(residual {gn:.3e})")
            if best_fail is None or gn < best_fail.residual:
                best_fail = conf

    if best is None:
        raise ConvergenceError(best_fail, best_fail.residual)
    logging.info(f"{gf.label} {p}/{q} minimized: action={best.average_action:.12g}, "
                 f"residual={best.residual:.1e}")
    return best


def is_cyclically_monotone(config: PeriodicConfiguration) -> bool:
    """
    {x_i mod 1} 의 원 위 순환 순서가 강체 회전 {i·p/q mod 1} 의 순환 순서와 같은지 검사합니다.
    """
    q, p = config.q, config.p
    if q <= 2:
        return True
    frac = np.mod(config.x, 1.0)
    observed = np.argsort(frac, kind="stable")
    rigid = np.argsort((np.arange(q) * p) % q, kind="stable")
    shift = int(np.nonzero(observed == rigid[0])[0][0])
    return bool(np.array_equal(np.roll(observed, -shift), rigid))
