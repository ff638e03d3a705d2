"""
1 자유도 최소 작용 모델의 생성 함수 (Frenkel–Kontorova 형).

결합당 작용 h(x, x′) = (x′ − x)²/2 + V(x), V 는 주기 1 의 퍼텐셜입니다.
- 표준 족: V(x) = K/(2π)² · (1 − cos 2πx)
- 표(table) 퍼텐셜: [0,1) 의 균등 격자 값들을 주기적으로 선형보간

q 개 사이트의 주기 배치 x₀…x_{q−1} (x_{i+q} = x_i + p) 에 대한 총 작용과
그 기울기/헤시안도 여기서 계산합니다. 모든 연산은 numpy 로 벡터화되어 있습니다.
"""
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class GeneratingFunction:
    """
    생성 함수 h(x, x′) = (x′−x)²/2 + V(x).

    Attributes:
        K (float): 표준 족의 결합 상수. `table` 이 있으면 무시됩니다.
        table (tuple[float, ...] | None): V(j/m), j=0..m−1 값. 주기적 선형보간.
    """
    K: float = 0.0
    table: tuple[float, ...] | None = None

    def __post_init__(self):
        if not np.isfinite(self.K):
            raise ValueError(f"K 는 유한해야 합니다: {self.K}")
        if self.table is not None:
            table = tuple(float(v) for v in self.table)
            if len(table) < 2 or not all(np.isfinite(table)):
                raise ValueError("퍼텐셜 표에는 2개 이상의 유한한 값이 필요합니다.")
            object.__setattr__(self, "table", table)

    @classmethod
    def standard(cls, K: float) -> "GeneratingFunction":
        return cls(K=float(K))

    @classmethod
    def from_table(cls, values) -> "GeneratingFunction":
        return cls(table=tuple(values))

    @property
    def label(self) -> str:
        return f"fk(K={self.K:g})" if self.table is None else f"fk(table[{len(self.table)}])"

    @property
    def is_even(self) -> bool:
        """V(x) = V(−x) 이면 True."""
        if self.table is None:
            return True
        t = np.asarray(self.table)
        return bool(np.allclose(t, np.roll(t[::-1], 1), atol=0.0, rtol=0.0))

    # --- 퍼텐셜과 도함수 ---
    def _table_parts(self, x: np.ndarray):
        t = np.asarray(self.table)
        m = t.size
        u = np.mod(x, 1.0) * m
        j = np.floor(u).astype(np.int64) % m
        frac = u - np.floor(u)
        return t, m, j, frac

    def V(self, x):
        x = np.asarray(x, dtype=float)
        if self.table is None:
            return self.K / TWO_PI ** 2 * (1.0 - np.cos(TWO_PI * x))
        t, m, j, frac = self._table_parts(x)
        return t[j] + frac * (t[(j + 1) % m] - t[j])

    def dV(self, x):
        x = np.asarray(x, dtype=float)
        if self.table is None:
            return self.K / TWO_PI * np.sin(TWO_PI * x)
        t, m, j, _ = self._table_parts(x)
        return (t[(j + 1) % m] - t[j]) * m

    def d2V(self, x):
        x = np.asarray(x, dtype=float)
        if self.table is None:
            return self.K * np.cos(TWO_PI * x)
        return np.zeros_like(x)

    def bond(self, x, xp):
        """결합 작용 h(x, x′)."""
        x = np.asarray(x, dtype=float)
        return 0.5 * (np.asarray(xp, dtype=float) - x) ** 2 + self.V(x)


def _bonds(x: np.ndarray, p: int) -> np.ndarray:
    """d_i = x_{i+1} − x_i, i = 0..q−1 (x_q = x_0 + p)."""
    return np.diff(np.append(x, x[0] + p))


def action(gf: GeneratingFunction, x: np.ndarray, p: int) -> float:
    """q 사이트 주기 배치의 총 작용 W = Σ h(x_i, x_{i+1})."""
    x = np.asarray(x, dtype=float)
    d = _bonds(x, p)
    return float(0.5 * np.dot(d, d) + np.sum(gf.V(x)))


def action_gradient(gf: GeneratingFunction, x: np.ndarray, p: int) -> np.ndarray:
    """∂W/∂x_i = (x_i − x_{i−1}) − (x_{i+1} − x_i) + V′(x_i)."""
    x = np.asarray(x, dtype=float)
    d = _bonds(x, p)
    return np.roll(d, 1) - d + gf.dV(x)


def action_hessian(gf: GeneratingFunction, x: np.ndarray, p: int) -> np.ndarray:
    """순환 삼중대각 헤시안: 대각 2 + V″, 이웃 −1. q=1, 2 에서는 결합이 겹쳐 더해집니다."""
    x = np.asarray(x, dtype=float)
    q = x.size
    H = np.zeros((q, q))
    idx = np.arange(q)
    nxt = (idx + 1) % q
    np.add.at(H, (idx, idx), 2.0)
    np.add.at(H, (idx, nxt), -1.0)
    np.add.at(H, (nxt, idx), -1.0)
    H[idx, idx] += gf.d2V(x)
    return H
