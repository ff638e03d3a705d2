"""
평면 P = {z = αx + βy} 위의 곡선과 그 곡선이 지나는 기본 영역(fundamental domain)들.

- `Polyline`: P 위의 꺾은선. 선분 단위로 정수 격자면 통과를 정확히 계산할 수 있습니다.
- `lift_walk`: 단위 걸음 보행을, 같은 기본 영역 열을 지나는 P 위의 꺾은선으로 올립니다.
- `lemma_b_check`: 곡선 표본점의 높이 집합과 통과한 기본 영역의 높이 집합 사이 Hausdorff 거리.
- `bounded_line_check`: 직선 D 에서 거리 R 이내인 곡선에 대해 E·v 가 구간 I 를 덮는지 측정합니다.

높이 함수는 l(x, y, z) = z − αx − βy 입니다 (P = ker l).
"""
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from src.torus.heights import CoverageReport, interval_coverage
from src.torus.sequences import IrrationalPair, StepSequence

PLANE_TOL = 1e-9
# 정수 꼭짓점을 피하기 위한 기본 대각 이동량.
LIFT_OFFSET = 1e-7
# bounded_line_check 에서 한 번에 처리할 절편(slice) 수.
_SLICE_CHUNK = 2048


@dataclass(frozen=True)
class Polyline:
    """
    평면 P 위의 꺾은선.

    Attributes:
        vertices (np.ndarray): (m, 3) 꼭짓점, m ≥ 2.
        pair (IrrationalPair): 평면을 정하는 (α, β).
    """
    vertices: np.ndarray
    pair: IrrationalPair

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3 or v.shape[0] < 2:
            raise ValueError(f"꼭짓점은 (m ≥ 2, 3) 배열이어야 합니다: {v.shape}")
        off = np.abs(v[:, 2] - self.pair.alpha * v[:, 0] - self.pair.beta * v[:, 1])
        if off.max() > PLANE_TOL * max(1.0, float(np.abs(v).max())):
            raise ValueError(f"꼭짓점이 평면 z = αx + βy 를 벗어납니다 (최대 {off.max():.3e}).")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.vertices, axis=0), axis=1)

    def point_at(self, param: np.ndarray) -> np.ndarray:
        """전역 매개변수 i + t (i 번째 선분, t ∈ [0,1]) 의 점."""
        param = np.asarray(param, dtype=float)
        i = np.clip(np.floor(param).astype(np.int64), 0, self.vertices.shape[0] - 2)
        t = (param - i)[:, None]
        return self.vertices[i] * (1.0 - t) + self.vertices[i + 1] * t


def lift_walk(seq: StepSequence, pair: IrrationalPair, offset: float = LIFT_OFFSET) -> Polyline:
    """
    보행 (x_n, y_n) 을 꼭짓점 (x_n + η, y_n + η, α(x_n + η) + β(y_n + η)) 인 꺾은선으로 올립니다.

    η 이동 덕분에 꼭짓점이 격자면 위에 놓이지 않고, 꼭짓점 n 이 속한 기본 영역의 높이는
    αx_n + βy_n mod 1 과 같습니다.
    """
    pos = seq.positions().astype(float) + offset
    z = pair.alpha * pos[:, 0] + pair.beta * pos[:, 1]
    if pos.shape[0] < 2:
        raise ValueError("빈 보행은 곡선으로 올릴 수 없습니다.")
    return Polyline(np.column_stack([pos, z]), pair)


def straight_line(pair: IrrationalPair, direction=(1, 1), length: float = 1.0, offset=(0.0, 0.0)) -> Polyline:
    """점 (offset, α·ox + β·oy) 에서 평면 방향 (a, b, αa + βb) 로 t ∈ [0, length] 만큼 가는 선분."""
    a, b = map(float, direction)
    if a == 0 and b == 0:
        raise ValueError("방향 벡터가 0 입니다.")
    ox, oy = map(float, offset)
    start = np.array([ox, oy, pair.alpha * ox + pair.beta * oy])
    d = np.array([a, b, pair.alpha * a + pair.beta * b])
    return Polyline(np.vstack([start, start + length * d]), pair)


def crossing_params(curve: Polyline) -> np.ndarray:
    """곡선이 정수 격자면 x, y 또는 z = k 를 지나는 전역 매개변수들 (정렬)."""
    v = curve.vertices
    a, b = v[:-1], v[1:]
    out = []
    for axis in range(3):
        lo = np.minimum(a[:, axis], b[:, axis])
        hi = np.maximum(a[:, axis], b[:, axis])
        first = np.floor(lo) + 1
        count = np.maximum(0, np.ceil(hi) - first).astype(np.int64)
        if not count.any():
            continue
        seg = np.repeat(np.arange(a.shape[0]), count)
        starts = np.repeat(np.cumsum(count) - count, count)
        k = first[seg] + (np.arange(seg.size) - starts)
        da = b[seg, axis] - a[seg, axis]
        out.append(seg + (k - a[seg, axis]) / da)
    if not out:
        return np.empty(0)
    return np.sort(np.concatenate(out))


def crossed_domains(curve: Polyline) -> np.ndarray:
    """
    곡선이 차례로 지나는 기본 영역 D₀ − Z_n 의 Z_n 목록 (연속 중복 제거).

    중복 없는 격자면 통과 매개변수 사이 구간의 중점에서 Z = −floor(γ) 를 읽습니다.
    """
    cuts = crossing_params(curve)
    m = curve.vertices.shape[0] - 1
    bounds = np.unique(np.concatenate([[0.0, float(m)], cuts]))
    mids = 0.5 * (bounds[:-1] + bounds[1:])
    cells = -np.floor(curve.point_at(mids)).astype(np.int64)
    keep = np.ones(cells.shape[0], dtype=bool)
    keep[1:] = np.any(cells[1:] != cells[:-1], axis=1)
    return cells[keep]


def domain_heights(pair: IrrationalPair, Z: np.ndarray) -> np.ndarray:
    """정수점 Z 의 높이 l(Z) = z − αx − βy. αx + βy 는 분할 계산으로 정확히 더합니다."""
    frac, whole = pair.lattice_heights(Z[:, 0], Z[:, 1])
    return (Z[:, 2] - whole).astype(float) - frac


def sample_heights(curve: Polyline, n_samples: int) -> np.ndarray:
    """호 길이 등간격 표본점 X 를 D₀ 로 옮긴 f = X − floor(X) 의 높이 l(f) = f_z − αf_x − βf_y."""
    lengths = curve.segment_lengths()
    total = float(lengths.sum())
    s = (np.arange(n_samples) + 0.5) * (total / n_samples)
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    i = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, lengths.size - 1)
    t = (s - cum[i]) / np.where(lengths[i] > 0, lengths[i], 1.0)
    X = curve.point_at(i + t)
    f = X - np.floor(X)
    return f[:, 2] - curve.pair.alpha * f[:, 0] - curve.pair.beta * f[:, 1]


def directed_distance(a: np.ndarray, b: np.ndarray) -> float:
    """max_{x∈a} min_{y∈b} |x − y| (1차원 집합)."""
    b = np.sort(np.asarray(b, dtype=float))
    a = np.asarray(a, dtype=float)
    j = np.clip(np.searchsorted(b, a), 1, b.size - 1) if b.size > 1 else np.zeros(a.size, dtype=np.int64)
    left = np.abs(a - b[j - 1]) if b.size > 1 else np.abs(a - b[0])
    right = np.abs(a - b[j])
    return float(np.max(np.minimum(left, right))) if a.size else 0.0


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    return max(directed_distance(a, b), directed_distance(b, a))


class ClosureCheck(NamedTuple):
    hausdorff_distance: float
    passed: bool
    crossings: int
    samples: int
    domains_to_samples: float
    samples_to_domains: float


def lemma_b_check(pair: IrrationalPair, curve: Polyline, n_samples: int, delta: float) -> ClosureCheck:
    """
    두 방법으로 독립적으로 계산한 높이 집합을 비교합니다.

    - 표본 쪽: 곡선 위 n_samples 개 점을 격자 평행이동으로 D₀ 에 넣은 점의 높이 (실수 좌표에서 계산).
    - 영역 쪽: 곡선이 통과한 기본 영역 열 Z_n 의 높이 l(Z_n) (정수 좌표에서 계산).

    두 유한 집합의 대칭 Hausdorff 거리가 delta 이하이면 통과입니다.

    Raises:
        ValueError: 곡선이 격자면을 한 번도 지나지 않거나 곡선의 평면이 pair 와 다를 때.
    """
    if (curve.pair.alpha, curve.pair.beta) != (pair.alpha, pair.beta):
        raise ValueError("곡선의 평면과 (α, β) 가 다릅니다.")
    if n_samples < 1 or delta <= 0:
        raise ValueError(f"n_samples ≥ 1, delta > 0 이어야 합니다: {n_samples}, {delta}")
    Z = crossed_domains(curve)
    if Z.shape[0] < 2:
        raise ValueError("곡선이 기본 영역 경계를 지나지 않습니다 (퇴화 곡선).")
    if Z.shape[0] < n_samples:
        logging.warning(f"lemma check: curve crosses {Z.shape[0]} domains, fewer than n_samples={n_samples}")
    side_domains = domain_heights(pair, Z)
    side_samples = sample_heights(curve, n_samples)
    d21 = directed_distance(side_domains, side_samples)
    d12 = directed_distance(side_samples, side_domains)
    dist = max(d21, d12)
    logging.info(f"lemma check: {Z.shape[0]} domains, {n_samples} samples, Hausdorff {dist:.3e}")
    return ClosureCheck(dist, dist <= delta, int(Z.shape[0]), int(n_samples), d21, d12)


# --- 직선에서 거리가 유계인 곡선 ---
def _plane_direction(pair: IrrationalPair, direction) -> np.ndarray:
    a, b = map(float, direction)
    d = np.array([a, b, pair.alpha * a + pair.beta * b])
    norm = np.linalg.norm(d)
    if norm == 0:
        raise ValueError("방향 벡터가 0 입니다.")
    return d / norm


def tube_lattice_points(d_hat: np.ndarray, R: float, length: float) -> np.ndarray:
    """
    직선 D = ℝ·d̂ 에서 거리 R 이내이고 D 방향 좌표가 [0, length] 인 정수점들.

    d̂ 의 절댓값이 가장 큰 축으로 절편을 나눠, 각 절편에서 직선 근처의 정수 격자만 검사합니다.
    """
    axis = int(np.argmax(np.abs(d_hat)))
    others = [i for i in range(3) if i != axis]
    lead = d_hat[axis]
    half = int(math.ceil(R * math.sqrt(1.0 + 1.0 / lead ** 2))) + 1
    ends = np.array([0.0, length * lead])
    ks = np.arange(int(math.floor(ends.min() - R)) - 1, int(math.ceil(ends.max() + R)) + 2)
    grid = np.stack(np.meshgrid(np.arange(-half, half + 1), np.arange(-half, half + 1), indexing="ij"),
                    axis=-1).reshape(-1, 2)
    found = []
    for c0 in range(0, ks.size, _SLICE_CHUNK):
        k = ks[c0:c0 + _SLICE_CHUNK]
        centre = np.outer(k / lead, d_hat)
        base = np.round(centre[:, others]).astype(np.int64)
        pts = np.empty((k.size, grid.shape[0], 3), dtype=np.int64)
        pts[:, :, axis] = k[:, None]
        pts[:, :, others[0]] = base[:, None, 0] + grid[None, :, 0]
        pts[:, :, others[1]] = base[:, None, 1] + grid[None, :, 1]
        pts = pts.reshape(-1, 3)
        s = pts @ d_hat
        perp = np.linalg.norm(pts - np.outer(s, d_hat), axis=1)
        found.append(pts[(perp <= R) & (s >= 0) & (s <= length)])
    return np.concatenate(found) if found else np.empty((0, 3), dtype=np.int64)


def bounded_line_check(pair: IrrationalPair, direction=(1, 1), R: float = 2.0, n: int = 100_000,
                       delta: float = 0.01, step: float = 0.5, wiggle: float = 1.0) -> CoverageReport:
    """
    직선 D (방향 (a, b, αa+βb)) 에서 거리 R 이내인 곡선으로 E·v 가 구간 I 를 덮는지 측정합니다.

    E = {z ∈ ℤ³ : D + z ⊂ V_R} 를 D 방향 좌표 [0, n·step] 안에서 열거하고 I = [min l(E), max l(E)] 로 둡니다.
    곡선 γ(t) = t·d̂ + (R/2)·sin(t/wiggle)·w (w 는 P 안에서 D 에 수직) 를 t_i = −i·step 에서 표본화하여,
    |γ(t_i) + z| ≤ 2R 인 표본이 있는 z 의 높이만 모읍니다. 모은 높이가 I 에서 δ-조밀하면 통과입니다.

    Raises:
        ValueError: R ≤ 0, 또는 창 안에서 E 가 원점 말고는 비었을 때 (R 이나 n 을 키우라는 안내 포함).
    """
    if R <= 0:
        raise ValueError(f"R 은 양수여야 합니다: {R}")
    if n < 1 or step <= 0 or step > R:
        raise ValueError(f"n ≥ 1, 0 < step ≤ R 이어야 합니다: n={n}, step={step}, R={R}")
    d_hat = _plane_direction(pair, direction)
    v = np.array([-pair.alpha, -pair.beta, 1.0])
    w = np.cross(v, d_hat)
    w /= np.linalg.norm(w)
    length = n * step

    E = tube_lattice_points(d_hat, R, length)
    if E.shape[0] < 2:
        raise ValueError(f"탐색 창 안에서 E 가 원점 말고는 비어 있습니다 (R={R}, 길이 {length:g}). "
                         f"R 또는 n 을 키우세요.")
    lz = E[:, 2] - E[:, 0] * pair.alpha - E[:, 1] * pair.beta
    interval = (float(lz.min()), float(lz.max()))

    # z 의 D 좌표 s 에 대해 γ(−s) 가 −z 근처를 지나므로 가장 가까운 두 표본만 봅니다.
    s = E @ d_hat
    covered = np.zeros(E.shape[0], dtype=bool)
    for shift in (0, 1):
        i = np.clip(np.floor(s / step).astype(np.int64) + shift, 0, n - 1)
        t = -i * step
        gamma = np.outer(t, d_hat) + np.outer((R / 2) * np.sin(t / wiggle), w)
        covered |= np.linalg.norm(gamma + E, axis=1) <= 2 * R
    report = interval_coverage(lz[covered], interval, delta)
    logging.info(f"bounded line check: |E|={E.shape[0]}, covered={int(covered.sum())}, "
                 f"I=[{interval[0]:.4f}, {interval[1]:.4f}], largest gap {report.largest_gap:.3e}")
    return report
