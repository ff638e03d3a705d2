"""
주기 그래프의 안정 노름(stable norm) 계산.

두 가지 방법을 제공합니다.
1. 최단 경로 (`stable_norm`): 들어 올린 그래프를 유한 창(window)으로 자르고
   scipy 의 Dijkstra 로 d(a, a + N·h) 를 구한 뒤 N 으로 나눕니다. 항상 노름의 상계입니다.
2. 보정(calibration) LP (`calibrated_norm`): 몫 그래프 위 호몰로지 h 순환(circulation)의
   최소 비용. 안정 노름의 정확한 값이며, LP 쌍대해는 보정 코벡터 c 입니다.

그 위에 단위 공 단면(chord 차트), 면 검출, Minkowski 격자점 세기, Hedlund 척도 적합을 올립니다.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
import pandas as pd
from scipy.optimize import linprog
from scipy.sparse import csgraph
from scipy.spatial import ConvexHull

from config.config import CFG
from src.convex.duality import detect_faces
from src.convex.profile import SampledConvexProfile
from src.stable_norm.graph import PeriodicWeightedGraph, hedlund_graph

# 창 안정성 비교와 격자점 경계 판정에 쓰는 상대 허용오차.
REL_TOL = 1e-12


class DisconnectedWindowError(ValueError):
    """창 안에서 목표 꼭짓점에 닿지 못했을 때."""


@dataclass(frozen=True)
class StableNormEstimate:
    """
    안정 노름 추정값.

    Attributes:
        h: 정수 호몰로지 벡터.
        N: 들어 올림 배수.
        upper: d(a, a + N·h) / N (기준 꼭짓점들 중 최솟값).
        lower: 보정 LP 의 쌍대 하계. 계산하지 않았으면 0.
        margin: 최종적으로 안정이 확인된 창 여유 셀 수.
    """
    h: tuple[int, ...]
    N: int
    upper: float
    lower: float
    margin: int

    @property
    def value(self) -> float:
        return self.upper


@dataclass(frozen=True)
class Calibration:
    """
    보정 LP 의 해.

    Attributes:
        h: 실수 호몰로지 벡터.
        value: 최소 순환 비용 = ‖h‖.
        covector: 쌍대 코벡터 c (⟨c, h⟩ = value).
        potentials: 꼭짓점 퍼텐셜 φ.
    """
    h: tuple[float, ...]
    value: float
    covector: tuple[float, ...]
    potentials: tuple[float, ...]

    def certificate_gap(self, g: PeriodicWeightedGraph) -> float:
        """max_e (φ(u) − φ(v) + ⟨c, shift_e⟩ − w_e). 0 이하이면 c 는 보정 코벡터입니다."""
        u, v, s, w = g.edge_arrays
        phi = np.asarray(self.potentials)
        return float(np.max(phi[u] - phi[v] + s @ np.asarray(self.covector) - w))


class ClassCount(NamedTuple):
    count: int
    ratio: float
    method: str


@dataclass(frozen=True)
class ConvergencePair:
    h: tuple[int, ...]
    N: int
    value_N: float
    value_2N: float

    @property
    def gap(self) -> float:
        return self.value_N - self.value_2N


@dataclass(frozen=True)
class SectionFaces:
    """
    단위 공 단면의 꼭짓점과 면.

    Attributes:
        vertices: 평면 좌표 (x, y) 의 단위 공 꼭짓점들 (각도 순).
        facets: 면마다 ‖v‖ = ℓ(v) 인 선형 범함수 ℓ = (ℓx, ℓy) (각도 순).
    """
    vertices: tuple[tuple[float, float], ...]
    facets: tuple[tuple[float, float], ...]

    def to_frame(self) -> pd.DataFrame:
        rows = [{"kind": "vertex", "x": x, "y": y} for x, y in self.vertices]
        rows += [{"kind": "facet", "x": lx, "y": ly} for lx, ly in self.facets]
        return pd.DataFrame(rows, columns=["kind", "x", "y"])


# --- 최단 경로 ---
def _as_int_vector(g: PeriodicWeightedGraph, h) -> np.ndarray:
    arr = np.asarray(h)
    if arr.shape != (g.d,):
        raise ValueError(f"h 는 길이 {g.d} 벡터여야 합니다: {h}")
    if not np.all(np.mod(arr, 1) == 0):
        raise ValueError(f"h 는 정수 벡터여야 합니다: {h}")
    return arr.astype(np.int64)


def _anchor_distances(g: PeriodicWeightedGraph, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, tuple]:
    """셀 0 의 기준 꼭짓점들에서 창 [lo, hi] 의 모든 꼭짓점까지 거리 (기준점 × 꼭짓점)."""
    A, shape = g.window_matrix(lo, hi)
    base = int(np.ravel_multi_index(tuple(-lo), shape))
    sources = base * g.n_vertices + np.asarray(g.anchors)
    return csgraph.dijkstra(A, directed=True, indices=sources), shape


def _lifted_distance(g: PeriodicWeightedGraph, target: np.ndarray, margin: int) -> float:
    """min_a d(a, a + target) 를 여유 `margin` 셀 창 안에서 계산합니다."""
    lo = np.minimum(0, target) - margin
    hi = np.maximum(0, target) + margin
    dist, shape = _anchor_distances(g, lo, hi)
    cell = int(np.ravel_multi_index(tuple(target - lo), shape))
    vals = [dist[k, cell * g.n_vertices + a] for k, a in enumerate(g.anchors)]
    return float(min(vals))


def stable_norm(g: PeriodicWeightedGraph, h, N: int, margin: int | None = None,
                calibrate: bool = True) -> StableNormEstimate:
    """
    d(a, a + N·h) / N 로 안정 노름 ‖h‖ 의 상계를 구합니다.

    창 여유를 두 배로 늘린 두 번째 탐색이 같은 거리를 줄 때까지 여유를 키웁니다.

    Args:
        g (PeriodicWeightedGraph): 주기 그래프.
        h: 0 이 아닌 정수 벡터.
        N (int): 들어 올림 배수 (≥ 1).
        margin (int, optional): 창 여유 셀 수. 기본 CFG.SN_MARGIN.
        calibrate (bool): True 이면 보정 LP 로 `lower` 를 채웁니다.

    Raises:
        ValueError: h = 0, N < 1, 또는 N·|h|∞ 가 CFG.SN_MAX_SPAN 을 넘을 때.
        DisconnectedWindowError: 창 안에서 목표에 닿지 못할 때.
    """
    h = _as_int_vector(g, h)
    if not np.any(h):
        raise ValueError("h 는 0 이 아니어야 합니다.")
    if N < 1:
        raise ValueError(f"N 은 1 이상이어야 합니다: {N}")
    span = int(N * np.max(np.abs(h)))
    if span > CFG.SN_MAX_SPAN:
        raise ValueError(f"N·|h|∞ = {span} 가 창 상한 {CFG.SN_MAX_SPAN} 을 넘습니다.")
    margin = CFG.SN_MARGIN if margin is None else int(margin)
    if margin < 1:
        raise ValueError(f"margin 은 1 이상이어야 합니다: {margin}")

    target = N * h
    dist = _lifted_distance(g, target, margin)
    if not np.isfinite(dist):
        raise DisconnectedWindowError(f"{g.name}: h={tuple(h)} N={N} 창 안에서 목표에 닿지 못했습니다 "
                                      f"(margin={margin}).")
    while True:
        doubled = _lifted_distance(g, target, 2 * margin)
        if doubled >= dist * (1.0 - REL_TOL):
            break
        logging.warning(f"{g.name}: window margin {margin} too small for h={tuple(h)} N={N} "
                        f"({dist:.12g} -> {doubled:.12g}), doubling")
        margin *= 2
        dist = doubled
        if 2 * margin > CFG.SN_MAX_SPAN:
            raise ValueError(f"창 여유가 {CFG.SN_MAX_SPAN} 안에서 안정되지 않았습니다.")

    upper = dist / N
    lower = min(calibrated_norm(g, h).value, upper) if calibrate else 0.0
    estimate = StableNormEstimate(tuple(int(x) for x in h), int(N), upper, lower, margin)
    logging.info(f"stable norm {g.name} h={estimate.h} N={N}: {upper:.12g} (lower {lower:.12g})")
    return estimate


def convergence_pair(g: PeriodicWeightedGraph, h, N: int) -> ConvergencePair:
    """(N, 2N) 추정값 쌍. 외삽하지 않으므로 두 값 모두 인증된 상계입니다."""
    a = stable_norm(g, h, N, calibrate=False)
    b = stable_norm(g, h, 2 * N, calibrate=False)
    return ConvergencePair(a.h, int(N), a.upper, b.upper)


# --- 보정 LP ---
def calibrated_norm(g: PeriodicWeightedGraph, h) -> Calibration:
    """
    몫 그래프 위 최소 비용 순환 LP 로 ‖h‖ 를 정확히 계산합니다.

    min Σ w_e f_e  s.t.  f ≥ 0, 모든 꼭짓점에서 유입 = 유출, Σ f_e shift_e = h.
    등식 제약의 쌍대 변수 중 마지막 d 개가 보정 코벡터 c 입니다.
    h 는 실수 벡터여도 됩니다.
    """
    h = np.asarray(h, dtype=float)
    if h.shape != (g.d,) or not np.all(np.isfinite(h)):
        raise ValueError(f"h 는 유한한 길이 {g.d} 벡터여야 합니다: {h}")
    u, v, s, w = g.edge_arrays
    n, m = g.n_vertices, u.size
    cols = np.arange(m)
    A = np.zeros((n + g.d, m))
    np.add.at(A, (u, cols), 1.0)
    np.add.at(A, (v, cols), -1.0)
    A[n:, :] = s.T
    b = np.concatenate([np.zeros(n), h])
    res = linprog(w, A_eq=A, b_eq=b, bounds=(0, None), method="highs-ds")
    if res.status != 0:
        raise ValueError(f"{g.name}: 보정 LP 실패 (h={h.tolist()}): {res.message}")
    duals = np.asarray(res.eqlin.marginals, dtype=float)
    return Calibration(tuple(h.tolist()), float(res.fun), tuple(duals[n:].tolist()),
                       tuple(duals[:n].tolist()))


# --- 단위 공 단면 ---
_CHART_CORNERS = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))


def unit_ball_section(g: PeriodicWeightedGraph, plane, directions: int,
                      N: int | None = None) -> list[SampledConvexProfile]:
    """
    평면 span(a, b) 위의 노름을 네 개의 현(chord) 차트로 표본화합니다.

    각도 θ ↦ ‖cosθ·a + sinθ·b‖ 는 θ 에 대해 볼록하지 않으므로, 다각형 a → b → −a → −b 의
    변마다 s ↦ ‖(1−s)c_k + s·c_{k+1}‖ (s ∈ [−½, 3/2]) 를 씁니다. 이 함수는 s 에 대해 볼록이고,
    꺾임점은 단위 공의 꼭짓점 방향, 아핀 구간은 면에 대응합니다.
    표본 수는 s = 0, 1 이 표본이 되도록 4k+1 로 맞춥니다.

    Args:
        g: 주기 그래프.
        plane: 두 정수 벡터 (a, b).
        directions (int): 차트당 표본 수 (≥ 5).
        N (int, optional): 주면 최단 경로 추정 (들어 올림 배수를 2k 의 배수로 올림),
            없으면 보정 LP 의 정확한 값.

    Returns:
        list[SampledConvexProfile]: 차트 4개. 0 번이 (a, b) 차트입니다.
    """
    a, b = (np.asarray(p, dtype=np.int64) for p in plane)
    if a.shape != (g.d,) or b.shape != (g.d,):
        raise ValueError(f"평면 벡터는 길이 {g.d} 여야 합니다.")
    if np.linalg.matrix_rank(np.vstack([a, b]).astype(float)) < 2:
        raise ValueError(f"평면 벡터가 일차독립이 아닙니다: {a.tolist()}, {b.tolist()}")
    if directions < 5:
        raise ValueError(f"directions 는 5 이상이어야 합니다: {directions}")
    k = max(1, (directions - 1) // 4)
    s = np.linspace(-0.5, 1.5, 4 * k + 1)
    weights_num = np.arange(4 * k + 1) - k          # s = weights_num / (2k)

    if N is None:
        def norm(vec):
            return calibrated_norm(g, vec).value
        tol, label = CFG.TOL_CONVEX, "calibrated"
    else:
        lift = int(math.ceil(N / (2 * k)) * 2 * k)

        def norm(vec):
            z = np.rint(vec * lift).astype(np.int64)
            if not np.any(z):
                raise ValueError("단면 표본이 원점에 떨어졌습니다.")
            return stable_norm(g, z, 1, calibrate=False).upper / lift
        tol, label = max(CFG.TOL_CONVEX, 2.0 * g.cell_diameter() / lift), f"N={lift}"

    charts = []
    for c in range(4):
        p0 = np.asarray(_CHART_CORNERS[c])
        p1 = np.asarray(_CHART_CORNERS[(c + 1) % 4])
        values = []
        for num in weights_num:
            t = num / (2 * k)
            x, y = (1 - t) * p0 + t * p1
            values.append(norm(x * a + y * b))
        charts.append(SampledConvexProfile(s, np.array(values), f"section[{c}]({g.name},{label})",
                                           tol_convex=tol))
    logging.info(f"unit ball section {g.name} plane=({a.tolist()},{b.tolist()}): 4 charts x {s.size} samples")
    return charts


def _chart_point(chart: int, t: float) -> np.ndarray:
    p0 = np.asarray(_CHART_CORNERS[chart])
    p1 = np.asarray(_CHART_CORNERS[(chart + 1) % 4])
    return (1 - t) * p0 + t * p1


def section_faces(charts: list[SampledConvexProfile], tol_face: float | None = None,
                  tol_corner: float | None = None, digits: int = 6) -> SectionFaces:
    """
    각 차트에 detect_faces 를 적용하고, 방향으로 꼭짓점을, 선형 범함수 ℓ 로 면을 합칩니다.
    """
    if len(charts) != 4:
        raise ValueError("unit_ball_section 의 차트 4개가 필요합니다.")
    vertices: dict[float, tuple[float, float]] = {}
    facets: dict[tuple[float, float], tuple[float, float]] = {}
    for c, chart in enumerate(charts):
        x, y = chart.abscissae, chart.values
        for face in detect_faces(chart, tol_face, tol_corner):
            i, j = face.support
            if face.kind == "vertex":
                p = _chart_point(c, x[i])
                v = p / y[i]
                vertices.setdefault(round(math.atan2(v[1], v[0]) % (2 * math.pi), digits),
                                    (float(v[0]), float(v[1])))
            else:
                # 두 끝 표본에서 ℓ(p) = ‖p‖ 인 ℓ 을 풉니다.
                P = np.vstack([_chart_point(c, x[i]), _chart_point(c, x[j])])
                ell = np.linalg.solve(P, np.array([y[i], y[j]]))
                key = (round(float(ell[0]), digits), round(float(ell[1]), digits))
                facets.setdefault(key, (float(ell[0]), float(ell[1])))
    vs = tuple(vertices[a] for a in sorted(vertices))
    fs = tuple(sorted(facets.values(), key=lambda e: math.atan2(e[1], e[0]) % (2 * math.pi)))
    logging.info(f"section faces: {len(vs)} vertices, {len(fs)} facets")
    return SectionFaces(vs, fs)


# --- Minkowski 격자점 세기 (d = 2) ---
def dual_ball_vertices(g: PeriodicWeightedGraph, tol: float = 1e-9, max_queries: int = 1000) -> np.ndarray:
    """
    쌍대 단위 공 B* = {c : ⟨c, h⟩ ≤ ‖h‖} 의 꼭짓점을 LP 지지(support) 질의로 감싸며 찾습니다.

    ±e₁, ±e₂ 방향 질의로 시작하고, 이웃한 두 점을 잇는 변의 바깥 법선 방향으로 질의해
    더 바깥의 점이 나오면 끼워 넣습니다. 새 점이 더 나오지 않으면 멈춥니다.
    """
    if g.d != 2:
        raise ValueError("쌍대 공 다각형은 d = 2 에서만 계산합니다.")

    def support(direction) -> tuple[np.ndarray, float]:
        cal = calibrated_norm(g, direction)
        return np.asarray(cal.covector), cal.value

    pts = [support(d)[0] for d in ((1, 0), (0, 1), (-1, 0), (0, -1))]
    confirmed: set = set()
    for _ in range(max_queries):
        arr = np.unique(np.round(np.array(pts), 12), axis=0)
        order = np.argsort(np.arctan2(arr[:, 1], arr[:, 0]), kind="stable")
        arr = arr[order]
        added = False
        for i in range(len(arr)):
            ci, cj = arr[i], arr[(i + 1) % len(arr)]
            key = (tuple(ci), tuple(cj))
            if key in confirmed:
                continue
            normal = np.array([cj[1] - ci[1], ci[0] - cj[0]])
            if not np.any(normal):
                confirmed.add(key)
                continue
            c, value = support(normal)
            if value > max(ci @ normal, cj @ normal) + tol * max(1.0, abs(value)):
                pts.append(c)
                added = True
                break
            confirmed.add(key)
        if not added:
            hull = ConvexHull(arr)
            return arr[hull.vertices]
    raise ValueError(f"{g.name}: 쌍대 공 꼭짓점 탐색이 {max_queries} 번 안에 끝나지 않았습니다.")


def ball_area(g: PeriodicWeightedGraph) -> float:
    """단위 공 {‖h‖ ≤ 1} 의 넓이 (Minkowski 극한값)."""
    C = dual_ball_vertices(g)
    prim = [np.linalg.solve(np.vstack([C[i], C[(i + 1) % len(C)]]), np.ones(2)) for i in range(len(C))]
    return float(ConvexHull(np.array(prim)).volume)


def _coordinate_radius(C: np.ndarray, axis: int) -> float:
    """max_{‖h‖ ≤ 1} |h_axis|."""
    best = 0.0
    for sign in (1.0, -1.0):
        obj = np.zeros(2)
        obj[axis] = -sign
        res = linprog(obj, A_ub=C, b_ub=np.ones(len(C)), bounds=(None, None), method="highs")
        if res.status != 0:
            raise ValueError(f"좌표 반경 LP 실패: {res.message}")
        best = max(best, -float(res.fun))
    return best


def count_classes(g: PeriodicWeightedGraph, T: float, N: int | None = None,
                  workers: int = 1) -> ClassCount:
    """
    ‖h‖ ≤ T 인 정수 벡터 h ∈ ℤ² 의 개수와 count / T².

    좌표 반경 R_i = T·max_{‖h‖≤1}|h_i| 로 상자를 자르고 h₁ 행 단위로 셉니다.
    N 이 없으면 쌍대 공 꼭짓점으로 정확한 노름 max_j ⟨c_j, h⟩ 를 쓰고,
    N 이 있으면 한 번의 Dijkstra 로 d(a, a + N·h) / N ≤ T 인 h 를 셉니다 (노름 상계이므로 개수는 하계).

    Args:
        workers (int): h₁ 행을 나눠 셀 스레드 수. 합계는 workers 와 무관합니다.

    Raises:
        ValueError: T ≤ 0, d ≠ 2, 또는 열거할 상자가 CFG.COUNT_MAX 를 넘을 때.
    """
    if not T > 0:
        raise ValueError(f"T 는 양수여야 합니다: {T}")
    if g.d != 2:
        raise ValueError("count_classes 는 d = 2 그래프에서만 동작합니다.")
    C = dual_ball_vertices(g)
    R = [int(math.floor(T * _coordinate_radius(C, ax) * (1 + REL_TOL) + 1e-9)) for ax in (0, 1)]
    predicted = (2 * R[0] + 1) * (2 * R[1] + 1)
    if predicted > CFG.COUNT_MAX:
        raise ValueError(f"예상 열거 크기 {predicted} 가 상한 {CFG.COUNT_MAX} 을 넘습니다.")
    limit = T * (1 + REL_TOL) + 1e-9
    col = np.arange(-R[1], R[1] + 1)

    if N is None:
        method = "calibrated"

        def count_rows(rows: np.ndarray) -> int:
            total = 0
            for r in rows:
                vals = np.max(C[:, 0:1] * r + C[:, 1:2] * col[None, :], axis=0)
                total += int(np.count_nonzero(vals <= limit))
            return total
    else:
        method = f"shortest-path(N={N})"
        if N < 1:
            raise ValueError(f"N 은 1 이상이어야 합니다: {N}")
        if N * max(R) > CFG.SN_MAX_SPAN:
            raise ValueError(f"N·R = {N * max(R)} 가 창 상한 {CFG.SN_MAX_SPAN} 을 넘습니다.")
        lo = -N * np.array(R, dtype=np.int64) - CFG.SN_MARGIN
        dist, shape = _anchor_distances(g, lo, -lo)
        anchors = np.asarray(g.anchors)

        def count_rows(rows: np.ndarray) -> int:
            total = 0
            for r in rows:
                cells = np.ravel_multi_index((np.full(col.size, N * r) - lo[0], N * col - lo[1]), shape)
                d = np.min(dist[np.arange(anchors.size)[:, None], cells[None, :] * g.n_vertices
                                + anchors[:, None]], axis=0)
                total += int(np.count_nonzero(d / N <= limit))
            return total

    rows = np.arange(-R[0], R[0] + 1)
    shards = [s for s in np.array_split(rows, max(1, workers)) if s.size]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            count = sum(pool.map(count_rows, shards))
    else:
        count = sum(count_rows(s) for s in shards)
    result = ClassCount(int(count), count / T ** 2, method)
    logging.info(f"count_classes {g.name} T={T:g} [{method}]: {result.count} classes, ratio {result.ratio:.6g}")
    return result


def minkowski_series(g: PeriodicWeightedGraph, Ts: Iterable[float], N: int | None = None) -> pd.DataFrame:
    """T 별 (count, ratio) 와 극한값(단위 공 넓이) 대비 상대 오차."""
    area = ball_area(g)
    rows = []
    for T in Ts:
        res = count_classes(g, T, N)
        rows.append({"T": float(T), "count": res.count, "ratio": res.ratio, "area": area,
                     "rel_error": abs(res.ratio - area) / area})
    return pd.DataFrame(rows, columns=["T", "count", "ratio", "area", "rel_error"])


def hedlund_scaling(eps_list: Iterable[float] = (0.05, 0.1, 0.2), N: int = 30,
                    m: int = 3) -> tuple[pd.DataFrame, dict[int, float]]:
    """
    Hedlund 모델에서 ‖e_i‖ 추정값을 ε 별로 구하고, 축마다 log‖e_i‖ 대 log ε 기울기를 적합합니다.

    Returns:
        (DataFrame[epsilon, axis, norm], {axis: slope})
    """
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 2:
        raise ValueError("기울기 적합에는 ε 값이 2개 이상 필요합니다.")
    rows = []
    for eps in eps_list:
        g = hedlund_graph(eps, m)
        for axis in range(3):
            h = [0, 0, 0]
            h[axis] = 1
            rows.append({"epsilon": eps, "axis": axis,
                         "norm": stable_norm(g, h, N, calibrate=False).upper})
    df = pd.DataFrame(rows, columns=["epsilon", "axis", "norm"])
    slopes = {}
    for axis, part in df.groupby("axis"):
        slopes[int(axis)] = float(np.polyfit(np.log(part["epsilon"]), np.log(part["norm"]), 1)[0])
    logging.info(f"hedlund scaling N={N}: slopes {slopes}")
    return df, slopes
