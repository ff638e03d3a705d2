"""
Legendre–Fenchel 쌍대성과 면(face) 검출.

- `legendre_transform`: α(c) = max_h (c·h − β(h)) 를 쌍대 격자 위에서 계산합니다.
- `biconjugate`: 변환을 두 번 적용해 원래 가로좌표로 되돌립니다 (β** ≤ β).
- `one_sided_derivatives`: 표본점에서의 왼쪽/오른쪽 차분몫.
- `detect_faces`: 최대 아핀 구간(segment)과 꼭짓점(vertex)을 찾습니다.
- `radial_profile` / `radial_face`: t ↦ f(t·h) 제한으로 방사 면을 찾습니다.
"""
import logging
from typing import Callable, Iterable

import numpy as np

from config.config import CFG
from src.convex.profile import FaceDescriptor, SampledConvexProfile


def legendre_transform(profile: SampledConvexProfile, dual_grid: Iterable[float]) -> SampledConvexProfile:
    """
    표본화된 볼록 함수의 Legendre–Fenchel 변환.

    Args:
        profile (SampledConvexProfile): 볼록성 인증서를 통과해야 하는 β 프로파일.
        dual_grid (Iterable[float]): α 를 평가할 쌍대 변수 c 들. 정렬/중복 제거 후 사용합니다.

    Returns:
        SampledConvexProfile: 각 c 에서 α(c) = max_i (c·h_i − β_i).

    Raises:
        NonConvexProfileError: 입력이 볼록하지 않으면 위반한 세 표본과 함께.
        ValueError: 격자가 비었거나 유한하지 않으면.
    """
    profile.certify()
    c = np.unique(np.asarray(list(dual_grid), dtype=float))
    if c.size == 0:
        raise ValueError("dual_grid 가 비어 있습니다.")
    if not np.all(np.isfinite(c)):
        raise ValueError("dual_grid 는 유한한 값이어야 합니다.")

    h, beta = profile.abscissae, profile.values
    # (격자 크기 × 표본 수) 행렬에서 행별 최댓값. 격자가 크면 행 단위로 나눠 메모리를 제한합니다.
    alpha = np.empty_like(c)
    chunk = max(1, 4_000_000 // max(1, h.size))
    for s in range(0, c.size, chunk):
        alpha[s:s + chunk] = np.max(np.outer(c[s:s + chunk], h) - beta, axis=1)
    return SampledConvexProfile(c, alpha, f"legendre({profile.provenance})",
                                tol_convex=profile.tol_convex)


def biconjugate(profile: SampledConvexProfile, dual_grid: Iterable[float]) -> SampledConvexProfile:
    """β** = (β*)* 를 β 의 원래 가로좌표 위에서 계산합니다."""
    alpha = legendre_transform(profile, dual_grid)
    back = legendre_transform(alpha, profile.abscissae)
    return SampledConvexProfile(profile.abscissae, back.values,
                                f"biconjugate({profile.provenance})", tol_convex=profile.tol_convex)


def one_sided_derivatives(profile: SampledConvexProfile, at: float) -> tuple[float, float]:
    """
    `at` 에서 가장 가까운 이웃 표본으로 잰 왼쪽/오른쪽 차분몫.

    Raises:
        ValueError: 표본이 3개 미만이거나, `at` 이 표본이 아니거나, 경계 표본일 때.
    """
    if len(profile) < 3:
        raise ValueError("표본이 3개 미만인 프로파일에서는 기울기를 정의하지 않습니다.")
    profile.certify()
    i = profile.index_of(at)
    if i == 0 or i == len(profile) - 1:
        raise ValueError(f"{at} 는 경계 표본이라 양쪽 이웃이 없습니다.")
    x, y = profile.abscissae, profile.values
    left = (y[i] - y[i - 1]) / (x[i] - x[i - 1])
    right = (y[i + 1] - y[i]) / (x[i + 1] - x[i])
    return float(left), float(right)


def _affine_runs(x: np.ndarray, y: np.ndarray, tol_face: float) -> list[tuple[int, int]]:
    """
    왼쪽부터 탐욕적으로 최대 아핀 구간을 찾습니다.
    구간 [i, j] 의 모든 표본이 현(i→j)에서 tol_face 이내면 같은 면입니다. 3개 미만은 버립니다.
    인접한 구간은 끝점 표본 하나를 공유할 수 있습니다.
    """
    n = x.size
    runs = []
    i = 0
    while i < n - 1:
        j = i + 1
        while j + 1 < n:
            k = j + 1
            slope = (y[k] - y[i]) / (x[k] - x[i])
            dev = np.abs(y[i:k + 1] - (y[i] + slope * (x[i:k + 1] - x[i])))
            if np.max(dev) > tol_face:
                break
            j = k
        if j - i + 1 >= 3:
            runs.append((i, j))
        i = j if j > i + 1 else i + 1
    return runs


def _smooth_runs(jump: np.ndarray, half: np.ndarray, tol_corner: float, rel: float) -> np.ndarray:
    """
    내부 표본마다 자신이 속한 매끄러운 구간의 길이를 돌려줍니다.

    이웃한 두 표본 k, k+1 은 둘 다 도약이 tol_corner 를 넘고, 각자의 도약이 상대의 곡률
    κ = J / 반간격 으로 rel·J + tol_corner 안에서 설명될 때 이어집니다.
    """
    kappa = jump / half
    cand = jump > tol_corner
    link = (cand[:-1] & cand[1:]
            & (np.abs(jump[:-1] - half[:-1] * kappa[1:]) <= rel * jump[:-1] + tol_corner)
            & (np.abs(jump[1:] - half[1:] * kappa[:-1]) <= rel * jump[1:] + tol_corner))
    run_id = np.concatenate([[0], np.cumsum(~link)])
    return np.bincount(run_id)[run_id]


def detect_faces(profile: SampledConvexProfile, tol_face: float | None = None,
                 tol_corner: float | None = None) -> list[FaceDescriptor]:
    """
    프로파일에서 아핀 구간(segment)과 꼭짓점(vertex)을 검출합니다.

    내부 표본 i 의 기울기 도약 J_i 가 tol_corner 를 넘으면 꼭짓점 후보입니다.
    후보가 CFG.FACE_SMOOTH_RUN 개 이상 이어진 매끄러운 구간(이웃끼리 곡률이
    CFG.TOL_CURVATURE_REL 안에서 일치) 안에 있으면 해상도 효과로 보고 버립니다.
    그래서 h²/2 는 꼭짓점이 없고, 이웃한 꺾임점 여러 개(|x| + |x − 0.1| + |x − 0.2|)나
    K > 0 의 FK β 처럼 곡률이 들쭉날쭉한 표본은 모두 꼭짓점이 됩니다.
    같은 곡률의 꺾임점이 FACE_SMOOTH_RUN 개 이상 이어지면 표본화된 곡선과 구별할 수 없습니다.

    Args:
        profile (SampledConvexProfile): 볼록 프로파일 (표본 ≥ 3).
        tol_face (float, optional): 아핀 구간 허용오차. 기본 CFG.TOL_FACE.
        tol_corner (float, optional): 꼭짓점 임계값. 기본 CFG.TOL_CORNER.

    Returns:
        list[FaceDescriptor]: 가로좌표 순서로 정렬된 면 목록.
    """
    tol_face = CFG.TOL_FACE if tol_face is None else tol_face
    tol_corner = CFG.TOL_CORNER if tol_corner is None else tol_corner
    if len(profile) < 3:
        raise ValueError("표본이 3개 미만인 프로파일에서는 면을 검출하지 않습니다.")
    profile.certify()
    x, y = profile.abscissae, profile.values

    faces: list[FaceDescriptor] = []
    runs = _affine_runs(x, y, tol_face)
    for i, j in runs:
        slope = float((y[j] - y[i]) / (x[j] - x[i]))
        faces.append(FaceDescriptor("segment", (i, j), (slope, slope), (float(x[i]), float(x[j]))))

    slopes = np.diff(y) / np.diff(x)
    jump = slopes[1:] - slopes[:-1]                 # J_i, i = 1..n-2
    half = (x[2:] - x[:-2]) / 2.0
    run_length = _smooth_runs(jump, half, tol_corner, CFG.TOL_CURVATURE_REL)
    for k in np.flatnonzero((jump > tol_corner) & (run_length < CFG.FACE_SMOOTH_RUN)):
        i = int(k) + 1
        # 아핀 구간의 내부에 놓인 점은 꼭짓점이 아닙니다.
        if any(a < i < b for a, b in runs):
            continue
        faces.append(FaceDescriptor("vertex", (i, i), (float(slopes[k]), float(slopes[k + 1])),
                                    (float(x[i]), float(x[i]))))

    faces.sort(key=lambda f: (f.support[0], f.kind != "segment"))
    logging.info(f"faces of {profile.provenance}: "
                 f"{sum(f.kind == 'segment' for f in faces)} segments, "
                 f"{sum(f.kind == 'vertex' for f in faces)} vertices")
    return faces


def radial_profile(fn: Callable[[np.ndarray], float], h: Iterable[float], ts: Iterable[float],
                   provenance: str = "radial") -> SampledConvexProfile:
    """
    볼록 함수 f 를 반직선 t ↦ t·h 로 제한한 프로파일.

    Args:
        fn: 벡터를 받아 실수를 돌려주는 볼록 함수.
        h: 방향 벡터.
        ts: 엄격히 증가하는 t 값들.
    """
    h = np.asarray(list(h), dtype=float)
    ts = np.asarray(list(ts), dtype=float)
    values = np.array([fn(t * h) for t in ts], dtype=float)
    return SampledConvexProfile(ts, values, provenance)


def radial_face(profile: SampledConvexProfile, at: float = 1.0, tol_face: float | None = None,
                tol_corner: float | None = None) -> FaceDescriptor | None:
    """
    t = `at` 을 포함하는 최대 아핀 구간을 방사 면(kind="radial")으로 돌려줍니다. 없으면 None.
    """
    i = profile.index_of(at)
    for face in detect_faces(profile, tol_face, tol_corner):
        a, b = face.support
        if face.kind == "segment" and a <= i <= b:
            return FaceDescriptor("radial", face.support, face.slopes, face.span)
    return None
