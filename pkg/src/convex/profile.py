"""
볼록 함수 표본(β 또는 α 프로파일)과 그 기본 타입들.

β 함수는 직선 위의 유한개 점에서만 알려진 볼록 함수로 다룹니다.
이 모듈은 다음을 담당합니다:
- `HomologyVector`: 호몰로지 벡터 h (또는 쌍대 플래그가 붙은 코호몰로지 벡터 c).
- `SampledConvexProfile`: (가로좌표, 값) 표본 + 이산 볼록성 인증서.
- `FaceDescriptor`: 꼭짓점/아핀 구간/방사 면 기술자.
- 프로파일 텍스트 형식 읽기/쓰기 (`# profile v1 dim=1 provenance=<label>` 헤더 + 탭 구분 행).

모든 값 객체는 생성 후 불변(immutable)이므로 스레드 사이에서 그대로 공유해도 안전합니다.
"""
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
import pandas as pd

from config.config import CFG

PROFILE_HEADER = "# profile v1 dim=1"


class NonConvexProfileError(ValueError):
    """이산 볼록성 인증서가 실패했을 때 발생. 위반한 세 표본의 인덱스를 함께 전달합니다."""

    def __init__(self, triple: tuple[int, int, int], excess: float, provenance: str = ""):
        self.triple = triple
        self.excess = excess
        super().__init__(
            f"non-convex profile '{provenance}': samples {triple} exceed the chord by {excess:.3e}"
        )


@dataclass(frozen=True)
class HomologyVector:
    """
    호몰로지 클래스 h ∈ H₁(M, ℝ) ≅ ℝᵇ 의 좌표 표현.

    `dual=True` 이면 같은 타입으로 코호몰로지 벡터 c ∈ H¹(M, ℝ) 를 나타냅니다.
    """
    coords: tuple[float, ...]
    dual: bool = False

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if len(coords) < 1:
            raise ValueError("HomologyVector는 최소 1개의 좌표가 필요합니다 (b ≥ 1).")
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"HomologyVector 좌표는 모두 유한해야 합니다: {coords}")
        object.__setattr__(self, "coords", coords)

    @property
    def b(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def scaled(self, t: float) -> "HomologyVector":
        return HomologyVector(tuple(t * c for c in self.coords), self.dual)


def check_convexity(abscissae: np.ndarray, values: np.ndarray, tol: float) -> tuple[tuple[int, int, int], float] | None:
    """
    이산 볼록성 검사. 모든 내부 표본 i 에 대해
    value_i ≤ (i-1, i+1) 선형보간 + tol 인지 확인합니다.

    Returns:
        위반이 없으면 None, 있으면 ((i-1, i, i+1), 초과량). 초과량이 가장 큰 위반을 돌려줍니다.
    """
    x = np.asarray(abscissae, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.size < 3:
        return None
    w = (x[1:-1] - x[:-2]) / (x[2:] - x[:-2])
    chord = y[:-2] + w * (y[2:] - y[:-2])
    excess = y[1:-1] - chord
    worst = int(np.argmax(excess))
    if excess[worst] > tol:
        i = worst + 1
        return (i - 1, i, i + 1), float(excess[worst])
    return None


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SampledConvexProfile:
    """
    직선 위에서 표본화된 볼록 함수 (β 또는 그 변환 α).

    Attributes:
        abscissae (np.ndarray): 엄격히 증가하는 가로좌표.
        values (np.ndarray): 각 가로좌표에서의 함수값 (작용 단위).
        provenance (str): 이 프로파일을 만든 엔진/연산의 라벨.
        labels (tuple): 선택적인 표본별 라벨 (예: 정확한 분수 "1/3"). 없으면 빈 튜플.
        tol_convex (float): 볼록성 인증서 허용오차.
        check (bool): False 이면 생성 시 볼록성 검사를 건너뜁니다 (파일에서 읽은 원시 데이터 등).
            이 경우에도 연산에 들어가기 전에 `certify()` 가 다시 검사합니다.
    """
    abscissae: np.ndarray
    values: np.ndarray
    provenance: str = "unknown"
    labels: tuple = ()
    tol_convex: float = field(default_factory=lambda: CFG.TOL_CONVEX)
    check: bool = True

    def __post_init__(self):
        x = _frozen(self.abscissae)
        y = _frozen(self.values)
        if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
            raise ValueError(f"abscissae/values 모양이 맞지 않습니다: {x.shape} vs {y.shape}")
        if x.size == 0:
            raise ValueError("프로파일에는 최소 1개의 표본이 필요합니다.")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("프로파일 표본은 모두 유한해야 합니다.")
        if np.any(np.diff(x) <= 0):
            raise ValueError("가로좌표는 엄격히 증가해야 합니다.")
        labels = tuple(self.labels)
        if labels and len(labels) != x.size:
            raise ValueError("labels 길이가 표본 수와 다릅니다.")
        object.__setattr__(self, "abscissae", x)
        object.__setattr__(self, "values", y)
        object.__setattr__(self, "labels", labels)
        if self.check:
            self.certify()

    # --- 생성 헬퍼 ---
    @classmethod
    def from_function(cls, f: Callable[[np.ndarray], np.ndarray], abscissae: Iterable[float],
                      provenance: str, **kwargs) -> "SampledConvexProfile":
        """볼록 함수 f 를 주어진 가로좌표에서 평가해 프로파일을 만듭니다."""
        x = np.asarray(list(abscissae), dtype=float)
        return cls(x, np.asarray(f(x), dtype=float), provenance, **kwargs)

    # --- 인증서 ---
    def convexity_violation(self, tol: float | None = None):
        return check_convexity(self.abscissae, self.values, self.tol_convex if tol is None else tol)

    def certify(self, tol: float | None = None) -> "SampledConvexProfile":
        """볼록성 인증서를 검사하고, 실패하면 `NonConvexProfileError` 를 올립니다."""
        bad = self.convexity_violation(tol)
        if bad is not None:
            raise NonConvexProfileError(bad[0], bad[1], self.provenance)
        return self

    # --- 조회 ---
    def __len__(self) -> int:
        return int(self.abscissae.size)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.abscissae.tolist(), self.values.tolist()))

    def index_of(self, at: float) -> int:
        """`at` 과 일치하는 표본 인덱스. 표본이 아니면 ValueError."""
        i = int(np.searchsorted(self.abscissae, at))
        scale = max(1.0, abs(at))
        for j in (i - 1, i):
            if 0 <= j < len(self) and abs(self.abscissae[j] - at) <= 1e-12 * scale:
                return j
        raise ValueError(f"{at} 는 프로파일의 표본 가로좌표가 아닙니다.")

    def to_frame(self) -> pd.DataFrame:
        df = pd.DataFrame({"abscissa": self.abscissae, "value": self.values})
        if self.labels:
            df["label"] = list(self.labels)
        return df


@dataclass(frozen=True)
class FaceDescriptor:
    """
    면 기술자.

    Attributes:
        kind (str): "vertex" | "segment" | "radial".
        support (tuple[int, int]): 면에 속한 표본 인덱스 범위 [start, stop] (양끝 포함).
        slopes (tuple[float, float]): 꼭짓점이면 (왼쪽, 오른쪽) 기울기, 구간이면 (기울기, 기울기).
        span (tuple[float, float]): support 에 해당하는 가로좌표 구간.
    """
    kind: str
    support: tuple[int, int]
    slopes: tuple[float, float]
    span: tuple[float, float]

    @property
    def jump(self) -> float:
        return self.slopes[1] - self.slopes[0]


# --- 텍스트 형식 입출력 ---
def write_profile(profile: SampledConvexProfile, path: Path) -> Path:
    """
    프로파일을 열 기반 텍스트로 저장합니다.

    첫 줄은 `# profile v1 dim=1 provenance=<label>`, 이후 `abscissa<TAB>value[<TAB># label]` 행이
    가로좌표 오름차순으로 이어집니다. 실수는 `%.17g` (17자리 유효숫자) 로 씁니다.
    """
    path = Path(path)
    lines = [f"{PROFILE_HEADER} provenance={profile.provenance}"]
    for i, (x, y) in enumerate(profile.samples):
        row = f"{x:.17g}\t{y:.17g}"
        if profile.labels:
            row += f"\t# {profile.labels[i]}"
        lines.append(row)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_profile(path: Path, check: bool = False) -> SampledConvexProfile:
    """
    `write_profile` 형식의 파일을 읽습니다.

    Args:
        path (Path): 파일 경로.
        check (bool): True 이면 읽는 즉시 볼록성 인증서를 검사합니다.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
    if not header.startswith(PROFILE_HEADER):
        raise ValueError(f"{path}: profile v1 헤더가 아닙니다: {header!r}")
    provenance = header.split("provenance=", 1)[1] if "provenance=" in header else "unknown"
    df = pd.read_csv(path, sep="\t", header=None, skiprows=1,
                     names=["abscissa", "value", "label"], dtype={"label": str})
    labels: Sequence[str] = ()
    if df["label"].notna().any():
        labels = tuple(str(v).removeprefix("#").strip() for v in df["label"].fillna(""))
    logging.info(f"profile loaded: {path} ({len(df)} samples, provenance={provenance})")
    return SampledConvexProfile(df["abscissa"].to_numpy(), df["value"].to_numpy(),
                                provenance, labels, check=check)
