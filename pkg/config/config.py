"""
전역 설정 + .env 로드 (C# static class 개념).
다른 모듈에서 `from config.config import CFG` 로 불러 사용.

이 모듈은 수치 실험실(mather-lab) 전역에서 사용될 허용오차, 반복 상한, 출력 경로 등을
한 곳에서 관리하는 중앙 저장소 역할을 합니다.
`dotenv` 라이브러리로 프로젝트 루트의 `.env` 파일을 읽어 환경 변수로 올리고,
`CFG` 클래스의 클래스 변수(정적 변수)로 할당합니다.

- 설정의 중앙화: 허용오차(tol_*)와 가드(guard) 값이 모두 여기 모여 있습니다.
- 유연성: 실험 환경마다 `.env` 또는 환경 변수만 바꿔서 다른 설정을 적용할 수 있습니다.
- 필수 변수는 없습니다. 텔레그램 키는 알림을 켜고 싶을 때만 설정합니다.
"""
import os
from pathlib import Path
from dotenv import load_dotenv

# --- .env 파일 로드 ---
# 현재 작업 디렉토리(또는 상위)에서 `.env` 파일을 찾아 환경 변수로 로드합니다.
# 파일이 없어도 오류는 나지 않고, 아래의 기본값이 사용됩니다.
load_dotenv()


def _flag(key: str, default: str = "false") -> bool:
    """'true'/'1'/'yes' 형태의 환경 변수를 bool 로 읽습니다."""
    return os.getenv(key, default).strip().lower() in ("true", "1", "yes")


class CFG:
    """
    전역 설정 값들을 담는 정적(Static) 컨테이너 클래스.
    모든 멤버는 클래스 변수이므로 `CFG.TOL_CONVEX` 처럼 바로 접근합니다.
    `os.getenv(key, default)` 형태로 환경 변수가 없을 때의 기본값을 지정합니다.
    """

    # --- 볼록 해석(convex-core) 허용오차 ---
    # 이산 볼록성 검사: 내부 표본 i 에서 value_i ≤ (i-1, i+1) 선형보간 + TOL_CONVEX 이어야 합니다.
    TOL_CONVEX = float(os.getenv("TOL_CONVEX", 1e-9))
    # 아핀 구간(segment) 판정: 현(chord)에서 이 값 이내로 벗어난 표본만 같은 면으로 봅니다.
    TOL_FACE = float(os.getenv("TOL_FACE", 1e-7))
    # 꼭짓점(vertex) 판정: 오른쪽 기울기 - 왼쪽 기울기가 이 값보다 커야 합니다.
    TOL_CORNER = float(os.getenv("TOL_CORNER", 1e-4))
    # 이웃한 두 표본의 도약이 서로의 곡률로 이 비율 안에서 설명되면 같은 매끄러운 구간으로 잇습니다.
    TOL_CURVATURE_REL = float(os.getenv("TOL_CURVATURE_REL", 0.25))
    # 이 표본 수보다 짧은 매끄러운 구간의 도약은 꼭짓점으로 봅니다.
    FACE_SMOOTH_RUN = int(os.getenv("FACE_SMOOTH_RUN", 5))
    # 쌍대성 항등식 min α = -β(0) 의 허용오차.
    TOL_DUAL = float(os.getenv("TOL_DUAL", 1e-6))
    # 정수 관계 탐색: b 가 이 값 이하이면 전수 탐색, 초과하면 격자 기저 축소(LLL) 후보를 씁니다.
    IRR_EXHAUSTIVE_MAX_B = int(os.getenv("IRRATIONALITY_EXHAUSTIVE_MAX_B", 4))

    # --- FK(Frenkel-Kontorova) 엔진 ---
    # 경사 하강 + 뉴턴 보정의 최대 반복 횟수.
    FK_MAX_ITER = int(os.getenv("FK_MAX_ITER", 100_000))
    # 반환 시점의 기울기(gradient) 최대 노름 상한.
    FK_GRAD_TOL = float(os.getenv("FK_GRAD_TOL", 1e-10))
    # 기본 랜덤 재시작 횟수 (강체 회전 초기값은 항상 추가로 시도합니다).
    FK_RESTARTS = int(os.getenv("FK_RESTARTS", 4))

    # --- 안정 노름(stable norm) ---
    # 들어 올린(lifted) 창(window)의 여유 셀 수.
    SN_MARGIN = int(os.getenv("SN_MARGIN", 3))
    # N·|h|∞ 가 이 값을 넘으면 창이 너무 커지므로 거부합니다.
    SN_MAX_SPAN = int(os.getenv("SN_MAX_SPAN", 10_000))
    # count_classes 의 예상 격자점 수 상한.
    COUNT_MAX = int(os.getenv("COUNT_MAX", 10_000_000))

    # --- 토러스 곡선 / 준결정 ---
    # IrrationalPair 생성 시 정수 관계 k0 + k1·α + k2·β = 0 을 찾는 탐색 범위 B.
    INDEPENDENCE_BOUND = int(os.getenv("INDEPENDENCE_BOUND", 1000))
    # qc_build 의 창 부피 상한.
    QC_MAX_VOLUME = int(os.getenv("QC_MAX_VOLUME", 100_000_000))

    # --- 경로 및 로깅 ---
    # 실험 결과를 저장할 루트 디렉토리. 설정 파일의 상대 출력 경로는 이 아래에 만들어집니다.
    OUT_ROOT = Path(os.getenv("MATHER_LAB_OUT", "runs"))
    # 회전(rotating) 로그 파일 경로.
    LOG_FILE = os.getenv("LOG_FILE", "mather_lab.log")

    # --- 텔레그램 알림 (선택) ---
    # 스윕(sweep) 완료와 실패 항목을 알려줍니다. NOTIFY=true 이고 두 키가 모두 있을 때만 실제 전송합니다.
    TG_TOKEN = os.getenv("TELEGRAM_BOT_TOKEN")
    TG_CHAT = os.getenv("TELEGRAM_CHAT_ID")
    NOTIFY = _flag("NOTIFY")

    @staticmethod
    def validate() -> None:
        """
        로드된 설정 값의 유효성을 검증하고, 출력 루트 디렉토리를 생성합니다.
        모듈이 처음 임포트될 때 단 한 번 호출됩니다.
        """
        # 허용오차는 모두 양수여야 의미가 있습니다.
        for name in ("TOL_CONVEX", "TOL_FACE", "TOL_CORNER", "TOL_DUAL", "FK_GRAD_TOL", "TOL_CURVATURE_REL"):
            if getattr(CFG, name) <= 0:
                raise ValueError(f"{name}는 0보다 커야 합니다: {getattr(CFG, name)}")

        # 반복 상한과 가드 값은 최소 1 이상이어야 합니다.
        for name in ("FK_MAX_ITER", "FK_RESTARTS", "FACE_SMOOTH_RUN", "SN_MARGIN", "SN_MAX_SPAN",
                     "COUNT_MAX", "INDEPENDENCE_BOUND", "QC_MAX_VOLUME"):
            if getattr(CFG, name) < 1:
                raise ValueError(f"{name}는 1 이상이어야 합니다: {getattr(CFG, name)}")

        if not 1 <= CFG.IRR_EXHAUSTIVE_MAX_B <= 8:
            raise ValueError(f"IRRATIONALITY_EXHAUSTIVE_MAX_B는 1~8 사이여야 합니다: {CFG.IRR_EXHAUSTIVE_MAX_B}")

        # 출력 루트가 없으면 만듭니다. `parents=True` 로 중첩 경로도 허용합니다.
        CFG.OUT_ROOT.mkdir(parents=True, exist_ok=True)


# --- 최초 로드 시 유효성 검증 실행 ---
# 검증에 실패하면 시작 단계에서 바로 예외가 발생합니다.
CFG.validate()
