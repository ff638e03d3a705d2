"""
실험 설정(ExperimentConfig)과 실행 기록(RunManifest).

설정 파일은 평평한 `KEY=VALUE` 텍스트입니다 (python-dotenv 의 `dotenv_values` 로 읽음).

    [torus-seq]
    ENGINE=torus-seq
    KIND=avoid
    ALPHA=0.07
    BETA=0.09
    N=100000
    OUTPUT=avoid-007-009

- `[엔진]` 형태의 섹션 줄은 읽기 편하라고 두는 것으로, 무시됩니다.
- 키는 대소문자를 가리지 않고 소문자로 저장합니다.
- 공통 키: ENGINE (필수), SEED, OUTPUT (기본: 설정 파일 이름).
- 엔진이 모르는 키는 `ConfigError(path, key)` 로 거부합니다.
"""
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from dotenv import dotenv_values

from src.runner.engines import ENGINES

ARTIFACT_VERSION = "mather-lab 1.0.0"
COMMON_KEYS = ("engine", "seed", "output")


class ConfigError(ValueError):
    """설정 파일 오류. 파일 경로와 문제가 된 키를 전달합니다."""

    def __init__(self, path: Path | None, key: str | None, message: str):
        self.path = path
        self.key = key
        super().__init__(f"{path or '<cli>'}: [{key}] {message}")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    검증된 실험 설정.

    Attributes:
        engine (str): 엔진 이름.
        params (dict): 엔진 파라미터 (타입 변환과 기본값 적용 완료).
        seed (int | None): 난수 시드. 엔진이 난수를 쓰면 필수.
        output_dir (Path): 결과 디렉토리. 상대 경로면 CFG.OUT_ROOT 아래에 만듭니다.
        raw (dict): 파일에 적힌 그대로의 키-값 (manifest 에 그대로 기록).
        path (Path | None): 설정 파일 경로.
    """
    engine: str
    params: dict
    seed: int | None
    output_dir: Path
    raw: dict = field(default_factory=dict)
    path: Path | None = None

    @classmethod
    def build(cls, raw: dict[str, Any], path: Path | None = None,
              default_output: str | None = None) -> "ExperimentConfig":
        """
        키-값 사전을 검증해 설정을 만듭니다.

        Raises:
            ConfigError: ENGINE 누락/미지원, 알 수 없는 키, 타입 오류, 필요한 seed 누락.
        """
        raw = {str(k).strip().lower(): ("" if v is None else str(v).strip()) for k, v in raw.items()}
        name = raw.get("engine", "")
        if not name:
            raise ConfigError(path, "engine", "ENGINE 키가 필요합니다.")
        if name not in ENGINES:
            raise ConfigError(path, "engine", f"알 수 없는 엔진 {name!r} (지원: {', '.join(ENGINES)})")
        engine = ENGINES[name]

        body = {k: v for k, v in raw.items() if k not in COMMON_KEYS}
        try:
            params = engine.parse(body)
        except KeyError as e:
            raise ConfigError(path, e.args[0], f"엔진 {name} 이 모르는 키입니다.") from None
        except ValueError as e:
            key = e.args[1] if len(e.args) > 1 else None
            raise ConfigError(path, key, str(e.args[0])) from None

        seed = None
        if raw.get("seed", ""):
            try:
                seed = int(raw["seed"])
            except ValueError:
                raise ConfigError(path, "seed", f"정수가 아닙니다: {raw['seed']!r}") from None
        if seed is None and engine.needs_seed(params):
            raise ConfigError(path, "seed", f"엔진 {name} 은 난수를 쓰므로 SEED 가 필요합니다.")

        output = raw.get("output") or default_output
        if not output:
            raise ConfigError(path, "output", "OUTPUT 키가 필요합니다.")
        return cls(name, params, seed, Path(output), raw, path)


def load_config(path: Path) -> ExperimentConfig:
    """설정 파일을 읽어 검증합니다. OUTPUT 이 없으면 파일 이름(확장자 제외)을 씁니다."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(path, None, f"읽을 수 없습니다: {e}") from None
    body = "\n".join(line for line in text.splitlines() if not line.strip().startswith("["))
    raw = dotenv_values(stream=io.StringIO(body))
    return ExperimentConfig.build(raw, path, default_output=path.stem)


def load_configs(directory: Path) -> list[ExperimentConfig]:
    """디렉토리의 모든 `*.cfg` 를 이름순으로 읽습니다."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ConfigError(directory, None, "디렉토리가 아닙니다.")
    return [load_config(p) for p in sorted(directory.glob("*.cfg"))]


@dataclass
class RunManifest:
    """
    한 번의 실행 기록. `files` 의 해시는 결과 파일 내용만 덮으므로 시각·시간과 무관합니다.

    Attributes:
        config (dict): 설정 그대로 (raw 키-값).
        version (str): 아티팩트 버전.
        output_dir (str): 최종 결과 디렉토리.
        started (str): 시작 시각 (ISO 8601, UTC).
        wall_time (float): 실행 시간 (초).
        files (dict[str, str]): 결과 파일 이름 → sha256.
        checks (dict[str, bool]): 내장 검사 결과.
        passed (bool): 모든 검사가 통과하고 오류가 없으면 True.
        error (str | None): 실패 메시지.
    """
    config: dict
    version: str
    output_dir: str
    started: str
    wall_time: float = 0.0
    files: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    passed: bool = False
    error: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, ensure_ascii=False)

    def save(self, path: Path) -> Path:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")
        return Path(path)

    @classmethod
    def load(cls, path: Path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))
