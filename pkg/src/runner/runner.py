"""
실험 실행기. 모든 병렬성은 여기서만 관리하고, 엔진은 순수하고 결정적인 호출로 다룹니다.

- `run`: 설정 하나를 실행합니다. 결과는 임시 디렉토리에 쓴 뒤 이름 바꾸기로 한 번에 드러나므로,
  중단된 실행은 선언된 출력 경로 아래에 부분 결과를 남기지 않습니다.
- `sweep`: 여러 설정을 스레드 풀에서 실행합니다. 결과 목록은 완료 순서와 상관없이 입력 순서를 따르고,
  실패한 항목은 기록만 하고 나머지를 계속 실행합니다.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from config.config import CFG
from src.runner.engine import EngineError
from src.runner.engines import ENGINES
from src.runner.experiment import ARTIFACT_VERSION, ExperimentConfig, RunManifest
from src.utils.helpers import atomic_dir, file_sha256, tg

MANIFEST_NAME = "manifest.json"


def resolve_output(config: ExperimentConfig) -> Path:
    """상대 출력 경로는 CFG.OUT_ROOT (환경 변수 MATHER_LAB_OUT) 아래로 둡니다."""
    out = Path(config.output_dir)
    return out if out.is_absolute() else CFG.OUT_ROOT / out


def run(config: ExperimentConfig) -> RunManifest:
    """
    설정 하나를 실행하고 결과 파일과 manifest.json 을 원자적으로 씁니다.

    Returns:
        RunManifest: 실행 기록. 검사 실패는 `passed=False` 로 기록될 뿐 예외가 아닙니다.

    Raises:
        EngineError: 엔진 실행 중 오류 (설정 파일 경로와 키 포함). 출력 경로에는 아무것도 남지 않습니다.
    """
    engine = ENGINES[config.engine]
    target = resolve_output(config)
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    logging.info(f"run {config.engine} -> {target}")
    try:
        with atomic_dir(target) as work:
            checks = engine.execute(config.params, work, config.seed)
            files = {p.name: file_sha256(p) for p in sorted(work.iterdir()) if p.is_file()}
            manifest = RunManifest(
                config=dict(config.raw) or {"engine": config.engine},
                version=ARTIFACT_VERSION,
                output_dir=str(target),
                started=started,
                wall_time=round(time.perf_counter() - t0, 3),
                files=files,
                checks={k: bool(v) for k, v in checks.items()},
                passed=all(checks.values()),
            )
            manifest.save(work / MANIFEST_NAME)
    except EngineError as e:
        raise e.with_path(config.path) from e.cause
    except Exception as e:
        raise EngineError(config.engine, None, e, config.path) from e

    failed = [k for k, v in manifest.checks.items() if not v]
    if failed:
        logging.warning(f"run {config.engine} -> {target}: checks failed {failed}")
    else:
        logging.info(f"run {config.engine} -> {target}: {len(manifest.checks)} checks passed "
                     f"({manifest.wall_time:.2f}s)")
    return manifest


def _failed_manifest(config: ExperimentConfig, started: str, error: BaseException) -> RunManifest:
    return RunManifest(config=dict(config.raw) or {"engine": config.engine}, version=ARTIFACT_VERSION,
                       output_dir=str(resolve_output(config)), started=started, passed=False, error=str(error))


def sweep(configs: list[ExperimentConfig], parallelism: int = 1) -> list[RunManifest]:
    """
    설정 목록을 최대 `parallelism` 개씩 동시에 실행합니다.

    Raises:
        ValueError: 출력 디렉토리가 겹치거나 parallelism < 1.
    """
    if parallelism < 1:
        raise ValueError(f"parallelism 은 1 이상이어야 합니다: {parallelism}")
    targets = [resolve_output(c).resolve() for c in configs]
    if len(set(targets)) != len(targets):
        raise ValueError("sweep 의 출력 디렉토리가 서로 달라야 합니다.")
    if not configs:
        return []

    def one(config: ExperimentConfig) -> RunManifest:
        started = datetime.now(timezone.utc).isoformat(timespec="seconds")
        try:
            return run(config)
        except Exception as e:
            logging.error(f"sweep entry {config.path or config.output_dir} failed: {e}")
            tg(f"⚠️ sweep entry failed: {e}")
            return _failed_manifest(config, started, e)

    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        manifests = list(pool.map(one, configs))
    passed = sum(m.passed for m in manifests)
    tg(f"✅ sweep finished: {passed}/{len(manifests)} runs passed")
    return manifests
