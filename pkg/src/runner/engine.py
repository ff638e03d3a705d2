"""
실험 엔진 추상 클래스 (Abstract Base Class).

`beta-fk`, `stable-norm`, `torus-seq`, `qc`, `convex` 엔진이 반드시 구현해야 하는 공통 인터페이스입니다.
러너(`src.runner.runner`)는 엔진 종류와 상관없이 이 인터페이스로만 엔진을 다룹니다.

- `keys`: 엔진이 받는 설정 키와 (타입, 기본값). 여기 없는 키는 설정을 읽는 시점에 거부됩니다.
- `needs_seed(params)`: 이 파라미터 조합이 난수를 쓰는지. True 이면 설정에 seed 가 있어야 합니다.
- `execute(params, workdir, seed)`: 결과 파일을 workdir 에 쓰고, 내장 검사 결과 {이름: bool} 을 돌려줍니다.
"""
import abc
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Callable, Iterator


class EngineError(RuntimeError):
    """
    엔진 실행 실패. 설정 파일 경로와 문제가 된 키를 함께 전달합니다.

    Attributes:
        path (Path | None): 설정 파일 경로 (CLI 에서 바로 만든 설정이면 None).
        engine (str): 엔진 이름.
        key (str | None): 실패한 단계에 대응하는 설정 키.
    """

    def __init__(self, engine: str, key: str | None, cause: BaseException, path: Path | None = None):
        self.path = path
        self.engine = engine
        self.key = key
        self.cause = cause
        where = f"{path}: " if path else ""
        super().__init__(f"{where}engine {engine} failed at key '{key}': {type(cause).__name__}: {cause}")

    def with_path(self, path: Path | None) -> "EngineError":
        return EngineError(self.engine, self.key, self.cause, path)


def flag(value: Any) -> bool:
    """설정 문자열 'true'/'1'/'yes' 를 bool 로."""
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ("true", "1", "yes")


class Engine(abc.ABC):
    """
    모든 실험 엔진이 상속받아야 하는 추상 기본 클래스.

    `@abc.abstractmethod` 가 붙은 메서드를 재정의하지 않으면 인스턴스를 만들 때 `TypeError` 가 납니다.
    """

    #: 엔진 이름 (설정 파일의 ENGINE 값).
    name: str = ""
    #: 설정 키 → (변환 함수, 기본값). 기본값이 None 이면 선택 키입니다.
    keys: dict[str, tuple[Callable[[Any], Any], Any]] = {}

    def parse(self, raw: dict[str, str]) -> dict[str, Any]:
        """
        문자열 파라미터를 `keys` 의 타입으로 바꾸고 기본값을 채웁니다.

        Raises:
            KeyError: 알 수 없는 키 (키 이름을 인자로).
            ValueError: 변환 실패 (args[1] 에 키 이름).
        """
        out = {}
        for key in raw:
            if key not in self.keys:
                raise KeyError(key)
        for key, (kind, default) in self.keys.items():
            if key in raw and raw[key] not in (None, ""):
                try:
                    out[key] = kind(raw[key])
                except (TypeError, ValueError) as e:
                    raise ValueError(f"{key}={raw[key]!r}: {e}", key) from e
            else:
                out[key] = default
        return out

    def needs_seed(self, params: dict[str, Any]) -> bool:
        """기본: 난수를 쓰지 않음."""
        return False

    @contextmanager
    def stage(self, key: str) -> Iterator[None]:
        """블록 안의 예외를 `EngineError(engine, key)` 로 감쌉니다."""
        try:
            yield
        except EngineError:
            raise
        except Exception as e:
            raise EngineError(self.name, key, e) from e

    @abc.abstractmethod
    def execute(self, params: dict[str, Any], workdir: Path, seed: int | None) -> dict[str, bool]:
        """
        엔진을 실행하고 결과 파일을 workdir 에 씁니다.

        Args:
            params (dict): `parse` 로 변환된 파라미터.
            workdir (Path): 결과를 쓸 (임시) 디렉토리.
            seed (int | None): 난수 시드.

        Returns:
            dict[str, bool]: 내장 검사 이름 → 통과 여부.
        """
        ...
