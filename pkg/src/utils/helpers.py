"""
공통 헬퍼(Helper) 모듈.

애플리케이션 여러 부분에서 함께 쓰는 유틸리티를 모아 둔 곳입니다.
- 로깅(Logging) 설정: 파일 및 콘솔에 로그를 남기도록 표준 로깅 모듈을 설정합니다.
- 텔레그램(Telegram) 알림: 스윕 완료/실패를 간단한 함수 호출로 알립니다.
- 결과 파일 유틸리티: 원자적(atomic) 디렉토리 쓰기, 내용 해시, 탭 구분 표 쓰기.

다른 모듈에서는 `from src.utils.helpers import tg, atomic_dir` 처럼 필요한 함수만 임포트합니다.
로깅 설정은 이 모듈이 임포트되는 시점에 자동으로 적용됩니다.
"""
import asyncio
import hashlib
import logging
import os
import shutil
import sys
import uuid
from contextlib import contextmanager
from logging import StreamHandler
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Iterator

import pandas as pd
from telegram import Bot

from config.config import CFG

# --- 로깅(Logging) 설정 ---
# "시간 [로그레벨] 메시지" 형태로 출력합니다.
# 예: "2024-05-01 10:30:00,123 [INFO] beta-fk: 1/2 minimized, action=0.125"
log_fmt = "%(asctime)s [%(levelname)s] %(message)s"

logging.basicConfig(
    level=logging.INFO,
    format=log_fmt,
    handlers=[
        # 파일 크기가 5MB 에 도달하면 새 파일로 넘기고, 이전 파일은 3개까지 보관합니다.
        RotatingFileHandler(CFG.LOG_FILE, maxBytes=5_000_000, backupCount=3),
        StreamHandler(sys.stdout),
    ],
)


# --- 텔레그램(Telegram) 헬퍼 ---
def tg(msg: str) -> None:
    """
    텔레그램 메시지를 전송하는 헬퍼 함수.

    `CFG.NOTIFY` 가 켜져 있고 `TG_TOKEN`, `TG_CHAT` 이 모두 설정된 경우에만 실제로 전송합니다.
    그 외에는 INFO 로그만 남깁니다. 네트워크 오류 등 어떤 예외도 호출자에게 전파하지 않습니다.

    Args:
        msg (str): 전송할 메시지 내용.
    """
    try:
        if CFG.NOTIFY and CFG.TG_TOKEN and CFG.TG_CHAT:
            # python-telegram-bot v20+ 의 Bot 은 코루틴 API 이므로 asyncio.run 으로 한 번 구동합니다.
            asyncio.run(Bot(CFG.TG_TOKEN).send_message(chat_id=CFG.TG_CHAT, text=msg))
            logging.info(f"Telegram ▶ {msg}")
        else:
            logging.info(f"Telegram (disabled) ▶ {msg}")
    except Exception as e:
        logging.error(f"Telegram 오류: {e}")


# --- 결과 파일 유틸리티 ---
def file_sha256(path: Path) -> str:
    """파일 내용의 sha256 16진 문자열을 돌려줍니다."""
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@contextmanager
def atomic_dir(target: Path) -> Iterator[Path]:
    """
    임시 디렉토리에 결과를 쓰고, 블록이 정상 종료되면 `target` 으로 이름을 바꿉니다.

    블록 안에서 예외가 나면 임시 디렉토리를 지우고 예외를 다시 올립니다.
    따라서 중단된 실행은 `target` 아래에 어떤 부분 결과도 남기지 않습니다.

    Args:
        target (Path): 최종 결과 디렉토리.

    Yields:
        Path: 결과를 써야 할 임시 디렉토리 (target 과 같은 부모 아래).
    """
    target = Path(target)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.parent / f".{target.name}.tmp-{uuid.uuid4().hex[:8]}"
    tmp.mkdir()
    try:
        yield tmp
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    # 이전 결과가 있으면 치우고 교체합니다. os.replace 는 같은 파일시스템에서 원자적입니다.
    if target.exists():
        old = target.parent / f".{target.name}.old-{uuid.uuid4().hex[:8]}"
        os.replace(target, old)
        os.replace(tmp, target)
        shutil.rmtree(old, ignore_errors=True)
    else:
        os.replace(tmp, target)


def write_table(df: pd.DataFrame, path: Path, header_lines: list[str] | None = None) -> Path:
    """
    DataFrame 을 탭 구분 텍스트로 씁니다. 실수는 `%.17g` 로 기록해 왕복 손실이 없습니다.

    Args:
        df (pd.DataFrame): 기록할 표.
        path (Path): 출력 파일 경로.
        header_lines (list[str], optional): 맨 앞에 `# ` 로 시작하는 주석 줄로 붙일 내용.

    Returns:
        Path: 기록한 파일 경로.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines or []:
            fh.write(f"# {line}\n")
        df.to_csv(fh, sep="\t", index=False, float_format="%.17g", lineterminator="\n")
    return path
