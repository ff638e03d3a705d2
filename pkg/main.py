"""
애플리케이션의 메인 진입점 (Entry Point). 명령 이름은 `mather-lab` 입니다.

    python main.py beta-fk --K 1 --Q 12 --seed 0 --out fk-k1
    python main.py stable-norm --graph hedlund --h "1,0,0;0,1,0;0,0,1" --N 30 --section "1,0,0;0,1,0" --out hedlund
    python main.py torus-seq --kind avoid --alpha 0.07 --beta 0.09 --n 100000 --out avoid
    python main.py qc --alpha 0.41421356 --beta 0.36602540 --window 30 --cantor-gaps 7 --out qc-m7
    python main.py run configs/fk-k0.cfg
    python main.py sweep configs --jobs 4

실행 순서:
1. `setup_parser()` 가 하위 명령을 정의합니다. 엔진 하위 명령은 설정 파일과 같은 키-값 사전을 만듭니다.
2. `setup_configs()` 가 인자를 검증된 `ExperimentConfig` 목록으로 바꿉니다.
3. `start_runs()` 가 러너로 실행하고 manifest 요약을 출력합니다.

모든 실행이 내장 검사를 통과했을 때만 종료 코드 0 을 돌려줍니다.
설정 오류는 2, 검사 실패나 엔진 오류는 1 입니다.
"""
import argparse
import logging
import sys

from src.runner.engine import EngineError
from src.runner.experiment import ConfigError, ExperimentConfig, load_config, load_configs
from src.runner.runner import run, sweep


def _engine_command(sub, name: str, help_text: str, options: list[tuple[str, dict]]):
    p = sub.add_parser(name, help=help_text)
    for flag, kw in options:
        p.add_argument(flag, **kw)
    p.add_argument("--seed", type=int, default=None, help="난수 시드")
    p.add_argument("--out", required=True, help="결과 디렉토리 (상대 경로면 MATHER_LAB_OUT 아래)")
    p.set_defaults(engine=name)
    return p


def setup_parser() -> argparse.ArgumentParser:
    """
    하위 명령 파서를 만듭니다.

    엔진 하위 명령의 옵션 이름(dest)은 설정 파일 키와 같습니다. 예: `--cantor-gaps` → CANTOR_GAPS.
    """
    parser = argparse.ArgumentParser(prog="mather-lab", description="Aubry–Mather 수치 실험실")
    sub = parser.add_subparsers(dest="command", required=True)

    _engine_command(sub, "beta-fk", "FK 모델 β 프로파일과 α = β*", [
        ("--K", dict(dest="k", type=float, default=0.0)),
        ("--Q", dict(dest="q", type=int, default=8)),
        ("--restarts", dict(type=int)),
        ("--workers", dict(type=int)),
        ("--corners", dict(help='예: "0,1/3"')),
    ])
    _engine_command(sub, "stable-norm", "주기 그래프의 안정 노름", [
        ("--graph", dict(default="flat2", help='"flat2" | "flat3" | "hedlund" | pgraph 파일')),
        ("--epsilon", dict(type=float)),
        ("--h", dict(help='정수 벡터들, 예: "1,0;1,1"')),
        ("--N", dict(dest="n", type=int, default=30)),
        ("--section", dict(help='평면 "a;b", 예: "1,0,0;0,1,0"')),
        ("--directions", dict(type=int)),
        ("--section-N", dict(dest="section_n", type=int)),
        ("--count", dict(help='T 값들, 예: "10,100"')),
        ("--count-N", dict(dest="count_n", type=int)),
    ])
    _engine_command(sub, "torus-seq", "격자 보행의 높이 αx + βy mod 1", [
        ("--kind", dict(choices=("avoid", "random", "fib", "allwords"), required=True)),
        ("--alpha", dict(type=float, required=True)),
        ("--beta", dict(type=float, required=True)),
        ("--n", dict(type=int, required=True)),
        ("--p-right", dict(dest="p_right", type=float)),
        ("--delta", dict(type=float)),
        ("--swap", dict(action="store_const", const="true")),
    ])
    _engine_command(sub, "qc", "준결정 QC(P, K) 의 연결 성분", [
        ("--alpha", dict(type=float, required=True)),
        ("--beta", dict(type=float, required=True)),
        ("--window", dict(type=int, required=True)),
        ("--cantor-gaps", dict(dest="cantor_gaps", type=int)),
        ("--K", dict(dest="k", help='열린 구간들 "a,b;c,d"')),
        ("--shards", dict(type=int)),
    ])
    _engine_command(sub, "convex", "1차원 볼록 함수의 Legendre 변환과 면", [
        ("--expr", dict(default="x**2/2")),
        ("--profile", dict(help="profile v1 파일")),
        ("--xmin", dict(type=float)),
        ("--xmax", dict(type=float)),
    ])

    p = sub.add_parser("run", help="설정 파일 하나 실행")
    p.add_argument("config")
    p = sub.add_parser("sweep", help="디렉토리의 *.cfg 를 모두 실행")
    p.add_argument("directory")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def setup_configs(args: argparse.Namespace) -> list[ExperimentConfig]:
    """파싱된 인자를 검증된 설정 목록으로 바꿉니다."""
    if args.command == "run":
        return [load_config(args.config)]
    if args.command == "sweep":
        return load_configs(args.directory)
    raw = {k: v for k, v in vars(args).items() if k not in ("command", "out") and v is not None}
    raw["output"] = args.out
    return [ExperimentConfig.build(raw)]


def start_runs(args: argparse.Namespace, configs: list[ExperimentConfig]) -> int:
    """실행하고 manifest 요약을 출력합니다. 모두 통과하면 0."""
    if args.command == "sweep":
        manifests = sweep(configs, args.jobs)
    else:
        try:
            manifests = [run(configs[0])]
        except EngineError as e:
            logging.error(str(e))
            return 1
    for m in manifests:
        status = "PASS" if m.passed else "FAIL"
        detail = m.error or ", ".join(f"{k}={'ok' if v else 'FAILED'}" for k, v in m.checks.items())
        print(f"[{status}] {m.output_dir}: {detail}")
    return 0 if manifests and all(m.passed for m in manifests) else 1


def main(argv: list[str] | None = None) -> int:
    """
    애플리케이션의 메인 실행 함수.
    """
    # ── 1) 명령줄 해석 ──
    args = setup_parser().parse_args(argv)

    # ── 2) 설정 검증 ──
    try:
        configs = setup_configs(args)
    except ConfigError as e:
        logging.error(str(e))
        return 2

    # ── 3) 실행 ──
    return start_runs(args, configs)


if __name__ == "__main__":
    sys.exit(main())
