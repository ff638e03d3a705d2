"""
이 파일은 우리 수치 실험실(mather-lab)이 얼마나 정확하고 건강한지, 단계별로 진찰해보기 위한 '병원 진료 차트' 같은 거예요.
각 기능들이 자기 역할을 잘 하고 있는지 하나씩 테스트해볼 수 있도록 도와줍니다.

**어떻게 사용하나요?**
1.  터미널에서 `pytest step_by_step_test.py` 를 실행하면 모든 단계가 순서대로 돌아가요.
    오래 걸리는 재현 실험(n = 10⁶ 수열, Hedlund N = 30 등)은 `@pytest.mark.slow` 가 붙어 있어서
    `pytest -m "not slow" step_by_step_test.py` 로 빼고 돌릴 수 있어요.
2.  `python step_by_step_test.py` 로 직접 실행해도 돼요. 이때는 빠른 테스트만 차례로 돌고,
    `--slow` 를 붙이면 느린 테스트까지 모두 돌아요.
3.  각 테스트는 무엇을 왜 확인하는지 화면에 설명을 찍고, 통과하면 "✅ [성공]" 을 보여줘요.
"""
import inspect
import math
import sys
import tempfile
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# 우리 프로그램의 모든 설정을 담고 있는 '설정 보관함'을 가져와요.
from config.config import CFG
from main import main
from src.convex.duality import (biconjugate, detect_faces, legendre_transform, one_sided_derivatives,
                                radial_face, radial_profile)
from src.convex.irrationality import irrationality
from src.convex.profile import HomologyVector, NonConvexProfileError, SampledConvexProfile, read_profile, write_profile
from src.fk.beta_profile import alpha_from_beta, beta_profile, corner_gap, farey_fractions
from src.fk.generating_function import GeneratingFunction, action, action_gradient
from src.fk.minimizer import is_cyclically_monotone, minimize_periodic
from src.runner.engine import EngineError
from src.runner.experiment import ConfigError, ExperimentConfig, RunManifest, load_config, load_configs
from src.runner.runner import MANIFEST_NAME, run, sweep
from src.stable_norm.graph import flat_grid, hedlund_graph, read_pgraph, write_pgraph
from src.stable_norm.norm import (calibrated_norm, convergence_pair, count_classes, hedlund_scaling,
                                  minkowski_series, section_faces, stable_norm, unit_ball_section)
from src.torus.curves import (bounded_line_check, crossed_domains, directed_distance, domain_heights,
                              hausdorff_distance, lemma_b_check, lift_walk, sample_heights, straight_line)
from src.torus.heights import (AVOID_PAIRS, density_reproductions, equidistribution_report, gap_analysis,
                               heights, prefix_coverage)
from src.torus.quasicrystal import (UnionFind, WindowBox, cantor_gaps, cantor_reproduction,
                                    components_contained, parse_forbidden, qc_build, qc_components)
from src.torus.sequences import (IrrationalPair, all_words, avoid_gap, avoid_interval_sequence, fibonacci_rules,
                                 is_primitive, random_sequence, substitution_word)
from src.utils.helpers import atomic_dir, file_sha256, write_table

# 여러 테스트가 함께 쓰는 "완전 비합리" 쌍 (1, α, β 가 유리 독립).
SQRT_PAIR = (math.sqrt(2) - 1, (math.sqrt(3) - 1) / 2)


def banner(title: str) -> None:
    print("=" * 60)
    print(f"▶️ {title}")
    print("=" * 60)


def success(msg: str) -> None:
    print(f"✅ [성공] {msg}")
    print("=" * 60, "\n")


# === Phase 1: 환경 설정과 공통 도구 (가장 기본) ===
# 집을 짓기 전에 땅이 튼튼한지 확인하는 단계예요.

def test_phase_1_1_config_values():
    """
    [테스트 1-1: 설정 값 검증]
    `.env` 나 환경 변수에서 읽은 허용오차와 상한 값들이 말이 되는 범위에 있는지 확인해요.
    """
    banner("[테스트 1-1] 설정(CFG) 값이 올바르게 로드되었는지 확인합니다.")
    print(f"   - TOL_CONVEX={CFG.TOL_CONVEX}, TOL_FACE={CFG.TOL_FACE}, TOL_CORNER={CFG.TOL_CORNER}")
    print(f"   - SN_MARGIN={CFG.SN_MARGIN}, INDEPENDENCE_BOUND={CFG.INDEPENDENCE_BOUND}, OUT_ROOT={CFG.OUT_ROOT}")
    # 볼록성 인증서 허용오차는 인수 기준(10⁻⁸)보다 느슨하면 안 돼요.
    assert 0 < CFG.TOL_CONVEX <= 1e-8
    assert CFG.TOL_FACE > 0 and CFG.TOL_CORNER > 0 and CFG.TOL_DUAL > 0
    assert CFG.SN_MARGIN >= 1
    # 비합리 쌍의 독립성 검사는 최소 10³ 까지 해야 해요.
    assert CFG.INDEPENDENCE_BOUND >= 1000
    assert CFG.OUT_ROOT.is_dir()
    success("설정 값들이 올바르게 로드된 것을 확인했습니다.")


def test_phase_1_2_atomic_dir_and_tables(tmp_path):
    """
    [테스트 1-2: 원자적 결과 디렉토리와 표 쓰기]
    실행이 중간에 실패하면 결과 폴더에 아무것도 남지 않아야 해요.
    """
    banner("[테스트 1-2] 원자적 디렉토리 쓰기와 탭 구분 표를 확인합니다.")
    target = tmp_path / "out"
    with pytest.raises(RuntimeError):
        with atomic_dir(target) as work:
            (work / "partial.txt").write_text("half")
            raise RuntimeError("중간 실패")
    assert not target.exists()
    assert list(tmp_path.iterdir()) == []
    print("   - 실패한 블록은 흔적을 남기지 않았어요.")

    df = pd.DataFrame({"a": [1, 2], "b": [0.1, 1 / 3]})
    with atomic_dir(target) as work:
        write_table(df, work / "t.tsv", ["header"])
    text = (target / "t.tsv").read_text()
    assert text.startswith("# header\na\tb\n")
    # %.17g 로 쓰므로 1/3 이 손실 없이 돌아와요.
    back = pd.read_csv(target / "t.tsv", sep="\t", comment="#")
    assert back["b"].iloc[1] == 1 / 3
    assert file_sha256(target / "t.tsv") == file_sha256(target / "t.tsv")
    success("원자적 쓰기와 표 형식이 올바르게 동작합니다.")


# === Phase 2: 볼록 해석 핵심 (convex-core) ===

def test_phase_2_1_quadratic_self_duality():
    """
    [테스트 2-1: h²/2 는 자기 자신의 Legendre 변환]
    β(h) = h²/2 를 {−2, −1.9, …, 2} 에서 표본화하면 α(c) 도 c²/2 가 되어야 해요.
    """
    banner("[테스트 2-1] 2차 함수의 Legendre 변환을 확인합니다.")
    grid = np.round(np.linspace(-2, 2, 41), 12)
    beta = SampledConvexProfile.from_function(lambda x: x ** 2 / 2, grid, "quadratic")
    alpha = legendre_transform(beta, [-1.0, 0.0, 1.0])
    print(f"   - α(−1), α(0), α(1) = {alpha.values.tolist()}")
    assert np.allclose(alpha.values, [0.5, 0.0, 0.5], atol=1e-12)
    # min α = −β(0)
    assert abs(alpha.values.min() + beta.values[beta.index_of(0.0)]) <= CFG.TOL_DUAL
    success("α(c) = c²/2 와 min α = −β(0) 를 확인했습니다.")


def test_phase_2_2_non_convex_profile_is_rejected():
    """
    [테스트 2-2: 볼록하지 않은 입력 거부]
    볼록성 인증서가 실패하면 어느 세 표본이 문제인지 알려줘야 해요.
    """
    banner("[테스트 2-2] 볼록하지 않은 프로파일을 거부하는지 확인합니다.")
    with pytest.raises(NonConvexProfileError) as err:
        SampledConvexProfile([0.0, 1.0, 2.0, 3.0], [0.0, 2.0, 1.0, 3.0], "bumpy")
    print(f"   - 오류 메시지: {err.value}")
    assert err.value.triple == (0, 1, 2)

    raw = SampledConvexProfile([0.0, 1.0, 2.0], [0.0, 2.0, 1.0], "raw", check=False)
    with pytest.raises(NonConvexProfileError):
        legendre_transform(raw, [0.0])
    success("위반한 세 표본과 함께 거부합니다.")


def test_phase_2_3_faces_of_abs_and_smooth():
    """
    [테스트 2-3: 면 검출]
    |x| 는 0 에서 꼭짓점(기울기 −1 → 1) 과 양쪽 아핀 구간을 가지고, x²/2 는 꼭짓점이 없어야 해요.
    """
    banner("[테스트 2-3] 꼭짓점과 아핀 구간 검출을 확인합니다.")
    grid = np.linspace(-1, 1, 21)
    kink = SampledConvexProfile.from_function(np.abs, grid, "abs")
    faces = detect_faces(kink)
    vertices = [f for f in faces if f.kind == "vertex"]
    segments = [f for f in faces if f.kind == "segment"]
    print(f"   - |x|: 꼭짓점 {len(vertices)}개, 아핀 구간 {len(segments)}개")
    assert len(vertices) == 1 and vertices[0].span == (0.0, 0.0)
    assert vertices[0].slopes == pytest.approx((-1.0, 1.0))
    assert len(segments) == 2
    assert one_sided_derivatives(kink, 0.0) == pytest.approx((-1.0, 1.0))

    smooth = SampledConvexProfile.from_function(lambda x: x ** 2 / 2, grid, "smooth")
    assert not [f for f in detect_faces(smooth) if f.kind == "vertex"]

    # 이웃한 표본 세 곳에서 꺾이는 함수: 꺾임점이 붙어 있어도 모두 꼭짓점이어야 해요.
    kinks = SampledConvexProfile.from_function(
        lambda x: np.abs(x) + np.abs(x - 0.1) + np.abs(x - 0.2), grid, "three-kinks")
    at = [f.span[0] for f in detect_faces(kinks) if f.kind == "vertex"]
    print(f"   - |x| + |x − 0.1| + |x − 0.2|: 꼭짓점 {at}")
    assert at == pytest.approx([0.0, 0.1, 0.2])
    assert one_sided_derivatives(kinks, grid[11]) == pytest.approx((-1.0, 1.0))
    success("|x| 의 꼭짓점, 붙어 있는 꺾임점, x²/2 의 매끄러움을 구분했습니다.")


@settings(max_examples=25, deadline=None)
@given(a=st.floats(0.0, 3.0), b=st.floats(0.0, 2.0), c=st.floats(-1.0, 1.0))
def test_phase_2_4_biconjugate_below_original(a, b, c):
    """
    [테스트 2-4: β** ≤ β (속성 테스트)]
    두 번 변환한 함수는 원래 함수보다 커질 수 없어요. a·x² + b·|x − c| 꼴의 볼록 함수로 확인해요.
    """
    grid = np.linspace(-2, 2, 81)
    prof = SampledConvexProfile.from_function(lambda x: a * x ** 2 + b * np.abs(x - c), grid, "mix")
    back = biconjugate(prof, np.linspace(-20, 20, 801))
    assert np.all(back.values <= prof.values + 1e-9)


def test_phase_2_5_irrationality():
    """
    [테스트 2-5: 비합리성 I_Z, I_R]
    (√2, √3) 은 관계가 없고, (1/2, 1/3) 은 ℤ-관계 2개, ℝ-관계 1개(2·½ − 3·⅓ = 0)를 가져요.
    """
    banner("[테스트 2-5] 정수 관계 탐색으로 비합리성을 확인합니다.")
    free = irrationality(HomologyVector((math.sqrt(2), math.sqrt(3))), 8)
    rational = irrationality(HomologyVector((0.5, 1 / 3)), 8)
    print(f"   - (√2, √3): I_Z={free.I_Z}, I_R={free.I_R}")
    print(f"   - (1/2, 1/3): I_Z={rational.I_Z}, I_R={rational.I_R}, R-관계 {rational.relations_R}")
    assert (free.I_Z, free.I_R) == (2, 2)
    assert (rational.I_Z, rational.I_R) == (0, 1)
    assert rational.I_Z <= rational.I_R

    # 정수배와 실수배 불변성
    assert irrationality(HomologyVector((2 * math.sqrt(2), 2 * math.sqrt(3))), 8).I_Z == free.I_Z
    assert irrationality(HomologyVector((0.5 * 3.7, 3.7 / 3)), 8).I_R == rational.I_R
    # 큰 b 는 LLL 로
    big = irrationality(HomologyVector(tuple(math.sqrt(p) for p in (2, 3, 5, 7, 11))), 8)
    assert big.method == "lll" and big.I_R == 5
    with pytest.raises(ValueError):
        irrationality(free.h, 0)
    success("비합리성 보고서가 기대값과 일치합니다.")


def test_phase_2_6_profile_file_and_radial_face(tmp_path):
    """
    [테스트 2-6: 프로파일 파일 형식과 방사 면]
    헤더 `# profile v1 dim=1 provenance=…` 와 분수 라벨이 그대로 보존돼야 해요.
    """
    banner("[테스트 2-6] 프로파일 파일과 방사 면을 확인합니다.")
    prof = SampledConvexProfile([-0.5, 0.0, 0.5], [0.125, 0.0, 0.125], "fk(K=0)", labels=("-1/2", "0/1", "1/2"))
    path = write_profile(prof, tmp_path / "beta.profile")
    assert path.read_text().splitlines()[0] == "# profile v1 dim=1 provenance=fk(K=0)"
    back = read_profile(path, check=True)
    assert back.labels == prof.labels and np.array_equal(back.values, prof.values)

    # f(v) = |v₁| + |v₂| 는 h = (1, 1) 방향으로 선형이므로 t = 1 을 지나는 방사 면이 있어요.
    radial = radial_profile(lambda v: float(np.abs(v).sum()), (1.0, 1.0), np.linspace(0.5, 1.5, 11))
    face = radial_face(radial, 1.0)
    assert face is not None and face.kind == "radial" and face.slopes[0] == pytest.approx(2.0)
    success("파일 형식과 방사 면이 올바릅니다.")


# === Phase 3: FK 모델 β 프로파일 (fk-aubry) ===

@settings(max_examples=10, deadline=None)
@given(K=st.floats(0.0, 2.0), seed=st.integers(0, 10_000))
def test_phase_3_1_action_gradient_matches_finite_differences(K, seed):
    """
    [테스트 3-1: 작용 기울기 (속성 테스트)]
    해석적 기울기가 중심 차분과 10⁻⁶ 상대 오차 안에서 같아야 해요.
    """
    gf = GeneratingFunction.standard(K)
    rng = np.random.default_rng(seed)
    x = np.arange(5) * 0.4 + rng.uniform(-0.2, 0.2, 5)
    g = action_gradient(gf, x, 2)
    h = 1e-6
    fd = np.array([(action(gf, x + h * e, 2) - action(gf, x - h * e, 2)) / (2 * h) for e in np.eye(5)])
    assert np.max(np.abs(g - fd)) <= 1e-6 * max(1.0, np.max(np.abs(g)))


def test_phase_3_2_integrable_case():
    """
    [테스트 3-2: 적분 가능한 경우 K = 0]
    퍼텐셜이 없으면 β(p/q) = (p/q)²/2 이고 모든 모서리가 0 이에요.
    """
    banner("[테스트 3-2] K=0, Q=8 에서 β(p/q) = (p/q)²/2 를 확인합니다.")
    prof = beta_profile(GeneratingFunction.standard(0.0), 8, seed=0)
    err = max(abs(v - float(f) ** 2 / 2) for f, v in prof.entries.items())
    print(f"   - 분수 {len(prof.entries)}개, 최대 오차 {err:.2e}")
    assert err <= 1e-9
    assert corner_gap(prof, Fraction(0)) <= 1e-9
    assert corner_gap(prof, Fraction(1, 3)) <= 1e-9
    assert all(is_cyclically_monotone(c) for c in prof.configurations.values())
    success("적분 가능한 경우의 β 와 평평한 모서리를 확인했습니다.")


@pytest.mark.parametrize("K", [0.0, 0.5, 1.0])
def test_phase_3_3_duality_identity(K):
    """
    [테스트 3-3: min α = −β(0)]
    """
    banner(f"[테스트 3-3] K={K} 에서 쌍대성 항등식을 확인합니다.")
    prof = beta_profile(GeneratingFunction.standard(K), 6, seed=1)
    alpha = alpha_from_beta(prof, np.linspace(-2.5, 2.5, 401))
    gap = abs(float(alpha.values.min()) + prof.entries[Fraction(0)])
    print(f"   - |min α + β(0)| = {gap:.2e}")
    assert gap <= 1e-6
    success("min α = −β(0) 가 성립합니다.")


def test_phase_3_4_minimizer_properties():
    """
    [테스트 3-4: 최소화 배치의 성질]
    결정성(같은 seed → 같은 비트), 작용 재계산, 짝수 퍼텐셜의 대칭, K 단조성을 확인해요.
    """
    banner("[테스트 3-4] 주기 최소화 배치의 성질을 확인합니다.")
    gf = GeneratingFunction.standard(0.8)
    a = minimize_periodic(gf, 2, 5, restarts=3, seed=7)
    b = minimize_periodic(gf, 2, 5, restarts=3, seed=7)
    assert a.positions == b.positions and a.average_action == b.average_action
    assert abs(a.recompute_action(gf) - a.average_action) <= 1e-12
    assert is_cyclically_monotone(a)

    neg = minimize_periodic(gf, -2, 5, restarts=3, seed=7)
    assert abs(neg.average_action - a.average_action) <= 1e-9

    actions = [minimize_periodic(GeneratingFunction.standard(K), 1, 3, seed=0).average_action
               for K in (0.0, 0.5, 1.0, 1.5)]
    print(f"   - β_K(1/3), K = 0, 0.5, 1, 1.5: {actions}")
    assert all(x <= y + 1e-12 for x, y in zip(actions, actions[1:]))

    with pytest.raises(ValueError):
        minimize_periodic(gf, 2, 4)
    assert Fraction(1, 8) in farey_fractions(8) and Fraction(1, 9) not in farey_fractions(8)
    success("결정성, 대칭, 단조성을 확인했습니다.")


@pytest.mark.slow
def test_phase_3_5_corner_dichotomy():
    """
    [테스트 3-5: 모서리 이분법]
    K=1, Q=12 이면 0 과 1/3 에서 β 에 모서리(> 10⁻³)가 생겨요.
    """
    banner("[테스트 3-5] K=1, Q=12 에서 유리점 모서리를 확인합니다.")
    prof = beta_profile(GeneratingFunction.standard(1.0), 12, seed=0, workers=4)
    gaps = {f: corner_gap(prof, f) for f in (Fraction(0), Fraction(1, 3))}
    print(f"   - 모서리: {gaps}")
    assert all(g > 1e-3 for g in gaps.values())
    # 인증서는 인수 기준 10⁻⁸ 에서도 통과해야 해요.
    assert prof.as_profile().convexity_violation(1e-8) is None
    success("K>0 에서 유리점 모서리가 나타납니다.")


def test_phase_3_6_beta_faces_and_corner_growth():
    """
    [테스트 3-6: β 의 면과 K 에 따른 모서리]
    K=1 이면 모든 유리점이 모서리라서 detect_faces 가 내부 Farey 표본을 하나도 빠짐없이 꼭짓점으로 봐야 해요.
    K=0 이면 β 는 이차식이라 꼭짓점이 없고, 0 의 모서리는 K 가 커질수록 넓어져요.
    """
    banner("[테스트 3-6] FK β 프로파일의 꼭짓점과 모서리 성장을 확인합니다.")
    rough = beta_profile(GeneratingFunction.standard(1.0), 6, seed=1)
    prof = rough.as_profile()
    at = {f.span[0] for f in detect_faces(prof) if f.kind == "vertex"}
    missing = [lab for x, lab in zip(prof.abscissae[1:-1], prof.labels[1:-1]) if float(x) not in at]
    print(f"   - K=1: 표본 {len(prof)}개, 꼭짓점 {len(at)}개, 빠진 표본 {missing}")
    assert not missing

    flat = beta_profile(GeneratingFunction.standard(0.0), 6, seed=1).as_profile()
    assert not [f for f in detect_faces(flat) if f.kind == "vertex"]

    gaps = [corner_gap(beta_profile(GeneratingFunction.standard(K), 6, seed=1), Fraction(0))
            for K in (0.25, 0.5, 1.0)]
    print(f"   - 0 의 모서리, K = 0.25, 0.5, 1: {gaps}")
    assert all(a < b for a, b in zip(gaps, gaps[1:]))
    success("K>0 의 β 는 모든 표본에서 꺾이고, 모서리는 K 와 함께 자랍니다.")


# === Phase 4: 안정 노름 (stable-norm-graph) ===

def test_phase_4_1_flat_grid_norm_and_counting():
    """
    [테스트 4-1: 평평한 격자 ℤ²]
    안정 노름은 ℓ¹ 노름이고, ‖h‖ ≤ T 인 정수점은 정확히 2T² + 2T + 1 개예요.
    """
    banner("[테스트 4-1] 평평한 격자의 노름과 격자점 세기를 확인합니다.")
    g = flat_grid(2)
    est = stable_norm(g, (3, -2), 5)
    assert est.upper == pytest.approx(5.0) and est.lower == pytest.approx(5.0)
    for T in (10, 100):
        res = count_classes(g, T)
        print(f"   - T={T}: {res.count} 개 (공식 {2 * T * T + 2 * T + 1}), 비율 {res.ratio:.4f}")
        assert res.count == 2 * T * T + 2 * T + 1
    assert abs(count_classes(g, 100).ratio - 2.0) <= 0.021 * 2.0
    # 최단 경로로 센 개수도 같아야 해요 (ℓ¹ 에서는 상계가 정확).
    assert count_classes(g, 10, N=2).count == 221

    series = minkowski_series(g, [10, 20])
    assert list(series.columns) == ["T", "count", "ratio", "area", "rel_error"]
    assert series["area"].iloc[0] == pytest.approx(2.0)
    success("ℓ¹ 노름과 격자점 공식이 일치합니다.")


@settings(max_examples=10, deadline=None)
@given(h1=st.tuples(*[st.integers(-2, 2)] * 3), h2=st.tuples(*[st.integers(-2, 2)] * 3))
def test_phase_4_2_subadditivity(h1, h2):
    """
    [테스트 4-2: 부분가법성 (속성 테스트)]
    estimate(h₁+h₂) ≤ estimate(h₁) + estimate(h₂) + 2·셀 지름/N.
    두 추정값의 기준 꼭짓점이 다를 수 있어서, 셀 안에서 갈아타는 비용을 양쪽 끝에 한 번씩 더해요.
    """
    g = hedlund_graph(0.2, m=2)
    N = 3
    s = tuple(a + b for a, b in zip(h1, h2))
    if not (any(h1) and any(h2) and any(s)):
        return
    est = [stable_norm(g, h, N, calibrate=False).upper for h in (h1, h2, s)]
    assert est[2] <= est[0] + est[1] + 2 * g.cell_diameter() / N + 1e-12


def test_phase_4_3_hedlund_calibrated_octahedron():
    """
    [테스트 4-3: Hedlund 모델의 팔면체 (보정 LP)]
    싼 직선 세 개가 있으면 단위 공은 꼭짓점 e_i/ε 인 팔면체예요.
    (e₁, e₂) 단면에는 꼭짓점 4개와 면 4개가 보여야 해요.
    """
    banner("[테스트 4-3] Hedlund 모델의 단위 공 단면을 확인합니다.")
    eps = 0.1
    g = hedlund_graph(eps)
    assert g.lift_connected()
    cal = calibrated_norm(g, (1.0, 1.0, 1.0))
    print(f"   - ‖(1,1,1)‖ = {cal.value:.6f} (기대 {3 * eps})")
    assert cal.value == pytest.approx(3 * eps, abs=1e-9)
    assert cal.certificate_gap(g) <= 1e-9

    charts = unit_ball_section(g, [(1, 0, 0), (0, 1, 0)], 41)
    assert all(c.convexity_violation(1e-8) is None for c in charts)
    faces = section_faces(charts)
    print(f"   - 단면: 꼭짓점 {len(faces.vertices)}개, 면 {len(faces.facets)}개")
    assert len(faces.vertices) == 4 and len(faces.facets) == 4
    assert max(abs(x) + abs(y) for x, y in faces.vertices) == pytest.approx(1 / eps)
    success("팔면체 단면(꼭짓점 4, 면 4)을 확인했습니다.")


def test_phase_4_4_pgraph_file_and_convergence(tmp_path):
    """
    [테스트 4-4: pgraph 파일과 (N, 2N) 수렴 쌍]
    """
    banner("[테스트 4-4] pgraph 파일 왕복과 수렴 쌍을 확인합니다.")
    g = hedlund_graph(0.25, m=2)
    back = read_pgraph(write_pgraph(g, tmp_path / "h.pgraph"), anchors=g.anchors)
    assert stable_norm(back, (1, 1, 0), 4).upper == pytest.approx(stable_norm(g, (1, 1, 0), 4).upper)
    pair = convergence_pair(g, (1, 1, 0), 4)
    # 2N 추정값은 N 추정값보다 크지 않아요 (한 셀 지름 보정 안에서).
    assert pair.value_2N <= pair.value_N + g.cell_diameter() / 4
    with pytest.raises(ValueError):
        stable_norm(g, (0, 0, 0), 4)
    success("파일에서 읽은 그래프가 같은 노름을 줍니다.")


@pytest.mark.slow
def test_phase_4_5_hedlund_shortest_paths():
    """
    [테스트 4-5: Hedlund 최단 경로 추정 (N = 30)]
    ‖e_i‖ 는 0.1 의 15% 안, ‖(1,1,0)‖ 은 0.2 의 15% 안, ε 에 대한 기울기는 1 의 10% 안.
    """
    banner("[테스트 4-5] Hedlund 모델의 최단 경로 추정을 확인합니다.")
    g = hedlund_graph(0.1)
    for axis in range(3):
        h = [0, 0, 0]
        h[axis] = 1
        est = stable_norm(g, h, 30)
        print(f"   - ‖e_{axis + 1}‖ ≈ {est.upper:.5f}")
        assert abs(est.upper - 0.1) <= 0.015
    assert abs(stable_norm(g, (1, 1, 0), 30).upper - 0.2) <= 0.03
    _, slopes = hedlund_scaling((0.05, 0.1, 0.2), N=30)
    print(f"   - log-log 기울기: {slopes}")
    assert all(abs(s - 1.0) <= 0.1 for s in slopes.values())
    success("Hedlund 추정값이 팔면체 모델과 일치합니다.")


@settings(max_examples=10, deadline=None)
@given(h=st.tuples(*[st.integers(-2, 2)] * 3), margin=st.integers(1, 3))
def test_phase_4_6_symmetry_and_window_stability(h, margin):
    """
    [테스트 4-6: 대칭과 창 여유 (속성 테스트)]
    대칭 그래프에서는 estimate(h) = estimate(−h) 이고, 창 여유를 두 배로 늘려도 추정값이 변하지 않아요.
    """
    if not any(h):
        return
    g = hedlund_graph(0.2, m=2)
    N = 3
    est = stable_norm(g, h, N, margin=margin, calibrate=False).upper
    flipped = stable_norm(g, tuple(-a for a in h), N, margin=margin, calibrate=False).upper
    wider = stable_norm(g, h, N, margin=2 * margin, calibrate=False).upper
    assert flipped == pytest.approx(est, rel=1e-9)
    assert wider == pytest.approx(est, rel=1e-9)


@settings(max_examples=10, deadline=None)
@given(h=st.tuples(*[st.integers(-2, 2)] * 3), scale=st.floats(0.0, 2.0), shift=st.floats(0.0, 0.5))
def test_phase_4_7_monotone_in_weights(h, scale, shift):
    """
    [테스트 4-7: 가중치 단조성 (속성 테스트)]
    모든 간선을 무겁게 하면 (w → w·(1 + s) + t) 추정값도 보정 LP 값도 작아지지 않아요.
    """
    if not any(h):
        return
    g = hedlund_graph(0.2, m=2)
    heavy = g.with_weights([e.weight * (1 + scale) + shift for e in g.edges])
    base, heavier = stable_norm(g, h, 3), stable_norm(heavy, h, 3)
    assert heavier.upper >= base.upper * (1 - 1e-12)
    assert heavier.lower >= base.lower - 1e-9


# === Phase 5: 토러스 위의 수열과 곡선 (torus-curves) ===

def test_phase_5_1_words_and_rules():
    """
    [테스트 5-1: 치환 단어와 모든 단어]
    """
    banner("[테스트 5-1] Fibonacci 단어와 모든-단어 수열을 확인합니다.")
    word = substitution_word(fibonacci_rules(), "0", 13)
    print(f"   - Fibonacci 접두사: {word}")
    assert word == "0110110101101"
    assert all_words(10) == "0100011011"
    assert is_primitive(fibonacci_rules())
    assert not is_primitive({"0": "0", "1": "01"})
    with pytest.raises(ValueError):
        substitution_word({"0": "0", "1": "1"}, "0", 5)
    success("치환 규칙과 단어 생성이 올바릅니다.")


def test_phase_5_2_avoid_interval_soundness():
    """
    [테스트 5-2: 구간 회피 보행]
    (α, β) = (0.07, 0.09) 에서 높이가 ]0, A[ (A = min{α, β−α} = 0.02) 에 하나도 들어가면 안 돼요.
    """
    banner("[테스트 5-2] 구간 회피 보행의 정확성을 확인합니다.")
    pair = IrrationalPair.checked(0.07, 0.09)
    # 0.07·9 = 0.09·7 이므로 관계가 있다고 경고만 남겨요.
    assert not pair.independent
    seq = avoid_interval_sequence(pair, 100_000)
    trace = heights(seq, pair)
    A = avoid_gap(pair)
    bad = int(np.count_nonzero((trace.values > 0) & (trace.values < A)))
    print(f"   - A = {A:g}, 금지 구간에 들어간 높이: {bad}개")
    assert bad == 0
    assert seq.is_unit_walk() and np.isin(seq.positions()[:, 0], (0, 1)).all()
    assert trace.recurrence_ok()
    assert gap_analysis(trace, 1e-3).largest_gap >= A
    with pytest.raises(ValueError):
        avoid_interval_sequence(IrrationalPair(0.2, 0.3, 0), 10)
    success("높이가 금지 구간을 피합니다.")


@pytest.mark.slow
def test_phase_5_3_avoid_interval_random_pairs():
    """
    [테스트 5-3: 무작위 쌍 20개, n = 10⁶]
    """
    banner("[테스트 5-3] 무작위 20쌍에서 구간 회피를 확인합니다.")
    rng = np.random.default_rng(2024)
    for _ in range(20):
        a, b = np.sort(rng.uniform(0.001, 0.1, 2))
        pair = IrrationalPair.checked(float(a), float(b), bound=50)
        v = heights(avoid_interval_sequence(pair, 1_000_000), pair).values
        assert not np.any((v > 0) & (v < avoid_gap(pair)))
    success("20쌍 모두 금지 구간을 피합니다.")


def test_phase_5_4_coverage_and_distribution():
    """
    [테스트 5-4: 덮임 측도와 분포]
    점 {0, ¼, ½, ¾} 의 가장 긴 빈 호는 ¼ 이고, δ = 0.1 이면 덮임은 0.8 이에요.
    """
    banner("[테스트 5-4] 빈 호와 덮임 측도를 확인합니다.")
    rep = gap_analysis(np.array([0.0, 0.25, 0.5, 0.75]), 0.1)
    assert rep.largest_gap == pytest.approx(0.25)
    assert rep.covered_measure == pytest.approx(0.8)
    assert gap_analysis(np.array([0.0, 0.25, 0.5, 0.75]), 0.2).covered_measure == pytest.approx(1.0)
    with pytest.raises(ValueError):
        gap_analysis(np.array([0.5]), 0.5)

    pair = IrrationalPair.checked(*SQRT_PAIR)
    trace = heights(random_sequence(0.5, 200_000, seed=3), pair)
    assert trace.recurrence_ok()
    table = prefix_coverage(trace, 1e-3, [1_000, 10_000, 100_000])
    assert table["covered_measure"].is_monotonic_increasing
    dist = equidistribution_report(trace, 50)
    assert dist.counts.sum() == trace.values.size and 0 <= dist.discrepancy <= 1
    success("덮임 측도와 분포 보고서가 올바릅니다.")


@pytest.mark.slow
def test_phase_5_5_density_reproductions():
    """
    [테스트 5-5: 문헌의 조밀/회피 관찰 재현 (n = 10⁵, 10⁶)]
    관찰과 다른 결과는 표에 agrees=False 로 기록될 뿐 실패가 아니에요.
    다만 (√2,√3), (π,e), (π,√2) 는 한 사상에서 조밀해야 하고, 회피 쌍은 한 사상에서 회피해야 해요.
    """
    banner("[테스트 5-5] Fibonacci 수열 재현 실험을 확인합니다.")
    df = density_reproductions()
    print(df[df["n"] == 10 ** 6][["label", "mapping", "largest_gap", "verdict"]].to_string(index=False))
    for label in ("(sqrt2, sqrt3)", "(pi, e)", "(pi, sqrt2)", *AVOID_PAIRS):
        assert df[df["label"] == label]["agrees"].any(), label
    assert set(df["verdict"]) <= {"dense", "avoids", "undecided"}
    success("재현 표를 만들었고 핵심 쌍이 문헌과 일치합니다.")


def test_phase_5_6_domain_closure_identity():
    """
    [테스트 5-6: 두 방법으로 구한 높이 집합]
    직선 곡선을 약 10⁵ 개 기본 영역에 걸쳐 그리면, 표본점 높이와 영역 높이의 Hausdorff 거리가 0.01 이하예요.
    """
    banner("[테스트 5-6] 곡선 표본 높이와 통과 영역 높이를 비교합니다.")
    pair = IrrationalPair.checked(*SQRT_PAIR)
    a, b = 1.0, 1.0
    length = 100_000 / (abs(a) + abs(b) + abs(pair.alpha * a + pair.beta * b))
    curve = straight_line(pair, (a, b), length, offset=(0.3, 0.6))
    check = lemma_b_check(pair, curve, 100_000, 0.01)
    print(f"   - 통과 영역 {check.crossings}개, Hausdorff {check.hausdorff_distance:.2e}")
    assert check.passed and check.crossings >= 90_000

    walk = lift_walk(random_sequence(0.5, 5_000, seed=11), pair)
    # 표본점은 언제나 자기가 속한 영역의 높이를 가지므로, 표본 → 영역 방향 거리는 반올림 수준이에요.
    assert lemma_b_check(pair, walk, 50_000, 0.01).samples_to_domains <= 1e-9
    with pytest.raises(ValueError):
        lemma_b_check(IrrationalPair(0.1, 0.2, 0), curve, 10, 0.01)
    success("두 높이 집합이 δ 안에서 일치합니다.")


def test_phase_5_7_bounded_line():
    """
    [테스트 5-7: 직선에서 거리가 유계인 곡선]
    """
    banner("[테스트 5-7] E·v 가 구간 I 를 덮는지 확인합니다.")
    pair = IrrationalPair.checked(*SQRT_PAIR)
    rep = bounded_line_check(pair, (1, 1), R=2.0, n=20_000, delta=0.01)
    print(f"   - I = {rep.interval}, 최대 빈 구간 {rep.largest_gap:.2e}")
    assert rep.interval[0] < rep.interval[1]
    assert rep.passed
    with pytest.raises(ValueError):
        bounded_line_check(pair, (1, 1), R=0.01, n=1, step=0.01)
    success("유계 곡선의 높이가 구간 I 를 덮습니다.")


@settings(max_examples=50, deadline=None)
@given(values=st.lists(st.floats(0.0, 1.0, exclude_max=True), min_size=1, max_size=40),
       delta=st.floats(1e-4, 0.49))
def test_phase_5_8_coverage_bound(values, delta):
    """
    [테스트 5-8: 덮임 측도와 빈 호 (속성 테스트)]
    가장 긴 빈 호 G 는 기껏 2δ 만 덮이므로 covered_measure + G ≤ 1 + 2δ 예요.
    """
    rep = gap_analysis(np.array(values), delta)
    assert 0.0 <= rep.covered_measure <= 1.0
    assert rep.covered_measure + rep.largest_gap <= 1.0 + 2 * delta + 1e-12


@settings(max_examples=10, deadline=None)
@given(a=st.floats(-2.0, 2.0), b=st.floats(-2.0, 2.0), seed=st.integers(0, 1_000))
def test_phase_5_9_closure_check_is_symmetric(a, b, seed):
    """
    [테스트 5-9: 두 높이 집합의 역할 바꾸기 (속성 테스트)]
    Hausdorff 거리는 두 집합의 순서와 무관하고, lemma_b_check 의 두 방향 거리는 각 쪽을 바꿔 잰 값과 같아요.
    """
    if abs(a) + abs(b) < 0.1:
        return
    pair = IrrationalPair.checked(*SQRT_PAIR)
    offset = tuple(np.random.default_rng(seed).uniform(0, 1, 2))
    curve = straight_line(pair, (a, b), 200.0, offset=offset)
    check = lemma_b_check(pair, curve, 500, 0.05)
    domains = domain_heights(pair, crossed_domains(curve))
    samples = sample_heights(curve, 500)
    assert check.domains_to_samples == pytest.approx(directed_distance(domains, samples))
    assert check.samples_to_domains == pytest.approx(directed_distance(samples, domains))
    assert hausdorff_distance(samples, domains) == hausdorff_distance(domains, samples) == check.hausdorff_distance


# === Phase 6: 준결정 (quasicrystal) ===

def test_phase_6_1_one_point_per_column():
    """
    [테스트 6-1: 기둥마다 점 하나]
    [0,30]² 의 모든 기둥에 점이 정확히 하나씩 있어요. 높이가 정수인 원점 기둥만 비어요.
    """
    banner("[테스트 6-1] QC(P) 의 점 배치를 확인합니다.")
    pair = IrrationalPair.checked(*SQRT_PAIR)
    qc = qc_build(pair, WindowBox.cube(30))
    print(f"   - 점 {len(qc)}개")
    assert len(qc) == 31 * 31 - 1
    pts = qc.points
    assert ((pts["height"] > 0) & (pts["height"] < 1)).all()
    assert np.allclose(pts["z"] + pts["height"], pair.alpha * pts["x"] + pair.beta * pts["y"])
    assert len(qc_build(pair, WindowBox(0, 30, 0, 30, 0, 5))) < len(qc)
    success("기둥마다 점이 하나씩 있습니다.")


def test_phase_6_2_components_and_shards():
    """
    [테스트 6-2: 연결 성분과 띠 나누기]
    띠 수를 바꿔도 성분 라벨은 같아야 하고, 각 성분은 한 층(z)에만 있어요.
    """
    banner("[테스트 6-2] 연결 성분의 결정성을 확인합니다.")
    qc = qc_build(IrrationalPair.checked(*SQRT_PAIR), WindowBox.cube(30))
    one = qc_components(qc)
    four = qc_components(qc, shards=4)
    assert np.array_equal(one.labels, four.labels)
    assert one.records.equals(four.records)
    assert (one.records["zmin"] == one.records["zmax"]).all()
    assert one.records["size"].sum() == len(qc)
    print(f"   - 성분 {one.count}개, spanning={one.any_spanning}")

    K = parse_forbidden("0.2,0.4;1/2,2/3")
    fine = qc_components(qc, K, shards=3)
    assert components_contained(fine, one)
    with pytest.raises(ValueError):
        parse_forbidden("0.5,0.4")
    success("띠 나누기와 무관한 성분을 얻었습니다.")


def test_phase_6_3_cantor_refinement():
    """
    [테스트 6-3: Cantor 간극 세분]
    m 이 커질수록 남는 점이 줄고, 각 성분은 직전 m 의 한 성분 안에 들어가요.
    """
    banner("[테스트 6-3] Cantor 간극 세분에 대한 성분 포함 관계를 확인합니다.")
    assert cantor_gaps(3) == [(Fraction(1, 3), Fraction(2, 3)), (Fraction(1, 9), Fraction(2, 9)),
                              (Fraction(7, 9), Fraction(8, 9))]
    summary, stats = cantor_reproduction(IrrationalPair.checked(*SQRT_PAIR), 30, (1, 3, 7, 15, 31), shards=2)
    print(summary.to_string(index=False))
    assert summary["contained"].all()
    assert summary["kept"].is_monotonic_decreasing
    assert sorted(stats) == [1, 3, 7, 15, 31]
    assert all(int(st_.histogram["count"].sum()) == st_.count for st_ in stats.values())

    uf = UnionFind(5)
    uf.union(3, 1)
    uf.union(4, 3)
    assert uf.roots().tolist() == [0, 1, 2, 1, 1]
    # rank 가 큰 트리 밑으로 붙어도 라벨은 성분의 최소 원소예요.
    uf = UnionFind(6)
    for a, b in [(4, 5), (3, 5), (1, 2), (2, 5)]:
        uf.union(a, b)
    assert uf.roots().tolist() == [0, 1, 1, 1, 1, 1] and uf.num_components == 2
    assert max(uf.rank) <= 2
    merged = UnionFind.from_roots([0, 0, 2, 2, 4])
    merged.union(1, 3)
    assert merged.roots().tolist() == [0, 0, 0, 0, 4] and merged.num_components == 2
    success("세분에 대해 성분이 단조롭게 쪼개집니다.")


# === Phase 7: 실행기와 CLI (cli-runner) ===

def _config(tmp_path, name, **raw):
    raw.setdefault("output", str(tmp_path / name))
    return ExperimentConfig.build(raw)


def test_phase_7_1_config_validation(tmp_path):
    """
    [테스트 7-1: 설정 검증]
    모르는 키, 잘못된 타입, 빠진 seed 는 파일 경로와 키를 담은 ConfigError 로 거부돼요.
    """
    banner("[테스트 7-1] 설정 파일 검증을 확인합니다.")
    cfg_file = tmp_path / "avoid.cfg"
    cfg_file.write_text("[torus-seq]\nENGINE=torus-seq\nKIND=avoid\nALPHA=0.07\nBETA=0.09\nN=1000\n")
    cfg = load_config(cfg_file)
    assert cfg.engine == "torus-seq" and cfg.params["n"] == 1000 and cfg.output_dir == Path("avoid")

    with pytest.raises(ConfigError) as err:
        _config(tmp_path, "x", engine="qc", alpha="0.1", bogus="1")
    assert err.value.key == "bogus"
    with pytest.raises(ConfigError) as err:
        _config(tmp_path, "x", engine="beta-fk", k="abc", seed="0")
    assert err.value.key == "k"
    with pytest.raises(ConfigError) as err:
        _config(tmp_path, "x", engine="torus-seq", kind="random", alpha="0.1", beta="0.2")
    assert err.value.key == "seed"
    with pytest.raises(ConfigError):
        _config(tmp_path, "x", engine="nope")
    print(f"   - 오류 메시지 예: {err.value}")
    success("잘못된 설정을 키와 함께 거부합니다.")


def test_phase_7_2_engines_pass_their_checks(tmp_path):
    """
    [테스트 7-2: 엔진별 내장 검사]
    """
    banner("[테스트 7-2] 엔진마다 결과 파일과 내장 검사를 확인합니다.")
    fk = run(_config(tmp_path, "fk", engine="beta-fk", k="0", q="8", seed="0"))
    assert fk.passed and fk.checks["integrable"] and fk.checks["flat_corners"]
    beta = read_profile(Path(fk.output_dir) / "beta.profile", check=True)
    assert np.max(np.abs(beta.values - beta.abscissae ** 2 / 2)) <= 1e-9
    assert "corners_open" not in fk.checks

    # K > 0 이면 0 과 1/3 의 모서리가 열려 있어야 해요.
    rough = run(_config(tmp_path, "fk1", engine="beta-fk", k="1", q="6", seed="0"))
    assert rough.passed and rough.checks["corners_open"]
    assert "integrable" not in rough.checks
    corners = pd.read_csv(Path(rough.output_dir) / "corners.tsv", sep="\t", comment="#")
    assert (corners["gap"] > 1e-3).all()

    sn = run(_config(tmp_path, "sn", engine="stable-norm", graph="flat2", h="1,0;1,1", count="10,100"))
    assert sn.passed and sn.checks["lattice_formula"]

    ts = run(_config(tmp_path, "ts", engine="torus-seq", kind="avoid", alpha="0.07", beta="0.09", n="20000"))
    assert ts.passed and ts.checks["avoids_interval"]
    coverage = pd.read_csv(Path(ts.output_dir) / "coverage.tsv", sep="\t", comment="#")
    assert coverage["largest_gap"].iloc[0] >= 0.02

    qc = run(_config(tmp_path, "qc", engine="qc", alpha=str(SQRT_PAIR[0]), beta=str(SQRT_PAIR[1]),
                     window="12", cantor_gaps="3", cantor_series="1,3"))
    assert qc.passed and qc.checks["one_per_column"] and qc.checks["cantor_containment"]

    cx = run(_config(tmp_path, "cx", engine="convex", expr="Abs(x)", homology="0.5,0.3333333333333333"))
    assert cx.passed
    faces = pd.read_csv(Path(cx.output_dir) / "faces.tsv", sep="\t", comment="#")
    assert (faces["kind"] == "vertex").sum() == 1

    for m in (fk, sn, ts, qc, cx):
        assert RunManifest.load(Path(m.output_dir) / MANIFEST_NAME).files == m.files
    success("모든 엔진이 내장 검사를 통과합니다.")


def test_phase_7_3_failed_run_leaves_nothing(tmp_path):
    """
    [테스트 7-3: 실패한 실행]
    엔진 오류는 키를 담은 EngineError 가 되고, 출력 디렉토리에는 아무것도 남지 않아요.
    """
    banner("[테스트 7-3] 실패한 실행의 오류 보고를 확인합니다.")
    cfg = _config(tmp_path, "bad", engine="torus-seq", kind="avoid", alpha="0.2", beta="0.3", n="10")
    with pytest.raises(EngineError) as err:
        run(cfg)
    print(f"   - 오류 메시지: {err.value}")
    assert err.value.key == "n"
    assert not (tmp_path / "bad").exists()
    success("부분 결과 없이 실패를 보고합니다.")


def test_phase_7_4_determinism_and_sweep(tmp_path):
    """
    [테스트 7-4: 결정성]
    같은 설정과 seed 는 병렬성과 상관없이 같은 바이트를 만들어요.
    """
    banner("[테스트 7-4] 결과 파일의 결정성과 스윕을 확인합니다.")

    def configs(tag):
        return [
            _config(tmp_path, f"{tag}-fk", engine="beta-fk", k="0.5", q="5", corners="0", seed="3",
                    workers="2"),
            _config(tmp_path, f"{tag}-rw", engine="torus-seq", kind="random", alpha=str(SQRT_PAIR[0]),
                    beta=str(SQRT_PAIR[1]), n="5000", seed="9"),
            _config(tmp_path, f"{tag}-qc", engine="qc", alpha=str(SQRT_PAIR[0]), beta=str(SQRT_PAIR[1]),
                    window="10", k="0.3,0.6", shards="3"),
            _config(tmp_path, f"{tag}-bad", engine="torus-seq", kind="avoid", alpha="0.5", beta="0.6", n="5"),
        ]

    serial = sweep(configs("a"), 1)
    parallel = sweep(configs("b"), 3)
    assert [m.passed for m in serial] == [True, True, True, False]
    assert serial[3].error and parallel[3].error
    for s, p in zip(serial[:3], parallel[:3]):
        assert s.files == p.files
    again = run(replace(configs("c")[1], output_dir=tmp_path / "again"))
    assert again.files == serial[1].files
    with pytest.raises(ValueError):
        sweep(configs("a")[:1] * 2, 1)
    assert sweep([], 2) == []
    success("직렬/병렬 실행이 같은 바이트를 만듭니다.")


def test_phase_7_5_cli(tmp_path):
    """
    [테스트 7-5: 명령줄]
    모두 통과하면 0, 검사 실패나 엔진 오류는 1, 설정 오류는 2 를 돌려줘요.
    """
    banner("[테스트 7-5] mather-lab 명령줄을 확인합니다.")
    assert main(["torus-seq", "--kind", "avoid", "--alpha", "0.07", "--beta", "0.09", "--n", "2000",
                 "--out", str(tmp_path / "cli-avoid")]) == 0
    assert (tmp_path / "cli-avoid" / MANIFEST_NAME).exists()
    assert main(["stable-norm", "--graph", "flat2", "--count", "10", "--out", str(tmp_path / "cli-sn")]) == 0
    assert main(["torus-seq", "--kind", "random", "--alpha", "0.1", "--beta", "0.2", "--n", "10",
                 "--out", str(tmp_path / "cli-noseed")]) == 2
    assert main(["torus-seq", "--kind", "avoid", "--alpha", "0.3", "--beta", "0.4", "--n", "10",
                 "--out", str(tmp_path / "cli-bad")]) == 1

    sweep_dir = tmp_path / "configs"
    sweep_dir.mkdir()
    (sweep_dir / "a.cfg").write_text(f"ENGINE=qc\nALPHA={SQRT_PAIR[0]}\nBETA={SQRT_PAIR[1]}\nWINDOW=8\n"
                                     f"OUTPUT={tmp_path / 'sw-a'}\n")
    (sweep_dir / "b.cfg").write_text(f"ENGINE=convex\nEXPR=x**4\nOUTPUT={tmp_path / 'sw-b'}\n")
    assert len(load_configs(sweep_dir)) == 2
    assert main(["sweep", str(sweep_dir), "--jobs", "2"]) == 0
    assert main(["run", str(sweep_dir / "a.cfg")]) == 0
    success("종료 코드가 실행 결과를 정확히 반영합니다.")


# --- 여기서부터 테스트를 직접 실행하는 부분이에요 ---
if __name__ == "__main__":
    run_slow = "--slow" in sys.argv
    tests = [obj for name, obj in sorted(globals().items(), key=lambda kv: kv[0])
             if name.startswith("test_phase_") and callable(obj)]
    for test in tests:
        marks = {m.name for m in getattr(test, "pytestmark", [])}
        if "slow" in marks and not run_slow:
            print(f"⏭️  {test.__name__} (느린 테스트, --slow 로 실행)")
            continue
        params = inspect.signature(test).parameters
        if "K" in params and "parametrize" in marks:
            for K in (0.0, 0.5, 1.0):
                test(K)
        elif "tmp_path" in params:
            test(Path(tempfile.mkdtemp(prefix="mather-lab-test-")))
        else:
            test()
