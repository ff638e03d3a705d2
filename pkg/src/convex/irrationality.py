"""
호몰로지 벡터의 비합리성(irrationality) I_Z, I_R 계산.

- 관계군 {k ∈ ℤᵇ : ⟨k,h⟩ ∈ ℤ} 의 계수(rank) → I_Z = b − rank_Z
- 관계군 {k ∈ ℤᵇ : ⟨k,h⟩ = 0} 의 계수 → I_R = b − rank_R

유한한 탐색 범위(bound) 안에서만 관계를 찾으므로, 보고서는 비합리성의 하한(lower bound)만 말합니다.
b 가 작으면 전수 탐색, 크면 격자 기저 축소(LLL, `olll`) 로 후보 관계를 얻습니다.
"""
import itertools
import logging
from dataclasses import dataclass

import numpy as np
import olll
import sympy

from config.config import CFG
from src.convex.profile import HomologyVector

# 정수 관계로 인정할 잔차.
RELATION_TOL = 1e-9
# 전수 탐색 비용 가드: 후보 벡터 수 (2B+1)^b 의 상한.
EXHAUSTIVE_MAX_CANDIDATES = 20_000_000
# LLL 격자의 실수 열 배율.
LLL_SCALE = 10 ** 12


@dataclass(frozen=True)
class IrrationalityReport:
    """
    비합리성 보고서.

    Attributes:
        h: 검사한 벡터.
        rank_Z / rank_R: 찾은 관계군의 계수.
        I_Z / I_R: b − rank.
        search_bound: 탐색에 쓴 max-norm 범위. 결과는 이 범위 안에서만 유효한 하한입니다.
        method: "exhaustive" 또는 "lll".
        relations_Z / relations_R: 관계군을 생성하는 짧은 정수 벡터들 (최대 b 개).
    """
    h: HomologyVector
    rank_Z: int
    rank_R: int
    search_bound: int
    method: str
    relations_Z: tuple[tuple[int, ...], ...] = ()
    relations_R: tuple[tuple[int, ...], ...] = ()

    @property
    def I_Z(self) -> int:
        return self.h.b - self.rank_Z

    @property
    def I_R(self) -> int:
        return self.h.b - self.rank_R


def exact_rank(vectors: np.ndarray) -> int:
    """정수 벡터 집합의 계수를 그람 행렬의 정확한 계수로 계산합니다 (sympy)."""
    if len(vectors) == 0:
        return 0
    k = np.asarray(vectors, dtype=np.int64)
    gram = k.T @ k
    return int(sympy.Matrix(gram.tolist()).rank())


def _short_basis(vectors: np.ndarray, b: int) -> tuple[tuple[int, ...], ...]:
    """노름이 짧은 순서로 일차독립인 벡터를 최대 b 개 고릅니다."""
    if len(vectors) == 0:
        return ()
    order = np.argsort(np.abs(vectors).sum(axis=1), kind="stable")
    picked: list[np.ndarray] = []
    for idx in order:
        cand = picked + [vectors[idx]]
        if np.linalg.matrix_rank(np.array(cand, dtype=float)) == len(cand):
            picked = cand
            if len(picked) == b:
                break
    return tuple(tuple(int(c) for c in v) for v in picked)


def _exhaustive(h: np.ndarray, bound: int) -> tuple[np.ndarray, np.ndarray]:
    """max-norm ≤ bound 인 모든 k ≠ 0 을 조사해 ℤ-관계와 ℝ-관계를 돌려줍니다."""
    b = h.size
    rng = np.arange(-bound, bound + 1, dtype=np.int64)
    tail = min(b, 2)
    # 마지막 두 좌표는 벡터화하고, 나머지 좌표는 곱집합으로 순회합니다.
    grids = np.meshgrid(*([rng] * tail), indexing="ij")
    tail_k = np.stack([g.ravel() for g in grids], axis=1)
    tail_dot = tail_k @ h[b - tail:]
    scale = max(1.0, float(np.max(np.abs(h))))
    rel_z, rel_r = [], []
    for head in itertools.product(range(-bound, bound + 1), repeat=b - tail):
        s = tail_dot + (float(np.dot(head, h[:b - tail])) if head else 0.0)
        nz = np.abs(s - np.rint(s)) <= RELATION_TOL
        nr = np.abs(s) <= RELATION_TOL * scale
        if head:
            head_arr = np.broadcast_to(np.asarray(head, dtype=np.int64), (tail_k.shape[0], b - tail))
            full = np.concatenate([head_arr, tail_k], axis=1)
        else:
            full = tail_k
        nonzero = np.any(full != 0, axis=1)
        rel_z.append(full[nz & nonzero])
        rel_r.append(full[nr & nonzero])
    return np.concatenate(rel_z), np.concatenate(rel_r)


def _lll_relations(x: np.ndarray, b: int, bound: int) -> np.ndarray:
    """
    [I | round(C·x)] 격자를 LLL 로 축소해 ⟨k, x⟩ ≈ 0 인 짧은 정수 벡터 후보를 얻습니다.
    앞의 b 개 좌표만 돌려줍니다 (x 의 나머지 성분은 정수 오프셋 열).
    """
    m = x.size
    basis = []
    for i in range(m):
        row = [0] * m + [int(round(LLL_SCALE * x[i]))]
        row[i] = 1
        basis.append(row)
    reduced = olll.reduction(basis, 0.75)
    out = []
    for row in reduced:
        k = np.asarray(row[:m], dtype=np.int64)
        if not np.any(k[:b]):
            continue
        if np.max(np.abs(k[:b])) > bound:
            continue
        out.append(k)
    return np.array(out, dtype=np.int64).reshape(-1, m)


def irrationality(h: HomologyVector, bound: int, method: str = "auto") -> IrrationalityReport:
    """
    범위 안의 정수 관계 탐색으로 I_Z(h), I_R(h) 를 계산합니다.

    Args:
        h (HomologyVector): 검사할 벡터.
        bound (int): 정수 벡터 k 의 max-norm 상한 (≥ 1).
        method (str): "auto" | "exhaustive" | "lll".

    Returns:
        IrrationalityReport: 계수와 탐색 범위를 담은 보고서.

    Raises:
        ValueError: bound < 1, b > 8 에서 전수 탐색 요청, 또는 전수 탐색 비용 초과.
    """
    if bound < 1:
        raise ValueError(f"bound 는 1 이상이어야 합니다: {bound}")
    v = h.as_array()
    b = h.b
    candidates = (2 * bound + 1) ** b
    if method == "exhaustive":
        if b > 8:
            raise ValueError(f"b={b} > 8 에서는 전수 탐색을 하지 않습니다 (비용 가드).")
        if candidates > EXHAUSTIVE_MAX_CANDIDATES:
            raise ValueError(f"전수 탐색 후보 {candidates} 개가 상한 {EXHAUSTIVE_MAX_CANDIDATES} 을 넘습니다.")
    elif method == "auto":
        method = ("exhaustive" if b <= CFG.IRR_EXHAUSTIVE_MAX_B and candidates <= EXHAUSTIVE_MAX_CANDIDATES
                  else "lll")
    elif method != "lll":
        raise ValueError(f"알 수 없는 method: {method}")

    if method == "exhaustive":
        rel_z, rel_r = _exhaustive(v, bound)
    else:
        # ℤ-관계: (h, 1) 사이의 관계 ⟨k,h⟩ − m = 0. ℝ-관계: h 자체의 관계.
        cand_z = _lll_relations(np.append(v, 1.0), b, bound)[:, :b]
        cand_r = _lll_relations(v, b, bound)
        scale = max(1.0, float(np.max(np.abs(v))))
        s_z = cand_z @ v if len(cand_z) else np.zeros(0)
        s_r = cand_r @ v if len(cand_r) else np.zeros(0)
        tol_z = RELATION_TOL * np.maximum(1.0, np.abs(cand_z).sum(axis=1)) if len(cand_z) else s_z
        rel_z = cand_z[np.abs(s_z - np.rint(s_z)) <= tol_z]
        rel_r = cand_r[np.abs(s_r) <= RELATION_TOL * scale]

    rank_z, rank_r = exact_rank(rel_z), exact_rank(rel_r)
    report = IrrationalityReport(h, rank_z, rank_r, bound, method,
                                 _short_basis(rel_z, b), _short_basis(rel_r, b))
    logging.info(f"irrationality h={h.coords} bound={bound} method={method}: "
                 f"I_Z={report.I_Z}, I_R={report.I_R}")
    return report
