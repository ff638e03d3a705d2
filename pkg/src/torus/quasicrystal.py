"""
잘라서 투영한(cut-and-project) 준결정 QC(P) = {(x,y,z) ∈ ℤ³ : z < αx + βy < z + 1} 과 연결 성분.

- `qc_build`: 창(window)의 각 (x, y) 기둥에서 유일한 점 z = floor(αx + βy) 와 높이 αx + βy − z 를 만듭니다.
- `qc_components`: 높이가 금지 집합 K 에 든 점을 빼고, ℓ¹ 거리 1 인 이웃 관계로 union-find 라벨을 붙입니다.
  x 방향 띠(shard)로 나눠 처리한 뒤 경계에서 다시 합치며, 라벨은 shard 수와 무관합니다.
- `cantor_gaps`, `cantor_reproduction`: 삼진 Cantor 집합 여집합의 가장 큰 m 개 구간을 K 로 두고 성분 분포를 비교합니다.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import pandas as pd
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order

from config.config import CFG
from src.torus.sequences import IrrationalPair


@dataclass(frozen=True)
class WindowBox:
    """정수 창 [x0, x1] × [y0, y1] (양끝 포함). z0, z1 을 주면 그 범위의 점만 남깁니다."""
    x0: int
    x1: int
    y0: int
    y1: int
    z0: int | None = None
    z1: int | None = None

    def __post_init__(self):
        if self.x1 < self.x0 or self.y1 < self.y0:
            raise ValueError(f"빈 창입니다: {self}")
        if (self.z0 is None) != (self.z1 is None):
            raise ValueError("z0 와 z1 은 함께 주어야 합니다.")
        if self.z0 is not None and self.z1 < self.z0:
            raise ValueError(f"빈 z 범위입니다: {self}")

    @classmethod
    def cube(cls, N: int) -> "WindowBox":
        """[0, N]² 위의 모든 기둥."""
        return cls(0, int(N), 0, int(N))

    @property
    def shape(self) -> tuple[int, int]:
        return self.x1 - self.x0 + 1, self.y1 - self.y0 + 1


class UnionFind:
    """
    경로 압축과 rank 합치기를 쓰는 union-find.
    루트마다 성분의 최소 원소를 따로 들고 있어서, `roots()` 는 트리 모양과 상관없이 최소 원소를 돌려줍니다.
    """

    def __init__(self, size: int):
        self.size = size
        self.parents = list(range(size))
        self.rank = [0] * size
        self.smallest = list(range(size))
        self.num_components = size

    @classmethod
    def from_roots(cls, roots) -> "UnionFind":
        """각 원소의 (최소 원소) 루트 배열에서 시작합니다. 띠별 결과를 합칠 때 씁니다."""
        uf = cls(len(roots))
        uf.parents = [int(r) for r in roots]
        for i, r in enumerate(uf.parents):
            if r != i:
                uf.rank[r] = 1
        uf.num_components = sum(1 for i, r in enumerate(uf.parents) if r == i)
        return uf

    def find_parent(self, elem: int) -> int:
        p = elem
        while p != self.parents[p]:
            p = self.parents[p]
        # 지나온 경로를 루트에 직접 연결
        while elem != p:
            self.parents[elem], elem = p, self.parents[elem]
        return p

    def union(self, a: int, b: int) -> None:
        p1 = self.find_parent(a)
        p2 = self.find_parent(b)
        if p1 == p2:
            return
        if self.rank[p1] < self.rank[p2]:
            p1, p2 = p2, p1
        self.parents[p2] = p1
        if self.rank[p1] == self.rank[p2]:
            self.rank[p1] += 1
        self.smallest[p1] = min(self.smallest[p1], self.smallest[p2])
        self.num_components -= 1

    def roots(self) -> np.ndarray:
        return np.array([self.smallest[self.find_parent(i)] for i in range(self.size)], dtype=np.int64)


@dataclass(frozen=True)
class QuasiCrystalWindow:
    """
    창 안의 준결정 점들.

    기둥 (x, y) 마다 점이 최대 하나이므로 (nx, ny) 격자 배열로 보관합니다.

    Attributes:
        pair (IrrationalPair): 평면 z = αx + βy.
        window (WindowBox): 창.
        z (np.ndarray): 기둥별 z (int64).
        height (np.ndarray): 기둥별 높이 αx + βy − z ∈ (0, 1).
        present (np.ndarray): 기둥에 점이 있는지 (bool). 원점 기둥과 z 범위 밖은 False.
    """
    pair: IrrationalPair
    window: WindowBox
    z: np.ndarray = field(repr=False)
    height: np.ndarray = field(repr=False)
    present: np.ndarray = field(repr=False)

    @property
    def points(self) -> pd.DataFrame:
        ix, iy = np.nonzero(self.present)
        return pd.DataFrame({
            "x": ix + self.window.x0,
            "y": iy + self.window.y0,
            "z": self.z[ix, iy],
            "height": self.height[ix, iy],
        })

    def __len__(self) -> int:
        return int(self.present.sum())


def qc_build(pair: IrrationalPair, window: WindowBox) -> QuasiCrystalWindow:
    """
    창 안의 QC(P) 점을 만듭니다. 부등식 z < αx + βy < z + 1 을 정확히 적용합니다.

    αx + βy 가 정수인 기둥(1, α, β 가 독립이면 원점뿐)에는 점이 없습니다.

    Raises:
        ValueError: 창 부피가 CFG.QC_MAX_VOLUME 을 넘을 때.
    """
    nx, ny = window.shape
    corners = pair.lattice_heights(np.array([window.x0, window.x0, window.x1, window.x1]),
                                   np.array([window.y0, window.y1, window.y0, window.y1]))[1]
    nz = (window.z1 - window.z0 + 1) if window.z0 is not None else int(corners.max() - corners.min()) + 1
    volume = nx * ny * nz
    if volume > CFG.QC_MAX_VOLUME:
        raise ValueError(f"창 부피 {volume} 가 상한 {CFG.QC_MAX_VOLUME} 을 넘습니다.")
    xs, ys = np.meshgrid(np.arange(window.x0, window.x1 + 1), np.arange(window.y0, window.y1 + 1), indexing="ij")
    frac, whole = pair.lattice_heights(xs, ys)
    present = frac > 0.0
    if window.z0 is not None:
        present &= (whole >= window.z0) & (whole <= window.z1)
    qc = QuasiCrystalWindow(pair, window, whole, np.where(present, frac, np.nan), present)
    logging.info(f"qc_build {window}: {len(qc)} points")
    return qc


# --- 금지 집합 K ---
def parse_forbidden(text: str) -> tuple[tuple[float, float], ...]:
    """"a,b;c,d" 형식의 열린 구간 합집합. 빈 문자열은 K = ∅."""
    out = []
    for part in filter(None, (p.strip() for p in text.split(";"))):
        lo, hi = (float(Fraction(v.strip())) for v in part.split(","))
        out.append((lo, hi))
    return check_forbidden(out)


def check_forbidden(K) -> tuple[tuple[float, float], ...]:
    out = []
    for lo, hi in K:
        lo, hi = float(lo), float(hi)
        if not 0.0 <= lo < hi <= 1.0:
            raise ValueError(f"K 의 구간은 [0, 1] 안의 (lo < hi) 이어야 합니다: ({lo}, {hi})")
        out.append((lo, hi))
    return tuple(out)


def kept_mask(qc: QuasiCrystalWindow, K) -> np.ndarray:
    """높이가 K 의 어떤 열린 구간에도 들지 않는 점."""
    keep = qc.present.copy()
    h = np.nan_to_num(qc.height, nan=-1.0)
    for lo, hi in check_forbidden(K):
        keep &= ~((h > lo) & (h < hi))
    return keep


def _edges(qc: QuasiCrystalWindow, keep: np.ndarray, x_lo: int, x_hi: int) -> tuple[np.ndarray, np.ndarray]:
    """열 범위 [x_lo, x_hi) 에서 시작하는 +x, +y 방향 이웃 쌍 (평탄 인덱스). 같은 기둥에는 점이 하나뿐이므로 z 가 같아야 이웃입니다."""
    nx, ny = qc.present.shape
    idx = np.arange(nx * ny).reshape(nx, ny)
    a, b = [], []
    xe = min(x_hi, nx - 1)
    if xe > x_lo:
        m = keep[x_lo:xe] & keep[x_lo + 1:xe + 1] & (qc.z[x_lo:xe] == qc.z[x_lo + 1:xe + 1])
        a.append(idx[x_lo:xe][m])
        b.append(idx[x_lo + 1:xe + 1][m])
    m = keep[x_lo:x_hi, :-1] & keep[x_lo:x_hi, 1:] & (qc.z[x_lo:x_hi, :-1] == qc.z[x_lo:x_hi, 1:])
    a.append(idx[x_lo:x_hi, :-1][m])
    b.append(idx[x_lo:x_hi, 1:][m])
    return np.concatenate(a), np.concatenate(b)


def _shard_roots(qc: QuasiCrystalWindow, keep: np.ndarray, x_lo: int, x_hi: int) -> np.ndarray:
    """띠 [x_lo, x_hi) 안의 간선만으로 union-find. 전역 평탄 인덱스의 루트를 돌려줍니다."""
    ny = qc.present.shape[1]
    base = x_lo * ny
    uf = UnionFind((x_hi - x_lo) * ny)
    a, b = _edges(qc, keep, x_lo, x_hi)
    inner = b < x_hi * ny
    for u, v in zip(a[inner] - base, b[inner] - base):
        uf.union(int(u), int(v))
    return uf.roots() + base


@dataclass(frozen=True)
class ComponentStats:
    """
    연결 성분 통계.

    Attributes:
        labels (np.ndarray): (nx, ny) 성분 id. 빠진 점은 −1. id 는 최소 점의 순위입니다.
        records (pd.DataFrame): 성분별 id, size, 경계 상자, spanning, 사슬 방향.
        histogram (pd.DataFrame): size → count.
    """
    qc: QuasiCrystalWindow
    K: tuple
    labels: np.ndarray = field(repr=False)
    records: pd.DataFrame = field(repr=False)
    histogram: pd.DataFrame = field(repr=False)

    @property
    def count(self) -> int:
        return int(len(self.records))

    @property
    def any_spanning(self) -> bool:
        return bool(self.records["spanning"].any()) if len(self.records) else False

    def point_dump(self) -> pd.DataFrame:
        """그림용 점 목록 x, y, z, height, component (빠진 점 제외)."""
        ix, iy = np.nonzero(self.labels >= 0)
        w = self.qc.window
        return pd.DataFrame({
            "x": ix + w.x0, "y": iy + w.y0, "z": self.qc.z[ix, iy],
            "height": self.qc.height[ix, iy], "component": self.labels[ix, iy],
        })


def _chain_direction(qc, keep, labels, comp_id, axis) -> np.ndarray:
    """낮은 면의 한 점에서 반대 면까지 BFS 사슬을 잡아 (끝 − 시작) / 사슬 길이."""
    nx, ny = labels.shape
    a, b = _edges(qc, keep, 0, nx)
    inside = labels.ravel()[a] == comp_id
    graph = coo_matrix((np.ones(int(inside.sum())), (a[inside], b[inside])), shape=(nx * ny, nx * ny)).tocsr()
    cells = np.argwhere(labels == comp_id)
    start = cells[cells[:, axis] == 0][0]
    s = int(start[0] * ny + start[1])
    order, pred = breadth_first_order(graph, s, directed=False, return_predecessors=True)
    far = labels.shape[axis] - 1
    ends = [v for v in order if (divmod(int(v), ny)[axis] == far)]
    t = int(ends[0])
    length = 0
    while t != s:
        t = int(pred[t])
        length += 1
    end = np.array(divmod(int(ends[0]), ny))
    disp = np.array([end[0] - start[0], end[1] - start[1],
                     qc.z[end[0], end[1]] - qc.z[start[0], start[1]]], dtype=float)
    return disp / max(length, 1)


def qc_components(qc: QuasiCrystalWindow, K=(), shards: int = 1) -> ComponentStats:
    """
    QC(P, K) 의 연결 성분.

    ℓ¹ 거리 1 인 두 점이 이웃입니다. 한 기둥에 점이 하나뿐이므로 이웃은 같은 z 의 수평 이웃입니다.
    성분이 창의 마주 보는 두 옆면 (x = x0, x1 또는 y = y0, y1) 에 모두 닿으면 spanning 으로 표시하고,
    그 성분의 BFS 사슬 방향을 함께 기록합니다. 창 밖의 점은 고려하지 않습니다.

    Args:
        qc (QuasiCrystalWindow): qc_build 결과.
        K: 금지 열린 구간들 [(lo, hi), ...].
        shards (int): x 방향 띠 수. 결과는 shards 와 무관합니다.
    """
    keep = kept_mask(qc, K)
    nx, ny = keep.shape
    shards = max(1, min(int(shards), nx))
    cuts = np.linspace(0, nx, shards + 1).round().astype(int)
    bands = [(int(lo), int(hi)) for lo, hi in zip(cuts[:-1], cuts[1:]) if hi > lo]
    if shards > 1:
        with ThreadPoolExecutor(max_workers=shards) as pool:
            parts = list(pool.map(lambda band: _shard_roots(qc, keep, *band), bands))
    else:
        parts = [_shard_roots(qc, keep, *band) for band in bands]

    # 띠 경계를 가로지르는 간선만 전역 union-find 로 합칩니다.
    uf = UnionFind.from_roots(np.concatenate(parts))
    for _, hi in bands[:-1]:
        a, b = _edges(qc, keep, hi - 1, hi)
        cross = b >= hi * ny
        for u, v in zip(a[cross], b[cross]):
            uf.union(int(u), int(v))
    roots = uf.roots().reshape(nx, ny)

    labels = np.full((nx, ny), -1, dtype=np.int64)
    kept_roots = roots[keep]
    uniq = np.unique(kept_roots)
    labels[keep] = np.searchsorted(uniq, kept_roots)

    ix, iy = np.nonzero(keep)
    pts = pd.DataFrame({"id": labels[ix, iy], "ix": ix, "iy": iy, "z": qc.z[ix, iy]})
    records = pts.groupby("id").agg(size=("ix", "size"), xmin=("ix", "min"), xmax=("ix", "max"),
                                    ymin=("iy", "min"), ymax=("iy", "max"),
                                    zmin=("z", "min"), zmax=("z", "max")).reset_index()
    span_x = (records["xmin"] == 0) & (records["xmax"] == nx - 1)
    span_y = (records["ymin"] == 0) & (records["ymax"] == ny - 1)
    records["spanning"] = span_x | span_y
    dirs = np.full((len(records), 3), np.nan)
    for row in np.flatnonzero(records["spanning"].to_numpy()):
        dirs[row] = _chain_direction(qc, keep, labels, int(records.at[row, "id"]), 0 if span_x.iat[row] else 1)
    records["dir_x"], records["dir_y"], records["dir_z"] = dirs[:, 0], dirs[:, 1], dirs[:, 2]
    records[["xmin", "xmax"]] += qc.window.x0
    records[["ymin", "ymax"]] += qc.window.y0
    records = records.reindex(columns=["id", "size", "xmin", "xmax", "ymin", "ymax", "zmin", "zmax",
                                       "spanning", "dir_x", "dir_y", "dir_z"])
    histogram = (records.groupby("size").size().rename("count").reset_index()
                 if len(records) else pd.DataFrame(columns=["size", "count"]))
    K = check_forbidden(K)
    logging.info(f"qc_components |K|={len(K)}: {int(keep.sum())} points, {uniq.size} components, "
                 f"spanning={bool(records['spanning'].any()) if len(records) else False}")
    return ComponentStats(qc, K, labels, records, histogram)


def components_contained(finer: ComponentStats, coarser: ComponentStats) -> bool:
    """finer 의 모든 성분이 coarser 의 한 성분 안에 들어 있는지 (K_coarser ⊆ K_finer 일 때 성립해야 함)."""
    mask = finer.labels >= 0
    if np.any(coarser.labels[mask] < 0):
        return False
    pairs = pd.DataFrame({"fine": finer.labels[mask], "coarse": coarser.labels[mask]})
    return bool((pairs.groupby("fine")["coarse"].nunique() == 1).all())


# --- 삼진 Cantor 집합 ---
def cantor_gaps(m: int) -> list[tuple[Fraction, Fraction]]:
    """
    삼진 Cantor 집합 여집합의 가장 큰 m 개 열린 구간. 세대 순서, 같은 세대에서는 왼쪽부터.

    m = 2^k − 1 이면 k 세대가 정확히 채워지고, 그 밖의 m 은 마지막 세대 앞쪽에서 자릅니다.
    """
    if m < 0:
        raise ValueError(f"m 은 0 이상이어야 합니다: {m}")
    gaps = []
    segments = [(Fraction(0), Fraction(1))]
    while len(gaps) < m:
        nxt = []
        for a, b in segments:
            t = (b - a) / 3
            gaps.append((a + t, b - t))
            nxt += [(a, a + t), (b - t, b)]
        segments = nxt
    return gaps[:m]


def cantor_reproduction(pair: IrrationalPair, N: int = 30, ms=(1, 3, 7, 15, 31),
                        shards: int = 1) -> tuple[pd.DataFrame, dict[int, ComponentStats]]:
    """
    K = cantor_gaps(m) 에 대해 성분 분포를 구하고, 이웃한 m 사이의 포함 관계를 검사합니다.

    Returns:
        (summary, stats): summary 는 m, kept, components, largest, spanning, contained 열을 갖습니다.
            contained 는 이 m 의 모든 성분이 직전 m 의 한 성분 안에 드는지입니다.
    """
    qc = qc_build(pair, WindowBox.cube(N))
    ms = sorted(int(m) for m in ms)
    stats = {}
    rows = []
    prev = qc_components(qc, (), shards)
    for m in ms:
        cur = qc_components(qc, cantor_gaps(m), shards)
        stats[m] = cur
        contained = components_contained(cur, prev)
        if not contained:
            logging.warning(f"cantor reproduction m={m}: component containment violated")
        rows.append({
            "m": m, "kept": int((cur.labels >= 0).sum()), "components": cur.count,
            "largest": int(cur.records["size"].max()) if cur.count else 0,
            "spanning": cur.any_spanning, "contained": contained,
        })
        prev = cur
    return pd.DataFrame(rows), stats
