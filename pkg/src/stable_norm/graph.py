"""
ℤᵈ-주기 가중 그래프 (d = 2, 3).

셀 꼭짓점 0..n−1 과 간선 (u, v, shift, weight) 로 주기 그래프를 정의합니다.
간선 (u, v, s) 는 들어 올린(lifted) 그래프에서 셀 c 의 u 를 셀 c+s 의 v 로 잇습니다.

- `flat_grid(d)`: 셀당 꼭짓점 1개, 단위 가중치 최근접 격자 (ℓ¹ 안정 노름).
- `hedlund_graph(eps)`: 𝕋³ 에 서로 만나지 않는 축 평행 "싼 직선" 3개를 둔 모델.
  안정 노름의 단위 공이 팔면체가 됩니다.
- `read_pgraph` / `write_pgraph`: `# pgraph v1 d=<2|3>` 텍스트 형식.
"""
import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import sympy
from scipy import sparse
from scipy.sparse import csgraph

PGRAPH_HEADER = "# pgraph v1"


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    shift: tuple[int, ...]
    weight: float

    def reversed(self) -> "Edge":
        return Edge(self.v, self.u, tuple(-s for s in self.shift), self.weight)


@dataclass(frozen=True)
class PeriodicWeightedGraph:
    """
    ℤᵈ-주기 가중 그래프.

    Attributes:
        d (int): 차원 (2 또는 3).
        n_vertices (int): 셀당 꼭짓점 수.
        edges (tuple[Edge, ...]): 방향 간선 목록.
        symmetric (bool): True 이면 간선 집합이 역방향(shift 부호 반전)에 닫혀 있어야 합니다.
        anchors (tuple[int, ...]): 최단 경로 기준 꼭짓점 후보. 기본 (0,).
        positions (np.ndarray | None): 셀 안 꼭짓점 좌표 (셀 지름 계산용, 선택).
        name (str): 라벨.
    """
    d: int
    n_vertices: int
    edges: tuple
    symmetric: bool = True
    anchors: tuple = (0,)
    positions: np.ndarray | None = field(default=None, compare=False)
    name: str = "pgraph"

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ValueError(f"d 는 2 또는 3 이어야 합니다: {self.d}")
        if self.n_vertices < 1:
            raise ValueError("셀 꼭짓점이 최소 1개 필요합니다.")
        edges = tuple(self.edges)
        for e in edges:
            if not (0 <= e.u < self.n_vertices and 0 <= e.v < self.n_vertices):
                raise ValueError(f"간선 꼭짓점 범위 오류: {e}")
            if len(e.shift) != self.d:
                raise ValueError(f"간선 shift 차원 오류: {e}")
            if not e.weight > 0:
                raise ValueError(f"간선 가중치는 양수여야 합니다: {e}")
        if self.symmetric:
            fwd = Counter((e.u, e.v, e.shift, e.weight) for e in edges)
            rev = Counter((r.u, r.v, r.shift, r.weight) for r in (e.reversed() for e in edges))
            if fwd != rev:
                raise ValueError("symmetric 플래그가 있지만 간선 집합이 역방향에 닫혀 있지 않습니다.")
        if not self.anchors or any(not 0 <= a < self.n_vertices for a in self.anchors):
            raise ValueError(f"anchors 범위 오류: {self.anchors}")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "anchors", tuple(int(a) for a in self.anchors))
        if not self.lift_connected():
            raise ValueError(f"{self.name}: 들어 올린 그래프가 연결되어 있지 않습니다.")

    # --- 배열 뷰 ---
    @property
    def edge_arrays(self):
        """(u, v, shift[m×d], weight) numpy 배열."""
        u = np.array([e.u for e in self.edges], dtype=np.int64)
        v = np.array([e.v for e in self.edges], dtype=np.int64)
        s = np.array([e.shift for e in self.edges], dtype=np.int64).reshape(-1, self.d)
        w = np.array([e.weight for e in self.edges], dtype=float)
        return u, v, s, w

    def lift_connected(self) -> bool:
        """
        몫 그래프가 (약하게) 연결되어 있고, 사이클들의 shift 가 ℤᵈ 전체를 생성하면
        들어 올린 그래프가 연결되어 있습니다 (d×d 소행렬식들의 gcd 가 1).
        """
        u, v, s, _ = self.edge_arrays
        n = self.n_vertices
        adj = sparse.coo_matrix((np.ones(u.size), (u, v)), shape=(n, n)).tocsr()
        n_comp, _ = csgraph.connected_components(adj, directed=True, connection="strong")
        if n_comp != 1:
            return False
        # 신장 트리 퍼텐셜 φ(v) ∈ ℤᵈ 를 BFS 로 구하고, 각 간선의 사이클 벡터 s + φ(u) − φ(v) 를 모읍니다.
        phi = {0: np.zeros(self.d, dtype=np.int64)}
        frontier = [0]
        out = {}
        for i in range(u.size):
            out.setdefault(int(u[i]), []).append((int(v[i]), s[i]))
            out.setdefault(int(v[i]), []).append((int(u[i]), -s[i]))
        while frontier:
            a = frontier.pop()
            for b, sh in out.get(a, []):
                if b not in phi:
                    phi[b] = phi[a] + sh
                    frontier.append(b)
        cycles = np.array([s[i] + phi[int(u[i])] - phi[int(v[i])] for i in range(u.size)], dtype=np.int64)
        cycles = cycles[np.any(cycles != 0, axis=1)]
        if len(cycles) < self.d:
            return False
        # 부호를 정규화하고 중복을 지운 뒤, d×d 소행렬식들의 gcd 가 1 인지 봅니다.
        first = cycles[np.arange(len(cycles)), np.argmax(cycles != 0, axis=1)]
        cycles = np.unique(cycles * np.sign(first)[:, None], axis=0)
        g = 0
        for rows in itertools.combinations(range(len(cycles)), self.d):
            g = math.gcd(g, int(sympy.Matrix(cycles[list(rows)].tolist()).det()))
            if g == 1:
                return True
        return False

    def with_weights(self, weights) -> "PeriodicWeightedGraph":
        """같은 구조에 새 가중치를 준 그래프 (단조성 실험용)."""
        edges = tuple(Edge(e.u, e.v, e.shift, float(w)) for e, w in zip(self.edges, weights))
        return PeriodicWeightedGraph(self.d, self.n_vertices, edges, self.symmetric, self.anchors,
                                     self.positions, self.name)

    def window_matrix(self, lo, hi) -> tuple[sparse.csr_matrix, tuple[int, ...]]:
        """
        셀 좌표 상자 [lo, hi] (양끝 포함) 로 자른 들어 올린 그래프의 인접 행렬.

        꼭짓점 번호는 `ravel_multi_index(cell − lo, shape) · n + v` 입니다.
        같은 (행, 열) 에 간선이 여럿이면 가장 가벼운 것만 남깁니다.

        Returns:
            (csr_matrix, shape): 희소 인접 행렬과 창의 셀 모양.
        """
        lo = np.asarray(lo, dtype=np.int64)
        hi = np.asarray(hi, dtype=np.int64)
        shape = tuple(int(x) for x in hi - lo + 1)
        n = self.n_vertices
        cells = np.indices(shape).reshape(self.d, -1).T
        u, v, s, w = self.edge_arrays
        rows, cols, ws = [], [], []
        for k in range(u.size):
            tgt = cells + s[k]
            ok = np.all((tgt >= 0) & (tgt < np.asarray(shape)), axis=1)
            src = np.nonzero(ok)[0]
            dst = np.ravel_multi_index(tuple(tgt[ok].T), shape)
            rows.append(src * n + u[k])
            cols.append(dst * n + v[k])
            ws.append(np.full(src.size, w[k]))
        r, c, wt = np.concatenate(rows), np.concatenate(cols), np.concatenate(ws)
        order = np.lexsort((wt, c, r))
        r, c, wt = r[order], c[order], wt[order]
        first = np.r_[True, (r[1:] != r[:-1]) | (c[1:] != c[:-1])]
        size = cells.shape[0] * n
        return sparse.csr_matrix((wt[first], (r[first], c[first])), shape=(size, size)), shape

    def cell_diameter(self) -> float:
        """같은 셀 꼭짓점들 사이 들어 올린 거리의 최댓값 (여유 셀 창에서 잰 상계)."""
        n = self.n_vertices
        for margin in (1, 2, 4):
            lo = -margin * np.ones(self.d, dtype=np.int64)
            A, shape = self.window_matrix(lo, -lo)
            base = int(np.ravel_multi_index(tuple(-lo), shape))
            idx = base * n + np.arange(n)
            dist = csgraph.dijkstra(A, directed=True, indices=idx)[:, idx]
            if np.all(np.isfinite(dist)):
                return float(dist.max())
        raise ValueError(f"{self.name}: 셀 꼭짓점들이 작은 창 안에서 서로 닿지 않습니다.")


def _symmetric_edges(raw) -> tuple:
    edges = []
    for u, v, shift, w in raw:
        e = Edge(u, v, tuple(int(x) for x in shift), float(w))
        edges.extend([e, e.reversed()])
    return tuple(edges)


def flat_grid(d: int = 2, weight: float = 1.0) -> PeriodicWeightedGraph:
    """단위 격자 ℤᵈ: 셀당 꼭짓점 1개, 각 축 방향 ±1 간선."""
    raw = []
    for axis in range(d):
        shift = [0] * d
        shift[axis] = 1
        raw.append((0, 0, shift, weight))
    return PeriodicWeightedGraph(d, 1, _symmetric_edges(raw), True, (0,), np.zeros((1, d)), f"flat{d}")


def hedlund_graph(epsilon: float, m: int = 3) -> PeriodicWeightedGraph:
    """
    𝕋³ 위의 세 "싼 직선" 모델.

    셀을 m×m×m 격자로 나누고, 격자 간선의 가중치는 (단위 길이당 가중치) × (간선 길이 1/m) 입니다.
    서로 만나지 않는 세 축 평행 직선
        L1 = (t, 0, 0),  L2 = (0, t, 1/m),  L3 = (1/m, 1/m, t)
    위의 간선은 단위 길이당 ε, 나머지는 1 입니다.

    Args:
        epsilon (float): 싼 직선의 단위 길이당 가중치, (0, 0.5).
        m (int): 셀 분할 수 (≥ 2).
    """
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"epsilon 은 (0, 0.5) 안에 있어야 합니다: {epsilon}")
    if m < 2:
        raise ValueError(f"m 은 2 이상이어야 합니다: {m}")

    def vid(i, j, k):
        return i + m * j + m * m * k

    def cheap(axis, i, j, k):
        if axis == 0:
            return j == 0 and k == 0
        if axis == 1:
            return i == 0 and k == 1
        return i == 1 and j == 1

    raw = []
    for i in range(m):
        for j in range(m):
            for k in range(m):
                here = (i, j, k)
                for axis in range(3):
                    nxt = list(here)
                    shift = [0, 0, 0]
                    nxt[axis] += 1
                    if nxt[axis] == m:
                        nxt[axis] = 0
                        shift[axis] = 1
                    per_unit = epsilon if cheap(axis, *here) else 1.0
                    raw.append((vid(*here), vid(*nxt), shift, per_unit / m))
    pos = np.array([[i, j, k] for k in range(m) for j in range(m) for i in range(m)], dtype=float) / m
    anchors = (vid(0, 0, 0), vid(0, 0, 1), vid(1, 1, 0))
    graph = PeriodicWeightedGraph(3, m ** 3, _symmetric_edges(raw), True, anchors, pos,
                                  f"hedlund(eps={epsilon:g},m={m})")
    logging.info(f"{graph.name}: {graph.n_vertices} vertices, {len(graph.edges)} edges per cell")
    return graph


# --- 텍스트 형식 ---
def write_pgraph(g: PeriodicWeightedGraph, path: Path) -> Path:
    """`# pgraph v1 d=<d>`, `v <id>`, `e <u> <v> <shift…> <weight>` 형식으로 저장합니다."""
    lines = [f"{PGRAPH_HEADER} d={g.d}"]
    lines += [f"v {i}" for i in range(g.n_vertices)]
    lines += [f"e {e.u} {e.v} {' '.join(str(s) for s in e.shift)} {e.weight:.17g}" for e in g.edges]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return Path(path)


def read_pgraph(path: Path, anchors: tuple = (0,)) -> PeriodicWeightedGraph:
    """`write_pgraph` 형식을 읽습니다. 간선 집합이 역방향에 닫혀 있으면 symmetric 으로 표시합니다."""
    path = Path(path)
    text = path.read_text(encoding="utf-8").splitlines()
    if not text or not text[0].startswith(PGRAPH_HEADER) or "d=" not in text[0]:
        raise ValueError(f"{path}: pgraph v1 헤더가 아닙니다.")
    d = int(text[0].split("d=", 1)[1].split()[0])
    ids: dict[str, int] = {}
    edges = []
    for no, line in enumerate(text[1:], start=2):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v" and len(parts) == 2:
            ids.setdefault(parts[1], len(ids))
        elif parts[0] == "e" and len(parts) == 4 + d:
            u, v = parts[1], parts[2]
            if u not in ids or v not in ids:
                raise ValueError(f"{path}:{no}: 선언되지 않은 꼭짓점 {u} 또는 {v}")
            shift = tuple(int(x) for x in parts[3:3 + d])
            edges.append(Edge(ids[u], ids[v], shift, float(parts[3 + d])))
        else:
            raise ValueError(f"{path}:{no}: 해석할 수 없는 줄: {line!r}")
    fwd = Counter((e.u, e.v, e.shift, e.weight) for e in edges)
    rev = Counter((r.u, r.v, r.shift, r.weight) for r in (e.reversed() for e in edges))
    return PeriodicWeightedGraph(d, len(ids), tuple(edges), fwd == rev, anchors, None, path.stem)
