"""
구체적인 실험 엔진들. 설정 파일의 ENGINE 값으로 고릅니다.

| ENGINE      | 클래스          | 주요 결과 파일                                   |
|-------------|-----------------|--------------------------------------------------|
| beta-fk     | BetaFKEngine    | beta.profile, alpha.profile, corners.tsv         |
| stable-norm | StableNormEngine| norms.tsv, section_*.profile, faces.tsv, counts.tsv |
| torus-seq   | TorusSeqEngine  | heights.tsv, coverage.tsv, histogram.tsv         |
| qc          | QCEngine        | components.tsv, histogram.tsv, points.tsv        |
| convex      | ConvexEngine    | input.profile, legendre.profile, faces.tsv       |

모든 결과는 결정적입니다 (같은 설정 + 같은 seed → 같은 바이트).
"""
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import sympy

from config.config import CFG
from src.convex.duality import biconjugate, detect_faces, legendre_transform
from src.convex.irrationality import irrationality
from src.convex.profile import HomologyVector, SampledConvexProfile, read_profile, write_profile
from src.fk.beta_profile import alpha_from_beta, beta_profile, corner_gap
from src.fk.generating_function import GeneratingFunction
from src.fk.minimizer import is_cyclically_monotone
from src.runner.engine import Engine, EngineError, flag
from src.stable_norm.graph import PeriodicWeightedGraph, flat_grid, hedlund_graph, read_pgraph
from src.stable_norm.norm import minkowski_series, section_faces, stable_norm, unit_ball_section
from src.torus.heights import equidistribution_report, gap_analysis, heights, SWAPPED_LETTER_STEPS
from src.torus.quasicrystal import (WindowBox, cantor_gaps, cantor_reproduction, components_contained,
                                    parse_forbidden, qc_build, qc_components)
from src.torus.sequences import (IrrationalPair, all_words_sequence, avoid_gap, avoid_interval_sequence,
                                 fibonacci_rules, random_sequence, substitution_sequence)
from src.utils.helpers import write_table

# K > 0 에서 유리점 모서리가 열렸다고 보는 최소 간격.
CORNER_OPEN = 1e-3


# --- 값 파서 ---
def int_vector(text: str) -> tuple[int, ...]:
    """"1,0,-1" → (1, 0, −1)."""
    return tuple(int(v) for v in text.split(","))


def int_vectors(text: str) -> list[tuple[int, ...]]:
    """"1,0;0,1" → [(1, 0), (0, 1)]."""
    return [int_vector(part) for part in text.split(";") if part.strip()]


def float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def fraction_list(text: str) -> list[Fraction]:
    return [Fraction(v.strip()) for v in text.split(",") if v.strip()]


# --- beta-fk ---
class BetaFKEngine(Engine):
    """FK 모델의 β 프로파일, α = β*, 모서리 측정."""

    name = "beta-fk"
    keys = {
        "k": (float, 0.0),
        "table": (float_list, None),
        "q": (int, 8),
        "restarts": (int, None),
        "workers": (int, 1),
        "bound": (float, 2.0),
        "dual_points": (int, 401),
        "dual_range": (float, 2.5),
        "corners": (fraction_list, [Fraction(0), Fraction(1, 3)]),
    }

    def needs_seed(self, params: dict[str, Any]) -> bool:
        return True

    def execute(self, params: dict[str, Any], workdir: Path, seed: int | None) -> dict[str, bool]:
        with self.stage("table" if params["table"] else "k"):
            gf = (GeneratingFunction.from_table(params["table"]) if params["table"]
                  else GeneratingFunction.standard(params["k"]))
        with self.stage("q"):
            prof = beta_profile(gf, params["q"], params["restarts"], seed, params["workers"], params["bound"])
        write_profile(prof.as_profile(), workdir / "beta.profile")
        write_table(prof.to_frame(), workdir / "beta.tsv", [f"beta profile {gf.label} Q={params['q']}"])

        with self.stage("dual_points"):
            n = params["dual_points"] | 1           # 홀수 개여야 c = 0 이 격자에 들어갑니다
            r = params["dual_range"]
            alpha = alpha_from_beta(prof, np.linspace(-r, r, n))
        write_profile(alpha, workdir / "alpha.profile")

        with self.stage("corners"):
            rows = [{"at": f"{f.numerator}/{f.denominator}", "gap": corner_gap(prof, f),
                     "raw_gap": corner_gap(prof, f, extrapolate=False)} for f in params["corners"]]
        corners = pd.DataFrame(rows, columns=["at", "gap", "raw_gap"])
        write_table(corners, workdir / "corners.tsv")

        beta0 = prof.entries[Fraction(0)]
        checks = {
            "duality": bool(abs(float(alpha.values.min()) + beta0) <= CFG.TOL_DUAL),
            "cyclic_order": all(is_cyclically_monotone(c) for c in prof.configurations.values()),
        }
        if gf.table is None and gf.K == 0:
            exact = np.array([float(f) ** 2 / 2 for f in prof.fractions()])
            got = np.array([prof.entries[f] for f in prof.fractions()])
            checks["integrable"] = bool(np.max(np.abs(got - exact)) <= 1e-9)
            checks["flat_corners"] = bool((corners["gap"] <= 1e-9).all())
        elif gf.table is None:
            checks["corners_open"] = bool((corners["gap"] > CORNER_OPEN).all())
        return checks


# --- stable-norm ---
def resolve_graph(spec: str, epsilon: float, m: int) -> PeriodicWeightedGraph:
    """"flat2" | "flat3" | "hedlund" | pgraph 파일 경로."""
    if spec in ("flat2", "flat3"):
        return flat_grid(int(spec[-1]))
    if spec == "hedlund":
        return hedlund_graph(epsilon, m)
    return read_pgraph(Path(spec))


class StableNormEngine(Engine):
    """주기 그래프의 안정 노름, 단위 공 단면, 격자점 세기."""

    name = "stable-norm"
    keys = {
        "graph": (str, "flat2"),
        "epsilon": (float, 0.1),
        "m": (int, 3),
        "h": (int_vectors, None),
        "n": (int, 30),
        "section": (int_vectors, None),
        "directions": (int, 41),
        "section_n": (int, None),
        "count": (float_list, None),
        "count_n": (int, None),
    }

    def execute(self, params: dict[str, Any], workdir: Path, seed: int | None) -> dict[str, bool]:
        with self.stage("graph"):
            g = resolve_graph(params["graph"], params["epsilon"], params["m"])
        checks: dict[str, bool] = {}

        if params["h"]:
            rows = []
            with self.stage("h"):
                for h in params["h"]:
                    est = stable_norm(g, h, params["n"])
                    rows.append({"h": ",".join(map(str, est.h)), "N": est.N, "upper": est.upper,
                                 "lower": est.lower, "margin": est.margin})
            norms = pd.DataFrame(rows, columns=["h", "N", "upper", "lower", "margin"])
            write_table(norms, workdir / "norms.tsv", [f"stable norm {g.name}"])
            checks["bounds_ordered"] = bool((norms["lower"] <= norms["upper"] * (1 + 1e-12) + 1e-12).all())

        if params["section"]:
            with self.stage("section"):
                if len(params["section"]) != 2:
                    raise ValueError("section 은 두 벡터 'a;b' 여야 합니다.")
                charts = unit_ball_section(g, params["section"], params["directions"], params["section_n"])
                faces = section_faces(charts)
            for c, chart in enumerate(charts):
                write_profile(chart, workdir / f"section_{c}.profile")
            write_table(faces.to_frame(), workdir / "faces.tsv")
            checks["section_convex"] = all(chart.convexity_violation() is None for chart in charts)

        if params["count"]:
            with self.stage("count"):
                series = minkowski_series(g, params["count"], params["count_n"])
            write_table(series, workdir / "counts.tsv", [f"lattice classes of {g.name}"])
            if params["graph"] == "flat2" and params["count_n"] is None:
                T = series["T"]
                whole = T == np.floor(T)
                checks["lattice_formula"] = bool(
                    (series.loc[whole, "count"] == 2 * T[whole] ** 2 + 2 * T[whole] + 1).all())
        if not checks:
            raise EngineError(self.name, "h", ValueError("h, section, count 중 하나는 있어야 합니다."))
        return checks


# --- torus-seq ---
class TorusSeqEngine(Engine):
    """단위 걸음 보행의 높이 mod 1 과 그 분포."""

    name = "torus-seq"
    kinds = ("avoid", "random", "fib", "allwords")
    keys = {
        "kind": (str, "fib"),
        "alpha": (float, None),
        "beta": (float, None),
        "n": (int, 100_000),
        "p_right": (float, 0.5),
        "delta": (float, 1e-3),
        "bins": (int, 100),
        "word_seed": (str, "0"),
        "swap": (flag, False),
    }

    def needs_seed(self, params: dict[str, Any]) -> bool:
        return params.get("kind") == "random"

    def execute(self, params: dict[str, Any], workdir: Path, seed: int | None) -> dict[str, bool]:
        kind = params["kind"]
        with self.stage("kind"):
            if kind not in self.kinds:
                raise ValueError(f"kind 는 {self.kinds} 중 하나여야 합니다: {kind}")
        with self.stage("alpha" if params["alpha"] is None else "beta"):
            if params["alpha"] is None or params["beta"] is None:
                raise ValueError("alpha 와 beta 가 필요합니다.")
            pair = IrrationalPair.checked(params["alpha"], params["beta"])
        with self.stage("n"):
            n = params["n"]
            steps = SWAPPED_LETTER_STEPS if params["swap"] else None
            if kind == "avoid":
                seq = avoid_interval_sequence(pair, n)
            elif kind == "random":
                seq = random_sequence(params["p_right"], n, seed)
            elif kind == "fib":
                seq = substitution_sequence(fibonacci_rules(), params["word_seed"], n, steps)
            else:
                seq = all_words_sequence(n, steps)
        trace = heights(seq, pair)
        with self.stage("delta"):
            coverage = gap_analysis(trace, params["delta"])
        with self.stage("bins"):
            dist = equidistribution_report(trace, params["bins"])

        header = [f"{seq.kind} alpha={pair.alpha:.17g} beta={pair.beta:.17g} n={n}",
                  f"independence_checked_to={pair.independence_checked_to}"]
        write_table(trace.to_frame(), workdir / "heights.tsv", header)
        write_table(coverage.to_frame(), workdir / "coverage.tsv", header)
        write_table(dist.to_frame(), workdir / "histogram.tsv",
                    header + [f"max_deviation={dist.max_deviation:.17g} discrepancy={dist.discrepancy:.17g}"])

        checks = {"unit_walk": seq.is_unit_walk(), "recurrence": trace.recurrence_ok()}
        if kind == "avoid":
            A = avoid_gap(pair)
            v = trace.values
            checks["avoids_interval"] = not bool(np.any((v > 0.0) & (v < A)))
            checks["x_in_01"] = bool(np.isin(seq.positions()[:, 0], (0, 1)).all())
            checks["gap_at_least_A"] = coverage.largest_gap >= A
        logging.info(f"torus-seq {kind}: largest gap {coverage.largest_gap:.4g}, "
                     f"covered {coverage.covered_measure:.4g}")
        return checks


# --- qc ---
class QCEngine(Engine):
    """준결정 창과 금지 집합 K 에 대한 연결 성분."""

    name = "qc"
    keys = {
        "alpha": (float, None),
        "beta": (float, None),
        "window": (int, 30),
        "z_range": (int_vector, None),
        "cantor_gaps": (int, None),
        "k": (str, ""),
        "cantor_series": (lambda t: [int(v) for v in t.split(",")], None),
        "shards": (int, 1),
        "dump": (flag, True),
    }

    def execute(self, params: dict[str, Any], workdir: Path, seed: int | None) -> dict[str, bool]:
        with self.stage("alpha" if params["alpha"] is None else "beta"):
            if params["alpha"] is None or params["beta"] is None:
                raise ValueError("alpha 와 beta 가 필요합니다.")
            pair = IrrationalPair.checked(params["alpha"], params["beta"])
        with self.stage("window"):
            N = params["window"]
            if params["z_range"]:
                z0, z1 = params["z_range"]
                window = WindowBox(0, N, 0, N, z0, z1)
            else:
                window = WindowBox.cube(N)
            qc = qc_build(pair, window)
        with self.stage("cantor_gaps" if params["cantor_gaps"] is not None else "k"):
            K = (cantor_gaps(params["cantor_gaps"]) if params["cantor_gaps"] is not None
                 else parse_forbidden(params["k"]))
            stats = qc_components(qc, K, params["shards"])

        header = [f"qc alpha={pair.alpha:.17g} beta={pair.beta:.17g} window=[0,{N}]^2",
                  "K=" + ";".join(f"{float(a):.17g},{float(b):.17g}" for a, b in K)]
        write_table(stats.records, workdir / "components.tsv", header)
        write_table(stats.histogram, workdir / "histogram.tsv", header)
        if params["dump"]:
            write_table(stats.point_dump(), workdir / "points.tsv", header)

        h = qc.height[qc.present]
        checks = {"heights_in_unit": bool(np.all((h > 0.0) & (h < 1.0)))}
        if window.z0 is None:
            nx, ny = window.shape
            checks["one_per_column"] = len(qc) == nx * ny - 1
        if K:
            checks["refines_unfiltered"] = components_contained(stats, qc_components(qc, (), params["shards"]))
        if params["cantor_series"]:
            with self.stage("cantor_series"):
                summary, per_m = cantor_reproduction(pair, N, params["cantor_series"], params["shards"])
            write_table(summary, workdir / "cantor_summary.tsv", header[:1])
            for m, st in per_m.items():
                write_table(st.histogram, workdir / f"cantor_histogram_m{m}.tsv", header[:1])
            checks["cantor_containment"] = bool(summary["contained"].all())
        return checks


# --- convex ---
class ConvexEngine(Engine):
    """임의의 1차원 볼록 함수(기호식 또는 프로파일 파일)의 쌍대성과 면."""

    name = "convex"
    keys = {
        "expr": (str, "x**2/2"),
        "profile": (str, None),
        "xmin": (float, -2.0),
        "xmax": (float, 2.0),
        "samples": (int, 401),
        "dual_min": (float, -2.0),
        "dual_max": (float, 2.0),
        "dual_samples": (int, 401),
        "homology": (float_list, None),
        "bound": (int, 8),
    }

    def execute(self, params: dict[str, Any], workdir: Path, seed: int | None) -> dict[str, bool]:
        if params["profile"]:
            with self.stage("profile"):
                prof = read_profile(Path(params["profile"]), check=True)
        else:
            with self.stage("expr"):
                x = sympy.Symbol("x")
                fn = sympy.lambdify(x, sympy.sympify(params["expr"]), "numpy")
                grid = np.linspace(params["xmin"], params["xmax"], params["samples"])
                prof = SampledConvexProfile.from_function(
                    lambda xs: np.broadcast_to(np.asarray(fn(xs), dtype=float), xs.shape),
                    grid, f"expr({params['expr']})")
        with self.stage("dual_samples"):
            dual = np.linspace(params["dual_min"], params["dual_max"], params["dual_samples"])
            alpha = legendre_transform(prof, dual)
            back = biconjugate(prof, dual)
        faces = detect_faces(prof)

        write_profile(prof, workdir / "input.profile")
        write_profile(alpha, workdir / "legendre.profile")
        write_profile(back, workdir / "biconjugate.profile")
        write_table(pd.DataFrame([{"kind": f.kind, "start": f.support[0], "stop": f.support[1],
                                   "slope_left": f.slopes[0], "slope_right": f.slopes[1],
                                   "x_lo": f.span[0], "x_hi": f.span[1]} for f in faces],
                                 columns=["kind", "start", "stop", "slope_left", "slope_right", "x_lo", "x_hi"]),
                    workdir / "faces.tsv", [prof.provenance])
        checks = {"biconjugate_below": bool(np.all(back.values <= prof.values + prof.tol_convex))}

        if params["homology"]:
            with self.stage("homology"):
                rep = irrationality(HomologyVector(tuple(params["homology"])), params["bound"])
            write_table(pd.DataFrame([{"b": rep.h.b, "I_Z": rep.I_Z, "I_R": rep.I_R,
                                       "search_bound": rep.search_bound, "method": rep.method,
                                       "relations_Z": str(list(rep.relations_Z)),
                                       "relations_R": str(list(rep.relations_R))}]),
                        workdir / "irrationality.tsv")
            checks["irrationality_ordered"] = rep.I_Z <= rep.I_R
        return checks


ENGINES: dict[str, Engine] = {e.name: e for e in (BetaFKEngine(), StableNormEngine(), TorusSeqEngine(),
                                                   QCEngine(), ConvexEngine())}
