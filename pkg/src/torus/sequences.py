"""
단위 걸음 격자 보행(step sequence)과 그 생성기들.

(x_{n+1}, y_{n+1}) = (x_n, y_n) ± (1,0) 또는 (0,1) 인 보행을 걸음 코드 배열로 저장합니다.
- R = +(1,0) (높이에 α 를 더함), U = +(0,1) (β 를 더함), L = −(1,0), D = −(0,1)

생성기:
- `avoid_interval_sequence`: 0 < α < β < 0.1 에서 높이가 ]0, A[ 를 피하는 구성 (A = min{α, β−α})
- `random_sequence`: p_right 확률로 R, 아니면 U 인 독립 걸음 (seed 로 결정적)
- `substitution_sequence`: 원시(primitive) 치환의 고정점 접두사 (예: Fibonacci 0 ↦ 1, 1 ↦ 01)
- `all_words_sequence`: 모든 이진 단어를 길이순 → 사전순으로 이어 붙인 수열
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from config.config import CFG
from src.convex.irrationality import irrationality
from src.convex.profile import HomologyVector

STEP_CODES = "RULD"
STEP_VECTORS = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=np.int64)
R, U, L, D = range(4)

# 정확한 정수배 계산을 위한 분할 배율과 좌표 상한.
_SPLIT = float(2 ** 24)
COORD_LIMIT = 2 ** 28


def _split(a: float) -> tuple[float, float, float]:
    """a = 정수부 + hi + lo. hi 는 2⁻²⁴ 의 배수라 |x| < 2²⁸ 인 정수와의 곱이 정확합니다."""
    whole = math.floor(a)
    frac = a - whole
    hi = round(frac * _SPLIT) / _SPLIT
    return float(whole), hi, frac - hi


@dataclass(frozen=True)
class IrrationalPair:
    """
    (α, β) 쌍과 유리 독립성 검사 결과.

    Attributes:
        alpha, beta: 실수.
        independence_checked_to: |k_i| ≤ B 인 관계 k₀ + k₁α + k₂β = 0 이 없음이 확인된 최대 B.
        relations: 검사 범위 안에서 찾은 관계 (k₁, k₂) 들. 비어 있으면 독립.
    """
    alpha: float
    beta: float
    independence_checked_to: int
    relations: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError(f"α, β 는 유한해야 합니다: {self.alpha}, {self.beta}")

    @classmethod
    def checked(cls, alpha: float, beta: float, bound: int | None = None,
                strict: bool = False) -> "IrrationalPair":
        """
        1, α, β 의 정수 관계를 |k| ≤ bound 에서 찾고 쌍을 만듭니다.

        Args:
            bound (int, optional): 탐색 범위. 기본 CFG.INDEPENDENCE_BOUND.
            strict (bool): True 이면 관계가 있을 때 ValueError, 아니면 WARNING 로그만 남깁니다.
        """
        bound = CFG.INDEPENDENCE_BOUND if bound is None else int(bound)
        report = irrationality(HomologyVector((float(alpha), float(beta))), bound)
        relations = report.relations_Z
        clean = bound
        if relations:
            clean = min(max(abs(k) for k in rel) for rel in relations) - 1
            msg = (f"(α, β) = ({alpha:.12g}, {beta:.12g}) has integer relations {relations} "
                   f"within bound {bound}")
            if strict:
                raise ValueError(msg)
            logging.warning(msg)
        return cls(float(alpha), float(beta), clean, relations)

    @property
    def independent(self) -> bool:
        return not self.relations

    def reduced(self) -> "IrrationalPair":
        """(α mod 1, β mod 1). 정수 좌표에서의 높이는 바뀌지 않습니다."""
        return IrrationalPair(self.alpha % 1.0, self.beta % 1.0, self.independence_checked_to, self.relations)

    def lattice_heights(self, x, y) -> tuple[np.ndarray, np.ndarray]:
        """
        정수 좌표에서 αx + βy 를 (소수부 ∈ [0,1), 정수부) 로 나눠 돌려줍니다.

        α, β 를 (정수부, 2⁻²⁴ 격자 값, 나머지) 로 쪼개 주요 항을 정확히 더하고,
        작은 나머지 항만 반올림 오차를 가집니다.
        """
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if x.size and max(int(np.max(np.abs(x))), int(np.max(np.abs(y)))) >= COORD_LIMIT:
            raise ValueError(f"좌표가 정확한 계산 범위 {COORD_LIMIT} 를 넘습니다.")
        aw, ah, al = _split(self.alpha)
        bw, bh, bl = _split(self.beta)
        main = ah * x + bh * y
        base = np.floor(main)
        rest = (main - base) + (al * x + bl * y)
        carry = np.floor(rest)
        whole = base + carry + aw * x + bw * y
        return rest - carry, whole.astype(np.int64)


@dataclass(frozen=True)
class StepSequence:
    """
    단위 걸음 보행.

    Attributes:
        codes (np.ndarray): 0..3 (R, U, L, D) 걸음 코드. 읽기 전용.
        origin (tuple[int, int]): 시작점 (x₀, y₀).
        kind (str): 생성기 라벨.
    """
    codes: np.ndarray
    origin: tuple[int, int] = (0, 0)
    kind: str = "steps"

    def __post_init__(self):
        codes = np.array(self.codes, dtype=np.uint8).ravel()
        if codes.size and int(codes.max()) > 3:
            raise ValueError("걸음 코드는 0..3 (R, U, L, D) 이어야 합니다.")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "origin", (int(self.origin[0]), int(self.origin[1])))

    @classmethod
    def from_letters(cls, letters: str, origin=(0, 0), kind: str = "steps") -> "StepSequence":
        try:
            return cls(np.array([STEP_CODES.index(c) for c in letters], dtype=np.uint8), origin, kind)
        except ValueError:
            raise ValueError(f"걸음 문자는 {STEP_CODES} 중 하나여야 합니다: {letters!r}") from None

    def __len__(self) -> int:
        return int(self.codes.size)

    @property
    def letters(self) -> str:
        return "".join(STEP_CODES[c] for c in self.codes)

    def positions(self) -> np.ndarray:
        """(n+1, 2) 정수 좌표. 첫 행이 시작점입니다."""
        steps = STEP_VECTORS[self.codes]
        pos = np.empty((self.codes.size + 1, 2), dtype=np.int64)
        pos[0] = self.origin
        np.cumsum(steps, axis=0, out=pos[1:])
        pos[1:] += np.asarray(self.origin, dtype=np.int64)
        return pos

    def is_unit_walk(self) -> bool:
        """연속한 위치가 정확히 한 단위 걸음씩 차이 나는지 검사합니다."""
        d = np.abs(np.diff(self.positions(), axis=0)).sum(axis=1)
        return bool(np.all(d == 1))


# --- 구간 회피 구성 ---
def avoid_gap(pair: IrrationalPair) -> float:
    """회피 구간 ]0, A[ 의 길이 A = min{α, β − α}."""
    return min(pair.alpha, pair.beta - pair.alpha)


def avoid_interval_sequence(pair: IrrationalPair, n: int) -> StepSequence:
    """
    높이 αx_n + βy_n mod 1 이 ]0, A[ 를 피하는 보행 (x_n ∈ {0, 1}).

    (0,0) 에서 U 로 올라가다가 높이가 ]−β, 0[ (mod 1) 에 들어오면:
    - ]−β, −α[ 이면 R, U, U, L (x 계수를 0 으로 되돌림)
    - ]−α, 0[ 이면 U
    를 두고 다시 U 로 올라갑니다. U 구간은 한 번에 k 걸음씩 채우고, 끝 높이를 정확히 다시 계산해 확인합니다.

    Raises:
        ValueError: 0 < α < β < 0.1 이 아니거나 n < 1.
    """
    a, b = pair.alpha, pair.beta
    if not 0.0 < a < b < 0.1:
        raise ValueError(f"0 < α < β < 0.1 이어야 합니다: α={a}, β={b}")
    if n < 1:
        raise ValueError(f"n 은 1 이상이어야 합니다: {n}")

    def height(x: int, y: int) -> tuple[float, int]:
        frac, whole = pair.lattice_heights(x, y)
        return float(frac), int(whole)

    codes = np.empty(n, dtype=np.uint8)
    pos, x, y = 0, 0, 0
    while pos < n:
        u, w0 = height(x, y)
        k = max(0, int(math.floor((1.0 - u) / b)))
        # 정수부가 바뀌기 직전, 끝 높이가 ]1−β, 1[ 에 들도록 k 를 보정합니다.
        for _ in range(4):
            end, w = height(x, y + k)
            if w > w0:
                k -= 1
            elif end <= 1.0 - b:
                k += 1
            else:
                break
        else:
            raise RuntimeError(f"U 구간 길이 보정 실패 (x={x}, y={y})")
        take = min(k, n - pos)
        codes[pos:pos + take] = U
        pos += take
        y += take
        if pos >= n:
            break
        if end < 1.0 - a:
            tail = (R, U, U, L)
        else:
            tail = (U,)
        take = min(len(tail), n - pos)
        codes[pos:pos + take] = tail[:take]
        pos += take
        for c in tail[:take]:
            x += int(STEP_VECTORS[c][0])
            y += int(STEP_VECTORS[c][1])
    logging.info(f"avoid-interval sequence α={a:g} β={b:g}: {n} steps, A={avoid_gap(pair):g}")
    return StepSequence(codes, (0, 0), "avoid")


# --- 무작위 / 치환 / 모든 단어 ---
def random_sequence(p_right: float, n: int, seed: int) -> StepSequence:
    """확률 p_right 로 R, 아니면 U 인 독립 걸음 n 개."""
    if not 0.0 <= p_right <= 1.0:
        raise ValueError(f"p_right 는 [0, 1] 안에 있어야 합니다: {p_right}")
    if n < 0:
        raise ValueError(f"n 은 0 이상이어야 합니다: {n}")
    rng = np.random.default_rng(seed)
    codes = np.where(rng.random(n) < p_right, R, U).astype(np.uint8)
    return StepSequence(codes, (0, 0), f"random(p={p_right:g},seed={seed})")


def fibonacci_rules() -> dict[str, str]:
    """Fibonacci 치환 0 ↦ 1, 1 ↦ 01."""
    return {"0": "1", "1": "01"}


DEFAULT_LETTER_STEPS = {"0": "R", "1": "U"}


def _substitution_matrix(rules: dict[str, str], alphabet: list[str]) -> np.ndarray:
    M = np.zeros((len(alphabet), len(alphabet)), dtype=np.int64)
    for i, a in enumerate(alphabet):
        for c in rules[a]:
            M[i, alphabet.index(c)] += 1
    return M


def is_primitive(rules: dict[str, str]) -> bool:
    """치환 행렬의 어떤 거듭제곱이 모든 성분 양수인지 (Wielandt 상한 (k−1)²+1 까지) 봅니다."""
    alphabet = sorted(rules)
    M = _substitution_matrix(rules, alphabet)
    P = np.eye(len(alphabet), dtype=np.int64)
    for _ in range((len(alphabet) - 1) ** 2 + 1):
        P = np.minimum(P @ M, 1)
        if np.all(P > 0):
            return True
    return False


def _letters_to_codes(word: str, letter_steps: dict[str, str]) -> np.ndarray:
    table = np.full(256, 255, dtype=np.uint8)
    for letter, step in letter_steps.items():
        table[ord(letter)] = STEP_CODES.index(step)
    codes = table[np.frombuffer(word.encode("ascii"), dtype=np.uint8)]
    if codes.size and int(codes.max()) == 255:
        raise ValueError(f"letter_steps 에 없는 문자가 있습니다: {sorted(set(word) - set(letter_steps))}")
    return codes


def substitution_word(rules: dict[str, str], seed_word: str, n: int) -> str:
    """
    치환 고정점의 길이 n 접두사.

    σ 가 seed 의 첫 글자에서 연장 가능(prolongable)하지 않으면 σ^k (k ≤ 알파벳 크기) 를 씁니다.
    예: Fibonacci 에서 σ(0) = 1 이므로 σ²(0) = 01 로 연장합니다.
    """
    rules = {str(k): str(v) for k, v in rules.items()}
    if any(len(k) != 1 for k in rules):
        raise ValueError("치환 규칙의 키는 한 글자여야 합니다.")
    if any(c not in rules for w in rules.values() for c in w) or any(c not in rules for c in seed_word):
        raise ValueError("치환이 알파벳에 닫혀 있지 않습니다.")
    if not seed_word:
        raise ValueError("seed_word 는 비어 있지 않아야 합니다.")
    if all(len(w) <= 1 for w in rules.values()):
        raise ValueError("늘어나지 않는(non-expanding) 치환입니다.")
    if not is_primitive(rules):
        raise ValueError(f"원시(primitive) 치환이 아닙니다: {rules}")

    table = str.maketrans(rules)
    # σ^k(seed[0]) 가 seed[0] 로 시작하는 가장 작은 k 를 찾습니다.
    power, image = 1, seed_word[0].translate(table)
    while not image.startswith(seed_word[0]) or len(image) < 2:
        power += 1
        image = image.translate(table)
        if power > len(rules) + 1:
            raise ValueError(f"{seed_word[0]!r} 에서 연장 가능한 거듭제곱을 찾지 못했습니다.")
    word = seed_word
    while len(word) < n:
        for _ in range(power):
            word = word.translate(table)
    return word[:n]


def substitution_sequence(rules: dict[str, str], seed_word: str, n: int,
                          letter_steps: dict[str, str] | None = None) -> StepSequence:
    """
    치환 고정점 접두사를 걸음으로 바꿉니다. 기본 사상은 0 → R (α), 1 → U (β).

    Raises:
        ValueError: n < 1, 원시가 아니거나 늘어나지 않는 규칙.
    """
    if n < 1:
        raise ValueError(f"n 은 1 이상이어야 합니다: {n}")
    letter_steps = DEFAULT_LETTER_STEPS if letter_steps is None else letter_steps
    word = substitution_word(rules, seed_word, n)
    mapping = ",".join(f"{k}{v}" for k, v in sorted(letter_steps.items()))
    seq = StepSequence(_letters_to_codes(word, letter_steps), (0, 0), f"substitution[{mapping}]")
    logging.info(f"substitution sequence {rules} seed={seed_word!r}: {n} steps ({mapping})")
    return seq


def all_words(n: int) -> str:
    """모든 이진 단어를 길이순, 같은 길이에서는 사전순으로 이어 붙인 길이 n 접두사."""
    if n < 1:
        raise ValueError(f"n 은 1 이상이어야 합니다: {n}")
    parts, total, length = [], 0, 1
    while total < n:
        nums = np.arange(2 ** length, dtype=np.int64)
        bits = (nums[:, None] >> np.arange(length - 1, -1, -1)) & 1
        parts.append(bits.ravel())
        total += bits.size
        length += 1
    return (np.concatenate(parts)[:n] + ord("0")).astype(np.uint8).tobytes().decode("ascii")


def all_words_sequence(n: int, letter_steps: dict[str, str] | None = None) -> StepSequence:
    """`all_words` 를 substitution_sequence 와 같은 사상으로 걸음으로 바꿉니다."""
    letter_steps = DEFAULT_LETTER_STEPS if letter_steps is None else letter_steps
    return StepSequence(_letters_to_codes(all_words(n), letter_steps), (0, 0), "allwords")
