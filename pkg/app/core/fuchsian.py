"""
Fuchsian Length Spectra
Brute-force enumeration of primitive hyperbolic conjugacy classes of a group
given by SL(2, R) generators, by reduced words up to a fixed length.

Classes are deduplicated twice: cyclic normal form of the word (rotations,
and the inverse word unless oriented), then Gamma-conjugacy inside trace
buckets, tested against a pool of short conjugators.
"""

import logging
import math
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from app.config.settings import settings
from app.core.exceptions import EllipticElementFound, SpectrumOverflow
from app.models.schemas import LengthSpectrum, SpectrumEntry

logger = logging.getLogger(__name__)

Matrix = Tuple[float, float, float, float]
Word = Tuple[int, ...]

IDENTITY: Matrix = (1.0, 0.0, 0.0, 1.0)


class ClassRecord(NamedTuple):
    word: Word
    matrix: Matrix
    trace: float
    length: float


# ------------------ 2x2 arithmetic ------------------
def mat_mul(x: Matrix, y: Matrix) -> Matrix:
    return (
        x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3],
    )


def mat_inv(x: Matrix) -> Matrix:
    """Inverse of a determinant-one matrix."""
    return (x[3], -x[1], -x[2], x[0])


def mat_power(x: Matrix, k: int) -> Matrix:
    result = IDENTITY
    for _ in range(k):
        result = mat_mul(result, x)
    return result


def is_identity(x: Matrix, tol: Optional[float] = None) -> bool:
    """x = +-I in PSL(2, R)."""
    tol = settings.CONJUGACY_RESIDUAL if tol is None else tol
    if abs(x[1]) > tol or abs(x[2]) > tol:
        return False
    return (abs(x[0] - 1) <= tol and abs(x[3] - 1) <= tol) or (abs(x[0] + 1) <= tol and abs(x[3] + 1) <= tol)


def translation_length(trace: float, length_scale: float = 1.0) -> float:
    """length_scale * 2 arccosh(|tr| / 2)."""
    return length_scale * 2.0 * math.acosh(abs(trace) / 2.0)


# ------------------ words ------------------
def inverse_letter(letter: int) -> int:
    """Letters 2j and 2j+1 are g_j and its inverse."""
    return letter ^ 1


def inverse_word(word: Word) -> Word:
    return tuple(inverse_letter(c) for c in reversed(word))


def canonical_word(word: Word, oriented: bool = False) -> Word:
    """Least rotation of the word, or of its inverse when orientation is ignored."""
    candidates = [word]
    if not oriented:
        candidates.append(inverse_word(word))
    return min(w[i:] + w[:i] for w in candidates for i in range(len(w)))


def is_proper_power(word: Word) -> bool:
    n = len(word)
    for period in range(1, n // 2 + 1):
        if n % period == 0 and word == word[:period] * (n // period):
            return True
    return False


def alphabet(generators: Sequence[Matrix]) -> List[Matrix]:
    letters = []
    for g in generators:
        letters.append(tuple(float(v) for v in g))
        letters.append(mat_inv(letters[-1]))
    return letters


def reduced_words(letters: Sequence[Matrix], word_len_max: int, max_words: Optional[int] = None) -> Iterator[Tuple[Word, Matrix]]:
    """Depth-first walk over freely reduced words with their matrix products."""
    max_words = settings.MAX_WORDS if max_words is None else max_words
    stack = [((i,), letters[i]) for i in reversed(range(len(letters)))]
    visited = 0
    while stack:
        word, matrix = stack.pop()
        visited += 1
        if visited > max_words:
            raise SpectrumOverflow(f"more than {max_words} words below length {word_len_max}")
        yield word, matrix
        if len(word) < word_len_max:
            forbidden = inverse_letter(word[-1])
            for i in reversed(range(len(letters))):
                if i != forbidden:
                    stack.append((word + (i,), mat_mul(matrix, letters[i])))


# ------------------ conjugacy ------------------
# rounding allowance, in units of eps |h|^2 |g|
ROUNDING_FACTOR = 16.0


class ConjugatorPool:
    """Matrices of all reduced words up to a given length, identity included."""

    def __init__(self, letters: Sequence[Matrix], depth: int):
        mats = [IDENTITY] + [m for _, m in reduced_words(letters, depth)] if depth > 0 else [IDENTITY]
        arr = np.array(mats, dtype=float).reshape(-1, 2, 2)
        self.h = arr
        self.h_inv = np.stack(
            [np.stack([arr[:, 1, 1], -arr[:, 0, 1]], axis=-1),
             np.stack([-arr[:, 1, 0], arr[:, 0, 0]], axis=-1)],
            axis=1,
        )
        # rounding in h g h^-1 grows with |h|^2
        self.rounding = ROUNDING_FACTOR * np.finfo(float).eps * np.max(np.abs(arr), axis=(1, 2)) ** 2

    def __len__(self) -> int:
        return self.h.shape[0]

    def conjugate(self, g: Matrix, targets: Sequence[Matrix], oriented: bool) -> bool:
        return self.match(g, targets, oriented) is not None

    def match(self, g: Matrix, targets: Sequence[Matrix], oriented: bool) -> Optional[int]:
        """
        Index of the first target with h g h^-1 = +-target (or +-target^-1
        unless oriented) for some pool h, or None.

        The residual is allowed CONJUGACY_RESIDUAL relative to |target| plus
        the rounding of h g h^-1 itself.
        """
        if not targets:
            return None
        conj = self.h @ np.array(g, dtype=float).reshape(2, 2) @ self.h_inv
        noise = self.rounding * max(1.0, max(abs(v) for v in g))

        options = list(targets) if oriented else list(targets) + [mat_inv(t) for t in targets]
        t = np.array(options, dtype=float).reshape(-1, 2, 2)
        diff = conj[:, None] - t[None]
        total = conj[:, None] + t[None]
        # (pool, option) residuals, either sign
        residual = np.minimum(np.max(np.abs(diff), axis=(2, 3)), np.max(np.abs(total), axis=(2, 3)))
        tol = settings.CONJUGACY_RESIDUAL * np.maximum(1.0, np.max(np.abs(t), axis=(1, 2)))
        hits = np.any(residual <= tol[None, :] + noise[:, None], axis=0).reshape(-1, len(targets)).any(axis=0)
        return int(np.argmax(hits)) if hits.any() else None


# ------------------ enumeration ------------------
def enumerate_classes(
    generators: Sequence[Matrix],
    word_len_max: int,
    length_scale: float = 1.0,
    oriented: bool = False,
    conjugacy_dedupe: bool = True,
    max_words: Optional[int] = None,
) -> Tuple[List[ClassRecord], float]:
    """
    Primitive hyperbolic classes reachable with words of length <= word_len_max.

    A class is represented by its shortest word. The completeness bound is
    the shortest class first met at exactly word_len_max letters; top-layer
    words that only re-express shorter classes (through a relation) do not
    count. Without any new top-layer class it is the shortest top-layer word.

    Returns:
        (classes sorted by length, completeness bound)

    Raises:
        EllipticElementFound: a non-identity word with |tr| <= 2
        SpectrumOverflow: more than max_words words visited
    """
    if word_len_max < 1:
        raise ValueError("word_len_max must be positive")
    if length_scale <= 0:
        raise ValueError("length_scale must be positive")

    letters = alphabet(generators)
    candidates: List[ClassRecord] = []
    top_layer_min = math.inf

    for word, matrix in reduced_words(letters, word_len_max, max_words):
        if len(word) > 1 and word[0] == inverse_letter(word[-1]):
            continue
        if is_identity(matrix):
            continue
        trace = matrix[0] + matrix[3]
        if abs(trace) <= 2.0:
            raise EllipticElementFound(f"word {word} has trace {trace}; |tr| <= 2 for a non-identity element")
        length = translation_length(trace, length_scale)
        if len(word) == word_len_max:
            top_layer_min = min(top_layer_min, length)
        if is_proper_power(word) or canonical_word(word, oriented) != word:
            continue
        candidates.append(ClassRecord(word, matrix, trace, length))

    candidates.sort(key=lambda r: (r.length, r.word))
    if not conjugacy_dedupe:
        return candidates, top_layer_min

    pool = ConjugatorPool(letters, math.ceil(word_len_max / 2) + 1)
    classes = _dedupe(candidates, pool, oriented)
    fresh = [c.length for c in classes if len(c.word) == word_len_max]
    if fresh:
        top_layer_min = min(fresh)
    logger.info(
        f"Enumerated {len(candidates)} cyclic words, {len(classes)} primitive classes "
        f"(word length <= {word_len_max}, pool of {len(pool)} conjugators)"
    )
    return classes, top_layer_min


def _dedupe(candidates: List[ClassRecord], pool: ConjugatorPool, oriented: bool) -> List[ClassRecord]:
    tol = settings.TRACE_BUCKET_TOL
    classes: List[ClassRecord] = []
    for cand in candidates:
        # bucket: trailing classes with the same |trace|
        bucket = []
        for index in range(len(classes) - 1, -1, -1):
            if abs(abs(classes[index].trace) - abs(cand.trace)) > tol * max(1.0, abs(cand.trace)):
                break
            bucket.append(index)
        if bucket:
            hit = pool.match(cand.matrix, [classes[i].matrix for i in bucket], oriented)
            if hit is not None:
                index = bucket[hit]
                if len(cand.word) < len(classes[index].word):
                    classes[index] = cand
                continue
        if _is_power_of_shorter(cand, classes, pool):
            continue
        classes.append(cand)
    return classes


def _is_power_of_shorter(cand: ClassRecord, classes: List[ClassRecord], pool: ConjugatorPool) -> bool:
    """Length is k times a shorter class length (k >= 2) and the class of h^k contains cand."""
    tol = settings.TRACE_BUCKET_TOL
    for rep in classes:
        if rep.length > cand.length / 2 * (1 + tol):
            break
        ratio = cand.length / rep.length
        k = round(ratio)
        if k >= 2 and abs(ratio - k) <= tol * ratio:
            if pool.conjugate(cand.matrix, [mat_power(rep.matrix, k)], oriented=False):
                return True
    return False


def fuchsian_enumerate(
    generators: Sequence[Matrix],
    word_len_max: int,
    length_scale: float = 1.0,
    oriented: bool = False,
    growth_const: Optional[float] = None,
    rho: Optional[float] = None,
    T: Optional[float] = None,
    max_words: Optional[int] = None,
) -> LengthSpectrum:
    """
    Primitive length spectrum with multiplicities, complete below l_max.

    l_max is the completeness bound of enumerate_classes; only classes
    strictly shorter are emitted. When no growth_const is given it is
    fitted as max #{l <= x} e^{-2 rho x} (or 1).
    """
    classes, l_max = enumerate_classes(generators, word_len_max, length_scale, oriented, max_words=max_words)
    if not math.isfinite(l_max):
        l_max = classes[-1].length if classes else length_scale
        logger.warning(f"No hyperbolic words of length {word_len_max}; l_max falls back to {l_max}")

    tol = settings.TRACE_BUCKET_TOL
    cutoff = l_max * (1 - tol)
    entries: List[SpectrumEntry] = []
    group_length, group_count = None, 0
    for record in classes:
        if record.length >= cutoff:
            break
        if group_length is not None and abs(record.length - group_length) <= tol * group_length:
            group_count += 1
            continue
        if group_length is not None:
            entries.append(SpectrumEntry(length=group_length, mult=group_count))
        group_length, group_count = record.length, 1
    if group_length is not None:
        entries.append(SpectrumEntry(length=group_length, mult=group_count))

    if growth_const is None:
        growth_const = 1.0
        if rho is not None:
            cumulative = np.cumsum([e.mult for e in entries])
            fitted = [c * math.exp(-2 * rho * e.length) for c, e in zip(cumulative, entries)]
            growth_const = max([1.0] + fitted)

    logger.info(f"Length spectrum: {len(entries)} distinct lengths, l_max={l_max:.6g}")
    return LengthSpectrum(entries=tuple(entries), l_max=l_max, growth_const=growth_const, rho=rho, T=T)


# ------------------ presets ------------------
def octagon_generators() -> List[Matrix]:
    """
    Side pairings of the regular hyperbolic octagon with angles pi/4 (genus 2).

    In SU(1,1) they are [[a, b e^{ik pi/4}], [conj, a]] with a = 1 + sqrt 2,
    b = sqrt(2 + 2 sqrt 2), k = 0..3; mapped to SL(2, R) by the Cayley transform.
    """
    alpha = 1 + math.sqrt(2)
    beta = math.sqrt(2 + 2 * math.sqrt(2))
    matrices = []
    for k in range(4):
        b = beta * complex(math.cos(k * math.pi / 4), math.sin(k * math.pi / 4))
        matrices.append((alpha + b.real, -b.imag, -b.imag, alpha - b.real))
    return matrices


def systole_octagon() -> float:
    return 2 * math.acosh(1 + math.sqrt(2))
