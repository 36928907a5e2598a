"""Caption baselines computed from scratch: BLEU-4, ROUGE-L, CIDEr.

All three share one tokenizer (lowercase, split on anything that is not a
letter or digit) so scores are stable across platforms.  BLEU is
corpus-level with add-epsilon smoothing on zero counts; ROUGE-L is the
LCS F-measure with beta = 1.2, max over references, averaged over entries;
CIDEr follows the original consensus formulation with the corpus's own
references as the IDF source and the conventional factor of 10.
"""

from __future__ import annotations

import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass

from .errors import CorpusTooSmall

_WORD = re.compile(r"[a-z0-9]+")
_EPS = 1e-9
_ROUGE_BETA = 1.2
_MAX_N = 4
_CIDER_SCALE = 10.0


def tokenize(text: str) -> list[str]:
    """Shared lowercase whitespace/punctuation tokenizer."""
    return _WORD.findall(text.lower())


@dataclass(frozen=True)
class Corpus:
    """Candidate/reference token lists, one entry per evaluated text."""

    entries: tuple[tuple[tuple[str, ...], tuple[tuple[str, ...], ...]], ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("corpus needs at least one entry")
        for _, refs in self.entries:
            if not refs:
                raise ValueError("every entry needs at least one reference")

    @staticmethod
    def from_texts(pairs) -> "Corpus":
        """Build from (candidate text, [reference texts]) pairs."""
        entries = tuple(
            (tuple(tokenize(cand)), tuple(tuple(tokenize(r)) for r in refs))
            for cand, refs in pairs
        )
        return Corpus(entries=entries)


def _ngrams(tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu4(corpus: Corpus) -> float:
    """Corpus-level BLEU with n = 1..4 and brevity penalty.

    Modified precisions pool clipped counts over the whole corpus; the
    effective reference length per entry is the closest to the candidate
    (ties to the shorter).  A zero pooled count is replaced by epsilon.
    """
    matched = [0] * _MAX_N
    attempted = [0] * _MAX_N
    cand_len = 0
    ref_len = 0
    for cand, refs in corpus.entries:
        cand_len += len(cand)
        ref_len += min((abs(len(r) - len(cand)), len(r)) for r in refs)[1]
        for n in range(1, _MAX_N + 1):
            counts = _ngrams(cand, n)
            if not counts:
                continue
            max_ref = Counter()
            for ref in refs:
                for gram, count in _ngrams(ref, n).items():
                    if count > max_ref[gram]:
                        max_ref[gram] = count
            attempted[n - 1] += sum(counts.values())
            matched[n - 1] += sum(min(c, max_ref[g]) for g, c in counts.items())

    if cand_len == 0:
        return 0.0
    log_sum = 0.0
    for n in range(_MAX_N):
        numerator = matched[n] if matched[n] > 0 else _EPS
        denominator = attempted[n] if attempted[n] > 0 else 1
        log_sum += math.log(numerator / denominator)
    brevity = 1.0 if cand_len > ref_len else math.exp(1.0 - ref_len / cand_len)
    return brevity * math.exp(log_sum / _MAX_N)


def _lcs_length(a, b) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        for j, y in enumerate(b, start=1):
            curr.append(prev[j - 1] + 1 if x == y else max(prev[j], curr[j - 1]))
        prev = curr
    return prev[-1]


def rouge_l(candidate, references) -> float:
    """LCS F-measure with beta = 1.2, max over references."""
    if not candidate or not references:
        raise ValueError("rouge_l needs a candidate and at least one reference")
    best = 0.0
    beta_sq = _ROUGE_BETA**2
    for ref in references:
        if not ref:
            continue
        lcs = _lcs_length(candidate, ref)
        if lcs == 0:
            continue
        precision = lcs / len(candidate)
        recall = lcs / len(ref)
        f_score = (1 + beta_sq) * precision * recall / (recall + beta_sq * precision)
        best = max(best, f_score)
    return best


def rouge_l_corpus(corpus: Corpus) -> float:
    """Mean ROUGE-L over entries; empty candidates score 0."""
    scores = [
        rouge_l(cand, refs) if cand else 0.0
        for cand, refs in corpus.entries
    ]
    return sum(scores) / len(scores)


def cider(corpus: Corpus) -> float:
    """Consensus score: averaged TF-IDF n-gram cosines (n = 1..4), scaled by 10.

    Document frequencies count, per n-gram, the entries whose references
    contain it; the corpus must therefore have at least two entries for
    the IDF to be meaningful.
    """
    if len(corpus.entries) < 2:
        raise CorpusTooSmall("cider needs at least 2 entries for the IDF")
    doc_freq: dict[tuple, int] = defaultdict(int)
    for _, refs in corpus.entries:
        seen = set()
        for ref in refs:
            for n in range(1, _MAX_N + 1):
                seen.update(_ngrams(ref, n))
        for gram in seen:
            doc_freq[gram] += 1
    log_entries = math.log(len(corpus.entries))

    def tfidf(tokens) -> tuple[list[dict], list[float]]:
        vectors = [dict() for _ in range(_MAX_N)]
        norms = [0.0] * _MAX_N
        for n in range(1, _MAX_N + 1):
            for gram, term_freq in _ngrams(tokens, n).items():
                weight = term_freq * (log_entries - math.log(max(1.0, doc_freq[gram])))
                vectors[n - 1][gram] = weight
                norms[n - 1] += weight * weight
        return vectors, [math.sqrt(v) for v in norms]

    total = 0.0
    for cand, refs in corpus.entries:
        cand_vec, cand_norm = tfidf(cand)
        entry = 0.0
        for ref in refs:
            ref_vec, ref_norm = tfidf(ref)
            for n in range(_MAX_N):
                if cand_norm[n] == 0.0 or ref_norm[n] == 0.0:
                    continue
                dot = sum(w * ref_vec[n].get(g, 0.0) for g, w in cand_vec[n].items())
                entry += dot / (cand_norm[n] * ref_norm[n])
        total += entry / (_MAX_N * len(refs))
    return _CIDER_SCALE * total / len(corpus.entries)
