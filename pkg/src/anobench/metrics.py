"""Threshold policies and imbalance-aware metrics for anomaly scores.

Scores follow one canonical orientation: higher means more anomalous.
Flagging is strict, ``score > tau``, so the percentile policy flags exactly
the top fraction of distinct scores.  AUPR is computed as step-wise average
precision (no trapezoidal interpolation); AUROC uses the tie-corrected
midrank statistic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DataError

log = logging.getLogger(__name__)

ORIENTATION_HIGH = "high_is_anomalous"
ORIENTATION_LOW = "low_is_anomalous"

POLICY_PERCENTILE = "percentile"
POLICY_OPTIMAL_F1 = "optimal_f1"
POLICY_FIXED = "fixed"

MINORITY = "minority"
MAJORITY = "majority"


@dataclass(frozen=True)
class ScoreSet:
    """Anomaly scores over a test set, aligned with binary labels.

    Labels use 1 for the anomaly (minority) class.  NaN or infinite scores
    are rejected: every downstream consumer assumes finite, orientable
    values.
    """

    scores: np.ndarray
    labels: np.ndarray
    detector_name: str = ""
    orientation_flipped: bool = False

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        labels = np.asarray(self.labels)
        if scores.ndim != 1 or labels.ndim != 1:
            raise ValueError("scores and labels must be 1-D")
        if len(scores) != len(labels):
            raise ValueError(
                f"scores ({len(scores)}) and labels ({len(labels)}) differ in length"
            )
        if len(scores) == 0:
            raise ValueError("empty score set")
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores contain NaN or infinite values")
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be binary (0/1)")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels.astype(np.uint8))

    def __len__(self) -> int:
        return len(self.scores)

    @property
    def n_pos(self) -> int:
        return int(self.labels.sum())

    @property
    def n_neg(self) -> int:
        return len(self.labels) - self.n_pos

    @property
    def rho(self) -> float:
        """Positive (anomaly) ratio of this set."""
        return self.n_pos / len(self.labels)

    def require_both_classes(self):
        if self.n_pos == 0 or self.n_neg == 0:
            raise ValueError(
                f"need both classes, got {self.n_pos} positives / {self.n_neg} negatives"
            )


@dataclass(frozen=True)
class Threshold:
    value: float
    policy: str = POLICY_FIXED
    percentile_level: float | None = None

    def __post_init__(self):
        if self.policy == POLICY_PERCENTILE and self.percentile_level is None:
            raise ValueError("percentile policy requires percentile_level")


@dataclass
class MetricsReport:
    precision: float
    recall: float
    f1: float
    threshold: Threshold
    positive_class: str
    confusion: tuple[int, int, int, int]  # (TP, FP, TN, FN)
    auroc: float | None = None
    aupr: float | None = None

    def as_dict(self) -> dict:
        d = {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "auroc": self.auroc,
            "aupr": self.aupr,
            "threshold": self.threshold.value,
            "threshold_policy": self.threshold.policy,
            "positive_class": self.positive_class,
            "tp": self.confusion[0],
            "fp": self.confusion[1],
            "tn": self.confusion[2],
            "fn": self.confusion[3],
        }
        if self.threshold.percentile_level is not None:
            d["percentile_level"] = self.threshold.percentile_level
        return d


def flag(scores: np.ndarray, tau: float) -> np.ndarray:
    """Predicted-anomaly mask under the strict flag rule."""
    return np.asarray(scores, dtype=np.float64) > tau


def percentile_threshold(scoreset: ScoreSet, rho: float) -> Threshold:
    """Nearest-rank (1 - rho) percentile of the scores.

    tau is the k-th smallest score with k = ceil((1 - rho) * n); under
    distinct scores this flags exactly the top rho fraction.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must be in (0, 1), got {rho}")
    s = scoreset.scores
    level = 1.0 - rho
    k = int(np.ceil(level * len(s)))
    k = min(max(k, 1), len(s))
    tau = float(np.partition(s, k - 1)[k - 1])
    return Threshold(value=tau, policy=POLICY_PERCENTILE, percentile_level=level)


def optimal_threshold(scoreset: ScoreSet) -> Threshold:
    """Threshold maximizing F1 (positive = minority) by exhaustive search.

    Candidates are midpoints between consecutive distinct sorted scores plus
    -inf and +inf, so the strict flag rule is unambiguous.  Ties prefer
    higher precision, then smaller tau.
    """
    scoreset.require_both_classes()
    s, y = scoreset.scores, scoreset.labels
    n_pos = scoreset.n_pos

    order = np.argsort(-s, kind="stable")
    s_desc = s[order]
    y_desc = y[order]

    # Ends of blocks of equal score in the descending order.
    block_end = np.flatnonzero(np.append(s_desc[:-1] != s_desc[1:], True))
    tp = np.cumsum(y_desc)[block_end].astype(np.float64)
    m = (block_end + 1).astype(np.float64)  # predicted positives per candidate

    # Candidate after block b flags everything strictly above the midpoint
    # between this block's score and the next distinct one; flagging all
    # points corresponds to tau = -inf.
    distinct_desc = s_desc[block_end]
    taus = np.empty(len(block_end))
    taus[:-1] = (distinct_desc[:-1] + distinct_desc[1:]) / 2.0
    taus[-1] = -np.inf

    # Prepend the flag-nothing candidate.
    taus = np.concatenate(([np.inf], taus))
    tp = np.concatenate(([0.0], tp))
    m = np.concatenate(([0.0], m))

    with np.errstate(invalid="ignore", divide="ignore"):
        f1 = np.where(tp > 0, 2.0 * tp / (m + n_pos), 0.0)
        precision = np.where(m > 0, tp / np.maximum(m, 1.0), 0.0)

    best = np.flatnonzero(f1 == f1.max())
    best = best[precision[best] == precision[best].max()]
    idx = best[np.argmin(taus[best])]
    return Threshold(value=float(taus[idx]), policy=POLICY_OPTIMAL_F1)


def _confusion(pred: np.ndarray, truth: np.ndarray) -> tuple[int, int, int, int]:
    tp = int(np.sum(pred & (truth == 1)))
    fp = int(np.sum(pred & (truth == 0)))
    fn = int(np.sum(~pred & (truth == 1)))
    tn = int(np.sum(~pred & (truth == 0)))
    return tp, fp, tn, fn


def prf1(
    scoreset: ScoreSet, threshold: Threshold, positive_class: str = MINORITY
) -> MetricsReport:
    """Precision/recall/F1 under an explicit class of interest.

    With positive=majority both the prediction and the label polarity invert:
    the positive class becomes "normal" and a sample is predicted positive
    when it is not flagged.  Zero-denominator precision/recall are 0.
    """
    if positive_class not in (MINORITY, MAJORITY):
        raise ValueError(f"unknown positive_class {positive_class!r}")
    pred = flag(scoreset.scores, threshold.value)
    truth = scoreset.labels
    if positive_class == MAJORITY:
        pred = ~pred
        truth = 1 - truth
    tp, fp, tn, fn = _confusion(pred, truth)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricsReport(
        precision=precision,
        recall=recall,
        f1=f1,
        threshold=threshold,
        positive_class=positive_class,
        confusion=(tp, fp, tn, fn),
    )


def _midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the average rank of their block."""
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def auroc(scoreset: ScoreSet) -> float:
    """Tie-corrected AUROC: P(score_anomaly > score_normal) + 0.5 P(equal)."""
    scoreset.require_both_classes()
    ranks = _midranks(scoreset.scores)
    n_pos, n_neg = scoreset.n_pos, scoreset.n_neg
    pos_rank_sum = float(ranks[scoreset.labels == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def _pr_blocks(scoreset: ScoreSet):
    """Cumulative (tp, predicted) at the end of each descending tie block."""
    s, y = scoreset.scores, scoreset.labels
    order = np.argsort(-s, kind="stable")
    y_desc = y[order]
    s_desc = s[order]
    block_end = np.flatnonzero(np.append(s_desc[:-1] != s_desc[1:], True))
    tp = np.cumsum(y_desc)[block_end].astype(np.float64)
    m = (block_end + 1).astype(np.float64)
    return tp, m


def aupr(scoreset: ScoreSet) -> float:
    """Average precision over the descending sweep, tie blocks as units."""
    scoreset.require_both_classes()
    tp, m = _pr_blocks(scoreset)
    precision = tp / m
    recall = tp / scoreset.n_pos
    delta_r = np.diff(np.concatenate(([0.0], recall)))
    return float(np.sum(delta_r * precision))


def pr_curve(scoreset: ScoreSet) -> tuple[np.ndarray, np.ndarray]:
    """(recall, precision) sweep points, anchored at (0, 1) for plotting."""
    scoreset.require_both_classes()
    tp, m = _pr_blocks(scoreset)
    recall = np.concatenate(([0.0], tp / scoreset.n_pos))
    precision = np.concatenate(([1.0], tp / m))
    return recall, precision


def roc_curve(scoreset: ScoreSet) -> tuple[np.ndarray, np.ndarray]:
    """(fpr, tpr) sweep points from (0, 0) to (1, 1)."""
    scoreset.require_both_classes()
    tp, m = _pr_blocks(scoreset)
    fp = m - tp
    fpr = np.concatenate(([0.0], fp / scoreset.n_neg))
    tpr = np.concatenate(([0.0], tp / scoreset.n_pos))
    return fpr, tpr


def average_precision_from_curve(recall: np.ndarray, precision: np.ndarray) -> float:
    """AP rule applied to pr_curve output; reproduces aupr exactly."""
    return float(np.sum(np.diff(recall) * precision[1:]))


def resolve_threshold(scoreset: ScoreSet, policy: str, rho: float | None = None) -> Threshold:
    """Build a Threshold for a named policy (percentile uses the test rho)."""
    if policy == POLICY_PERCENTILE:
        return percentile_threshold(scoreset, scoreset.rho if rho is None else rho)
    if policy == POLICY_OPTIMAL_F1:
        return optimal_threshold(scoreset)
    raise ValueError(f"unknown threshold policy {policy!r}")


def evaluate(
    scoreset: ScoreSet,
    policy: str = POLICY_OPTIMAL_F1,
    positive_class: str = MINORITY,
    rho: float | None = None,
) -> MetricsReport:
    """Full per-run report: threshold policy + PRF1 + AUROC + AUPR."""
    threshold = resolve_threshold(scoreset, policy, rho)
    report = prf1(scoreset, threshold, positive_class)
    report.auroc = auroc(scoreset)
    report.aupr = aupr(scoreset)
    return report


# ---------------------------------------------------------------------------
# Score-file wire format: CSV `index,score,label` with an orientation comment.
# ---------------------------------------------------------------------------

SCORE_FILE_HEADER = "index,score,label"


def write_score_file(
    path,
    indices: np.ndarray,
    scores: np.ndarray,
    labels: np.ndarray,
    orientation: str = ORIENTATION_HIGH,
    detector_name: str = "",
) -> None:
    if orientation not in (ORIENTATION_HIGH, ORIENTATION_LOW):
        raise ValueError(f"unknown orientation {orientation!r}")
    if not (len(indices) == len(scores) == len(labels)):
        raise ValueError("indices, scores and labels must have equal length")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# orientation: {orientation}\n")
        if detector_name:
            fh.write(f"# detector: {detector_name}\n")
        fh.write(SCORE_FILE_HEADER + "\n")
        for i, s, y in zip(indices, scores, labels):
            fh.write(f"{int(i)},{float(s):.17g},{int(y)}\n")


def read_score_file(path) -> tuple[np.ndarray, ScoreSet]:
    """Parse a score file, normalizing orientation to high-is-anomalous.

    Returns (indices, ScoreSet); the ScoreSet records whether the scores
    were flipped at ingest.
    """
    orientation = None
    detector_name = ""
    rows = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open score file {path}: {exc}") from exc
    with fh:
        header_seen = False
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if ":" in body:
                    key, value = (part.strip() for part in body.split(":", 1))
                    if key == "orientation":
                        orientation = value
                    elif key == "detector":
                        detector_name = value
                continue
            if not header_seen:
                if line != SCORE_FILE_HEADER:
                    raise DataError(
                        f"{path}:{lineno}: expected header {SCORE_FILE_HEADER!r}, got {line!r}"
                    )
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
            try:
                idx, score, label = int(parts[0]), float(parts[1]), int(parts[2])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            if not np.isfinite(score):
                raise DataError(f"{path}:{lineno}: non-finite score {parts[1]!r}")
            if label not in (0, 1):
                raise DataError(f"{path}:{lineno}: label must be 0 or 1, got {label}")
            rows.append((idx, score, label))
    if orientation is None:
        raise DataError(f"{path}: missing '# orientation:' declaration")
    if orientation not in (ORIENTATION_HIGH, ORIENTATION_LOW):
        raise DataError(f"{path}: unknown orientation {orientation!r}")
    if not rows:
        raise DataError(f"{path}: no score rows")
    indices = np.array([r[0] for r in rows], dtype=np.int64)
    scores = np.array([r[1] for r in rows], dtype=np.float64)
    labels = np.array([r[2] for r in rows], dtype=np.uint8)
    flipped = orientation == ORIENTATION_LOW
    if flipped:
        scores = -scores
    try:
        scoreset = ScoreSet(scores, labels, detector_name, orientation_flipped=flipped)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
    return indices, scoreset
