"""Binary classification metrics: confusion counts, precision/recall/F1,
ROC AUC (Mann-Whitney, half credit for ties) and PR AUC (average precision).

Degenerate 0/0 ratios are reported as 0.0 with a flag rather than NaN so
report tables stay numeric.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

REPORT_COLUMNS = ["config", "model", "precision", "recall", "f1", "roc_auc", "pr_auc"]


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def n_samples(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(pred, truth) -> Confusion:
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: pred {pred.shape} vs truth {truth.shape}")
    tp = int(np.sum((pred == 1) & (truth == 1)))
    fp = int(np.sum((pred == 1) & (truth == 0)))
    tn = int(np.sum((pred == 0) & (truth == 0)))
    fn = int(np.sum((pred == 0) & (truth == 1)))
    return Confusion(tp=tp, fp=fp, tn=tn, fn=fn)


def precision(conf: Confusion) -> float:
    denom = conf.tp + conf.fp
    return conf.tp / denom if denom else 0.0


def recall(conf: Confusion) -> float:
    denom = conf.tp + conf.fn
    return conf.tp / denom if denom else 0.0


def f1_score(conf: Confusion) -> float:
    p, r = precision(conf), recall(conf)
    return 2.0 * p * r / (p + r) if (p + r) else 0.0


def is_degenerate(conf: Confusion) -> bool:
    """True when any of precision/recall/F1 hit a 0/0 convention.

    All three 0/0 cases reduce to tp == 0: a zero denominator in precision
    or recall forces tp == 0, and f1's denominator vanishes exactly when
    both precision and recall are 0.
    """
    return conf.tp == 0


def roc_auc(scores, truth) -> float:
    """Area under the ROC curve via the rank statistic
    P(score+ > score-) + 0.5 * P(score+ == score-).

    Raises ValueError when truth contains a single class.
    """
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.int64)
    if scores.shape != truth.shape:
        raise ValueError("length mismatch between scores and truth")
    n_pos = int(truth.sum())
    n_neg = len(truth) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC AUC undefined: truth contains a single class")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=np.float64)
    ranks[order] = np.arange(1, len(scores) + 1)
    # average ranks over tied scores
    sorted_scores = scores[order]
    i = 0
    while i < len(sorted_scores):
        j = i
        while j + 1 < len(sorted_scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        if j > i:
            ranks[order[i : j + 1]] = 0.5 * (i + 1 + j + 1)
        i = j + 1
    rank_sum_pos = ranks[truth == 1].sum()
    return float((rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def pr_auc(scores, truth) -> float:
    """Average precision: sum over descending-score thresholds of
    (R_k - R_{k-1}) * P_k, one threshold per distinct score.

    Raises ValueError when truth contains no positives.
    """
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.int64)
    if scores.shape != truth.shape:
        raise ValueError("length mismatch between scores and truth")
    n_pos = int(truth.sum())
    if n_pos == 0:
        raise ValueError("PR AUC undefined: no positive samples")
    order = np.argsort(-scores, kind="mergesort")
    s = scores[order]
    y = truth[order]
    tp = np.cumsum(y)
    pred_pos = np.arange(1, len(y) + 1)
    # threshold cut-points: last position of each distinct score value
    last = np.nonzero(np.diff(s) != 0)[0]
    cuts = np.concatenate([last, [len(s) - 1]])
    prec_k = tp[cuts] / pred_pos[cuts]
    rec_k = tp[cuts] / n_pos
    rec_prev = np.concatenate([[0.0], rec_k[:-1]])
    return float(np.sum((rec_k - rec_prev) * prec_k))


@dataclass
class EvalReport:
    """Metrics for one (feature config, model) cell."""

    config_tag: str
    model_kind: str
    confusion: Confusion
    precision: float
    recall: float
    f1: float
    roc_auc: float
    pr_auc: float
    degenerate: bool = False

    def row(self) -> list[str]:
        return [
            self.config_tag,
            self.model_kind,
            repr(self.precision),
            repr(self.recall),
            repr(self.f1),
            repr(self.roc_auc),
            repr(self.pr_auc),
        ]


def evaluate(scores, truth, threshold: float = 0.5, config_tag: str = "", model_kind: str = "") -> EvalReport:
    """Full report from positive-class scores and true labels."""
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.int64)
    pred = (scores >= threshold).astype(np.int64)
    conf = confusion(pred, truth)
    return EvalReport(
        config_tag=config_tag,
        model_kind=model_kind,
        confusion=conf,
        precision=precision(conf),
        recall=recall(conf),
        f1=f1_score(conf),
        roc_auc=roc_auc(scores, truth),
        pr_auc=pr_auc(scores, truth),
        degenerate=is_degenerate(conf),
    )


def error_row(config_tag: str, model_kind: str) -> list[str]:
    """Report row for a cell that could not be evaluated (metrics empty)."""
    return [config_tag, model_kind, "", "", "", "", ""]


def write_report_csv(path: str, rows) -> None:
    """Report CSV: rows are written in the given order (config order)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for row in rows:
            writer.writerow(row.row() if isinstance(row, EvalReport) else row)


def read_report_csv(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != REPORT_COLUMNS:
            raise ValueError(f"unexpected report columns: {reader.fieldnames}")
        return list(reader)
