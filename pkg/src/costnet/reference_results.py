"""Externally reported benchmark rows used as metric-arithmetic oracles.

Each row is a published (accuracy, precision, recall, f1, tn, fp, fn, tp)
tuple from prior DGA / email / URL classification studies. Recomputing the
percentage columns from the raw counts must land within rounding distance of
the printed values; two rows whose printed numbers are not arithmetically
consistent with their own counts are flagged so verification sweeps can skip
them.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ReportedRow:
    use_case: str
    model: str
    cost_sensitive: bool
    accuracy: float
    precision: float
    recall: float
    f1: float
    tn: int
    fp: int
    fn: int
    tp: int
    consistent: bool = True  # False: printed values disagree with own counts


REPORTED_ROWS: tuple[ReportedRow, ...] = (
    # DGA domain analysis
    ReportedRow("dga", "naive_bayes", False, 68.1, 99.3, 45.5, 64.4, 12700, 53, 9653, 8037, consistent=False),
    ReportedRow("dga", "decision_tree", False, 79.7, 76.5, 93.8, 84.3, 7654, 5099, 1091, 16599),
    ReportedRow("dga", "adaboost", False, 82.8, 79.2, 95.6, 86.6, 8300, 4453, 770, 16920),
    ReportedRow("dga", "random_forest", False, 84.1, 80.5, 95.8, 87.5, 8651, 4102, 736, 16954),
    ReportedRow("dga", "svm", False, 85.2, 81.7, 96.2, 88.3, 8932, 3821, 680, 17010),
    ReportedRow("dga", "dnn", False, 86.8, 83.7, 96.1, 89.5, 9434, 3319, 688, 17002),
    ReportedRow("dga", "cnn", False, 94.3, 92.1, 98.7, 95.3, 11263, 1490, 233, 17457),
    ReportedRow("dga", "lstm", False, 94.4, 93.0, 97.6, 95.3, 11457, 1296, 421, 17269),
    ReportedRow("dga", "cnn_lstm", False, 95.2, 93.2, 99.0, 96.0, 11478, 1275, 174, 15716, consistent=False),
    ReportedRow("dga", "cnn", True, 95.4, 93.2, 99.5, 96.2, 11464, 1289, 97, 17593),
    ReportedRow("dga", "lstm", True, 95.5, 93.2, 99.6, 96.3, 11470, 1283, 74, 17616),
    ReportedRow("dga", "cnn_lstm", True, 95.6, 93.2, 99.7, 96.3, 11467, 1286, 59, 17631),
    # Email spam analysis
    ReportedRow("email", "naive_bayes", False, 68.8, 99.4, 45.3, 62.2, 8122, 31, 5855, 4851),
    ReportedRow("email", "decision_tree", False, 82.9, 80.0, 95.4, 87.1, 4521, 2527, 487, 10138),
    ReportedRow("email", "adaboost", False, 91.3, 88.6, 97.1, 92.7, 6815, 1338, 310, 10396),
    ReportedRow("email", "random_forest", False, 92.0, 89.9, 96.7, 93.2, 6984, 1169, 349, 10357),
    ReportedRow("email", "svm", False, 92.3, 92.3, 94.4, 93.3, 7304, 849, 599, 10107),
    ReportedRow("email", "dnn", False, 93.0, 90.0, 98.6, 94.1, 6980, 1173, 145, 10561),
    ReportedRow("email", "cnn", False, 93.6, 92.6, 96.4, 94.5, 7326, 827, 382, 10324),
    ReportedRow("email", "lstm", False, 93.7, 91.9, 97.5, 94.6, 7239, 914, 270, 10436),
    ReportedRow("email", "cnn_lstm", False, 94.0, 92.2, 97.6, 94.8, 7270, 883, 253, 10453),
    ReportedRow("email", "cnn", True, 94.2, 92.7, 97.4, 95.0, 7334, 819, 276, 10430),
    ReportedRow("email", "lstm", True, 94.3, 92.7, 97.6, 95.1, 7333, 820, 254, 10452),
    ReportedRow("email", "cnn_lstm", True, 94.7, 92.8, 98.3, 95.5, 7341, 812, 187, 10519),
    # Malicious URL analysis
    ReportedRow("url", "naive_bayes", False, 45.1, 37.9, 98.8, 54.7, 205, 937, 7, 571),
    ReportedRow("url", "decision_tree", False, 81.8, 73.3, 72.1, 72.7, 990, 152, 161, 417),
    ReportedRow("url", "adaboost", False, 87.1, 83.8, 76.3, 79.9, 1057, 85, 137, 441),
    ReportedRow("url", "random_forest", False, 90.0, 90.6, 78.4, 84.0, 1095, 47, 125, 453),
    ReportedRow("url", "svm", False, 81.0, 88.4, 50.0, 63.9, 1104, 38, 289, 289),
    ReportedRow("url", "dnn", False, 90.8, 92.5, 79.1, 85.3, 1105, 37, 121, 457),
    ReportedRow("url", "cnn", False, 92.9, 91.9, 86.5, 89.1, 1098, 44, 78, 500),
    ReportedRow("url", "lstm", False, 93.4, 97.2, 82.7, 89.3, 1128, 14, 100, 478),
    ReportedRow("url", "cnn_lstm", False, 94.4, 96.5, 86.5, 91.2, 1124, 18, 78, 500),
    ReportedRow("url", "cnn", True, 93.4, 96.0, 83.7, 89.5, 1122, 20, 94, 484),
    ReportedRow("url", "lstm", True, 94.5, 93.7, 89.8, 91.7, 1107, 35, 59, 519),
    ReportedRow("url", "cnn_lstm", True, 94.7, 93.1, 91.0, 92.0, 1103, 39, 52, 526),
)
