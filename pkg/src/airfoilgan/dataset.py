"""Class labels, class assignment from performance records, and CSV I/O."""
import csv
import logging
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import ParseError, SchemaError, UnknownAirfoilError
from .geometry import N_COORDS, check_canonical, thickness

log = logging.getLogger(__name__)

DATASET_FORMAT = "airfoilgan-dataset"
DATASET_VERSION = 1
Y_COLUMNS = [f"y{i}" for i in range(1, N_COORDS + 1)]
RECORD_COLUMNS = ["airfoil_id", "Re", "M", "alpha", "cl", "cd"]
LABEL_DIM = 6


@dataclass(frozen=True, order=True)
class ClassLabel:
    """Low/high bits for (cl/cd, angle of attack, thickness)."""

    perf_high: int
    alpha_high: int
    thick_high: int

    def __post_init__(self):
        for b in (self.perf_high, self.alpha_high, self.thick_high):
            if b not in (0, 1):
                raise ValueError(f"class bits must be 0 or 1, got {b!r}")

    @classmethod
    def from_code(cls, code):
        code = str(code).strip()
        if len(code) != 3 or any(c not in "01" for c in code):
            raise ValueError(f"class must be a 3-bit string such as '011', got {code!r}")
        return cls(*(int(c) for c in code))

    @property
    def code(self):
        return f"{self.perf_high}{self.alpha_high}{self.thick_high}"

    @property
    def bits(self):
        return (self.perf_high, self.alpha_high, self.thick_high)

    def __str__(self):
        return self.code


ALL_CLASSES = tuple(ClassLabel(*bits) for bits in product((0, 1), repeat=3))


def encode_label(c):
    """Paired one-hot: bit 0 -> (1, 0), bit 1 -> (0, 1)."""
    if isinstance(c, str):
        c = ClassLabel.from_code(c)
    v = np.zeros(LABEL_DIM)
    for k, b in enumerate(c.bits):
        v[2 * k + b] = 1.0
    return v


def decode_label(v):
    v = np.asarray(v, dtype=np.float64).reshape(3, 2)
    return ClassLabel(*(int(np.argmax(pair)) for pair in v))


@dataclass(frozen=True)
class Thresholds:
    clcd: float = 100.0
    alpha: float = 10.0
    tau: float = 0.12


@dataclass(frozen=True)
class PerformanceRecord:
    airfoil_id: str
    Re: float
    M: float
    alpha: float
    cl: float
    cd: float


@dataclass(eq=False)
class LabeledDataset:
    ids: list
    labels: list
    y: np.ndarray
    thresholds: Thresholds = field(default_factory=Thresholds)
    skipped_records: int = 0

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.float64).reshape(-1, N_COORDS)
        if not (len(self.ids) == len(self.labels) == len(self.y)):
            raise ValueError("ids, labels and y rows differ in length")

    def __len__(self):
        return len(self.ids)

    def __eq__(self, other):
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return (
            self.ids == other.ids
            and self.labels == other.labels
            and self.thresholds == other.thresholds
            and np.array_equal(self.y, other.y)
        )

    def label_matrix(self):
        if not self.labels:
            return np.zeros((0, LABEL_DIM))
        return np.stack([encode_label(c) for c in self.labels])

    def class_counts(self):
        counts = {c.code: 0 for c in ALL_CLASSES}
        for c in self.labels:
            counts[c.code] += 1
        return counts

    def subset(self, label):
        idx = [i for i, c in enumerate(self.labels) if c == label]
        return self.y[idx]


def classify(clcd, alpha, tau, thresholds=Thresholds()):
    """Strict ``>`` means high; a value equal to its threshold is low."""
    return ClassLabel(int(clcd > thresholds.clcd), int(alpha > thresholds.alpha), int(tau > thresholds.tau))


def assign_classes(airfoils, records, thresholds=Thresholds()):
    """Place each airfoil in every class one of its records attains.

    ``airfoils`` is a sequence of ``(airfoil_id, canonical_y)`` pairs.
    An airfoil appears at most once per class. Records with ``cd == 0``
    are skipped; their count is stored in ``skipped_records``.
    """
    shapes = {}
    for aid, y in airfoils:
        shapes[aid] = check_canonical(y)
    taus = {aid: float(thickness(y)) for aid, y in shapes.items()}

    attained = {aid: set() for aid in shapes}
    skipped = 0
    for rec in records:
        if rec.airfoil_id not in shapes:
            raise UnknownAirfoilError(f"record refers to unknown airfoil {rec.airfoil_id!r}")
        if rec.cd == 0:
            skipped += 1
            continue
        attained[rec.airfoil_id].add(classify(rec.cl / rec.cd, rec.alpha, taus[rec.airfoil_id], thresholds))
    if skipped:
        log.warning("skipped %d record(s) with cd == 0", skipped)

    ids, labels, rows = [], [], []
    for aid in shapes:
        for label in sorted(attained[aid]):
            ids.append(aid)
            labels.append(label)
            rows.append(shapes[aid])
    y = np.array(rows) if rows else np.zeros((0, N_COORDS))
    return LabeledDataset(ids, labels, y, thresholds, skipped)


def _fmt(v):
    return repr(float(v))


def _header_line(thresholds):
    return (
        f"# {DATASET_FORMAT} v{DATASET_VERSION} "
        f"clcd_threshold={_fmt(thresholds.clcd)} alpha_threshold={_fmt(thresholds.alpha)} "
        f"tau_threshold={_fmt(thresholds.tau)}\n"
    )


def save_dataset(d, path):
    with open(path, "w", newline="") as fh:
        fh.write(_header_line(d.thresholds))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["airfoil_id", "class", *Y_COLUMNS])
        for aid, label, y in zip(d.ids, d.labels, d.y):
            w.writerow([aid, label.code, *(_fmt(v) for v in y)])


def _parse_version_line(line):
    parts = line.lstrip("#").split()
    if not parts or parts[0] != DATASET_FORMAT:
        raise SchemaError(f"unrecognised dataset preamble {line.strip()!r}")
    if len(parts) < 2 or parts[1] != f"v{DATASET_VERSION}":
        found = parts[1] if len(parts) > 1 else "none"
        raise SchemaError(f"dataset version {found} not supported, expected v{DATASET_VERSION}")
    kv = dict(p.split("=", 1) for p in parts[2:] if "=" in p)
    try:
        return Thresholds(
            float(kv.get("clcd_threshold", 100.0)),
            float(kv.get("alpha_threshold", 10.0)),
            float(kv.get("tau_threshold", 0.12)),
        )
    except ValueError:
        raise SchemaError(f"bad threshold in preamble {line.strip()!r}") from None


def _check_y_header(header, lead, path):
    ycols = header[len(lead):]
    if header[: len(lead)] != lead or ycols != Y_COLUMNS:
        raise SchemaError(
            f"{path}: expected columns {','.join(lead)},y1..y{N_COORDS} "
            f"({N_COORDS} y-columns), found {len(ycols)} y-columns: {','.join(header)}"
        )


def _float_row(cells, lineno):
    try:
        return [float(c) for c in cells]
    except ValueError:
        raise ParseError(f"malformed number in row {cells!r}", lineno) from None


def load_dataset(path):
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    thresholds = Thresholds()
    start = 0
    if lines and lines[0].startswith("#"):
        thresholds = _parse_version_line(lines[0])
        start = 1
    reader = csv.reader(lines[start:])
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(f"{path}: missing header row") from None
    lead = ["airfoil_id", "class"]
    _check_y_header(header, lead, path)
    ids, labels, rows = [], [], []
    for offset, row in enumerate(reader, start=start + 2):
        if not row:
            continue
        if len(row) != len(header):
            raise SchemaError(f"{path}: line {offset} has {len(row)} fields, expected {len(header)}")
        try:
            label = ClassLabel.from_code(row[1])
        except ValueError as exc:
            raise ParseError(str(exc), offset) from None
        ids.append(row[0])
        labels.append(label)
        rows.append(_float_row(row[2:], offset))
    y = np.array(rows) if rows else np.zeros((0, N_COORDS))
    return LabeledDataset(ids, labels, y, thresholds)


def save_canonical(ids, y, path):
    """Unlabelled canonical airfoils: ``airfoil_id,y1..y38``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["airfoil_id", *Y_COLUMNS])
        for aid, row in zip(ids, np.atleast_2d(y)):
            w.writerow([aid, *(_fmt(v) for v in row)])


def load_canonical(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        _check_y_header(header, ["airfoil_id"], path)
        ids, rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise SchemaError(f"{path}: line {lineno} has {len(row)} fields, expected {len(header)}")
            ids.append(row[0])
            rows.append(_float_row(row[1:], lineno))
    return ids, (np.array(rows) if rows else np.zeros((0, N_COORDS)))


def save_samples(label, y, path):
    """Generated curves for one class: ``class,y1..y38``."""
    code = label.code if isinstance(label, ClassLabel) else ClassLabel.from_code(label).code
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["class", *Y_COLUMNS])
        for row in np.atleast_2d(y):
            w.writerow([code, *(_fmt(v) for v in row)])


def load_samples(path):
    """Returns ``(ClassLabel or None, (N, 38) array)``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        _check_y_header(header, ["class"], path)
        codes, rows = set(), []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise SchemaError(f"{path}: line {lineno} has {len(row)} fields, expected {len(header)}")
            try:
                codes.add(ClassLabel.from_code(row[0]))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            rows.append(_float_row(row[1:], lineno))
    if len(codes) > 1:
        raise SchemaError(f"{path}: mixes classes {sorted(c.code for c in codes)}")
    label = codes.pop() if codes else None
    return label, (np.array(rows) if rows else np.zeros((0, N_COORDS)))


def load_records(path):
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RECORD_COLUMNS:
            raise SchemaError(f"{path}: expected header {','.join(RECORD_COLUMNS)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(RECORD_COLUMNS):
                raise SchemaError(f"{path}: line {lineno} has {len(row)} fields, expected 6")
            out.append(PerformanceRecord(row[0], *_float_row(row[1:], lineno)))
    return out


def save_records(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_COLUMNS)
        for r in records:
            w.writerow([r.airfoil_id, _fmt(r.Re), _fmt(r.M), _fmt(r.alpha), _fmt(r.cl), _fmt(r.cd)])
