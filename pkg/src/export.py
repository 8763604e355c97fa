"""
File formats: matrices, trajectories, histograms, class tables,
permutations, design grids, AME coefficients and run configs.
"""

import csv
import json
import logging
import sys
from pathlib import Path
from typing import Iterable, Optional, TextIO, Union

import numpy as np

from .cartan import CartanPoint
from .config import Settings
from .designs import DesignTable, PermutationGate, ame_coefficients, format_design_grid
from .equivalence import ClassTable, EntanglementHistogram, Measure
from .errors import DimensionError
from .maps import Trajectory

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

TRAJECTORY_HEADER = ['iter', 'dual_defect', 't_dual_defect', 'ep']
CARTAN_HEADER = ['n', 'c1', 'c2', 'c3']
HISTOGRAM_HEADER = ['bin_left', 'bin_right', 'count']
CLASS_TABLE_HEADER = ['ep', 'gt', 'representative', 'count']


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# Matrices

def format_matrix(M: np.ndarray) -> str:
    """'n_rows n_cols' then one line per row of 're,im' entries (17 significant digits)."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {M.shape}", 'write_matrix')
    lines = [f"{M.shape[0]} {M.shape[1]}"]
    for row in M:
        lines.append(' '.join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
    return '\n'.join(lines) + '\n'


def parse_matrix(text: str) -> np.ndarray:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise DimensionError("empty matrix file", 'read_matrix')
    try:
        n_rows, n_cols = (int(v) for v in lines[0].split())
        rows = []
        for line in lines[1:1 + n_rows]:
            entries = [complex(float(re), float(im)) for re, im in (tok.split(',') for tok in line.split())]
            rows.append(entries)
    except ValueError as e:
        raise DimensionError(f"malformed matrix file: {e}", 'read_matrix') from e
    M = np.array(rows, dtype=complex)
    if M.shape != (n_rows, n_cols):
        raise DimensionError(f"header says {n_rows}x{n_cols}, body is {M.shape}", 'read_matrix')
    if not np.all(np.isfinite(M)):
        raise DimensionError("matrix has non-finite entries", 'read_matrix')
    return M


def write_matrix(M: np.ndarray, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_matrix(M), encoding='utf-8')
    logger.debug("wrote matrix %s", path)
    return path


def read_matrix(path: PathLike, stdin: Optional[TextIO] = None) -> np.ndarray:
    """Read a matrix file; '-' reads standard input."""
    if str(path) == '-':
        return parse_matrix((stdin or sys.stdin).read())
    return parse_matrix(Path(path).read_text(encoding='utf-8'))


# ---------------------------------------------------------------------------
# Trajectories

def write_trajectory_csv(traj: Trajectory, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(TRAJECTORY_HEADER)
        for record in traj.steps:
            writer.writerow([record.iteration, _fmt(record.dual_defect), _fmt(record.t_dual_defect), _fmt(record.ep)])
    return path


def write_cartan_csv(points: Iterable[CartanPoint], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(CARTAN_HEADER)
        for n, p in enumerate(points):
            writer.writerow([n, _fmt(p.c1), _fmt(p.c2), _fmt(p.c3)])
    return path


def read_cartan_csv(path: PathLike) -> list[CartanPoint]:
    with open(path, newline='', encoding='utf-8') as f:
        return [CartanPoint(float(r['c1']), float(r['c2']), float(r['c3'])) for r in csv.DictReader(f)]


# ---------------------------------------------------------------------------
# Histograms

def _sidecar(path: Path) -> Path:
    return path.with_suffix('.json')


def write_histogram(hist: EntanglementHistogram, path: PathLike, bins: int = 100,
                    extra: Optional[dict] = None) -> Path:
    """
    Binned CSV plus a JSON sidecar holding the metadata and the sorted
    sample values, so a later comparison runs on the exact samples.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    edges, counts = hist.histogram(bins)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(HISTOGRAM_HEADER)
        for left, right, count in zip(edges[:-1], edges[1:], counts):
            writer.writerow([_fmt(left), _fmt(right), int(count)])

    meta = {
        'measure': hist.measure.value,
        'd': hist.d,
        'N': hist.samples,
        'seed': hist.seed,
        'mean': hist.mean,
        'label': hist.label,
        'sorted_values': hist.sorted_values.tolist(),
    }
    if extra:
        meta.update(extra)
    with open(_sidecar(path), 'w', encoding='utf-8') as f:
        json.dump(meta, f, indent=2, sort_keys=True)
    logger.info("wrote histogram %s (%d samples)", path, hist.samples)
    return path


def read_histogram(path: PathLike) -> EntanglementHistogram:
    """Load a histogram from its JSON sidecar (path may name either file)."""
    path = Path(path)
    sidecar = path if path.suffix == '.json' else _sidecar(path)
    with open(sidecar, 'r', encoding='utf-8') as f:
        meta = json.load(f)
    return EntanglementHistogram(
        measure=Measure.parse(meta['measure']),
        d=int(meta['d']),
        sorted_values=np.sort(np.asarray(meta['sorted_values'], dtype=float)),
        seed=meta.get('seed'),
        label=meta.get('label', ''),
    )


# ---------------------------------------------------------------------------
# Class tables, permutations and designs

def write_class_table(table: ClassTable, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(CLASS_TABLE_HEADER)
        for row in table.rows:
            writer.writerow([_fmt(row.ep), _fmt(row.gt), str(row.representative), row.member_count])
    return path


def format_class_table(table: ClassTable) -> str:
    kind = 'exact' if table.exhaustive else 'lower bound'
    lines = [f"d={table.d}: {len(table.rows)} entangling classes ({kind}, {table.scanned} scanned)",
             f"{'ep':>10} {'gt':>10} {'count':>10}  representative"]
    for row in table.rows:
        lines.append(f"{row.ep:>10.6f} {row.gt:>10.6f} {row.member_count:>10}  {row.representative}")
    return '\n'.join(lines)


def format_permutation(P: PermutationGate) -> str:
    return ' '.join(str(v) for v in P.pi) + '\n'


def write_permutation(P: PermutationGate, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_permutation(P), encoding='utf-8')
    return path


def read_permutation(path: PathLike) -> PermutationGate:
    """Single line of d² one-based images."""
    text = Path(path).read_text(encoding='utf-8')
    try:
        values = [int(v) for v in text.replace(',', ' ').replace('{', ' ').replace('}', ' ').split()]
    except ValueError as e:
        raise DimensionError(f"malformed permutation file: {e}", 'read_permutation') from e
    return PermutationGate.from_compact(values)


def write_design_grids(K: DesignTable, L: DesignTable, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = '\n'.join(['K', format_design_grid(K), '', 'L', format_design_grid(L), '',
                      'K|L', format_design_grid(K, L)])
    path.write_text(body + '\n', encoding='utf-8')
    return path


def write_ame_coefficients(U: np.ndarray, path: PathLike, tol: float = 1e-14) -> Path:
    """Nonzero AME tensor entries as 'i j k l re im' lines."""
    T = ame_coefficients(U)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        for index in zip(*np.nonzero(np.abs(T) > tol)):
            z = complex(T[index])
            f.write(' '.join(str(int(v)) for v in index) + f" {z.real:.17g} {z.imag:.17g}\n")
    return path


# ---------------------------------------------------------------------------
# Run configs

def write_run_config(settings: Settings, command: str, params: dict, path: PathLike) -> Path:
    """run_config.json: settings plus the command and its parameters."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {'command': command, 'params': params, 'settings': settings.to_dict()}
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(payload, f, indent=2, sort_keys=True, default=str)
    return path


def read_run_config(path: PathLike) -> dict:
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)
