"""
Result writers
CSV result tables, JSON summaries and Phi reports.
Numbers are written with 17 significant digits so reruns compare byte for byte.
"""

import csv
import json
import logging
import os

from utils.helpers import format_number

logger = logging.getLogger(__name__)


def result_header(n_classes):
    """Column names of a trajectory result table."""
    return ['trajectory_id', 'time'] + [f'weight_{c}' for c in range(n_classes)] + ['B', 'outcome']


def result_rows(records):
    """Yield one row per (trajectory, recorded time), ordered by trajectory index."""
    for index, record in enumerate(records):
        trajectory_id = record.trajectory_id if record.trajectory_id is not None else index
        for t, weights, b in zip(record.times, record.class_weights, record.noise):
            yield [trajectory_id, float(t)] + [float(w) for w in weights] + [float(b), record.outcome]


def _ensure_directory(path):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)


def summary_path(csv_path):
    return f"{csv_path}.summary.json"


def write_results(path, records, summary):
    """
    Write the CSV result table and its JSON summary

    Args:
        path: CSV output path
        records: trajectory records in index order
        summary: dict of summary statistics

    Returns:
        tuple: (csv_path, summary_path, row_count)
    """
    _ensure_directory(path)
    n_classes = records[0].n_classes
    header = result_header(n_classes)
    row_count = 0
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        for row in result_rows(records):
            writer.writerow([format_number(v) for v in row])
            row_count += 1

    json_path = summary_path(path)
    write_summary(json_path, summary)
    logger.info("[WRITER] %d rows -> %s", row_count, path)
    return path, json_path, row_count


def write_summary(path, summary):
    _ensure_directory(path)
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(summary, handle, sort_keys=True, indent=2)
        handle.write('\n')


def read_results(path):
    """Read a result table back as (header, rows of floats)."""
    with open(path, 'r', newline='', encoding='utf-8') as handle:
        reader = csv.reader(handle)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    return header, rows


def recompute_summary(path):
    """Outcome counts and empirical probabilities recomputed from a result table."""
    header, rows = read_results(path)
    n_classes = sum(1 for name in header if name.startswith('weight_'))
    outcome_by_trajectory = {}
    for row in rows:
        outcome_by_trajectory[int(row[0])] = int(row[-1])
    counts = [0] * n_classes
    for outcome in outcome_by_trajectory.values():
        counts[outcome] += 1
    n = len(outcome_by_trajectory)
    return {
        'n_trajectories': n,
        'counts': counts,
        'empirical_probabilities': [c / n for c in counts],
    }


PHI_HEADER = ['grain', 'admissible', 'bipartition', 'phi']


def phi_report_rows(rows, result):
    """Per-grain rows followed by the Phi^Max row."""
    table = [[str(r.grain), 'yes' if r.admissible else 'no', str(r.bipartition), format_number(r.phi)]
             for r in rows]
    table.append(['phi_max',
                  str(result.maximizing_grain) if result.maximizing_grain else '',
                  str(result.minimizing_bipartition) if result.minimizing_bipartition else '',
                  format_number(result.phi)])
    return table


def write_phi_report(path, rows, result):
    _ensure_directory(path)
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(PHI_HEADER)
        writer.writerows(phi_report_rows(rows, result))
    return path
