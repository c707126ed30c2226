"""Text formats: edge lists, PACE-2017 tree decompositions, CSV/JSON reports.

All floats are written with 12 significant digits, '.' decimal separator,
no locale.  Report files embed the generating parameters and the tool
version, CSVs as a leading '#' comment, JSON under a "meta" key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import __version__, theory
from .analysis import ConcentrationReport, DegreeHistogram, DeviationReport, ExponentFit
from .errors import ParseError
from .generator import TreeDecomposition


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def _meta_comment(**fields) -> str:
    parts = " ".join(f"{key}={val}" for key, val in fields.items() if val is not None)
    return f"# ktree-lab v{__version__} {parts}"


# -- edge lists -----------------------------------------------------------------


@dataclass(frozen=True)
class EdgeListGraph:
    """A graph reconstructed from an edge-list file (no clique store)."""

    k: int
    n: int
    seed: int
    edges: np.ndarray
    b: float | None = None

    def edge_array(self) -> np.ndarray:
        return self.edges

    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.edges.ravel(), minlength=self.n)
        return deg.astype(np.int64)


def write_edge_list(path, graph) -> None:
    """Header '# ktree k=<k> n=<n> seed=<seed>' then one 'u v' line per
    edge, u < v, ascending lexicographic.  Thinned graphs also carry b."""
    header = f"# ktree k={graph.k} n={graph.n} seed={graph.seed}"
    b = getattr(graph, "b", None)
    if b is not None:
        header += f" b={b!r}"
    edges = graph.edge_array()
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for lo in range(0, len(edges), 1 << 18):
            chunk = edges[lo : lo + (1 << 18)]
            fh.write("\n".join(f"{u} {v}" for u, v in chunk))
            fh.write("\n")


def read_edge_list(path) -> EdgeListGraph:
    path = str(path)
    with open(path) as fh:
        header = fh.readline()
        fields = _parse_edge_header(path, header)
        k, n = fields["k"], fields["n"]
        edges = []
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(path, line_no, f"expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(path, line_no, f"non-integer vertex id in {line!r}") from None
            if not 0 <= u < v < n:
                raise ParseError(path, line_no, f"edge ({u}, {v}) violates 0 <= u < v < n={n}")
            edges.append((u, v))
    return EdgeListGraph(
        k=k,
        n=n,
        seed=fields["seed"],
        b=fields.get("b"),
        edges=np.asarray(edges, dtype=np.int64).reshape(-1, 2),
    )


def _parse_edge_header(path: str, header: str) -> dict:
    tokens = header.split()
    if tokens[:2] != ["#", "ktree"]:
        raise ParseError(path, 1, f"missing '# ktree' header, got {header.strip()!r}")
    fields: dict = {}
    for tok in tokens[2:]:
        key, _, val = tok.partition("=")
        try:
            fields[key] = float(val) if key == "b" else int(val)
        except ValueError:
            raise ParseError(path, 1, f"bad header field {tok!r}") from None
    for required in ("k", "n", "seed"):
        if required not in fields:
            raise ParseError(path, 1, f"header missing {required}=")
    return fields


# -- PACE-2017 tree decompositions -------------------------------------------------


def write_pace(path, td: TreeDecomposition, n_vertices: int) -> None:
    """'s td <bags> <max bag size> <n>', 'b <id> <v...>' lines, then bag
    edges; ids and vertices are 1-indexed as PACE requires."""
    with open(path, "w") as fh:
        fh.write(f"s td {td.num_bags} {td.width + 1} {n_vertices}\n")
        for i, bag in enumerate(td.bags, start=1):
            fh.write(f"b {i} " + " ".join(str(int(v) + 1) for v in bag) + "\n")
        for a, b in td.tree_edges:
            fh.write(f"{int(a) + 1} {int(b) + 1}\n")


def read_pace(path) -> tuple[TreeDecomposition, int]:
    """Parse a PACE .td file; returns (decomposition, declared vertex count)."""
    path = str(path)
    n_bags = n_vertices = width = None
    bags: dict[int, list[int]] = {}
    edges = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0] == "c":
                continue
            if parts[0] == "s":
                if len(parts) != 5 or parts[1] != "td":
                    raise ParseError(path, line_no, f"malformed solution line {line.strip()!r}")
                n_bags, max_bag, n_vertices = int(parts[2]), int(parts[3]), int(parts[4])
                width = max_bag - 1
            elif parts[0] == "b":
                if n_bags is None:
                    raise ParseError(path, line_no, "bag line before 's td' line")
                try:
                    bag_id = int(parts[1])
                    bags[bag_id] = [int(v) - 1 for v in parts[2:]]
                except ValueError:
                    raise ParseError(path, line_no, f"non-integer in bag line {line.strip()!r}") from None
            else:
                if len(parts) != 2:
                    raise ParseError(path, line_no, f"expected bag edge, got {line.strip()!r}")
                try:
                    edges.append((int(parts[0]) - 1, int(parts[1]) - 1))
                except ValueError:
                    raise ParseError(path, line_no, f"non-integer bag edge {line.strip()!r}") from None
    if n_bags is None:
        raise ParseError(path, 1, "no 's td' line found")
    if len(bags) != n_bags or sorted(bags) != list(range(1, n_bags + 1)):
        raise ParseError(path, 1, f"expected bags 1..{n_bags}, got {sorted(bags)}")
    if len({len(b) for b in bags.values()}) > 1:
        raise ParseError(path, 1, "bags of unequal size are not supported")
    bag_rows = np.asarray([bags[i] for i in range(1, n_bags + 1)], dtype=np.int64)
    return (
        TreeDecomposition(
            bags=bag_rows,
            tree_edges=np.asarray(edges, dtype=np.int64).reshape(-1, 2),
            width=width,
        ),
        n_vertices,
    )


# -- theory tables ------------------------------------------------------------------


def write_theory_csv(path_or_file, dist: theory.TheoreticalDistribution,
                     dp: theory.ExpectedDegreeTable | None = None) -> None:
    if hasattr(path_or_file, "write"):
        _write_theory_csv(path_or_file, dist, dp)
    else:
        with open(path_or_file, "w") as fh:
            _write_theory_csv(fh, dist, dp)


def _write_theory_csv(fh, dist, dp):
    fh.write(_theory_meta(dist, dp) + "\n")
    cols = "d,beta,closed_form" + (",expected_dp" if dp is not None else "")
    fh.write(cols + "\n")
    closed = np.atleast_1d(theory.beta_closed_form(dist.k, dist.degrees()))
    for i, d in enumerate(dist.degrees()):
        row = f"{d},{_fmt(dist.beta[i])},{_fmt(closed[i])}"
        if dp is not None:
            row += "," + (_fmt(dp.expected[i]) if d <= dp.d_max else "")
        fh.write(row + "\n")


def write_theory_json(path, dist: theory.TheoreticalDistribution,
                      dp: theory.ExpectedDegreeTable | None = None) -> None:
    payload = {
        "meta": {
            "tool": f"ktree-lab v{__version__}",
            "k": dist.k,
            "n": dp.n if dp is not None else None,
            "d_max": dist.d_max,
            "gamma": dist.gamma,
        },
        "d": [int(d) for d in dist.degrees()],
        "beta": [float(x) for x in dist.beta],
        "closed_form": [float(x) for x in np.atleast_1d(theory.beta_closed_form(dist.k, dist.degrees()))],
    }
    if dp is not None:
        payload["expected_dp"] = [float(x) for x in dp.expected]
        payload["dp_overflow"] = dp.overflow
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _theory_meta(dist, dp) -> str:
    return _meta_comment(
        k=dist.k,
        d_max=dist.d_max,
        gamma=_fmt(dist.gamma),
        n=None if dp is None else dp.n,
    )


# -- analysis reports -----------------------------------------------------------------


def write_histogram_csv(path, hist: DegreeHistogram, seed=None) -> None:
    with open(path, "w") as fh:
        fh.write(_meta_comment(k=hist.k, n=hist.n, seed=seed, trials=hist.trials) + "\n")
        fh.write("d,count\n")
        for d in sorted(hist.counts):
            fh.write(f"{d},{hist.counts[d]}\n")


def write_deviation_csv(path, report: DeviationReport, seed=None) -> None:
    with open(path, "w") as fh:
        fh.write(
            _meta_comment(
                k=report.k,
                n=report.n,
                seed=seed,
                trials=report.trials,
                d_cut=report.d_cut,
                max_abs_error=_fmt(report.max_abs_error),
                total_variation_distance=_fmt(report.total_variation_distance),
            )
            + "\n"
        )
        fh.write("d,empirical_fraction,beta,abs_error,rel_error\n")
        for i, d in enumerate(report.d):
            fh.write(
                f"{d},{_fmt(report.empirical_fraction[i])},{_fmt(report.beta[i])},"
                f"{_fmt(report.abs_error[i])},{_fmt(report.rel_error[i])}\n"
            )


def fit_to_dict(fit: ExponentFit | None, k=None, n=None, seed=None, trials=None,
                reason: str | None = None) -> dict:
    meta = {"tool": f"ktree-lab v{__version__}", "k": k, "n": n, "seed": seed, "trials": trials}
    if fit is None:
        return {"meta": meta, "insufficient_tail": True, "reason": reason}
    return {
        "meta": meta,
        "gamma_hat": fit.gamma_hat,
        "d_min": fit.d_min,
        "method": fit.method,
        "stderr": fit.stderr,
        "gamma_ccdf": fit.gamma_ccdf,
        "tail_count": fit.tail_count,
    }


def write_fit_json(path, fit: ExponentFit | None, k=None, n=None, seed=None, trials=None,
                   reason=None) -> None:
    with open(path, "w") as fh:
        json.dump(fit_to_dict(fit, k=k, n=n, seed=seed, trials=trials, reason=reason), fh, indent=2)
        fh.write("\n")


def concentration_to_dict(report: ConcentrationReport) -> dict:
    return {
        "meta": {
            "tool": f"ktree-lab v{__version__}",
            "k": report.k,
            "n": report.n,
            "seed": report.seed,
            "trials": report.trials,
        },
        "d": report.d,
        "mean": report.mean,
        "mean_source": report.mean_source,
        "sample_mean": report.sample_mean,
        "sample_std": report.sample_std,
        "max_abs_deviation": report.max_abs_deviation,
        "azuma_lambda_at_1pct": report.azuma_lambda_at_1pct,
        "violations": report.violations,
    }


def write_concentration_json(path, report: ConcentrationReport) -> None:
    with open(path, "w") as fh:
        json.dump(concentration_to_dict(report), fh, indent=2)
        fh.write("\n")
