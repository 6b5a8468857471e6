"""Experiment runner: sweeps over basis sizes, CSV tables, growth-rate fits.

A flat INI-style config file describes one experiment (domain curve, source
curve, boundary data, methods, basis sizes).  run_sweep solves every
(method, N) cell, measures conditioning and boundary error, and collects the
rows in a SweepTable that serializes to CSV with the fixed header

    method,N,M,p,cond2,linf_error,max_imag,runtime_ms,constraint_margin

Rows that fail numerically (e.g. the svd backend with sources violating the
separation constraint) are reported on the table's error list; the sweep
continues.  Floats are written with repr, so parsing and re-emitting a table
is byte-identical.
"""

import configparser
import math
import os
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import solvers
from .errors import ConfigError, ConstraintViolationError, InsufficientDataError, NumericalError
from .expansion import MACHINE_EPS, expansion_degree, setup_expansion, truncation_order
from .geometry import (
    TWO_PI,
    BoundaryCurve,
    check_source_constraint,
    make_curve,
    max_boundary_radius,
    sample_collocation,
    sample_sources,
    wrap_angle,
)
from .solvers import (
    BoundaryData,
    SourceSet,
    SvdBasis,
    assemble_direct,
    assemble_qr_system,
    assemble_svd_system,
    boundary_error,
    build_qr_basis,
    build_svd_basis,
    make_boundary_data,
    solve_direct,
    solve_qr,
    solve_svd,
)

CSV_HEADER = "method,N,M,p,cond2,linf_error,max_imag,runtime_ms,constraint_margin"
_METHODS = ("direct", "qr", "svd")
_SATURATION_COND = 1e15


@dataclass(frozen=True)
class ExperimentConfig:
    domain: str
    source: str
    data: str
    methods: tuple
    n_values: tuple
    domain_params: dict = field(default_factory=dict)
    source_params: dict = field(default_factory=dict)
    data_params: dict = field(default_factory=dict)
    m_rule: int = 2
    tol: float = MACHINE_EPS
    error_samples: int = 10001
    seed: int = 0
    timing: bool = True

    def __post_init__(self):
        if not self.methods:
            raise ConfigError("method list must be nonempty")
        for m in self.methods:
            if m not in _METHODS:
                raise ConfigError(f"unknown method {m!r}; known: {', '.join(_METHODS)}")
        if not self.n_values:
            raise ConfigError("N list must be nonempty")
        if any(n <= 0 for n in self.n_values):
            raise ConfigError("N values must be positive")
        if list(self.n_values) != sorted(self.n_values):
            raise ConfigError("N values must be ascending")
        if self.m_rule < 1:
            raise ConfigError("M_rule must be >= 1")
        if self.error_samples < 2:
            raise ConfigError("error_samples must be >= 2")


@dataclass(frozen=True)
class SweepRow:
    method: str
    n: int
    m: int
    p: int
    cond2: float
    linf_error: float
    max_imag: float
    runtime_ms: float
    constraint_margin: float


@dataclass
class SweepTable:
    rows: list
    errors: list = field(default_factory=list)    # (method, n, message)

    def for_method(self, method: str):
        return [r for r in self.rows if r.method == method]


# --- config parsing ----------------------------------------------------------

_RUN_KEYS = {"methods", "n", "m_rule", "tol", "error_samples", "seed", "timing"}


def _parse_n_values(text: str):
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (int(p) for p in parts)
        if step <= 0:
            raise ConfigError("range step must be positive")
        return tuple(range(start, stop + 1, step))
    return tuple(int(p) for p in text.split(","))


def _curve_section(cp, section):
    if section not in cp:
        raise ConfigError(f"missing [{section}] section")
    items = dict(cp[section])
    if "curve" not in items:
        raise ConfigError(f"[{section}] needs a 'curve' key")
    name = items.pop("curve")
    params = {}
    for k, v in items.items():
        try:
            params[k] = float(v)
        except ValueError:
            raise ConfigError(f"[{section}] {k}: expected a number, got {v!r}") from None
    return name, params


def parse_config(path) -> ExperimentConfig:
    """Parse a strict key=value config file with [domain]/[source]/[data]/[run] sections."""
    cp = configparser.ConfigParser()
    with open(path) as fh:
        cp.read_file(fh)
    known = {"domain", "source", "data", "run"}
    extra = set(cp.sections()) - known
    if extra:
        raise ConfigError(f"unknown config sections {sorted(extra)}")

    domain, domain_params = _curve_section(cp, "domain")
    source, source_params = _curve_section(cp, "source")

    if "data" not in cp:
        raise ConfigError("missing [data] section")
    data_items = dict(cp["data"])
    if "name" not in data_items:
        raise ConfigError("[data] needs a 'name' key")
    data = data_items.pop("name")
    data_params = {k: float(v) for k, v in data_items.items()}

    if "run" not in cp:
        raise ConfigError("missing [run] section")
    run = dict(cp["run"])
    unknown = set(run) - _RUN_KEYS
    if unknown:
        raise ConfigError(f"unknown [run] keys {sorted(unknown)}")
    if "methods" not in run or "n" not in run:
        raise ConfigError("[run] needs 'methods' and 'N' keys")
    timing = run.get("timing", "on").strip().lower()
    if timing not in ("on", "off"):
        raise ConfigError("timing must be 'on' or 'off'")
    try:
        cfg = ExperimentConfig(
            domain=domain,
            source=source,
            data=data,
            methods=tuple(m.strip() for m in run["methods"].split(",") if m.strip()),
            n_values=_parse_n_values(run["n"]),
            domain_params=domain_params,
            source_params=source_params,
            data_params=data_params,
            m_rule=int(run.get("m_rule", 2)),
            tol=float(run.get("tol", MACHINE_EPS)),
            error_samples=int(run.get("error_samples", 10001)),
            seed=int(run.get("seed", 0)),
            timing=timing == "on",
        )
    except ValueError as exc:
        raise ConfigError(f"bad [run] value: {exc}") from None
    # fail fast on unknown catalog names
    make_curve(cfg.domain, **cfg.domain_params)
    make_curve(cfg.source, **cfg.source_params)
    make_boundary_data(cfg.data, **cfg.data_params)
    return cfg


# --- running -----------------------------------------------------------------


@dataclass(frozen=True)
class _Workspace:
    domain: BoundaryCurve
    source: BoundaryCurve
    data: BoundaryData
    boundary_radius: float


def _workspace(cfg: ExperimentConfig) -> _Workspace:
    domain = make_curve(cfg.domain, **cfg.domain_params)
    return _Workspace(
        domain=domain,
        source=make_curve(cfg.source, **cfg.source_params),
        data=make_boundary_data(cfg.data, **cfg.data_params),
        boundary_radius=max_boundary_radius(domain),
    )


def _qr_degree(ratio: float, n: int, tol: float) -> int:
    p = expansion_degree(truncation_order(ratio, tol), n)
    # the qr factorization needs a strictly wider feature space
    return p + 1 if 2 * p + 1 == n else p


def run_single(cfg: ExperimentConfig, method: str, n: int, ws: Optional[_Workspace] = None):
    """Solve one (method, N) cell; returns (SweepRow, SolveRecord)."""
    if method not in _METHODS:
        raise ConfigError(f"unknown method {method!r}")
    ws = ws or _workspace(cfg)
    m = cfg.m_rule * n
    colloc = sample_collocation(ws.domain, m)
    sources = sample_sources(ws.source, n)
    margin = check_source_constraint(sources, ws.boundary_radius).margin

    t0 = time.perf_counter()
    if method == "direct":
        a = assemble_direct(sources, colloc)
        record = solve_direct(a, ws.data.values(colloc.points), sources)
        p = 0
    elif method == "svd":
        if margin <= 0.0:
            raise ConstraintViolationError(margin)
        if 2 * ((m - 1) // 2) + 1 < n:
            raise ConfigError(
                f"M_rule={cfg.m_rule} gives only {m} collocation points, too few to "
                f"carry {n} svd basis functions (need 2*floor((M-1)/2)+1 >= N)"
            )
        setup = setup_expansion(sources, ws.boundary_radius, n, cfg.tol, max_degree=(m - 1) // 2)
        basis = build_svd_basis(setup, colloc)
        a = assemble_svd_system(basis, colloc)
        record = solve_svd(basis, a, ws.data.values(colloc.points))
        p = setup.degree
    else:
        ratio = float(np.max(ws.boundary_radius / sources.radii))
        p = _qr_degree(ratio, n, cfg.tol)
        basis = build_qr_basis(sources, p)
        a = assemble_qr_system(basis, colloc)
        record = solve_qr(basis, a, ws.data.values(colloc.points))
    runtime_ms = (time.perf_counter() - t0) * 1e3

    record.runtime_ms = runtime_ms
    boundary_error(record, ws.domain, ws.data, cfg.error_samples)
    row = SweepRow(
        method=method,
        n=n,
        m=m,
        p=p,
        cond2=record.cond2,
        linf_error=record.linf_boundary_error,
        max_imag=record.max_imag_on_boundary,
        runtime_ms=runtime_ms if cfg.timing else 0.0,
        constraint_margin=margin,
    )
    return row, record


def run_sweep(cfg: ExperimentConfig) -> SweepTable:
    """Run every (method, N) cell; numerical failures become error entries."""
    ws = _workspace(cfg)
    table = SweepTable(rows=[])
    for method in cfg.methods:
        for n in cfg.n_values:
            try:
                row, _ = run_single(cfg, method, n, ws)
            except NumericalError as exc:
                table.errors.append((method, n, str(exc)))
                continue
            table.rows.append(row)
    table.rows.sort(key=lambda r: (r.method, r.n))
    return table


# --- CSV ---------------------------------------------------------------------


def _fmt(value: float) -> str:
    return repr(float(value))


def table_to_csv(table: SweepTable) -> str:
    lines = [CSV_HEADER]
    for r in table.rows:
        lines.append(
            ",".join(
                [
                    r.method,
                    str(r.n),
                    str(r.m),
                    str(r.p),
                    _fmt(r.cond2),
                    _fmt(r.linf_error),
                    _fmt(r.max_imag),
                    _fmt(r.runtime_ms),
                    _fmt(r.constraint_margin),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_table(table: SweepTable, path):
    with open(path, "w") as fh:
        fh.write(table_to_csv(table))


def read_table(path) -> SweepTable:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ConfigError(f"unexpected CSV header in {path}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 9:
            raise ConfigError(f"malformed CSV row: {ln!r}")
        rows.append(
            SweepRow(
                method=parts[0],
                n=int(parts[1]),
                m=int(parts[2]),
                p=int(parts[3]),
                cond2=float(parts[4]),
                linf_error=float(parts[5]),
                max_imag=float(parts[6]),
                runtime_ms=float(parts[7]),
                constraint_margin=float(parts[8]),
            )
        )
    return SweepTable(rows=rows)


# --- analysis ----------------------------------------------------------------


@dataclass(frozen=True)
class GrowthFit:
    slope: float
    intercept: float


def fit_growth_rate(table: SweepTable, method: str) -> GrowthFit:
    """Least-squares slope of ln(cond2) against N over pre-saturation rows.

    Rows with cond2 >= 1e15 (or non-finite) are excluded; at least four rows
    must remain.
    """
    rows = [
        r
        for r in table.for_method(method)
        if math.isfinite(r.cond2) and 0.0 < r.cond2 < _SATURATION_COND
    ]
    if len(rows) < 4:
        raise InsufficientDataError(
            f"{len(rows)} usable rows for method {method!r}, need at least 4"
        )
    n = np.array([r.n for r in rows], dtype=float)
    y = np.log(np.array([r.cond2 for r in rows]))
    slope, intercept = np.polyfit(n, y, 1)
    return GrowthFit(slope=float(slope), intercept=float(intercept))


# --- basis sampling ----------------------------------------------------------


def _basis_csv(path, t, columns, labels):
    lines = ["t," + ",".join(labels)]
    for i, ti in enumerate(t):
        lines.append(",".join([_fmt(ti)] + [_fmt(c[i]) for c in columns]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_basis_samples(context, curve: BoundaryCurve, count: int, path):
    """Dump basis-function traces along the boundary to CSV.

    direct (SourceSet context): one file, each column a fundamental-solution
    trace normalized to unit max-abs.  svd (SvdBasis context): two files,
    '<stem>_real<ext>' and '<stem>_imag<ext>', raw values.  qr (QrBasis
    context): one file, raw values.  Returns the list of paths written.
    """
    if count < 2:
        raise ValueError("count must be >= 2")
    t = TWO_PI * np.arange(1, count + 1) / count
    pts = curve.point(t)
    path = str(path)

    if isinstance(context, SourceSet):
        d = solvers._pairwise_distances(pts, context.points)
        traces = -np.log(d) / (2.0 * math.pi)
        traces = traces / np.max(np.abs(traces), axis=0, keepdims=True)
        labels = [f"psi{j + 1}" for j in range(context.count)]
        _basis_csv(path, t, [traces[:, j] for j in range(traces.shape[1])], labels)
        return [path]
    if isinstance(context, SvdBasis):
        radii = np.hypot(pts[:, 0], pts[:, 1])
        angles = wrap_angle(np.arctan2(pts[:, 1], pts[:, 0]))
        traces = context.rows_at(radii, angles) @ context.basis_coords.T
        labels = [f"phi{j + 1}" for j in range(context.count)]
        stem, ext = os.path.splitext(path)
        real_path = f"{stem}_real{ext}"
        imag_path = f"{stem}_imag{ext}"
        _basis_csv(real_path, t, [traces[:, j].real for j in range(traces.shape[1])], labels)
        _basis_csv(imag_path, t, [traces[:, j].imag for j in range(traces.shape[1])], labels)
        return [real_path, imag_path]
    if isinstance(context, solvers.QrBasis):
        radii = np.hypot(pts[:, 0], pts[:, 1])
        angles = wrap_angle(np.arctan2(pts[:, 1], pts[:, 0]))
        traces = solvers._real_monomials(radii, angles, context.degree) @ context.transform.T
        labels = [f"psi{j + 1}" for j in range(context.count)]
        _basis_csv(path, t, [traces[:, j] for j in range(traces.shape[1])], labels)
        return [path]
    raise ValueError("context must be a SourceSet, SvdBasis, or QrBasis")


def build_method_context(cfg: ExperimentConfig, method: str, n: int):
    """Construct the evaluation context a basis dump needs for (method, N)."""
    ws = _workspace(cfg)
    colloc = sample_collocation(ws.domain, cfg.m_rule * n)
    sources = sample_sources(ws.source, n)
    if method == "direct":
        return sources, ws
    margin = check_source_constraint(sources, ws.boundary_radius).margin
    if method == "svd":
        if margin <= 0.0:
            raise ConstraintViolationError(margin)
        setup = setup_expansion(
            sources, ws.boundary_radius, n, cfg.tol, max_degree=(colloc.count - 1) // 2
        )
        return build_svd_basis(setup, colloc), ws
    if method == "qr":
        ratio = float(np.max(ws.boundary_radius / sources.radii))
        return build_qr_basis(sources, _qr_degree(ratio, n, cfg.tol)), ws
    raise ConfigError(f"unknown method {method!r}")
