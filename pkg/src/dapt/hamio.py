"""File formats: sampled Hamiltonians, CSV reports, JSON summaries.

The Hamiltonian text format is line-oriented and language-neutral:

    # optional comment lines
    <dim> <n_nodes>
    <s_0> <re,im> <re,im> ... (dim*dim row-major pairs)
    ...
    <s_last> ...

Complex values in CSV files occupy two adjacent columns named ``<col>_re``
and ``<col>_im``. All floats print with 17 significant digits so re-reading
an emitted file reproduces the in-memory doubles bit-for-bit.
"""
import csv
import json

import numpy as np

from .errors import ConfigError, NonHermitianInput
from .grid import Grid

FLOAT_FMT = "%.17g"


def _fmt(x: float) -> str:
    return FLOAT_FMT % float(x)


def write_hamiltonian(path, samples: np.ndarray, grid: Grid,
                      comment: str = None) -> None:
    samples = np.asarray(samples, dtype=complex)
    dim = samples.shape[1]
    with open(path, "w") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"{dim} {grid.n}\n")
        for k in range(grid.n):
            row = samples[k].reshape(-1)
            pairs = " ".join(f"{_fmt(z.real)},{_fmt(z.imag)}" for z in row)
            fh.write(f"{_fmt(grid.s[k])} {pairs}\n")


def read_hamiltonian(path, hermiticity_tol: float = 1e-10):
    """Parse a sampled-Hamiltonian file into (grid, samples).

    Raises OSError for unreadable paths, ConfigError for malformed content,
    NonHermitianInput when any node fails the Hermiticity check.
    """
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ConfigError(f"{path}: empty Hamiltonian file")
    head = lines[0].split()
    if len(head) != 2:
        raise ConfigError(f"{path}: header must be '<dim> <n_nodes>'")
    try:
        dim, n = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ConfigError(f"{path}: bad header: {exc}") from None
    if len(lines) - 1 != n:
        raise ConfigError(f"{path}: expected {n} node lines, found {len(lines) - 1}")
    s = np.empty(n)
    samples = np.empty((n, dim, dim), dtype=complex)
    for k, line in enumerate(lines[1:]):
        toks = line.split()
        if len(toks) != 1 + dim * dim:
            raise ConfigError(f"{path}: node {k}: expected {1 + dim * dim} "
                              f"tokens, found {len(toks)}")
        try:
            s[k] = float(toks[0])
            flat = [complex(*map(float, t.split(","))) for t in toks[1:]]
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{path}: node {k}: {exc}") from None
        samples[k] = np.array(flat).reshape(dim, dim)
    try:
        grid = Grid(s=s)
    except Exception as exc:
        raise ConfigError(f"{path}: bad grid: {exc}") from None
    dev = np.abs(samples - np.swapaxes(samples, 1, 2).conj()).max()
    if dev > hermiticity_tol:
        raise NonHermitianInput(f"{path}: max |H - H^dag| = {dev:.3e}")
    return grid, samples


def write_csv(path, columns) -> None:
    """Write named columns; complex ones expand to _re/_im pairs.

    ``columns`` is a sequence of (name, 1-d array) pairs.
    """
    names, cols = [], []
    for name, arr in columns:
        arr = np.asarray(arr)
        if np.iscomplexobj(arr):
            names.extend([f"{name}_re", f"{name}_im"])
            cols.extend([arr.real, arr.imag])
        else:
            names.append(name)
            cols.append(arr.astype(float))
    n = len(cols[0])
    for c in cols:
        if len(c) != n:
            raise ValueError("CSV columns must share a length")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for k in range(n):
            writer.writerow([_fmt(c[k]) for c in cols])


def read_csv(path) -> dict:
    """Read a write_csv file back; _re/_im pairs recombine to complex."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        names = next(reader)
        rows = [[float(x) for x in row] for row in reader]
    data = np.array(rows) if rows else np.zeros((0, len(names)))
    out = {}
    k = 0
    while k < len(names):
        name = names[k]
        if name.endswith("_re") and k + 1 < len(names) \
                and names[k + 1] == name[:-3] + "_im":
            out[name[:-3]] = data[:, k] + 1j * data[:, k + 1]
            k += 2
        else:
            out[name] = data[:, k]
            k += 1
    return out


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)!r}")


def write_summary(path, payload: dict, config: dict = None) -> None:
    """JSON report with the run configuration echoed and the version pinned."""
    from . import __version__
    doc = {"version": __version__}
    if config is not None:
        doc["config"] = config
    doc.update(payload)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, default=_json_default, sort_keys=False)
        fh.write("\n")
