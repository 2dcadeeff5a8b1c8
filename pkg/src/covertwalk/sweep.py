"""Parameter sweeps joining closed forms with simulation, written as CSV."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, fields

from . import analytic
from .params import DelayModel, ParameterError, SystemParams, WalkModel
from .simcore import run_monte_carlo

# figure presets: shared physical setting s=50, lam=1, m=10, W=50
PRESETS = {
    # covertness vs k for five redundancy levels
    "fig1": dict(model=1, r_values=[15], k_values=list(range(1, 21)), n_values=[1, 2, 3, 10, 15]),
    # delay vs n for several relay counts, k=3
    "fig2": dict(model=1, r_values=[5, 10, 15, 20], k_values=[3], n_values=None),
    # delay vs n for several chunk counts, r=10
    "fig3": dict(model=1, r_values=[10], k_values=[1, 2, 3, 4, 5], n_values=None),
    "fig4": dict(model=2, r_values=[10], k_values=[1, 2, 3, 4, 5], n_values=None),
}
PRESET_BASE = dict(s=50, m=10.0, lam=1.0, w=50.0)


@dataclass
class SweepSpec:
    s: int = 50
    r: int = 10
    m: float = 10.0
    k: int = 3
    n: int = 5
    lam: float = 1.0
    w: float = 50.0
    model: DelayModel = DelayModel.MODEL1
    walk: WalkModel = WalkModel.IID
    r_values: list | None = None
    k_values: list | None = None
    # None sweeps n over [k, r] for each (r, k)
    n_values: list | None = None
    trials: int = 100_000
    seed: int = 0
    simulate: bool = True
    out: str | None = None

    def __post_init__(self):
        self.model = DelayModel.parse(self.model)
        self.walk = WalkModel.parse(self.walk)
        if self.simulate and self.trials < 1:
            raise ParameterError(f"trials must be >= 1 (got {self.trials})")

    @classmethod
    def from_preset(cls, name, **overrides):
        if name not in PRESETS:
            raise ParameterError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
        values = {**PRESET_BASE, **PRESETS[name]}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def grid(self):
        """Validated parameter sets in output order (r, then k, then n).

        Pairs with ``k > n`` or ``n > r`` are skipped; any other violation and
        an empty grid raise before anything is simulated.
        """
        single = self.r_values is None and self.k_values is None and self.n_values is None
        points = []
        for r in self.r_values or [self.r]:
            for k in self.k_values or [self.k]:
                if single:
                    ns = [self.n]
                else:
                    ns = self.n_values if self.n_values is not None else range(k, r + 1)
                for n in ns:
                    if not k <= n <= r:
                        continue
                    points.append(SystemParams(s=self.s, r=r, m=self.m, k=k, n=n, lam=self.lam, w=self.w))
        if not points:
            raise ParameterError("sweep grid is empty after applying 1 <= k <= n <= r")
        return points


@dataclass
class SweepRow:
    model: int
    s: int
    r: int
    m: float
    k: int
    n: int
    # named "lambda" in CSV/JSON output
    lam: float
    w: float
    trials: int | None
    seed: int | None
    theory_dis: float
    theory_col: float
    theory_tot: float
    sim_dis_mean: float | None = None
    sim_col_mean: float | None = None
    sim_tot_mean: float | None = None
    sim_tot_stderr: float | None = None
    p_d: float = 0.0
    p_c: float = 0.0
    empirical_p_c: float | None = None

    def as_dict(self):
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["lambda"] = d.pop("lam")
        return {name: d[name] for name in COLUMNS}


COLUMNS = [
    "model", "s", "r", "m", "k", "n", "lambda", "w", "trials", "seed",
    "theory_dis", "theory_col", "theory_tot",
    "sim_dis_mean", "sim_col_mean", "sim_tot_mean", "sim_tot_stderr",
    "p_d", "p_c", "empirical_p_c",
]


def make_row(params: SystemParams, model, walk=WalkModel.IID, trials=None, seed=0,
             backend=None, threads=None, transcript=None) -> SweepRow:
    model = DelayModel.parse(model)
    row = SweepRow(
        model=int(model), s=params.s, r=params.r, m=params.m, k=params.k, n=params.n,
        lam=params.lam, w=params.w, trials=trials, seed=seed if trials else None,
        theory_dis=analytic.expected_dissemination(params, model),
        theory_col=analytic.expected_collection(params, model),
        theory_tot=analytic.expected_total(params, model),
        p_d=analytic.detection_probability(params),
        p_c=analytic.covertness_probability(params),
    )
    if trials:
        summary = run_monte_carlo(params, model, walk, trials, seed, backend=backend,
                                  threads=threads, transcript=transcript)
        row.sim_dis_mean = summary.mean_dissemination
        row.sim_col_mean = summary.mean_collection
        row.sim_tot_mean = summary.mean_total
        row.sim_tot_stderr = summary.se_total
        row.empirical_p_c = summary.covertness
    return row


def run_sweep(spec: SweepSpec, backend=None, threads=None, progress=None):
    points = spec.grid()
    rows = []
    for i, params in enumerate(points):
        rows.append(make_row(params, spec.model, spec.walk, spec.trials if spec.simulate else None,
                             spec.seed, backend=backend, threads=threads))
        if progress:
            progress(i + 1, len(points))
    return rows


def format_value(value):
    # repr gives the shortest string that round-trips a float
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        d = row.as_dict()
        writer.writerow([format_value(d[c]) for c in COLUMNS])


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def read_csv(fh):
    """Parse sweep CSV back into dicts of numbers (empty cells become None)."""
    out = []
    for rec in csv.DictReader(fh):
        parsed = {}
        for key, text in rec.items():
            if text == "":
                parsed[key] = None
            elif key in ("model", "s", "r", "k", "n", "trials", "seed"):
                parsed[key] = int(text)
            else:
                parsed[key] = float(text)
        out.append(parsed)
    return out
