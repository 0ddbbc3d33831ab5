"""Paired-classifier secrecy filtering workbench.

Two databases share the same 2-D input vectors but carry different binary
labels y and z.  Each is summarized by a kernel classifier; fusing them
means forwarding a query to both and returning the label pair.  The
sensitive fact is the existence of a region where both labels are +1, and
two filters remove it:

* black-box: remap the output pair (+1,+1) to (-1,+1), identity elsewhere;
* white-box: push every y-support-vector that the z-classifier accepts
  down the z-decision gradient until z rejects it, then refit the y-weights
  on the displaced support vectors.

Leakage measures the fraction of a lattice over the data window where the
fused output is still (+1,+1).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .svm import KernelClassifier, train

SENSITIVE_PAIR = (1, 1)


@dataclass(frozen=True)
class DatasetSpec:
    """Geometry and sampling plan for the paired dataset.

    Labels are +1 inside the respective disc and -1 outside; the discs
    overlap so the sensitive y=z=+1 lens is non-empty by default.  ``noise``
    is an independent label-flip probability per record and channel.
    """

    n_samples: int = 1500
    center_y: tuple[float, float] = (-0.5, 0.0)
    center_z: tuple[float, float] = (0.5, 0.0)
    radius: float = 0.8
    window: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)
    noise: float = 0.0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("sample count must be positive")
        if self.radius <= 0:
            raise ValueError("disc radius must be positive (regions are empty)")
        x_lo, x_hi, y_lo, y_hi = self.window
        if x_lo >= x_hi or y_lo >= y_hi:
            raise ValueError("sampling window is empty")
        if not 0.0 <= self.noise < 1.0:
            raise ValueError("noise must be a probability below 1")


@dataclass(frozen=True)
class PairedDataset:
    """Shared inputs with one label per channel: records (x_i, y_i, z_i)."""

    x: np.ndarray   # (n, 2)
    y: np.ndarray   # (n,) labels in {-1, +1}
    z: np.ndarray   # (n,)
    spec: DatasetSpec
    seed: int

    def __len__(self) -> int:
        return len(self.x)

    def labels(self, channel: str) -> np.ndarray:
        if channel not in ("y", "z"):
            raise ValueError("channel must be 'y' or 'z'")
        return self.y if channel == "y" else self.z


def generate_dataset(spec: DatasetSpec | None = None, seed: int = 0) -> PairedDataset:
    """Uniform samples over the window, labelled by disc membership."""
    spec = spec or DatasetSpec()
    rng = np.random.default_rng(seed)
    x_lo, x_hi, y_lo, y_hi = spec.window
    x = np.column_stack([
        rng.uniform(x_lo, x_hi, spec.n_samples),
        rng.uniform(y_lo, y_hi, spec.n_samples),
    ])

    def membership(center):
        inside = np.sum((x - np.asarray(center)) ** 2, axis=1) <= spec.radius**2
        return np.where(inside, 1, -1)

    y = membership(spec.center_y)
    z = membership(spec.center_z)
    if spec.noise > 0:
        y = np.where(rng.random(spec.n_samples) < spec.noise, -y, y)
        z = np.where(rng.random(spec.n_samples) < spec.noise, -z, z)
    return PairedDataset(x=x, y=y, z=z, spec=spec, seed=seed)


@dataclass(frozen=True)
class FilterReport:
    """What the white-box filter did to each moved support vector."""

    moved: int
    steps: tuple[int, ...]
    stalled: tuple[int, ...]        # indices that hit the step cap
    vanishing: tuple[int, ...]      # indices with a vanishing z-gradient


@dataclass(frozen=True)
class FusedClassifier:
    """Forwards a query to both component classifiers, returns (y, z).

    ``remap``, when present, post-processes the output pair and must be
    total over the four label pairs.
    """

    cy: KernelClassifier
    cz: KernelClassifier
    remap: dict | None = None
    filter_report: FilterReport | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.remap is not None:
            pairs = {(sy, sz) for sy in (-1, 1) for sz in (-1, 1)}
            if set(self.remap) != pairs:
                raise ValueError("remap must cover all four label pairs")

    def outputs(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        py = self.cy.predict(X)
        pz = self.cz.predict(X)
        if self.remap is not None:
            mapped = np.array([self.remap[(int(a), int(b))] for a, b in zip(py, pz)])
            py, pz = mapped[:, 0], mapped[:, 1]
        return py, pz


def fuse(cy: KernelClassifier, cz: KernelClassifier) -> FusedClassifier:
    return FusedClassifier(cy=cy, cz=cz)


def blackbox_filter(fc: FusedClassifier) -> FusedClassifier:
    """Remap the sensitive output pair (+1,+1) to (-1,+1); identity elsewhere."""
    remap = {(sy, sz): (sy, sz) for sy in (-1, 1) for sz in (-1, 1)}
    remap[SENSITIVE_PAIR] = (-1, 1)
    return replace(fc, remap=remap)


def whitebox_filter(
    fc: FusedClassifier,
    delta: float = 0.05,
    max_steps: int = 200,
    overshoot: float = 0.2,
    selection_margin: float = 1.0,
    gradient_tol: float = 1e-9,
) -> FusedClassifier:
    """Displace y-support-vectors out of the z-accepted region and refit.

    Every y-support-vector the z-classifier accepts (or rejects by less than
    ``selection_margin`` decision units) takes steps of length exactly
    ``delta`` against the z-decision gradient until the z-classifier labels
    it -1, then continues for ``overshoot`` more distance (whole steps).
    The tolerances matter: stopping at the bare sign flip and leaving
    barely-rejected support vectors in place would leave the refitted
    positive region smeared across the z-boundary by the kernel width.  The
    y-weights are then retrained with the displaced support vectors as
    training samples, keeping their original labels.  Any remap on the
    fused classifier is cleared.
    """
    if delta <= 0:
        raise ValueError("step length delta must be positive (no progress possible)")
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    if overshoot < 0:
        raise ValueError("overshoot distance must be non-negative")
    if selection_margin < 0:
        raise ValueError("selection margin must be non-negative")
    cy, cz = fc.cy, fc.cz
    extra_steps = int(np.ceil(overshoot / delta))

    points = cy.support_vectors.copy()
    steps_taken = []
    stalled = []
    vanishing = []
    moved = 0
    for i in range(len(points)):
        p = points[i].copy()
        if cz.decision(p)[0] <= -selection_margin:
            steps_taken.append(0)
            continue
        moved += 1
        steps = 0
        remaining_extra = extra_steps
        while steps < max_steps:
            rejected = cz.decision(p)[0] < 0
            if rejected and remaining_extra == 0:
                break
            grad = cz.decision_gradient(p)[0]
            norm = float(np.linalg.norm(grad))
            if norm < gradient_tol:
                vanishing.append(i)
                break
            p -= delta * grad / norm
            steps += 1
            if rejected:
                remaining_extra -= 1
        if steps >= max_steps and cz.decision(p)[0] >= 0:
            stalled.append(i)
        steps_taken.append(steps)
        points[i] = p

    retrained = train(
        points,
        cy.labels.astype(float),
        C=cy.c_param,
        kernel=cy.kernel,
        gamma=cy.gamma,
        seed=0,
    )
    report = FilterReport(
        moved=moved,
        steps=tuple(steps_taken),
        stalled=tuple(stalled),
        vanishing=tuple(vanishing),
    )
    return FusedClassifier(cy=retrained, cz=cz, remap=None, filter_report=report)


def evaluation_grid(
    window: tuple[float, float, float, float], resolution: int = 200
) -> np.ndarray:
    """Uniform lattice over the window, row-major, resolution^2 points."""
    if resolution < 2:
        raise ValueError("grid resolution must be at least 2")
    x_lo, x_hi, y_lo, y_hi = window
    xs = np.linspace(x_lo, x_hi, resolution)
    ys = np.linspace(y_lo, y_hi, resolution)
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


def leakage(
    fc: FusedClassifier,
    window: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0),
    resolution: int = 200,
) -> float:
    """Fraction of the lattice where the fused output is the sensitive pair."""
    grid = evaluation_grid(window, resolution)
    py, pz = fc.outputs(grid)
    return float(np.mean((py == SENSITIVE_PAIR[0]) & (pz == SENSITIVE_PAIR[1])))


def accuracy(c: KernelClassifier, dataset: PairedDataset, channel: str,
             mask: np.ndarray | None = None) -> float:
    """Fraction of records the classifier labels correctly on one channel;
    an optional boolean mask restricts the evaluation region."""
    labels = dataset.labels(channel)
    x = dataset.x
    if mask is not None:
        if not np.any(mask):
            raise ValueError("evaluation mask selects no records")
        x, labels = x[mask], labels[mask]
    if len(labels) == 0:
        raise ValueError("no records to evaluate")
    return float(np.mean(c.predict(x) == labels))


@dataclass(frozen=True)
class DemoResult:
    dataset: PairedDataset
    fused: FusedClassifier
    blackboxed: FusedClassifier
    whiteboxed: FusedClassifier
    metrics: dict


def run_demo(
    seed: int = 0,
    spec: DatasetSpec | None = None,
    kernel: str = "rbf",
    gamma_y: float = 40.0,
    gamma_z: float = 2.0,
    c_y: float = 30.0,
    c_z: float = 10.0,
    delta: float = 0.05,
    max_steps: int = 200,
    overshoot: float = 0.4,
    selection_margin: float = 3.0,
    grid_resolution: int = 200,
) -> DemoResult:
    """Train, fuse and filter the paired classifiers; collect the metrics
    that feed plan evaluation (efficiency = filtered y-accuracy, risk =
    remaining leakage).

    The defaults are tuned to the default disc geometry: the z-classifier
    keeps a wide, smooth kernel so displacement paths descend cleanly, the
    y-classifier a tight one so the refitted region hugs its displaced
    support vectors.
    """
    spec = spec or DatasetSpec()
    data = generate_dataset(spec, seed=seed)
    cy = train(data.x, data.y.astype(float), C=c_y, kernel=kernel,
               gamma=gamma_y, seed=seed)
    cz = train(data.x, data.z.astype(float), C=c_z, kernel=kernel,
               gamma=gamma_z, seed=seed + 1)
    fused = fuse(cy, cz)
    blackboxed = blackbox_filter(fused)
    whiteboxed = whitebox_filter(fused, delta=delta, max_steps=max_steps,
                                 overshoot=overshoot,
                                 selection_margin=selection_margin)

    window = spec.window
    z_negative = data.z == -1
    acc_pre = accuracy(cy, data, "y")
    acc_post = accuracy(whiteboxed.cy, data, "y")
    metrics = {
        "leakage_pre": leakage(fused, window, grid_resolution),
        "leakage_blackbox": leakage(blackboxed, window, grid_resolution),
        "leakage_post": leakage(whiteboxed, window, grid_resolution),
        "accuracy_y_pre": acc_pre,
        "accuracy_y_post": acc_post,
        "accuracy_y_pre_zneg": accuracy(cy, data, "y", mask=z_negative),
        "accuracy_y_post_zneg": accuracy(whiteboxed.cy, data, "y", mask=z_negative),
        "efficiency": acc_post,
        "risk": leakage(whiteboxed, window, grid_resolution),
    }
    return DemoResult(
        dataset=data,
        fused=fused,
        blackboxed=blackboxed,
        whiteboxed=whiteboxed,
        metrics=metrics,
    )
