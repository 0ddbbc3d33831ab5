"""Paired-classifier secrecy filtering, end to end.

Two databases share 2-D inputs with different binary labels; the sensitive
fact is the existence of a region where both labels are +1.  A fused
classifier leaks that region; the black-box filter remaps the output pair,
the white-box filter displaces the y-classifier's support vectors out of
the z-accepted region and refits the weights.

Takes about a minute with the default desk-scale settings; pass a smaller
sample count on the command line for a quick look (python 06_... 400).
"""

import sys
import time
from pathlib import Path

import numpy as np

from fusionplan.secrecy import DatasetSpec, run_demo

spec = DatasetSpec()
if len(sys.argv) > 1:
    spec = DatasetSpec(n_samples=int(sys.argv[1]))

start = time.perf_counter()
result = run_demo(seed=0, spec=spec)
elapsed = time.perf_counter() - start

m = result.metrics
print(f"Trained and filtered in {elapsed:.1f}s "
      f"({spec.n_samples} records per database)")
print("-" * 60)
print(f"  leakage, unfiltered fusion:   {m['leakage_pre']:.4f}")
print(f"  leakage, black-box remap:     {m['leakage_blackbox']:.4f}")
print(f"  leakage, white-box edit:      {m['leakage_post']:.4f}")
print(f"  y-accuracy before/after edit: {m['accuracy_y_pre']:.4f} / "
      f"{m['accuracy_y_post']:.4f}")
print(f"  ... restricted to z=-1:       {m['accuracy_y_pre_zneg']:.4f} / "
      f"{m['accuracy_y_post_zneg']:.4f}")
report = result.whiteboxed.filter_report
print(f"  support vectors displaced: {report.moved} "
      f"(max {max(report.steps)} steps)")
rejected = result.fused.cz.decision(result.whiteboxed.cy.support_vectors)
print(f"  strongest z-acceptance over edited support vectors: "
      f"{float(rejected.max()):.3f} (negative = all rejected)")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not available; skipping the figure")
    sys.exit(0)

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
res = 150
xs = np.linspace(-1, 1, res)
gx, gy = np.meshgrid(xs, xs)
grid = np.column_stack([gx.ravel(), gy.ravel()])

fig, axes = plt.subplots(1, 3, figsize=(13, 4.2), sharey=True)
panels = (
    ("unfiltered fusion", result.fused),
    ("black-box remap", result.blackboxed),
    ("white-box edit", result.whiteboxed),
)
for ax, (title, fc) in zip(axes, panels):
    py, pz = fc.outputs(grid)
    field = (py == 1).astype(int) + 2 * (pz == 1).astype(int)
    ax.imshow(field.reshape(res, res), origin="lower", extent=(-1, 1, -1, 1),
              cmap="Pastel1", vmin=0, vmax=4)
    leak = (py == 1) & (pz == 1)
    if leak.any():
        ax.plot(grid[leak, 0], grid[leak, 1], ".", ms=1, color="crimson")
    sv = fc.cy.support_vectors
    ax.plot(sv[:, 0], sv[:, 1], "k*", ms=4)
    ax.set_title(title)
    ax.set_xlim(-1, 1)
    ax.set_ylim(-1, 1)
fig.suptitle("label pairs over the window (red = sensitive (+1,+1); "
             "stars = y support vectors)")
fig.tight_layout()
figure_path = out / "secrecy_filtering.png"
fig.savefig(figure_path, dpi=130)
print(f"\nfigure written to {figure_path}")
