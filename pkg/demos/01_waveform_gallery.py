"""Gallery of every fault template the generator can inject.

Runs one short scenario per fault class, prints the post-fault signature
(amplitude scaling and residual sum), and saves a grid of the eleven
three-phase traces to waveform_gallery.png in the working directory.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from thdrelay import FaultClass, FaultScenario, GeneratorConfig, generate

cfg = GeneratorConfig(f0=50.0, fs=10_000.0, duration=0.12)
t_fault = 0.06

fig, axes = plt.subplots(4, 3, figsize=(13, 10), sharex=True, sharey=True)
axes = axes.ravel()

print(f"{'class':>12} {'code':>4} {'faulted':>9} {'post-fault |va+vb+vc|':>22}")
for code in range(11):
    fault = FaultClass(code)
    scn = (
        FaultScenario()
        if fault is FaultClass.NO_FAULT
        else FaultScenario(fault=fault, t_fault=t_fault, rho=0.0)
    )
    trace = generate(cfg, scn)
    post = trace.t >= t_fault
    residual = np.abs(trace.va[post] + trace.vb[post] + trace.vc[post]).max()
    names = ",".join(sorted("abc"[p] for p in fault.phases)) or "-"
    print(f"{fault.name:>12} {code:>4} {names:>9} {residual:>22.3f}")

    ax = axes[code]
    for v, label in ((trace.va, "a"), (trace.vb, "b"), (trace.vc, "c")):
        ax.plot(trace.t * 1e3, v, lw=0.8, label=label)
    if fault is not FaultClass.NO_FAULT:
        ax.axvline(t_fault * 1e3, color="k", ls=":", lw=0.8)
    ax.set_title(f"{code}: {fault.name}", fontsize=9)
    ax.grid(alpha=0.3)

axes[0].legend(loc="upper right", fontsize=7, ncol=3)
axes[-1].axis("off")
for ax in axes[8:11]:
    ax.set_xlabel("t [ms]")
fig.suptitle("Fault templates, bolted (rho = 0), onset mid-run")
fig.tight_layout()
fig.savefig("waveform_gallery.png", dpi=110)
print("\nwrote waveform_gallery.png")
