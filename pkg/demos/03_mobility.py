# coding: utf-8

# # Spreading out and closing in

# Twenty-five nodes start on a grid and move at constant speed. OUTWARD stretches the spacing from 20 m to 150 m, INWARD does the reverse. The centre node stays put. As the grid spreads, the path from corner to corner needs more hops and loses more frames.

# In[1]:

import numpy as np

from vidmanet.scenario import MobilityPlan, ScenarioConfig, run_scenario
from vidmanet.synth import synth_sequence
from vidmanet.video import moving_average

clip = synth_sequence(900, 64, 48)


# The spacing over time for each plan:

# In[2]:

for mode in ("OUTWARD", "INWARD"):
    plan = MobilityPlan.for_config(ScenarioConfig(n_nodes=25, mobility=mode, n_frames=900))
    print(mode, [round(plan.spacing_at(t), 1) for t in (0, 10, 20, 30)])


# In[3]:

smooth = {}
for mode in ("OUTWARD", "INWARD"):
    cfg = ScenarioConfig(protocol="AODV", n_nodes=25, mobility=mode, n_frames=900)
    r = run_scenario(cfg, clip)
    smooth[mode] = moving_average(r.metrics.psnr, 100)


# Mean smoothed PSNR per quarter of the clip. OUTWARD starts well and fades, INWARD starts poorly and recovers.

# In[4]:

for mode, series in smooth.items():
    quarters = np.array_split(series, 4)
    print(mode, [round(float(q.mean()), 1) for q in quarters])
