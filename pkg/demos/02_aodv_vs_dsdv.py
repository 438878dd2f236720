# coding: utf-8

# # Reactive and proactive routing on a sparse grid

# Sixteen nodes 100 m apart form a multi-hop network: the corner nodes are about 420 m apart and the radio reaches about 250 m. AODV finds a route when the first packet needs one. DSDV waits for periodic table dumps to spread, and it drops data while it has no route.

# In[1]:

from vidmanet.scenario import ScenarioConfig, run_scenario
from vidmanet.synth import synth_sequence

clip = synth_sequence(900, 64, 48)


# In[2]:

runs = {}
for protocol in ("AODV", "DSDV"):
    cfg = ScenarioConfig(protocol=protocol, n_nodes=16, spacing=100.0, n_frames=900)
    runs[protocol] = run_scenario(cfg, clip)


# Time to the first route and to the first delivered frame, in seconds:

# In[3]:

for protocol, r in runs.items():
    print(protocol, r.first_route_time, r.first_frame_time)


# AODV delivers within a tenth of a second. DSDV's first frame waits for roughly one 15 s update period, half of this 30 s clip.

# In[4]:

for protocol, r in runs.items():
    s = r.summary()
    print(f"{protocol}: decodable {s['decodable_rate']:.3f}, loss {s['loss_rate']:.3f}, "
          f"mean PSNR {s['mean_psnr_db']:.1f} dB")


# Each packet ends with exactly one fate. For DSDV, most of the losses are packets sent before any route existed.

# In[5]:

for protocol, r in runs.items():
    print(protocol, r.fates)
