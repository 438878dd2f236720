"""Discrete-event simulation of video streaming over MANETs (AODV / DSDV)
with an Evalvid-style quality evaluator."""

__version__ = "0.1.0"
