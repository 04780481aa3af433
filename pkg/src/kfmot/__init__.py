"""
kfmot

Multi-object tracking toolkit: reinforcement-learned key-frame segmentation,
intra-frame feature fusion, hierarchical tracklet association and the
HOTA/CLEAR/identity metric suite.
"""

__version__ = "0.1.0"
