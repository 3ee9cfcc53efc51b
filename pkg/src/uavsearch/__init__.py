"""Cooperative multi-UAV search simulation library.

Submodules: geometry (jump-grid kinematics), mapping (belief maps and
denied areas), objective (revenue terms), planner (GA receding-horizon
decisions), expert (online parameter selection), comms (wire format and
history exchange), scenario (experiment files), engine (the closed loop),
cli (command-line front end), kernels (numba/numpy fitness backends).
"""

__version__ = "0.1.0"
