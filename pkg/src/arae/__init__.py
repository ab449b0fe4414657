"""Kinematics, arm-pose estimation and gravity-compensation control for a
five-joint end-effector upper-limb assistance robot."""

__version__ = "0.1.0"
