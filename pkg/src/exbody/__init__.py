"""Expression-goal humanoid control toolkit.

Pipeline: parse/curate motion capture, retarget onto a 19-DoF humanoid,
extract expression and root-movement goals, and train goal-conditioned
policies against simplified stand-in dynamics.
"""

from .curation import EXCLUDE_KEYWORDS, INCLUDE_KEYWORDS, MotionLibrary, curate
from .goals import (
    CommandRanges,
    ExpressionGoal,
    FullBodyGoal,
    InitialState,
    MovementGoal,
    delta_yaw,
    extract_goals,
    sample_random_command,
    sample_rsi,
)
from .mocap import ClipMeta, RawMotionClip, SkeletonDef, parse_motion, parse_skeleton
from .retarget import JointMapping, RetargetedClip, exp_map_spherical, retarget_clip, validate_limits
from .rewards import EnvStateSnapshot, RewardBreakdown, RewardWeights, total_reward
from .robot import RobotModel, RootPose, default_robot_model, forward_kinematics

__version__ = "0.1.0"

__all__ = [
    "CommandRanges",
    "ClipMeta",
    "EnvStateSnapshot",
    "EXCLUDE_KEYWORDS",
    "ExpressionGoal",
    "FullBodyGoal",
    "INCLUDE_KEYWORDS",
    "InitialState",
    "JointMapping",
    "MotionLibrary",
    "MovementGoal",
    "RawMotionClip",
    "RetargetedClip",
    "RewardBreakdown",
    "RewardWeights",
    "RobotModel",
    "RootPose",
    "SkeletonDef",
    "curate",
    "default_robot_model",
    "delta_yaw",
    "exp_map_spherical",
    "extract_goals",
    "forward_kinematics",
    "parse_motion",
    "parse_skeleton",
    "retarget_clip",
    "sample_random_command",
    "sample_rsi",
    "total_reward",
    "validate_limits",
]
