from exoretarget.kinematics.quaternion import (
    Pose6D,
    UnitQuaternion,
    angular_distance,
    orientation_error,
    quat_conjugate,
    quat_multiply,
    slerp,
    wrap_angle,
    yaw_of,
)
from exoretarget.kinematics.dh import (
    DHRow,
    JointKind,
    KinematicChain,
    PassiveCoupling,
    dh_row_pose,
    fk_chain,
    jacobian_orientation,
)
from exoretarget.kinematics.ik import IkOptions, IkResult, ik_orientation

__all__ = [
    "DHRow", "IkOptions", "IkResult", "JointKind", "KinematicChain", "PassiveCoupling", "Pose6D",
    "UnitQuaternion", "angular_distance", "dh_row_pose", "fk_chain", "ik_orientation",
    "jacobian_orientation", "orientation_error", "quat_conjugate", "quat_multiply", "slerp",
    "wrap_angle", "yaw_of",
]
