"""Kinematics and workspace analysis of a 3-DOF spherical parallel wrist."""

from .constraints import (ConstraintParams, FeasibilityReport, base_clearance, cone_angles,
                          pose_feasible, segment_distance_exact, segment_distance_sampled)
from .differential import (JacobianPair, SingularityReport, angular_velocity, condition_number,
                           inverse_jacobian, isotropy_check, jacobians, joint_velocity,
                           singularity_report)
from .errors import *  # noqa: F401,F403
from .kinematics import (direct_kinematics, direct_kinematics_all, direct_kinematics_numeric,
                         inverse_kinematics, inverse_kinematics_all)
from .mechanism import (DesignVariant, JointAngles, LegStates, MechanismGeometry,
                        closure_residuals, home_pose, leg_points, make_geometry)
from .orientation import (RpyAngles, TiltTorsion, orientation_to_rpy, orientation_to_tnt,
                          rpy_to_orientation, tnt_to_orientation)
from .workspace import (SweepParams, WorkspaceMap, WorkspaceSlice, boundary_ray,
                        check_design_targets, embed_polar, joint_space_cloud, slice_centroid,
                        sweep_workspace)

__version__ = "0.1.0"
