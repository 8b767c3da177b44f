# Copyright 2026 The demotraj Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Trajectory toolkit for handheld-gripper demonstrations.

Poses are float64 rows ``[x, y, z, qx, qy, qz, qw]``; bulk poses are
``(N, 7)`` arrays.
"""

from ._core import (
    CompensationParams,
    ConfigError,
    Error,
    GripperCalib,
    InputError,
    IoError,
    KinematicChain,
    ParseError,
    SchemaError,
    UnreachableTargetError,
    camera_pose_in_base,
    compensation_distance,
    compose,
    corrected_tcp,
    distance_from_width,
    generate,
    greatest_common_frequency,
    integrate_relative,
    inverse,
    list_hierarchy,
    load_chain,
    process,
    read_episode,
    read_pose_log,
    relative_steps,
    tcp_from_camera,
    translation_error,
    validate_episode,
    width_from_distance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
