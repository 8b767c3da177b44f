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

import math

import numpy as np
import pytest

import demotraj


def random_poses(rng, n):
    pos = rng.uniform(-1.0, 1.0, size=(n, 3))
    quat = rng.normal(size=(n, 4))
    quat /= np.linalg.norm(quat, axis=1, keepdims=True)
    return np.hstack([pos, quat])


def test_gcf():
    assert demotraj.greatest_common_frequency([200, 60]) == 20
    assert demotraj.greatest_common_frequency([30, 30]) == 30


def test_compose_with_inverse_is_identity():
    rng = np.random.default_rng(0)
    p = random_poses(rng, 1)[0]
    ident = demotraj.compose(p, demotraj.inverse(p))
    np.testing.assert_allclose(ident[:3], 0.0, atol=1e-12)
    assert abs(abs(ident[6]) - 1.0) < 1e-12


@pytest.mark.parametrize("frame", ["base", "local"])
def test_relative_roundtrip(frame):
    rng = np.random.default_rng(1)
    poses = random_poses(rng, 200)
    steps = demotraj.relative_steps(poses, frame=frame)
    assert steps.shape == (199, 7)
    back = demotraj.integrate_relative(poses[0], steps, frame=frame)
    np.testing.assert_allclose(back[:, :3], poses[:, :3], atol=1e-9)
    dots = np.abs(np.sum(back[:, 3:] * poses[:, 3:], axis=1))
    np.testing.assert_allclose(dots, 1.0, atol=1e-9)


def test_identity_tracker_gives_configured_tcp():
    base = np.array([0.4, 0.2, 0.3, 0.0, 0.0, math.sin(0.25), math.cos(0.25)])
    offset = np.array([0.0, -0.06, 0.08])
    identity = np.array([0, 0, 0, 0, 0, 0, 1.0])
    cam = demotraj.camera_pose_in_base(base, offset, identity)
    tcp = demotraj.tcp_from_camera(cam, offset)
    np.testing.assert_allclose(tcp, base, atol=1e-12)


def test_width_law():
    calib = demotraj.GripperCalib(600.0, 200.0, 80.0, 540.0)
    assert demotraj.width_from_distance(600.0, calib) == 80.0
    assert demotraj.width_from_distance(200.0, calib) == 0.0
    assert demotraj.width_from_distance(400.0, calib) == 40.0
    assert demotraj.distance_from_width(40.0, calib) == pytest.approx(400.0)
    with pytest.raises(demotraj.ConfigError):
        demotraj.GripperCalib(200.0, 600.0, 80.0)


def test_compensation():
    params = demotraj.CompensationParams(0.012, 0.0015, 0.085)
    assert demotraj.compensation_distance(0.0, params) == 0.012
    assert demotraj.compensation_distance(0.085, params) == 0.0015
    pose = np.array([0.1, 0.2, 0.3, 0, 0, 0, 1.0])
    np.testing.assert_allclose(demotraj.corrected_tcp(pose, 0.01)[:3], [0.1, 0.2, 0.29],
                               atol=1e-15)


def test_kinematics(data_dir):
    chain = demotraj.load_chain(data_dir / "arm6.chain")
    assert chain.dof == 6
    q = np.array([0.3, -1.2, 1.1, -1.4, -1.5, 0.2])
    target = chain.forward(q)
    sol = chain.solve_ik(target, q + 0.1)
    np.testing.assert_allclose(chain.forward(sol["theta"])[:3], target[:3], atol=1e-6)
    assert sol["position_residual"] <= 1e-6
    assert chain.jacobian(q).shape == (6, 6)
    with pytest.raises(demotraj.UnreachableTargetError):
        chain.solve_ik(np.array([5.0, 0, 0, 0, 0, 0, 1]), q)


def test_generate_noiseless_matches_truth(data_dir):
    sim = demotraj.generate(data_dir / "sim_spec.json", seed=2)
    np.testing.assert_array_equal(sim["poses"]["pose"], sim["truth"]["pose"])
    assert sim["poses"]["pose"].shape == (2001, 7)
    assert len(sim["frame_t"]) == len(sim["frame_width_mm"]) == 601


def test_errors_map_to_python(tmp_path):
    with pytest.raises(demotraj.IoError):
        demotraj.read_pose_log(tmp_path / "missing.csv")
    with pytest.raises(demotraj.Error):
        demotraj.read_episode(tmp_path / "missing.hdf5")
    with pytest.raises(ValueError):
        demotraj.compose(np.zeros(6), np.array([0, 0, 0, 0, 0, 0, 1.0]))


def test_translation_error():
    est = np.array([[0.0, 0, 0, 0, 0, 0, 1], [0.003, 0.004, 0, 0, 0, 0, 1]])
    ref = np.array([[0.0, 0, 0, 0, 0, 0, 1], [0.0, 0, 0, 0, 0, 0, 1]])
    stats = demotraj.translation_error(est, ref)
    assert stats["count"] == 2
    assert stats["max_mm"] == pytest.approx(5.0)
    assert stats["rmse_mm"] == pytest.approx(math.sqrt(12.5))
