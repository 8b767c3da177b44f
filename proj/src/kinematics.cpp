// Copyright 2026 The demotraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "demotraj/kinematics.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "demotraj/error.hpp"

namespace demotraj {
namespace {

constexpr double kMaxDamping = 1e3;

using Vector6d = Eigen::Matrix<double, 6, 1>;

void CheckSize(const KinematicChain& chain, const JointVector& theta) {
  if (static_cast<std::size_t>(theta.size()) != chain.dof()) {
    throw DomainError("joint vector has " + std::to_string(theta.size()) +
                      " entries, chain has " + std::to_string(chain.dof()) +
                      " joints");
  }
}

void CheckLimits(const KinematicChain& chain, const JointVector& theta) {
  CheckSize(chain, theta);
  for (std::size_t j = 0; j < chain.dof(); ++j) {
    const Joint& joint = chain.joints[j];
    const double q = theta[static_cast<Eigen::Index>(j)];
    if (!(q >= joint.lower && q <= joint.upper)) {
      throw DomainError("joint '" + joint.name + "' = " + std::to_string(q) +
                        " outside [" + std::to_string(joint.lower) + ", " +
                        std::to_string(joint.upper) + "]");
    }
  }
}

// FK that also records the world axis and anchor of every joint.
Pose ForwardWithFrames(const KinematicChain& chain, const JointVector& theta,
                       std::vector<Vec3>* axes, std::vector<Vec3>* anchors) {
  Pose t;
  for (std::size_t j = 0; j < chain.dof(); ++j) {
    const Joint& joint = chain.joints[j];
    t = compose(t, joint.origin);
    if (axes != nullptr) {
      axes->push_back(t.orientation.rotate(joint.axis));
      anchors->push_back(t.position);
    }
    t.orientation =
        t.orientation * UnitQuaternion::from_axis_angle(
                            joint.axis, theta[static_cast<Eigen::Index>(j)]);
  }
  return compose(t, chain.flange_to_gripper);
}

Jacobian JacobianAt(const KinematicChain& chain, const JointVector& theta,
                    Pose* tcp) {
  std::vector<Vec3> axes;
  std::vector<Vec3> anchors;
  axes.reserve(chain.dof());
  anchors.reserve(chain.dof());
  const Pose end = ForwardWithFrames(chain, theta, &axes, &anchors);
  Jacobian jac(6, static_cast<Eigen::Index>(chain.dof()));
  for (std::size_t j = 0; j < chain.dof(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    jac.block<3, 1>(0, c) = axes[j].cross(end.position - anchors[j]);
    jac.block<3, 1>(3, c) = axes[j];
  }
  if (tcp != nullptr) *tcp = end;
  return jac;
}

// Position error and world-frame rotation vector taking `current` to `target`.
Vector6d PoseError(const Pose& target, const Pose& current) {
  Vector6d e;
  e.head<3>() = target.position - current.position;
  e.tail<3>() = (target.orientation * current.orientation.inverse()).rotation_vector();
  return e;
}

}  // namespace

void KinematicChain::validate() const {
  if (joints.empty()) throw ConfigError("kinematic chain has no joints");
  for (const Joint& j : joints) {
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
      throw ConfigError("joint '" + j.name + "' axis is not unit length");
    }
    if (!(j.lower < j.upper)) {
      throw ConfigError("joint '" + j.name + "' needs lower < upper");
    }
    if (!j.origin.is_finite()) {
      throw ConfigError("joint '" + j.name + "' origin is not finite");
    }
  }
  if (!flange_to_gripper.is_finite()) {
    throw ConfigError("flange_to_gripper is not finite");
  }
}

bool KinematicChain::within_limits(const JointVector& theta) const {
  if (static_cast<std::size_t>(theta.size()) != dof()) return false;
  for (std::size_t j = 0; j < dof(); ++j) {
    const double q = theta[static_cast<Eigen::Index>(j)];
    if (!(q >= joints[j].lower && q <= joints[j].upper)) return false;
  }
  return true;
}

JointVector KinematicChain::clamp(const JointVector& theta) const {
  JointVector out = theta;
  for (std::size_t j = 0; j < dof(); ++j) {
    auto& q = out[static_cast<Eigen::Index>(j)];
    q = std::min(std::max(q, joints[j].lower), joints[j].upper);
  }
  return out;
}

void IkConfig::validate() const {
  if (max_iters < 1) throw ConfigError("ik max_iters must be >= 1");
  if (!(pos_tol_m > 0.0) || !(rot_tol_rad > 0.0) || !(damping > 0.0) ||
      !(step_limit_rad > 0.0)) {
    throw ConfigError("ik tolerances, damping and step limit must be positive");
  }
  if (!(position_weight >= 0.0) || !(orientation_weight >= 0.0) ||
      position_weight + orientation_weight == 0.0) {
    throw ConfigError("ik weights must be >= 0 and not both zero");
  }
}

Pose forward_kinematics(const KinematicChain& chain, const JointVector& theta) {
  CheckLimits(chain, theta);
  return ForwardWithFrames(chain, theta, nullptr, nullptr);
}

Jacobian jacobian(const KinematicChain& chain, const JointVector& theta) {
  CheckLimits(chain, theta);
  return JacobianAt(chain, theta, nullptr);
}

IkResult solve_ik(const KinematicChain& chain, const Pose& target,
                  const JointVector& seed, const IkConfig& cfg) {
  cfg.validate();
  CheckLimits(chain, seed);

  Vector6d weights;
  weights << Eigen::Vector3d::Constant(cfg.position_weight),
      Eigen::Vector3d::Constant(cfg.orientation_weight);
  const bool check_pos = cfg.position_weight > 0.0;
  const bool check_rot = cfg.orientation_weight > 0.0;

  IkResult cur;
  cur.theta = seed;
  Pose fk;
  Jacobian jac = JacobianAt(chain, cur.theta, &fk);
  Vector6d err = PoseError(target, fk);
  double cost = err.cwiseProduct(weights).squaredNorm();

  auto residuals = [&](IkResult& r, const Pose& at) {
    r.position_residual = (target.position - at.position).norm();
    r.rotation_residual = angular_distance(target.orientation, at.orientation);
  };
  auto converged = [&](const IkResult& r) {
    return (!check_pos || r.position_residual <= cfg.pos_tol_m) &&
           (!check_rot || r.rotation_residual <= cfg.rot_tol_rad);
  };

  residuals(cur, fk);
  // Damping grows after a rejected step and relaxes back after an accepted one.
  double lambda = cfg.damping;
  for (int iter = 0; iter < cfg.max_iters && !converged(cur); ++iter) {
    const double lambda_sq = lambda * lambda;
    if (!jac.allFinite()) {
      throw NumericalError("non-finite Jacobian at iteration " + std::to_string(iter));
    }
    const Jacobian jw = weights.asDiagonal() * jac;
    const Vector6d ew = weights.cwiseProduct(err);
    const Eigen::Matrix<double, 6, 6> normal =
        jw * jw.transpose() + lambda_sq * Eigen::Matrix<double, 6, 6>::Identity();
    JointVector step = jw.transpose() * normal.ldlt().solve(ew);
    if (!step.allFinite()) {
      throw NumericalError("non-finite IK step at iteration " + std::to_string(iter));
    }
    const double largest = step.cwiseAbs().maxCoeff();
    if (largest > cfg.step_limit_rad) step *= cfg.step_limit_rad / largest;

    // Backtrack until the clamped step lowers the weighted residual.
    bool accepted = false;
    double alpha = 1.0;
    for (int tries = 0; tries < 12 && !accepted; ++tries, alpha *= 0.5) {
      const JointVector cand = chain.clamp(cur.theta + alpha * step);
      Pose cand_fk;
      Jacobian cand_jac = JacobianAt(chain, cand, &cand_fk);
      const Vector6d cand_err = PoseError(target, cand_fk);
      const double cand_cost = cand_err.cwiseProduct(weights).squaredNorm();
      if (cand_cost < cost) {
        cur.theta = cand;
        jac = std::move(cand_jac);
        err = cand_err;
        cost = cand_cost;
        residuals(cur, cand_fk);
        accepted = true;
      }
    }
    cur.iterations = iter + 1;
    if (accepted) {
      lambda = std::max(cfg.damping, lambda * 0.1);
    } else if (lambda < kMaxDamping) {
      lambda *= 10.0;
    } else {
      break;
    }
  }

  if (!converged(cur)) {
    throw UnreachableTargetError(cur.position_residual, cur.rotation_residual);
  }
  return cur;
}

JointTrajectory joint_trajectory(const KinematicChain& chain,
                                 std::span<const Pose> tcp,
                                 const JointVector& seed0, const IkConfig& cfg) {
  if (tcp.empty()) throw InputError("joint_trajectory: empty TCP trajectory");
  JointTrajectory out;
  out.joints.reserve(tcp.size());
  for (std::size_t i = 0; i < tcp.size(); ++i) {
    const JointVector& seed = i == 0 ? seed0 : out.joints.back();
    try {
      out.joints.push_back(solve_ik(chain, tcp[i], seed, cfg).theta);
    } catch (const UnreachableTargetError& e) {
      throw UnreachableTargetError(e.position_residual(), e.rotation_residual(), i);
    } catch (const NumericalError& e) {
      throw NumericalError("frame " + std::to_string(i) + ": " + e.what());
    }
    if (i > 0) {
      const double jump =
          (out.joints[i] - out.joints[i - 1]).cwiseAbs().maxCoeff();
      out.step_jumps.push_back(jump);
      out.max_step_jump = std::max(out.max_step_jump, jump);
    }
  }
  return out;
}

}  // namespace demotraj
