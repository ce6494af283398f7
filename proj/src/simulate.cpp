// Copyright 2026 The objdyn Authors
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

#include "objdyn/simulate.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/QR>

#include "objdyn/error.hpp"

namespace objdyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPlaceholderSigma = 1e-6;

// Distributes net wrenches over a fixed set of attachment points.
class GraspMap {
 public:
  explicit GraspMap(std::span<const Vec3> attachments) : points_(attachments.begin(), attachments.end()) {
    const auto n = static_cast<Eigen::Index>(points_.size());
    Eigen::MatrixXd g(6, 3 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      g.block<3, 3>(0, 3 * i).setIdentity();
      g.block<3, 3>(3, 3 * i) = skew(points_[i]);
    }
    pinv_ = g.completeOrthogonalDecomposition().pseudoInverse();
    null_ = Eigen::MatrixXd::Identity(3 * n, 3 * n) - pinv_ * g;
    Vec3 c = Vec3::Zero();
    for (const auto& p : points_) c += p;
    centre_ = c / static_cast<double>(n);
  }

  std::vector<Vec3> distribute(const Wrench& w, double squeeze) const {
    const auto n = static_cast<Eigen::Index>(points_.size());
    Eigen::VectorXd f = pinv_ * w.vector();
    if (squeeze != 0.0) {
      Eigen::VectorXd s(3 * n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Vec3 d = centre_ - points_[i];
        s.segment<3>(3 * i) = d.norm() > 0.0 ? Vec3(squeeze * d.normalized()) : Vec3::Zero();
      }
      f += null_ * s;
    }
    std::vector<Vec3> out(points_.size());
    for (Eigen::Index i = 0; i < n; ++i) out[i] = f.segment<3>(3 * i);
    return out;
  }

 private:
  std::vector<Vec3> points_;
  Eigen::MatrixXd pinv_;
  Eigen::MatrixXd null_;
  Vec3 centre_;
};

Wrench wrench_of(std::span<const Vec3> points, std::span<const Vec3> forces) {
  Wrench w;
  for (std::size_t i = 0; i < points.size(); ++i) {
    w.force += forces[i];
    w.torque += points[i].cross(forces[i]);
  }
  return w;
}

struct Derivative {
  Eigen::Vector4d qdot;  // (w, x, y, z)
  Vec3 xdot;
  Vec3 vdot;
  Vec3 wdot;
};

struct RawState {
  Eigen::Quaterniond q;
  Vec3 x;
  Vec3 v;
  Vec3 w;
};

Derivative derivative(const RawState& s, const ForwardDynamics& fd, const Wrench& applied, const Vec3& g) {
  const Eigen::Quaterniond qn = s.q.normalized();
  const Vec3 g_body = qn.conjugate() * g;
  const auto [a, wdot] = fd.solve(s.w, applied, g_body);
  const Eigen::Quaterniond qw(0.0, s.w.x(), s.w.y(), s.w.z());
  const Eigen::Quaterniond dq = s.q * qw;
  Derivative d;
  d.qdot << 0.5 * dq.w(), 0.5 * dq.x(), 0.5 * dq.y(), 0.5 * dq.z();
  d.xdot = s.v;
  d.vdot = qn * a;
  d.wdot = wdot;
  return d;
}

RawState advance(const RawState& s, const Derivative& d, double h) {
  RawState out;
  out.q = Eigen::Quaterniond(s.q.w() + h * d.qdot[0], s.q.x() + h * d.qdot[1], s.q.y() + h * d.qdot[2],
                             s.q.z() + h * d.qdot[3]);
  out.x = s.x + h * d.xdot;
  out.v = s.v + h * d.vdot;
  out.w = s.w + h * d.wdot;
  return out;
}

// Classic RK4; `wrench_at(τ)` gives the applied wrench at fraction τ ∈ {0, ½, 1} of the step.
SimState rk4(const SimState& state, const ForwardDynamics& fd, const std::function<Wrench(double)>& wrench_at,
             double dt, const Vec3& g) {
  const RawState s0{state.pose.rotation.quaternion(), state.pose.translation, state.velocity, state.omega};
  const Wrench w0 = wrench_at(0.0);
  const Wrench wh = wrench_at(0.5);
  const Wrench w1 = wrench_at(1.0);
  const Derivative k1 = derivative(s0, fd, w0, g);
  const Derivative k2 = derivative(advance(s0, k1, 0.5 * dt), fd, wh, g);
  const Derivative k3 = derivative(advance(s0, k2, 0.5 * dt), fd, wh, g);
  const Derivative k4 = derivative(advance(s0, k3, dt), fd, w1, g);
  Derivative sum;
  sum.qdot = (k1.qdot + 2.0 * k2.qdot + 2.0 * k3.qdot + k4.qdot) / 6.0;
  sum.xdot = (k1.xdot + 2.0 * k2.xdot + 2.0 * k3.xdot + k4.xdot) / 6.0;
  sum.vdot = (k1.vdot + 2.0 * k2.vdot + 2.0 * k3.vdot + k4.vdot) / 6.0;
  sum.wdot = (k1.wdot + 2.0 * k2.wdot + 2.0 * k3.wdot + k4.wdot) / 6.0;
  const RawState s1 = advance(s0, sum, dt);
  SimState out;
  out.pose = Pose{Rotation(s1.q), s1.x};
  out.velocity = s1.v;
  out.omega = s1.w;
  return out;
}

ExcitationProfile scaled(const ExcitationProfile& p) {
  ExcitationProfile s = p;
  s.translation_amplitude *= p.amplitude_scale;
  s.rotation_amplitude *= p.amplitude_scale;
  s.vibration_translation *= p.amplitude_scale;
  s.vibration_rotation *= p.amplitude_scale;
  return s;
}

// value, first and second derivative of amp·(1 − cos wt) + vib·sin(wv t + phase)
struct Channel {
  double value, rate, accel;
};

Channel channel(double amp, double freq, double vib, double vib_freq, double phase, double t) {
  const double w = kTwoPi * freq;
  const double wv = kTwoPi * vib_freq;
  const double sv = std::sin(wv * t + phase);
  const double cv = std::cos(wv * t + phase);
  return Channel{amp * (1.0 - std::cos(w * t)) + vib * (sv - std::sin(phase)),
                 amp * w * std::sin(w * t) + vib * wv * cv,
                 amp * w * w * std::cos(w * t) - vib * wv * wv * sv};
}

}  // namespace

void RigidBodyModel::validate() const {
  const auto v = consistency_violations(params, hull);
  if (!v.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "model: parameters violate " + v.front().constraint);
  }
  for (const auto& a : attachments) {
    if (!hull.contains(a, 1e-6)) throw Error(ErrorKind::kInvalidArgument, "model: attachment point outside hull");
  }
  if (attachments.empty()) throw Error(ErrorKind::kInvalidArgument, "model: at least one attachment required");
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidArgument, "sim config: dt must be positive");
  if (!(sample_period >= dt)) throw Error(ErrorKind::kInvalidArgument, "sim config: sample period must be >= dt");
  const double ratio = sample_period / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-6) {
    throw Error(ErrorKind::kInvalidArgument, "sim config: sample period must be a multiple of dt");
  }
  if (!(duration > 0.0)) throw Error(ErrorKind::kInvalidArgument, "sim config: duration must be positive");
}

ReferenceMotion reference_motion(const ExcitationProfile& profile, double t) {
  const ExcitationProfile p = scaled(profile);
  ReferenceMotion ref;
  Vec3 xdot, xddot;
  for (int i = 0; i < 3; ++i) {
    const Channel c = channel(p.translation_amplitude[i], p.translation_frequency[i], p.vibration_translation[i],
                              p.vibration_frequency, 2.1 * i, t);
    ref.pose.translation[i] = c.value;
    xdot[i] = c.rate;
    xddot[i] = c.accel;
  }
  // ZYX Euler angles: yaw ψ, pitch θ, roll φ.
  Channel e[3];
  for (int i = 0; i < 3; ++i) {
    e[i] = channel(p.rotation_amplitude[i], p.rotation_frequency[i], p.vibration_rotation[i],
                   1.17 * p.vibration_frequency, 0.7 + 1.3 * i, t);
  }
  const double ps = e[0].value, th = e[1].value, ph = e[2].value;
  const double dps = e[0].rate, dth = e[1].rate, dph = e[2].rate;
  const double ddps = e[0].accel, ddth = e[1].accel, ddph = e[2].accel;
  const double st = std::sin(th), ct = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);

  ref.pose.rotation = Rotation::about_axis(Vec3::UnitZ(), ps) * Rotation::about_axis(Vec3::UnitY(), th) *
                      Rotation::about_axis(Vec3::UnitX(), ph);

  TrueKinematics& k = ref.kinematics;
  k.omega = Vec3(dph - dps * st, dth * cp + dps * ct * sp, -dth * sp + dps * ct * cp);
  k.angular_accel = Vec3(ddph - ddps * st - dps * dth * ct,
                         ddth * cp - dth * dph * sp + ddps * ct * sp - dps * dth * st * sp + dps * dph * ct * cp,
                         -ddth * sp - dth * dph * cp + ddps * ct * cp - dps * dth * st * cp - dps * dph * ct * sp);
  k.linear_velocity = ref.pose.rotation.unrotate(xdot);
  k.linear_accel = ref.pose.rotation.unrotate(xddot);
  return ref;
}

ForwardDynamics::ForwardDynamics(const InertialParams& params) : mm_(MassMoments::from(params)) {
  spatial_.setZero();
  spatial_.topLeftCorner<3, 3>() = mm_.mass * Mat3::Identity();
  spatial_.topRightCorner<3, 3>() = -skew(mm_.first_moment);
  spatial_.bottomLeftCorner<3, 3>() = skew(mm_.first_moment);
  spatial_.bottomRightCorner<3, 3>() = mm_.inertia_body;
  ldlt_.compute(spatial_);
  const auto d = ldlt_.vectorD();
  const double scale = spatial_.diagonal().cwiseAbs().maxCoeff();
  if (ldlt_.info() != Eigen::Success || !(d.minCoeff() > 1e-12 * scale)) {
    throw Error(ErrorKind::kSingularInertia, "forward dynamics: spatial inertia is singular or indefinite");
  }
}

std::pair<Vec3, Vec3> ForwardDynamics::solve(const Vec3& omega, const Wrench& applied, const Vec3& g_body) const {
  const Vec3& c = mm_.first_moment;
  Vec6 rhs;
  rhs << applied.force + mm_.mass * g_body - omega.cross(omega.cross(c)),
      applied.torque + c.cross(g_body) - omega.cross(mm_.inertia_body * omega);
  const Vec6 acc = ldlt_.solve(rhs);
  return {acc.head<3>(), acc.tail<3>()};
}

SimState step(const SimState& state, const RigidBodyModel& model, std::span<const Vec3> forces, double dt,
              const Vec3& world_gravity) {
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidArgument, "step: dt must be positive");
  if (forces.size() != model.attachments.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "step: one force per attachment required");
  }
  const ForwardDynamics fd(model.params);
  const Wrench held = wrench_of(model.attachments, forces);
  return rk4(state, fd, [&](double) { return held; }, dt, world_gravity);
}

std::vector<Vec3> distribute_wrench(std::span<const Vec3> attachments, const Wrench& wrench, double squeeze) {
  if (attachments.empty()) throw Error(ErrorKind::kInvalidArgument, "distribute_wrench: no contacts");
  return GraspMap(attachments).distribute(wrench, squeeze);
}

namespace {

Wrench reference_wrench(const MassMoments& mm, const ExcitationProfile& profile, double t, const Vec3& gravity) {
  const ReferenceMotion ref = reference_motion(profile, t);
  const KinematicWindow k = instantaneous_window(ref.pose, ref.kinematics.omega, ref.kinematics.angular_accel,
                                                 ref.kinematics.linear_accel);
  return newton_euler_terms(mm, k, gravity_in_frame(gravity, ref.pose));
}

}  // namespace

std::vector<Vec3> synthesize_grasp_forces(const RigidBodyModel& model, double t, const ExcitationProfile& profile,
                                          const Vec3& world_gravity) {
  const Wrench w = reference_wrench(MassMoments::from(model.params), profile, t, world_gravity);
  return distribute_wrench(model.attachments, w, profile.squeeze_force);
}

Trajectory run_sim(const RigidBodyModel& model, const SimConfig& config) {
  model.validate();
  config.validate();
  const ForwardDynamics fd(model.params);
  const MassMoments mm = MassMoments::from(model.params);
  const GraspMap grasp(model.attachments);
  const auto ratio = static_cast<long>(std::llround(config.sample_period / config.dt));
  const auto n_samples = static_cast<long>(std::floor(config.duration / config.sample_period + 1e-9));

  auto forces_at = [&](double t) {
    return grasp.distribute(reference_wrench(mm, config.profile, t, config.gravity), config.profile.squeeze_force);
  };

  const ReferenceMotion start = reference_motion(config.profile, 0.0);
  SimState state;
  state.pose = start.pose;
  state.omega = start.kinematics.omega;
  state.velocity = start.pose.rotation.rotate(start.kinematics.linear_velocity);

  Trajectory traj;
  traj.metadata.seed = config.seed;
  traj.metadata.noise_sigma2 = 0.0;
  traj.metadata.source = "sim";
  traj.metadata.gravity = config.gravity;
  traj.samples.reserve(static_cast<std::size_t>(n_samples));

  for (long s = 0; s < n_samples; ++s) {
    const double t = static_cast<double>(s) * config.sample_period;
    const std::vector<Vec3> f = forces_at(t);
    const Wrench applied = wrench_of(model.attachments, f);
    const auto [a, wdot] = fd.solve(state.omega, applied, gravity_in_frame(config.gravity, state.pose));

    TrajectorySample sample;
    sample.pose = TimedPose{state.pose, t};
    for (std::size_t i = 0; i < f.size(); ++i) {
      sample.contacts.push_back(ContactObservation{static_cast<int>(i), model.attachments[i], f[i], kPlaceholderSigma});
    }
    sample.truth = TrueKinematics{state.omega, wdot, state.pose.rotation.unrotate(state.velocity), a};
    traj.samples.push_back(std::move(sample));

    if (s + 1 == n_samples) break;
    for (long k = 0; k < ratio; ++k) {
      const double t0 = t + static_cast<double>(k) * config.dt;
      const double h = config.dt;
      state = rk4(state, fd, [&](double frac) { return wrench_of(model.attachments, forces_at(t0 + frac * h)); }, h,
                  config.gravity);
    }
  }
  return traj;
}

Trajectory add_force_noise(const Trajectory& traj, double sigma2, std::uint64_t seed) {
  if (sigma2 < 0.0) throw Error(ErrorKind::kInvalidArgument, "add_force_noise: variance must be non-negative");
  Trajectory out = traj;
  if (sigma2 == 0.0) return out;
  const double sigma = std::sqrt(sigma2);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& s : out.samples) {
    for (auto& c : s.contacts) {
      for (int a = 0; a < 3; ++a) c.force[a] += noise(rng);
      c.force_sigma = sigma;
    }
  }
  out.metadata.noise_sigma2 = sigma2;
  out.metadata.seed = seed;
  return out;
}

Trajectory add_pose_noise(const Trajectory& traj, double rot_sigma, double trans_sigma, std::uint64_t seed) {
  if (rot_sigma < 0.0 || trans_sigma < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "add_pose_noise: sigmas must be non-negative");
  }
  Trajectory out = traj;
  if (rot_sigma == 0.0 && trans_sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (auto& s : out.samples) {
    Vec6 xi;
    for (int a = 0; a < 3; ++a) xi[a] = rot_sigma * unit(rng);
    for (int a = 3; a < 6; ++a) xi[a] = trans_sigma * unit(rng);
    s.pose.pose = s.pose.pose * exp_pose(xi);
  }
  return out;
}

Trajectory to_wrist_ft_style(const Trajectory& traj) {
  Trajectory out = traj;
  out.metadata.source = "wrist-ft-style";
  for (auto& s : out.samples) {
    const Wrench w = net_contact_wrench(s.contacts);
    double sigma = 0.0;
    for (const auto& c : s.contacts) sigma = std::max(sigma, c.force_sigma);
    // Unit force f ⊥ τ applied at p = f × τ gives p × f = τ.
    Vec3 f = Vec3::Zero();
    Vec3 p = Vec3::Zero();
    if (w.torque.norm() > 0.0) {
      const Vec3 t = w.torque.normalized();
      const Vec3 seed = std::abs(t.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
      f = (seed - seed.dot(t) * t).normalized();
      p = f.cross(w.torque);
    }
    s.contacts = {ContactObservation{0, Vec3::Zero(), w.force - f, sigma},
                  ContactObservation{1, p, f, sigma}};
  }
  return out;
}

}  // namespace objdyn
