#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bbx/errors.hpp"
#include "bbx/matrix.hpp"
#include "bbx/signal.hpp"
#include "bbx/stencil.hpp"
#include "bbx/tracks.hpp"

namespace bbx {

enum class TrajectorySource {
  rect_center,
  pose_translation,
  pose_rotation,
  landmark_point,
};

inline const char* to_string(TrajectorySource s) {
  switch (s) {
    case TrajectorySource::rect_center: return "rect_center";
    case TrajectorySource::pose_translation: return "pose_translation";
    case TrajectorySource::pose_rotation: return "pose_rotation";
    case TrajectorySource::landmark_point: return "landmark_point";
  }
  return "rect_center";
}

// One moving point (2D or 3D) extracted from a track.
struct Trajectory {
  Matrix positions;  // frames x dims
  double fps = 0.0;
  TrajectorySource source = TrajectorySource::rect_center;
  std::optional<std::size_t> point_index;  // set for landmark trajectories
  bool caution_2d = false;  // 2D landmarks are pose/perspective confounded
  std::string units;

  std::size_t frames() const { return positions.rows(); }
  std::size_t dims() const { return positions.cols(); }

  void validate() const {
    if (dims() != 2 && dims() != 3)
      throw invalid_argument("trajectory must be 2D or 3D, got " +
                             std::to_string(dims()) + " dims");
    if (!(fps > 0.0))
      throw invalid_argument("trajectory fps must be positive");
  }
};

struct KinematicsReport {
  std::vector<double> range_of_motion;  // per channel, max - min
  double total_path_length = 0.0;
  double avg_speed = 0.0;
  double avg_acceleration = 0.0;
  double avg_jerk = 0.0;
  std::optional<double> ldlj;  // absent when peak speed is zero
  double duration_s = 0.0;
  bool caution_2d = false;
};

inline Trajectory trajectory_from_rects(const RectTrack& r) {
  const Signal& s = r.signal();
  if (s.frames() == 0)
    throw invalid_argument("rect track has no frames");
  Trajectory t;
  t.positions = Matrix(s.frames(), 2);
  for (std::size_t f = 0; f < s.frames(); ++f) {
    t.positions(f, 0) = r.x(f) + r.w(f) / 2.0;
    t.positions(f, 1) = r.y(f) + r.h(f) / 2.0;
  }
  t.fps = s.fps;
  t.source = TrajectorySource::rect_center;
  t.units = s.units.empty() ? "px" : s.units;
  return t;
}

inline Trajectory trajectory_from_pose(const PoseTrack& p, bool angular) {
  const Signal& s = p.signal();
  Trajectory t;
  t.positions = Matrix(s.frames(), 3);
  const std::size_t base = angular ? 0 : 3;  // pitch,yaw,roll | tx,ty,tz
  for (std::size_t f = 0; f < s.frames(); ++f)
    for (std::size_t c = 0; c < 3; ++c) t.positions(f, c) = s.data(f, base + c);
  t.fps = s.fps;
  t.source = angular ? TrajectorySource::pose_rotation
                     : TrajectorySource::pose_translation;
  t.units = angular ? "rad" : (s.units.empty() ? "model" : s.units);
  return t;
}

// One trajectory per landmark point, in template order. 2D landmark motion
// mixes expression with head pose and camera perspective, so those
// trajectories carry a caution flag into every downstream report.
inline std::vector<Trajectory> trajectories_from_landmarks(const LandmarkTrack& l) {
  const Signal& s = l.signal();
  std::vector<Trajectory> out;
  out.reserve(l.points());
  for (std::size_t p = 0; p < l.points(); ++p) {
    Trajectory t;
    t.positions = Matrix(s.frames(), l.dims());
    for (std::size_t f = 0; f < s.frames(); ++f)
      for (std::size_t d = 0; d < l.dims(); ++d)
        t.positions(f, d) = l.coord(f, p, d);
    t.fps = s.fps;
    t.source = TrajectorySource::landmark_point;
    t.point_index = p;
    t.caution_2d = l.dims() == 2;
    t.units = s.units;
    out.push_back(std::move(t));
  }
  return out;
}

namespace detail {

inline double mean_row_norm(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t f = 0; f < m.rows(); ++f) {
    double sq = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) sq += m(f, c) * m(f, c);
    acc += std::sqrt(sq);
  }
  return acc / static_cast<double>(m.rows());
}

// Trajectory derivatives use wider (4th-order) central stencils than the
// generic signal derivative: the smoothness metrics integrate squared jerk,
// where 2nd-order differentiation error would dominate the result.
inline Matrix traj_derivative(const Matrix& pos, double fps, int order) {
  return differentiate(pos, fps, order, fourth_order_profile(order));
}

}  // namespace detail

// Biomechanics summary of one trajectory: extent, path, speed, acceleration,
// jerk and the log dimensionless jerk smoothness index
//   ldlj = -ln( (T^3 / v_peak^2) * integral ||jerk||^2 dt )
// with the integral taken by trapezoidal rule over the frame grid.
inline KinematicsReport motion_kinematics(const Trajectory& traj) {
  traj.validate();
  constexpr std::size_t kMinFrames = 5;  // third derivative needs order+2
  if (traj.frames() < kMinFrames)
    throw invalid_argument("motion_kinematics requires at least " +
                           std::to_string(kMinFrames) + " frames, got " +
                           std::to_string(traj.frames()));

  const std::size_t n = traj.frames();
  const std::size_t dims = traj.dims();

  // Work on positions relative to the first frame. All reported metrics are
  // translation invariant, and centering keeps them that way in floating
  // point as well.
  Matrix pos(n, dims);
  for (std::size_t f = 0; f < n; ++f)
    for (std::size_t c = 0; c < dims; ++c)
      pos(f, c) = traj.positions(f, c) - traj.positions(0, c);

  KinematicsReport rep;
  rep.caution_2d = traj.caution_2d;
  rep.duration_s = static_cast<double>(n - 1) / traj.fps;

  rep.range_of_motion.resize(dims);
  for (std::size_t c = 0; c < dims; ++c) {
    double lo = pos(0, c), hi = pos(0, c);
    for (std::size_t f = 1; f < n; ++f) {
      lo = std::min(lo, pos(f, c));
      hi = std::max(hi, pos(f, c));
    }
    rep.range_of_motion[c] = hi - lo;
  }

  for (std::size_t f = 1; f < n; ++f) {
    double sq = 0.0;
    for (std::size_t c = 0; c < dims; ++c) {
      const double d = pos(f, c) - pos(f - 1, c);
      sq += d * d;
    }
    rep.total_path_length += std::sqrt(sq);
  }

  const Matrix vel = detail::traj_derivative(pos, traj.fps, 1);
  const Matrix acc = detail::traj_derivative(pos, traj.fps, 2);
  const Matrix jrk = detail::traj_derivative(pos, traj.fps, 3);

  rep.avg_speed = detail::mean_row_norm(vel);
  rep.avg_acceleration = detail::mean_row_norm(acc);
  rep.avg_jerk = detail::mean_row_norm(jrk);

  double peak_speed_sq = 0.0;
  for (std::size_t f = 0; f < n; ++f) {
    double sq = 0.0;
    for (std::size_t c = 0; c < dims; ++c) sq += vel(f, c) * vel(f, c);
    peak_speed_sq = std::max(peak_speed_sq, sq);
  }

  if (peak_speed_sq > 0.0) {
    const double dt = 1.0 / traj.fps;
    double integral = 0.0;
    double prev = 0.0;
    for (std::size_t f = 0; f < n; ++f) {
      double sq = 0.0;
      for (std::size_t c = 0; c < dims; ++c) sq += jrk(f, c) * jrk(f, c);
      if (f > 0) integral += 0.5 * (prev + sq) * dt;
      prev = sq;
    }
    const double t3 = rep.duration_s * rep.duration_s * rep.duration_s;
    rep.ldlj = -std::log(t3 / peak_speed_sq * integral);
  }
  return rep;
}

// Per-frame difference against a reference trajectory.
inline Trajectory relative_motion(const Trajectory& t, const Trajectory& reference) {
  t.validate();
  reference.validate();
  if (t.fps != reference.fps || t.frames() != reference.frames() ||
      t.dims() != reference.dims())
    throw invalid_argument(
        "relative_motion: trajectory and reference must share fps, frame count "
        "and dimension");
  Trajectory out = t;
  for (std::size_t f = 0; f < t.frames(); ++f)
    for (std::size_t c = 0; c < t.dims(); ++c)
      out.positions(f, c) = t.positions(f, c) - reference.positions(f, c);
  out.caution_2d = t.caution_2d || reference.caution_2d;
  return out;
}

// Displacement from the trajectory's own first frame.
inline Trajectory relative_to_first_frame(const Trajectory& t) {
  t.validate();
  if (t.frames() == 0) throw invalid_argument("relative_to_first_frame: empty trajectory");
  Trajectory ref = t;
  for (std::size_t f = 0; f < t.frames(); ++f)
    for (std::size_t c = 0; c < t.dims(); ++c)
      ref.positions(f, c) = t.positions(0, c);
  return relative_motion(t, ref);
}

inline Signal trajectory_to_signal(const Trajectory& t) {
  static const char* axes[3] = {"x", "y", "z"};
  Signal s;
  s.data = t.positions;
  s.fps = t.fps;
  for (std::size_t c = 0; c < t.dims(); ++c) s.channel_labels.push_back(axes[c]);
  s.modality = Modality::generic;
  s.units = t.units;
  if (t.caution_2d) s.add_warning(kWarnCaution2d);
  return s;
}

// Reports as a canonical track: one row per trajectory so the file re-ingests
// like any other signal. ldlj serializes as nan when undefined.
inline Signal kinematics_reports_to_signal(const std::vector<KinematicsReport>& reports,
                                           double fps) {
  if (reports.empty())
    throw invalid_argument("no kinematics reports to serialize");
  static const char* axes[3] = {"x", "y", "z"};
  const std::size_t dims = reports.front().range_of_motion.size();
  for (const auto& r : reports)
    if (r.range_of_motion.size() != dims)
      throw invalid_argument("kinematics reports mix trajectory dimensions");

  Signal s;
  s.fps = fps;
  s.modality = Modality::generic;
  s.channel_labels.push_back("traj");
  for (std::size_t c = 0; c < dims; ++c)
    s.channel_labels.push_back(std::string("range_") + axes[c]);
  for (const char* name : {"path_length", "avg_speed", "avg_acc", "avg_jerk",
                           "ldlj", "duration_s", "caution_2d"})
    s.channel_labels.push_back(name);

  s.data = Matrix(reports.size(), s.channel_labels.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    std::size_t c = 0;
    s.data(i, c++) = static_cast<double>(i);
    for (std::size_t d = 0; d < dims; ++d) s.data(i, c++) = r.range_of_motion[d];
    s.data(i, c++) = r.total_path_length;
    s.data(i, c++) = r.avg_speed;
    s.data(i, c++) = r.avg_acceleration;
    s.data(i, c++) = r.avg_jerk;
    s.data(i, c++) = r.ldlj ? *r.ldlj : std::nan("");
    s.data(i, c++) = r.duration_s;
    s.data(i, c++) = r.caution_2d ? 1.0 : 0.0;
  }
  return s;
}

}  // namespace bbx
