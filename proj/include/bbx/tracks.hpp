#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "bbx/errors.hpp"
#include "bbx/signal.hpp"

namespace bbx {

inline const std::array<std::string, 6>& pose_channel_labels() {
  static const std::array<std::string, 6> labels{"pitch", "yaw", "roll",
                                                 "tx",    "ty",  "tz"};
  return labels;
}

inline std::vector<std::string> rect_channel_labels(bool with_confidence) {
  std::vector<std::string> l{"x", "y", "w", "h"};
  if (with_confidence) l.push_back("confidence");
  return l;
}

// pNN_x, pNN_y[, pNN_z] for each landmark point.
inline std::vector<std::string> landmark_channel_labels(std::size_t points,
                                                        std::size_t dims) {
  static const char* axes[3] = {"x", "y", "z"};
  std::vector<std::string> out;
  out.reserve(points * dims);
  const int width = points > 100 ? 3 : 2;
  for (std::size_t p = 0; p < points; ++p)
    for (std::size_t d = 0; d < dims; ++d) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "p%0*zu_%s", width, p, axes[d]);
      out.emplace_back(buf);
    }
  return out;
}

// Point count of the named landmark template, if it is a known one.
inline std::optional<std::size_t> template_point_count(const std::string& id) {
  if (id == "ibug51" || id == "iBUG-51" || id == "ibug-51") return 51;
  if (id == "ibug68" || id == "iBUG-68" || id == "ibug-68") return 68;
  return std::nullopt;
}

// Face bounding boxes through time: x, y top-left in pixels, w/h >= 0, and
// an optional confidence channel in [0,1].
class RectTrack {
 public:
  explicit RectTrack(Signal s) : s_(std::move(s)) {
    s_.validate();
    if (s_.modality != Modality::rects)
      throw invalid_argument("RectTrack requires modality=rects");
    if (s_.channels() != 4 && s_.channels() != 5)
      throw invalid_argument("RectTrack requires 4 channels (x,y,w,h) or 5 "
                             "(with confidence), got " +
                             std::to_string(s_.channels()));
    for (std::size_t f = 0; f < s_.frames(); ++f) {
      if (s_.data(f, 2) < 0.0 || s_.data(f, 3) < 0.0)
        throw invalid_argument("rect width/height must be >= 0 (frame " +
                               std::to_string(f) + ")");
      if (has_confidence()) {
        const double c = s_.data(f, 4);
        if (c < 0.0 || c > 1.0)
          throw invalid_argument("rect confidence must lie in [0,1] (frame " +
                                 std::to_string(f) + ")");
      }
    }
  }

  bool has_confidence() const { return s_.channels() == 5; }
  double x(std::size_t f) const { return s_.data(f, 0); }
  double y(std::size_t f) const { return s_.data(f, 1); }
  double w(std::size_t f) const { return s_.data(f, 2); }
  double h(std::size_t f) const { return s_.data(f, 3); }
  const Signal& signal() const { return s_; }

 private:
  Signal s_;
};

// Head pose: pitch/yaw/roll in radians plus tx/ty/tz in model units, in that
// fixed channel order.
class PoseTrack {
 public:
  explicit PoseTrack(Signal s) : s_(std::move(s)) {
    s_.validate();
    if (s_.modality != Modality::pose)
      throw invalid_argument("PoseTrack requires modality=pose");
    if (s_.channels() != 6)
      throw invalid_argument("pose tracks have exactly 6 channels "
                             "(pitch,yaw,roll,tx,ty,tz), got " +
                             std::to_string(s_.channels()));
    const auto& want = pose_channel_labels();
    for (std::size_t c = 0; c < 6; ++c)
      if (s_.channel_labels[c] != want[c])
        throw invalid_argument("pose channel " + std::to_string(c) +
                               " must be labeled '" + want[c] + "', got '" +
                               s_.channel_labels[c] + "'");
  }

  const Signal& signal() const { return s_; }

 private:
  Signal s_;
};

// K landmark points per frame, D in {2,3}, stored as K*D channels.
class LandmarkTrack {
 public:
  explicit LandmarkTrack(Signal s) : s_(std::move(s)) {
    s_.validate();
    if (s_.modality == Modality::landmarks2d) dims_ = 2;
    else if (s_.modality == Modality::landmarks3d) dims_ = 3;
    else throw invalid_argument("LandmarkTrack requires a landmark modality");
    if (s_.channels() == 0 || s_.channels() % dims_ != 0)
      throw invalid_argument("landmark channel count " +
                             std::to_string(s_.channels()) +
                             " is not a multiple of the point dimension " +
                             std::to_string(dims_));
    points_ = s_.channels() / dims_;
    if (s_.template_id) {
      if (auto k = template_point_count(*s_.template_id); k && *k != points_)
        throw invalid_argument("template '" + *s_.template_id + "' declares " +
                               std::to_string(*k) + " points but track has " +
                               std::to_string(points_));
    }
  }

  std::size_t points() const { return points_; }
  std::size_t dims() const { return dims_; }
  bool canonicalized() const { return s_.canonicalized; }

  double coord(std::size_t frame, std::size_t point, std::size_t axis) const {
    return s_.data(frame, point * dims_ + axis);
  }

  const Signal& signal() const { return s_; }

 private:
  Signal s_;
  std::size_t points_ = 0;
  std::size_t dims_ = 0;
};

// Expression coefficient activations, one column per basis element.
class ExpressionTrack {
 public:
  explicit ExpressionTrack(Signal s) : s_(std::move(s)) {
    s_.validate();
    if (s_.modality != Modality::expressions)
      throw invalid_argument("ExpressionTrack requires modality=expressions");
    if (s_.channels() < 1)
      throw invalid_argument("expression tracks need at least one coefficient");
  }

  std::size_t coefficients() const { return s_.channels(); }
  bool is_local() const {
    return s_.basis_id && s_.basis_id->find("local") != std::string::npos;
  }
  const Signal& signal() const { return s_; }

 private:
  Signal s_;
};

// Modality-specific invariants shared by readers and writers.
inline void validate_modality_shape(const Signal& s) {
  s.validate();
  switch (s.modality) {
    case Modality::rects: { RectTrack t(s); break; }
    case Modality::pose: { PoseTrack t(s); break; }
    case Modality::landmarks2d:
    case Modality::landmarks3d: { LandmarkTrack t(s); break; }
    case Modality::expressions: { ExpressionTrack t(s); break; }
    case Modality::generic: break;
  }
}

}  // namespace bbx
