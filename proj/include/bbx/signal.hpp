#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bbx/errors.hpp"
#include "bbx/matrix.hpp"

namespace bbx {

enum class Modality { rects, landmarks2d, landmarks3d, pose, expressions, generic };

inline const char* to_string(Modality m) {
  switch (m) {
    case Modality::rects: return "rects";
    case Modality::landmarks2d: return "landmarks2d";
    case Modality::landmarks3d: return "landmarks3d";
    case Modality::pose: return "pose";
    case Modality::expressions: return "expressions";
    case Modality::generic: return "generic";
  }
  return "generic";
}

inline Modality modality_from_string(const std::string& s) {
  if (s == "rects") return Modality::rects;
  if (s == "landmarks2d") return Modality::landmarks2d;
  if (s == "landmarks3d") return Modality::landmarks3d;
  if (s == "pose") return Modality::pose;
  if (s == "expressions") return Modality::expressions;
  if (s == "generic") return Modality::generic;
  throw invalid_argument("unknown modality '" + s +
                         "' (expected rects, landmarks2d, landmarks3d, pose, "
                         "expressions or generic)");
}

// Multichannel frame-indexed time series: the common currency between all
// measurement routines. Dense by construction; gaps are resolved at ingest.
// Immutable by convention after validate(); operations return new Signals.
struct Signal {
  Matrix data;                             // frames x channels
  double fps = 0.0;                        // sampling rate, Hz
  std::vector<std::string> channel_labels; // one per column, unique
  Modality modality = Modality::generic;
  std::string units;                       // free-form, applies to all channels
  std::optional<std::string> template_id;  // landmark template, if any
  std::optional<std::string> basis_id;     // expression basis, if any
  std::optional<std::string> source_backend;
  bool canonicalized = false;              // pose/identity-corrected (3D landmarks)

  // Transient processing notes (truncation, 2D caution...). Not serialized
  // and ignored by equality.
  std::vector<std::string> warnings;

  std::size_t frames() const { return data.rows(); }
  std::size_t channels() const { return data.cols(); }
  double duration_seconds() const { return fps > 0 ? frames() / fps : 0.0; }

  bool has_warning(const std::string& w) const {
    return std::find(warnings.begin(), warnings.end(), w) != warnings.end();
  }
  void add_warning(std::string w) {
    if (!has_warning(w)) warnings.push_back(std::move(w));
  }

  void validate() const {
    if (!(fps > 0.0) || !std::isfinite(fps))
      throw invalid_argument("signal fps must be strictly positive and finite, got " +
                             std::to_string(fps));
    if (channel_labels.size() != data.cols())
      throw invalid_argument("signal has " + std::to_string(data.cols()) +
                             " channels but " + std::to_string(channel_labels.size()) +
                             " labels");
    std::unordered_set<std::string> seen;
    for (const auto& l : channel_labels)
      if (!seen.insert(l).second)
        throw invalid_argument("duplicate channel label '" + l + "'");
    if (modality == Modality::landmarks2d && canonicalized)
      throw invalid_argument("2D landmark signals cannot be canonicalized");
  }

  bool same_values(const Signal& o) const {
    return data == o.data && fps == o.fps && channel_labels == o.channel_labels &&
           modality == o.modality && units == o.units &&
           template_id == o.template_id && basis_id == o.basis_id &&
           source_backend == o.source_backend && canonicalized == o.canonicalized;
  }
};

inline constexpr const char* kWarnTruncated = "truncated_to_shorter_pair";
inline constexpr const char* kWarnCaution2d = "caution_2d";

// Truncates both signals to the shorter frame count so windowed pairwise
// operations see a common timeline. Resampling is out of scope, so unequal
// rates are an error rather than something to paper over.
inline std::pair<Signal, Signal> align_pair(const Signal& a, const Signal& b) {
  a.validate();
  b.validate();
  if (a.fps != b.fps)
    throw invalid_argument("align_pair: sampling rates differ (" +
                           std::to_string(a.fps) + " vs " + std::to_string(b.fps) +
                           " Hz); resample before pairing");
  const std::size_t n = std::min(a.frames(), b.frames());
  Signal oa = a;
  Signal ob = b;
  if (a.frames() != b.frames()) {
    auto cut = [n](Signal& s) {
      Matrix m(n, s.channels());
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < s.channels(); ++c) m(r, c) = s.data(r, c);
      s.data = std::move(m);
      s.add_warning(kWarnTruncated);
    };
    if (oa.frames() != n) cut(oa); else oa.add_warning(kWarnTruncated);
    if (ob.frames() != n) cut(ob); else ob.add_warning(kWarnTruncated);
  }
  return {std::move(oa), std::move(ob)};
}

}  // namespace bbx
