#pragma once

#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "bbx/errors.hpp"
#include "bbx/signal.hpp"
#include "bbx/tracks.hpp"
#include "bbx/version.hpp"

namespace bbx {

enum class TrackFormat { csv, json };

inline TrackFormat track_format_from_string(const std::string& s) {
  if (s == "csv") return TrackFormat::csv;
  if (s == "json") return TrackFormat::json;
  throw invalid_argument("unknown track format '" + s +
                         "' (supported formats: csv, json)");
}

// Header fields shared by both canonical formats.
struct TrackHeader {
  std::string format_version;
  Modality modality = Modality::generic;
  double fps = 0.0;
  std::vector<std::string> labels;
  std::optional<std::string> template_id;
  std::optional<std::string> basis_id;
  std::optional<std::string> source_backend;
  std::string units;
  bool canonicalized = false;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Atomic file replacement: write a sibling temp file, then rename over the
// destination. pre_rename is a test hook for crash injection.
inline void atomic_write_file(const std::filesystem::path& path,
                              const std::string& content,
                              const std::function<void()>& pre_rename = {}) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.parent_path() /
                       (path.filename().string() + ".tmp." +
                        std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw io_error("write failed for '" + tmp.string() + "'");
  }
  if (pre_rename) pre_rename();
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw io_error("cannot rename '" + tmp.string() + "' to '" + path.string() +
                   "': " + ec.message());
  }
}

inline nlohmann::json header_to_json(const Signal& s) {
  nlohmann::json h;
  h["format_version"] = kFormatVersion;
  h["modality"] = to_string(s.modality);
  h["fps"] = s.fps;
  h["labels"] = s.channel_labels;
  h["template_id"] = s.template_id ? nlohmann::json(*s.template_id) : nullptr;
  h["basis_id"] = s.basis_id ? nlohmann::json(*s.basis_id) : nullptr;
  h["source_backend"] =
      s.source_backend ? nlohmann::json(*s.source_backend) : nullptr;
  if (!s.units.empty()) h["units"] = s.units;
  if (s.canonicalized) h["canonicalized"] = true;
  return h;
}

inline TrackHeader header_from_json(const nlohmann::json& h,
                                    const std::string& file, std::size_t line) {
  TrackHeader out;
  auto require = [&](const char* key) -> const nlohmann::json& {
    auto it = h.find(key);
    if (it == h.end())
      throw parse_error(file, line, 1,
                        std::string("header is missing required key '") + key + "'");
    return *it;
  };
  out.format_version = require("format_version").get<std::string>();
  if (out.format_version != kFormatVersion)
    throw parse_error(file, line, 1,
                      "unrecognized format_version '" + out.format_version +
                          "' (this reader understands version " + kFormatVersion +
                          ")");
  try {
    out.modality = modality_from_string(require("modality").get<std::string>());
  } catch (const invalid_argument& e) {
    throw parse_error(file, line, 1, e.what());
  }
  if (!require("fps").is_number())
    throw parse_error(file, line, 1, "header fps must be a number");
  out.fps = h["fps"].get<double>();
  if (!(out.fps > 0.0))
    throw parse_error(file, line, 1,
                      "header fps must be strictly positive, got " +
                          format_double(out.fps));
  out.labels = require("labels").get<std::vector<std::string>>();
  auto opt_str = [&](const char* key) -> std::optional<std::string> {
    auto it = h.find(key);
    if (it == h.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
  };
  out.template_id = opt_str("template_id");
  out.basis_id = opt_str("basis_id");
  out.source_backend = opt_str("source_backend");
  if (auto it = h.find("units"); it != h.end() && !it->is_null())
    out.units = it->get<std::string>();
  if (auto it = h.find("canonicalized"); it != h.end() && !it->is_null())
    out.canonicalized = it->get<bool>();
  return out;
}

inline Signal signal_from_header(TrackHeader&& h, Matrix&& data) {
  Signal s;
  s.data = std::move(data);
  s.fps = h.fps;
  s.channel_labels = std::move(h.labels);
  s.modality = h.modality;
  s.units = std::move(h.units);
  s.template_id = std::move(h.template_id);
  s.basis_id = std::move(h.basis_id);
  s.source_backend = std::move(h.source_backend);
  s.canonicalized = h.canonicalized;
  return s;
}

// RFC-4180 style quoting, needed only for the label row.
inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += '"';
  return out;
}

inline std::vector<std::string> csv_split(const std::string& line,
                                          const std::string& file,
                                          std::size_t lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') { cur += '"'; ++i; }
        else quoted = false;
      } else cur += ch;
    } else if (ch == '"' && cur.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted)
    throw parse_error(file, lineno, line.size(), "unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

inline double parse_cell(const std::string& tok, const std::string& file,
                         std::size_t lineno, std::size_t column) {
  double v = 0.0;
  const char* b = tok.data();
  const char* e = b + tok.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e)
    throw parse_error(file, lineno, column,
                      "non-numeric cell '" + tok + "'");
  return v;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace detail

// --- canonical CSV -----------------------------------------------------
//
//   #BBX1 {"format_version":"1","modality":...,"fps":...,"labels":[...],...}
//   label1,label2,...
//   v,v,...            one row per frame, 17 significant digits

inline std::string serialize_track_csv(const Signal& s) {
  validate_modality_shape(s);
  std::ostringstream out;
  out << kFormatMagic << ' ' << detail::header_to_json(s).dump() << '\n';
  for (std::size_t c = 0; c < s.channels(); ++c) {
    if (c) out << ',';
    out << detail::csv_quote(s.channel_labels[c]);
  }
  out << '\n';
  for (std::size_t f = 0; f < s.frames(); ++f) {
    for (std::size_t c = 0; c < s.channels(); ++c) {
      if (c) out << ',';
      out << detail::format_double(s.data(f, c));
    }
    out << '\n';
  }
  return out.str();
}

inline Signal parse_track_csv(std::istream& in, const std::string& file) {
  std::string line;
  if (!std::getline(in, line))
    throw parse_error(file, 1, 1, "empty file, expected header line");
  line = detail::strip_cr(line);
  const std::string magic = std::string(kFormatMagic) + " ";
  if (line.rfind(magic, 0) != 0)
    throw parse_error(file, 1, 1,
                      std::string("missing '") + kFormatMagic + "' header tag");
  nlohmann::json hj;
  try {
    hj = nlohmann::json::parse(line.substr(magic.size()));
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(file, 1, magic.size() + 1,
                      std::string("malformed header object: ") + e.what());
  }
  TrackHeader header = detail::header_from_json(hj, file, 1);

  if (!std::getline(in, line))
    throw parse_error(file, 2, 1, "missing channel label line");
  line = detail::strip_cr(line);
  const auto labels = detail::csv_split(line, file, 2);
  if (labels != header.labels)
    throw parse_error(file, 2, 1,
                      "label line does not match header labels");

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(header.labels.size());
    std::size_t col = 1;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        row.push_back(detail::parse_cell(line.substr(start, i - start), file,
                                         lineno, col));
        start = i + 1;
        col = i + 2;
      }
    }
    if (row.size() != header.labels.size())
      throw parse_error(file, lineno, 1,
                        "row has " + std::to_string(row.size()) +
                            " columns but header declares " +
                            std::to_string(header.labels.size()) + " labels");
    rows.push_back(std::move(row));
  }
  Matrix data(rows.size(), header.labels.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < header.labels.size(); ++c)
      data(r, c) = rows[r][c];
  Signal s = detail::signal_from_header(std::move(header), std::move(data));
  validate_modality_shape(s);
  return s;
}

// --- canonical structured text (JSON) ----------------------------------
//
// One object with the same header field names plus "data" as an array of
// rows. NaN and infinities are stored as the strings "nan"/"inf"/"-inf"
// since JSON numbers cannot carry them.

inline std::string serialize_track_json(const Signal& s) {
  validate_modality_shape(s);
  nlohmann::json j = detail::header_to_json(s);
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t f = 0; f < s.frames(); ++f) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < s.channels(); ++c) {
      const double v = s.data(f, c);
      if (std::isnan(v)) row.push_back("nan");
      else if (std::isinf(v)) row.push_back(v > 0 ? "inf" : "-inf");
      else row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  j["data"] = std::move(rows);
  return j.dump(2) + "\n";
}

inline Signal parse_track_json(std::istream& in, const std::string& file) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(file, 1, 1, std::string("malformed JSON: ") + e.what());
  }
  TrackHeader header = detail::header_from_json(j, file, 1);
  auto it = j.find("data");
  if (it == j.end() || !it->is_array())
    throw parse_error(file, 1, 1, "missing 'data' array");
  Matrix data(it->size(), header.labels.size());
  std::size_t r = 0;
  for (const auto& row : *it) {
    if (!row.is_array() || row.size() != header.labels.size())
      throw parse_error(file, 1, 1,
                        "data row " + std::to_string(r) + " has " +
                            std::to_string(row.size()) +
                            " columns but header declares " +
                            std::to_string(header.labels.size()));
    std::size_t c = 0;
    for (const auto& cell : row) {
      if (cell.is_number()) data(r, c) = cell.get<double>();
      else if (cell.is_null()) data(r, c) = std::nan("");
      else if (cell.is_string()) {
        const std::string sv = cell.get<std::string>();
        if (sv == "nan") data(r, c) = std::nan("");
        else if (sv == "inf") data(r, c) = std::numeric_limits<double>::infinity();
        else if (sv == "-inf") data(r, c) = -std::numeric_limits<double>::infinity();
        else
          throw parse_error(file, 1, 1,
                            "non-numeric cell '" + sv + "' at row " +
                                std::to_string(r) + ", column " +
                                std::to_string(c + 1));
      } else {
        throw parse_error(file, 1, 1,
                          "non-numeric cell at row " + std::to_string(r) +
                              ", column " + std::to_string(c + 1));
      }
      ++c;
    }
    ++r;
  }
  Signal s = detail::signal_from_header(std::move(header), std::move(data));
  validate_modality_shape(s);
  return s;
}

// --- public operations --------------------------------------------------

inline Signal read_track(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw io_error("cannot open '" + path.string() + "' for reading");
  const int first = in.peek();
  if (first == '#') return parse_track_csv(in, path.string());
  if (first == '{') return parse_track_json(in, path.string());
  throw parse_error(path.string(), 1, 1,
                    "unrecognized file: expected canonical CSV ('#BBX1 ...') "
                    "or canonical JSON ('{...}')");
}

inline void write_track(const Signal& s, const std::filesystem::path& path,
                        TrackFormat format = TrackFormat::csv) {
  const std::string body = format == TrackFormat::csv ? serialize_track_csv(s)
                                                      : serialize_track_json(s);
  detail::atomic_write_file(path, body);
}

inline void convert(const std::filesystem::path& in,
                    const std::filesystem::path& out,
                    const std::string& target_format) {
  const TrackFormat fmt = track_format_from_string(target_format);
  write_track(read_track(in), out, fmt);
}

}  // namespace bbx
