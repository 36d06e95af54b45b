#include "radarclass/data_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace radarclass {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error(ErrorKind::Parse, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

namespace {

std::string class_list() {
  std::string out;
  for (auto c : kAllClasses) {
    if (!out.empty()) out += ',';
    out += class_name(c);
  }
  return out;
}

[[noreturn]] void parse_fail(const std::string& what, std::size_t line) {
  throw Error(ErrorKind::Parse, what + " (line " + std::to_string(line) + ")");
}

}  // namespace

void write_windows(std::ostream& os, const WindowDataset& data) {
  nlohmann::ordered_json header;
  header["format"] = "radarclass.windows";
  header["version"] = kWindowsFormatVersion;
  header["seed"] = data.provenance.seed;
  header["config_digest"] = data.provenance.config_digest;
  header["class_order"] = class_list();
  header["count"] = data.windows.size();
  os << header.dump() << '\n';

  std::string line;
  for (const auto& w : data.windows) {
    const auto& axis = w.window.axis();
    line.clear();
    line += "{\"label\":\"";
    line += class_name(w.label);
    line += "\",\"container\":" + std::to_string(w.container_id);
    line += ",\"axis\":{\"start_mm\":" + format_double(axis.start_mm) +
            ",\"step_mm\":" + format_double(axis.step_mm) +
            ",\"num_bins\":" + std::to_string(axis.num_bins) + "},\"frames\":[";
    const auto& a = w.window.amplitudes();
    for (Eigen::Index k = 0; k < a.rows(); ++k) {
      line += k ? ",[" : "[";
      for (Eigen::Index i = 0; i < a.cols(); ++i) {
        if (i) line += ',';
        line += format_double(a(k, i));
      }
      line += ']';
    }
    line += "]}\n";
    os << line;
  }
}

WindowDataset read_windows(std::istream& is) {
  WindowDataset out;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) throw Error(ErrorKind::Parse, "windows file is empty");
  ++line_no;
  std::size_t expected = 0;
  try {
    const auto header = nlohmann::json::parse(line);
    if (header.value("format", "") != "radarclass.windows") parse_fail("not a windows file", line_no);
    const int version = header.value("version", -1);
    if (version != kWindowsFormatVersion) {
      parse_fail("windows format version " + std::to_string(version) + " unsupported, expected " +
                     std::to_string(kWindowsFormatVersion),
                 line_no);
    }
    if (header.value("class_order", "") != class_list()) parse_fail("class order mismatch", line_no);
    out.provenance.seed = header.at("seed").get<std::uint64_t>();
    out.provenance.config_digest = header.at("config_digest").get<std::string>();
    expected = header.at("count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    parse_fail(std::string("bad windows header: ") + e.what(), line_no);
  }

  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto rec = nlohmann::json::parse(line);
      const auto& ax = rec.at("axis");
      const RangeAxis axis(ax.at("start_mm").get<double>(), ax.at("step_mm").get<double>(),
                           ax.at("num_bins").get<std::size_t>());
      const auto& frames = rec.at("frames");
      if (!frames.is_array() || frames.empty()) parse_fail("window has no frames", line_no);
      Eigen::MatrixXd amps(static_cast<Eigen::Index>(frames.size()),
                           static_cast<Eigen::Index>(axis.num_bins));
      for (std::size_t k = 0; k < frames.size(); ++k) {
        if (!frames[k].is_array() || frames[k].size() != axis.num_bins) {
          parse_fail("frame " + std::to_string(k) + " length does not match the axis", line_no);
        }
        for (std::size_t i = 0; i < axis.num_bins; ++i) {
          amps(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = frames[k][i].get<double>();
        }
      }
      out.windows.push_back(LabeledWindow{ClassificationWindow(axis, std::move(amps)),
                                          class_from_name(rec.at("label").get<std::string>()),
                                          rec.value("container", std::int64_t{-1})});
    } catch (const nlohmann::json::exception& e) {
      parse_fail("window record " + std::to_string(out.windows.size()) + ": " + e.what(), line_no);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Parse) throw;
      parse_fail("window record " + std::to_string(out.windows.size()) + ": " + e.what(), line_no);
    }
  }
  if (out.windows.size() != expected) {
    throw Error(ErrorKind::Parse, "windows file declares " + std::to_string(expected) +
                                      " records but holds " + std::to_string(out.windows.size()));
  }
  return out;
}

void write_features(std::ostream& os, const Dataset& data) {
  os << "# radarclass.features v" << kFeaturesFormatVersion << " seed=" << data.provenance.seed
     << " config_digest=" << (data.provenance.config_digest.empty() ? "-" : data.provenance.config_digest)
     << " classes=" << class_list() << '\n';
  for (auto name : kFeatureNames) os << name << ',';
  os << "label,container\n";
  for (const auto& r : data.records) {
    const auto a = r.features.to_array();
    for (Eigen::Index i = 0; i < a.size(); ++i) os << format_double(a(i)) << ',';
    os << class_name(r.label) << ',' << r.container_id << '\n';
  }
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string expected_header() {
  std::string h;
  for (auto name : kFeatureNames) {
    h += name;
    h += ',';
  }
  return h + "label,container";
}

}  // namespace

Dataset read_features(std::istream& is) {
  Dataset out;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) throw Error(ErrorKind::Parse, "features file is empty");
  {
    std::istringstream meta(line);
    std::string hash, tag, version;
    meta >> hash >> tag >> version;
    if (hash != "#" || tag != "radarclass.features") parse_fail("not a features file", line_no);
    if (version != "v" + std::to_string(kFeaturesFormatVersion)) {
      parse_fail("features format " + version + " unsupported, expected v" +
                     std::to_string(kFeaturesFormatVersion),
                 line_no);
    }
    std::string kv;
    bool saw_classes = false;
    while (meta >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) continue;
      const auto key = kv.substr(0, eq);
      const auto value = kv.substr(eq + 1);
      if (key == "seed") {
        out.provenance.seed = std::stoull(value);
      } else if (key == "config_digest") {
        out.provenance.config_digest = value == "-" ? "" : value;
      } else if (key == "classes") {
        saw_classes = true;
        if (value != class_list()) {
          throw Error(ErrorKind::Compatibility, "features file class order '" + value +
                                                    "' differs from '" + class_list() + "'");
        }
      }
    }
    if (!saw_classes) parse_fail("features file does not declare its class order", line_no);
  }
  if (!std::getline(is, line)) parse_fail("missing column header", line_no + 1);
  ++line_no;
  if (line != expected_header()) parse_fail("unexpected column header '" + line + "'", line_no);

  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != kNumFeatures + 2) {
      parse_fail("expected " + std::to_string(kNumFeatures + 2) + " columns, got " +
                     std::to_string(cells.size()),
                 line_no);
    }
    LabeledFeatures rec;
    try {
      FeatureArray a;
      for (std::size_t i = 0; i < kNumFeatures; ++i) a(static_cast<Eigen::Index>(i)) = parse_double(cells[i]);
      if (!a.allFinite() || (a.array() < 0.0).any()) parse_fail("features must be finite and >= 0", line_no);
      rec.features = FeatureVector::from_array(a);
      rec.label = class_from_name(cells[kNumFeatures]);
      rec.container_id = std::stoll(std::string(cells[kNumFeatures + 1]));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Parse && std::string(e.what()).find("(line") != std::string::npos) throw;
      parse_fail(std::string("record ") + std::to_string(out.records.size()) + ": " + e.what(), line_no);
    } catch (const std::exception& e) {
      parse_fail(std::string("record ") + std::to_string(out.records.size()) + ": " + e.what(), line_no);
    }
    out.records.push_back(rec);
  }
  return out;
}

Dataset extract_dataset(const WindowDataset& windows, const FeatureConfig& cfg) {
  Dataset out;
  out.provenance = windows.provenance;
  out.records.reserve(windows.windows.size());
  for (const auto& w : windows.windows) {
    out.records.push_back(LabeledFeatures{extract_features(w.window, cfg), w.label, w.container_id});
  }
  return out;
}

}  // namespace radarclass
