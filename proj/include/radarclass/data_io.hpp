#pragma once

#include <iosfwd>
#include <string>

#include "radarclass/domain.hpp"
#include "radarclass/features.hpp"
#include "radarclass/simulator.hpp"

namespace radarclass {

inline constexpr int kWindowsFormatVersion = 1;
inline constexpr int kFeaturesFormatVersion = 1;

/// Shortest text that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(std::string_view text);

// Windows file: newline-delimited JSON. The first line is a header carrying
// the format version and provenance; every further line is one window with
// its label, container id, axis and frame rows.
void write_windows(std::ostream& os, const WindowDataset& data);
WindowDataset read_windows(std::istream& is);

// Features file: a "# radarclass.features v1 ..." line, a CSV header row with
// the six feature columns plus label and container, then one row per window.
void write_features(std::ostream& os, const Dataset& data);
Dataset read_features(std::istream& is);

/// One feature row per window, in window order.
Dataset extract_dataset(const WindowDataset& windows, const FeatureConfig& cfg);

}  // namespace radarclass
