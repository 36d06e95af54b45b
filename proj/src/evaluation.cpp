#include "radarclass/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "radarclass/random.hpp"

namespace radarclass {

const char* to_string(SplitMode m) noexcept {
  switch (m) {
    case SplitMode::Stratified: return "stratified";
    case SplitMode::Shuffled: return "shuffled";
    case SplitMode::Container: return "container";
  }
  return "?";
}

SplitMode split_mode_from_string(const std::string& s) {
  if (s == "stratified") return SplitMode::Stratified;
  if (s == "shuffled") return SplitMode::Shuffled;
  if (s == "container") return SplitMode::Container;
  throw Error(ErrorKind::Config, "unknown split mode '" + s + "'");
}

namespace {

constexpr std::uint64_t kSplitStream = 0x5eed5b1170ULL;

std::size_t rounded(double x) { return static_cast<std::size_t>(std::llround(x)); }

// Largest-remainder apportionment of round(total * fraction) test slots over
// groups of the given sizes. Each group gets floor or ceil of size * fraction,
// and a group never gives up its last member.
std::vector<std::size_t> apportion(const std::vector<std::size_t>& sizes, double fraction) {
  std::size_t total = 0;
  for (auto s : sizes) total += s;
  const std::size_t target = rounded(static_cast<double>(total) * fraction);

  std::vector<std::size_t> quota(sizes.size(), 0);
  std::vector<double> remainder(sizes.size(), 0.0);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (sizes[c] < 2) continue;
    const double exact = static_cast<double>(sizes[c]) * fraction;
    const double base = std::floor(exact + 1e-9);
    quota[c] = std::min(static_cast<std::size_t>(base), sizes[c] - 1);
    remainder[c] = exact - base;
    assigned += quota[c];
  }
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t c : order) {
    if (assigned >= target) break;
    if (sizes[c] >= 2 && remainder[c] > 1e-9 && quota[c] + 1 <= sizes[c] - 1) {
      ++quota[c];
      ++assigned;
    }
  }
  return quota;
}

void singleton_warnings(const std::array<std::size_t, kNumClasses>& counts,
                        std::vector<std::string>& warnings) {
  for (auto c : kAllClasses) {
    if (counts[static_cast<std::size_t>(class_code(c))] == 1) {
      warnings.push_back("class '" + std::string(class_name(c)) +
                         "' has a single record; it is kept in the training split");
    }
  }
}

}  // namespace

SplitResult train_test_split(std::span<const MaterialClass> labels, double test_fraction,
                             std::uint64_t seed, SplitMode mode,
                             std::span<const std::int64_t> container_ids) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "test fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = labels.size();
  if (n < 2) throw Error(ErrorKind::InsufficientData, "splitting needs at least 2 records");
  if (mode == SplitMode::Container && container_ids.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "container split needs one container id per record");
  }

  Rng rng(derive_seed(seed, {kSplitStream}));
  const std::vector<std::size_t> perm = random_permutation(n, rng);

  std::array<std::size_t, kNumClasses> counts{};
  for (auto l : labels) ++counts[static_cast<std::size_t>(class_code(l))];

  SplitResult out;
  singleton_warnings(counts, out.warnings);
  std::vector<bool> is_test(n, false);

  switch (mode) {
    case SplitMode::Shuffled: {
      const std::size_t n_test = std::clamp<std::size_t>(rounded(static_cast<double>(n) * test_fraction), 1, n - 1);
      for (std::size_t r = 0; r < n_test; ++r) is_test[perm[r]] = true;
      break;
    }
    case SplitMode::Stratified: {
      const auto quota = apportion(std::vector<std::size_t>(counts.begin(), counts.end()), test_fraction);
      std::array<std::size_t, kNumClasses> taken{};
      for (std::size_t idx : perm) {
        const auto c = static_cast<std::size_t>(class_code(labels[idx]));
        if (taken[c] < quota[c]) {
          is_test[idx] = true;
          ++taken[c];
        }
      }
      break;
    }
    case SplitMode::Container: {
      // Groups in first-appearance order of the permutation, per class.
      std::array<std::vector<std::vector<std::size_t>>, kNumClasses> groups;
      std::map<std::int64_t, std::pair<std::size_t, std::size_t>> where;  // id -> (class, group)
      for (std::size_t idx : perm) {
        const auto c = static_cast<std::size_t>(class_code(labels[idx]));
        const std::int64_t id = container_ids[idx];
        if (id >= 0) {
          auto it = where.find(id);
          if (it != where.end()) {
            if (it->second.first != c) {
              throw Error(ErrorKind::Input, "container " + std::to_string(id) + " has mixed labels");
            }
            groups[c][it->second.second].push_back(idx);
            continue;
          }
          where.emplace(id, std::make_pair(c, groups[c].size()));
        }
        groups[c].push_back({idx});
      }
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        const auto quota = apportion({groups[c].size()}, test_fraction);
        for (std::size_t g = 0; g < quota[0]; ++g) {
          for (std::size_t idx : groups[c][g]) is_test[idx] = true;
        }
        if (groups[c].size() == 1 && counts[c] > 1) {
          out.warnings.push_back("class '" + std::string(class_name(code_class(static_cast<int>(c)))) +
                                 "' has a single container; it is kept in the training split");
        }
      }
      break;
    }
  }

  for (std::size_t idx : perm) (is_test[idx] ? out.test : out.train).push_back(idx);
  return out;
}

double ConfusionMatrix::accuracy() const {
  const auto t = total();
  return t > 0 ? static_cast<double>(correct()) / static_cast<double>(t) : 0.0;
}

ConfusionMatrix confusion_matrix(std::span<const MaterialClass> actuals,
                                 std::span<const MaterialClass> predictions) {
  if (actuals.size() != predictions.size()) {
    throw Error(ErrorKind::Input, "actual and predicted label counts differ (" +
                                      std::to_string(actuals.size()) + " vs " +
                                      std::to_string(predictions.size()) + ")");
  }
  if (actuals.empty()) throw Error(ErrorKind::Input, "no records to evaluate");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < actuals.size(); ++i) {
    ++cm.counts(class_code(actuals[i]), class_code(predictions[i]));
  }
  return cm;
}

EvaluationReport report(const ConfusionMatrix& cm) {
  if (cm.total() <= 0) throw Error(ErrorKind::EmptyEvaluation, "confusion matrix is empty");
  EvaluationReport r;
  r.matrix = cm;
  r.total = cm.total();
  r.accuracy = cm.accuracy();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto i = static_cast<Eigen::Index>(c);
    const std::int64_t tp = cm.counts(i, i);
    const std::int64_t predicted = cm.counts.col(i).sum();
    const std::int64_t actual = cm.counts.row(i).sum();
    auto& m = r.per_class[c];
    m.support = actual;
    m.precision_undefined = predicted == 0;
    m.recall_undefined = actual == 0;
    m.precision = predicted > 0 ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    m.recall = actual > 0 ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
  }
  return r;
}

std::string render_text(const EvaluationReport& r) {
  std::ostringstream os;
  os << "accuracy " << std::fixed << std::setprecision(4) << r.accuracy << " (" << r.matrix.correct()
     << "/" << r.total << ")\n\n";
  os << std::setw(16) << "actual\\pred";
  for (auto c : kAllClasses) os << std::setw(9) << class_name(c);
  os << '\n';
  for (auto a : kAllClasses) {
    os << std::setw(16) << class_name(a);
    for (auto p : kAllClasses) os << std::setw(9) << r.matrix.at(a, p);
    os << '\n';
  }
  os << '\n' << std::setw(16) << "class" << std::setw(11) << "precision" << std::setw(9) << "recall"
     << std::setw(9) << "support" << '\n';
  for (auto c : kAllClasses) {
    const auto& m = r.per_class[static_cast<std::size_t>(class_code(c))];
    os << std::setw(16) << class_name(c) << std::setw(10) << m.precision
       << (m.precision_undefined ? "*" : " ") << std::setw(8) << m.recall
       << (m.recall_undefined ? "*" : " ") << std::setw(9) << m.support << '\n';
  }
  bool any_undefined = false;
  for (const auto& m : r.per_class) any_undefined |= m.precision_undefined || m.recall_undefined;
  if (any_undefined) os << "* undefined (zero denominator), reported as 0\n";
  return os.str();
}

std::string render_json(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["format"] = "radarclass.report";
  j["version"] = 1;
  j["accuracy"] = r.accuracy;
  j["total"] = r.total;
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (auto c : kAllClasses) {
    const auto& m = r.per_class[static_cast<std::size_t>(class_code(c))];
    nlohmann::ordered_json e;
    e["precision"] = m.precision;
    e["recall"] = m.recall;
    e["support"] = m.support;
    e["precision_undefined"] = m.precision_undefined;
    e["recall_undefined"] = m.recall_undefined;
    per_class[std::string(class_name(c))] = e;
  }
  j["per_class"] = per_class;
  nlohmann::ordered_json order = nlohmann::ordered_json::array();
  for (auto c : kAllClasses) order.push_back(class_name(c));
  j["class_order"] = order;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index a = 0; a < r.matrix.counts.rows(); ++a) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index p = 0; p < r.matrix.counts.cols(); ++p) row.push_back(r.matrix.counts(a, p));
    rows.push_back(row);
  }
  j["matrix"] = rows;
  return j.dump(2) + "\n";
}

ConfusionMatrix parse_report_matrix(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("report: ") + e.what());
  }
  if (j.value("format", "") != "radarclass.report" || j.value("version", 0) != 1) {
    throw Error(ErrorKind::Parse, "not a version 1 radarclass report");
  }
  ConfusionMatrix cm;
  const auto& rows = j.at("matrix");
  if (!rows.is_array() || rows.size() != kNumClasses) throw Error(ErrorKind::Parse, "report matrix must be 5x5");
  for (std::size_t a = 0; a < kNumClasses; ++a) {
    if (!rows[a].is_array() || rows[a].size() != kNumClasses) {
      throw Error(ErrorKind::Parse, "report matrix must be 5x5");
    }
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      cm.counts(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(p)) = rows[a][p].get<std::int64_t>();
    }
  }
  return cm;
}

}  // namespace radarclass
