#pragma once

// Pass/fail items with witnesses, shared by the verification modules.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cpair {

struct Witness {
  std::vector<double> point;
  std::optional<double> t;
  double value = 0.0;
};

/// One named check. Upper checks pass when value <= threshold, lower checks
/// when value > threshold.
struct CheckItem {
  enum class Sense { upper, lower };

  std::string name;
  Sense sense = Sense::upper;
  bool passed = true;
  double value = 0.0;
  double threshold = 0.0;
  std::optional<Witness> first;  // first offending sample in sample order
  std::optional<Witness> worst;  // sample attaining value
  /// False for thresholds that are not numerical tolerances (convergence rates).
  bool banded = true;

  /// value / threshold for upper checks, threshold / value for lower ones;
  /// > 1 means failure.
  double margin() const;
  /// Within a factor of 10 of the threshold on either side (banded checks only).
  bool inconclusive() const { return banded && margin() > 0.1 && margin() <= 10.0; }
};

CheckItem pass_item(std::string name);
CheckItem fail_item(std::string name, double value, std::optional<Witness> witness = std::nullopt);

/// Folds per-sample values into a CheckItem.
class Tracker {
 public:
  Tracker(std::string name, CheckItem::Sense sense, double threshold);

  void observe(double value, std::span<const double> point, std::optional<double> t = std::nullopt);
  /// Folds another item of the same name and sense (e.g. the same check at several t).
  void merge(const CheckItem& other);
  CheckItem item() const;

 private:
  CheckItem item_;
  bool seen_ = false;
};

inline Tracker upper(std::string name, double threshold) {
  return Tracker(std::move(name), CheckItem::Sense::upper, threshold);
}
inline Tracker lower(std::string name, double threshold) {
  return Tracker(std::move(name), CheckItem::Sense::lower, threshold);
}

bool all_passed(std::span<const CheckItem> items);

}  // namespace cpair
