#include "cpair/check.hpp"

#include <algorithm>

namespace cpair {

double CheckItem::margin() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (sense == Sense::upper) {
    if (threshold <= 0.0) return value > 0.0 ? inf : 0.0;
    return value / threshold;
  }
  if (value <= 0.0) return inf;
  return threshold / value;
}

CheckItem pass_item(std::string name) {
  CheckItem c;
  c.name = std::move(name);
  return c;
}

CheckItem fail_item(std::string name, double value, std::optional<Witness> witness) {
  CheckItem c;
  c.name = std::move(name);
  c.passed = false;
  c.value = value;
  c.first = witness;
  c.worst = witness;
  return c;
}

Tracker::Tracker(std::string name, CheckItem::Sense sense, double threshold) {
  item_.name = std::move(name);
  item_.sense = sense;
  item_.threshold = threshold;
}

void Tracker::observe(double value, std::span<const double> point, std::optional<double> t) {
  const bool upper = item_.sense == CheckItem::Sense::upper;
  // NaN counts as a failure of either sense.
  const bool bad = std::isnan(value) || (upper ? value > item_.threshold : value <= item_.threshold);
  Witness w{std::vector<double>(point.begin(), point.end()), t, value};
  if (bad && item_.passed) {
    item_.passed = false;
    item_.first = w;
  }
  const bool worse = !seen_ || std::isnan(value) || (upper ? value > item_.value : value < item_.value);
  if (worse && !(seen_ && std::isnan(item_.value))) {
    item_.value = value;
    item_.worst = std::move(w);
  }
  seen_ = true;
}

void Tracker::merge(const CheckItem& other) {
  if (!other.passed && item_.passed) {
    item_.passed = false;
    item_.first = other.first;
  }
  const bool upper = item_.sense == CheckItem::Sense::upper;
  if (!seen_ || (upper ? other.value > item_.value : other.value < item_.value) || std::isnan(other.value)) {
    item_.value = other.value;
    item_.worst = other.worst;
  }
  seen_ = true;
}

CheckItem Tracker::item() const { return item_; }

bool all_passed(std::span<const CheckItem> items) {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.passed; });
}

}  // namespace cpair
