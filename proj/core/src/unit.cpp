#include "hyperlang/unit.hpp"

#include <algorithm>

namespace hyperlang {

std::vector<std::string> subset_key(const UnitSet& units) {
  std::vector<std::string> keys;
  keys.reserve(units.size());
  for (const auto& u : units) keys.push_back(u.key);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

void canonicalize(UnitSet& units) {
  std::sort(units.begin(), units.end());
  units.erase(std::unique(units.begin(), units.end()), units.end());
}

}  // namespace hyperlang
