#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace sketchrec {

// The `count` entries with the largest score, best first; ties go to the lower index.
inline std::vector<std::size_t> top_by_score(std::vector<std::pair<double, std::size_t>> scored, std::size_t count) {
  auto better = [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); };
  count = std::min(count, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(count), scored.end(), better);
  std::vector<std::size_t> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = scored[j].second;
  return out;
}

}  // namespace sketchrec
