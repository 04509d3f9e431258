#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace bayesrat {

/// Visits every set partition of {0, ..., n-1} once, as restricted-growth
/// strings in lexicographic order: rgs[0] = 0 and rgs[i] <= 1 + max(rgs[0..i)).
/// Element i belongs to block rgs[i]. The visitor returns false to stop early;
/// the function returns false iff it was stopped.
template <typename Visitor>
bool for_each_set_partition(std::size_t n, Visitor&& visit) {
  if (n == 0) {
    std::vector<std::size_t> empty;
    return visit(std::span<const std::size_t>(empty));
  }
  std::vector<std::size_t> rgs(n, 0);
  // prefix_max[i] = max(rgs[0..i]).
  std::vector<std::size_t> prefix_max(n, 0);
  while (true) {
    if (!visit(std::span<const std::size_t>(rgs))) return false;
    // Rightmost position that can still grow.
    std::size_t i = n - 1;
    while (i > 0 && rgs[i] > prefix_max[i - 1]) --i;
    if (i == 0) return true;
    ++rgs[i];
    prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
}

/// Groups element indices by block label.
inline std::vector<std::vector<std::size_t>> blocks_of(
    std::span<const std::size_t> rgs) {
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < rgs.size(); ++i) {
    if (rgs[i] >= blocks.size()) blocks.resize(rgs[i] + 1);
    blocks[rgs[i]].push_back(i);
  }
  return blocks;
}

inline std::uint64_t bell_number(std::size_t n) {
  // Bell triangle.
  std::vector<std::uint64_t> row{1};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (auto v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

}  // namespace bayesrat
