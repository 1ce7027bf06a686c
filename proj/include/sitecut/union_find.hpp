#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace sitecut {

/// Disjoint sets with path halving and union by size. reset() is O(1):
/// entries are lazily reinitialised the first time they are touched in a
/// new epoch.
class UnionFind {
public:
  explicit UnionFind(std::size_t n = 0) { resize(n); }

  void resize(std::size_t n) {
    parent_.assign(n, 0);
    size_.assign(n, 1);
    stamp_.assign(n, 0);
    epoch_ = 1;
  }

  std::size_t size() const { return parent_.size(); }

  void reset() {
    if (++epoch_ == 0) { // wrapped
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
  }

  std::uint32_t find(std::uint32_t x) {
    touch(x);
    while (parent_[x] != x) {
      touch(parent_[x]);
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Returns true if two distinct sets were merged.
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) {
      return false;
    }
    if (size_[a] < size_[b]) {
      std::swap(a, b);
    }
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  bool same(std::uint32_t a, std::uint32_t b) { return find(a) == find(b); }

  std::uint32_t set_size(std::uint32_t x) { return size_[find(x)]; }

private:
  void touch(std::uint32_t x) {
    if (stamp_[x] != epoch_) {
      stamp_[x] = epoch_;
      parent_[x] = x;
      size_[x] = 1;
    }
  }

  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 1;
};

} // namespace sitecut
