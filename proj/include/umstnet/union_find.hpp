#pragma once

#include <numeric>
#include <type_traits>
#include <utility>
#include <vector>

namespace umstnet {

// Disjoint-set forest with union by rank and path halving.
template <typename T>
class UnionFind {
  static_assert(std::is_integral_v<T> && std::is_unsigned_v<T>);

 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0), components_(n) {
    std::iota(parent_.begin(), parent_.end(), T{0});
  }

  T find(T x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns false if a and b were already in the same set.
  bool unite(T a, T b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    --components_;
    return true;
  }

  bool same(T a, T b) { return find(a) == find(b); }
  std::size_t components() const noexcept { return components_; }

 private:
  std::vector<T> parent_;
  std::vector<unsigned char> rank_;
  std::size_t components_;
};

}  // namespace umstnet
