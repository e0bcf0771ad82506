#pragma once

#include <numeric>
#include <vector>

namespace lbsim {

// Disjoint sets with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(int n = 0) { reset(n); }

  void reset(int n) {
    parent_.resize(n);
    std::iota(parent_.begin(), parent_.end(), 0);
    size_.assign(n, 1);
  }

  int add() {
    parent_.push_back(static_cast<int>(parent_.size()));
    size_.push_back(1);
    return parent_.back();
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns true if two different sets were joined.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  int size() const { return static_cast<int>(parent_.size()); }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

}  // namespace lbsim
