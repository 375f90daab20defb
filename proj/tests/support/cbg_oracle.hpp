#pragma once

// Independent checks for the CBG filter and the candidate merge.

#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "lmgeo/cbg.hpp"
#include "lmgeo/random.hpp"

namespace lmgeo::testing {

// Indices of candidates whose distance to every center is <= its radius.
inline std::vector<std::size_t> inside_all_circles(const std::vector<ConstraintCircle>& circles,
                                                   const std::vector<CandidateCoordinate>& cands) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    bool ok = true;
    for (const auto& c : circles) {
      ok = ok && great_circle_distance(c.center, cands[i].position).value() <= c.radius.value();
    }
    if (ok) out.push_back(i);
  }
  return out;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// Partition of candidate indices into single-linkage clusters, as sets.
inline std::set<std::set<std::size_t>> union_find_clusters(
    const std::vector<CandidateCoordinate>& cands, double threshold_km) {
  UnionFind uf(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (std::size_t j = i + 1; j < cands.size(); ++j) {
      if (great_circle_distance(cands[i].position, cands[j].position).value() < threshold_km) {
        uf.unite(i, j);
      }
    }
  }
  std::map<std::size_t, std::set<std::size_t>> groups;
  for (std::size_t i = 0; i < cands.size(); ++i) groups[uf.find(i)].insert(i);
  std::set<std::set<std::size_t>> out;
  for (auto& [root, g] : groups) out.insert(g);
  return out;
}

}  // namespace lmgeo::testing
