#ifndef TESTS_ORACLES_HPP
#define TESTS_ORACLES_HPP

// Brute-force reference implementations used only by the test suites.
// These deliberately avoid the library's recurrences so agreement is
// meaningful.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include "assemblies/common.hpp"

namespace oracles {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
  int components() {
    int c = 0;
    for (int i = 0; i < static_cast<int>(parent.size()); ++i) c += find(i) == i;
    return c;
  }
};

// number of functions f:[n]->[n] whose functional graph is connected
inline std::uint64_t connected_mappings(int n) {
  std::uint64_t total = 0;
  std::vector<int> f(n, 0);
  std::uint64_t limit = 1;
  for (int i = 0; i < n; ++i) limit *= static_cast<std::uint64_t>(n);
  for (std::uint64_t code = 0; code < limit; ++code) {
    std::uint64_t c = code;
    for (int i = 0; i < n; ++i) {
      f[i] = static_cast<int>(c % n);
      c /= n;
    }
    UnionFind uf(n);
    for (int i = 0; i < n; ++i) uf.unite(i, f[i]);
    if (uf.components() == 1) ++total;
  }
  return total;
}

// number of connected simple labeled graphs on n vertices
inline std::uint64_t connected_graphs(int n) {
  if (n == 1) return 1;
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) edges.push_back({a, b});
  std::uint64_t total = 0;
  for (std::uint64_t mask = 0; mask < (1ULL << edges.size()); ++mask) {
    UnionFind uf(n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (mask & (1ULL << e)) uf.unite(edges[e].first, edges[e].second);
    }
    if (uf.components() == 1) ++total;
  }
  return total;
}

// Stirling numbers of the second kind, classic recurrence
inline assemblies::BigInt stirling2(int n, int k) {
  if (n == 0 && k == 0) return 1;
  if (n == 0 || k == 0 || k > n) return 0;
  std::vector<std::vector<assemblies::BigInt>> s(n + 1,
                                                 std::vector<assemblies::BigInt>(n + 1, 0));
  s[0][0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= i; ++j)
      s[i][j] = s[i - 1][j - 1] + assemblies::BigInt(j) * s[i - 1][j];
  return s[n][k];
}

// unsigned Stirling numbers of the first kind
inline assemblies::BigInt stirling1(int n, int k) {
  if (n == 0 && k == 0) return 1;
  if (n == 0 || k == 0 || k > n) return 0;
  std::vector<std::vector<assemblies::BigInt>> s(n + 1,
                                                 std::vector<assemblies::BigInt>(n + 1, 0));
  s[0][0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= i; ++j)
      s[i][j] = s[i - 1][j - 1] + assemblies::BigInt(i - 1) * s[i - 1][j];
  return s[n][k];
}

// Enumerate set partitions of [n] through restricted growth strings and
// hand each block-size multiset (sorted descending) to the callback.
inline void for_each_set_partition(int n,
                                   const std::function<void(std::vector<int>)>& yield) {
  std::vector<int> rgs(n, 0);
  std::function<void(int, int)> rec = [&](int i, int maxv) {
    if (i == n) {
      std::vector<int> sizes(maxv + 1, 0);
      for (int j = 0; j < n; ++j) sizes[rgs[j]] += 1;
      std::sort(sizes.rbegin(), sizes.rend());
      yield(sizes);
      return;
    }
    for (int v = 0; v <= maxv + 1; ++v) {
      rgs[i] = v;
      rec(i + 1, std::max(maxv, v));
    }
  };
  if (n == 0) return;
  rgs[0] = 0;
  rec(1, 0);
}

// permutations of [n] by cycle-type multiset (sorted descending)
inline void for_each_permutation(int n, const std::function<void(std::vector<int>)>& yield) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::vector<bool> seen(n, false);
    std::vector<int> cycles;
    for (int i = 0; i < n; ++i) {
      if (seen[i]) continue;
      int len = 0, j = i;
      while (!seen[j]) {
        seen[j] = true;
        j = perm[j];
        ++len;
      }
      cycles.push_back(len);
    }
    std::sort(cycles.rbegin(), cycles.rend());
    yield(cycles);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace oracles

#endif
