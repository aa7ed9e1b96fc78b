#include <algorithm>
#include <set>
#include <tuple>

#include "doctest.h"
#include "sirsurv/abm.hpp"
#include "sirsurv/error.hpp"

using namespace sirsurv;
using namespace sirsurv::abm;

namespace {

double d2(Point a, Point b) { return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y); }

// O(n^2) reference: k nearest by (distance, id), then symmetrized.
std::vector<std::set<std::uint32_t>> brute_force(const std::vector<Point>& pts, int k) {
  const auto n = static_cast<std::uint32_t>(pts.size());
  std::vector<std::set<std::uint32_t>> adj(n);
  for (std::uint32_t a = 0; a < n; ++a) {
    std::vector<std::pair<double, std::uint32_t>> cand;
    for (std::uint32_t b = 0; b < n; ++b) {
      if (b != a) cand.emplace_back(d2(pts[a], pts[b]), b);
    }
    std::sort(cand.begin(), cand.end());
    for (int j = 0; j < k; ++j) {
      adj[a].insert(cand[j].second);
      adj[cand[j].second].insert(a);
    }
  }
  return adj;
}

}  // namespace

TEST_CASE("positions are in the unit square and seeded") {
  const auto a = scatter_positions(500, 7);
  const auto b = scatter_positions(500, 7);
  const auto c = scatter_positions(500, 8);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& p : a) {
    CHECK(p.x >= 0.0);
    CHECK(p.x < 1.0);
    CHECK(p.y >= 0.0);
    CHECK(p.y < 1.0);
  }
}

TEST_CASE("grid search matches brute force") {
  for (int n : {2, 5, 40, 300, 2000}) {
    for (int k : {1, 2, 4, 8}) {
      if (n < k + 1) continue;
      CAPTURE(n);
      CAPTURE(k);
      const auto pts = scatter_positions(n, 1000 + n);
      const auto topo = build_topology(pts, k);
      const auto ref = brute_force(pts, k);
      REQUIRE(topo.size() == static_cast<std::size_t>(n));
      for (int a = 0; a < n; ++a) {
        const auto& row = topo.neighbors[a];
        CHECK(std::set<std::uint32_t>(row.begin(), row.end()) == ref[a]);
        CHECK(row.size() == ref[a].size());
      }
    }
  }
}

TEST_CASE("neighbour lists are symmetric, sorted and at least k long") {
  const auto topo = build_topology(3000, 8, 42);
  CHECK(topo.k == 8);
  for (std::uint32_t a = 0; a < topo.size(); ++a) {
    const auto& row = topo.neighbors[a];
    CHECK(row.size() >= 8);
    for (std::size_t j = 0; j < row.size(); ++j) {
      CHECK(row[j] != a);
      const auto& back = topo.neighbors[row[j]];
      CHECK(std::find(back.begin(), back.end(), a) != back.end());
      if (j > 0) {
        const auto prev = std::make_tuple(d2(topo.positions[a], topo.positions[row[j - 1]]), row[j - 1]);
        const auto cur = std::make_tuple(d2(topo.positions[a], topo.positions[row[j]]), row[j]);
        CHECK(prev < cur);
      }
    }
  }
}

TEST_CASE("clustered points still resolve") {
  std::vector<Point> pts;
  for (int j = 0; j < 200; ++j) pts.push_back({0.5 + 1e-6 * (j % 10), 0.5 + 1e-6 * (j / 10)});
  pts.push_back({0.0, 0.0});
  pts.push_back({0.999, 0.999});
  const auto topo = build_topology(pts, 4);
  const auto ref = brute_force(pts, 4);
  for (std::size_t a = 0; a < pts.size(); ++a) {
    CHECK(std::set<std::uint32_t>(topo.neighbors[a].begin(), topo.neighbors[a].end()) == ref[a]);
  }
}

TEST_CASE("topology is deterministic") {
  const auto a = build_topology(1000, 4, 3);
  const auto b = build_topology(1000, 4, 3);
  CHECK(a.positions == b.positions);
  CHECK(a.neighbors == b.neighbors);
}

TEST_CASE("too few nodes") {
  CHECK_THROWS_AS(build_topology(4, 4, 1), ValidationError);
  CHECK_THROWS_AS(build_topology(10, 0, 1), ValidationError);
  CHECK_NOTHROW(build_topology(5, 4, 1));
}
