#include <algorithm>
#include <cmath>

#include "sirsurv/abm.hpp"
#include "sirsurv/error.hpp"
#include "sirsurv/random.hpp"

namespace sirsurv::abm {

namespace {

double dist2(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

struct Candidate {
  double d2;
  std::uint32_t id;

  bool operator<(const Candidate& o) const { return d2 < o.d2 || (d2 == o.d2 && id < o.id); }
};

// Uniform bucket grid over the unit square, ~2 points per cell.
class Grid {
public:
  explicit Grid(const std::vector<Point>& pts)
      : side_(std::max(1, static_cast<int>(std::sqrt(static_cast<double>(pts.size()) / 2.0)))),
        cells_(static_cast<std::size_t>(side_) * side_) {
    for (std::uint32_t id = 0; id < pts.size(); ++id) cells_[index(cell_of(pts[id].x), cell_of(pts[id].y))].push_back(id);
  }

  int side() const { return side_; }
  double cell_size() const { return 1.0 / side_; }
  int cell_of(double v) const { return std::clamp(static_cast<int>(v * side_), 0, side_ - 1); }
  const std::vector<std::uint32_t>& at(int cx, int cy) const { return cells_[index(cx, cy)]; }

private:
  std::size_t index(int cx, int cy) const { return static_cast<std::size_t>(cy) * side_ + cx; }

  int side_;
  std::vector<std::vector<std::uint32_t>> cells_;
};

// k nearest of `self` by (distance, id), scanning rings of cells outwards
// until no unvisited cell can beat the current k-th candidate.
std::vector<Candidate> nearest(const Grid& grid, const std::vector<Point>& pts, std::uint32_t self, int k) {
  const Point p = pts[self];
  const int cx = grid.cell_of(p.x);
  const int cy = grid.cell_of(p.y);
  std::vector<Candidate> found;

  for (int ring = 0; ring <= grid.side(); ++ring) {
    for (int y = cy - ring; y <= cy + ring; ++y) {
      if (y < 0 || y >= grid.side()) continue;
      for (int x = cx - ring; x <= cx + ring; ++x) {
        if (x < 0 || x >= grid.side()) continue;
        if (std::max(std::abs(x - cx), std::abs(y - cy)) != ring) continue;
        for (std::uint32_t id : grid.at(x, y)) {
          if (id != self) found.push_back({dist2(p, pts[id]), id});
        }
      }
    }
    if (static_cast<int>(found.size()) >= k) {
      std::nth_element(found.begin(), found.begin() + (k - 1), found.end());
      // Every point outside the scanned block is farther than this.
      const double reach = ring * grid.cell_size();
      if (found[k - 1].d2 < reach * reach) break;
    }
  }
  std::sort(found.begin(), found.end());
  found.resize(std::min<std::size_t>(found.size(), k));
  return found;
}

}  // namespace

std::vector<Point> scatter_positions(int n, std::uint64_t seed) {
  if (n < 0) throw ValidationError("n", "must be >= 0");
  rng::Stream stream(seed);
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) {
    p.x = stream.uniform();
    p.y = stream.uniform();
  }
  return pts;
}

Topology build_topology(int n, int k_topology, std::uint64_t seed) {
  if (k_topology < 1) throw ValidationError("k_topology", "must be >= 1");
  if (n < k_topology + 1) throw ValidationError("n", "needs at least k_topology + 1 nodes");
  return build_topology(scatter_positions(n, seed), k_topology);
}

Topology build_topology(std::vector<Point> positions, int k_topology) {
  const auto n = positions.size();
  if (k_topology < 1) throw ValidationError("k_topology", "must be >= 1");
  if (n < static_cast<std::size_t>(k_topology) + 1) throw ValidationError("n", "needs at least k_topology + 1 nodes");

  const Grid grid(positions);
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::uint32_t u = 0; u < n; ++u) {
    for (const auto& c : nearest(grid, positions, u, k_topology)) {
      adj[u].push_back(c.id);
      adj[c.id].push_back(u);
    }
  }
  for (std::uint32_t u = 0; u < n; ++u) {
    auto& list = adj[u];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    const Point p = positions[u];
    std::sort(list.begin(), list.end(), [&](std::uint32_t a, std::uint32_t b) {
      return Candidate{dist2(p, positions[a]), a} < Candidate{dist2(p, positions[b]), b};
    });
  }
  return Topology{std::move(positions), std::move(adj), k_topology};
}

}  // namespace sirsurv::abm
