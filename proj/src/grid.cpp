#include "dyadic/grid.hpp"

#include <string>

namespace dyadic {

namespace {
constexpr std::uint64_t kMaxLeaves = 4096;  // desk-scale bound
}

Grid::Grid(int dimension, int depth) : n_(dimension), depth_(depth) {
  require(dimension >= 1 && dimension <= 8, Errc::invalid_input,
          "grid dimension must be between 1 and 8");
  require(depth >= 0, Errc::invalid_input, "grid depth must be nonnegative");
  require(dimension * (depth + 1) <= 63, Errc::invalid_input,
          "grid dimension*depth too large for 64-bit cube positions");
  require(leaf_count() <= kMaxLeaves, Errc::too_large,
          "grid exceeds the desk-scale bound of " + std::to_string(kMaxLeaves) +
              " leaves");
}

std::uint64_t Grid::level_size(int level) const {
  return std::uint64_t{1} << (n_ * level);
}

std::uint64_t Grid::level_offset(int level) const {
  // 1 + 2^n + ... + 2^{n(level-1)}
  return ((std::uint64_t{1} << (n_ * level)) - 1) / ((std::uint64_t{1} << n_) - 1);
}

bool Grid::valid(CubeId q) const {
  return q.level >= 0 && q.level <= depth_ && q.pos < level_size(q.level);
}

void Grid::check(CubeId q) const {
  require(valid(q), Errc::invalid_input,
          "cube {level=" + std::to_string(q.level) +
              ", pos=" + std::to_string(q.pos) + "} is not in the grid");
}

std::uint64_t Grid::cube_key(CubeId q) const {
  check(q);
  return level_offset(q.level) + q.pos;
}

CubeId Grid::cube_at(std::uint64_t key) const {
  require(key < cube_count(), Errc::invalid_input, "cube key out of range");
  int level = 0;
  while (key >= level_offset(level + 1)) ++level;
  return {level, key - level_offset(level)};
}

CubeId Grid::parent(CubeId q) const {
  check(q);
  require(q.level > 0, Errc::invalid_input, "the root cube has no parent");
  return {q.level - 1, q.pos >> n_};
}

std::vector<CubeId> Grid::children(CubeId q) const {
  check(q);
  require(q.level < depth_, Errc::invalid_input, "leaf cubes have no children");
  std::vector<CubeId> out;
  out.reserve(std::size_t{1} << n_);
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << n_); ++c)
    out.push_back({q.level + 1, (q.pos << n_) | c});
  return out;
}

bool Grid::contains(CubeId outer, CubeId inner) const {
  check(outer);
  check(inner);
  if (inner.level < outer.level) return false;
  return (inner.pos >> (n_ * (inner.level - outer.level))) == outer.pos;
}

LeafRange Grid::leaves_under(CubeId q) const {
  check(q);
  const int shift = n_ * (depth_ - q.level);
  return {q.pos << shift, (q.pos + 1) << shift};
}

CubeId Grid::ancestor_at_level(CubeId q, int level) const {
  check(q);
  require(level >= 0 && level <= q.level, Errc::invalid_input,
          "ancestor level must be between 0 and the cube level");
  return {level, q.pos >> (n_ * (q.level - level))};
}

std::vector<CubeId> Grid::ancestors(std::uint64_t leaf) const {
  require(leaf < leaf_count(), Errc::invalid_input, "leaf index out of range");
  std::vector<CubeId> chain;
  chain.reserve(depth_ + 1);
  for (int level = 0; level <= depth_; ++level)
    chain.push_back({level, leaf >> (n_ * (depth_ - level))});
  return chain;
}

std::vector<std::uint64_t> Grid::coordinates(CubeId q) const {
  check(q);
  std::vector<std::uint64_t> corner(n_, 0);
  for (int bit = 0; bit < q.level; ++bit)
    for (int d = 0; d < n_; ++d)
      corner[d] |= ((q.pos >> (n_ * bit + d)) & 1) << bit;
  return corner;
}

CubeId Grid::cube_from_coordinates(int level,
                                   const std::vector<std::uint64_t>& corner) const {
  require(level >= 0 && level <= depth_, Errc::invalid_input,
          "cube level out of range");
  require(corner.size() == static_cast<std::size_t>(n_), Errc::invalid_input,
          "corner has wrong number of coordinates");
  CubeId q{level, 0};
  for (int d = 0; d < n_; ++d) {
    require(corner[d] < (std::uint64_t{1} << level), Errc::invalid_input,
            "corner coordinate out of range for the level");
    for (int bit = 0; bit < level; ++bit)
      q.pos |= ((corner[d] >> bit) & 1) << (n_ * bit + d);
  }
  return q;
}

double Grid::side_length(int level) const {
  require(level >= 0 && level <= depth_, Errc::invalid_input,
          "level out of range");
  return 1.0 / static_cast<double>(std::uint64_t{1} << level);
}

double Grid::volume(CubeId q) const {
  check(q);
  return 1.0 / static_cast<double>(level_size(q.level));
}

std::vector<CubeId> Grid::all_cubes() const {
  std::vector<CubeId> out;
  out.reserve(cube_count());
  for (int level = 0; level <= depth_; ++level)
    for (std::uint64_t pos = 0; pos < level_size(level); ++pos)
      out.push_back({level, pos});
  return out;
}

namespace {

// Shared driver for the top-down sweeps: seeds per-cube values, pushes them
// down one level at a time with `combine`, and returns the leaf row.
template <class Combine>
std::vector<double> push_down(const Grid& g, const CubeMap& contributions,
                              double empty, Combine combine) {
  std::vector<double> acc(g.cube_count(), empty);
  for (const auto& [cube, value] : contributions) {
    const std::uint64_t key = g.cube_key(cube);
    acc[key] = combine(acc[key], value);
  }
  const int fan_bits = g.dimension();
  for (int level = 1; level <= g.depth(); ++level) {
    const std::uint64_t base = g.cube_key({level, 0});
    const std::uint64_t parent_base = g.cube_key({level - 1, 0});
    for (std::uint64_t pos = 0; pos < g.level_size(level); ++pos) {
      std::uint64_t key = base + pos;
      acc[key] = combine(acc[key], acc[parent_base + (pos >> fan_bits)]);
    }
  }
  const std::uint64_t leaf_base = g.cube_key({g.depth(), 0});
  return {acc.begin() + leaf_base, acc.end()};
}

}  // namespace

std::vector<double> ancestor_sums(const Grid& g, const CubeMap& contributions) {
  return push_down(g, contributions, 0.0,
                   [](double a, double b) { return a + b; });
}

std::vector<double> ancestor_max(const Grid& g, const CubeMap& contributions,
                                 double empty) {
  return push_down(g, contributions, empty,
                   [](double a, double b) { return a < b ? b : a; });
}

}  // namespace dyadic
