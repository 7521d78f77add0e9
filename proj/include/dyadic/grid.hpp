#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dyadic/errors.hpp"

namespace dyadic {

// A dyadic cube at generation `level` inside the unit cube [0,1)^n.
// `pos` is the bit-interleaved (Morton) index of the cube within its level,
// so the 2^n children of a cube occupy consecutive positions and the leaves
// below any cube form one contiguous block of leaf indices.
struct CubeId {
  int level = 0;
  std::uint64_t pos = 0;

  friend auto operator<=>(const CubeId&, const CubeId&) = default;
};

template <class S>
using BasicCubeMap = std::map<CubeId, S>;
using CubeMap = BasicCubeMap<double>;

// Half-open block of leaf indices.
struct LeafRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;

  std::uint64_t size() const { return last - first; }
  bool contains(std::uint64_t leaf) const { return first <= leaf && leaf < last; }
};

// Finite dyadic grid: all dyadic subcubes of [0,1)^n down to a fixed depth.
// Leaves are the cubes at the deepest level, listed in Morton order.
class Grid {
public:
  Grid() = default;
  Grid(int dimension, int depth);

  int dimension() const { return n_; }
  int depth() const { return depth_; }

  std::uint64_t leaf_count() const { return std::uint64_t{1} << (n_ * depth_); }
  std::uint64_t level_size(int level) const;
  std::uint64_t cube_count() const { return level_offset(depth_ + 1); }

  CubeId root() const { return {0, 0}; }
  bool valid(CubeId q) const;
  void check(CubeId q) const;
  bool is_leaf(CubeId q) const { return q.level == depth_; }

  // Position of a cube in the level-by-level enumeration (level 0 first,
  // positions ascending inside each level).
  std::uint64_t cube_key(CubeId q) const;
  CubeId cube_at(std::uint64_t key) const;

  CubeId parent(CubeId q) const;
  std::vector<CubeId> children(CubeId q) const;
  bool contains(CubeId outer, CubeId inner) const;
  LeafRange leaves_under(CubeId q) const;
  CubeId leaf_cube(std::uint64_t leaf) const { return {depth_, leaf}; }
  CubeId ancestor_at_level(CubeId q, int level) const;
  std::vector<CubeId> ancestors(std::uint64_t leaf) const;  // root first

  // Integer corner coordinates at scale 2^-level, one entry per dimension.
  std::vector<std::uint64_t> coordinates(CubeId q) const;
  CubeId cube_from_coordinates(int level, const std::vector<std::uint64_t>& corner) const;

  double side_length(int level) const;
  double volume(CubeId q) const;

  std::vector<CubeId> all_cubes() const;

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  std::uint64_t level_offset(int level) const;

  int n_ = 1;
  int depth_ = 0;
};

// Per-cube totals of a leaf vector over each cube's leaf block, indexed by
// cube_key. Computed bottom-up in one pass.
template <class S>
std::vector<S> subtree_sums(const Grid& g, const std::vector<S>& leaf_values) {
  require(leaf_values.size() == g.leaf_count(), Errc::invalid_input,
          "leaf vector length does not match the grid");
  std::vector<S> acc(g.cube_count(), S{});
  const std::uint64_t leaf_base = g.cube_key({g.depth(), 0});
  for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
    acc[leaf_base + leaf] = leaf_values[leaf];
  const int fan = 1 << g.dimension();
  for (int level = g.depth() - 1; level >= 0; --level) {
    const std::uint64_t base = g.cube_key({level, 0});
    const std::uint64_t child_base = g.cube_key({level + 1, 0});
    for (std::uint64_t pos = 0; pos < g.level_size(level); ++pos) {
      S total{};
      for (int c = 0; c < fan; ++c)
        total += acc[child_base + (pos << g.dimension()) + c];
      acc[base + pos] = total;
    }
  }
  return acc;
}

// Totals of sparse per-cube values over every cube's descendants (the cube
// itself included), indexed by cube_key.
template <class S>
std::vector<S> cube_tree_sums(const Grid& g, const BasicCubeMap<S>& values) {
  std::vector<S> acc(g.cube_count(), S{});
  for (const auto& [cube, v] : values) acc[g.cube_key(cube)] = v;
  const int fan = 1 << g.dimension();
  for (int level = g.depth() - 1; level >= 0; --level) {
    const std::uint64_t base = g.cube_key({level, 0});
    const std::uint64_t child_base = g.cube_key({level + 1, 0});
    for (std::uint64_t pos = 0; pos < g.level_size(level); ++pos)
      for (int c = 0; c < fan; ++c)
        acc[base + pos] += acc[child_base + (pos << g.dimension()) + c];
  }
  return acc;
}

// For every leaf, the sum (resp. max) of the contributions attached to the
// cubes on its ancestor chain. Cubes absent from `contributions` contribute
// nothing; `empty` is the max over an empty set.
std::vector<double> ancestor_sums(const Grid& g, const CubeMap& contributions);
std::vector<double> ancestor_max(const Grid& g, const CubeMap& contributions,
                                 double empty = 0.0);

}  // namespace dyadic
