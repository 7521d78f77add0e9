#include <doctest.h>

#include "dyadic/grid.hpp"

using namespace dyadic;

TEST_CASE("cube counts by shape") {
  CHECK(Grid(1, 0).cube_count() == 1);
  CHECK(Grid(1, 1).cube_count() == 3);
  CHECK(Grid(2, 1).cube_count() == 5);
  CHECK(Grid(2, 2).cube_count() == 21);
  CHECK(Grid(1, 3).leaf_count() == 8);
}

TEST_CASE("construction limits") {
  CHECK_THROWS_AS(Grid(0, 1), Error);
  CHECK_THROWS_AS(Grid(1, -1), Error);
  try {
    Grid(2, 7);  // 16384 leaves
    FAIL("expected too_large");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::too_large);
  }
}

TEST_CASE("leaves under a cube form a contiguous block") {
  Grid g(1, 2);
  LeafRange root = g.leaves_under(g.root());
  CHECK(root.first == 0);
  CHECK(root.last == 4);
  CubeId l1{1, 1};
  LeafRange under = g.leaves_under(l1);
  CHECK(under.first == 2);
  CHECK(under.last == 4);
  CubeId leaf = g.leaf_cube(3);
  CHECK(g.leaves_under(leaf).size() == 1);
  CHECK(g.leaves_under(leaf).first == 3);
}

TEST_CASE("ancestor chains start at the root") {
  Grid flat(1, 0);
  auto chain = flat.ancestors(0);
  REQUIRE(chain.size() == 1);
  CHECK(chain[0] == flat.root());

  Grid g(1, 2);
  auto deep = g.ancestors(3);
  REQUIRE(deep.size() == 3);
  CHECK(deep[0] == g.root());
  CHECK(deep[1] == CubeId{1, 1});
  CHECK(deep[2] == CubeId{2, 3});
  for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
    CHECK(g.ancestors(leaf).front() == g.root());
}

TEST_CASE("cube_key enumerates level by level") {
  Grid g(2, 2);
  std::uint64_t key = 0;
  for (CubeId q : g.all_cubes()) {
    CHECK(g.cube_key(q) == key);
    CHECK(g.cube_at(key) == q);
    ++key;
  }
  CHECK(key == g.cube_count());
}

TEST_CASE("parent and children are inverse") {
  Grid g(2, 2);
  for (CubeId q : g.all_cubes()) {
    if (g.is_leaf(q)) continue;
    auto kids = g.children(q);
    CHECK(kids.size() == 4);
    for (CubeId child : kids) {
      CHECK(g.parent(child) == q);
      CHECK(g.contains(q, child));
      CHECK_FALSE(g.contains(child, q));
    }
  }
  CHECK_THROWS_AS(g.parent(g.root()), Error);
}

TEST_CASE("containment matches leaf ranges") {
  Grid g(1, 3);
  for (CubeId outer : g.all_cubes())
    for (CubeId inner : g.all_cubes()) {
      LeafRange a = g.leaves_under(outer);
      LeafRange b = g.leaves_under(inner);
      bool nested = a.first <= b.first && b.last <= a.last;
      CHECK(g.contains(outer, inner) == nested);
    }
}

TEST_CASE("coordinates round trip") {
  Grid g(2, 2);
  for (CubeId q : g.all_cubes()) {
    auto corner = g.coordinates(q);
    REQUIRE(corner.size() == 2);
    for (std::uint64_t c : corner) CHECK(c < (std::uint64_t{1} << q.level));
    CHECK(g.cube_from_coordinates(q.level, corner) == q);
  }
}

TEST_CASE("morton order keeps siblings adjacent") {
  Grid g(2, 1);
  auto kids = g.children(g.root());
  for (std::size_t i = 0; i < kids.size(); ++i) CHECK(kids[i].pos == i);
}

TEST_CASE("volume halves per level and dimension") {
  Grid g(2, 2);
  CHECK(g.volume(g.root()) == 1.0);
  CHECK(g.volume(CubeId{1, 2}) == 0.25);
  CHECK(g.volume(CubeId{2, 11}) == 1.0 / 16);
  CHECK(g.side_length(1) == 0.5);
}

TEST_CASE("subtree sums aggregate leaf vectors") {
  Grid g(1, 2);
  auto sums = subtree_sums(g, std::vector<double>{1, 2, 3, 4});
  CHECK(sums[g.cube_key(g.root())] == 10);
  CHECK(sums[g.cube_key(CubeId{1, 1})] == 7);
  CHECK(sums[g.cube_key(CubeId{2, 2})] == 3);
  CHECK_THROWS_AS(subtree_sums(g, std::vector<double>{1, 2}), Error);
}

TEST_CASE("cube tree sums include the cube itself") {
  Grid g(1, 1);
  CubeMap values{{g.root(), 1.0}, {CubeId{1, 0}, 2.0}};
  auto sums = cube_tree_sums(g, values);
  CHECK(sums[g.cube_key(g.root())] == 3.0);
  CHECK(sums[g.cube_key(CubeId{1, 0})] == 2.0);
  CHECK(sums[g.cube_key(CubeId{1, 1})] == 0.0);
}

TEST_CASE("ancestor sums and max walk the chain") {
  Grid g(1, 1);
  CubeMap values{{g.root(), 1.0}, {CubeId{1, 0}, 2.0}};
  auto sums = ancestor_sums(g, values);
  CHECK(sums[0] == 3.0);
  CHECK(sums[1] == 1.0);
  auto peaks = ancestor_max(g, values);
  CHECK(peaks[0] == 2.0);
  CHECK(peaks[1] == 1.0);
  auto empty = ancestor_max(g, CubeMap{}, -1.0);
  CHECK(empty[0] == -1.0);
}

TEST_CASE("cube validity checks") {
  Grid g(1, 1);
  CHECK(g.valid(CubeId{1, 1}));
  CHECK_FALSE(g.valid(CubeId{1, 2}));
  CHECK_FALSE(g.valid(CubeId{2, 0}));
  CHECK_FALSE(g.valid(CubeId{-1, 0}));
  CHECK_THROWS_AS(g.check(CubeId{2, 0}), Error);
}
