// Masked-grid geometry: interior classification, distances, balls, chains.
// Volume and diameter oracles are analytic; chain-length bounds come from
// segment-cover counting.

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "plate/geometry.hpp"
#include "plate/rng.hpp"

using namespace plate;

TEST_CASE("quarter-step unit square is the 3x3 interior lattice") {
  const DomainMask mask = make_rectangle({1.0, 1.0, 0.0}, 0.25);
  REQUIRE(mask.interior_count() == 9);
  for (const int node : mask.cells) {
    const Point p = mask.node_point(node);
    CHECK(p[0] == doctest::Approx(0.25 * std::round(p[0] / 0.25)));
    CHECK(p[0] > 0.0);
    CHECK(p[0] < 1.0);
  }
  // diameter convention: farthest interior node pair plus one cell
  CHECK(mask.diameter == doctest::Approx(std::hypot(0.5, 0.5) + 0.25));
}

TEST_CASE("disk cell count recovers the area") {
  const DomainMask mask = make_disk(1.0, 1.0 / 64.0);
  const double area = static_cast<double>(mask.interior_count()) * mask.h * mask.h;
  CHECK(std::abs(area - M_PI) / M_PI < 0.05);
}

TEST_CASE("4x1 rectangle diameter follows the interior-diagonal convention") {
  const double h = 1.0 / 32.0;
  const DomainMask mask = make_rectangle({4.0, 1.0, 0.0}, h);
  const double expected = std::hypot(4.0 - 2.0 * h, 1.0 - 2.0 * h) + h;
  CHECK(mask.diameter == doctest::Approx(expected).epsilon(1e-12));
  // within two cells of the analytic diagonal
  CHECK(std::abs(mask.diameter - std::sqrt(17.0)) <= 2.0 * mask.h);
}

TEST_CASE("degenerate and under-resolved domains are rejected") {
  CHECK_THROWS_AS(make_rectangle({0.2, 0.2, 0.0}, 0.5), std::invalid_argument);
  CHECK_THROWS_WITH_AS(make_disk(1.0, 0.9), "resolution too coarse",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(make_rectangle({1.0, 1.0, 0.0}, 0.5),
                       "resolution too coarse", std::invalid_argument);
}

TEST_CASE("interior distance approximates the analytic boundary distance") {
  const DomainMask square = make_rectangle({1.0, 1.0, 0.0}, 1.0 / 32.0);
  CHECK(std::abs(interior_distance(square, {0.5, 0.5, 0.0}) - 0.5) <= square.h);
  // a point sitting on a non-interior node has distance clamped at zero
  CHECK(interior_distance(square, {0.0, 0.5, 0.0}) == 0.0);

  const DomainMask disk = make_disk(1.0, 1.0 / 32.0);
  CHECK(std::abs(interior_distance(disk, {0.0, 0.0, 0.0}) - 1.0) <= disk.h);
}

TEST_CASE("interior distance is Lipschitz along random pairs") {
  const DomainMask mask = make_disk(1.0, 1.0 / 16.0);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Point x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0};
    const Point y{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0};
    const double dx = interior_distance(mask, x);
    const double dy = interior_distance(mask, y);
    CHECK(std::abs(dx - dy) <= dist(x, y) + mask.h);
  }
}

TEST_CASE("ball cell lookup") {
  const DomainMask mask = make_rectangle({2.0, 2.0, 0.0}, 1.0 / 32.0);

  SUBCASE("tiny ball hits exactly its center cell") {
    const int cid = static_cast<int>(mask.interior_count() / 2);
    const Point p = mask.node_point(mask.cells[cid]);
    const auto cells = ball_cells_clipped(mask, {p, mask.h / 4.0});
    REQUIRE(cells.size() == 1);
    CHECK(cells[0] == cid);
  }

  SUBCASE("ball outside the domain is empty, not an error") {
    CHECK(ball_cells_clipped(mask, {{5.0, 5.0, 0.0}, 0.3}).empty());
  }

  SUBCASE("contained ball recovers the disk area") {
    // r/h = 16, the resolution floor the 5% volume contract is stated at
    const auto cells = ball_cells(mask, {{1.0, 1.0, 0.0}, 0.5});
    const double vol = static_cast<double>(cells.size()) * mask.h * mask.h;
    CHECK(std::abs(vol - M_PI * 0.25) / (M_PI * 0.25) < 0.05);
  }

  SUBCASE("escaping ball is rejected for level statistics") {
    CHECK_THROWS_WITH_AS(ball_cells(mask, {{0.1, 0.1, 0.0}, 0.5}),
                         "ball not contained in domain", std::invalid_argument);
  }

  SUBCASE("monotone in radius") {
    const Ball small{{1.0, 1.0, 0.0}, 0.3}, big{{1.0, 1.0, 0.0}, 0.55};
    const auto a = ball_cells(mask, small);
    const auto b = ball_cells(mask, big);
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST_CASE("chain of balls") {
  const DomainMask square = make_rectangle({1.0, 1.0, 0.0}, 1.0 / 64.0);

  SUBCASE("coincident endpoints give the trivial chain") {
    const ChainReport rep =
        chain_of_balls(square, {0.5, 0.5, 0.0}, {0.5, 0.5, 0.0}, 0.2);
    CHECK(rep.length == 0);
    CHECK(rep.centers.size() == 1);
  }

  SUBCASE("straight segment cover matches the counting oracle") {
    const ChainReport rep =
        chain_of_balls(square, {0.25, 0.5, 0.0}, {0.75, 0.5, 0.0}, 0.2);
    // ceil(0.5 / (0.2 * 0.99)) + 1 steps suffice along the segment
    CHECK(rep.length <= 4);
    for (std::size_t i = 0; i + 1 < rep.centers.size(); ++i) {
      CHECK(dist(rep.centers[i], rep.centers[i + 1]) <=
            0.2 * (1.0 - square.h / 0.2) + 1e-12);
    }
  }

  SUBCASE("narrow corridor blocks the chain") {
    // lobes of side 1 centered at x = -1 and x = 1, corridor half-width 0.1
    const DomainMask bell = make_dumbbell(1.0, 1.0, 0.2, 1.0 / 32.0);
    const Point left{-1.0, 0.0, 0.0};
    const Point right{1.0, 0.0, 0.0};
    REQUIRE(interior_distance(bell, left) > 0.2);
    CHECK_THROWS_WITH_AS(chain_of_balls(bell, left, right, 0.2),
                         "chain not constructible at this radius",
                         std::runtime_error);
  }
}

TEST_CASE("interior sphere condition surrogate") {
  const DomainMask disk = make_disk(1.0, 1.0 / 32.0);
  CHECK(check_interior_sphere(disk, 0.25));
  CHECK_FALSE(check_interior_sphere(disk, 1.5));
  // the reentrant corner is touchable from inside the thick part
  const DomainMask ell = make_lshape(1.0, 1.0 / 32.0);
  CHECK(check_interior_sphere(ell, 0.25));
}
