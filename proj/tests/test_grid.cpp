#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "carnotflow/grid.hpp"

using namespace carnotflow;

namespace {

std::shared_ptr<const Grid> h1_grid(double extent, double h) {
  const auto g = GroupDescriptor::heisenberg(1);
  Box box;
  box.lo = Vec(3);
  box.hi = Vec(3);
  box.h = Vec(3);
  box.lo.setConstant(-extent);
  box.hi.setConstant(extent);
  box.h.setConstant(h);
  return std::make_shared<const Grid>(box, g);
}

}  // namespace

TEST_CASE("build_layer samples the datum") {
  auto grid = h1_grid(2.0, 0.25);
  SUBCASE("constant") {
    const ValueLayer layer = build_layer(grid, [](const Vec&) { return 3.0; }, 3.0);
    CHECK(layer.values.minCoeff() == 3.0);
    CHECK(layer.values.maxCoeff() == 3.0);
    CHECK(layer.t == 0.0);
  }
  SUBCASE("capped cylinder matches the formula at nodes") {
    BuildDiagnostics diag;
    auto psi = [](const Vec& p) { return std::min(p(0) * p(0) + p(1) * p(1) - 1.0, 1.0); };
    const ValueLayer layer = build_layer(grid, psi, 1.0, &diag);
    for (std::int64_t f = 0; f < grid->node_count(); f += 7)
      CHECK(layer.values(f) == psi(grid->node_point(f)));
    // the cylinder is not constant on the vertical faces; that is a counted
    // diagnostic, not an error
    CHECK(diag.vertical_shell_mismatches > 0);
  }
  SUBCASE("horizontal shell mismatch is a configuration error") {
    CHECK_THROWS_AS(build_layer(grid, [](const Vec& p) { return p(0); }, 0.0), ConfigError);
  }
}

TEST_CASE("grid validation") {
  const auto g = GroupDescriptor::euclidean(2);
  Box box;
  box.lo = Vec(2);
  box.hi = Vec(2);
  box.h = Vec(2);
  box.lo << 0, 0;
  box.hi << 1, 1;
  box.h << 0.3, 0.5;  // 1/0.3 is not integral
  CHECK_THROWS_AS(Grid(box, g), ConfigError);
  box.h << 0.5, 0.5;
  const Grid grid(box, g);
  CHECK(grid.node_count() == 9);
  CHECK(grid.nodes_along(0) == 3);
}

TEST_CASE("sample interpolates and extends") {
  auto grid = h1_grid(1.0, 0.5);
  auto lin = [](const Vec& p) { return 0.25 + 0.5 * p(0) - p(1) + 0.125 * p(0) * p(1); };
  ValueLayer layer;
  layer.grid = grid;
  layer.far_field = 7.0;
  layer.values.resize(grid->node_count());
  for (std::int64_t f = 0; f < grid->node_count(); ++f)
    layer.values(f) = lin(grid->node_point(f));

  SUBCASE("grid nodes are exact") {
    for (std::int64_t f = 0; f < grid->node_count(); f += 3)
      CHECK(sample(layer, grid->node_point(f)) == layer.values(f));
  }
  SUBCASE("outside the box returns the far field") {
    Vec p(3);
    p << 5, 0, 0;
    bool outside = false;
    CHECK(sample(layer, p, &outside) == 7.0);
    CHECK(outside);
  }
  SUBCASE("multilinear functions are reproduced exactly") {
    Rng rng(31);
    for (int s = 0; s < 200; ++s) {
      Vec p(3);
      for (int k = 0; k < 3; ++k) p(k) = rng.uniform(-1, 1);
      CHECK(sample(layer, p) == doctest::Approx(lin(p)).epsilon(1e-12));
    }
  }
  SUBCASE("interpolation is monotone") {
    const double lo = std::min(layer.values.minCoeff(), layer.far_field);
    const double hi = std::max(layer.values.maxCoeff(), layer.far_field);
    Rng rng(32);
    for (int s = 0; s < 500; ++s) {
      Vec p(3);
      for (int k = 0; k < 3; ++k) p(k) = rng.uniform(-1.5, 1.5);
      const double v = sample(layer, p);
      CHECK(v >= lo - 1e-12);
      CHECK(v <= hi + 1e-12);
    }
  }
  SUBCASE("sample is Lipschitz in the Euclidean distance") {
    // L bounded by the largest adjacent-node difference per axis over h
    double lip = 0.0;
    int idx[kMaxDim];
    for (std::int64_t f = 0; f < grid->node_count(); ++f) {
      grid->node_index(f, idx);
      for (int k = 0; k < 3; ++k) {
        if (idx[k] + 1 >= grid->nodes_along(k)) continue;
        int jdx[kMaxDim] = {idx[0], idx[1], idx[2]};
        ++jdx[k];
        const double d = std::abs(layer.values(grid->flat_index(jdx)) - layer.values(f)) /
                         grid->box().h(k);
        lip = std::max(lip, d);
      }
    }
    const double L = 3.0 * lip;  // sum over axes bound
    Rng rng(33);
    for (int s = 0; s < 200; ++s) {
      Vec p(3), q(3);
      for (int k = 0; k < 3; ++k) {
        p(k) = rng.uniform(-0.9, 0.9);
        q(k) = p(k) + rng.uniform(-0.05, 0.05);
      }
      CHECK(std::abs(sample(layer, p) - sample(layer, q)) <= L * (p - q).norm() + 1e-12);
    }
  }
}

TEST_CASE("horizontal derivatives along the frame") {
  const auto g = GroupDescriptor::heisenberg(1);
  auto grid = h1_grid(2.0, 0.1);

  SUBCASE("quadratic in the horizontal coordinates") {
    ValueLayer layer;
    layer.grid = grid;
    layer.far_field = 0.0;
    layer.values.resize(grid->node_count());
    for (std::int64_t f = 0; f < grid->node_count(); ++f) {
      const Vec p = grid->node_point(f);
      layer.values(f) = p(0) * p(0) + p(1) * p(1);
    }
    Rng rng(41);
    for (int s = 0; s < 50; ++s) {
      Vec p(3);
      // stay on nodes so the probes only leave the lattice vertically, where
      // this datum is flat
      int idx[3] = {rng.uniform_int(4, 36), rng.uniform_int(4, 36), rng.uniform_int(4, 36)};
      p = grid->node_point(grid->flat_index(idx));
      const auto fd = horizontal_derivatives(layer, p, 0.1, g);
      CHECK(fd.eta(0) == doctest::Approx(2.0 * p(0)).epsilon(1e-9));
      CHECK(fd.eta(1) == doctest::Approx(2.0 * p(1)).epsilon(1e-9));
      CHECK(fd.hess(0, 0) == doctest::Approx(2.0).epsilon(1e-7));
      CHECK(fd.hess(1, 1) == doctest::Approx(2.0).epsilon(1e-7));
      CHECK(fd.hess(0, 1) == doctest::Approx(0.0).epsilon(1e-7));
    }
  }
  SUBCASE("constant data has vanishing derivatives") {
    const ValueLayer layer = build_layer(grid, [](const Vec&) { return 2.0; }, 2.0);
    const auto fd = horizontal_derivatives(layer, Vec(Vec::Zero(3)), 0.1, g);
    CHECK(fd.eta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(fd.hess.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("vertical coordinate picks up the frame twist") {
    ValueLayer layer;
    layer.grid = grid;
    layer.far_field = 0.0;
    layer.values.resize(grid->node_count());
    for (std::int64_t f = 0; f < grid->node_count(); ++f)
      layer.values(f) = grid->node_point(f)(2);
    int idx[3] = {30, 10, 20};
    const Vec p = grid->node_point(grid->flat_index(idx));
    const auto fd = horizontal_derivatives(layer, p, 0.1, g);
    // X1 p3 = -p2/2, X2 p3 = p1/2
    CHECK(fd.eta(0) == doctest::Approx(-0.5 * p(1)).epsilon(1e-9));
    CHECK(fd.eta(1) == doctest::Approx(0.5 * p(0)).epsilon(1e-9));
  }
  SUBCASE("contract checks") {
    const ValueLayer layer = build_layer(grid, [](const Vec&) { return 0.0; }, 0.0);
    CHECK_THROWS_AS(horizontal_derivatives(layer, Vec(Vec::Zero(3)), 0.0, g),
                    std::invalid_argument);
    Vec edge(3);
    edge << 1.95, 1.95, 0.0;
    const auto fd = horizontal_derivatives(layer, edge, 0.5, g);
    CHECK(fd.stencil_breach);
  }
}

TEST_CASE("derivative rate on a transcendental datum") {
  // second-order convergence measured where the probes stay on lattice lines
  const auto g = GroupDescriptor::euclidean(2);
  Box box;
  box.lo = Vec(2);
  box.hi = Vec(2);
  box.h = Vec(2);
  box.lo.setConstant(-2.0);
  box.hi.setConstant(2.0);
  box.h.setConstant(0.0125);
  auto grid = std::make_shared<const Grid>(box, g);
  ValueLayer layer;
  layer.grid = grid;
  layer.far_field = 0.0;
  layer.values.resize(grid->node_count());
  for (std::int64_t f = 0; f < grid->node_count(); ++f) {
    const Vec p = grid->node_point(f);
    layer.values(f) = std::sin(p(0)) * std::cos(p(1));
  }
  Vec p(2);
  p << 0.5, -0.25;  // a lattice node for h = 0.0125
  double err[3];
  int k = 0;
  for (double delta : {0.4, 0.2, 0.1}) {
    const auto fd = horizontal_derivatives(layer, p, delta, g);
    const double ex = std::cos(p(0)) * std::cos(p(1));
    const double ey = -std::sin(p(0)) * std::sin(p(1));
    err[k++] = std::hypot(fd.eta(0) - ex, fd.eta(1) - ey);
  }
  const double slope = 0.5 * (std::log2(err[0] / err[1]) + std::log2(err[1] / err[2]));
  CHECK(slope >= 1.9);
}

TEST_CASE("layer csv roundtrip") {
  auto grid = h1_grid(1.0, 1.0);
  ValueLayer layer;
  layer.grid = grid;
  layer.t = 0.125;
  layer.far_field = 0.0;
  layer.values.resize(grid->node_count());
  Rng rng(55);
  for (std::int64_t f = 0; f < grid->node_count(); ++f)
    layer.values(f) = rng.uniform(-1, 1);
  const std::string path = "test_layer.csv";
  write_layer_csv(layer, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x1,x2,x3,u");
  std::int64_t f = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto last = line.rfind(',');
    CHECK(std::stod(line.substr(last + 1)) == layer.values(f));
    ++f;
  }
  CHECK(f == grid->node_count());
  std::remove(path.c_str());
}
