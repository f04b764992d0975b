#include <catch2/catch_amalgamated.hpp>

#include "robustagg/lp.hpp"
#include "robustagg/random.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

using namespace robustagg;
using namespace robustagg::lp;

namespace {

DiscreteInstance diagonal_grid_instance(Eigen::Index n, double rho) {
  // x_1^j = x_2^j = (2j-1)/(2n), f = max(y1, y2)
  DiscreteInstance inst;
  inst.points.resize(n, 2);
  for (Eigen::Index j = 0; j < n; ++j) {
    double q = (2.0 * static_cast<double>(j) + 1.0) / (2.0 * static_cast<double>(n));
    inst.points(j, 0) = q;
    inst.points(j, 1) = q;
  }
  Vector a1(2), a2(2);
  a1 << 1.0, 0.0;
  a2 << 0.0, 1.0;
  inst.pieces = {{a1, 0.0}, {a2, 0.0}};
  inst.rho = rho;
  return inst;
}

DiscreteInstance random_instance(RandomSource& rng, Eigen::Index n, Eigen::Index d,
                                 Eigen::Index m) {
  DiscreteInstance inst;
  inst.points.resize(n, d);
  for (Eigen::Index i = 0; i < inst.points.size(); ++i) inst.points.data()[i] = rng.uniform();
  for (Eigen::Index k = 0; k < m; ++k) {
    Vector a(d);
    for (Eigen::Index i = 0; i < d; ++i) a(i) = 2.0 * rng.uniform() - 0.5;
    inst.pieces.push_back({a, rng.uniform() - 0.5});
  }
  inst.rho = rng.uniform() * 0.8;
  return inst;
}

double grid_value_at_rho_zero(const DiscreteInstance& inst) {
  ObjectiveSpec f = ObjectiveSpec::max_affine(inst.pieces);
  double s = 0.0;
  for (Eigen::Index j = 0; j < inst.n(); ++j)
    s += f.value(inst.points.row(j).transpose());
  return s / static_cast<double>(inst.n());
}

// Multi-marginal optimum over permutation couplings (d = 2): the exact
// unconstrained grid value by enumeration, valid for n <= 6.
double permutation_coupling_max(const DiscreteInstance& inst) {
  REQUIRE(inst.d() == 2);
  ObjectiveSpec f = ObjectiveSpec::max_affine(inst.pieces);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(inst.n()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1e300;
  do {
    double total = 0.0;
    Vector y(2);
    for (Eigen::Index j = 0; j < inst.n(); ++j) {
      y << inst.points(j, 0), inst.points(perm[static_cast<std::size_t>(j)], 1);
      total += f.value(y);
    }
    best = std::max(best, total / static_cast<double>(inst.n()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("simplex solves textbook scalars", "[lp]") {
  LpProblem p;
  int x = p.add_var("x", 1.0, false);
  p.add_row({{{x, 1.0}}, LpProblem::Sense::Ge, 3.0});
  auto sol = solve_lp(p);
  REQUIRE(sol.status == LpStatus::Optimal);
  REQUIRE(sol.value == Catch::Approx(3.0).margin(1e-9));
  REQUIRE(sol.x[0] == Catch::Approx(3.0).margin(1e-9));

  SECTION("infeasible and unbounded are detected") {
    LpProblem q;
    int v = q.add_var("v", 1.0, true);
    q.add_row({{{v, 1.0}}, LpProblem::Sense::Le, -2.0});
    REQUIRE(solve_lp(q).status == LpStatus::Infeasible);

    LpProblem r;
    int w = r.add_var("w", -1.0, true);
    r.add_row({{{w, 1.0}}, LpProblem::Sense::Ge, 0.0});
    REQUIRE(solve_lp(r).status == LpStatus::Unbounded);
  }
}

TEST_CASE("simplex agrees with dualized solve and certifies both", "[lp][property]") {
  RandomSource rng(404);
  for (int trial = 0; trial < 30; ++trial) {
    // random feasible bounded LP: min c'x, A x >= b with x >= 0 and a
    // bounding box row to keep it bounded
    int nv = 2 + static_cast<int>(rng.index(4));
    LpProblem p;
    for (int j = 0; j < nv; ++j) p.add_var("", rng.uniform() + 0.1, true);
    for (int i = 0; i < nv + 2; ++i) {
      LpProblem::Row row;
      row.sense = LpProblem::Sense::Ge;
      row.rhs = rng.uniform();
      for (int j = 0; j < nv; ++j)
        if (rng.uniform() < 0.7) row.coeffs.emplace_back(j, rng.uniform());
      if (row.coeffs.empty()) row.coeffs.emplace_back(0, 1.0);
      p.add_row(std::move(row));
    }
    auto direct = solve_lp(p);
    if (direct.status != LpStatus::Optimal) continue;

    auto dz = dual_of(p);
    auto dsol = solve_lp(dz.dual);
    REQUIRE(dsol.status == LpStatus::Optimal);
    REQUIRE(-dsol.value == Catch::Approx(direct.value).margin(1e-7));
  }
}

TEST_CASE("dual LP matches the documented dimensions", "[lp]") {
  auto inst = diagonal_grid_instance(2, 0.1);
  LpProblem p = build_dual_lp(inst);
  REQUIRE(p.n_vars == 1 + 2 * 2 + 2 + 2 * 2 * 2);  // 15
  REQUIRE(p.rows.size() == 2u * 2u + 2u * 4u * 2u + 1u);  // 21
  REQUIRE(p.var_index.count("lambda") == 1);
}

TEST_CASE("rho = 0 forces the reference value on both LPs", "[lp]") {
  RandomSource rng(7);
  auto inst = random_instance(rng, 5, 2, 2);
  inst.rho = 0.0;
  double ref = grid_value_at_rho_zero(inst);
  REQUIRE(dual_lp_value(inst) == Catch::Approx(ref).margin(1e-7));
  REQUIRE(primal_lp_value(inst) == Catch::Approx(ref).margin(1e-7));
}

TEST_CASE("large rho reaches the multi-marginal optimum", "[lp]") {
  RandomSource rng(8);
  auto inst = random_instance(rng, 5, 2, 2);
  inst.rho = 10.0;  // exceeds the grid diameter times d
  double enumerated = permutation_coupling_max(inst);
  REQUIRE(primal_lp_value(inst) == Catch::Approx(enumerated).margin(1e-7));
  REQUIRE(dual_lp_value(inst) == Catch::Approx(enumerated).margin(1e-7));
}

TEST_CASE("strong duality on random small instances", "[lp][property]") {
  RandomSource rng(505);
  for (int trial = 0; trial < 50; ++trial) {
    auto n = static_cast<Eigen::Index>(2 + rng.index(7));  // n <= 8
    auto m = static_cast<Eigen::Index>(1 + rng.index(3));
    auto inst = random_instance(rng, n, 2, m);
    double dv = dual_lp_value(inst);
    double pv = primal_lp_value(inst);
    INFO("trial " << trial << " n=" << n << " M=" << m << " rho=" << inst.rho);
    REQUIRE(dv == Catch::Approx(pv).margin(1e-6));
  }
}

TEST_CASE("lp value is monotone in rho, exactly", "[lp][property]") {
  RandomSource rng(606);
  auto inst = random_instance(rng, 6, 2, 2);
  double prev = -1e300;
  for (double rho : {0.0, 0.05, 0.1, 0.2, 0.4, 0.8}) {
    inst.rho = rho;
    double v = dual_lp_value(inst);
    REQUIRE(v >= prev - 1e-9);
    prev = v;
  }
}

TEST_CASE("value bounds on the grid", "[lp][property]") {
  RandomSource rng(707);
  for (int trial = 0; trial < 5; ++trial) {
    auto inst = random_instance(rng, 5, 2, 2);
    double v = dual_lp_value(inst);
    double lo = grid_value_at_rho_zero(inst);
    ObjectiveSpec f = ObjectiveSpec::max_affine(inst.pieces);
    double hi = -1e300;
    Vector y(2);
    for (Eigen::Index k1 = 0; k1 < inst.n(); ++k1)
      for (Eigen::Index k2 = 0; k2 < inst.n(); ++k2) {
        y << inst.points(k1, 0), inst.points(k2, 1);
        hi = std::max(hi, f.value(y));
      }
    REQUIRE(v >= lo - 1e-7);
    REQUIRE(v <= hi + 1e-7);
  }
}

TEST_CASE("primal LP value matches exhaustive vertex enumeration", "[lp][slow]") {
  // n = 3 diagonal grid with a transport budget: enumerate every basis of
  // the standardized system and take the best feasible vertex.
  auto inst = diagonal_grid_instance(3, 0.2);
  const int n = 3;
  LpProblem p = build_primal_lp(inst);
  const int nv = p.n_vars;  // 27 couplings

  // The marginal equalities carry the usual transportation redundancy: the
  // first-marginal rows sum to the coordinate-i marginal rows. Drop the last
  // marginal row of each coordinate so every basis is square and invertible.
  std::vector<int> keep;
  for (int i = 0; i < static_cast<int>(p.rows.size()); ++i)
    if (i != n + (n - 1) && i != 2 * n + (n - 1)) keep.push_back(i);
  const int m = static_cast<int>(keep.size());

  // standard form: add one slack for the single <= row
  Matrix a = Matrix::Zero(m, nv + 1);
  Vector b(m);
  Vector cost = Vector::Zero(nv + 1);
  for (int j = 0; j < nv; ++j) cost(j) = p.objective[static_cast<std::size_t>(j)];
  for (int r = 0; r < m; ++r) {
    const auto& row = p.rows[static_cast<std::size_t>(keep[static_cast<std::size_t>(r)])];
    for (auto& [j, v] : row.coeffs) a(r, j) = v;
    b(r) = row.rhs;
    if (row.sense == LpProblem::Sense::Le) a(r, nv) = 1.0;
  }

  double best = 1e300;
  std::vector<int> cols(static_cast<std::size_t>(m));
  // enumerate subsets of size m of the nv+1 columns
  std::vector<int> idx(static_cast<std::size_t>(m));
  std::iota(idx.begin(), idx.end(), 0);
  const int ncols = nv + 1;
  while (true) {
    Matrix basis(m, m);
    for (int r = 0; r < m; ++r) basis.col(r) = a.col(idx[static_cast<std::size_t>(r)]);
    Eigen::FullPivLU<Matrix> lu(basis);
    if (lu.isInvertible()) {
      Vector xb = lu.solve(b);
      // reject ill-conditioned bases that slipped past the rank test
      if ((basis * xb - b).cwiseAbs().maxCoeff() <= 1e-8 && (xb.array() >= -1e-9).all()) {
        double val = 0.0;
        for (int r = 0; r < m; ++r) val += cost(idx[static_cast<std::size_t>(r)]) * xb(r);
        best = std::min(best, val);
      }
    }
    // next combination
    int t = m - 1;
    while (t >= 0 && idx[static_cast<std::size_t>(t)] == ncols - m + t) --t;
    if (t < 0) break;
    ++idx[static_cast<std::size_t>(t)];
    for (int r = t + 1; r < m; ++r) idx[static_cast<std::size_t>(r)] = idx[static_cast<std::size_t>(r - 1)] + 1;
  }

  double lp_max = primal_lp_value(inst);
  REQUIRE(lp_max == Catch::Approx(-best).margin(1e-7));
}

TEST_CASE("five-one grid at n = 50 approximates the analytic value", "[lp][slow]") {
  auto inst = diagonal_grid_instance(50, 0.25);
  double v = dual_lp_value(inst);
  REQUIRE(v == Catch::Approx(0.625).margin(0.02));
}

TEST_CASE("non-separable cost is rejected for the LP route", "[lp]") {
  auto inst = diagonal_grid_instance(3, 0.2);
  inst.cost = CostSpec::l2_euclid();
  REQUIRE_THROWS_AS(build_dual_lp(inst), unsupported_instance);
}

TEST_CASE("export listing mentions every variable and row", "[lp]") {
  auto inst = diagonal_grid_instance(2, 0.1);
  LpProblem p = build_dual_lp(inst);
  std::string listing = p.export_listing();
  REQUIRE(listing.find("minimize") != std::string::npos);
  REQUIRE(listing.find("r20") != std::string::npos);
}
