#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "chancoh/channels.hpp"
#include "chancoh/generators.hpp"
#include "chancoh/sdp.hpp"

using namespace chancoh;

namespace {

Channel identity_channel(std::size_t d) {
  return channel_from_kraus(d, d, {ComplexMatrix::identity(d)});
}

// Two-effect analytic oracle: min tr Y over Y >= E1, Y >= E2 equals
// (tr E1 + tr E2)/2 + ||E1 - E2||_1 / 2 (Helstrom form of the dual).
double helstrom_value(const ComplexMatrix& e1, const ComplexMatrix& e2) {
  return 0.5 * (e1.trace().real() + e2.trace().real()) + 0.5 * trace_norm(e1 - e2);
}

ComplexMatrix random_psd(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
  return m * m.dagger();
}

}  // namespace

TEST_CASE("diagonal program on the identity channel") {
  const Channel id = identity_channel(2);
  const DiagonalSdpProblem p{id.choi(), 2, 2};
  const SdpSolution sol = solve_diagonal(p);
  CHECK(sol.primal_value == Catch::Approx(2.0).margin(1e-6));
  CHECK(sol.gap <= 1e-8 * 2.0);
  REQUIRE(sol.d.size() == 4);
  // Optimal padding puts the full weight on the diagonal corners.
  CHECK(sol.d[0] == Catch::Approx(2.0).margin(1e-5));
  CHECK(sol.d[3] == Catch::Approx(2.0).margin(1e-5));
  CHECK(sol.d[1] < 1e-5);
  CHECK(sol.d[2] < 1e-5);
}

TEST_CASE("diagonal S gives the max block sum") {
  // For a diagonal target the optimum is the largest per-block diagonal sum.
  const ComplexMatrix s = ComplexMatrix::diagonal({0.3, 0.9, 0.5, 0.4});
  const SdpSolution sol = solve_diagonal(DiagonalSdpProblem{s, 2, 2});
  CHECK(sol.primal_value == Catch::Approx(1.2).margin(1e-6));

  // An incoherent channel always has block sums 1.
  const Channel inc = random_incoherent_channel(2, 3, 5);
  CHECK(solve_diagonal(DiagonalSdpProblem{inc.choi(), 2, 3}).primal_value ==
        Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("maximally coherent channel reaches the dimension bound") {
  const Channel mc = maximally_coherent(2, 2, random_phases(4, 7));
  const SdpSolution sol = solve_diagonal(DiagonalSdpProblem{mc.choi(), 2, 2});
  CHECK(sol.primal_value == Catch::Approx(4.0).margin(1e-5));
}

TEST_CASE("dual certificate is feasible and tight") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Channel c = random_channel(2, 2, 2, seed);
    const SdpSolution sol = solve_diagonal(DiagonalSdpProblem{c.choi(), 2, 2});
    const ComplexMatrix& z = sol.dual_matrix;
    CHECK(is_psd(z, 1e-8));
    // Block-constant diagonal with weights summing to 1.
    double weight_sum = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
      const double a0 = z(j * 2, j * 2).real();
      const double a1 = z(j * 2 + 1, j * 2 + 1).real();
      CHECK(std::abs(a0 - a1) < 1e-6);
      weight_sum += 0.5 * (a0 + a1);
    }
    CHECK(weight_sum == Catch::Approx(1.0).margin(1e-9));
    // Weak duality.
    const double dual = trace_of_product(c.choi(), z).real();
    CHECK(dual <= sol.primal_value + 1e-6);
    CHECK(dual >= sol.primal_value - 1e-5);
  }
}

TEST_CASE("validation of the diagonal problem") {
  CHECK_THROWS_AS(solve_diagonal(DiagonalSdpProblem{ComplexMatrix::identity(3), 2, 2}),
                  ValidationError);
  ComplexMatrix neg = ComplexMatrix::diagonal({1.0, -0.2, 1.0, 1.0});
  CHECK_THROWS_AS(solve_diagonal(DiagonalSdpProblem{neg, 2, 2}), ValidationError);
  ComplexMatrix nonherm(4, 4);
  nonherm(0, 1) = 1.0;
  CHECK_THROWS_AS(solve_diagonal(DiagonalSdpProblem{nonherm, 2, 2}), ValidationError);
}

TEST_CASE("splitting path agrees with the barrier path") {
  const std::vector<std::pair<std::size_t, std::size_t>> dims{{1, 2}, {2, 2}, {2, 3}, {3, 2}};
  std::uint64_t seed = 100;
  for (const auto& [dA, dB] : dims) {
    const Channel c = random_channel(dA, dB, 2, seed++);
    const double barrier = solve_diagonal(DiagonalSdpProblem{c.choi(), dA, dB}).primal_value;
    const double split = min_block_sum_splitting(c.choi(), dA, dB);
    CHECK(std::abs(barrier - split) < 1e-5 * std::max(1.0, barrier));
  }
  // Zero operator optimum is zero.
  CHECK(min_block_sum_splitting(ComplexMatrix(4, 4), 2, 2) == 0.0);
}

TEST_CASE("minimal dominating diagonal sum") {
  // Diagonal input: the optimum is the trace.
  const ComplexMatrix diag = ComplexMatrix::diagonal({0.3, 0.9, 0.5, 0.4});
  CHECK(min_diagonal_sum(diag) == Catch::Approx(2.1).margin(1e-6));

  // Rank-one 2 |phi+><phi+|: minimizing d0 + d3 under (d0-1)(d3-1) >= 1
  // gives 4.
  ComplexMatrix corner(4, 4);
  corner(0, 0) = corner(0, 3) = corner(3, 0) = corner(3, 3) = 1.0;
  CHECK(min_diagonal_sum(corner) == Catch::Approx(4.0).margin(1e-6));

  // Unequal block weights: |+><+| on one block plus I/2 on the other gives
  // 2 + 1 = 3, strictly below |A| times the block-equalized optimum 2.
  ComplexMatrix skew(4, 4);
  skew(0, 0) = skew(0, 1) = skew(1, 0) = skew(1, 1) = 0.5;
  skew(2, 2) = skew(3, 3) = 0.5;
  CHECK(min_diagonal_sum(skew) == Catch::Approx(3.0).margin(1e-6));

  CHECK(min_diagonal_sum(ComplexMatrix(3, 3)) == 0.0);
  ComplexMatrix neg = ComplexMatrix::diagonal({1.0, -0.5});
  CHECK_THROWS_AS(min_diagonal_sum(neg), ValidationError);
}

TEST_CASE("scaled simplex projection") {
  std::vector<double> y;
  const std::vector<double> v{0.9, -0.1, 0.4};
  const double theta = detail::project_scaled_simplex(v, 1.0, y);
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(y[i] >= 0.0);
    CHECK(y[i] == Catch::Approx(std::max(v[i] - theta, 0.0)).margin(1e-14));
    sum += y[i];
  }
  CHECK(sum == Catch::Approx(1.0).margin(1e-12));

  // Already on the simplex: projection is the identity.
  const std::vector<double> on{0.25, 0.75};
  detail::project_scaled_simplex(on, 1.0, y);
  CHECK(y[0] == Catch::Approx(0.25).margin(1e-12));
  CHECK(y[1] == Catch::Approx(0.75).margin(1e-12));
}

TEST_CASE("discrimination SDP: analytic cases") {
  // Orthogonal halves: optimum is 1 (perfect discrimination of the pair).
  ComplexMatrix e0(2, 2), e1(2, 2);
  e0(0, 0) = 0.5;
  e1(1, 1) = 0.5;
  const DiscriminationSolution orth = solve_discrimination({e0, e1});
  CHECK(orth.value == Catch::Approx(1.0).margin(1e-7));

  // K identical effects rho/K: optimum 1/K (guessing).
  const std::size_t kk = 3;
  ComplexMatrix rho = random_psd(2, 3);
  rho *= Complex(1.0 / rho.trace().real(), 0.0);
  std::vector<ComplexMatrix> same(kk, Complex(1.0 / static_cast<double>(kk), 0.0) * rho);
  CHECK(solve_discrimination(same).value ==
        Catch::Approx(1.0 / static_cast<double>(kk)).margin(1e-7));
}

TEST_CASE("discrimination SDP matches the two-effect oracle") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ComplexMatrix e1 = random_psd(3, 10 + seed);
    ComplexMatrix e2 = random_psd(3, 20 + seed);
    e1 *= Complex(0.5 / e1.trace().real(), 0.0);
    e2 *= Complex(0.5 / e2.trace().real(), 0.0);
    const DiscriminationSolution sol = solve_discrimination({e1, e2});
    CHECK(sol.value == Catch::Approx(helstrom_value(e1, e2)).margin(1e-6));
    // The returned POVM achieves the optimum.
    REQUIRE(sol.povm.size() == 2);
    const double achieved = trace_of_product(sol.povm[0], e1).real() +
                            trace_of_product(sol.povm[1], e2).real();
    CHECK(achieved == Catch::Approx(sol.value).margin(1e-6));
  }
}

TEST_CASE("discrimination SDP edge cases") {
  CHECK_THROWS_AS(solve_discrimination({}), ValidationError);
  ComplexMatrix nonherm(2, 2);
  nonherm(0, 1) = 1.0;
  CHECK_THROWS_AS(solve_discrimination({nonherm}), ValidationError);
  CHECK_THROWS_AS(solve_discrimination({ComplexMatrix(2, 2), ComplexMatrix(3, 3)}),
                  ValidationError);

  // All-zero effects: value 0 and a uniform POVM.
  const DiscriminationSolution z = solve_discrimination({ComplexMatrix(2, 2), ComplexMatrix(2, 2)});
  CHECK(z.value == 0.0);
  REQUIRE(z.povm.size() == 2);
  CHECK(distance_frobenius(z.povm[0] + z.povm[1], ComplexMatrix::identity(2)) < 1e-12);
}
