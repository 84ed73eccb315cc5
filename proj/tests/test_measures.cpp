#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "chancoh/generators.hpp"
#include "chancoh/measures.hpp"

using namespace chancoh;

namespace {

Channel identity_qubit() { return channel_from_kraus(2, 2, {ComplexMatrix::identity(2)}); }

Channel dephasing_qubit() {
  ComplexMatrix k0(2, 2), k1(2, 2);
  k0(0, 0) = 1.0;
  k1(1, 1) = 1.0;
  return channel_from_kraus(2, 2, {k0, k1});
}

// Channel with unequal optimal block weights in the dual certificate:
// rho -> <0|rho|0> |+><+| + <1|rho|1> I/2. Its optimum is 2, while any
// certificate with uniform block weights caps the overlap at 1.5.
Channel skewed_channel() {
  ComplexMatrix choi(4, 4);
  choi(0, 0) = choi(0, 1) = choi(1, 0) = choi(1, 1) = 0.5;
  choi(2, 2) = choi(3, 3) = 0.5;
  return Channel::from_choi(2, 2, choi);
}

}  // namespace

TEST_CASE("d_max basics") {
  const Channel id = identity_qubit();
  const Channel d = dephasing_qubit();
  CHECK(d_max(id, id) == Catch::Approx(0.0).margin(1e-8));
  // J_id = 2 |phi+><phi+| lives inside the diagonal support of J_deph, with
  // J_id <= 2 J_deph tight; the reverse direction leaks out of the rank-one
  // support of J_id and diverges.
  CHECK(d_max(id, d) == Catch::Approx(1.0).margin(1e-8));
  CHECK(std::isinf(d_max(d, id)));
  const Channel m = mix({id, d}, {0.5, 0.5});
  // J_id <= 2 J_m exactly (J_m = (J_id + J_deph)/2 >= J_id/2).
  CHECK(d_max(id, m) <= 1.0 + 1e-8);
  CHECK(d_max(id, m) >= 0.0);
  CHECK_THROWS_AS(d_max(id, random_channel(2, 3, 2, 1)), ValidationError);
}

TEST_CASE("c_max on reference channels") {
  const CoherenceReport id_rep = c_max(identity_qubit());
  CHECK(id_rep.c_max == Catch::Approx(1.0).margin(1e-6));
  CHECK(id_rep.c_r == Catch::Approx(1.0).margin(1e-5));

  CHECK(c_max(dephasing_qubit()).c_max == Catch::Approx(0.0).margin(1e-6));
  CHECK(c_r(dephasing_qubit()) == Catch::Approx(0.0).margin(1e-5));

  const CoherenceReport mc_rep = c_max(maximally_coherent(2, 2, random_phases(4, 3)));
  CHECK(mc_rep.c_max == Catch::Approx(2.0).margin(1e-6));
  CHECK(mc_rep.c_r == Catch::Approx(3.0).margin(1e-5));

  CHECK(c_max(skewed_channel()).c_max == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("exponential relation between the two paths") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const CoherenceReport rep = c_max(random_channel(2, 2, 2, seed));
    CHECK(rep.relation_residual < 1e-5);
    CHECK(std::abs(std::exp2(rep.c_max) - 1.0 - rep.c_r) < 1e-5);
  }
}

TEST_CASE("pure-channel closed form matches the solver") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Channel u = random_channel(2, 2, 1, 30 + seed);
    // Recover the amplitude table from the rank-one Choi matrix.
    const HermitianEig e = hermitian_eig(u.choi());
    const std::size_t top = e.eigenvalues.size() - 1;
    ComplexMatrix amp(2, 2);
    // J = mu |w><w| with ||w|| = 1 means the amplitude table is sqrt(mu/|A|) w.
    const double scale = std::sqrt(e.eigenvalues[top] / 2.0);
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t b = 0; b < 2; ++b)
        amp(j, b) = scale * e.eigenvectors(j * 2 + b, top);
    const PureChannel p{2, 2, amp};
    CHECK(c_max_pure(p) == Catch::Approx(c_max(u).c_max).margin(1e-5));
  }
  // Row-norm violation rejected.
  ComplexMatrix bad(2, 2);
  bad(0, 0) = 1.0;
  bad(1, 0) = 1.0;
  CHECK_THROWS_AS(c_max_pure(PureChannel{2, 2, bad}), ValidationError);
}

TEST_CASE("target overlap construction (phase variant)") {
  std::vector<Channel> cases{skewed_channel(), identity_qubit(),
                             maximally_coherent(2, 2, random_phases(4, 9))};
  for (std::uint64_t seed = 0; seed < 4; ++seed) cases.push_back(random_channel(2, 2, 2, 40 + seed));
  std::uint64_t pseed = 400;
  for (const Channel& c : cases) {
    const auto phases = random_phases(4, pseed++);
    const Theorem1Certificate cert = construct_theorem1_isc(c, 2, 2, phases);
    CHECK(cert.residual <= 1e-4);
    CHECK(classify_isc(cert.superchannel));
    CHECK_NOTHROW(cert.superchannel.validate());
  }
}

TEST_CASE("target overlap construction (dephasing-covariant variant)") {
  std::vector<Channel> cases{skewed_channel(), identity_qubit()};
  for (std::uint64_t seed = 0; seed < 4; ++seed) cases.push_back(random_channel(2, 2, 2, 50 + seed));
  for (const Channel& c : cases) {
    const Theorem1Certificate cert = construct_theorem1_disc(c, 2, 2);
    CHECK(cert.residual <= 1e-4);
    CHECK(classify_disc(cert.superchannel));
    CHECK(classify_sisc(cert.superchannel));
    CHECK_NOTHROW(cert.superchannel.validate());
  }
}

TEST_CASE("construction into padded output dimensions") {
  const Channel c = random_channel(2, 2, 2, 61);
  const Theorem1Certificate cert = construct_theorem1_isc(c, 3, 2, random_phases(6, 62));
  CHECK(cert.residual <= 1e-4);
  CHECK_NOTHROW(cert.superchannel.validate());

  // Output space too small.
  CHECK_THROWS_AS(construct_theorem1_isc(random_channel(2, 3, 2, 63), 2, 2, random_phases(4, 64)),
                  ValidationError);
  // Phase table of the wrong length.
  CHECK_THROWS_AS(construct_theorem1_isc(c, 2, 2, random_phases(3, 65)), ValidationError);
}

TEST_CASE("discrimination instrument advantage ratio") {
  std::vector<Channel> cases{skewed_channel(), identity_qubit()};
  for (std::uint64_t seed = 0; seed < 3; ++seed) cases.push_back(random_channel(2, 2, 2, 70 + seed));
  for (const Channel& c : cases) {
    const Theorem2Certificate cert = construct_theorem2_instrument(c, 2, 2);
    CHECK(cert.residual <= 1e-4);
    // Reference strategies reach exactly the inverse output dimension.
    CHECK(cert.p_isco == Catch::Approx(0.25).margin(1e-8));
    CHECK(cert.p_succ == Catch::Approx(cert.claimed / 4.0).margin(1e-4));
    CHECK_NOTHROW(cert.povm.validate(1e-8));
    CHECK_NOTHROW(cert.instrument.validate());
  }
}

TEST_CASE("monotonicity under random incoherent superchannels") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Superchannel t = random_isc_superchannel(2, 2, seed);
    const Channel c = random_channel(2, 2, 2, 80 + seed);
    const auto [full, average] = verify_monotonicity(c, t);
    CHECK(full <= 1e-6);
    CHECK(average <= 1e-6);
  }
  // Non-incoherent superchannels are rejected.
  ComplexMatrix dense(4, 4);
  dense(0, 0) = dense(1, 0) = 1.0 / std::sqrt(2.0);
  dense(1, 1) = dense(2, 2) = dense(3, 3) = 1.0;
  CHECK_THROWS_AS(verify_monotonicity(random_channel(2, 2, 2, 1), Superchannel{2, 2, 2, 2, {dense}}),
                  ValidationError);
}

TEST_CASE("mixing bound") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const std::vector<Channel> cs{random_channel(2, 2, 2, 90 + seed),
                                  random_channel(2, 2, 2, 95 + seed)};
    CHECK(verify_mixing_bound(cs, {0.3, 0.7}) <= 1e-6);
  }
}

TEST_CASE("robustness convexity and average monotonicity") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const std::vector<Channel> cs{random_channel(2, 2, 2, 110 + seed),
                                  random_channel(2, 2, 2, 115 + seed)};
    const Superchannel t = random_isc_superchannel(2, 2, 120 + seed);
    const RocResiduals res = verify_roc_properties(cs, {0.4, 0.6}, t);
    CHECK(res.convexity <= 1e-6);
    CHECK(res.average <= 1e-6);
  }
}

TEST_CASE("state reduction") {
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    CHECK(state_reduction_check(random_pure_state(3, 130 + seed)) <= 1e-6);
  // Mixed states are rejected.
  ChannelState mixed{2, Complex(0.5, 0.0) * ComplexMatrix::identity(2)};
  CHECK_THROWS_AS(state_reduction_check(mixed), ValidationError);
}
