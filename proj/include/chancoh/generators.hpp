#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "chancoh/channels.hpp"
#include "chancoh/superchannels.hpp"

namespace chancoh {

namespace detail {

/// Monomial (permutation-with-phases) unitary on dim basis states.
inline ComplexMatrix random_monomial_unitary(std::size_t dim, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(dim);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  ComplexMatrix u(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) u(perm[j], j) = std::polar(1.0, angle(rng));
  return u;
}

}  // namespace detail

/// Seeded generator of genuine incoherent superchannels on (A,B) -> (A,B):
/// pre-processing is a mixture of monomial unitaries on A (keeps the
/// completeness normalization exact), post-processing is a random incoherent
/// channel on B built column-wise (each Kraus routes every input basis state
/// to a single output basis state). The Choi-level Kraus operators are
/// P_r^T (x) Q_s, so every selective branch is itself a valid CP map.
inline Superchannel random_isc_superchannel(std::size_t dimA, std::size_t dimB,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  // Pre-processing Kraus list {sqrt(u_r) W_r}.
  const std::size_t pre_terms = 1 + static_cast<std::size_t>(rng() % 2);
  std::vector<double> u(pre_terms);
  double usum = 0.0;
  for (double& w : u) usum += (w = 0.1 + unit(rng));
  std::vector<ComplexMatrix> pre;
  for (std::size_t r = 0; r < pre_terms; ++r) {
    ComplexMatrix w = detail::random_monomial_unitary(dimA, rng);
    w *= Complex(std::sqrt(u[r] / usum), 0.0);
    pre.push_back(std::move(w));
  }

  // Post-processing: incoherent channel on B with one Kraus per (row, column)
  // entry of a random column-stochastic matrix, e^{i theta} sqrt(T(r,j)) |r><j|.
  // This is exactly trace preserving and every Kraus routes each basis state
  // to a single basis state.
  std::vector<ComplexMatrix> post;
  std::vector<std::vector<double>> stoch(dimB, std::vector<double>(dimB));
  for (std::size_t j = 0; j < dimB; ++j) {
    double wsum = 0.0;
    for (std::size_t r = 0; r < dimB; ++r) wsum += (stoch[r][j] = 0.05 + unit(rng));
    for (std::size_t r = 0; r < dimB; ++r) stoch[r][j] /= wsum;
  }
  for (std::size_t r = 0; r < dimB; ++r)
    for (std::size_t j = 0; j < dimB; ++j) {
      ComplexMatrix q(dimB, dimB);
      q(r, j) = std::polar(std::sqrt(stoch[r][j]), angle(rng));
      post.push_back(std::move(q));
    }

  std::vector<ComplexMatrix> kraus;
  for (const ComplexMatrix& p : pre) {
    // P^T acts on the A factor of the Choi matrix.
    ComplexMatrix pt(dimA, dimA);
    for (std::size_t i = 0; i < dimA; ++i)
      for (std::size_t j = 0; j < dimA; ++j) pt(i, j) = p(j, i);
    for (const ComplexMatrix& q : post) kraus.push_back(kron(pt, q));
  }
  Superchannel t{dimA, dimB, dimA, dimB, std::move(kraus)};
  t.validate();
  return t;
}

/// Haar-like random pure state of the given dimension.
inline ChannelState random_pure_state(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Complex> v(dim);
  double norm = 0.0;
  for (Complex& z : v) {
    z = Complex(gauss(rng), gauss(rng));
    norm += std::norm(z);
  }
  norm = std::sqrt(norm);
  ComplexMatrix rho(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) rho(i, j) = (v[i] / norm) * std::conj(v[j] / norm);
  ChannelState s{dim, std::move(rho)};
  s.validate();
  return s;
}

/// Random phase table for maximally coherent targets.
inline std::vector<double> random_phases(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<double> out(count);
  for (double& t : out) t = angle(rng);
  return out;
}

/// Random diagonal-Choi incoherent channel with unit block sums.
inline Channel random_incoherent_channel(std::size_t dimA, std::size_t dimB,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ComplexMatrix choi(dimA * dimB, dimA * dimB);
  for (std::size_t j = 0; j < dimA; ++j) {
    std::vector<double> w(dimB);
    double sum = 0.0;
    for (double& x : w) sum += (x = 0.02 + unit(rng));
    for (std::size_t a = 0; a < dimB; ++a) choi(j * dimB + a, j * dimB + a) = w[a] / sum;
  }
  return Channel::from_choi(dimA, dimB, std::move(choi));
}

}  // namespace chancoh
