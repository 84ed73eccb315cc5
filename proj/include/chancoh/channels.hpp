#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "chancoh/linalg.hpp"

namespace chancoh {

/// A CPTP map stored by its Choi matrix J on H_A (x) H_B, with the basis
/// ordering |j alpha> -> flat index j*dimB + alpha.
class Channel {
 public:
  static Channel from_choi(std::size_t dimA, std::size_t dimB, ComplexMatrix choi,
                           const Tolerances& tol = default_tolerances()) {
    Channel c(dimA, dimB, std::move(choi));
    c.validate(tol);
    return c;
  }

  /// Skips the trace-preservation check. Used for Choi-like operators the
  /// theory manipulates without requiring them to be channels (maximally
  /// coherent targets, selective-measurement branches, dual certificates).
  static Channel from_choi_unchecked(std::size_t dimA, std::size_t dimB, ComplexMatrix choi) {
    if (choi.rows() != dimA * dimB || choi.cols() != dimA * dimB)
      throw ValidationError("Channel: choi size does not match dimA*dimB");
    return Channel(dimA, dimB, std::move(choi));
  }

  std::size_t dimA() const { return dimA_; }
  std::size_t dimB() const { return dimB_; }
  std::size_t dim() const { return dimA_ * dimB_; }
  const ComplexMatrix& choi() const { return choi_; }

  void validate(const Tolerances& tol = default_tolerances()) const {
    if (!choi_.all_finite()) throw ValidationError("Channel invariant failed: entries finite");
    if (!is_hermitian(choi_, tol.hermitian))
      throw ValidationError("Channel invariant failed: choi Hermitian");
    if (!is_psd(choi_, tol.psd)) throw ValidationError("Channel invariant failed: choi PSD");
    const ComplexMatrix ta = partial_trace(choi_, dimA_, dimB_, Subsystem::B);
    if (distance_frobenius(ta, ComplexMatrix::identity(dimA_)) > tol.channel * dimA_)
      throw ValidationError("Channel invariant failed: tr_B(choi) = I_A");
  }

 private:
  Channel(std::size_t dimA, std::size_t dimB, ComplexMatrix choi)
      : dimA_(dimA), dimB_(dimB), choi_(std::move(choi)) {}

  std::size_t dimA_, dimB_;
  ComplexMatrix choi_;
};

/// Pure channel given by its amplitude table lambda_{jk}; the Choi matrix is
/// the rank-one |A| |psi><psi| with psi_{jk} = lambda_{jk}.
struct PureChannel {
  std::size_t dimA, dimB;
  ComplexMatrix amplitudes;  // dimA x dimB

  void validate(double tol = 1e-10) const {
    if (amplitudes.rows() != dimA || amplitudes.cols() != dimB)
      throw ValidationError("PureChannel: amplitude table shape mismatch");
    for (std::size_t j = 0; j < dimA; ++j) {
      double row = 0.0;
      for (std::size_t k = 0; k < dimB; ++k) row += std::norm(amplitudes(j, k));
      if (std::abs(row - 1.0 / static_cast<double>(dimA)) > tol)
        throw ValidationError("PureChannel: row norm is not 1/|A| (row " + std::to_string(j) + ")");
    }
  }
};

/// A density operator carrying the |A| = 1 state-reduction case.
struct ChannelState {
  std::size_t dim;
  ComplexMatrix density;

  void validate(const Tolerances& tol = default_tolerances()) const {
    if (density.rows() != dim || density.cols() != dim)
      throw ValidationError("ChannelState: density shape mismatch");
    if (std::abs(density.trace().real() - 1.0) > 1e-10 || std::abs(density.trace().imag()) > 1e-10)
      throw ValidationError("ChannelState: trace is not 1");
    if (!is_psd(density, tol.psd)) throw ValidationError("ChannelState: density not PSD");
  }
};

/// Choi matrix J(j*B+a, k*B+b) = sum_m K_m(a,j) conj(K_m(b,k)).
inline Channel channel_from_kraus(std::size_t dimA, std::size_t dimB,
                                  const std::vector<ComplexMatrix>& kraus,
                                  const Tolerances& tol = default_tolerances()) {
  if (kraus.empty()) throw ValidationError("channel_from_kraus: empty Kraus list");
  ComplexMatrix completeness(dimA, dimA);
  for (const ComplexMatrix& k : kraus) {
    if (k.rows() != dimB || k.cols() != dimA)
      throw ValidationError("channel_from_kraus: Kraus operator is not |B| x |A|");
    completeness += k.dagger() * k;
  }
  if (distance_frobenius(completeness, ComplexMatrix::identity(dimA)) > tol.channel * dimA)
    throw ValidationError("channel_from_kraus: completeness sum K†K = I_A violated");

  const std::size_t n = dimA * dimB;
  ComplexMatrix choi(n, n);
  for (const ComplexMatrix& k : kraus)
    for (std::size_t j = 0; j < dimA; ++j)
      for (std::size_t a = 0; a < dimB; ++a)
        for (std::size_t l = 0; l < dimA; ++l)
          for (std::size_t b = 0; b < dimB; ++b)
            choi(j * dimB + a, l * dimB + b) += k(a, j) * std::conj(k(b, l));
  return Channel::from_choi(dimA, dimB, std::move(choi), tol);
}

/// Diagonal truncation of the Choi matrix; the resource destroying map of
/// the theory realized jointly on both tensor factors.
inline Channel dephase(const Channel& c) {
  const std::size_t n = c.dim();
  ComplexMatrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = c.choi()(i, i).real();
  return Channel::from_choi_unchecked(c.dimA(), c.dimB(), std::move(d));
}

inline bool is_incoherent(const Channel& c, double tol = 1e-9) {
  const std::size_t n = c.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && std::abs(c.choi()(i, j)) > tol) return false;
  return true;
}

/// Channel with Choi |A| |Phi><Phi|, |Phi> the uniform-modulus phase state.
/// For generic phases this operator is not trace preserving, matching how
/// the maximally coherent target is used (only its rank-one Choi matters),
/// so validation is limited to Hermitian/PSD/trace.
inline Channel maximally_coherent(std::size_t dimA, std::size_t dimB,
                                  const std::vector<double>& phases) {
  const std::size_t n = dimA * dimB;
  if (phases.size() != n)
    throw ValidationError("maximally_coherent: phase table must have dimA*dimB entries");
  std::vector<Complex> psi(n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t p = 0; p < n; ++p) psi[p] = amp * std::polar(1.0, phases[p]);
  ComplexMatrix choi(n, n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      choi(p, q) = static_cast<double>(dimA) * psi[p] * std::conj(psi[q]);
  return Channel::from_choi_unchecked(dimA, dimB, std::move(choi));
}

inline Channel pure_channel(const PureChannel& p) {
  p.validate();
  const std::size_t n = p.dimA * p.dimB;
  ComplexMatrix choi(n, n);
  for (std::size_t j = 0; j < p.dimA; ++j)
    for (std::size_t k = 0; k < p.dimB; ++k)
      for (std::size_t l = 0; l < p.dimA; ++l)
        for (std::size_t m = 0; m < p.dimB; ++m)
          choi(j * p.dimB + k, l * p.dimB + m) =
              static_cast<double>(p.dimA) * p.amplitudes(j, k) * std::conj(p.amplitudes(l, m));
  return Channel::from_choi_unchecked(p.dimA, p.dimB, std::move(choi));
}

/// Channel fidelity F = || sqrt(J1) sqrt(J2) ||_1. For commuting Choi
/// matrices this is tr[sqrt(J1) sqrt(J2)]; the trace-norm form is the one
/// under which the overlap identity F^2 = tr[J1 J2] holds for rank-one J2.
inline double fidelity(const Channel& c1, const Channel& c2) {
  if (c1.dimA() != c2.dimA() || c1.dimB() != c2.dimB())
    throw ValidationError("fidelity: channel dimensions differ");
  return trace_norm(psd_sqrt(c1.choi()) * psd_sqrt(c2.choi()));
}

inline Channel mix(const std::vector<Channel>& channels, const std::vector<double>& weights) {
  if (channels.empty() || channels.size() != weights.size())
    throw ValidationError("mix: channels/weights size mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (w < -1e-12) throw ValidationError("mix: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("mix: weights do not sum to 1");
  const std::size_t dimA = channels.front().dimA(), dimB = channels.front().dimB();
  ComplexMatrix choi(dimA * dimB, dimA * dimB);
  for (std::size_t m = 0; m < channels.size(); ++m) {
    if (channels[m].dimA() != dimA || channels[m].dimB() != dimB)
      throw ValidationError("mix: channel dimensions differ");
    choi += weights[m] * channels[m].choi();
  }
  return Channel::from_choi_unchecked(dimA, dimB, std::move(choi));
}

/// Haar-like random channel: QR-orthonormalized complex Gaussian isometry
/// V: A -> B (x) E, Kraus K_e = (I (x) <e|) V. Deterministic given the seed.
inline Channel random_channel(std::size_t dimA, std::size_t dimB, std::size_t env_dim,
                              std::uint64_t seed) {
  if (env_dim < 1) throw ValidationError("random_channel: env_dim must be >= 1");
  if (dimB * env_dim < dimA)
    throw ValidationError("random_channel: dimB*env_dim < dimA leaves no isometry");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t rows = dimB * env_dim;
  ComplexMatrix v(rows, dimA);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < dimA; ++j) v(i, j) = Complex(gauss(rng), gauss(rng));
  // Modified Gram-Schmidt.
  for (std::size_t j = 0; j < dimA; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      Complex proj = 0.0;
      for (std::size_t i = 0; i < rows; ++i) proj += std::conj(v(i, k)) * v(i, j);
      for (std::size_t i = 0; i < rows; ++i) v(i, j) -= proj * v(i, k);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < rows; ++i) norm += std::norm(v(i, j));
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < rows; ++i) v(i, j) /= norm;
  }
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(env_dim);
  for (std::size_t e = 0; e < env_dim; ++e) {
    ComplexMatrix k(dimB, dimA);
    for (std::size_t b = 0; b < dimB; ++b)
      for (std::size_t a = 0; a < dimA; ++a) k(b, a) = v(b * env_dim + e, a);
    kraus.push_back(std::move(k));
  }
  return channel_from_kraus(dimA, dimB, kraus);
}

/// l1-norm coherence: sum of moduli of the off-diagonal entries.
inline double c_l1(const ChannelState& s) {
  double sum = 0.0;
  for (std::size_t i = 0; i < s.dim; ++i)
    for (std::size_t j = 0; j < s.dim; ++j)
      if (i != j) sum += std::abs(s.density(i, j));
  return sum;
}

}  // namespace chancoh
