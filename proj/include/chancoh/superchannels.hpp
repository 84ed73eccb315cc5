#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "chancoh/channels.hpp"
#include "chancoh/sdp.hpp"

namespace chancoh {

namespace detail {

inline void check_kraus_shapes(const std::vector<ComplexMatrix>& kraus, std::size_t out_dim,
                               std::size_t in_dim, const char* who) {
  if (kraus.empty()) throw ValidationError(std::string(who) + ": empty Kraus list");
  for (const ComplexMatrix& m : kraus) {
    if (m.rows() != out_dim || m.cols() != in_dim)
      throw ValidationError(std::string(who) + ": Kraus shape is not (|A'||B'|) x (|A||B|)");
    if (!m.all_finite()) throw ValidationError(std::string(who) + ": non-finite Kraus entry");
  }
}

inline ComplexMatrix kraus_gram_sum(const std::vector<ComplexMatrix>& kraus) {
  ComplexMatrix sum(kraus.front().cols(), kraus.front().cols());
  for (const ComplexMatrix& m : kraus) sum += m.dagger() * m;
  return sum;
}

}  // namespace detail

/// A superchannel given by Kraus operators acting on Choi matrices,
/// J_{T(c)} = sum_m M_m J_c M_m†, with the completeness normalization
/// sum_m M_m† M_m = G (x) I_B for some PSD G on A with tr G = |A'|.
/// (Trace preservation of the image only pins down this block structure;
/// the uniform case G = (|A'|/|A|) I is a special case.) For any channel
/// input the image Choi then has trace exactly |A'|.
struct Superchannel {
  std::size_t dimA, dimB, dimA2, dimB2;
  std::vector<ComplexMatrix> kraus;

  std::size_t in_dim() const { return dimA * dimB; }
  std::size_t out_dim() const { return dimA2 * dimB2; }

  void validate(const Tolerances& tol = default_tolerances()) const {
    detail::check_kraus_shapes(kraus, out_dim(), in_dim(), "Superchannel");
    const ComplexMatrix sum = detail::kraus_gram_sum(kraus);
    // Extract G as the B-average of the blocks, then require sum = G (x) I_B.
    ComplexMatrix g(dimA, dimA);
    for (std::size_t i = 0; i < dimA; ++i)
      for (std::size_t j = 0; j < dimA; ++j) {
        Complex acc = 0.0;
        for (std::size_t a = 0; a < dimB; ++a) acc += sum(i * dimB + a, j * dimB + a);
        g(i, j) = acc / static_cast<double>(dimB);
      }
    const double limit = tol.channel * static_cast<double>(in_dim());
    if (distance_frobenius(sum, kron(g, ComplexMatrix::identity(dimB))) > limit)
      throw ValidationError("Superchannel invariant failed: sum M†M = G (x) I_B");
    if (!is_hermitian(g, tol.hermitian) || !is_psd(g, tol.psd))
      throw ValidationError("Superchannel invariant failed: G not Hermitian PSD");
    if (std::abs(g.trace().real() - static_cast<double>(dimA2)) > limit)
      throw ValidationError("Superchannel invariant failed: tr G != |A'|");
  }
};

/// A fragment of a superchannel: completeness relaxed to sum M†M <= (|A'|/|A|) I.
struct SubSuperchannel {
  std::size_t dimA, dimB, dimA2, dimB2;
  std::vector<ComplexMatrix> kraus;

  std::size_t in_dim() const { return dimA * dimB; }
  std::size_t out_dim() const { return dimA2 * dimB2; }

  void validate(const Tolerances& tol = default_tolerances()) const {
    detail::check_kraus_shapes(kraus, out_dim(), in_dim(), "SubSuperchannel");
    const ComplexMatrix sum = detail::kraus_gram_sum(kraus);
    const double scale = static_cast<double>(dimA2) / static_cast<double>(dimA);
    const ComplexMatrix slack =
        Complex(scale, 0.0) * ComplexMatrix::identity(in_dim()) - sum;
    if (!is_psd(slack, tol.psd))
      throw ValidationError("SubSuperchannel invariant failed: sum M†M <= (|A'|/|A|) I");
  }
};

/// A collection of sub-superchannels whose Kraus union forms a superchannel.
struct Instrument {
  std::vector<SubSuperchannel> parts;

  void validate(const Tolerances& tol = default_tolerances()) const {
    if (parts.empty()) throw ValidationError("Instrument: no parts");
    const SubSuperchannel& first = parts.front();
    std::vector<ComplexMatrix> all;
    for (const SubSuperchannel& p : parts) {
      if (p.dimA != first.dimA || p.dimB != first.dimB || p.dimA2 != first.dimA2 ||
          p.dimB2 != first.dimB2)
        throw ValidationError("Instrument: parts have differing dimensions");
      p.validate(tol);
      all.insert(all.end(), p.kraus.begin(), p.kraus.end());
    }
    Superchannel total{first.dimA, first.dimB, first.dimA2, first.dimB2, std::move(all)};
    total.validate(tol);
  }

  Superchannel as_superchannel() const {
    const SubSuperchannel& first = parts.front();
    std::vector<ComplexMatrix> all;
    for (const SubSuperchannel& p : parts) all.insert(all.end(), p.kraus.begin(), p.kraus.end());
    return Superchannel{first.dimA, first.dimB, first.dimA2, first.dimB2, std::move(all)};
  }
};

/// Measurement on the output space: Hermitian PSD effects summing to I.
struct Povm {
  std::vector<ComplexMatrix> effects;

  void validate(double tol = 1e-10) const {
    if (effects.empty()) throw ValidationError("Povm: no effects");
    const std::size_t n = effects.front().rows();
    ComplexMatrix sum(n, n);
    for (const ComplexMatrix& e : effects) {
      if (e.rows() != n || e.cols() != n)
        throw ValidationError("Povm: effect dimensions differ");
      if (!is_hermitian(e, tol)) throw ValidationError("Povm: effect not Hermitian");
      if (!is_psd(e, tol)) throw ValidationError("Povm: effect not PSD");
      sum += e;
    }
    if (distance_frobenius(sum, ComplexMatrix::identity(n)) > tol * static_cast<double>(n))
      throw ValidationError("Povm: effects do not sum to the identity");
  }
};

/// J_{T(c)} = sum_m M_m J_c M_m†. When validate_output is false the result is
/// returned as a Choi operator without the trace-preservation check; the
/// overlap functionals of the theory only consume the operator itself.
inline Channel apply(const Superchannel& t, const Channel& c, bool validate_output = true) {
  if (c.dimA() != t.dimA || c.dimB() != t.dimB)
    throw ValidationError("apply: channel dimensions do not match the superchannel input");
  ComplexMatrix out(t.out_dim(), t.out_dim());
  for (const ComplexMatrix& m : t.kraus) out += m * c.choi() * m.dagger();
  if (validate_output) return Channel::from_choi(t.dimA2, t.dimB2, std::move(out));
  return Channel::from_choi_unchecked(t.dimA2, t.dimB2, std::move(out));
}

/// Selective application: branch probabilities p_m = tr(M_m J M_m†)/|A'| and
/// normalized branch Choi operators. Branches with p <= zero_branch are
/// dropped to avoid 0/0 normalization.
inline std::vector<std::pair<double, Channel>> apply_selective(
    const Superchannel& t, const Channel& c, const Tolerances& tol = default_tolerances()) {
  if (c.dimA() != t.dimA || c.dimB() != t.dimB)
    throw ValidationError("apply_selective: channel dimensions do not match");
  std::vector<std::pair<double, Channel>> out;
  for (const ComplexMatrix& m : t.kraus) {
    ComplexMatrix branch = m * c.choi() * m.dagger();
    const double p = branch.trace().real() / static_cast<double>(t.dimA2);
    if (p <= tol.zero_branch) continue;
    branch *= Complex(1.0 / p, 0.0);  // leaves trace |A'|, i.e. |A'| M J M† / tr(M J M†)
    out.emplace_back(p, Channel::from_choi_unchecked(t.dimA2, t.dimB2, std::move(branch)));
  }
  return out;
}

/// ISC: every Kraus operator has at most one above-threshold entry per column,
/// so each input basis vector is routed to a single output basis vector.
inline bool classify_isc(const Superchannel& t,
                         double tol = default_tolerances().classification) {
  for (const ComplexMatrix& m : t.kraus)
    for (std::size_t col = 0; col < m.cols(); ++col) {
      std::size_t hits = 0;
      for (std::size_t row = 0; row < m.rows(); ++row)
        if (std::abs(m(row, col)) > tol && ++hits > 1) return false;
    }
  return true;
}

/// SISC: equal input/output dimension and at most one above-threshold entry
/// per row and per column of every Kraus operator.
inline bool classify_sisc(const Superchannel& t,
                          double tol = default_tolerances().classification) {
  if (t.in_dim() != t.out_dim()) return false;
  if (!classify_isc(t, tol)) return false;
  for (const ComplexMatrix& m : t.kraus)
    for (std::size_t row = 0; row < m.rows(); ++row) {
      std::size_t hits = 0;
      for (std::size_t col = 0; col < m.cols(); ++col)
        if (std::abs(m(row, col)) > tol && ++hits > 1) return false;
    }
  return true;
}

/// DISC: dephasing covariance Delta(T(X)) = T(Delta(X)) checked on the
/// elementary-matrix basis of the input space; both sides are linear in X so
/// the basis check is sound and complete. With column vectors m_q of the
/// Kraus operators and C_qr = sum_m m_q m_r†, the condition reads:
/// C_qq diagonal for every q, and diag(C_qr) = 0 for q != r.
inline bool classify_disc(const Superchannel& t,
                          double tol = default_tolerances().classification) {
  const std::size_t nin = t.in_dim(), nout = t.out_dim();
  for (std::size_t q = 0; q < nin; ++q)
    for (std::size_t r = 0; r < nin; ++r) {
      for (std::size_t p = 0; p < nout; ++p) {
        if (q != r) {
          Complex diag_entry = 0.0;
          for (const ComplexMatrix& m : t.kraus) diag_entry += m(p, q) * std::conj(m(p, r));
          if (std::abs(diag_entry) > tol) return false;
        } else {
          for (std::size_t p2 = 0; p2 < nout; ++p2) {
            if (p2 == p) continue;
            Complex off = 0.0;
            for (const ComplexMatrix& m : t.kraus) off += m(p, q) * std::conj(m(p2, q));
            if (std::abs(off) > tol) return false;
          }
        }
      }
    }
  return true;
}

/// Unnormalized branch operators E_k = sum_m M_mk J_c M_mk† / |A'|.
inline std::vector<ComplexMatrix> instrument_effects(const Instrument& inst, const Channel& c) {
  const SubSuperchannel& first = inst.parts.front();
  if (c.dimA() != first.dimA || c.dimB() != first.dimB)
    throw ValidationError("instrument_effects: channel dimensions do not match");
  std::vector<ComplexMatrix> out;
  out.reserve(inst.parts.size());
  for (const SubSuperchannel& p : inst.parts) {
    ComplexMatrix e(p.out_dim(), p.out_dim());
    for (const ComplexMatrix& m : p.kraus) e += m * c.choi() * m.dagger();
    e *= Complex(1.0 / static_cast<double>(p.dimA2), 0.0);
    out.push_back(std::move(e));
  }
  return out;
}

/// p(k, k') = tr[povm_{k'} E_k] with E_k the normalized branch operators.
inline std::vector<std::vector<double>> joint_probability(const Instrument& inst,
                                                          const Povm& povm, const Channel& c) {
  const std::vector<ComplexMatrix> effects = instrument_effects(inst, c);
  if (!povm.effects.empty() &&
      povm.effects.front().rows() != inst.parts.front().out_dim())
    throw ValidationError("joint_probability: POVM lives on the wrong space");
  std::vector<std::vector<double>> p(effects.size(),
                                     std::vector<double>(povm.effects.size(), 0.0));
  for (std::size_t k = 0; k < effects.size(); ++k)
    for (std::size_t k2 = 0; k2 < povm.effects.size(); ++k2)
      p[k][k2] = trace_of_product(povm.effects[k2], effects[k]).real();
  return p;
}

inline double succ_prob_with_povm(const Instrument& inst, const Povm& povm, const Channel& c) {
  if (povm.effects.size() != inst.parts.size())
    throw ValidationError("succ_prob_with_povm: effect count != instrument part count");
  const std::vector<std::vector<double>> p = joint_probability(inst, povm, c);
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += p[k][k];
  return s;
}

/// Optimal discrimination probability over all POVMs, via the SDP
/// min tr Y, Y >= E_k; the returned POVM is the dual certificate.
inline std::pair<double, Povm> succ_prob_optimal(const Instrument& inst, const Channel& c,
                                                 double tol = 1e-8) {
  const DiscriminationSolution sol = solve_discrimination(instrument_effects(inst, c), tol);
  return {sol.value, Povm{sol.povm}};
}

/// Best discrimination probability achievable with an incoherent input
/// channel. The objective is a maximum of linear functionals of the Choi
/// matrix, hence convex, hence attained at a vertex of the incoherent
/// polytope: diagonal 0/1 Choi matrices with one unit entry per input block.
inline double succ_prob_isco(const Instrument& inst, double tol = 1e-9) {
  const SubSuperchannel& first = inst.parts.front();
  const std::size_t dimA = first.dimA, dimB = first.dimB;
  double vertex_count = std::pow(static_cast<double>(dimB), static_cast<double>(dimA));
  if (vertex_count > 4096.0)
    throw ValidationError("succ_prob_isco: vertex enumeration bound |B|^|A| <= 4096 exceeded");

  std::vector<std::size_t> assign(dimA, 0);
  double best = 0.0;
  const std::size_t count = static_cast<std::size_t>(vertex_count + 0.5);
  for (std::size_t v = 0; v < count; ++v) {
    std::size_t rem = v;
    for (std::size_t j = 0; j < dimA; ++j) {
      assign[j] = rem % dimB;
      rem /= dimB;
    }
    ComplexMatrix choi(dimA * dimB, dimA * dimB);
    for (std::size_t j = 0; j < dimA; ++j) choi(j * dimB + assign[j], j * dimB + assign[j]) = 1.0;
    const Channel vertex = Channel::from_choi(dimA, dimB, std::move(choi));
    best = std::max(best, succ_prob_optimal(inst, vertex, tol).first);
  }
  return best;
}

}  // namespace chancoh
