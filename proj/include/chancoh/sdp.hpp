#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <utility>
#include <vector>

#include "chancoh/linalg.hpp"

namespace chancoh {

/// The structured coherence program: minimize the common block sum k of a
/// nonnegative diagonal vector d (indexed by (j, alpha)) subject to
/// diag(d) >= s_matrix, with sum_alpha d_{j,alpha} = k for every j.
struct DiagonalSdpProblem {
  ComplexMatrix s_matrix;
  std::size_t dimA, dimB;

  void validate(const Tolerances& tol = default_tolerances()) const {
    if (s_matrix.rows() != dimA * dimB || s_matrix.cols() != dimA * dimB)
      throw ValidationError("DiagonalSdpProblem: s_matrix size does not match dimA*dimB");
    if (!is_hermitian(s_matrix, tol.hermitian))
      throw ValidationError("DiagonalSdpProblem: s_matrix not Hermitian");
    if (!is_psd(s_matrix, tol.psd)) throw ValidationError("DiagonalSdpProblem: s_matrix not PSD");
  }
};

struct SdpSolution {
  double primal_value = 0.0;
  std::vector<double> d;
  // Hermitian PSD dual certificate: its diagonal is (approximately) constant
  // on each (j, *) block, and the block weights sum to 1, so that
  // tr(s_matrix * dual_matrix) is a lower bound on the primal optimum.
  ComplexMatrix dual_matrix;
  double gap = 0.0;
  std::size_t iterations = 0;
};

namespace detail {

inline double lambda_max(const ComplexMatrix& h) {
  const HermitianEig e = hermitian_eig(h);
  return e.eigenvalues.empty() ? 0.0 : e.eigenvalues.back();
}

}  // namespace detail

/// Logarithmic-barrier Newton method on (d, k) with the block-sum equality
/// constraints handled through a KKT system. The strictly feasible start is
/// d = 2*lambda_max(S) everywhere. The dual certificate is recovered from
/// the final barrier iterate as mu * (diag(d) - S)^{-1}, rescaled so its
/// per-block diagonal weights sum to 1.
inline SdpSolution solve_diagonal(const DiagonalSdpProblem& p, double tol = 1e-8,
                                  std::ostream* trace = nullptr) {
  p.validate();
  const std::size_t n = p.dimA * p.dimB;
  const std::size_t nA = p.dimA, nB = p.dimB;
  const ComplexMatrix& s = p.s_matrix;

  const double lmax = std::max(detail::lambda_max(s), 1e-300);
  std::vector<double> d(n, 2.0 * lmax);
  double k = 2.0 * lmax * static_cast<double>(nB);

  const std::size_t nvar = n + 1;           // d entries then k
  const std::size_t nsys = nvar + nA;       // plus one multiplier per block
  std::size_t total_iters = 0;
  std::size_t inner_count = 0;
  double last_decrement = 0.0;
  const std::size_t iter_cap = 200 * 40;

  SdpSolution sol;
  double mu = 1.0;
  for (std::size_t outer = 0; outer < 200; ++outer) {
    // Inner Newton iterations at fixed mu on k - mu*logdet(diag(d) - S).
    inner_count = 0;
    for (std::size_t inner = 0; inner < 200; ++inner) {
      ++inner_count;
      if (++total_iters > iter_cap) throw SolverError("solve_diagonal: iteration cap exceeded");
      ComplexMatrix slack(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) slack(i, j) = (i == j ? d[i] : 0.0) - s(i, j);
      ComplexMatrix l;
      if (!detail::cholesky(slack, l))
        throw SolverError("solve_diagonal: iterate left the cone (internal error)");
      const ComplexMatrix w = detail::inverse_from_cholesky(l);

      // KKT system: [H A^T; A 0] [dx; nu] = [-g; 0].
      std::vector<double> m(nsys * nsys, 0.0), rhs(nsys, 0.0);
      for (std::size_t pp = 0; pp < n; ++pp) {
        for (std::size_t q = 0; q < n; ++q) m[pp * nsys + q] = mu * std::norm(w(pp, q));
        rhs[pp] = mu * w(pp, pp).real();  // -grad_d
      }
      rhs[n] = -1.0;  // -grad_k
      for (std::size_t j = 0; j < nA; ++j) {
        const std::size_t row = nvar + j;
        for (std::size_t a = 0; a < nB; ++a) {
          m[row * nsys + (j * nB + a)] = 1.0;
          m[(j * nB + a) * nsys + row] = 1.0;
        }
        m[row * nsys + n] = -1.0;
        m[n * nsys + row] = -1.0;
      }
      std::vector<double> step = detail::solve_real_linear(std::move(m), std::move(rhs));

      double decrement2 = 0.0;
      for (std::size_t pp = 0; pp < n; ++pp)
        for (std::size_t q = 0; q < n; ++q)
          decrement2 += step[pp] * mu * std::norm(w(pp, q)) * step[q];
      if (decrement2 < 0.0) decrement2 = 0.0;

      // Backtrack until the iterate stays strictly inside the cone and the
      // barrier objective decreases.
      const double f0 = k - mu * detail::log_det_from_cholesky(l);
      double alpha = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        std::vector<double> d_try(n);
        for (std::size_t pp = 0; pp < n; ++pp) d_try[pp] = d[pp] + alpha * step[pp];
        const double k_try = k + alpha * step[n];
        ComplexMatrix slack_try(n, n);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            slack_try(i, j) = (i == j ? d_try[i] : 0.0) - s(i, j);
        ComplexMatrix l_try;
        if (detail::cholesky(slack_try, l_try)) {
          const double f_try = k_try - mu * detail::log_det_from_cholesky(l_try);
          if (f_try <= f0 - 0.25 * alpha * decrement2 + 1e-14 * std::abs(f0)) {
            d = std::move(d_try);
            k = k_try;
            moved = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      last_decrement = decrement2;
      if (!moved || decrement2 <= 1e-18 * std::max(1.0, mu)) break;
    }

    // Dual certificate at this mu.
    ComplexMatrix slack(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) slack(i, j) = (i == j ? d[i] : 0.0) - s(i, j);
    ComplexMatrix l;
    if (!detail::cholesky(slack, l))
      throw SolverError("solve_diagonal: final iterate left the cone");
    // Lagrangian dual: max tr(S Z) over Z >= 0 whose diagonal is constant on
    // each block with block weights summing to 1. The barrier iterate
    // mu * (diag(d) - S)^{-1} approaches such a Z; normalize the total block
    // weight to 1 exactly. On the central path primal - dual = n*mu, and the
    // Newton decrement certifies centering, so report gap = n*mu + decrement;
    // the recomputed tr(S Z) is noisier (inverting a slack matrix of
    // condition ~1/mu) and is emitted on the trace stream only.
    ComplexMatrix z = mu * detail::inverse_from_cholesky(l);
    double weight_sum = 0.0;
    for (std::size_t j = 0; j < nA; ++j) {
      double nu = 0.0;
      for (std::size_t a = 0; a < nB; ++a) nu += z(j * nB + a, j * nB + a).real();
      weight_sum += nu / static_cast<double>(nB);
    }
    if (weight_sum > 0.0) z *= Complex(1.0 / weight_sum, 0.0);
    const bool centered = last_decrement <= 1e-12;
    const double gap = static_cast<double>(n) * mu + std::sqrt(std::max(last_decrement, 0.0));

    if (trace)
      *trace << "iter " << outer << " mu " << mu << " primal " << k << " dual "
             << trace_of_product(s, z).real() << " gap " << gap << " inner " << inner_count
             << " dec " << last_decrement << "\n";

    if (centered && gap <= tol * std::max(1.0, k)) {
      sol.primal_value = k;
      sol.d = d;
      sol.dual_matrix = std::move(z);
      sol.gap = gap;
      sol.iterations = total_iters;
      return sol;
    }
    if (mu <= 1e-13) {
      // Cannot tighten further in double precision; report what we have.
      sol.primal_value = k;
      sol.d = d;
      sol.dual_matrix = std::move(z);
      sol.gap = gap;
      sol.iterations = total_iters;
      if (gap <= 10.0 * tol * std::max(1.0, k)) return sol;
      throw SolverError("solve_diagonal: duality gap did not close");
    }
    mu *= 0.1;
  }
  throw SolverError("solve_diagonal: outer iteration cap exceeded");
}

/// min sum(d) subject to diag(d) >= S, by the same barrier-Newton scheme as
/// solve_diagonal but without the per-block equality constraints. This is the
/// coherence program for sub-normalized selective branches, whose free
/// objects are diagonal PSD operators of fixed trace rather than incoherent
/// channels; the dual is max tr(S Z) over Z >= 0 with unit diagonal.
inline double min_diagonal_sum(const ComplexMatrix& s, double tol = 1e-8) {
  if (!s.square()) throw ValidationError("min_diagonal_sum: matrix must be square");
  if (!is_hermitian(s)) throw ValidationError("min_diagonal_sum: matrix not Hermitian");
  if (!is_psd(s)) throw ValidationError("min_diagonal_sum: matrix not PSD");
  const std::size_t n = s.rows();
  const double lmax = detail::lambda_max(s);
  if (lmax <= 0.0) return 0.0;

  std::vector<double> d(n, 2.0 * lmax);
  double mu = 1.0;
  double last_decrement = 0.0;
  for (std::size_t outer = 0; outer < 200; ++outer) {
    for (std::size_t inner = 0; inner < 200; ++inner) {
      ComplexMatrix slack(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) slack(i, j) = (i == j ? d[i] : 0.0) - s(i, j);
      ComplexMatrix l;
      if (!detail::cholesky(slack, l))
        throw SolverError("min_diagonal_sum: iterate left the cone (internal error)");
      const ComplexMatrix w = detail::inverse_from_cholesky(l);

      std::vector<double> h(n * n), g(n);
      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) h[p * n + q] = mu * std::norm(w(p, q));
        g[p] = mu * w(p, p).real() - 1.0;  // -grad
      }
      const std::vector<double> step = detail::solve_real_linear(std::move(h), std::move(g));

      double decrement2 = 0.0;
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q)
          decrement2 += step[p] * mu * std::norm(w(p, q)) * step[q];
      if (decrement2 < 0.0) decrement2 = 0.0;

      double f0 = -mu * detail::log_det_from_cholesky(l);
      for (double v : d) f0 += v;
      double alpha = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        std::vector<double> d_try(n);
        for (std::size_t p = 0; p < n; ++p) d_try[p] = d[p] + alpha * step[p];
        ComplexMatrix slack_try(n, n);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            slack_try(i, j) = (i == j ? d_try[i] : 0.0) - s(i, j);
        ComplexMatrix l_try;
        if (detail::cholesky(slack_try, l_try)) {
          double f_try = -mu * detail::log_det_from_cholesky(l_try);
          for (double v : d_try) f_try += v;
          if (f_try <= f0 - 0.25 * alpha * decrement2 + 1e-14 * std::abs(f0)) {
            d = std::move(d_try);
            moved = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      last_decrement = decrement2;
      if (!moved || decrement2 <= 1e-18 * std::max(1.0, mu)) break;
    }
    double value = 0.0;
    for (double v : d) value += v;
    const double gap = static_cast<double>(n) * mu + std::sqrt(std::max(last_decrement, 0.0));
    if (last_decrement <= 1e-12 && gap <= tol * std::max(1.0, value)) return value;
    if (mu <= 1e-13) {
      if (gap <= 10.0 * tol * std::max(1.0, value)) return value;
      throw SolverError("min_diagonal_sum: duality gap did not close");
    }
    mu *= 0.1;
  }
  throw SolverError("min_diagonal_sum: outer iteration cap exceeded");
}

namespace detail {

/// Euclidean projection of v onto { y >= 0, sum(y) = k }, and the threshold
/// theta with y = max(v - theta, 0).
inline double project_scaled_simplex(const std::vector<double>& v, double k,
                                     std::vector<double>& y) {
  const std::size_t n = v.size();
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  std::size_t active = n;
  for (std::size_t i = 0; i < n; ++i) {
    css += u[i];
    const double t = (css - k) / static_cast<double>(i + 1);
    if (i + 1 < n && u[i + 1] > t) continue;
    theta = t;
    active = i + 1;
    break;
  }
  (void)active;
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::max(v[i] - theta, 0.0);
  return theta;
}

}  // namespace detail

/// Independent second path for the same optimum: Douglas-Rachford/ADMM
/// splitting between the block-sum polytope and the shifted PSD cone,
/// minimizing the common block sum k directly. First-order projections
/// only, so numerically unrelated to the barrier-Newton central path.
inline double min_block_sum_splitting(const ComplexMatrix& s, std::size_t dimA, std::size_t dimB,
                                      double tol = 1e-7) {
  DiagonalSdpProblem probe{s, dimA, dimB};
  probe.validate();
  const std::size_t n = dimA * dimB;
  const double scale = std::max(1.0, s.frobenius_norm());

  // Start from the padded diagonal of S (feasible for the polytope part).
  std::vector<double> y(n);
  double k = 0.0;
  for (std::size_t j = 0; j < dimA; ++j) {
    double b = 0.0;
    for (std::size_t a = 0; a < dimB; ++a) b += s(j * dimB + a, j * dimB + a).real();
    k = std::max(k, b);
  }
  if (k <= 0.0) return 0.0;
  for (std::size_t j = 0; j < dimA; ++j) {
    double b = 0.0;
    for (std::size_t a = 0; a < dimB; ++a) b += s(j * dimB + a, j * dimB + a).real();
    for (std::size_t a = 0; a < dimB; ++a)
      y[j * dimB + a] = s(j * dimB + a, j * dimB + a).real() + (k - b) / static_cast<double>(dimB);
  }

  ComplexMatrix z(n, n), u(n, n);
  double rho = 1.0;
  const double over_relax = 1.6;
  double k_prev = k;
  std::size_t stable = 0;

  for (std::size_t it = 0; it < 400000; ++it) {
    // (y, k)-update: v = diag(S + Z - U); minimize k/rho + 0.5 ||y - v||^2
    // over the product of scaled simplices. The stationarity condition is
    // sum_j theta_j(k) = 1/rho with theta_j the per-block projection
    // thresholds, monotone in k, solved by bisection.
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = s(i, i).real() + (z(i, i) - u(i, i)).real();

    auto theta_sum = [&](double kk) {
      double sum = 0.0;
      std::vector<double> tmp;
      for (std::size_t j = 0; j < dimA; ++j) {
        std::vector<double> vj(v.begin() + j * dimB, v.begin() + (j + 1) * dimB);
        sum += detail::project_scaled_simplex(vj, kk, tmp);
      }
      return sum;
    };
    double lo = 0.0;
    double hi = 1.0;
    for (double t : v) hi += std::max(t, 0.0);
    if (theta_sum(lo) <= 1.0 / rho) {
      k = 0.0;
    } else {
      while (theta_sum(hi) > 1.0 / rho) hi *= 2.0;
      for (int b = 0; b < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++b) {
        const double mid = 0.5 * (lo + hi);
        (theta_sum(mid) > 1.0 / rho ? lo : hi) = mid;
      }
      k = 0.5 * (lo + hi);
    }
    for (std::size_t j = 0; j < dimA; ++j) {
      std::vector<double> vj(v.begin() + j * dimB, v.begin() + (j + 1) * dimB), yj;
      detail::project_scaled_simplex(vj, k, yj);
      for (std::size_t a = 0; a < dimB; ++a) y[j * dimB + a] = yj[a];
    }

    // Z-update with over-relaxation, then scaled dual update.
    ComplexMatrix dy_minus_s(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j2 = 0; j2 < n; ++j2)
        dy_minus_s(i, j2) = (i == j2 ? y[i] : 0.0) - s(i, j2);
    const ComplexMatrix mix_target =
        over_relax * dy_minus_s + (1.0 - over_relax) * z;
    const ComplexMatrix z_old = z;
    {
      const HermitianEig e = hermitian_eig(hermitian_part(mix_target + u));
      z = rebuild_from_eig(e, [](double lam) { return lam > 0.0 ? lam : 0.0; });
    }
    u += mix_target - z;

    const double pri = distance_frobenius(dy_minus_s, z);
    const double dua = rho * distance_frobenius(z, z_old);

    if (std::abs(k - k_prev) <= tol * 1e-2 * std::max(1.0, k))
      ++stable;
    else
      stable = 0;
    k_prev = k;

    if (pri <= 1e-10 * scale && dua <= 1e-10 * scale && stable >= 20) return k;
    if (it % 100 == 99) {
      if (pri > 10.0 * dua) {
        rho *= 2.0;
        u *= Complex(0.5, 0.0);
      } else if (dua > 10.0 * pri) {
        rho *= 0.5;
        u *= Complex(2.0, 0.0);
      }
    }
  }
  throw SolverError("min_block_sum_splitting: iteration cap exceeded");
}

/// min tr(Y) subject to Y >= E_k for every effect, by barrier Newton on Y.
/// Returns the optimum and the dual certificate normalized into a POVM.
struct DiscriminationSolution {
  double value = 0.0;
  std::vector<ComplexMatrix> povm;
  double gap = 0.0;
};

inline DiscriminationSolution solve_discrimination(const std::vector<ComplexMatrix>& effects,
                                                   double tol = 1e-8) {
  if (effects.empty()) throw ValidationError("solve_discrimination: no effects");
  const std::size_t n = effects.front().rows();
  const std::size_t kk = effects.size();
  double emax = 0.0;
  for (const ComplexMatrix& e : effects) {
    if (e.rows() != n || e.cols() != n)
      throw ValidationError("solve_discrimination: effect dimensions differ");
    if (!is_hermitian(e)) throw ValidationError("solve_discrimination: effect not Hermitian");
    emax = std::max(emax, detail::lambda_max(e));
  }
  DiscriminationSolution out;
  if (emax <= 0.0) {
    // All effects vanish; any POVM is optimal.
    out.value = 0.0;
    for (std::size_t i = 0; i < kk; ++i)
      out.povm.push_back(Complex(1.0 / static_cast<double>(kk), 0.0) *
                         ComplexMatrix::identity(n));
    return out;
  }

  const double delta = 1e-3 * emax;
  ComplexMatrix ysum(n, n);
  for (const ComplexMatrix& e : effects) ysum += e;
  ComplexMatrix y = ysum + Complex(delta, 0.0) * ComplexMatrix::identity(n);

  // Real parameterization of Hermitian Y: n diagonal entries followed by
  // (re, im) pairs for p < q.
  const std::size_t nv = n * n;
  auto unpack = [&](const std::vector<double>& x) {
    ComplexMatrix m(n, n);
    std::size_t idx = n;
    for (std::size_t p = 0; p < n; ++p) m(p, p) = x[p];
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        m(p, q) = Complex(x[idx], x[idx + 1]);
        m(q, p) = std::conj(m(p, q));
        idx += 2;
      }
    return m;
  };
  auto pack = [&](const ComplexMatrix& m) {
    std::vector<double> x(nv);
    std::size_t idx = n;
    for (std::size_t p = 0; p < n; ++p) x[p] = m(p, p).real();
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        x[idx] = m(p, q).real();
        x[idx + 1] = m(p, q).imag();
        idx += 2;
      }
    return x;
  };

  std::vector<double> x = pack(y);
  double mu = std::max(1.0, emax);
  std::vector<ComplexMatrix> w(kk);

  auto factor_all = [&](const std::vector<double>& xv, double* logdet) -> bool {
    const ComplexMatrix ym = unpack(xv);
    double ld = 0.0;
    for (std::size_t c = 0; c < kk; ++c) {
      ComplexMatrix l;
      if (!detail::cholesky(ym - effects[c], l)) return false;
      ld += detail::log_det_from_cholesky(l);
      w[c] = detail::inverse_from_cholesky(l);
    }
    if (logdet) *logdet = ld;
    return true;
  };

  for (std::size_t outer = 0; outer < 60; ++outer) {
    for (std::size_t inner = 0; inner < 100; ++inner) {
      double logdet = 0.0;
      if (!factor_all(x, &logdet))
        throw SolverError("solve_discrimination: iterate left the cone");

      // Gradient matrix G = I - mu * sum W_c; Hessian via the closed form
      // tr(E_pq W E_rs W) = W_qr * W_sp in the Hermitian basis.
      ComplexMatrix g = ComplexMatrix::identity(n);
      ComplexMatrix wsum(n, n);
      for (std::size_t c = 0; c < kk; ++c) wsum += w[c];
      g -= mu * wsum;

      std::vector<double> grad(nv, 0.0);
      {
        std::size_t idx = n;
        for (std::size_t p = 0; p < n; ++p) grad[p] = g(p, p).real();
        for (std::size_t p = 0; p < n; ++p)
          for (std::size_t q = p + 1; q < n; ++q) {
            grad[idx] = 2.0 * g(q, p).real();
            grad[idx + 1] = -2.0 * g(q, p).imag();
            idx += 2;
          }
      }

      // Hessian H[a][b] = mu * sum_c Re tr(B_a W_c B_b W_c) over the
      // (unnormalized) basis E_pp, E_pq + E_qp, i(E_pq - E_qp).
      std::vector<std::pair<std::size_t, std::size_t>> basis_pq;
      basis_pq.reserve(nv);
      std::vector<int> basis_type;  // 0 diag, 1 real, 2 imag
      for (std::size_t p = 0; p < n; ++p) {
        basis_pq.emplace_back(p, p);
        basis_type.push_back(0);
      }
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) {
          basis_pq.emplace_back(p, q);
          basis_type.push_back(1);
          basis_pq.emplace_back(p, q);
          basis_type.push_back(2);
        }
      std::vector<double> h(nv * nv, 0.0);
      for (std::size_t c = 0; c < kk; ++c) {
        const ComplexMatrix& wc = w[c];
        auto tr_elem = [&](std::size_t p, std::size_t q, std::size_t r, std::size_t s2) {
          return wc(q, r) * wc(s2, p);  // tr(E_pq W E_rs W)
        };
        for (std::size_t a = 0; a < nv; ++a) {
          const auto [pa, qa] = basis_pq[a];
          for (std::size_t b = a; b < nv; ++b) {
            const auto [pb, qb] = basis_pq[b];
            Complex t = 0.0;
            auto add = [&](std::size_t p1, std::size_t q1, Complex f1, std::size_t p2,
                           std::size_t q2, Complex f2) { t += f1 * f2 * tr_elem(p1, q1, p2, q2); };
            const Complex one(1.0, 0.0), im(0.0, 1.0);
            auto terms_a = [&](auto&& emit) {
              if (basis_type[a] == 0) {
                emit(pa, qa, one);
              } else if (basis_type[a] == 1) {
                emit(pa, qa, one);
                emit(qa, pa, one);
              } else {
                emit(pa, qa, im);
                emit(qa, pa, -im);
              }
            };
            auto terms_b = [&](auto&& emit) {
              if (basis_type[b] == 0) {
                emit(pb, qb, one);
              } else if (basis_type[b] == 1) {
                emit(pb, qb, one);
                emit(qb, pb, one);
              } else {
                emit(pb, qb, im);
                emit(qb, pb, -im);
              }
            };
            terms_a([&](std::size_t p1, std::size_t q1, Complex f1) {
              terms_b([&](std::size_t p2, std::size_t q2, Complex f2) {
                add(p1, q1, f1, p2, q2, f2);
              });
            });
            const double val = mu * t.real();
            h[a * nv + b] += val;
            if (a != b) h[b * nv + a] += val;
          }
        }
      }

      std::vector<double> rhs(nv);
      for (std::size_t a = 0; a < nv; ++a) rhs[a] = -grad[a];
      std::vector<double> step = detail::solve_real_linear(std::move(h), std::move(rhs));

      double decrement2 = 0.0;
      for (std::size_t a = 0; a < nv; ++a) decrement2 += -grad[a] * step[a];
      if (decrement2 < 0.0) decrement2 = 0.0;

      const ComplexMatrix y_now = unpack(x);
      const double f0 = y_now.trace().real() - mu * logdet;
      double alpha = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        std::vector<double> x_try(nv);
        for (std::size_t a = 0; a < nv; ++a) x_try[a] = x[a] + alpha * step[a];
        double logdet_try = 0.0;
        std::vector<ComplexMatrix> w_save = w;
        if (factor_all(x_try, &logdet_try)) {
          const double f_try = unpack(x_try).trace().real() - mu * logdet_try;
          if (f_try <= f0 - 0.25 * alpha * decrement2 + 1e-14 * std::abs(f0)) {
            x = std::move(x_try);
            moved = true;
            break;
          }
        }
        w = std::move(w_save);
        alpha *= 0.5;
      }
      if (!moved || decrement2 <= 1e-18 * std::max(1.0, mu)) break;
    }

    // Dual certificate Z_c = mu * W_c, symmetrized into an exact POVM.
    if (!factor_all(x, nullptr)) throw SolverError("solve_discrimination: lost feasibility");
    std::vector<ComplexMatrix> z(kk);
    ComplexMatrix total(n, n);
    for (std::size_t c = 0; c < kk; ++c) {
      z[c] = mu * w[c];
      total += z[c];
    }
    const HermitianEig te = hermitian_eig(total);
    const ComplexMatrix tinv_half =
        rebuild_from_eig(te, [](double lam) { return lam > 1e-300 ? 1.0 / std::sqrt(lam) : 0.0; });
    double dual_value = 0.0;
    for (std::size_t c = 0; c < kk; ++c) {
      z[c] = tinv_half * z[c] * tinv_half;
      dual_value += trace_of_product(z[c], effects[c]).real();
    }
    const double primal = unpack(x).trace().real();
    const double gap = std::abs(primal - dual_value);
    if (gap <= tol * std::max(1.0, primal) && mu <= 1e-9 * std::max(1.0, emax)) {
      out.value = primal;
      out.povm = std::move(z);
      out.gap = gap;
      return out;
    }
    if (mu <= 1e-13 * std::max(1.0, emax)) {
      out.value = primal;
      out.povm = std::move(z);
      out.gap = gap;
      if (gap <= 10.0 * tol * std::max(1.0, primal)) return out;
      throw SolverError("solve_discrimination: duality gap did not close");
    }
    mu *= 0.1;
  }
  throw SolverError("solve_discrimination: outer iteration cap exceeded");
}

}  // namespace chancoh
