#pragma once

namespace chancoh {

/// All numerical tolerances flow from this one record so that callers
/// (and the CLI) can override them in a single place.
struct Tolerances {
  double hermitian = 1e-9;       // relative Frobenius tolerance for H = H†
  double psd = 1e-9;             // relative eigenvalue floor for PSD checks
  double channel = 1e-8;         // Choi-matrix invariant tolerance
  double solver_gap = 1e-8;      // relative duality-gap target
  double classification = 1e-9;  // "nonzero entry" threshold for ISC/SISC/DISC
  double support = 1e-10;        // relative eigenvalue cutoff for support projectors
  double zero_branch = 1e-12;    // selective branches below this probability are dropped
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

}  // namespace chancoh
