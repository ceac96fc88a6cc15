#pragma once

#include "diralg/constraint_types.hpp"
#include "diralg/dirac.hpp"
#include "diralg/probe.hpp"

#include <string>
#include <vector>

namespace diralg {

/// Number of support points used to check V inside Vel_D.
inline constexpr int kSupportProbes = 20;

/// D^V = V~ + V^0. PiGraph bases with adapted selectors use the closed-form
/// equations; anything else goes through the pointwise row construction.
/// Throws ConstraintError when V is not inside Vel_D and StructureError when the
/// rank bookkeeping fails.
DiracAlgebroid induce(const DiracAlgebroid& d, const LinearConstraint& v);

/// D^A = A~ + V^0 for an affine constraint with model bundle V.
DiracAlgebroid induce_affine(const DiracAlgebroid& d, const AffineConstraint& a);

/// Independent construction of the fiber of D^V over (x, xi) from basis_at(D):
/// intersect with the preimage of V, then add V^0 in the core slots. Columns
/// use the basis_at layout.
Matrix pointwise_induce(const DiracAlgebroid& d, const LinearConstraint& v, const Vector& x,
                        const Vector& xi);

/// One entry of an integrability condition together with its largest value
/// over the support probes.
struct IntegrabilityEntry {
  std::string label;  // e.g. "rho^0_1" or "c^2_{01}"
  std::vector<int> indices;
  double value = 0.0;
  Vector x;
};

struct IntegrabilityReport {
  bool cond1 = true;
  bool cond2 = true;
  double cond1_max = 0.0;
  double cond2_max = 0.0;
  /// Entries of rho^B_iota (B in A, iota not in I).
  std::vector<IntegrabilityEntry> cond1_entries;
  /// Entries c^I_{iota kappa} (I in I, iota, kappa not in I).
  std::vector<IntegrabilityEntry> cond2_entries;
  double base_jacobi_max = 0.0;
  bool base_is_lie = true;
  bool dirac_lie = true;
  int probes = 0;

  /// Entry with the given label, or nullptr.
  const IntegrabilityEntry* find(const std::string& label) const;
};

/// Coordinate integrability conditions for a PiGraph structure induced by an
/// adapted linear constraint. Other inputs throw ConstraintError.
IntegrabilityReport check_integrability(const DiracAlgebroid& d, int probes = 24);

/// Random point of S = {x^A = 0}.
Vector support_point(ProbeSampler& sampler, int n, const std::vector<int>& base_selector);

LocalForm induced_local_form(const Induced& ind, const Chart& chart, const Vector& x);
PhaseForm induced_phase_form(const Induced& ind, const Chart& chart, const Vector& x);

}  // namespace diralg
