#pragma once

#include "diralg/constraints.hpp"
#include "diralg/dynamics.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace diralg {

/// Structure checks evaluated on many random probes. Probe points are drawn
/// serially from a seeded sampler, so serial and parallel runs see the same
/// points and return identical maxima.
enum class Execution { serial, parallel };

struct SweepResult {
  std::string name;
  double max_value = 0.0;
  double threshold = 0.0;
  int probes = 0;
  /// Base point where the maximum occurred.
  Vector worst_x;

  bool passed() const { return max_value <= threshold; }
};

/// Evaluates `eval(i)` for i in [0, count) and keeps the largest value. The
/// first exception thrown by any probe is rethrown after the loop.
SweepResult run_sweep(std::string name, double threshold, const std::vector<Vector>& points,
                      const std::function<double(std::size_t)>& eval, Execution exec);

/// Random base point, on the support when d is induced with a base selector.
Vector probe_base_point(const DiracAlgebroid& d, ProbeSampler& sampler);

/// max |<P_i, P_j>| over basis pairs of the fiber of D (threshold 1e-10).
SweepResult isotropy_sweep(const DiracAlgebroid& d, int probes, std::uint64_t seed,
                           Execution exec = Execution::serial);

/// Residual of h_t h_s (P) for random P in D and t, s in {0, 0.5, 2, -1}
/// (t = 1 only for affine structures), relative to |P| (threshold 1e-10).
SweepResult homothety_sweep(const DiracAlgebroid& d, int probes, std::uint64_t seed,
                            Execution exec = Execution::serial);

/// Largest principal angle between ker(mom) and the annihilator of the
/// velocity bundle (threshold 1e-8).
SweepResult core_annihilator_sweep(const DiracAlgebroid& d, int probes, std::uint64_t seed,
                                   Execution exec = Execution::serial);

/// max_basis_jacobiator (threshold 1e-6).
SweepResult jacobi_sweep(const SkewAlgebroid& a, int probes, std::uint64_t seed,
                         Execution exec = Execution::serial);

/// Principal angles between induce(d, v) and pointwise_induce(d, v) (threshold
/// 1e-8).
SweepResult induce_oracle_sweep(const DiracAlgebroid& d, const LinearConstraint& v, int probes,
                                std::uint64_t seed, Execution exec = Execution::serial);

/// Both directions of the Lagrangian/Hamiltonian correspondence: solved EL
/// rates mapped through the Legendre map zero the Hamilton residual and vice
/// versa (threshold 1e-7).
SweepResult legendre_equivalence_sweep(const DiracAlgebroid& d, const LagrangianDef& l,
                                       const HamiltonianDef& h, int probes, std::uint64_t seed,
                                       Execution exec = Execution::serial);

}  // namespace diralg
