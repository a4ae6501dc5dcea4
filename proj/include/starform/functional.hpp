#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "starform/dual_volume.hpp"
#include "starform/polymeasure.hpp"
#include "starform/random.hpp"
#include "starform/star_body.hpp"

namespace starform {

/// F(L_1, ..., L_m) for star bodies sampled on a common grid.
///
/// A functional is backed by a node measure (F = sum_i mu_i prod_j rho_j(i)),
/// a node-level polymeasure (F = elementary integral), or an opaque evaluator
/// that callers declare separately additive and positively homogeneous. The
/// declaration is never trusted: see probe_black_box.
class BodyFunctional {
 public:
  struct DiagonalMeasure {
    std::vector<double> masses;
  };
  struct Tensor {
    PolyMeasure gamma;
  };
  struct BlackBox {
    std::function<double(std::span<const RadialFunction>)> eval;
  };
  using Backing = std::variant<DiagonalMeasure, Tensor, BlackBox>;

  BodyFunctional(GridPtr grid, int arity, Backing backing);

  const GridPtr& grid() const { return grid_; }
  int arity() const { return arity_; }
  const Backing& backing() const { return backing_; }

  double operator()(std::span<const RadialFunction> args) const;

 private:
  GridPtr grid_;
  int arity_;
  Backing backing_;
};

/// F(f_1..f_m) = sum_i mu_i * prod_j f_j(i).
BodyFunctional from_measure(const GridPtr& grid, std::vector<double> masses, int arity);

/// F(f_1..f_m) = integrate_simple(gamma, f_1..f_m); gamma must be node-level.
BodyFunctional from_polymeasure(const GridPtr& grid, PolyMeasure gamma);

BodyFunctional from_black_box(const GridPtr& grid, int arity,
                              std::function<double(std::span<const RadialFunction>)> eval);

/// Shared knobs for the sampled checks. Relative tolerances are taken
/// against a measured scale of F.
struct HarnessOptions {
  int trials = 50;
  std::uint64_t seed = 0;
  double tol_rel = 1e-9;
};

struct ProbeCertificate {
  int trials;
  double additivity;
  double homogeneity;
  double zero_body;
  /// max |F| over probes with every argument inside the unit ball.
  double unit_ball_bound;
  double scale;
};

/// Samples separate additivity, positive homogeneity and F(..., {o}, ...) = 0.
/// Throws ProbeFailure with the violating tuple.
ProbeCertificate probe_black_box(const BodyFunctional& f, const HarnessOptions& opts = {});

/// T_F on signed grid functions: the alternating 2^m-term expansion over
/// positive and negative parts. Black-box backings are probed first.
MultilinearForm tf_extend(const BodyFunctional& f, const HarnessOptions& opts = {});

/// P_F(f) = T_F(f, ..., f) on signed grid functions.
HomogeneousPolynomial associated_polynomial(const BodyFunctional& f,
                                            const HarnessOptions& opts = {});

struct CheckReport {
  std::string name;
  double max_violation;
  double scale;
  bool pass;
  /// Bodies attaining max_violation, when it is nonzero.
  std::optional<std::vector<StarBodySpec>> witness;
};

/// Random cap-bump body: center at a grid node, width in [pi/16, pi/4],
/// height in [0.1, 2].
StarBodySpec random_cap_bump(const SphereGrid& grid, Rng& rng);

/// A random cap bump whose support is angularly separated from `other`.
StarBodySpec random_disjoint_cap_bump(const SphereGrid& grid, const CapBump& other, Rng& rng);

/// F vanishes on tuples in which two bodies meet only at the origin.
CheckReport check_vanishing_on_disjoint(const BodyFunctional& f, const HarnessOptions& opts = {});

/// F is invariant under argument permutations.
CheckReport check_symmetry(const BodyFunctional& f, const HarnessOptions& opts = {});

/// P_F(L + M) = P_F(L) + P_F(M) for essentially disjoint L, M.
CheckReport check_poly_orthogonal_additivity(const BodyFunctional& f,
                                             const HarnessOptions& opts = {});

struct RecoveryReport {
  std::vector<double> measure;
  int degree;
  /// Largest relative gap between P(f) and sum_i nu_i f_i^n over the validation set.
  double max_rel_error;
  int validation_samples;
  bool pass;
};

/// nu_i = P(indicator of node i), after probing homogeneity and orthogonal
/// additivity; validated on 100 random simple functions.
RecoveryReport recover_measure_from_polynomial(const HomogeneousPolynomial& poly,
                                               const GridPtr& grid,
                                               const HarnessOptions& opts = {});

struct RotationReduction {
  /// F = c * dual mixed volume.
  double c;
  /// max_i |mu_i - c w_i / n|.
  double residual;
  /// max over rotations and nodes of |mu(rot node) - mu(node)|.
  double invariance_residual;
  std::size_t group_generators;
};

/// Fits F = c * V~ for a measure-backed F invariant under grid rotations whose
/// action on the nodes is transitive. Throws NotTransitive, or
/// InvarianceViolation when the invariance residual exceeds tol * max|mu|.
RotationReduction reduce_rotation_invariant(const BodyFunctional& f,
                                            std::span<const Rotation> rotations,
                                            double tol = 1e-12);

/// All k rotations by multiples of 2 pi / k for a uniform planar grid of k nodes.
std::vector<Rotation> cyclic_group(const SphereGrid& grid);

struct ViolationWitness {
  std::vector<StarBodySpec> bodies;
  std::vector<std::size_t> atoms;
  double entry;
  double value;
  /// Slots (i, j) whose bodies are essentially disjoint.
  std::pair<std::size_t, std::size_t> disjoint_pair;
};

/// Bump bodies supported on the nodes of the largest off-diagonal entry of a
/// tensor-backed F, certifying that F does not vanish on disjoint tuples.
ViolationWitness find_violation_witness(const BodyFunctional& f, double tol = kDiagonalTol);

}  // namespace starform
