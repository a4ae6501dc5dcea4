#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "starform/sphere_grid.hpp"

namespace starform {

/// Disjoint nonempty sets of node indices covering 0..node_count-1.
class FinitePartition {
 public:
  FinitePartition(std::size_t node_count, std::vector<std::vector<std::size_t>> atoms,
                  GridPtr grid = nullptr);
  /// One atom per node, atom j = {j}.
  static FinitePartition node_level(std::size_t node_count, GridPtr grid = nullptr);
  static FinitePartition node_level(const GridPtr& grid);

  std::size_t node_count() const { return node_count_; }
  std::size_t atom_count() const { return atoms_.size(); }
  const std::vector<std::vector<std::size_t>>& atoms() const { return atoms_; }
  std::size_t atom_of(std::size_t node) const { return atom_of_[node]; }
  const GridPtr& grid() const { return grid_; }
  bool is_node_level() const;

 private:
  std::size_t node_count_;
  std::vector<std::vector<std::size_t>> atoms_;
  std::vector<std::size_t> atom_of_;
  GridPtr grid_;
};

/// Order-m polymeasure on a finite partition: a k^m tensor, row-major
/// (last index fastest), entry[j_1..j_m] = gamma(atom_{j_1}, ..., atom_{j_m}).
class PolyMeasure {
 public:
  PolyMeasure(int order, FinitePartition partition, std::vector<double> entries);
  /// Abstract atoms 0..atoms-1 (node-level partition without a grid).
  PolyMeasure(int order, std::size_t atoms, std::vector<double> entries);
  static PolyMeasure zero(int order, FinitePartition partition);

  int order() const { return order_; }
  std::size_t atom_count() const { return partition_.atom_count(); }
  const FinitePartition& partition() const { return partition_; }
  std::span<const double> entries() const { return entries_; }
  double entry(std::span<const std::size_t> index) const { return entries_[flat_index(index)]; }

  std::size_t flat_index(std::span<const std::size_t> index) const;
  std::vector<std::size_t> multi_index(std::size_t flat) const;

 private:
  int order_;
  FinitePartition partition_;
  std::vector<double> entries_;
};

/// Sum of entries over the rectangle sets_1 x ... x sets_m of atom indices.
double evaluate(const PolyMeasure& gamma, std::span<const std::vector<std::size_t>> sets);

/// Sum of |entries|: the variation at (S, ..., S), attained at the atomic partition.
double variation(const PolyMeasure& gamma);

enum class SemivariationMode { exact, randomized };

struct SemivariationResult {
  double value;
  /// Set when the value is only a lower bound (randomized mode).
  bool lower_bound;
  /// Certificate: one +-1 vector per factor attaining `value`.
  std::vector<std::vector<int>> signs;
};

/// Largest m * k accepted by exact semivariation.
inline constexpr std::size_t kExactSemivariationCap = 24;

/// sup |sum a^{j_1}_1 ... a^{j_m}_m gamma(...)| over coefficients in [-1, 1].
///
/// Exact mode enumerates sign vectors for factors 1..m-1 and takes the last
/// factor in closed form; it requires m * k <= 24. Randomized mode returns the
/// best value found by random signs refined with coordinate-wise sign updates
/// (`samples` = 0 picks 10 * 2^min(mk, 20), capped at 10^6).
SemivariationResult semivariation(const PolyMeasure& gamma, SemivariationMode mode,
                                  std::uint64_t seed = 0, std::size_t samples = 0);

/// |sum gamma(...) * prod_i signs_i[j_i]|, the objective semivariation maximizes.
double signed_mass(const PolyMeasure& gamma, std::span<const std::vector<int>> signs);

/// sum over tuples of prod_i values_i[j_i] * entry[j_1..j_m], one value per atom.
double contract(const PolyMeasure& gamma, std::span<const std::vector<double>> atom_values);

/// Elementary integral of grid functions that are constant on every atom.
/// Each function is given by its node values.
double integrate_simple(const PolyMeasure& gamma,
                        std::span<const std::vector<double>> node_values);

/// Entrywise positive and negative parts, gamma = plus - minus.
std::pair<PolyMeasure, PolyMeasure> jordan_decomposition(const PolyMeasure& gamma);

/// Order-1 measure on the product atoms (m-tuples of partition atoms).
class ProductMeasure {
 public:
  ProductMeasure(int order, std::size_t factor_atoms, std::vector<double> masses);

  int order() const { return order_; }
  std::size_t factor_atoms() const { return factor_atoms_; }
  std::span<const double> masses() const { return masses_; }
  double total_mass() const;
  /// Mass of sets_1 x ... x sets_m.
  double rectangle_mass(std::span<const std::vector<std::size_t>> sets) const;

 private:
  int order_;
  std::size_t factor_atoms_;
  std::vector<double> masses_;
};

ProductMeasure product_measure(const PolyMeasure& gamma);

struct DiagonalCheck {
  bool diagonal;
  /// Largest-magnitude off-diagonal index tuple when not diagonal.
  std::optional<std::vector<std::size_t>> witness;
  double witness_entry = 0.0;
};

/// Diagonal iff every entry whose indices are not all equal has |entry| <= tol.
DiagonalCheck is_diagonal(const PolyMeasure& gamma, double tol);

inline constexpr double kDiagonalTol = 1e-12;

/// mu(atom_j) = entry[j, ..., j]; throws NotDiagonal with the witness otherwise.
std::vector<double> diagonal_measure(const PolyMeasure& gamma, double tol = kDiagonalTol);

/// Merges atoms: groups[g] lists the atoms forming new atom g. Entries are summed.
PolyMeasure coarsen(const PolyMeasure& gamma, std::span<const std::vector<std::size_t>> groups);

}  // namespace starform
