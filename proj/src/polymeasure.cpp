#include "starform/polymeasure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "starform/error.hpp"
#include "starform/random.hpp"
#include "starform/summation.hpp"

namespace starform {

namespace {

constexpr std::size_t kMaxEntries = std::size_t{1} << 28;

std::size_t checked_power(std::size_t base, int exponent) {
  std::size_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && out > kMaxEntries / base) {
      throw InvalidArgument("polymeasure tensor would exceed 2^28 entries");
    }
    out *= base;
  }
  return out;
}

std::vector<std::vector<std::size_t>> normalized_sets(
    const PolyMeasure& gamma, std::span<const std::vector<std::size_t>> sets) {
  if (static_cast<int>(sets.size()) != gamma.order()) {
    throw InvalidArgument("polymeasure of order " + std::to_string(gamma.order()) +
                          " evaluated on " + std::to_string(sets.size()) + " sets");
  }
  std::vector<std::vector<std::size_t>> out(sets.begin(), sets.end());
  for (auto& s : out) {
    for (std::size_t j : s) {
      if (j >= gamma.atom_count()) {
        throw InvalidArgument("atom index " + std::to_string(j) + " out of range (" +
                              std::to_string(gamma.atom_count()) + " atoms)");
      }
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return out;
}

/// Contracts every slot except `skip` with the sign vectors; result indexed by slot `skip`.
std::vector<double> contract_except(const PolyMeasure& gamma,
                                    std::span<const std::vector<int>> signs, int skip) {
  const std::size_t k = gamma.atom_count();
  const int m = gamma.order();
  std::vector<double> out(k, 0.0);
  std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
  const auto entries = gamma.entries();
  for (std::size_t flat = 0; flat < entries.size(); ++flat) {
    int sign = 1;
    for (int l = 0; l < m; ++l) {
      if (l != skip) sign *= signs[static_cast<std::size_t>(l)][idx[static_cast<std::size_t>(l)]];
    }
    out[idx[static_cast<std::size_t>(skip)]] += sign * entries[flat];
    for (int l = m - 1; l >= 0; --l) {
      auto& d = idx[static_cast<std::size_t>(l)];
      if (++d < k) break;
      d = 0;
    }
  }
  return out;
}

double abs_sum(std::span<const double> v) {
  CompensatedSum s;
  for (double x : v) s.add(std::abs(x));
  return s.value();
}

std::vector<int> signs_of(std::span<const double> v) {
  std::vector<int> s(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) s[j] = v[j] < 0.0 ? -1 : 1;
  return s;
}

/// Exhaustive search over sign vectors of factors 1..m-1.
class ExactSemivariation {
 public:
  explicit ExactSemivariation(const PolyMeasure& gamma)
      : k_(gamma.atom_count()), m_(gamma.order()) {
    levels_.resize(static_cast<std::size_t>(m_));
    levels_[0].assign(gamma.entries().begin(), gamma.entries().end());
    for (int l = 1; l < m_; ++l) levels_[static_cast<std::size_t>(l)].resize(levels_[static_cast<std::size_t>(l - 1)].size() / k_);
    current_.assign(static_cast<std::size_t>(m_), std::vector<int>(k_, 1));
  }

  SemivariationResult run() {
    search(0);
    return {best_, false, best_signs_};
  }

 private:
  void search(int level) {
    const auto& tensor = levels_[static_cast<std::size_t>(level)];
    if (level == m_ - 1) {
      const double value = abs_sum(tensor);
      if (value > best_) {
        best_ = value;
        best_signs_ = current_;
        best_signs_.back() = signs_of(tensor);
      }
      return;
    }
    auto& next = levels_[static_cast<std::size_t>(level + 1)];
    auto& s = current_[static_cast<std::size_t>(level)];
    const std::size_t stride = next.size();
    // Negating a whole factor leaves the objective unchanged, so the first
    // factor's leading sign is pinned to +1.
    const std::uint64_t masks = std::uint64_t{1} << k_;
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
      if (level == 0 && (mask & 1u)) continue;
      for (std::size_t j = 0; j < k_; ++j) s[j] = (mask >> j) & 1u ? -1 : 1;
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t j = 0; j < k_; ++j) {
        const double* row = tensor.data() + j * stride;
        if (s[j] > 0) {
          for (std::size_t r = 0; r < stride; ++r) next[r] += row[r];
        } else {
          for (std::size_t r = 0; r < stride; ++r) next[r] -= row[r];
        }
      }
      search(level + 1);
    }
  }

  std::size_t k_;
  int m_;
  std::vector<std::vector<double>> levels_;
  std::vector<std::vector<int>> current_;
  std::vector<std::vector<int>> best_signs_;
  double best_ = -1.0;
};

SemivariationResult randomized_semivariation(const PolyMeasure& gamma, std::uint64_t seed,
                                             std::size_t samples) {
  const std::size_t k = gamma.atom_count();
  const int m = gamma.order();
  if (samples == 0) {
    const std::size_t mk = std::min<std::size_t>(k * static_cast<std::size_t>(m), 20);
    samples = std::min<std::size_t>(10 * (std::size_t{1} << mk), 1'000'000);
  }
  Rng rng(seed);
  SemivariationResult best{-1.0, true, {}};
  std::vector<std::vector<int>> signs(static_cast<std::size_t>(m), std::vector<int>(k));
  for (std::size_t t = 0; t < samples; ++t) {
    for (auto& s : signs) {
      for (auto& x : s) x = rng.coin() ? -1 : 1;
    }
    double value = -1.0;
    for (int sweep = 0; sweep < 50; ++sweep) {
      const double before = value;
      for (int i = 0; i < m; ++i) {
        const auto v = contract_except(gamma, signs, i);
        signs[static_cast<std::size_t>(i)] = signs_of(v);
        value = abs_sum(v);
      }
      if (!(value > before)) break;
    }
    if (value > best.value) {
      best.value = value;
      best.signs = signs;
    }
  }
  return best;
}

}  // namespace

FinitePartition::FinitePartition(std::size_t node_count,
                                 std::vector<std::vector<std::size_t>> atoms, GridPtr grid)
    : node_count_(node_count), atoms_(std::move(atoms)), grid_(std::move(grid)) {
  if (grid_ && grid_->size() != node_count_) {
    throw InvalidArgument("partition node count does not match its grid");
  }
  constexpr auto unassigned = std::numeric_limits<std::size_t>::max();
  atom_of_.assign(node_count_, unassigned);
  for (std::size_t a = 0; a < atoms_.size(); ++a) {
    if (atoms_[a].empty()) throw InvalidArgument("partition atom " + std::to_string(a) + " is empty");
    for (std::size_t node : atoms_[a]) {
      if (node >= node_count_) {
        throw InvalidArgument("partition atom " + std::to_string(a) + " names node " +
                              std::to_string(node) + " outside the grid");
      }
      if (atom_of_[node] != unassigned) {
        throw InvalidArgument("node " + std::to_string(node) + " belongs to two atoms");
      }
      atom_of_[node] = a;
    }
  }
  for (std::size_t node = 0; node < node_count_; ++node) {
    if (atom_of_[node] == unassigned) {
      throw InvalidArgument("node " + std::to_string(node) + " is not covered by the partition");
    }
  }
}

FinitePartition FinitePartition::node_level(std::size_t node_count, GridPtr grid) {
  std::vector<std::vector<std::size_t>> atoms(node_count);
  for (std::size_t j = 0; j < node_count; ++j) atoms[j] = {j};
  return FinitePartition(node_count, std::move(atoms), std::move(grid));
}

FinitePartition FinitePartition::node_level(const GridPtr& grid) {
  return node_level(grid->size(), grid);
}

bool FinitePartition::is_node_level() const {
  if (atoms_.size() != node_count_) return false;
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    if (atoms_[j].size() != 1 || atoms_[j][0] != j) return false;
  }
  return true;
}

PolyMeasure::PolyMeasure(int order, FinitePartition partition, std::vector<double> entries)
    : order_(order), partition_(std::move(partition)), entries_(std::move(entries)) {
  if (order_ < 1) throw InvalidArgument("polymeasure order must be at least 1");
  const std::size_t expected = checked_power(partition_.atom_count(), order_);
  if (entries_.size() != expected) {
    throw InvalidArgument("polymeasure of order " + std::to_string(order_) + " on " +
                          std::to_string(partition_.atom_count()) + " atoms needs " +
                          std::to_string(expected) + " entries, got " +
                          std::to_string(entries_.size()));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!std::isfinite(entries_[i])) {
      throw InvalidArgument("polymeasure entry " + std::to_string(i) + " is not finite");
    }
  }
}

PolyMeasure::PolyMeasure(int order, std::size_t atoms, std::vector<double> entries)
    : PolyMeasure(order, FinitePartition::node_level(atoms), std::move(entries)) {}

PolyMeasure PolyMeasure::zero(int order, FinitePartition partition) {
  const std::size_t n = checked_power(partition.atom_count(), order);
  return PolyMeasure(order, std::move(partition), std::vector<double>(n, 0.0));
}

std::size_t PolyMeasure::flat_index(std::span<const std::size_t> index) const {
  if (static_cast<int>(index.size()) != order_) {
    throw InvalidArgument("index tuple length does not match polymeasure order");
  }
  std::size_t flat = 0;
  for (std::size_t j : index) {
    if (j >= atom_count()) throw InvalidArgument("atom index " + std::to_string(j) + " out of range");
    flat = flat * atom_count() + j;
  }
  return flat;
}

std::vector<std::size_t> PolyMeasure::multi_index(std::size_t flat) const {
  std::vector<std::size_t> idx(static_cast<std::size_t>(order_));
  for (int l = order_ - 1; l >= 0; --l) {
    idx[static_cast<std::size_t>(l)] = flat % atom_count();
    flat /= atom_count();
  }
  return idx;
}

double evaluate(const PolyMeasure& gamma, std::span<const std::vector<std::size_t>> sets) {
  const auto norm = normalized_sets(gamma, sets);
  for (const auto& s : norm) {
    if (s.empty()) return 0.0;
  }
  // Lexicographic walk over the rectangle; flat indices increase monotonically.
  const std::size_t m = norm.size();
  std::vector<std::size_t> pos(m, 0);
  std::vector<std::size_t> idx(m);
  CompensatedSum s;
  while (true) {
    for (std::size_t l = 0; l < m; ++l) idx[l] = norm[l][pos[l]];
    s.add(gamma.entry(idx));
    std::size_t l = m;
    while (l > 0) {
      --l;
      if (++pos[l] < norm[l].size()) break;
      pos[l] = 0;
      if (l == 0) return s.value();
    }
  }
}

double variation(const PolyMeasure& gamma) { return abs_sum(gamma.entries()); }

SemivariationResult semivariation(const PolyMeasure& gamma, SemivariationMode mode,
                                  std::uint64_t seed, std::size_t samples) {
  if (mode == SemivariationMode::exact) {
    const std::size_t mk = gamma.atom_count() * static_cast<std::size_t>(gamma.order());
    if (mk > kExactSemivariationCap) {
      throw InvalidArgument("exact semivariation needs m*k <= " +
                            std::to_string(kExactSemivariationCap) + ", got " +
                            std::to_string(mk) + "; use randomized mode");
    }
    return ExactSemivariation(gamma).run();
  }
  return randomized_semivariation(gamma, seed, samples);
}

double signed_mass(const PolyMeasure& gamma, std::span<const std::vector<int>> signs) {
  if (static_cast<int>(signs.size()) != gamma.order()) {
    throw InvalidArgument("need one sign vector per factor");
  }
  std::vector<std::vector<double>> values;
  for (const auto& s : signs) {
    if (s.size() != gamma.atom_count()) throw InvalidArgument("sign vector has the wrong length");
    values.emplace_back(s.begin(), s.end());
  }
  return std::abs(contract(gamma, values));
}

double contract(const PolyMeasure& gamma, std::span<const std::vector<double>> atom_values) {
  const std::size_t k = gamma.atom_count();
  const int m = gamma.order();
  if (static_cast<int>(atom_values.size()) != m) {
    throw InvalidArgument("polymeasure of order " + std::to_string(m) + " integrates " +
                          std::to_string(m) + " functions, got " +
                          std::to_string(atom_values.size()));
  }
  for (const auto& v : atom_values) {
    if (v.size() != k) throw InvalidArgument("function is not given on every atom");
  }
  std::vector<double> cur(gamma.entries().begin(), gamma.entries().end());
  for (int l = m - 1; l >= 0; --l) {
    const auto& v = atom_values[static_cast<std::size_t>(l)];
    std::vector<double> next(cur.size() / k);
    for (std::size_t p = 0; p < next.size(); ++p) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) acc += cur[p * k + j] * v[j];
      next[p] = acc;
    }
    cur = std::move(next);
  }
  return cur[0];
}

double integrate_simple(const PolyMeasure& gamma,
                        std::span<const std::vector<double>> node_values) {
  const auto& part = gamma.partition();
  std::vector<std::vector<double>> atom_values;
  atom_values.reserve(node_values.size());
  for (std::size_t f = 0; f < node_values.size(); ++f) {
    const auto& values = node_values[f];
    if (values.size() != part.node_count()) {
      throw InvalidArgument("function " + std::to_string(f) + " has " +
                            std::to_string(values.size()) + " node values, partition covers " +
                            std::to_string(part.node_count()) + " nodes");
    }
    std::vector<double> per_atom(part.atom_count());
    for (std::size_t a = 0; a < part.atom_count(); ++a) {
      const auto& nodes = part.atoms()[a];
      per_atom[a] = values[nodes.front()];
      for (std::size_t node : nodes) {
        if (values[node] != per_atom[a]) {
          throw InvalidArgument("function " + std::to_string(f) + " is not constant on atom " +
                                std::to_string(a));
        }
      }
    }
    atom_values.push_back(std::move(per_atom));
  }
  return contract(gamma, atom_values);
}

std::pair<PolyMeasure, PolyMeasure> jordan_decomposition(const PolyMeasure& gamma) {
  const auto e = gamma.entries();
  std::vector<double> plus(e.size());
  std::vector<double> minus(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    plus[i] = e[i] > 0.0 ? e[i] : 0.0;
    minus[i] = e[i] < 0.0 ? -e[i] : 0.0;
  }
  return {PolyMeasure(gamma.order(), gamma.partition(), std::move(plus)),
          PolyMeasure(gamma.order(), gamma.partition(), std::move(minus))};
}

ProductMeasure::ProductMeasure(int order, std::size_t factor_atoms, std::vector<double> masses)
    : order_(order), factor_atoms_(factor_atoms), masses_(std::move(masses)) {
  if (masses_.size() != checked_power(factor_atoms_, order_)) {
    throw InvalidArgument("product measure has the wrong number of atoms");
  }
}

double ProductMeasure::total_mass() const { return compensated_sum(masses_); }

double ProductMeasure::rectangle_mass(std::span<const std::vector<std::size_t>> sets) const {
  if (static_cast<int>(sets.size()) != order_) {
    throw InvalidArgument("rectangle needs one side per factor");
  }
  std::vector<std::vector<bool>> member(sets.size(), std::vector<bool>(factor_atoms_, false));
  for (std::size_t l = 0; l < sets.size(); ++l) {
    for (std::size_t j : sets[l]) {
      if (j >= factor_atoms_) throw InvalidArgument("atom index " + std::to_string(j) + " out of range");
      member[l][j] = true;
    }
  }
  // Scan product atoms in flat order and keep those inside the rectangle.
  CompensatedSum s;
  std::vector<std::size_t> idx(sets.size(), 0);
  for (std::size_t flat = 0; flat < masses_.size(); ++flat) {
    bool inside = true;
    for (std::size_t l = 0; l < idx.size() && inside; ++l) inside = member[l][idx[l]];
    if (inside) s.add(masses_[flat]);
    for (std::size_t l = idx.size(); l > 0; --l) {
      if (++idx[l - 1] < factor_atoms_) break;
      idx[l - 1] = 0;
    }
  }
  return s.value();
}

ProductMeasure product_measure(const PolyMeasure& gamma) {
  return ProductMeasure(gamma.order(), gamma.atom_count(),
                        std::vector<double>(gamma.entries().begin(), gamma.entries().end()));
}

DiagonalCheck is_diagonal(const PolyMeasure& gamma, double tol) {
  if (!(tol >= 0.0)) throw InvalidArgument("diagonal tolerance must be nonnegative");
  const std::size_t k = gamma.atom_count();
  std::size_t diag_step = 0;
  for (int l = 0; l < gamma.order(); ++l) diag_step = diag_step * k + 1;
  const auto e = gamma.entries();
  DiagonalCheck out{true, std::nullopt, 0.0};
  double worst = tol;
  std::size_t worst_flat = 0;
  for (std::size_t flat = 0; flat < e.size(); ++flat) {
    if (flat % diag_step == 0) continue;
    if (std::abs(e[flat]) > worst) {
      worst = std::abs(e[flat]);
      worst_flat = flat;
      out.diagonal = false;
    }
  }
  if (!out.diagonal) {
    out.witness = gamma.multi_index(worst_flat);
    out.witness_entry = e[worst_flat];
  }
  return out;
}

std::vector<double> diagonal_measure(const PolyMeasure& gamma, double tol) {
  const auto check = is_diagonal(gamma, tol);
  if (!check.diagonal) {
    std::string where = "(";
    for (std::size_t i = 0; i < check.witness->size(); ++i) {
      where += (i ? "," : "") + std::to_string((*check.witness)[i]);
    }
    where += ")";
    throw NotDiagonal(*check.witness, check.witness_entry,
                      "polymeasure is not diagonal: off-diagonal entry at " + where);
  }
  const std::size_t k = gamma.atom_count();
  std::vector<double> mu(k);
  std::vector<std::size_t> idx(static_cast<std::size_t>(gamma.order()));
  for (std::size_t j = 0; j < k; ++j) {
    std::fill(idx.begin(), idx.end(), j);
    mu[j] = gamma.entry(idx);
  }
  return mu;
}

PolyMeasure coarsen(const PolyMeasure& gamma, std::span<const std::vector<std::size_t>> groups) {
  const auto& part = gamma.partition();
  constexpr auto unassigned = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> group_of(gamma.atom_count(), unassigned);
  std::vector<std::vector<std::size_t>> atoms(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t a : groups[g]) {
      if (a >= gamma.atom_count() || group_of[a] != unassigned) {
        throw InvalidArgument("coarsening groups must partition the atoms");
      }
      group_of[a] = g;
      atoms[g].insert(atoms[g].end(), part.atoms()[a].begin(), part.atoms()[a].end());
    }
  }
  for (std::size_t a = 0; a < group_of.size(); ++a) {
    if (group_of[a] == unassigned) throw InvalidArgument("coarsening leaves an atom ungrouped");
  }
  FinitePartition coarse(part.node_count(), std::move(atoms), part.grid());
  std::vector<double> entries(checked_power(groups.size(), gamma.order()), 0.0);
  const auto e = gamma.entries();
  for (std::size_t flat = 0; flat < e.size(); ++flat) {
    std::size_t target = 0;
    for (std::size_t j : gamma.multi_index(flat)) target = target * groups.size() + group_of[j];
    entries[target] += e[flat];
  }
  return PolyMeasure(gamma.order(), std::move(coarse), std::move(entries));
}

}  // namespace starform
