#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace starform {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation's precondition (bad arity, size mismatch, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two radial functions were combined on different grids.
class GridMismatch : public InvalidArgument {
 public:
  GridMismatch() : InvalidArgument("radial functions live on different grids") {}
};

/// The rotated node set does not coincide with the grid.
class GridNotClosed : public Error {
 public:
  GridNotClosed(std::size_t node, const std::string& what)
      : Error(what), node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

/// A polymeasure has an off-diagonal entry above tolerance.
class NotDiagonal : public Error {
 public:
  NotDiagonal(std::vector<std::size_t> witness, double entry, const std::string& what)
      : Error(what), witness_(std::move(witness)), entry_(entry) {}
  const std::vector<std::size_t>& witness() const { return witness_; }
  double entry() const { return entry_; }

 private:
  std::vector<std::size_t> witness_;
  double entry_;
};

/// A sampled probe (additivity, homogeneity, orthogonal additivity, ...) failed.
class ProbeFailure : public Error {
 public:
  ProbeFailure(std::string property, std::vector<std::vector<double>> tuple,
               double violation, const std::string& what)
      : Error(what),
        property_(std::move(property)),
        tuple_(std::move(tuple)),
        violation_(violation) {}
  const std::string& property() const { return property_; }
  /// Grid values of the arguments that exposed the violation.
  const std::vector<std::vector<double>>& tuple() const { return tuple_; }
  double violation() const { return violation_; }

 private:
  std::string property_;
  std::vector<std::vector<double>> tuple_;
  double violation_;
};

/// A rotation set whose action on the grid nodes is not transitive.
class NotTransitive : public Error {
 public:
  NotTransitive(std::size_t orbit_size, const std::string& what)
      : Error(what), orbit_size_(orbit_size) {}
  std::size_t orbit_size() const { return orbit_size_; }

 private:
  std::size_t orbit_size_;
};

/// A node measure that is not invariant under a grid rotation.
class InvarianceViolation : public Error {
 public:
  InvarianceViolation(std::size_t node, double residual, const std::string& what)
      : Error(what), node_(node), residual_(residual) {}
  std::size_t node() const { return node_; }
  double residual() const { return residual_; }

 private:
  std::size_t node_;
  double residual_;
};

}  // namespace starform
