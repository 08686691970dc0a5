#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature could not reach the requested tolerance; usually means the
/// geometry is under-resolved.
class NonConvergent : public Error {
 public:
  NonConvergent(const std::string& what, std::size_t node)
      : Error(what + " (node " + std::to_string(node) + ")"), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// The curve is not a graph over its tangent line inside the near-field
/// cylinder; the cylinder radius has to shrink.
class CylinderTooLarge : public Error {
 public:
  CylinderTooLarge(const std::string& what, double radius)
      : Error(what + " (cylinder radius " + std::to_string(radius) + ")"), radius_(radius) {}
  double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

class StepFailure : public Error {
 public:
  StepFailure(const std::string& quantity, std::size_t node, double value)
      : Error("step rejected: " + quantity + " = " + std::to_string(value) + " at node " +
              std::to_string(node)),
        quantity_(quantity),
        node_(node),
        value_(value) {}
  const std::string& quantity() const noexcept { return quantity_; }
  std::size_t node() const noexcept { return node_; }
  double value() const noexcept { return value_; }

 private:
  std::string quantity_;
  std::size_t node_;
  double value_;
};

class MissingField : public Error {
 public:
  using Error::Error;
};

}  // namespace fracflow
