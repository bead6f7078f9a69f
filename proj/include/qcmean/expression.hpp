#pragma once

#include <memory>
#include <string>

#include "qcmean/geometry.hpp"

namespace qcmean {

/// Small arithmetic expression over point coordinates: variables x1..xn and r
/// (the distance from the origin), constants pi and e, operators + - * / ^,
/// and the functions abs, sqrt, exp, log, sin, cos, pow, min, max.
class Expression {
 public:
  struct Node;

  static Expression parse(const std::string& text, int dim);

  double eval(const Point& x) const;
  /// Evaluation with r bound directly; rejects expressions using coordinates.
  double eval_radial(double r) const;

  bool uses_coordinates() const;
  const std::string& text() const { return text_; }

 private:
  Expression() = default;
  std::shared_ptr<const Node> root_;
  std::string text_;
  int dim_ = 2;
};

}  // namespace qcmean
