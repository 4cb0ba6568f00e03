#pragma once

// Arithmetic expressions in x and y: + - * / ^ (right-associative), unary
// minus, parentheses, numeric literals, pi, and exp/sin/cos/log.

#include "cdii/grid.hpp"

#include <memory>
#include <string>

namespace cdii {

class Expr {
  public:
    // Throws InvalidInput with the offending position on parse failure.
    static Expr parse(const std::string& text);

    double eval(double x, double y) const;

    // Evaluate at every node; throws InvalidInput if any value is non-finite.
    ScalarField sample(const Grid2D& g) const;

    const std::string& text() const { return src_; }

    struct Node; // defined in the implementation file

  private:
    std::shared_ptr<const Node> root_;
    std::string src_;
};

} // namespace cdii
