#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qdyn/dynamics.hpp"

namespace qdyn {

// Tri-state membership.  UNCERTAIN means the query point is within the
// region's margin band of the represented boundary.
enum class membership : int { outside = -1, uncertain = 0, inside = 1 };

membership tri_not(membership a);
membership tri_and(membership a, membership b);
membership tri_or(membership a, membership b);

// Constructive region algebra over the dynamical plane.  Immutable value
// type; copies share nodes.  Margin bands default to 1e-9 of the local
// diameter scale.
class Region {
 public:
  Region();  // empty

  static Region empty();
  static Region whole_plane();
  static Region disk(cplx center, double radius);
  // Contains z iff base contains z / factor.  factor is real, may be negative
  // (lambda < 0 throughout), never zero.
  static Region scaled(double factor, Region base);
  // The component of f^{-p}(D_rho) containing 0, identified by shadowing the
  // critical orbit: w = f(z) iterated p-1 steps must land in D_rho while each
  // intermediate f^i(w) stays within track_factor * |f^{i+1}(0)| of the
  // shadowed critical orbit point.
  static Region tracked_pullback(const UnimodalQuadratic& f, int steps, double rho,
                                 double track_factor = 0.5);
  static Region complement(Region a);
  static Region difference(Region a, Region b);
  static Region intersect(Region a, Region b);
  static Region unite(Region a, Region b);

  membership contains(cplx z) const;
  bool is_empty_region() const;

  const std::string& label() const { return label_; }
  Region labeled(std::string name) const;

 private:
  struct Node;
  std::shared_ptr<const Node> node_;
  std::string label_;
  explicit Region(std::shared_ptr<const Node> n);
};

inline bool decided(membership m) { return m != membership::uncertain; }

}  // namespace qdyn
