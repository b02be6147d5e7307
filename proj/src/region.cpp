#include "qdyn/region.hpp"

#include <cmath>
#include <variant>

namespace qdyn {

membership tri_not(membership a) { return static_cast<membership>(-static_cast<int>(a)); }

membership tri_and(membership a, membership b) {
  int x = static_cast<int>(a), y = static_cast<int>(b);
  return static_cast<membership>(std::min(x, y));
}

membership tri_or(membership a, membership b) {
  int x = static_cast<int>(a), y = static_cast<int>(b);
  return static_cast<membership>(std::max(x, y));
}

namespace {

constexpr double kMarginScale = 1e-9;  // margin = kMarginScale * diameter

struct EmptyNode {};
struct PlaneNode {};
struct DiskNode {
  cplx center;
  double radius;
  double eta;  // absolute margin band
};
struct ScaledNode {
  double factor;
  Region base;
};
struct PullbackNode {
  UnimodalQuadratic f;
  int steps;
  double rho;
  double track_factor;
  std::vector<cplx> shadow;      // f(0), f^2(0), ..., f^{p-1}(0)
  std::vector<double> tube_eta;  // margin per tube constraint
  double land_eta;
};
struct ComplementNode {
  Region a;
};
struct DiffNode {
  Region a, b;
};
struct InterNode {
  Region a, b;
};
struct UnionNode {
  Region a, b;
};

using NodeVariant = std::variant<EmptyNode, PlaneNode, DiskNode, ScaledNode, PullbackNode,
                                 ComplementNode, DiffNode, InterNode, UnionNode>;

membership band_classify(double slack, double eta) {
  if (slack > eta) return membership::inside;
  if (slack < -eta) return membership::outside;
  return membership::uncertain;
}

}  // namespace

struct Region::Node {
  NodeVariant v;
};

Region::Region() : node_(std::make_shared<Node>(Node{EmptyNode{}})) {}
Region::Region(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

Region Region::empty() { return Region(std::make_shared<Node>(Node{EmptyNode{}})).labeled("empty"); }

Region Region::whole_plane() {
  return Region(std::make_shared<Node>(Node{PlaneNode{}})).labeled("plane");
}

Region Region::disk(cplx center, double radius) {
  if (!(radius > 0) || !std::isfinite(radius) || !std::isfinite(center.real()) ||
      !std::isfinite(center.imag()))
    fail(errc::config, "disk: radius must be finite and positive");
  return Region(std::make_shared<Node>(Node{DiskNode{center, radius, kMarginScale * 2.0 * radius}}));
}

Region Region::scaled(double factor, Region base) {
  if (factor == 0.0 || !std::isfinite(factor)) fail(errc::config, "scaled: factor must be nonzero");
  return Region(std::make_shared<Node>(Node{ScaledNode{factor, std::move(base)}}));
}

Region Region::tracked_pullback(const UnimodalQuadratic& f, int steps, double rho,
                                double track_factor) {
  if (steps < 2) fail(errc::config, "tracked_pullback: need steps >= 2");
  if (!(rho > 0) || !(track_factor > 0))
    fail(errc::config, "tracked_pullback: rho and track_factor must be positive");
  PullbackNode n{f, steps, rho, track_factor, {}, {}, kMarginScale * 2.0 * rho};
  cplx o = 0.0;
  for (int i = 1; i < steps; ++i) {
    o = f(o);
    n.shadow.push_back(o);
    n.tube_eta.push_back(kMarginScale * 2.0 * track_factor * std::abs(o));
  }
  return Region(std::make_shared<Node>(Node{std::move(n)}));
}

Region Region::complement(Region a) {
  return Region(std::make_shared<Node>(Node{ComplementNode{std::move(a)}}));
}

Region Region::difference(Region a, Region b) {
  return Region(std::make_shared<Node>(Node{DiffNode{std::move(a), std::move(b)}}));
}

Region Region::intersect(Region a, Region b) {
  return Region(std::make_shared<Node>(Node{InterNode{std::move(a), std::move(b)}}));
}

Region Region::unite(Region a, Region b) {
  return Region(std::make_shared<Node>(Node{UnionNode{std::move(a), std::move(b)}}));
}

Region Region::labeled(std::string name) const {
  Region r(node_);
  r.label_ = std::move(name);
  return r;
}

bool Region::is_empty_region() const { return std::holds_alternative<EmptyNode>(node_->v); }

membership Region::contains(cplx z) const {
  const NodeVariant& v = node_->v;
  switch (v.index()) {
    case 0:  // empty
      return membership::outside;
    case 1:  // plane
      return membership::inside;
    case 2: {
      const auto& d = std::get<DiskNode>(v);
      return band_classify(d.radius - std::abs(z - d.center), d.eta);
    }
    case 3: {
      const auto& s = std::get<ScaledNode>(v);
      return s.base.contains(z / s.factor);
    }
    case 4: {
      const auto& p = std::get<PullbackNode>(v);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return membership::outside;
      membership worst = membership::inside;
      cplx w = p.f(z);
      for (std::size_t i = 0; i < p.shadow.size(); ++i) {
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return membership::outside;
        const cplx& o = p.shadow[i];
        double slack = p.track_factor * std::abs(o) - std::abs(w - o);
        membership m = band_classify(slack, p.tube_eta[i]);
        if (m == membership::outside) return membership::outside;
        worst = tri_and(worst, m);
        w = p.f(w);
      }
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return membership::outside;
      membership land = band_classify(p.rho - std::abs(w), p.land_eta);
      return tri_and(worst, land);
    }
    case 5:
      return tri_not(std::get<ComplementNode>(v).a.contains(z));
    case 6: {
      const auto& d = std::get<DiffNode>(v);
      membership ma = d.a.contains(z);
      if (ma == membership::outside) return membership::outside;
      return tri_and(ma, tri_not(d.b.contains(z)));
    }
    case 7: {
      const auto& n = std::get<InterNode>(v);
      membership ma = n.a.contains(z);
      if (ma == membership::outside) return membership::outside;
      return tri_and(ma, n.b.contains(z));
    }
    case 8: {
      const auto& n = std::get<UnionNode>(v);
      membership ma = n.a.contains(z);
      if (ma == membership::inside) return membership::inside;
      return tri_or(ma, n.b.contains(z));
    }
  }
  return membership::outside;
}

}  // namespace qdyn
