#include "ssm/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>

#include "ssm/error.hpp"

namespace ssm {

bool Similitude::is_scaled_identity() const {
  const std::size_t n = dim();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (orthogonal[i * n + j] != (i == j ? 1.0 : 0.0)) return false;
    }
  }
  return true;
}

void Similitude::apply(const double* x, double* out) const {
  const std::size_t n = dim();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += orthogonal[i * n + j] * x[j];
    out[i] = ratio * acc + translation[i];
  }
}

IFSystem build_system(std::vector<Similitude> maps, std::optional<KnownConstants> known) {
  if (maps.size() < 2) {
    throw Error(ErrorCode::DimensionMismatch, "a system needs at least two maps");
  }
  const std::size_t n = maps.front().translation.size();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "translation must be non-empty");
  for (std::size_t idx = 0; idx < maps.size(); ++idx) {
    auto& f = maps[idx];
    const std::string tag = "map " + std::to_string(idx + 1);
    if (f.translation.size() != n) {
      throw Error(ErrorCode::DimensionMismatch, tag + ": translation has wrong length");
    }
    if (!(f.ratio > 0.0 && f.ratio < 1.0)) {
      throw Error(ErrorCode::RatioOutOfRange, tag + ": ratio must lie in (0,1)");
    }
    if (f.orthogonal.empty()) {
      f.orthogonal.assign(n * n, 0.0);
      for (std::size_t i = 0; i < n; ++i) f.orthogonal[i * n + i] = 1.0;
    }
    if (f.orthogonal.size() != n * n) {
      throw Error(ErrorCode::DimensionMismatch, tag + ": matrix has wrong size");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
          acc += f.orthogonal[l * n + i] * f.orthogonal[l * n + j];
        }
        if (std::abs(acc - (i == j ? 1.0 : 0.0)) > 1e-12) {
          throw Error(ErrorCode::NotOrthogonal, tag + ": matrix is not orthogonal");
        }
      }
    }
  }
  IFSystem sys;
  sys.maps = std::move(maps);
  sys.ambient_dim = n;
  sys.known_constants = known;
  return sys;
}

namespace {

bool equal_ratios(const IFSystem& sys) {
  for (const auto& f : sys.maps) {
    if (f.ratio != sys.maps.front().ratio) return false;
  }
  return true;
}

double ratio_power_sum(const IFSystem& sys, double s) {
  double acc = 0.0;
  for (const auto& f : sys.maps) acc += std::pow(f.ratio, s);
  return acc;
}

}  // namespace

double similarity_dimension(const IFSystem& system) {
  if (equal_ratios(system)) {
    return std::log(static_cast<double>(system.size())) / -std::log(system.maps.front().ratio);
  }
  double lo = 0.0;
  double hi = static_cast<double>(system.ambient_dim) + 1.0;
  while (ratio_power_sum(system, hi) > 1.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ratio_power_sum(system, mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    double f = -1.0;
    double df = 0.0;
    for (const auto& m : system.maps) {
      const double p = std::pow(m.ratio, s);
      f += p;
      df += p * std::log(m.ratio);
    }
    if (df == 0.0) break;
    const double next = s - f / df;
    if (!(next > 0.0)) break;
    s = next;
  }
  return s;
}

std::vector<double> letter_weights(const IFSystem& system, double s) {
  std::vector<double> w(system.size());
  if (equal_ratios(system)) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(system.size()));
  } else {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(system.maps[i].ratio, s);
  }
  return w;
}

std::vector<double> fixed_point(const Similitude& f) {
  const std::size_t n = f.dim();
  // Solve (I - r O) x = t by Gaussian elimination with partial pivoting.
  std::vector<double> a(n * n);
  std::vector<double> b = f.translation;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i * n + j] = (i == j ? 1.0 : 0.0) - f.ratio * f.orthogonal[i * n + j];
    }
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::abs(a[row * n + col]) > std::abs(a[piv * n + col])) piv = row;
    }
    if (std::abs(a[piv * n + col]) < 1e-300) {
      throw Error(ErrorCode::SingularMap, "I - rO is singular");
    }
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[piv * n + j], a[col * n + j]);
      std::swap(b[piv], b[col]);
    }
    for (std::size_t row = col + 1; row < n; ++row) {
      const double fct = a[row * n + col] / a[col * n + col];
      if (fct == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a[row * n + j] -= fct * a[col * n + j];
      b[row] -= fct * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i * n + j] * x[j];
    x[i] = acc / a[i * n + i];
  }
  return x;
}

namespace {

// Affine map x -> scale * O x + t, the composition f_u for a code word u.
struct Composite {
  double scale = 1.0;
  std::vector<double> O;
  std::vector<double> t;
};

struct CylNode {
  Composite map;
  std::vector<double> center;
  double radius = 0.0;
  int depth = 0;
  int first = -1;
  bool leaf = false;
};

class CylinderPool {
 public:
  CylinderPool(const IFSystem& sys, int depth) : sys_(sys), n_(sys.ambient_dim), depth_(depth) {
    const std::size_t m = sys.size();
    fixed_.resize(m);
    for (std::size_t i = 0; i < m; ++i) fixed_[i] = ssm::fixed_point(sys.maps[i]);
    z_.assign(n_, 0.0);
    for (const auto& p : fixed_) {
      for (std::size_t d = 0; d < n_; ++d) z_[d] += p[d];
    }
    for (auto& v : z_) v /= static_cast<double>(m);
    rho0_ = 0.0;
    std::vector<double> fz(n_);
    for (const auto& f : sys.maps) {
      f.apply(z_.data(), fz.data());
      rho0_ = std::max(rho0_, dist(fz, z_) / (1.0 - f.ratio));
    }
    rho0_ = rho0_ * (1.0 + 1e-12) + 1e-300;
  }

  std::size_t root_child(std::size_t letter) {
    Composite id;
    id.O.assign(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) id.O[i * n_ + i] = 1.0;
    id.t.assign(n_, 0.0);
    return make(id, 0, letter, static_cast<int>(letter));
  }

  std::size_t child(std::size_t parent, std::size_t letter) {
    const CylNode& p = nodes_[parent];
    const Composite map = p.map;
    return make(map, p.depth, letter, p.first);
  }

  const CylNode& operator[](std::size_t i) const { return nodes_[i]; }
  std::size_t size() const { return nodes_.size(); }

  static double dist(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
      const double diff = a[d] - b[d];
      acc += diff * diff;
    }
    return std::sqrt(acc);
  }

 private:
  void apply(const Composite& c, const std::vector<double>& x, std::vector<double>& out) const {
    out.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n_; ++j) acc += c.O[i * n_ + j] * x[j];
      out[i] = c.scale * acc + c.t[i];
    }
  }

  std::size_t make(const Composite& parent, int parent_depth, std::size_t letter, int first) {
    const Similitude& f = sys_.maps[letter];
    CylNode node;
    node.depth = parent_depth + 1;
    node.first = first;
    node.map.scale = parent.scale * f.ratio;
    node.map.O.assign(n_ * n_, 0.0);
    node.map.t.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < n_; ++l) acc += parent.O[i * n_ + l] * f.orthogonal[l * n_ + j];
        node.map.O[i * n_ + j] = acc;
      }
      double acc = 0.0;
      for (std::size_t l = 0; l < n_; ++l) acc += parent.O[i * n_ + l] * f.translation[l];
      node.map.t[i] = parent.scale * acc + parent.t[i];
    }
    if (node.depth >= depth_) {
      node.leaf = true;
      apply(node.map, fixed_[letter], node.center);
      node.radius = 0.0;
    } else {
      apply(node.map, z_, node.center);
      node.radius = node.map.scale * rho0_;
    }
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
  }

  const IFSystem& sys_;
  std::size_t n_;
  int depth_;
  std::vector<std::vector<double>> fixed_;
  std::vector<double> z_;
  double rho0_ = 0.0;
  std::vector<CylNode> nodes_;
};

constexpr std::size_t kPairBudget = 3'000'000;

struct PairEntry {
  double key;
  std::size_t a;
  std::size_t b;
};

// Largest distance between two points of A_depth; nullopt if the budget runs out.
std::optional<double> farthest_pair(const IFSystem& sys, int depth) {
  CylinderPool pool(sys, depth);
  const std::size_t m = sys.size();
  auto cmp = [](const PairEntry& x, const PairEntry& y) { return x.key < y.key; };
  std::priority_queue<PairEntry, std::vector<PairEntry>, decltype(cmp)> heap(cmp);
  auto push = [&](std::size_t a, std::size_t b) {
    const double ub = CylinderPool::dist(pool[a].center, pool[b].center) + pool[a].radius +
                      pool[b].radius;
    heap.push({ub, a, b});
  };
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < m; ++i) roots.push_back(pool.root_child(i));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) push(roots[i], roots[j]);
  }
  std::size_t pops = 0;
  while (!heap.empty()) {
    const PairEntry top = heap.top();
    heap.pop();
    if (++pops > kPairBudget) return std::nullopt;
    const CylNode& a = pool[top.a];
    const CylNode& b = pool[top.b];
    if (a.leaf && b.leaf) return top.key;
    if (top.a == top.b) {
      std::vector<std::size_t> kids;
      for (std::size_t l = 0; l < m; ++l) kids.push_back(pool.child(top.a, l));
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) push(kids[i], kids[j]);
      }
      continue;
    }
    const bool split_a = !a.leaf && (b.leaf || a.radius >= b.radius);
    const std::size_t target = split_a ? top.a : top.b;
    const std::size_t other = split_a ? top.b : top.a;
    for (std::size_t l = 0; l < m; ++l) push(pool.child(target, l), other);
  }
  return std::nullopt;
}

// Smallest distance between A_depth points lying in different basic cylinders.
std::optional<double> nearest_cross_pair(const IFSystem& sys, int depth) {
  CylinderPool pool(sys, depth);
  const std::size_t m = sys.size();
  auto cmp = [](const PairEntry& x, const PairEntry& y) { return x.key > y.key; };
  std::priority_queue<PairEntry, std::vector<PairEntry>, decltype(cmp)> heap(cmp);
  auto push = [&](std::size_t a, std::size_t b) {
    const double lb = CylinderPool::dist(pool[a].center, pool[b].center) - pool[a].radius -
                      pool[b].radius;
    heap.push({std::max(lb, 0.0), a, b});
  };
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < m; ++i) roots.push_back(pool.root_child(i));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) push(roots[i], roots[j]);
  }
  std::size_t pops = 0;
  while (!heap.empty()) {
    const PairEntry top = heap.top();
    heap.pop();
    if (++pops > kPairBudget) return std::nullopt;
    const CylNode& a = pool[top.a];
    const CylNode& b = pool[top.b];
    if (a.leaf && b.leaf) return top.key;
    const bool split_a = !a.leaf && (b.leaf || a.radius >= b.radius);
    const std::size_t target = split_a ? top.a : top.b;
    const std::size_t other = split_a ? top.b : top.a;
    for (std::size_t l = 0; l < m; ++l) push(pool.child(target, l), other);
  }
  return std::nullopt;
}

double max_ratio(const IFSystem& sys) {
  double r = 0.0;
  for (const auto& f : sys.maps) r = std::max(r, f.ratio);
  return r;
}

}  // namespace

Bracket diameter(const IFSystem& system, int k_probe, double tol) {
  if (system.known_constants) {
    return {system.known_constants->R_exact, system.known_constants->R_exact};
  }
  const double r = max_ratio(system);
  Bracket best{0.0, std::numeric_limits<double>::infinity()};
  for (int k = 1; k <= std::max(k_probe, 1); ++k) {
    const auto d = farthest_pair(system, k);
    if (!d) break;
    best.lo = std::max(best.lo, *d);
    const double shrink = 1.0 - 2.0 * std::pow(r, k);
    if (shrink > 0.0) best.hi = std::min(best.hi, best.lo / shrink);
    if (best.hi - best.lo <= tol) break;
  }
  if (!std::isfinite(best.hi)) {
    throw Error(ErrorCode::TolNotReached, "diameter bracket did not close at the probe depth");
  }
  return best;
}

Bracket separation_gap(const IFSystem& system, int k_probe, double tol) {
  if (system.known_constants) {
    return {system.known_constants->c_exact, system.known_constants->c_exact};
  }
  if (similarity_dimension(system) > static_cast<double>(system.ambient_dim) + 1e-12) {
    throw Error(ErrorCode::NotSeparated, "dimension exceeds the ambient dimension");
  }
  const double R_hi = diameter(system, k_probe, tol).hi;
  const double r = max_ratio(system);
  Bracket best{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (int k = 1; k <= std::max(k_probe, 1); ++k) {
    const auto d = nearest_cross_pair(system, k);
    if (!d) break;
    best.hi = std::min(best.hi, *d);
    if (best.hi <= 0.0) {
      throw Error(ErrorCode::NotSeparated, "basic cylinders intersect");
    }
    best.lo = std::max(best.lo, best.hi - 2.0 * R_hi * std::pow(r, k));
    if (best.lo > 0.0 && best.hi - best.lo <= tol) break;
  }
  if (!(best.lo > 0.0)) {
    throw Error(ErrorCode::NotSeparated, "separation gap not certified positive at the probe depth");
  }
  return best;
}

DerivedConstants derive_constants(const IFSystem& system, int k_probe, double tol) {
  DerivedConstants dc;
  dc.s = similarity_dimension(system);
  dc.r_min = 1.0;
  dc.r_max = 0.0;
  for (const auto& f : system.maps) {
    dc.r_min = std::min(dc.r_min, f.ratio);
    dc.r_max = std::max(dc.r_max, f.ratio);
  }
  const Bracket R = diameter(system, k_probe, tol);
  const Bracket c = separation_gap(system, k_probe, tol);
  dc.c_lo = c.lo;
  dc.c_hi = c.hi;
  dc.R_lo = R.lo;
  dc.R_hi = R.hi;
  return dc;
}

bool window_feasible(const DerivedConstants& dc, int k) {
  const double rk = std::pow(dc.r_max, k);
  const double rk1 = std::pow(dc.r_max, k + 1);
  return dc.c_lo - 3.0 * dc.R_hi * rk - 2.0 * dc.R_hi * rk1 > 0.0;
}

bool window_feasible(const IFSystem& system, int k) {
  return window_feasible(derive_constants(system), k);
}

namespace {

void check_family_ratio(double r) {
  if (!(r > 0.0 && r < 0.5)) {
    throw Error(ErrorCode::RatioOutOfRange, "family ratio must lie in (0, 1/2)");
  }
}

Similitude scaled_shift(double r, std::vector<double> t) {
  Similitude f;
  f.ratio = r;
  f.translation = std::move(t);
  return f;
}

}  // namespace

IFSystem cantor_system(double r) {
  check_family_ratio(r);
  return build_system({scaled_shift(r, {0.0}), scaled_shift(r, {1.0 - r})},
                      KnownConstants{1.0 - 2.0 * r, 1.0});
}

IFSystem sierpinski_system(double r) {
  check_family_ratio(r);
  const double h = std::sqrt(3.0) / 2.0;
  return build_system({scaled_shift(r, {0.0, 0.0}), scaled_shift(r, {1.0 - r, 0.0}),
                       scaled_shift(r, {(1.0 - r) * 0.5, (1.0 - r) * h})},
                      KnownConstants{1.0 - 2.0 * r, 1.0});
}

IFSystem planar_cantor_system(double r) {
  check_family_ratio(r);
  const double t = 1.0 - r;
  return build_system({scaled_shift(r, {0.0, 0.0}), scaled_shift(r, {t, 0.0}),
                       scaled_shift(r, {t, t}), scaled_shift(r, {0.0, t})},
                      KnownConstants{1.0 - 2.0 * r, std::sqrt(2.0)});
}

IFSystem family_system(Family family, double r) {
  switch (family) {
    case Family::Cantor: return cantor_system(r);
    case Family::Sierpinski: return sierpinski_system(r);
    case Family::Planar: return planar_cantor_system(r);
  }
  return cantor_system(r);
}

const char* family_name(Family family) {
  switch (family) {
    case Family::Cantor: return "cantor";
    case Family::Sierpinski: return "sierpinski";
    case Family::Planar: return "planar";
  }
  return "?";
}

std::optional<Family> parse_family(const std::string& name) {
  if (name == "cantor" || name == "C") return Family::Cantor;
  if (name == "sierpinski" || name == "S") return Family::Sierpinski;
  if (name == "planar" || name == "K") return Family::Planar;
  return std::nullopt;
}

IFSystem without_known(IFSystem system) {
  system.known_constants.reset();
  return system;
}

}  // namespace ssm
