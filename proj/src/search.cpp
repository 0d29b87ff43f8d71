#include "search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <limits>
#include <mutex>
#include <numeric>
#include <queue>
#include <thread>

#include "ssm/error.hpp"

namespace ssm::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kLeafSpan = 8;
constexpr std::size_t kMaxBoundNodes = 1024;

// Safety gap used wherever a floating-point bound decides what to skip.
double guard(double x) { return 1e-9 * std::max(1.0, std::abs(x)); }

struct Entry {
  double d;
  std::uint32_t idx;
};

struct Cell {
  double bound;
  int level;
  std::size_t j;
};

struct Segment {
  std::size_t begin;
  std::size_t end;
  double d_min;
  double d_max;
  Mass mass;
  bool cross;
  double bound;
};

struct Scratch {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> key;
  std::vector<std::uint32_t> order;
  std::vector<double> prefix;
  std::vector<Entry> entries;
  std::vector<Entry> binned;
  std::vector<std::uint32_t> bin_of;
  std::vector<std::size_t> bin_count;
  std::vector<std::size_t> bin_start;
  std::vector<Segment> segments;
  std::vector<Mass> seg_prefix;
  std::vector<std::size_t> seg_order;
  std::vector<std::pair<int, std::size_t>> stack;
  std::vector<Witness> found;
};

class Engine {
 public:
  Engine(const PointCloud& cloud, const CylinderTree& tree, const SearchSpec& spec)
      : cloud_(cloud),
        tree_(tree),
        spec_(spec),
        k_(tree.depth()),
        m_(tree.alphabet()),
        maximize_(spec.objective == Objective::Maximize) {
    extreme_ = maximize_ ? -kInf : kInf;
    best_value_.store(extreme_);
    bound_level_ = 0;
    while (bound_level_ < k_ && tree.count(bound_level_ + 1) <= kMaxBoundNodes) ++bound_level_;
    min_weight_ = kInf;
    for (double w : cloud.weights) min_weight_ = std::min(min_weight_, w);
    if (cloud.size() >= std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::CapacityExceeded, "cloud too large for the search index");
    }
  }

  Witness run() {
    pq_.push({maximize_ ? kInf : -kInf, 0, 0});
    const unsigned n = std::max(1u, spec_.threads);
    if (n == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < n; ++t) pool.emplace_back([this] { worker(); });
      for (auto& th : pool) th.join();
    }
    if (error_) std::rethrow_exception(error_);
    Witness out;
    for (const auto& w : pool_) {
      if (!in_band(w.value, extreme_, spec_.near_tol, spec_.objective)) continue;
      if (!out.found || key_less(w, out)) out = w;
    }
    return out;
  }

 private:
  struct CellOrder {
    bool maximize;
    bool operator()(const Cell& a, const Cell& b) const {
      if (a.bound != b.bound) return maximize ? a.bound < b.bound : a.bound > b.bound;
      if (a.level != b.level) return a.level < b.level;
      return a.j > b.j;
    }
  };

  bool strictly_worse(double v, double extreme) const {
    return !in_band(v, extreme, spec_.near_tol, spec_.objective);
  }

  // Only bounds outside the near-tie band may be skipped.
  bool prunable(double bound) const {
    return strictly_worse(bound, best_value_.load(std::memory_order_relaxed));
  }

  bool improves(double v, double extreme) const { return maximize_ ? v > extreme : v < extreme; }

  void worker() {
    Scratch sc;
    std::vector<Cell> children;
    std::unique_lock<std::mutex> lock(mu_);
    while (true) {
      cv_.wait(lock, [&] { return !pq_.empty() || active_ == 0 || error_; });
      if (error_ || (pq_.empty() && active_ == 0)) break;
      const Cell cell = pq_.top();
      pq_.pop();
      ++active_;
      lock.unlock();
      children.clear();
      try {
        process(cell, sc, children);
      } catch (...) {
        lock.lock();
        if (!error_) error_ = std::current_exception();
        --active_;
        cv_.notify_all();
        break;
      }
      lock.lock();
      for (const auto& c : children) pq_.push(c);
      --active_;
      cv_.notify_all();
    }
    cv_.notify_all();
  }

  void process(const Cell& cell, Scratch& sc, std::vector<Cell>& out) {
    if (prunable(cell.bound)) return;
    if (cell.level == k_) {
      evaluate_center(cell.j, sc);
      return;
    }
    for (std::size_t c = 0; c < m_; ++c) {
      const std::size_t j = cell.j * m_ + c;
      const double b = cell_bound(cell.level + 1, j, sc);
      if (!prunable(b)) out.push_back({b, cell.level + 1, j});
    }
  }

  int first_letter_of(int level, std::size_t j) const {
    return static_cast<int>(j / tree_.count(level - 1));
  }

  // Bound on the objective over all centers in the cell (level, j).
  double cell_bound(int level, std::size_t j, Scratch& sc) const {
    const std::size_t nd = tree_.node(level, j);
    const double* z = tree_.center(nd);
    const double rc = tree_.radius(nd);
    const int bl = std::min(bound_level_, level + 2);
    const std::size_t g = tree_.count(bl);
    sc.lo.resize(g);
    sc.hi.resize(g);
    for (std::size_t b = 0; b < g; ++b) {
      const std::size_t bn = tree_.node(bl, b);
      const double* c = tree_.center(bn);
      double acc = 0.0;
      for (std::size_t d = 0; d < cloud_.dim; ++d) {
        const double diff = z[d] - c[d];
        acc += diff * diff;
      }
      const double dz = std::sqrt(acc);
      const double spread = tree_.radius(bn) + rc;
      sc.lo[b] = std::max(0.0, dz - spread);
      sc.hi[b] = dz + spread;
    }
    return maximize_ ? packing_bound(bl, g, sc) : centered_bound(level, j, bl, g, sc);
  }

  void sorted_prefix(int bl, std::size_t g, const std::vector<double>& by, Scratch& sc) const {
    sc.order.resize(g);
    std::iota(sc.order.begin(), sc.order.end(), 0u);
    std::sort(sc.order.begin(), sc.order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return by[a] < by[b]; });
    sc.key.resize(g);
    sc.prefix.resize(g + 1);
    sc.prefix[0] = 0.0;
    for (std::size_t t = 0; t < g; ++t) {
      sc.key[t] = by[sc.order[t]];
      sc.prefix[t + 1] = sc.prefix[t] + tree_.mass_value(tree_.node(bl, sc.order[t]));
    }
  }

  double packing_bound(int bl, std::size_t g, Scratch& sc) const {
    const double lo_w = spec_.window_lo;
    const double hi_w = spec_.window_hi;
    sorted_prefix(bl, g, sc.hi, sc);
    double ub = -kInf;
    for (std::size_t b = 0; b < g; ++b) {
      if (sc.lo[b] > hi_w || sc.hi[b] < lo_w) continue;
      const double t = std::max(sc.lo[b], lo_w);
      const auto below = std::lower_bound(sc.key.begin(), sc.key.end(), t) - sc.key.begin();
      const double mass = std::max(sc.prefix[below] * (1.0 - 1e-12), min_weight_ * (1.0 - 1e-12));
      ub = std::max(ub, std::pow(2.0 * std::min(sc.hi[b], hi_w), spec_.s) / mass);
    }
    return ub == -kInf ? ub : ub * (1.0 + 1e-9);
  }

  double centered_bound(int level, std::size_t j, int bl, std::size_t g, Scratch& sc) const {
    const int fc = first_letter_of(level, j);
    double a0 = kInf;
    for (std::size_t b = 0; b < g; ++b) {
      if (first_letter_of(bl, b) != fc) a0 = std::min(a0, sc.lo[b]);
    }
    a0 = std::max(a0, spec_.cross_floor - guard(spec_.cross_floor));
    sorted_prefix(bl, g, sc.lo, sc);
    double lb = kInf;
    for (std::size_t b = 0; b < g; ++b) {
      if (sc.hi[b] < a0) continue;
      const double reach = sc.hi[b] + guard(sc.hi[b]);
      const auto within = std::upper_bound(sc.key.begin(), sc.key.end(), reach) - sc.key.begin();
      const double mass = sc.prefix[within] * (1.0 + 1e-12);
      lb = std::min(lb, std::pow(2.0 * std::max(sc.lo[b], a0), spec_.s) / mass);
    }
    return lb == kInf ? lb : lb * (1.0 - 1e-9);
  }

  struct ScanResult {
    Mass base;
    double max_base = -1.0;
    bool cross_below = false;
  };

  // Points with d < a go to the base mass, points with a <= d <= b are collected.
  void scan(std::size_t x, double a, double b, Scratch& sc, ScanResult& res) const {
    const double* px = cloud_.point(x);
    const int fx = cloud_.first_letters[x];
    const double a_node = a - guard(a);
    sc.entries.clear();
    auto visit_point = [&](std::size_t i) {
      const double d = distance(cloud_, x, i);
      if (d < a) {
        res.base += cloud_.masses[i];
        res.max_base = std::max(res.max_base, d);
        if (cloud_.first_letters[i] != fx) res.cross_below = true;
      } else if (d <= b) {
        sc.entries.push_back({d, static_cast<std::uint32_t>(i)});
      }
    };
    sc.stack.clear();
    sc.stack.emplace_back(0, 0);
    while (!sc.stack.empty()) {
      const auto [l, j] = sc.stack.back();
      sc.stack.pop_back();
      const std::size_t span = tree_.span(l);
      if (l == k_ || span <= kLeafSpan) {
        for (std::size_t i = j * span; i < (j + 1) * span; ++i) visit_point(i);
        continue;
      }
      const std::size_t nd = tree_.node(l, j);
      const double* c = tree_.center(nd);
      double acc = 0.0;
      for (std::size_t d = 0; d < cloud_.dim; ++d) {
        const double diff = px[d] - c[d];
        acc += diff * diff;
      }
      const double dz = std::sqrt(acc);
      const double rad = tree_.radius(nd);
      if (dz + rad < a_node) {
        res.base += tree_.mass(nd);
        if (l == 0 || first_letter_of(l, j) != fx) res.cross_below = true;
        continue;
      }
      if (dz - rad > b) continue;
      for (std::size_t ch = m_; ch-- > 0;) sc.stack.emplace_back(l + 1, j * m_ + ch);
    }
  }

  void build_segments(std::size_t x, Scratch& sc) const {
    const int fx = cloud_.first_letters[x];
    const std::size_t ne = sc.entries.size();
    double d_min = kInf;
    double d_max = -kInf;
    for (const auto& e : sc.entries) {
      d_min = std::min(d_min, e.d);
      d_max = std::max(d_max, e.d);
    }
    std::size_t nb = std::clamp<std::size_t>(ne / 16, 1, 8192);
    const double width = (d_max - d_min) / static_cast<double>(nb);
    if (!(width > 0.0)) nb = 1;
    sc.bin_count.assign(nb, 0);
    sc.bin_of.resize(ne);
    for (std::size_t t = 0; t < ne; ++t) {
      std::size_t bin = 0;
      if (nb > 1) {
        bin = std::min(nb - 1, static_cast<std::size_t>((sc.entries[t].d - d_min) / width));
      }
      sc.bin_of[t] = static_cast<std::uint32_t>(bin);
      ++sc.bin_count[bin];
    }
    sc.bin_start.resize(nb + 1);
    sc.bin_start[0] = 0;
    for (std::size_t bin = 0; bin < nb; ++bin) sc.bin_start[bin + 1] = sc.bin_start[bin] + sc.bin_count[bin];
    sc.binned.resize(ne);
    {
      std::vector<std::size_t>& fill = sc.bin_count;
      for (std::size_t bin = 0; bin < nb; ++bin) fill[bin] = sc.bin_start[bin];
      for (std::size_t t = 0; t < ne; ++t) sc.binned[fill[sc.bin_of[t]]++] = sc.entries[t];
    }
    sc.segments.clear();
    for (std::size_t bin = 0; bin < nb; ++bin) {
      const std::size_t begin = sc.bin_start[bin];
      const std::size_t end = sc.bin_start[bin + 1];
      if (begin == end) continue;
      double lo = kInf;
      double hi = -kInf;
      Mass mass;
      bool cross = false;
      for (std::size_t t = begin; t < end; ++t) {
        const auto& e = sc.binned[t];
        lo = std::min(lo, e.d);
        hi = std::max(hi, e.d);
        mass += cloud_.masses[e.idx];
        if (cloud_.first_letters[e.idx] != fx) cross = true;
      }
      if (!sc.segments.empty() && ties_with(sc.segments.back().d_max, lo, spec_.tie_tol)) {
        auto& seg = sc.segments.back();
        seg.end = end;
        seg.d_max = hi;
        seg.mass += mass;
        seg.cross = seg.cross || cross;
      } else {
        sc.segments.push_back({begin, end, lo, hi, mass, cross, 0.0});
      }
    }
  }

  void evaluate_center(std::size_t x, Scratch& sc) {
    const double s = spec_.s;
    double a;
    double b;
    if (maximize_) {
      a = spec_.window_lo - guard(spec_.window_lo);
      b = spec_.window_hi + guard(spec_.window_hi);
    } else {
      a = spec_.cross_floor - guard(spec_.cross_floor);
      const double best = best_value_.load();
      b = kInf;
      if (std::isfinite(best)) {
        const double cut = std::pow(best * (1.0 + 1e-9 + spec_.near_tol), 1.0 / s) / 2.0;
        b = cut + guard(cut);
      }
    }
    bool full = !(a > 0.0);
    ScanResult res;
    while (true) {
      res = ScanResult{};
      scan(x, full ? -1.0 : a, b, sc, res);
      if (!full) {
        double first = kInf;
        for (const auto& e : sc.entries) first = std::min(first, e.d);
        const bool chained = res.max_base >= 0.0 && std::isfinite(first) &&
                             ties_with(res.max_base, first, spec_.tie_tol);
        if (chained || (!maximize_ && res.cross_below)) {
          full = true;
          continue;
        }
      }
      if (!maximize_ && std::isfinite(b)) {
        double last = -kInf;
        for (const auto& e : sc.entries) last = std::max(last, e.d);
        if (last > b - 2.0 * spec_.tie_tol * std::max(1.0, b)) {
          b = kInf;
          continue;
        }
      }
      break;
    }
    if (sc.entries.empty()) return;
    build_segments(x, sc);

    const std::size_t ns = sc.segments.size();
    sc.seg_prefix.resize(ns + 1);
    sc.seg_prefix[0] = res.base;
    for (std::size_t t = 0; t < ns; ++t) sc.seg_prefix[t + 1] = sc.seg_prefix[t] + sc.segments[t].mass;

    std::size_t first_admissible = ns;
    sc.seg_order.clear();
    if (maximize_) {
      for (std::size_t t = 0; t < ns; ++t) {
        auto& seg = sc.segments[t];
        if (seg.d_max < spec_.window_lo || seg.d_min > spec_.window_hi) continue;
        const double mass = sc.seg_prefix[t].to_double();
        seg.bound = std::pow(2.0 * std::min(seg.d_max, spec_.window_hi), s) / mass * (1.0 + 1e-9);
        sc.seg_order.push_back(t);
      }
      std::sort(sc.seg_order.begin(), sc.seg_order.end(), [&](std::size_t p, std::size_t q) {
        return sc.segments[p].bound > sc.segments[q].bound;
      });
    } else {
      for (std::size_t t = 0; t < ns; ++t) {
        if (sc.segments[t].cross) {
          first_admissible = t;
          break;
        }
      }
      if (first_admissible == ns) {
        if (!std::isfinite(b)) throw Error(ErrorCode::NoAdmissible, "no cross-cylinder partner");
        return;
      }
      for (std::size_t t = first_admissible; t < ns; ++t) {
        auto& seg = sc.segments[t];
        const double mass = sc.seg_prefix[t + 1].to_double();
        seg.bound = std::pow(2.0 * seg.d_min, s) / mass * (1.0 - 1e-9);
        sc.seg_order.push_back(t);
      }
      std::sort(sc.seg_order.begin(), sc.seg_order.end(), [&](std::size_t p, std::size_t q) {
        return sc.segments[p].bound < sc.segments[q].bound;
      });
    }

    sc.found.clear();
    double local_ext = maximize_ ? -kInf : kInf;
    for (std::size_t t : sc.seg_order) {
      const Segment& seg = sc.segments[t];
      if (strictly_worse(seg.bound, local_ext)) break;
      if (prunable(seg.bound)) break;
      auto first = sc.binned.begin() + static_cast<std::ptrdiff_t>(seg.begin);
      auto last = sc.binned.begin() + static_cast<std::ptrdiff_t>(seg.end);
      std::sort(first, last, [](const Entry& p, const Entry& q) {
        if (p.d != q.d) return p.d < q.d;
        return p.idx < q.idx;
      });
      Mass acc = sc.seg_prefix[t];
      bool admissible = maximize_ || t > first_admissible;
      const int fx = cloud_.first_letters[x];
      std::size_t g = seg.begin;
      while (g < seg.end) {
        std::size_t h = g + 1;
        Mass group = cloud_.masses[sc.binned[g].idx];
        bool cross = cloud_.first_letters[sc.binned[g].idx] != fx;
        while (h < seg.end && ties_with(sc.binned[h - 1].d, sc.binned[h].d, spec_.tie_tol)) {
          group += cloud_.masses[sc.binned[h].idx];
          cross = cross || cloud_.first_letters[sc.binned[h].idx] != fx;
          ++h;
        }
        // Open balls stop short of the group; closed balls must reach its far end.
        std::size_t r = g;
        if (!maximize_) {
          r = h - 1;
          while (r > g && sc.binned[r - 1].d == sc.binned[h - 1].d) --r;
        }
        const Entry& rep = sc.binned[r];
        Witness cand;
        if (maximize_) {
          if (rep.d >= spec_.window_lo && rep.d <= spec_.window_hi) {
            cand.found = true;
            cand.mass = acc;
          }
          acc += group;
        } else {
          acc += group;
          admissible = admissible || cross;
          if (admissible) {
            cand.found = true;
            cand.mass = acc;
          }
        }
        if (cand.found) {
          cand.value = std::pow(2.0 * rep.d, s) / cand.mass.to_double();
          cand.center = x;
          cand.partner = rep.idx;
          cand.radius = rep.d;
          cand.center_key = cloud_.order_keys[x];
          cand.partner_key = rep.idx;
          if (improves(cand.value, local_ext)) local_ext = cand.value;
          if (!strictly_worse(cand.value, local_ext)) sc.found.push_back(cand);
        }
        g = h;
      }
    }
    if (!sc.found.empty()) offer(sc.found, local_ext);
  }

  void offer(const std::vector<Witness>& found, double local_ext) {
    std::lock_guard<std::mutex> lock(best_mu_);
    if (improves(local_ext, extreme_)) {
      extreme_ = local_ext;
      best_value_.store(extreme_);
      std::erase_if(pool_, [&](const Witness& w) { return strictly_worse(w.value, extreme_); });
    }
    for (const auto& w : found) {
      if (!strictly_worse(w.value, extreme_)) pool_.push_back(w);
    }
  }

  const PointCloud& cloud_;
  const CylinderTree& tree_;
  SearchSpec spec_;
  int k_;
  std::size_t m_;
  bool maximize_ = true;
  int bound_level_ = 0;
  double min_weight_ = 0.0;

  std::mutex mu_;
  std::condition_variable cv_;
  std::priority_queue<Cell, std::vector<Cell>, CellOrder> pq_{CellOrder{maximize_}};
  int active_ = 0;
  std::exception_ptr error_;

  std::mutex best_mu_;
  double extreme_ = 0.0;
  std::vector<Witness> pool_;
  std::atomic<double> best_value_{0.0};
};

}  // namespace

Witness run_search(const PointCloud& cloud, const CylinderTree& tree, const SearchSpec& spec) {
  Engine engine(cloud, tree, spec);
  return engine.run();
}

}  // namespace ssm::detail
