#include "stokern/width.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace stokern {

namespace {

constexpr double kPi = std::numbers::pi;

struct CanonicalLess {
  // Descending projection with the global tie rule.
  const std::vector<double>* coords;
  int dim;
  const std::vector<double>* proj;
  bool operator()(int a, int b) const {
    std::span<const double> pa{coords->data() + static_cast<std::size_t>(a) * dim, static_cast<std::size_t>(dim)};
    std::span<const double> pb{coords->data() + static_cast<std::size_t>(b) * dim, static_cast<std::size_t>(dim)};
    return canonical_before(pa, (*proj)[a], a, pb, (*proj)[b], b);
  }
};

std::vector<int> descending_order(const std::vector<double>& coords, int dim,
                                  const std::vector<double>& proj) {
  std::vector<int> ord(proj.size());
  std::iota(ord.begin(), ord.end(), 0);
  std::sort(ord.begin(), ord.end(), CanonicalLess{&coords, dim, &proj});
  return ord;
}

}  // namespace

ExpectedSupport expected_support(const ExistentialSet& set, std::span<const double> u) {
  const int n = set.size();
  const int d = set.dimension();
  std::vector<double> proj(n);
  for (int i = 0; i < n; ++i) proj[i] = dot(set.point(i), u);
  std::vector<int> ord = descending_order(set.coords(), d, proj);
  ExpectedSupport out;
  out.gradient.assign(d, 0.0);
  double survive = 1.0;
  for (int k = 0; k < n; ++k) {
    int i = ord[k];
    double prr = set.prob(i) * survive;
    out.f += prr * proj[i];
    auto p = set.point(i);
    for (int c = 0; c < d; ++c) out.gradient[c] += prr * p[c];
    survive *= 1.0 - set.prob(i);
  }
  return out;
}

ExpectedSupport expected_support_presorted(const ExistentialSet& set, std::span<const double> u,
                                           std::span<const int> order) {
  const int n = set.size();
  const int d = set.dimension();
  ExpectedSupport out;
  out.gradient.assign(d, 0.0);
  double survive = 1.0;
  for (int k = n - 1; k >= 0; --k) {
    int i = order[k];
    double prr = set.prob(i) * survive;
    double proj = dot(set.point(i), u);
    out.f += prr * proj;
    auto p = set.point(i);
    for (int c = 0; c < d; ++c) out.gradient[c] += prr * p[c];
    survive *= 1.0 - set.prob(i);
  }
  return out;
}

namespace {

// Flattened locational view: all locations with owner ids.
struct FlatLocations {
  int dim = 0;
  int owners = 0;
  std::vector<double> coords;  // m x d
  std::vector<double> p;
  std::vector<int> owner;
  int size() const { return static_cast<int>(p.size()); }
  std::span<const double> point(int i) const {
    return {coords.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
  }
};

FlatLocations flatten(const LocationalSet& set) {
  FlatLocations fl;
  fl.dim = set.dimension();
  fl.owners = set.size();
  for (int v = 0; v < set.size(); ++v) {
    const auto& pt = set.point(v);
    for (int s = 0; s < pt.locations(); ++s) {
      fl.coords.insert(fl.coords.end(), pt.coords.begin() + static_cast<std::size_t>(s) * fl.dim,
                       pt.coords.begin() + static_cast<std::size_t>(s + 1) * fl.dim);
      fl.p.push_back(pt.probs[s]);
      fl.owner.push_back(v);
    }
  }
  return fl;
}

}  // namespace

ExpectedSupport expected_support(const LocationalSet& set, std::span<const double> u) {
  FlatLocations fl = flatten(set);
  const int m = fl.size();
  const int d = fl.dim;
  std::vector<double> proj(m);
  for (int i = 0; i < m; ++i) proj[i] = dot(fl.point(i), u);
  std::vector<int> ord = descending_order(fl.coords, d, proj);
  ExpectedSupport out;
  out.gradient.assign(d, 0.0);
  // Sweep from the top; A[v] = P(point v realizes nowhere above the sweep);
  // the product over v is kept as (nonzero part, zero count).
  std::vector<double> A(fl.owners, 1.0);
  double prodNZ = 1.0;
  int zc = 0;
  for (int k = 0; k < m; ++k) {
    int s = ord[k];
    int v = fl.owner[s];
    // Pr[this location is the realized maximum] = p_s * prod_{w != v} A[w].
    double prExcl = 0.0;
    if (zc == 0)
      prExcl = prodNZ / A[v];
    else if (zc == 1 && A[v] == 0.0)
      prExcl = prodNZ;
    double prr = fl.p[s] * prExcl;
    out.f += prr * proj[s];
    auto pnt = fl.point(s);
    for (int c = 0; c < d; ++c) out.gradient[c] += prr * pnt[c];
    // Location s now moves above the sweep line.
    double oldA = A[v];
    double newA = oldA - fl.p[s];
    if (newA < 1e-15) newA = std::max(newA, 0.0);
    if (oldA == 0.0)
      --zc;
    else
      prodNZ /= oldA;
    if (newA == 0.0)
      ++zc;
    else
      prodNZ *= newA;
    A[v] = newA;
  }
  return out;
}

ExpectedSupport expected_support(const Instance& inst, std::span<const double> u) {
  return inst.existential() ? expected_support(inst.as_existential(), u)
                            : expected_support(inst.as_locational(), u);
}

namespace {
Vec negated(std::span<const double> u) {
  Vec v(u.begin(), u.end());
  for (double& x : v) x = -x;
  return v;
}
}  // namespace

double expected_width(const ExistentialSet& set, std::span<const double> u) {
  return expected_support(set, u).f + expected_support(set, negated(u)).f;
}
double expected_width(const LocationalSet& set, std::span<const double> u) {
  return expected_support(set, u).f + expected_support(set, negated(u)).f;
}
double expected_width(const Instance& inst, std::span<const double> u) {
  return expected_support(inst, u).f + expected_support(inst, negated(u)).f;
}

double expected_width_presorted(const ExistentialSet& set, std::span<const double> u,
                                std::span<const int> order) {
  // Ascending order walked backwards gives f(u); walked forwards gives f(-u).
  const int n = set.size();
  double f = expected_support_presorted(set, u, order).f;
  Vec nu = negated(u);
  double survive = 1.0, fneg = 0.0;
  for (int k = 0; k < n; ++k) {
    int i = order[k];
    double prr = set.prob(i) * survive;
    fneg += prr * dot(set.point(i), nu);
    survive *= 1.0 - set.prob(i);
  }
  return f + fneg;
}

Vec extreme_vertex(const Instance& inst, std::span<const double> u) {
  return expected_support(inst, u).gradient;
}

std::vector<int> projection_order(const ExistentialSet& set, std::span<const double> u) {
  std::vector<double> proj(set.size());
  for (int i = 0; i < set.size(); ++i) proj[i] = dot(set.point(i), u);
  std::vector<int> ord = descending_order(set.coords(), set.dimension(), proj);
  std::reverse(ord.begin(), ord.end());
  return ord;
}

// --- angular structure --------------------------------------------------------

namespace {

struct CrossEvent {
  double beta;  // in (0, pi)
  int i, j;     // entity indices (points, or flattened locations)
};

// Angle in (0, pi) at which the projections of a and b coincide; nullopt for
// identical points or a crossing exactly at angle 0.
std::optional<double> crossing_angle(std::span<const double> a, std::span<const double> b) {
  double wx = a[0] - b[0], wy = a[1] - b[1];
  if (wx == 0.0 && wy == 0.0) return std::nullopt;
  double beta = std::atan2(-wx, wy);
  if (beta < 0) beta += kPi;
  if (beta >= kPi) beta -= kPi;
  if (beta <= 0.0) return std::nullopt;
  return beta;
}

// One sweep track: canonical state for directions sign*u(theta).
class ExistTrack {
 public:
  ExistTrack(const ExistentialSet& set, double sign) : set_(&set), sign_(sign) {
    ord_.resize(set.size());
    pos_.resize(set.size());
    prr_.resize(set.size());
  }

  void rebuild(double theta) {
    const int n = set_->size();
    std::vector<double> proj(n);
    for (int i = 0; i < n; ++i)
      proj[i] = sign_ * (set_->point(i)[0] * std::cos(theta) + set_->point(i)[1] * std::sin(theta));
    ord_ = descending_order(set_->coords(), 2, proj);
    for (int k = 0; k < n; ++k) pos_[ord_[k]] = k;
    double survive = 1.0;
    aSum_ = bSum_ = 0.0;
    for (int k = 0; k < n; ++k) {
      int i = ord_[k];
      prr_[i] = set_->prob(i) * survive;
      survive *= 1.0 - set_->prob(i);
      aSum_ += prr_[i] * set_->point(i)[0];
      bSum_ += prr_[i] * set_->point(i)[1];
    }
  }

  bool adjacent(int i, int j) const { return std::abs(pos_[i] - pos_[j]) == 1; }

  void swap_adjacent(int i, int j) {
    if (pos_[i] > pos_[j]) std::swap(i, j);  // i above j
    int k = pos_[i];
    double pi = set_->prob(i), pj = set_->prob(j);
    double prefix = prr_[i] / pi;
    double newPrrJ = pj * prefix;
    double newPrrI = pi * prefix * (1.0 - pj);
    aSum_ += (newPrrI - prr_[i]) * set_->point(i)[0] + (newPrrJ - prr_[j]) * set_->point(j)[0];
    bSum_ += (newPrrI - prr_[i]) * set_->point(i)[1] + (newPrrJ - prr_[j]) * set_->point(j)[1];
    prr_[i] = newPrrI;
    prr_[j] = newPrrJ;
    ord_[k] = j;
    ord_[k + 1] = i;
    pos_[j] = k;
    pos_[i] = k + 1;
  }

  double aSum() const { return aSum_; }
  double bSum() const { return bSum_; }

 private:
  const ExistentialSet* set_;
  double sign_;
  std::vector<int> ord_, pos_;
  std::vector<double> prr_;
  double aSum_ = 0.0, bSum_ = 0.0;
};

// Locational counterpart over flattened locations.
class LocTrack {
 public:
  LocTrack(const FlatLocations& fl, double sign) : fl_(&fl), sign_(sign) {
    const int m = fl.size();
    ord_.resize(m);
    pos_.resize(m);
    prr_.resize(m);
    peNZ_.resize(m);
    peZC_.resize(m);
    A_.assign(static_cast<std::size_t>(fl.owners) * m, 1.0);
  }

  double& A(int owner, int loc) { return A_[static_cast<std::size_t>(owner) * fl_->size() + loc]; }

  void rebuild(double theta) {
    const int m = fl_->size();
    std::vector<double> proj(m);
    for (int i = 0; i < m; ++i)
      proj[i] = sign_ * (fl_->point(i)[0] * std::cos(theta) + fl_->point(i)[1] * std::sin(theta));
    ord_ = descending_order(fl_->coords, 2, proj);
    for (int k = 0; k < m; ++k) pos_[ord_[k]] = k;
    std::vector<double> sumAbove(fl_->owners, 0.0);
    aSum_ = bSum_ = 0.0;
    double prodNZ = 1.0;
    int zc = 0;
    std::vector<double> curA(fl_->owners, 1.0);
    for (int k = 0; k < m; ++k) {
      int s = ord_[k];
      int v = fl_->owner[s];
      // A for every owner at this location (locations strictly above).
      for (int w = 0; w < fl_->owners; ++w) A(w, s) = curA[w];
      peNZ_[s] = prodNZ;
      peZC_[s] = zc;
      double prExcl = 0.0;
      if (zc == 0)
        prExcl = prodNZ / curA[v];
      else if (zc == 1 && curA[v] == 0.0)
        prExcl = prodNZ;
      prr_[s] = fl_->p[s] * prExcl;
      aSum_ += prr_[s] * fl_->point(s)[0];
      bSum_ += prr_[s] * fl_->point(s)[1];
      double oldA = curA[v];
      double newA = std::max(oldA - fl_->p[s], 0.0);
      if (oldA == 0.0)
        --zc;
      else
        prodNZ /= oldA;
      if (newA == 0.0)
        ++zc;
      else
        prodNZ *= newA;
      curA[v] = newA;
    }
  }

  bool adjacent(int i, int j) const { return std::abs(pos_[i] - pos_[j]) == 1; }

  void swap_adjacent(int s1, int s2) {
    if (pos_[s1] > pos_[s2]) std::swap(s1, s2);  // s1 above s2
    int k = pos_[s1];
    int v1 = fl_->owner[s1], v2 = fl_->owner[s2];
    // s2 moves above s1.
    update_factor(s1, v2, -fl_->p[s2]);
    update_factor(s2, v1, +fl_->p[s1]);
    set_prr(s1, v1);
    set_prr(s2, v2);
    ord_[k] = s2;
    ord_[k + 1] = s1;
    pos_[s2] = k;
    pos_[s1] = k + 1;
  }

  double aSum() const { return aSum_; }
  double bSum() const { return bSum_; }

 private:
  void update_factor(int loc, int owner, double deltaP) {
    double oldA = A(owner, loc);
    double newA = oldA + deltaP;
    if (newA < 1e-15) newA = std::max(newA, 0.0);
    if (oldA == 0.0)
      --peZC_[loc];
    else
      peNZ_[loc] /= oldA;
    if (newA == 0.0)
      ++peZC_[loc];
    else
      peNZ_[loc] *= newA;
    A(owner, loc) = newA;
  }

  void set_prr(int loc, int owner) {
    double av = A(owner, loc);
    double prExcl = 0.0;
    if (peZC_[loc] == 0)
      prExcl = peNZ_[loc] / av;
    else if (peZC_[loc] == 1 && av == 0.0)
      prExcl = peNZ_[loc];
    double np = fl_->p[loc] * prExcl;
    aSum_ += (np - prr_[loc]) * fl_->point(loc)[0];
    bSum_ += (np - prr_[loc]) * fl_->point(loc)[1];
    prr_[loc] = np;
  }

  const FlatLocations* fl_;
  double sign_;
  std::vector<int> ord_, pos_;
  std::vector<double> prr_;
  std::vector<double> peNZ_;  // nonzero part of Pr[nothing above]
  std::vector<int> peZC_;     // count of zero factors
  std::vector<double> A_;
  double aSum_ = 0.0, bSum_ = 0.0;
};

struct EventList {
  std::vector<double> breaks;               // distinct angles ascending
  std::vector<std::vector<std::pair<int, int>>> pairs;  // per break, (i<j) sorted
};

template <typename PointAt>
EventList collect_events(int count, PointAt&& at) {
  std::vector<CrossEvent> ev;
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) {
      auto beta = crossing_angle(at(i), at(j));
      if (beta) ev.push_back({*beta, i, j});
    }
  std::sort(ev.begin(), ev.end(), [](const CrossEvent& a, const CrossEvent& b) {
    if (a.beta != b.beta) return a.beta < b.beta;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  EventList out;
  for (std::size_t k = 0; k < ev.size();) {
    std::size_t e = k;
    while (e < ev.size() && ev[e].beta == ev[k].beta) ++e;
    out.breaks.push_back(ev[k].beta);
    out.pairs.emplace_back();
    for (std::size_t t = k; t < e; ++t) out.pairs.back().push_back({ev[t].i, ev[t].j});
    k = e;
  }
  return out;
}

// Drives both tracks through the event list, recording coefficients per
// interval. Track must provide rebuild/adjacent/swap_adjacent/aSum/bSum.
template <typename Track>
void sweep(Track& fwd, Track& rev, const EventList& ev, std::vector<double>& fwdA,
           std::vector<double>& fwdB, std::vector<double>& revA, std::vector<double>& revB) {
  const int h = static_cast<int>(ev.breaks.size());
  auto mid_of = [&](int interval) {
    double lo = interval == 0 ? 0.0 : ev.breaks[interval - 1];
    double hi = interval == h ? kPi : ev.breaks[interval];
    return 0.5 * (lo + hi);
  };
  fwd.rebuild(mid_of(0));
  rev.rebuild(mid_of(0));
  auto record = [&](int) {
    fwdA.push_back(fwd.aSum());
    fwdB.push_back(fwd.bSum());
    revA.push_back(rev.aSum());
    revB.push_back(rev.bSum());
  };
  record(0);
  long long processed = 0;
  for (int k = 0; k < h; ++k) {
    auto pending = ev.pairs[k];
    bool fallback = false;
    while (!pending.empty()) {
      bool progress = false;
      for (std::size_t t = 0; t < pending.size();) {
        auto [i, j] = pending[t];
        if (fwd.adjacent(i, j) && rev.adjacent(i, j)) {
          fwd.swap_adjacent(i, j);
          rev.swap_adjacent(i, j);
          pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(t));
          progress = true;
        } else {
          ++t;
        }
      }
      if (!progress) {
        fallback = true;
        break;
      }
    }
    processed += static_cast<long long>(ev.pairs[k].size());
    if (fallback || processed >= 4096) {
      fwd.rebuild(mid_of(k + 1));
      rev.rebuild(mid_of(k + 1));
      processed = 0;
    }
    record(k + 1);
  }
}

}  // namespace

struct AngularBuilder {
  static void build(AngularStructure& as, const Instance& inst) {
    if (inst.dimension() != 2)
      throw PreconditionError("angular structure requires dimension 2");
    inst.validate_report().raise_if_invalid();
    if (inst.existential()) {
      const auto& set = inst.as_existential();
      EventList ev = collect_events(set.size(), [&](int i) { return set.point(i); });
      as.breaks_ = ev.breaks;
      ExistTrack fwd(set, +1.0), rev(set, -1.0);
      sweep(fwd, rev, ev, as.fwdA_, as.fwdB_, as.revA_, as.revB_);
    } else {
      const auto& set = inst.as_locational();
      auto report = validate(set);
      report.raise_if_invalid();
      if (report.has_duplicate_locations)
        throw PreconditionError(
            "angular structure requires pairwise-distinct locations");
      FlatLocations local = flatten(set);
      if (static_cast<long long>(local.owners) * local.size() > 30'000'000)
        throw PreconditionError(
            "angular structure: locational state (points x locations) too large");
      EventList ev = collect_events(local.size(), [&](int i) { return local.point(i); });
      as.breaks_ = ev.breaks;
      LocTrack fwd(local, +1.0), rev(local, -1.0);
      sweep(fwd, rev, ev, as.fwdA_, as.fwdB_, as.revA_, as.revB_);
    }
  }
};

AngularStructure::AngularStructure(const Instance& inst) { AngularBuilder::build(*this, inst); }

int AngularStructure::locate(double theta) const {
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), theta);
  return static_cast<int>(it - breaks_.begin());
}

namespace {
double wrap_angle(double theta) {
  theta = std::fmod(theta, 2 * kPi);
  if (theta < 0) theta += 2 * kPi;
  return theta;
}
}  // namespace

double AngularStructure::query_support(double theta) const {
  theta = wrap_angle(theta);
  bool flip = theta >= kPi;
  double t = flip ? theta - kPi : theta;
  int k = locate(t);
  double c = std::cos(t), s = std::sin(t);
  if (!flip) return fwdA_[k] * c + fwdB_[k] * s;
  return -(revA_[k] * c + revB_[k] * s);
}

double AngularStructure::query_width(double theta) const {
  theta = wrap_angle(theta);
  double t = theta >= kPi ? theta - kPi : theta;
  int k = locate(t);
  double c = std::cos(t), s = std::sin(t);
  return (fwdA_[k] - revA_[k]) * c + (fwdB_[k] - revB_[k]) * s;
}

Vec AngularStructure::query_gradient(double theta) const {
  theta = wrap_angle(theta);
  bool flip = theta >= kPi;
  double t = flip ? theta - kPi : theta;
  int k = locate(t);
  if (!flip) return {fwdA_[k], fwdB_[k]};
  return {revA_[k], revB_[k]};
}

// --- expectation polytope -------------------------------------------------------

double ExpectationPolytope::support(std::span<const double> u) const {
  if (vertices.size() == 0) return 0.0;
  double best = dot(vertices.point(0), u);
  for (int i = 1; i < vertices.size(); ++i) best = std::max(best, dot(vertices.point(i), u));
  return best;
}

ExpectationPolytope build_expectation_polytope(const Instance& inst) {
  AngularStructure as(inst);
  ExpectationPolytope M;
  M.vertices.dim = 2;
  const int k = as.interval_count();
  M.cone_count = 2 * k;
  std::vector<Vec> verts;
  verts.reserve(2 * static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    double lo = i == 0 ? 0.0 : as.breakpoints()[i - 1];
    double hi = i == k - 1 ? kPi : as.breakpoints()[i];
    verts.push_back(as.query_gradient(0.5 * (lo + hi)));
  }
  for (int i = 0; i < k; ++i) {
    double lo = i == 0 ? 0.0 : as.breakpoints()[i - 1];
    double hi = i == k - 1 ? kPi : as.breakpoints()[i];
    verts.push_back(as.query_gradient(kPi + 0.5 * (lo + hi)));
  }
  double scale = 1e-300;
  for (const auto& v : verts) scale = std::max({scale, std::abs(v[0]), std::abs(v[1])});
  auto same = [&](const Vec& a, const Vec& b) {
    return std::abs(a[0] - b[0]) <= 1e-12 * scale && std::abs(a[1] - b[1]) <= 1e-12 * scale;
  };
  std::vector<Vec> dedup;
  for (const auto& v : verts)
    if (dedup.empty() || !same(dedup.back(), v)) dedup.push_back(v);
  while (dedup.size() > 1 && same(dedup.front(), dedup.back())) dedup.pop_back();
  for (const auto& v : dedup) M.vertices.push(v);
  return M;
}

}  // namespace stokern
