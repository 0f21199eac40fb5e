#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stokern/errors.hpp"

namespace stokern {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
double norm(std::span<const double> a);
Vec normalized(std::span<const double> a);

// Unit direction in R^d. In the plane it also carries its angle.
struct Direction {
  Vec u;
  explicit Direction(Vec v);
  static Direction from_angle(double theta);  // d = 2
  double angle() const;                       // d = 2, in [0, 2*pi)
  int dimension() const { return static_cast<int>(u.size()); }
  Direction negated() const;
};

// Flat point store: n points in R^d, row-major.
struct PointMatrix {
  int dim = 0;
  std::vector<double> coords;
  int size() const { return dim == 0 ? 0 : static_cast<int>(coords.size()) / dim; }
  std::span<const double> point(int i) const {
    return {coords.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
  }
  void push(std::span<const double> p) { coords.insert(coords.end(), p.begin(), p.end()); }
};

// Global tie rule: compare by projection (descending), then lexicographically
// on coordinates, then by index. Used for every canonical order in the
// library so that ties resolve identically everywhere.
bool canonical_before(std::span<const double> pa, double projA, int ia,
                      std::span<const double> pb, double projB, int ib);

// Support value max <u,p> with the tie-broken argmax index. Errors on empty P.
std::pair<double, int> support(const PointMatrix& pts, std::span<const double> u);

// f(P,u) + f(P,-u); 0 for the empty set.
double width(const PointMatrix& pts, std::span<const double> u);

// Invertible affine map x -> L x + t with cached inverse.
class AffineTransform {
 public:
  AffineTransform() = default;  // identity of unknown dim; use identity(d)
  AffineTransform(int dim, std::vector<double> linear, std::vector<double> offset);
  static AffineTransform identity(int dim);

  int dimension() const { return dim_; }
  Vec apply(std::span<const double> x) const;
  Vec apply_inverse(std::span<const double> x) const;
  PointMatrix apply(const PointMatrix& pts) const;
  PointMatrix apply_inverse(const PointMatrix& pts) const;
  // Row-major d x d matrix and offset.
  const std::vector<double>& linear() const { return linear_; }
  const std::vector<double>& offset() const { return offset_; }
  const std::vector<double>& inverse_linear() const { return inv_; }

  // this(other(x))
  AffineTransform compose(const AffineTransform& other) const;

 private:
  int dim_ = 0;
  std::vector<double> linear_, offset_, inv_, inv_offset_;
};

// Result of the fattening step: T(P) satisfies
// alpha * C ⊆ ConvH(T(P)) ⊆ C for the cube C = [-1,1]^d, with the achieved
// alpha certified from an inscribed-cube LP.
struct FatTransform {
  AffineTransform transform;
  double alpha = 0.0;
};

// Errors with "input not full-dimensional" when P is affinely degenerate.
FatTransform fat_transform(const PointMatrix& pts);

// Set of unit directions with covering radius <= delta, closed under
// negation. d = 2 uses evenly spaced angles; d >= 3 a normalized grid on the
// cube faces.
std::vector<Vec> direction_net(int dim, double delta);

// Deterministic coreset of a point set (or of an implicit convex body).
struct DeterministicKernel {
  PointMatrix points;
  std::vector<int> source_indices;  // indexes into the construction input, when a subset
  double epsilon = 0.0;
  bool degenerate = false;  // input was not full-dimensional
  std::optional<AffineTransform> transform;  // fattening map used during construction
};

// Subset eps-kernel of a deterministic point set: width(kernel, u) is within
// (1-eps) of width(P, u) in every direction. Size O(1/eps^((d-1)/2)).
// Degenerate inputs yield the exact lower-dimensional extent (<= 2 points on
// a segment) with the degenerate flag set.
DeterministicKernel eps_kernel(const PointMatrix& pts, double eps);

// --- convex hulls -----------------------------------------------------------

// Indices of hull vertices in CCW order (d = 2, monotone chain). Collinear
// inputs return the two extreme points; a single point returns {0}.
std::vector<int> convex_hull_2d(const PointMatrix& pts);

struct HullFacet {
  int a, b, c;          // vertex indices, outward orientation
  double normal[3];     // unit outward normal
  double offset;        // <normal, x> = offset on the facet plane
};

// Incremental 3-d hull. Errors if the input is degenerate (affinely < 3-d).
std::vector<HullFacet> convex_hull_3d(const PointMatrix& pts);

// Halfspace <normal, x> <= offset.
struct Halfspace {
  Vec normal;
  double offset;
};

// Vertices (CCW) of the intersection of halfplanes (d = 2). Empty result
// means empty or lower-dimensional intersection. `bound` adds a bounding box
// guard so unbounded inputs still yield a polygon.
std::vector<Vec> halfplane_intersection(const std::vector<Halfspace>& hs, double bound);

// Largest cube x + r*[-1,1]^d inside the polytope {<n_i, x> <= c_i}.
// Returns (center, r); r <= 0 means empty interior. Seidel-style randomized
// LP in d+1 variables.
std::pair<Vec, double> largest_inscribed_cube(const std::vector<Halfspace>& hs, int dim,
                                              std::uint64_t seed = 12345);

// Affine rank of the point set (0 = point, 1 = segment, ...), with a relative
// tolerance, plus an orthonormal basis of the spanned subspace.
struct AffineSpan {
  int rank = 0;
  Vec origin;
  std::vector<Vec> basis;  // rank orthonormal vectors
};
AffineSpan affine_span(const PointMatrix& pts, double rel_tol = 1e-9);

}  // namespace stokern
