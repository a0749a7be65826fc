#pragma once

// Space-time (R x R^3) primitives: light cones, bi-conical support sets,
// convex hulls of sampled sets and a sampled characteristic-hull test.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace conesupport {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;  // (t, x1, x2, x3)

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

struct SpaceTimePoint {
    double t = 0.0;
    Vec3 x{0.0, 0.0, 0.0};

    Vec4 as_vec4() const { return {t, x[0], x[1], x[2]}; }
};

/// Bi-cone K_{R,tau,z} = { (t,x) : |t - tau| + |x - z| / c0 <= R }, R in time units.
struct ConicalSet {
    double radius = 0.0;
    double center_time = 0.0;
    Vec3 center_space{0.0, 0.0, 0.0};
};

/// Unit vector xi = (xi_t, xi_x) in R^4 with c0^2 xi_t^2 = |xi_x|^2.
class CharacteristicDirection {
public:
    /// sign_t selects the time orientation; omega is the spatial direction (normalized here).
    static CharacteristicDirection make(double sign_t, const Vec3& omega, double c0);

    double xi_t() const { return xi_t_; }
    const Vec3& xi_x() const { return xi_x_; }
    Vec4 as_vec4() const { return {xi_t_, xi_x_[0], xi_x_[1], xi_x_[2]}; }

    /// True when both the unit-norm and the characteristic relation hold to tolerance.
    bool is_valid(double c0) const;

private:
    CharacteristicDirection(double t, const Vec3& x) : xi_t_(t), xi_x_(x) {}
    double xi_t_;
    Vec3 xi_x_;
};

enum class FlipKind { Time, Space };

/// Two characteristic directions with opposite time or opposite space components.
struct FlippedPair {
    CharacteristicDirection xi1;
    CharacteristicDirection xi2;
    FlipKind kind;

    bool is_flipped(double tol = 1e-12) const;
};

struct PointCloud4D {
    std::vector<SpaceTimePoint> points;

    double diameter() const;
};

double forward_cone_crossing_time(const SpaceTimePoint& apex, const Vec3& y, double c0);

bool conical_set_contains(const ConicalSet& k, const SpaceTimePoint& p, double c0);

bool intersection_contains(const ConicalSet& k1, const ConicalSet& k2, const SpaceTimePoint& p, double c0);

/// Euclidean distance in R^4 from p to conv(cloud), via the minimum-norm point of the
/// translated hull (Wolfe's algorithm).
double convex_hull_distance(const PointCloud4D& cloud, const SpaceTimePoint& p);

/// p lies within tol of conv(cloud). A negative tol selects the default 1e-9 * (1 + diam).
bool convex_hull_contains(const PointCloud4D& cloud, const SpaceTimePoint& p, double tol = -1.0);

struct SectorSampling {
    int flipped_pairs = 512;
    /// Neighborhood radii as fractions of the cloud diameter.
    std::vector<double> epsilon_fractions{0.01, 0.05};
};

struct SectorWitness {
    FlippedPair pair;
    double epsilon;
    double clearance;  // distance from the sector to the nearest cloud point
};

/// Deterministic enumeration of flipped pairs: half time-flips, half space-flips,
/// spatial directions on a Fibonacci sphere.
std::vector<FlippedPair> enumerate_flipped_pairs(int count, double c0);

/// Exact distance in R^4 from q to the closed sector { apex + a*xi : a >= 0, xi on the
/// geodesic between the pair's directions }.
double sector_distance(const Vec4& apex, const FlippedPair& pair, const Vec4& q);

/// Searches for a sector neighborhood at p that misses every cloud sample. A returned
/// witness certifies p outside char(K); nullopt only means no sampled sector qualified.
std::optional<SectorWitness> char_hull_excludes(const PointCloud4D& cloud, const SpaceTimePoint& p,
                                                const SectorSampling& sampling, double c0);

}  // namespace conesupport
