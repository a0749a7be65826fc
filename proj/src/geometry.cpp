#include "conesupport/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace conesupport {

namespace {

double dot4(const Vec4& a, const Vec4& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]; }

Vec4 sub4(const Vec4& a, const Vec4& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]}; }

// Solves the small dense system A x = b in place (partial pivoting). Returns false if singular.
bool solve_small(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * b[c];
        b[i] = s / a[i][i];
    }
    return true;
}

// Affine minimum-norm point of the points indexed by `active`: weights summing to one.
bool affine_min_norm(const std::vector<Vec4>& pts, const std::vector<std::size_t>& active,
                     std::vector<double>& weights) {
    const std::size_t k = active.size();
    if (k == 1) {
        weights.assign(1, 1.0);
        return true;
    }
    // Gram system on differences to the first active point.
    const Vec4& base = pts[active[0]];
    std::vector<Vec4> diff(k - 1);
    for (std::size_t i = 1; i < k; ++i) diff[i - 1] = sub4(pts[active[i]], base);
    std::vector<std::vector<double>> gram(k - 1, std::vector<double>(k - 1));
    std::vector<double> rhs(k - 1);
    for (std::size_t i = 0; i + 1 < k; ++i) {
        for (std::size_t j = 0; j + 1 < k; ++j) gram[i][j] = dot4(diff[i], diff[j]);
        rhs[i] = -dot4(diff[i], base);
    }
    if (!solve_small(gram, rhs)) return false;
    weights.assign(k, 0.0);
    double rest = 1.0;
    for (std::size_t i = 1; i < k; ++i) {
        weights[i] = rhs[i - 1];
        rest -= rhs[i - 1];
    }
    weights[0] = rest;
    return true;
}

Vec4 combine(const std::vector<Vec4>& pts, const std::vector<std::size_t>& active, const std::vector<double>& w) {
    Vec4 x{0, 0, 0, 0};
    for (std::size_t i = 0; i < active.size(); ++i)
        for (int c = 0; c < 4; ++c) x[c] += w[i] * pts[active[i]][c];
    return x;
}

Vec3 fibonacci_direction(int i, int n) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace

CharacteristicDirection CharacteristicDirection::make(double sign_t, const Vec3& omega, double c0) {
    if (!(c0 > 0.0)) throw std::invalid_argument("characteristic direction: c0 must be positive");
    const double len = norm(omega);
    if (!(len > 0.0)) throw std::invalid_argument("characteristic direction: zero spatial direction");
    const double scale = 1.0 / std::sqrt(1.0 + c0 * c0);
    const double t = (sign_t >= 0.0 ? 1.0 : -1.0) * scale;
    return CharacteristicDirection(t, (c0 * scale / len) * omega);
}

bool CharacteristicDirection::is_valid(double c0) const {
    const double unit = xi_t_ * xi_t_ + dot(xi_x_, xi_x_);
    const double rel = c0 * c0 * xi_t_ * xi_t_ - dot(xi_x_, xi_x_);
    return std::abs(unit - 1.0) <= 1e-12 && std::abs(rel) <= 1e-10;
}

bool FlippedPair::is_flipped(double tol) const {
    const bool time_flip = std::abs(xi1.xi_t() + xi2.xi_t()) <= tol;
    const Vec3 s = xi1.xi_x() + xi2.xi_x();
    const bool space_flip = norm(s) <= tol;
    return time_flip || space_flip;
}

double PointCloud4D::diameter() const {
    double best = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const Vec4 d = sub4(points[i].as_vec4(), points[j].as_vec4());
            best = std::max(best, std::sqrt(dot4(d, d)));
        }
    return best;
}

double forward_cone_crossing_time(const SpaceTimePoint& apex, const Vec3& y, double c0) {
    return apex.t + distance(apex.x, y) / c0;
}

bool conical_set_contains(const ConicalSet& k, const SpaceTimePoint& p, double c0) {
    if (!(c0 > 0.0)) throw std::invalid_argument("conical_set_contains: c0 must be positive");
    return std::abs(p.t - k.center_time) + distance(p.x, k.center_space) / c0 <= k.radius;
}

bool intersection_contains(const ConicalSet& k1, const ConicalSet& k2, const SpaceTimePoint& p, double c0) {
    return conical_set_contains(k1, p, c0) && conical_set_contains(k2, p, c0);
}

double convex_hull_distance(const PointCloud4D& cloud, const SpaceTimePoint& p) {
    if (cloud.points.empty()) throw std::invalid_argument("convex hull of an empty point cloud");

    std::vector<Vec4> pts;
    pts.reserve(cloud.points.size());
    double scale = 0.0;
    for (const auto& q : cloud.points) {
        pts.push_back(sub4(q.as_vec4(), p.as_vec4()));
        scale = std::max(scale, dot4(pts.back(), pts.back()));
    }
    if (scale == 0.0) return 0.0;
    const double tol = 1e-12 * scale;

    std::size_t start = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (dot4(pts[i], pts[i]) < dot4(pts[start], pts[start])) start = i;

    std::vector<std::size_t> active{start};
    std::vector<double> lambda{1.0};
    Vec4 x = pts[start];

    for (int major = 0; major < 1000; ++major) {
        std::size_t j = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double v = dot4(x, pts[i]);
            if (v < best) {
                best = v;
                j = i;
            }
        }
        if (best >= dot4(x, x) - tol) break;
        if (std::find(active.begin(), active.end(), j) != active.end()) break;
        active.push_back(j);
        lambda.push_back(0.0);

        for (int minor = 0; minor < 100; ++minor) {
            std::vector<double> alpha;
            if (!affine_min_norm(pts, active, alpha)) {
                // Affinely dependent set: drop the newest point and stop improving.
                active.pop_back();
                lambda.pop_back();
                return std::sqrt(dot4(x, x));
            }
            bool interior = std::all_of(alpha.begin(), alpha.end(), [](double a) { return a > 1e-14; });
            if (interior) {
                lambda = alpha;
                x = combine(pts, active, lambda);
                break;
            }
            double theta = 1.0;
            for (std::size_t i = 0; i < alpha.size(); ++i)
                if (alpha[i] <= 1e-14 && lambda[i] - alpha[i] > 0.0)
                    theta = std::min(theta, lambda[i] / (lambda[i] - alpha[i]));
            for (std::size_t i = 0; i < alpha.size(); ++i) lambda[i] = lambda[i] + theta * (alpha[i] - lambda[i]);
            std::vector<std::size_t> keep_idx;
            std::vector<double> keep_w;
            for (std::size_t i = 0; i < active.size(); ++i)
                if (lambda[i] > 1e-14) {
                    keep_idx.push_back(active[i]);
                    keep_w.push_back(lambda[i]);
                }
            double total = 0.0;
            for (double w : keep_w) total += w;
            for (double& w : keep_w) w /= total;
            active = std::move(keep_idx);
            lambda = std::move(keep_w);
            x = combine(pts, active, lambda);
        }
    }
    return std::sqrt(dot4(x, x));
}

bool convex_hull_contains(const PointCloud4D& cloud, const SpaceTimePoint& p, double tol) {
    if (tol < 0.0) tol = 1e-9 * (1.0 + cloud.diameter());
    return convex_hull_distance(cloud, p) <= tol;
}

std::vector<FlippedPair> enumerate_flipped_pairs(int count, double c0) {
    if (count <= 0) throw std::invalid_argument("flipped pair count must be positive");
    const int n_time = count / 2;
    const int n_space = count - n_time;
    std::vector<FlippedPair> pairs;
    pairs.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < n_time; ++i) {
        const Vec3 w = fibonacci_direction(i, n_time);
        pairs.push_back({CharacteristicDirection::make(1.0, w, c0), CharacteristicDirection::make(-1.0, w, c0),
                         FlipKind::Time});
    }
    for (int i = 0; i < n_space; ++i) {
        const Vec3 w = fibonacci_direction(i, n_space);
        // (sign, w) and (sign, -w) describe the same pair, so the sign follows the hemisphere.
        const double sign = w[2] >= 0.0 ? 1.0 : -1.0;
        pairs.push_back({CharacteristicDirection::make(sign, w, c0),
                         CharacteristicDirection::make(sign, -1.0 * w, c0), FlipKind::Space});
    }
    return pairs;
}

double sector_distance(const Vec4& apex, const FlippedPair& pair, const Vec4& q) {
    const Vec4 u1 = pair.xi1.as_vec4();
    const Vec4 u2 = pair.xi2.as_vec4();
    const double c = std::clamp(dot4(u1, u2), -1.0, 1.0);
    Vec4 e2{u2[0] - c * u1[0], u2[1] - c * u1[1], u2[2] - c * u1[2], u2[3] - c * u1[3]};
    const double e2n = std::sqrt(dot4(e2, e2));
    const Vec4 v = sub4(q, apex);
    const double vv = dot4(v, v);
    const double a = dot4(v, u1);
    if (e2n < 1e-15) {
        // Degenerate (parallel) pair: the sector is a single ray.
        return a >= 0.0 ? std::sqrt(std::max(0.0, vv - a * a)) : std::sqrt(vv);
    }
    for (double& e : e2) e /= e2n;
    const double b = dot4(v, e2);
    const double h2 = std::max(0.0, vv - a * a - b * b);

    const double theta = std::acos(c);
    const double phi = std::atan2(b, a);
    if (phi >= 0.0 && phi <= theta) return std::sqrt(h2);

    auto ray_dist2 = [&](double ca, double sa) {
        const double along = a * ca + b * sa;
        if (along <= 0.0) return a * a + b * b;
        return std::max(0.0, a * a + b * b - along * along);
    };
    const double d2 = std::min(ray_dist2(1.0, 0.0), ray_dist2(std::cos(theta), std::sin(theta)));
    return std::sqrt(h2 + d2);
}

std::optional<SectorWitness> char_hull_excludes(const PointCloud4D& cloud, const SpaceTimePoint& p,
                                                const SectorSampling& sampling, double c0) {
    if (cloud.points.empty()) throw std::invalid_argument("char_hull_excludes: empty point cloud");
    if (sampling.flipped_pairs <= 0) throw std::invalid_argument("char_hull_excludes: flipped_pairs must be positive");
    if (sampling.epsilon_fractions.empty()) throw std::invalid_argument("char_hull_excludes: no epsilon values");
    for (double f : sampling.epsilon_fractions)
        if (!(f > 0.0)) throw std::invalid_argument("char_hull_excludes: epsilon fractions must be positive");

    double scale = cloud.diameter();
    if (scale == 0.0) scale = distance(p.x, cloud.points.front().x) + std::abs(p.t - cloud.points.front().t);
    if (scale == 0.0) scale = 1.0;

    std::vector<double> eps;
    for (double f : sampling.epsilon_fractions) eps.push_back(f * scale);
    std::sort(eps.begin(), eps.end());

    const Vec4 apex = p.as_vec4();
    for (const auto& pair : enumerate_flipped_pairs(sampling.flipped_pairs, c0)) {
        double clearance = std::numeric_limits<double>::infinity();
        for (const auto& q : cloud.points) {
            clearance = std::min(clearance, sector_distance(apex, pair, q.as_vec4()));
            if (clearance < eps.front()) break;
        }
        if (clearance < eps.front()) continue;
        double chosen = eps.front();
        for (double e : eps)
            if (e <= clearance) chosen = e;
        return SectorWitness{pair, chosen, clearance};
    }
    return std::nullopt;
}

}  // namespace conesupport
