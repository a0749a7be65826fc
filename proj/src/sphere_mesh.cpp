#include "conesupport/sphere_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace conesupport {

SphereMesh build_mesh(int n_lat, int n_lon) {
    if (n_lat < 2 || n_lon < 3)
        throw std::invalid_argument("build_mesh: need n_lat >= 2 and n_lon >= 3, got " + std::to_string(n_lat) +
                                    " x " + std::to_string(n_lon));
    SphereMesh mesh;
    mesh.n_lat = n_lat;
    mesh.n_lon = n_lon;
    const double d_theta = std::numbers::pi / n_lat;
    const double d_phi = 2.0 * std::numbers::pi / n_lon;
    const auto cells = static_cast<std::size_t>(n_lat) * static_cast<std::size_t>(n_lon);
    mesh.directions.reserve(cells);
    mesh.adjacency.resize(cells);

    for (int row = 0; row < n_lat; ++row) {
        const double theta = (row + 0.5) * d_theta;
        for (int col = 0; col < n_lon; ++col) {
            const double phi = (col + 0.5) * d_phi;
            mesh.directions.push_back(
                {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)});

            auto& nb = mesh.adjacency[static_cast<std::size_t>(row) * n_lon + col];
            auto index = [n_lon](int r, int c) { return static_cast<std::size_t>(r) * n_lon + c; };
            if (row > 0) nb.push_back(index(row - 1, col));
            if (row + 1 < n_lat) nb.push_back(index(row + 1, col));
            nb.push_back(index(row, (col + n_lon - 1) % n_lon));
            nb.push_back(index(row, (col + 1) % n_lon));
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        }
    }
    return mesh;
}

std::vector<double> quadrature_weights(const SphereMesh& mesh) {
    const double d_theta = std::numbers::pi / mesh.n_lat;
    const double d_phi = 2.0 * std::numbers::pi / mesh.n_lon;
    std::vector<double> w;
    w.reserve(mesh.size());
    for (int row = 0; row < mesh.n_lat; ++row) {
        const double band = d_phi * (std::cos(row * d_theta) - std::cos((row + 1) * d_theta));
        for (int col = 0; col < mesh.n_lon; ++col) w.push_back(band);
    }
    return w;
}

}  // namespace conesupport
