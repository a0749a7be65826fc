#pragma once

#include <cstddef>
#include <vector>

#include "conesupport/geometry.hpp"

namespace conesupport {

/// Latitude-longitude quadrangle mesh of the unit sphere. Cell m = row * n_lon + col,
/// row 0 touching the north pole. Directions are the images of the cell (theta, phi) midpoints.
struct SphereMesh {
    int n_lat = 0;
    int n_lon = 0;
    std::vector<Vec3> directions;
    std::vector<std::vector<std::size_t>> adjacency;

    std::size_t size() const { return directions.size(); }
};

/// Cells sharing a grid edge are adjacent (longitude wraps around, nothing crosses a pole).
SphereMesh build_mesh(int n_lat, int n_lon);

/// Solid angle of each cell; sums to 4*pi.
std::vector<double> quadrature_weights(const SphereMesh& mesh);

}  // namespace conesupport
