#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "conesupport/wavefield.hpp"

namespace conesupport {

/// Dense row-major matrix view used by the spectral-norm routine.
struct MatrixView {
    std::span<const double> data;
    std::size_t rows = 0;
    std::size_t cols = 0;
};

struct PowerIterationOptions {
    double rel_tol = 1e-8;
    int max_iterations = 10000;
};

/// Largest singular value by power iteration on M^T M, started from the normalized all-ones vector.
/// Throws ConvergenceError when the iteration cap is hit.
double spectral_norm(MatrixView m, const PowerIterationOptions& opts = {});

inline double spectral_norm(const FarFieldMatrix& g) { return spectral_norm({g.values, g.rows(), g.cols()}); }

struct NoiseSpec {
    double relative_level = 0.05;
    std::uint64_t seed = 1;
};

inline constexpr const char* kNoiseGenerator = "mt19937_64/u53";

struct NoisyMatrix {
    FarFieldMatrix matrix;
    double scale = 0.0;           // delta in G + delta * E
    double achieved_ratio = 0.0;  // ||delta E||_2 / ||G||_2
    std::string generator = kNoiseGenerator;
};

/// G + delta * E with E i.i.d. uniform on [-1, 1) and delta = level * ||G||_2 / ||E||_2.
NoisyMatrix add_relative_noise(const FarFieldMatrix& g, const NoiseSpec& spec);

}  // namespace conesupport
