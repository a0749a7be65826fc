#pragma once

// CSV and JSON artifacts. Numbers are written with shortest round-trip precision.
//
//   far-field matrix:  "time,t_0,...,t_{N-1}" then one row per direction "m,g[m][0],..."
//   near-field trace:  "x1,x2,x3,t_0,...,t_{N-1}" then one row per boundary point
//   mesh:              "index,dx,dy,dz,weight,neighbors" (neighbors joined by ';')
//   component mask:    "component,direction,time_index"
//   support mask:      "t,x1,x2,x3,flag"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "conesupport/csa.hpp"
#include "conesupport/diagnostics.hpp"
#include "conesupport/nearfield.hpp"
#include "conesupport/noise.hpp"
#include "conesupport/sphere_mesh.hpp"
#include "conesupport/wavefield.hpp"

namespace conesupport {

/// Malformed or unreadable input (files, cone specs, configuration).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string format_double(double v);

void write_matrix_csv(std::ostream& os, const FarFieldMatrix& g);
/// The mesh is not stored in the file; rows must match mesh.size() and the header a uniform grid.
FarFieldMatrix read_matrix_csv(std::istream& is, const SphereMesh& mesh);

void write_trace_csv(std::ostream& os, const NearFieldTrace& trace);
NearFieldTrace read_trace_csv(std::istream& is);

void write_mesh_csv(std::ostream& os, const SphereMesh& mesh);
void write_component_mask_csv(std::ostream& os, const SeparationResult& sep);
void write_support_mask_csv(std::ostream& os, const SupportMask4D& mask);

/// Whole-file helpers; throw InputError when the path cannot be opened.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);
FarFieldMatrix load_matrix(const std::filesystem::path& path, const SphereMesh& mesh);
NearFieldTrace load_trace(const std::filesystem::path& path);

nlohmann::json to_json(const Vec3& v);
nlohmann::json to_json(const TimeGrid& grid);
nlohmann::json to_json(const ConicalSet& k);
nlohmann::json to_json(const ConeEstimate& e);
nlohmann::json to_json(const FriedlanderReport& r);
nlohmann::json noise_sidecar(const NoisyMatrix& noisy, const NoiseSpec& spec);

}  // namespace conesupport
