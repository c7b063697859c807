#pragma once

// JSON file formats: complex entries are [re, im] pairs everywhere, matrices
// are row-major lists of rows.
//
//   NormalizedPencil: {"n": int, "dim_h0": int, "dim_h1": int,
//                      "coeffs": [ [[ [re,im], ... ], ...], ... ]}
//   PhaseMap:         {"d": int, "n": int, "n_phases": int,
//                      "phases": [int, ...]}  (row-major, last axis fastest)

#include <string>

#include <json.hpp>

#include "effop/conductivity.hpp"
#include "effop/multiphase.hpp"

namespace effop::io {

nlohmann::json complex_to_json(Complex v);
Complex complex_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, Index rows, Index cols);

NormalizedPencil pencil_from_json(const nlohmann::json& j);
nlohmann::json pencil_to_json(const NormalizedPencil& p);
NormalizedPencil load_pencil(const std::string& path);
void save_pencil(const NormalizedPencil& p, const std::string& path);

PhaseMap phase_map_from_json(const nlohmann::json& j);
nlohmann::json phase_map_to_json(const PhaseMap& pm);
PhaseMap load_phase_map(const std::string& path);
void save_phase_map(const PhaseMap& pm, const std::string& path);

}  // namespace effop::io
