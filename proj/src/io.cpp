#include "effop/io.hpp"

#include <fstream>

namespace effop::io {

namespace {

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError("invalid JSON in " + path + ": " + ex.what());
  }
  return j;
}

void save_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

Index require_count(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ValidationError(std::string("missing or non-integer field \"") +
                          key + "\"");
  const auto v = j[key].get<long long>();
  if (v < 0) throw ValidationError(std::string("field \"") + key +
                                   "\" must be non-negative");
  return static_cast<Index>(v);
}

}  // namespace

nlohmann::json complex_to_json(Complex v) {
  return nlohmann::json::array({v.real(), v.imag()});
}

Complex complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError("complex entries must be [re, im] pairs");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, Index rows, Index cols) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows)
    throw ValidationError("matrix has wrong row count");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw ValidationError("matrix row " + std::to_string(i) +
                            " has wrong length");
    for (Index c = 0; c < cols; ++c)
      m(i, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

NormalizedPencil pencil_from_json(const nlohmann::json& j) {
  const Index n = require_count(j, "n");
  const Index h0 = require_count(j, "dim_h0");
  const Index h1 = require_count(j, "dim_h1");
  if (!j.contains("coeffs") || !j["coeffs"].is_array() ||
      static_cast<Index>(j["coeffs"].size()) != n)
    throw ValidationError("pencil: \"coeffs\" must list exactly n matrices");
  const Index dim = h0 + h1;
  std::vector<Operator> coeffs;
  coeffs.reserve(static_cast<std::size_t>(n));
  bool real = true;
  std::vector<Matrix> mats;
  for (Index i = 0; i < n; ++i) {
    Matrix m = matrix_from_json(j["coeffs"][static_cast<std::size_t>(i)], dim,
                                dim);
    if (m.size() > 0 && m.imag().cwiseAbs().maxCoeff() != 0.0) real = false;
    mats.push_back(std::move(m));
  }
  const ScalarField f = real ? ScalarField::real : ScalarField::cplx;
  for (auto& m : mats) coeffs.emplace_back(std::move(m), f);
  return NormalizedPencil(std::move(coeffs), BlockPartition::two(h0, h1));
}

nlohmann::json pencil_to_json(const NormalizedPencil& p) {
  nlohmann::json j;
  j["n"] = p.n_phases();
  j["dim_h0"] = p.dim_h0();
  j["dim_h1"] = p.dim_h1();
  nlohmann::json coeffs = nlohmann::json::array();
  for (Index i = 0; i < p.n_phases(); ++i)
    coeffs.push_back(matrix_to_json(p.coeff(i).mat()));
  j["coeffs"] = std::move(coeffs);
  return j;
}

NormalizedPencil load_pencil(const std::string& path) {
  return pencil_from_json(load_json_file(path));
}

void save_pencil(const NormalizedPencil& p, const std::string& path) {
  save_json_file(pencil_to_json(p), path);
}

PhaseMap phase_map_from_json(const nlohmann::json& j) {
  GridSpec grid;
  grid.d = static_cast<int>(require_count(j, "d"));
  grid.n_cells = static_cast<int>(require_count(j, "n"));
  grid.field = ScalarField::real;
  const int n_phases = static_cast<int>(require_count(j, "n_phases"));
  grid.validate();
  if (!j.contains("phases") || !j["phases"].is_array())
    throw ValidationError("phase map: missing \"phases\" array");
  const auto& arr = j["phases"];
  if (static_cast<Index>(arr.size()) != grid.cells())
    throw ValidationError("phase map: \"phases\" must list one entry per cell "
                          "(" +
                          std::to_string(grid.cells()) + ")");
  std::vector<int> phases;
  phases.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number_integer())
      throw ValidationError("phase map: phase indices must be integers");
    phases.push_back(v.get<int>());
  }
  return PhaseMap(grid, std::move(phases), n_phases);
}

nlohmann::json phase_map_to_json(const PhaseMap& pm) {
  nlohmann::json j;
  j["d"] = pm.grid().d;
  j["n"] = pm.grid().n_cells;
  j["n_phases"] = pm.n_phases();
  j["phases"] = pm.phases();
  return j;
}

PhaseMap load_phase_map(const std::string& path) {
  return phase_map_from_json(load_json_file(path));
}

void save_phase_map(const PhaseMap& pm, const std::string& path) {
  save_json_file(phase_map_to_json(pm), path);
}

}  // namespace effop::io
