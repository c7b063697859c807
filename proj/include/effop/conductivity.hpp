#pragma once

// Periodic conductivity on a discrete d-dimensional voxel grid: the Hodge
// triple decomposition of periodic vector fields (uniform / gradient /
// divergence-free parts, built in the Fourier basis), n-phase characteristic
// function projections, and effective conductivity tensors with a dense
// subspace-coordinate backend and a matrix-free conjugate-gradient backend.
//
// The grid model is a genuine finite-dimensional instance of the abstract
// theory; every zproblem/multiphase identity holds at solver tolerance, not
// discretization accuracy. The unit cell is [0, 2pi)^d sampled at N uniform
// points per axis; frequencies are signed integers in (-N/2, N/2], and for
// even N the Nyquist row k = N/2 uses that single representative.

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <utility>
#include <variant>
#include <vector>

#include "effop/multiphase.hpp"

namespace effop {

// Hard cap for the dense backend: d * N^d must not exceed this.
inline constexpr Index kDenseDimCap = 4096;

struct GridSpec {
  int d = 2;        // spatial dimension, 2 or 3
  int n_cells = 2;  // N, cells per axis
  ScalarField field = ScalarField::real;

  void validate() const;
  Index cells() const;  // N^d
  Index dim() const;    // d * N^d

  // Cells are indexed row-major with the last axis fastest.
  Index cell_index(const std::array<int, 3>& x) const;
  std::array<int, 3> cell_coords(Index idx) const;

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.d == b.d && a.n_cells == b.n_cells && a.field == b.field;
  }
};

// A periodic d-component field sampled on the grid, stored component-major:
// entry (c, cell) sits at flat index c * N^d + cell. The inner product and
// average carry the cell-average normalization (1/N^d).
class PeriodicField {
 public:
  PeriodicField(GridSpec grid, Vector values);

  const GridSpec& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  Complex at(int component, Index cell) const {
    return values_(component * grid_.cells() + cell);
  }

  Complex inner(const PeriodicField& other) const;
  Vector average() const;  // d-vector

 private:
  GridSpec grid_;
  Vector values_;
};

class PhaseMap {
 public:
  // phase_of_cell holds indices in 1..n_phases; every phase must occupy at
  // least one cell.
  PhaseMap(GridSpec grid, std::vector<int> phase_of_cell, int n_phases);

  const GridSpec& grid() const { return grid_; }
  int n_phases() const { return n_phases_; }
  int phase(Index cell) const {
    return phases_[static_cast<std::size_t>(cell)];
  }
  const std::vector<int>& phases() const { return phases_; }

  // Grid-exact volume fractions (cell counts over N^d).
  std::vector<double> volume_fractions() const;

  PhaseMap with_field(ScalarField f) const;

 private:
  GridSpec grid_;
  std::vector<int> phases_;
  int n_phases_;
};

struct HodgeDecomposition {
  GridSpec grid;
  TripleDecomposition space;
};

// Builds the triple decomposition with explicit orthonormal bases: the
// U-basis is the d constant fields, the E-basis carries polarization k/|k|
// per nonzero frequency and the J-basis the d-1 perpendicular polarizations.
// Real-field grids get real cos/sin combinations; dim U = d,
// dim E = N^d - 1, dim J = (d-1)(N^d - 1).
HodgeDecomposition hodge_projections(const GridSpec& grid);

// Lambda_i = pointwise multiplication by the phase-i indicator (diagonal in
// the cell basis); exact projections with disjoint supports.
SubspaceCollection phase_collection(const PhaseMap& pm,
                                    const HodgeDecomposition& hodge);

// Pointwise clockwise 90-degree rotation (F1, F2) -> (F2, -F1); d = 2 only.
// Satisfies R* = R^{-1} = -R and exchanges the discrete E and J exactly.
Operator rotation_operator(const GridSpec& grid);

enum class Backend { dense, cg };

struct CgOptions {
  double tol = 1e-10;  // relative residual target
  int max_iter = 0;    // 0 means 5 * dim(E)
};

struct CgResult {
  PeriodicField e_field;  // solution E in the gradient subspace (full space)
  int iterations = 0;
  double residual = 0.0;  // achieved relative residual
  bool converged = false;
};

// Conjugate-gradient non-convergence; carries the achieved residual.
struct CgError : Error {
  CgError(const std::string& what, double res, int iters)
      : Error(what), residual(res), iterations(iters) {}
  double residual;
  int iterations;
};

struct EffectiveResult {
  Operator sigma;        // d x d effective tensor in the canonical U basis
  double residual = 0.0; // block-solve residual (dense) or worst cg residual
  int iterations = 0;    // worst cg iteration count (0 for dense)
};

// An n-phase periodic cell problem. Dense structures (Hodge bases and the
// compressed coefficient pencil) are built once on first dense use and shared
// by all subsequent solves; per-point evaluations are safe to run
// concurrently.
class CellProblem {
 public:
  explicit CellProblem(PhaseMap pm);
  CellProblem(const CellProblem&) = delete;
  CellProblem& operator=(const CellProblem&) = delete;

  const PhaseMap& phase_map() const { return pm_; }
  const GridSpec& grid() const { return pm_.grid(); }
  std::vector<double> fractions() const { return pm_.volume_fractions(); }

  const HodgeDecomposition& hodge() const;
  // Compression of the phase projections to U + E; equals
  // bess_pencil(phase_collection(...)) but never materializes the dense
  // Lambda_i.
  const NormalizedPencil& pencil() const;
  SubspaceCollection collection() const;

  EffectiveResult effective_detailed(const PencilPoint& z,
                                     Backend backend = Backend::dense,
                                     const CgOptions& opts = {}) const;
  Operator effective(const PencilPoint& z, Backend backend = Backend::dense,
                     const CgOptions& opts = {}) const;

  // Relative residual of sigma*(z) = R sigma*(z^{-1})^{-1} R^{-1}; d = 2.
  double duality_residual(const PencilPoint& z) const;

 private:
  void ensure_dense() const;

  PhaseMap pm_;
  mutable std::once_flag dense_once_;
  mutable std::unique_ptr<HodgeDecomposition> hodge_;
  mutable std::unique_ptr<NormalizedPencil> pencil_;
};

// One-shot wrappers over CellProblem.
Operator effective_conductivity(const PhaseMap& pm, const PencilPoint& z,
                                Backend backend = Backend::dense,
                                const CgOptions& opts = {});
double duality_relation_check(const PhaseMap& pm, const PencilPoint& z);

// Scalar Wiener bounds from the volume fractions; all z_i real positive.
std::pair<double, double> wiener_fraction_bounds(const PhaseMap& pm,
                                                 const PencilPoint& z);

// Matrix-free solve of Gamma_1 L(z) Gamma_1 E = -Gamma_1 L(z) E0 by conjugate
// gradients, applying the gradient projection via FFT and L(z) pointwise;
// requires all z_i real positive. e0 is the uniform field in canonical
// coordinates (length d).
CgResult cg_cell_solve(const PhaseMap& pm, const PencilPoint& z,
                       const RealVector& e0, double tol = 1e-10,
                       int max_iter = 0);

// Test geometries.
struct LaminateSpec {
  int axis = 0;           // axis along which the phase varies
  double fraction = 0.5;  // volume fraction of phase 1
};
struct CheckerboardSpec {};  // d = 2, even N: 2x2 arrangement of quadrants
struct DiskSpec {
  std::array<double, 3> center{};  // in cell units, wrapped periodically
  double radius = 0.0;             // cells strictly inside get disk_phase
  int disk_phase = 2;
};
struct RandomSpec {
  int n_phases = 2;
  std::uint64_t seed = 0;
};
using GeometrySpec =
    std::variant<LaminateSpec, CheckerboardSpec, DiskSpec, RandomSpec>;

PhaseMap make_geometry(const GeometrySpec& kind, const GridSpec& grid);

}  // namespace effop
