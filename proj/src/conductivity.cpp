#include "effop/conductivity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <fftw3.h>

namespace effop {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int signed_freq(int t, int n) { return t <= n / 2 ? t : t - n; }

std::array<double, 3> unit_freq(const std::array<int, 3>& k, int d) {
  double norm2 = 0.0;
  for (int a = 0; a < d; ++a) norm2 += double(k[a]) * double(k[a]);
  const double inv = 1.0 / std::sqrt(norm2);
  std::array<double, 3> khat{};
  for (int a = 0; a < d; ++a) khat[a] = k[a] * inv;
  return khat;
}

// Deterministic orthonormal basis of the plane perpendicular to khat.
void perp_basis(const std::array<double, 3>& khat, int d,
                std::array<double, 3>& q1, std::array<double, 3>& q2) {
  if (d == 2) {
    q1 = {-khat[1], khat[0], 0.0};
    q2 = {0.0, 0.0, 0.0};
    return;
  }
  int a = 0;
  for (int c = 1; c < 3; ++c)
    if (std::abs(khat[c]) < std::abs(khat[a])) a = c;
  std::array<double, 3> v{};
  for (int c = 0; c < 3; ++c) v[c] = (c == a ? 1.0 : 0.0) - khat[a] * khat[c];
  double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  for (int c = 0; c < 3; ++c) q1[c] = v[c] / n;
  q2 = {khat[1] * q1[2] - khat[2] * q1[1], khat[2] * q1[0] - khat[0] * q1[2],
        khat[0] * q1[1] - khat[1] * q1[0]};
}

std::vector<Complex> unit_roots(int n) {
  std::vector<Complex> roots(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r)
    roots[static_cast<std::size_t>(r)] = std::polar(1.0, kTwoPi * r / n);
  return roots;
}

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Per-solve FFT workspace; never shared across concurrent solves.
class FftProjector {
 public:
  explicit FftProjector(const GridSpec& grid)
      : grid_(grid), m_(grid.cells()) {
    khat_.resize(static_cast<std::size_t>(m_));
    for (Index m = 0; m < m_; ++m) {
      if (m == 0) {
        khat_[0] = {0.0, 0.0, 0.0};
        continue;
      }
      const auto x = grid_.cell_coords(m);
      std::array<int, 3> k{};
      for (int a = 0; a < grid_.d; ++a) k[a] = signed_freq(x[a], grid_.n_cells);
      khat_[static_cast<std::size_t>(m)] = unit_freq(k, grid_.d);
    }
    buf_ = fftw_alloc_complex(static_cast<std::size_t>(m_));
    spectra_.assign(static_cast<std::size_t>(grid_.d),
                    Vector::Zero(m_));
    std::lock_guard<std::mutex> lock(planner_mutex());
    int n[3] = {grid_.n_cells, grid_.n_cells, grid_.n_cells};
    fwd_ = fftw_plan_dft(grid_.d, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft(grid_.d, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ~FftProjector() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }

  FftProjector(const FftProjector&) = delete;
  FftProjector& operator=(const FftProjector&) = delete;

  // In-place projection of a real full-space vector onto the discrete
  // gradient subspace E (zero mean, polarization parallel to k).
  void project_gradient(RealVector& field) {
    const int d = grid_.d;
    for (int c = 0; c < d; ++c) {
      for (Index m = 0; m < m_; ++m) {
        buf_[m][0] = field(c * m_ + m);
        buf_[m][1] = 0.0;
      }
      fftw_execute(fwd_);
      for (Index m = 0; m < m_; ++m)
        spectra_[static_cast<std::size_t>(c)](m) =
            Complex(buf_[m][0], buf_[m][1]);
    }
    for (Index m = 0; m < m_; ++m) {
      if (m == 0) {
        for (int c = 0; c < d; ++c) spectra_[static_cast<std::size_t>(c)](0) = 0.0;
        continue;
      }
      const auto& kh = khat_[static_cast<std::size_t>(m)];
      Complex g = 0.0;
      for (int c = 0; c < d; ++c)
        g += kh[static_cast<std::size_t>(c)] *
             spectra_[static_cast<std::size_t>(c)](m);
      for (int c = 0; c < d; ++c)
        spectra_[static_cast<std::size_t>(c)](m) =
            kh[static_cast<std::size_t>(c)] * g;
    }
    const double scale = 1.0 / static_cast<double>(m_);
    for (int c = 0; c < d; ++c) {
      for (Index m = 0; m < m_; ++m) {
        buf_[m][0] = spectra_[static_cast<std::size_t>(c)](m).real();
        buf_[m][1] = spectra_[static_cast<std::size_t>(c)](m).imag();
      }
      fftw_execute(bwd_);
      for (Index m = 0; m < m_; ++m) field(c * m_ + m) = buf_[m][0] * scale;
    }
  }

 private:
  GridSpec grid_;
  Index m_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
  std::vector<std::array<double, 3>> khat_;
  std::vector<Vector> spectra_;
};

void require_dense_cap(const GridSpec& grid, const char* what) {
  if (grid.dim() > kDenseDimCap) {
    std::ostringstream oss;
    oss << what << ": dense operators are capped at d*N^d <= " << kDenseDimCap
        << " (requested " << grid.dim() << ")";
    throw ValidationError(oss.str());
  }
}

}  // namespace

void GridSpec::validate() const {
  if (d != 2 && d != 3)
    throw ValidationError("grid: dimension must be 2 or 3");
  if (n_cells < 2) throw ValidationError("grid: need at least 2 cells per axis");
}

Index GridSpec::cells() const {
  Index m = 1;
  for (int a = 0; a < d; ++a) m *= n_cells;
  return m;
}

Index GridSpec::dim() const { return d * cells(); }

Index GridSpec::cell_index(const std::array<int, 3>& x) const {
  Index idx = 0;
  for (int a = 0; a < d; ++a) idx = idx * n_cells + x[a];
  return idx;
}

std::array<int, 3> GridSpec::cell_coords(Index idx) const {
  std::array<int, 3> x{};
  for (int a = d - 1; a >= 0; --a) {
    x[a] = static_cast<int>(idx % n_cells);
    idx /= n_cells;
  }
  return x;
}

PeriodicField::PeriodicField(GridSpec grid, Vector values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.dim())
    throw ShapeError("periodic field: value vector has wrong dimension");
  if (grid_.field == ScalarField::real && values_.size() > 0 &&
      values_.imag().cwiseAbs().maxCoeff() != 0.0)
    throw FieldError("periodic field: real-field grid with complex values");
}

Complex PeriodicField::inner(const PeriodicField& other) const {
  if (!(grid_ == other.grid_))
    throw ShapeError("periodic field: inner product across different grids");
  return values_.dot(other.values_) / static_cast<double>(grid_.cells());
}

Vector PeriodicField::average() const {
  const Index m = grid_.cells();
  Vector avg(grid_.d);
  for (int c = 0; c < grid_.d; ++c)
    avg(c) = values_.segment(c * m, m).sum() / static_cast<double>(m);
  return avg;
}

PhaseMap::PhaseMap(GridSpec grid, std::vector<int> phase_of_cell, int n_phases)
    : grid_(grid), phases_(std::move(phase_of_cell)), n_phases_(n_phases) {
  grid_.validate();
  if (n_phases_ < 1) throw ValidationError("phase map: need at least one phase");
  if (static_cast<Index>(phases_.size()) != grid_.cells())
    throw ShapeError("phase map: cell count does not match the grid");
  std::vector<bool> seen(static_cast<std::size_t>(n_phases_), false);
  for (int p : phases_) {
    if (p < 1 || p > n_phases_)
      throw ValidationError("phase map: phase index " + std::to_string(p) +
                            " out of range 1.." + std::to_string(n_phases_));
    seen[static_cast<std::size_t>(p - 1)] = true;
  }
  for (int i = 0; i < n_phases_; ++i)
    if (!seen[static_cast<std::size_t>(i)])
      throw ValidationError("phase map: phase " + std::to_string(i + 1) +
                            " is empty");
}

std::vector<double> PhaseMap::volume_fractions() const {
  std::vector<double> f(static_cast<std::size_t>(n_phases_), 0.0);
  for (int p : phases_) f[static_cast<std::size_t>(p - 1)] += 1.0;
  const double m = static_cast<double>(grid_.cells());
  for (double& x : f) x /= m;
  return f;
}

PhaseMap PhaseMap::with_field(ScalarField f) const {
  GridSpec g = grid_;
  g.field = f;
  return PhaseMap(g, phases_, n_phases_);
}

HodgeDecomposition hodge_projections(const GridSpec& grid) {
  grid.validate();
  require_dense_cap(grid, "hodge_projections");
  const int d = grid.d;
  const int n = grid.n_cells;
  const Index m = grid.cells();
  const Index dim = grid.dim();
  const auto roots = unit_roots(n);
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));

  Matrix b0 = Matrix::Zero(dim, d);
  for (int c = 0; c < d; ++c)
    b0.col(c).segment(c * m, m).setConstant(inv_sqrt_m);

  Matrix b1 = Matrix::Zero(dim, m - 1);
  Matrix b2 = Matrix::Zero(dim, (d - 1) * (m - 1));

  // Phase index (k . x) mod N for cell `cell`, using the unsigned tuple.
  auto wave_index = [&](const std::array<int, 3>& t, Index cell) {
    const auto x = grid.cell_coords(cell);
    long long r = 0;
    for (int a = 0; a < d; ++a) r += static_cast<long long>(t[a]) * x[a];
    return static_cast<std::size_t>(r % n);
  };

  Index e_col = 0;
  Index j_col = 0;
  auto emit_complex = [&](const std::array<int, 3>& t) {
    std::array<int, 3> k{};
    for (int a = 0; a < d; ++a) k[a] = signed_freq(t[a], n);
    const auto khat = unit_freq(k, d);
    std::array<double, 3> q1{}, q2{};
    perp_basis(khat, d, q1, q2);
    for (Index cell = 0; cell < m; ++cell) {
      const Complex w = roots[wave_index(t, cell)] * inv_sqrt_m;
      for (int c = 0; c < d; ++c) {
        b1(c * m + cell, e_col) = khat[c] * w;
        b2(c * m + cell, j_col) = q1[c] * w;
        if (d == 3) b2(c * m + cell, j_col + 1) = q2[c] * w;
      }
    }
    e_col += 1;
    j_col += d - 1;
  };

  auto emit_real = [&](const std::array<int, 3>& t, bool self_paired) {
    std::array<int, 3> k{};
    for (int a = 0; a < d; ++a) k[a] = signed_freq(t[a], n);
    const auto khat = unit_freq(k, d);
    std::array<double, 3> q1{}, q2{};
    perp_basis(khat, d, q1, q2);
    const double amp = self_paired ? inv_sqrt_m : std::numbers::sqrt2 * inv_sqrt_m;
    for (Index cell = 0; cell < m; ++cell) {
      const Complex w = roots[wave_index(t, cell)];
      const double cw = amp * w.real();
      const double sw = amp * w.imag();
      for (int c = 0; c < d; ++c) {
        b1(c * m + cell, e_col) = khat[c] * cw;
        b2(c * m + cell, j_col) = q1[c] * cw;
        if (d == 3) b2(c * m + cell, j_col + 1) = q2[c] * cw;
        if (!self_paired) {
          b1(c * m + cell, e_col + 1) = khat[c] * sw;
          b2(c * m + cell, j_col + (d - 1)) = q1[c] * sw;
          if (d == 3) b2(c * m + cell, j_col + (d - 1) + 1) = q2[c] * sw;
        }
      }
    }
    e_col += self_paired ? 1 : 2;
    j_col += self_paired ? (d - 1) : 2 * (d - 1);
  };

  for (Index fm = 1; fm < m; ++fm) {
    const auto t = grid.cell_coords(fm);
    if (grid.field == ScalarField::cplx) {
      emit_complex(t);
      continue;
    }
    std::array<int, 3> tneg{};
    for (int a = 0; a < d; ++a) tneg[a] = (n - t[a]) % n;
    const Index partner = grid.cell_index(tneg);
    if (fm > partner) continue;  // handled with its representative
    emit_real(t, fm == partner);
  }
  if (e_col != m - 1 || j_col != (d - 1) * (m - 1))
    throw Error("hodge_projections: internal column count mismatch");

  return HodgeDecomposition{
      grid, TripleDecomposition(Operator(std::move(b0), grid.field),
                                Operator(std::move(b1), grid.field),
                                Operator(std::move(b2), grid.field), 1e-10)};
}

SubspaceCollection phase_collection(const PhaseMap& pm,
                                    const HodgeDecomposition& hodge) {
  if (!(pm.grid() == hodge.grid))
    throw ShapeError("phase_collection: phase map and decomposition use "
                     "different grids");
  const GridSpec& grid = pm.grid();
  require_dense_cap(grid, "phase_collection");
  const Index m = grid.cells();
  const Index dim = grid.dim();
  std::vector<Operator> lambdas;
  lambdas.reserve(static_cast<std::size_t>(pm.n_phases()));
  for (int i = 1; i <= pm.n_phases(); ++i) {
    Matrix li = Matrix::Zero(dim, dim);
    for (Index cell = 0; cell < m; ++cell) {
      if (pm.phase(cell) != i) continue;
      for (int c = 0; c < grid.d; ++c) li(c * m + cell, c * m + cell) = 1.0;
    }
    lambdas.emplace_back(std::move(li), grid.field);
  }
  return SubspaceCollection(hodge.space, std::move(lambdas), 1e-12);
}

Operator rotation_operator(const GridSpec& grid) {
  grid.validate();
  if (grid.d != 2)
    throw ValidationError("rotation_operator: defined only for d = 2");
  require_dense_cap(grid, "rotation_operator");
  const Index m = grid.cells();
  Matrix r = Matrix::Zero(grid.dim(), grid.dim());
  for (Index cell = 0; cell < m; ++cell) {
    r(cell, m + cell) = 1.0;
    r(m + cell, cell) = -1.0;
  }
  return Operator(std::move(r), grid.field);
}

CgResult cg_cell_solve(const PhaseMap& pm, const PencilPoint& z,
                       const RealVector& e0, double tol, int max_iter) {
  const GridSpec& grid = pm.grid();
  if (z.size() != pm.n_phases())
    throw ShapeError("cg_cell_solve: z length does not match the phase count");
  if (!z.all_positive())
    throw ValidationError(
        "cg_cell_solve: the cg backend requires real positive z");
  if (e0.size() != grid.d)
    throw ShapeError("cg_cell_solve: E0 must have one entry per axis");

  const Index m = grid.cells();
  const Index dim = grid.dim();
  std::vector<double> sigma(static_cast<std::size_t>(m));
  for (Index cell = 0; cell < m; ++cell)
    sigma[static_cast<std::size_t>(cell)] = z[pm.phase(cell) - 1].real();

  auto apply_sigma = [&](RealVector& f) {
    for (int c = 0; c < grid.d; ++c)
      for (Index cell = 0; cell < m; ++cell)
        f(c * m + cell) *= sigma[static_cast<std::size_t>(cell)];
  };

  FftProjector proj(grid);

  RealVector b(dim);
  for (int c = 0; c < grid.d; ++c) b.segment(c * m, m).setConstant(e0(c));
  apply_sigma(b);
  proj.project_gradient(b);
  b = -b;
  const double b_norm = b.norm();

  const Index dim_e = m - 1;
  if (max_iter <= 0) max_iter = static_cast<int>(5 * dim_e);

  RealVector x = RealVector::Zero(dim);
  auto make_result = [&](int it, double rel, bool conv) {
    return CgResult{PeriodicField(grid, x.cast<Complex>()), it, rel, conv};
  };
  if (b_norm == 0.0) return make_result(0, 0.0, true);

  RealVector r = b;
  RealVector p = r;
  RealVector q(dim);
  double rr = r.squaredNorm();
  int it = 0;
  while (it < max_iter) {
    ++it;
    q = p;
    apply_sigma(q);
    proj.project_gradient(q);
    const double alpha = rr / p.dot(q);
    x += alpha * p;
    r -= alpha * q;
    const double rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= tol * b_norm) {
      rr = rr_next;
      return make_result(it, std::sqrt(rr) / b_norm, true);
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return make_result(it, std::sqrt(rr) / b_norm, false);
}

CellProblem::CellProblem(PhaseMap pm) : pm_(std::move(pm)) {}

void CellProblem::ensure_dense() const {
  std::call_once(dense_once_, [this] {
    const GridSpec& grid = pm_.grid();
    require_dense_cap(grid, "dense backend");
    hodge_ = std::make_unique<HodgeDecomposition>(hodge_projections(grid));
    const TripleDecomposition& sp = hodge_->space;
    const Index m = grid.cells();
    Matrix bue(sp.dim(), sp.subdim(0) + sp.subdim(1));
    bue << sp.basis(0).mat(), sp.basis(1).mat();
    std::vector<Operator> coeffs;
    coeffs.reserve(static_cast<std::size_t>(pm_.n_phases()));
    for (int i = 1; i <= pm_.n_phases(); ++i) {
      Matrix masked = bue;
      for (Index cell = 0; cell < m; ++cell) {
        if (pm_.phase(cell) == i) continue;
        for (int c = 0; c < grid.d; ++c) masked.row(c * m + cell).setZero();
      }
      coeffs.emplace_back(Matrix(bue.adjoint() * masked), grid.field);
    }
    pencil_ = std::make_unique<NormalizedPencil>(
        std::move(coeffs), BlockPartition::two(sp.subdim(0), sp.subdim(1)),
        1e-10);
  });
}

const HodgeDecomposition& CellProblem::hodge() const {
  ensure_dense();
  return *hodge_;
}

const NormalizedPencil& CellProblem::pencil() const {
  ensure_dense();
  return *pencil_;
}

SubspaceCollection CellProblem::collection() const {
  return phase_collection(pm_, hodge());
}

EffectiveResult CellProblem::effective_detailed(const PencilPoint& z,
                                                Backend backend,
                                                const CgOptions& opts) const {
  const GridSpec& grid = pm_.grid();
  if (z.size() != pm_.n_phases())
    throw ShapeError("effective: z length does not match the phase count");
  if (!in_domain_D(z))
    throw ValidationError("effective: z is outside the admissible domain D");
  if (grid.field == ScalarField::real && !z.all_real())
    throw ValidationError(
        "effective: complex z requires a complex-field grid");

  if (backend == Backend::dense) {
    PencilSchur s = schur_of_pencil_detailed(pencil(), z);
    return {std::move(s.value), s.solve_residual, 0};
  }

  if (!z.all_positive())
    throw ValidationError("effective: cg backend requires real positive z");
  const Index m = grid.cells();
  Matrix sigma_star = Matrix::Zero(grid.d, grid.d);
  double worst_res = 0.0;
  int worst_iters = 0;
  for (int j = 0; j < grid.d; ++j) {
    RealVector e0 = RealVector::Zero(grid.d);
    e0(j) = 1.0;
    CgResult r = cg_cell_solve(pm_, z, e0, opts.tol, opts.max_iter);
    if (!r.converged) {
      std::ostringstream oss;
      oss << "effective: cg did not converge after " << r.iterations
          << " iterations (residual " << r.residual << ")";
      throw CgError(oss.str(), r.residual, r.iterations);
    }
    worst_res = std::max(worst_res, r.residual);
    worst_iters = std::max(worst_iters, r.iterations);
    // sigma* e_j = <sigma (E0 + E)>, the averaged flux of the solved field.
    for (int c = 0; c < grid.d; ++c) {
      double acc = 0.0;
      for (Index cell = 0; cell < m; ++cell) {
        const double field_val =
            (c == j ? 1.0 : 0.0) + r.e_field.values()(c * m + cell).real();
        acc += z[pm_.phase(cell) - 1].real() * field_val;
      }
      sigma_star(c, j) = acc / static_cast<double>(m);
    }
  }
  return {Operator(std::move(sigma_star), grid.field), worst_res, worst_iters};
}

Operator CellProblem::effective(const PencilPoint& z, Backend backend,
                                const CgOptions& opts) const {
  return effective_detailed(z, backend, opts).sigma;
}

double CellProblem::duality_residual(const PencilPoint& z) const {
  if (grid().d != 2)
    throw ValidationError("duality check: defined only for d = 2");
  Operator s = effective(z, Backend::dense);
  Operator s_inv_pt = effective(z.componentwise_inverse(), Backend::dense);
  Matrix inv = detail::gated_solve(s_inv_pt.mat(), Matrix(Matrix::Identity(2, 2)),
                                   s_inv_pt.field(), kInvertRtol,
                                   "duality check: sigma*(z^{-1})");
  Matrix r(2, 2), r_inv(2, 2);
  r << 0, 1, -1, 0;
  r_inv << 0, -1, 1, 0;
  return relative_residual(r * inv * r_inv, s.mat());
}

Operator effective_conductivity(const PhaseMap& pm, const PencilPoint& z,
                                Backend backend, const CgOptions& opts) {
  return CellProblem(pm).effective(z, backend, opts);
}

double duality_relation_check(const PhaseMap& pm, const PencilPoint& z) {
  return CellProblem(pm).duality_residual(z);
}

std::pair<double, double> wiener_fraction_bounds(const PhaseMap& pm,
                                                 const PencilPoint& z) {
  if (z.size() != pm.n_phases())
    throw ShapeError("wiener_fraction_bounds: z length does not match the "
                     "phase count");
  if (!z.all_positive())
    throw ValidationError(
        "wiener_fraction_bounds: all components of z must be real positive");
  const auto f = pm.volume_fractions();
  double harm = 0.0, arith = 0.0;
  for (Index i = 0; i < z.size(); ++i) {
    harm += f[static_cast<std::size_t>(i)] / z[i].real();
    arith += f[static_cast<std::size_t>(i)] * z[i].real();
  }
  return {1.0 / harm, arith};
}

namespace {

PhaseMap make_laminate(const LaminateSpec& spec, const GridSpec& grid) {
  grid.validate();
  if (spec.axis < 0 || spec.axis >= grid.d)
    throw ValidationError("laminate: axis out of range");
  const int n = grid.n_cells;
  const double slabs = spec.fraction * n;
  const long long rounded = std::llround(slabs);
  if (std::abs(slabs - static_cast<double>(rounded)) > 1e-9 * n)
    throw ValidationError(
        "laminate: fraction is not realizable on an N=" + std::to_string(n) +
        " grid");
  if (rounded < 1 || rounded > n - 1)
    throw ValidationError("laminate: fraction leaves a phase empty");
  std::vector<int> phases(static_cast<std::size_t>(grid.cells()));
  for (Index cell = 0; cell < grid.cells(); ++cell) {
    const auto x = grid.cell_coords(cell);
    phases[static_cast<std::size_t>(cell)] =
        x[spec.axis] < rounded ? 1 : 2;
  }
  return PhaseMap(grid, std::move(phases), 2);
}

PhaseMap make_checkerboard(const GridSpec& grid) {
  grid.validate();
  if (grid.d != 2)
    throw ValidationError("checkerboard: requires d = 2");
  if (grid.n_cells % 2 != 0)
    throw ValidationError("checkerboard: requires an even cell count");
  const int half = grid.n_cells / 2;
  std::vector<int> phases(static_cast<std::size_t>(grid.cells()));
  for (Index cell = 0; cell < grid.cells(); ++cell) {
    const auto x = grid.cell_coords(cell);
    const bool q0 = x[0] >= half;
    const bool q1 = x[1] >= half;
    phases[static_cast<std::size_t>(cell)] = 1 + (q0 != q1 ? 1 : 0);
  }
  return PhaseMap(grid, std::move(phases), 2);
}

PhaseMap make_disk(const DiskSpec& spec, const GridSpec& grid) {
  grid.validate();
  if (spec.disk_phase != 1 && spec.disk_phase != 2)
    throw ValidationError("disk: disk phase must be 1 or 2");
  const int background = 3 - spec.disk_phase;
  const int n = grid.n_cells;
  std::vector<int> phases(static_cast<std::size_t>(grid.cells()));
  for (Index cell = 0; cell < grid.cells(); ++cell) {
    const auto x = grid.cell_coords(cell);
    double dist2 = 0.0;
    for (int a = 0; a < grid.d; ++a) {
      double dx = std::abs(static_cast<double>(x[a]) - spec.center[a]);
      dx = std::min(dx, n - dx);  // periodic wrap
      dist2 += dx * dx;
    }
    phases[static_cast<std::size_t>(cell)] =
        dist2 < spec.radius * spec.radius ? spec.disk_phase : background;
  }
  return PhaseMap(grid, std::move(phases), 2);
}

PhaseMap make_random(const RandomSpec& spec, const GridSpec& grid) {
  grid.validate();
  if (spec.n_phases < 1)
    throw ValidationError("random geometry: need at least one phase");
  std::mt19937_64 rng(spec.seed);
  std::vector<int> phases(static_cast<std::size_t>(grid.cells()));
  for (auto& p : phases)
    p = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(spec.n_phases));
  return PhaseMap(grid, std::move(phases), spec.n_phases);
}

}  // namespace

PhaseMap make_geometry(const GeometrySpec& kind, const GridSpec& grid) {
  return std::visit(
      [&](const auto& spec) -> PhaseMap {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, LaminateSpec>)
          return make_laminate(spec, grid);
        else if constexpr (std::is_same_v<T, CheckerboardSpec>)
          return make_checkerboard(grid);
        else if constexpr (std::is_same_v<T, DiskSpec>)
          return make_disk(spec, grid);
        else
          return make_random(spec, grid);
      },
      kind);
}

}  // namespace effop
