#include "strobo/spectral.hpp"

#include <cmath>
#include <mutex>

#include <Eigen/Eigenvalues>
#include <fftw3.h>

namespace strobo {

namespace {

// Planner calls are not thread-safe in FFTW; execution with the new-array
// interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const Complex* p) { return reinterpret_cast<fftw_complex*>(const_cast<Complex*>(p)); }

}  // namespace

const char* to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::Fourier1D: return "fourier1d";
    case BasisKind::Fourier2D: return "fourier2d";
    case BasisKind::Hermite1D: return "hermite1d";
    case BasisKind::Hermite2D: return "hermite2d";
  }
  return "unknown";
}

AlignedBuffer::AlignedBuffer(std::size_t n)
    : data_(reinterpret_cast<Complex*>(fftw_alloc_complex(n))), size_(n) {
  if (n > 0 && !data_) throw std::bad_alloc();
  for (std::size_t i = 0; i < n; ++i) data_[i] = Complex(0.0, 0.0);
}

void AlignedBuffer::Free::operator()(Complex* p) const { fftw_free(p); }

RMatrix hermite_functions(int max_degree, const RVector& points) {
  if (max_degree < 0) throw ConfigError("hermite_functions: max_degree must be >= 0");
  const Eigen::Index m = points.size();
  RMatrix h(m, max_degree + 1);
  constexpr double kRescale = 1e150;
  const double log_rescale = std::log(kRescale);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double x = points[j];
    double log_scale = -0.5 * x * x - 0.25 * std::log(kPi);
    double prev = 0.0;
    double cur = 1.0;
    h(j, 0) = std::exp(log_scale);
    for (int k = 0; k < max_degree; ++k) {
      const double next = x * std::sqrt(2.0 / (k + 1)) * cur - std::sqrt(double(k) / (k + 1)) * prev;
      prev = cur;
      cur = next;
      if (std::abs(cur) > kRescale) {
        cur /= kRescale;
        prev /= kRescale;
        log_scale += log_rescale;
      }
      h(j, k + 1) = cur * std::exp(log_scale);
    }
  }
  return h;
}

GaussHermiteRule gauss_hermite(int n) {
  if (n < 1) throw ConfigError("gauss_hermite: need at least one node");
  RVector diag = RVector::Zero(n);
  RVector sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<RMatrix> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  RVector x = solver.eigenvalues();

  // Newton on h_n(x) = 0, with h_n' = sqrt(2n) h_{n-1} - x h_n.
  for (int iter = 0; iter < 3; ++iter) {
    const RMatrix h = hermite_functions(n, x);
    for (int j = 0; j < n; ++j) {
      const double hn = h(j, n);
      const double dhn = std::sqrt(2.0 * n) * h(j, n - 1) - x[j] * hn;
      if (dhn != 0.0) x[j] -= hn / dhn;
    }
  }
  // Symmetrize: the rule is exactly symmetric about the origin.
  for (int j = 0; j < n / 2; ++j) {
    const double a = 0.5 * (x[n - 1 - j] - x[j]);
    x[j] = -a;
    x[n - 1 - j] = a;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;

  const RMatrix h = hermite_functions(n - 1, x);
  GaussHermiteRule rule;
  rule.nodes = x;
  rule.rescaled_weights = h.array().square().rowwise().sum().inverse().matrix();
  rule.weights = (rule.rescaled_weights.array() * (-x.array().square()).exp()).matrix();
  return rule;
}

struct SpectralBasis::Plans {
  fftw_plan backward = nullptr;
  fftw_plan forward = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (backward) fftw_destroy_plan(backward);
    if (forward) fftw_destroy_plan(forward);
  }
};

SpectralBasis::~SpectralBasis() = default;

std::shared_ptr<const SpectralBasis> SpectralBasis::fourier_1d(int nx) {
  if (nx < 2 || nx % 2 != 0) throw ConfigError("fourier_1d: nx must be even and >= 2");
  std::shared_ptr<SpectralBasis> b(new SpectralBasis());
  b->kind_ = BasisKind::Fourier1D;
  b->modes_x_ = b->nodes_x_ = nx;
  b->init_fourier();
  return b;
}

std::shared_ptr<const SpectralBasis> SpectralBasis::fourier_2d(int nx, int ny) {
  if (nx < 2 || nx % 2 != 0 || ny < 2 || ny % 2 != 0)
    throw ConfigError("fourier_2d: nx and ny must be even and >= 2");
  std::shared_ptr<SpectralBasis> b(new SpectralBasis());
  b->kind_ = BasisKind::Fourier2D;
  b->modes_x_ = b->nodes_x_ = nx;
  b->modes_y_ = b->nodes_y_ = ny;
  b->init_fourier();
  return b;
}

std::shared_ptr<const SpectralBasis> SpectralBasis::hermite_1d(int max_degree, int nodes) {
  if (max_degree < 0) throw ConfigError("hermite_1d: max_degree must be >= 0");
  if (nodes == 0) nodes = max_degree + 1;
  if (nodes < max_degree + 1) throw ConfigError("hermite_1d: need at least max_degree+1 nodes");
  std::shared_ptr<SpectralBasis> b(new SpectralBasis());
  b->kind_ = BasisKind::Hermite1D;
  b->modes_x_ = max_degree + 1;
  b->nodes_x_ = nodes;
  b->init_hermite();
  return b;
}

std::shared_ptr<const SpectralBasis> SpectralBasis::hermite_2d(int max_degree_x, int max_degree_y) {
  if (max_degree_x < 0 || max_degree_y < 0) throw ConfigError("hermite_2d: degrees must be >= 0");
  std::shared_ptr<SpectralBasis> b(new SpectralBasis());
  b->kind_ = BasisKind::Hermite2D;
  b->modes_x_ = b->nodes_x_ = max_degree_x + 1;
  b->modes_y_ = b->nodes_y_ = max_degree_y + 1;
  b->init_hermite();
  return b;
}

void SpectralBasis::init_fourier() {
  const double dx = kTwoPi / nodes_x_;
  const double dy = kTwoPi / nodes_y_;
  axis_x_ = RVector::LinSpaced(nodes_x_, 0.0, dx * (nodes_x_ - 1));
  axis_y_ = is_2d() ? RVector(RVector::LinSpaced(nodes_y_, 0.0, dy * (nodes_y_ - 1))) : RVector::Zero(1);
  weights_ = RVector::Constant(grid_size(), is_2d() ? dx * dy : dx);
  work_density_ = RVector::Ones(grid_size());
  work_to_physical_ = RVector::Ones(grid_size());

  plans_ = std::make_unique<Plans>();
  AlignedBuffer in(grid_size()), out(grid_size());
  std::lock_guard lock(planner_mutex());
  // FFTW_ESTIMATE keeps the chosen algorithm, and therefore the rounding,
  // identical from run to run.
  if (is_2d()) {
    plans_->backward = fftw_plan_dft_2d(nodes_x_, nodes_y_, as_fftw(in.data()), as_fftw(out.data()),
                                        FFTW_BACKWARD, FFTW_ESTIMATE);
    plans_->forward = fftw_plan_dft_2d(nodes_x_, nodes_y_, as_fftw(in.data()), as_fftw(out.data()),
                                       FFTW_FORWARD, FFTW_ESTIMATE);
  } else {
    plans_->backward = fftw_plan_dft_1d(nodes_x_, as_fftw(in.data()), as_fftw(out.data()),
                                        FFTW_BACKWARD, FFTW_ESTIMATE);
    plans_->forward = fftw_plan_dft_1d(nodes_x_, as_fftw(in.data()), as_fftw(out.data()),
                                       FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (!plans_->backward || !plans_->forward) throw ConfigError("FFT planning failed");
}

void SpectralBasis::init_hermite() {
  const GaussHermiteRule rx = gauss_hermite(nodes_x_);
  axis_x_ = rx.nodes;
  qx_ = hermite_functions(modes_x_ - 1, rx.nodes);
  qx_.array().colwise() *= rx.rescaled_weights.array().sqrt();
  RVector omega_y = RVector::Ones(1);
  if (is_2d()) {
    const GaussHermiteRule ry = gauss_hermite(nodes_y_);
    axis_y_ = ry.nodes;
    omega_y = ry.rescaled_weights;
    qy_ = hermite_functions(modes_y_ - 1, ry.nodes);
    qy_.array().colwise() *= ry.rescaled_weights.array().sqrt();
  } else {
    axis_y_ = RVector::Zero(1);
  }
  weights_.resize(grid_size());
  for (int ix = 0; ix < nodes_x_; ++ix)
    for (int iy = 0; iy < nodes_y_; ++iy)
      weights_[Eigen::Index(ix) * nodes_y_ + iy] = rx.rescaled_weights[ix] * omega_y[iy];
  work_density_ = weights_.cwiseInverse();
  work_to_physical_ = work_density_.cwiseSqrt();
}

int SpectralBasis::mode_x(Eigen::Index flat) const {
  const int ix = int(flat / modes_y_);
  if (is_fourier()) return ix <= modes_x_ / 2 ? ix : ix - modes_x_;
  return ix;
}

int SpectralBasis::mode_y(Eigen::Index flat) const {
  if (!is_2d()) return 0;
  const int iy = int(flat % modes_y_);
  if (is_fourier()) return iy <= modes_y_ / 2 ? iy : iy - modes_y_;
  return iy;
}

Eigen::Index SpectralBasis::find_mode(int kx, int ky) const {
  auto position = [this](int k, int n) -> int {
    if (is_fourier()) {
      if (k <= -n / 2 || k > n / 2) return -1;
      return k >= 0 ? k : k + n;
    }
    return (k < 0 || k >= n) ? -1 : k;
  };
  const int ix = position(kx, modes_x_);
  const int iy = is_2d() ? position(ky, modes_y_) : (ky == 0 ? 0 : -1);
  if (ix < 0 || iy < 0)
    throw ConfigError("mode (" + std::to_string(kx) + "," + std::to_string(ky) + ") not in basis");
  return Eigen::Index(ix) * modes_y_ + iy;
}

double SpectralBasis::coefficient_weight() const {
  switch (kind_) {
    case BasisKind::Fourier1D: return kTwoPi;
    case BasisKind::Fourier2D: return kTwoPi * kTwoPi;
    default: return 1.0;
  }
}

bool SpectralBasis::same_layout(const SpectralBasis& other) const {
  return this == &other || (kind_ == other.kind_ && modes_x_ == other.modes_x_ &&
                            modes_y_ == other.modes_y_ && nodes_x_ == other.nodes_x_ &&
                            nodes_y_ == other.nodes_y_);
}

void SpectralBasis::synthesize(const AlignedBuffer& coeffs, AlignedBuffer& work) const {
  if (is_fourier()) {
    fftw_execute_dft(plans_->backward, as_fftw(coeffs.data()), as_fftw(work.data()));
    return;
  }
  if (!is_2d()) {
    Eigen::Map<const CVector> c(coeffs.data(), modes_x_);
    Eigen::Map<CVector> w(work.data(), nodes_x_);
    w.noalias() = qx_ * c;
    return;
  }
  Eigen::Map<const Eigen::MatrixXcd> c(coeffs.data(), modes_y_, modes_x_);
  Eigen::Map<Eigen::MatrixXcd> w(work.data(), nodes_y_, nodes_x_);
  w.noalias() = qy_ * c * qx_.transpose();
}

void SpectralBasis::analyze(const AlignedBuffer& work, AlignedBuffer& coeffs) const {
  if (is_fourier()) {
    fftw_execute_dft(plans_->forward, as_fftw(work.data()), as_fftw(coeffs.data()));
    const double scale = 1.0 / double(grid_size());
    for (Eigen::Index i = 0; i < size(); ++i) coeffs[i] *= scale;
    return;
  }
  if (!is_2d()) {
    Eigen::Map<const CVector> w(work.data(), nodes_x_);
    Eigen::Map<CVector> c(coeffs.data(), modes_x_);
    c.noalias() = qx_.transpose() * w;
    return;
  }
  Eigen::Map<const Eigen::MatrixXcd> w(work.data(), nodes_y_, nodes_x_);
  Eigen::Map<Eigen::MatrixXcd> c(coeffs.data(), modes_y_, modes_x_);
  c.noalias() = qy_.transpose() * w * qx_;
}

CVector SpectralBasis::to_grid(const CVector& coeffs) const {
  if (coeffs.size() != size()) throw ConfigError("to_grid: coefficient count does not match basis");
  AlignedBuffer c(size()), w(grid_size());
  std::copy(coeffs.data(), coeffs.data() + size(), c.data());
  synthesize(c, w);
  CVector out(grid_size());
  for (Eigen::Index j = 0; j < grid_size(); ++j) out[j] = w[j] * work_to_physical_[j];
  return out;
}

CVector SpectralBasis::to_coeffs(const CVector& grid) const {
  if (grid.size() != grid_size()) throw ConfigError("to_coeffs: grid size does not match basis");
  AlignedBuffer c(size()), w(grid_size());
  for (Eigen::Index j = 0; j < grid_size(); ++j) w[j] = grid[j] / work_to_physical_[j];
  analyze(w, c);
  return CVector(Eigen::Map<const CVector>(c.data(), size()));
}

}  // namespace strobo
