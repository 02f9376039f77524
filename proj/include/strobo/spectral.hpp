#pragma once

#include <cstddef>
#include <memory>

#include "strobo/types.hpp"

namespace strobo {

enum class BasisKind { Fourier1D, Fourier2D, Hermite1D, Hermite2D };

const char* to_string(BasisKind kind);

/// Complex buffer allocated with the FFT library's allocator so that every
/// buffer shares the alignment the transform plans were created with.
class AlignedBuffer {
 public:
  AlignedBuffer() = default;
  explicit AlignedBuffer(std::size_t n);

  Complex* data() { return data_.get(); }
  const Complex* data() const { return data_.get(); }
  std::size_t size() const { return size_; }
  Complex& operator[](std::size_t i) { return data_[i]; }
  const Complex& operator[](std::size_t i) const { return data_[i]; }

 private:
  struct Free {
    void operator()(Complex* p) const;
  };
  std::unique_ptr<Complex[], Free> data_;
  std::size_t size_ = 0;
};

/// Gauss-Hermite rule for the weight e^{-x^2}.
struct GaussHermiteRule {
  RVector nodes;
  RVector weights;           // w_j, integrate p(x) e^{-x^2}
  RVector rescaled_weights;  // omega_j = w_j e^{x_j^2}
};

/// Nodes from the symmetric tridiagonal (Golub-Welsch) eigenproblem, polished
/// by Newton iterations on h_n. Weights via omega_j = 1 / sum_k h_k(x_j)^2.
GaussHermiteRule gauss_hermite(int n);

/// Normalized Hermite functions h_0..h_max_degree at the given points.
/// Returns a (points x (max_degree+1)) matrix. The recurrence is carried with
/// a running log-scale so large |x| neither overflows nor underflows early.
RMatrix hermite_functions(int max_degree, const RVector& points);

/// Fourier or Hermite spectral basis in one or two dimensions.
///
/// Coefficients are stored flat with index ix * modes_y() + iy. Fourier
/// wavenumbers follow {-N/2+1, ..., N/2} stored in FFT order; Hermite modes
/// are indexed by degree. Instances are immutable and safe to share.
class SpectralBasis {
 public:
  static std::shared_ptr<const SpectralBasis> fourier_1d(int nx);
  static std::shared_ptr<const SpectralBasis> fourier_2d(int nx, int ny);
  /// max_degree = N gives N+1 basis functions; nodes defaults to N+1.
  static std::shared_ptr<const SpectralBasis> hermite_1d(int max_degree, int nodes = 0);
  static std::shared_ptr<const SpectralBasis> hermite_2d(int max_degree_x, int max_degree_y);

  ~SpectralBasis();
  SpectralBasis(const SpectralBasis&) = delete;
  SpectralBasis& operator=(const SpectralBasis&) = delete;

  BasisKind kind() const { return kind_; }
  bool is_fourier() const { return kind_ == BasisKind::Fourier1D || kind_ == BasisKind::Fourier2D; }
  bool is_2d() const { return kind_ == BasisKind::Fourier2D || kind_ == BasisKind::Hermite2D; }

  Eigen::Index size() const { return Eigen::Index(modes_x_) * modes_y_; }
  Eigen::Index grid_size() const { return Eigen::Index(nodes_x_) * nodes_y_; }
  int modes_x() const { return modes_x_; }
  int modes_y() const { return modes_y_; }
  int nodes_x() const { return nodes_x_; }
  int nodes_y() const { return nodes_y_; }

  /// Signed wavenumber (Fourier) or degree (Hermite) of a flat coefficient index.
  int mode_x(Eigen::Index flat) const;
  int mode_y(Eigen::Index flat) const;
  /// Flat coefficient index of a wavenumber/degree pair; throws ConfigError
  /// when the mode is not represented.
  Eigen::Index find_mode(int kx, int ky = 0) const;

  /// Grid coordinates along each axis and the quadrature weight of every
  /// flat grid node (dx dy for Fourier, omega_i omega_j for Hermite).
  const RVector& axis_x() const { return axis_x_; }
  const RVector& axis_y() const { return axis_y_; }
  const RVector& weights() const { return weights_; }
  double grid_x(Eigen::Index flat) const { return axis_x_[flat / nodes_y_]; }
  double grid_y(Eigen::Index flat) const { return axis_y_[flat % nodes_y_]; }

  /// Factor c with sum_j |psi_j|^2 w_j = c * sum_k |coeff_k|^2.
  double coefficient_weight() const;

  CVector to_grid(const CVector& coeffs) const;
  CVector to_coeffs(const CVector& grid) const;

  bool same_layout(const SpectralBasis& other) const;

  // Fast path for propagators. The "work grid" holds values w_j with
  // |psi(x_j)|^2 = work_density()[j] * |w_j|^2 (unit density for Fourier,
  // 1/omega_j for Hermite so the Hermite transforms are orthogonal).
  void synthesize(const AlignedBuffer& coeffs, AlignedBuffer& work) const;
  void analyze(const AlignedBuffer& work, AlignedBuffer& coeffs) const;
  const RVector& work_density() const { return work_density_; }
  /// Converts between work-grid values and physical grid values.
  const RVector& work_to_physical() const { return work_to_physical_; }

 private:
  struct Plans;

  SpectralBasis() = default;
  void init_fourier();
  void init_hermite();

  BasisKind kind_ = BasisKind::Fourier1D;
  int modes_x_ = 1, modes_y_ = 1;
  int nodes_x_ = 1, nodes_y_ = 1;
  RVector axis_x_, axis_y_, weights_;
  RVector work_density_, work_to_physical_;
  // Hermite: orthogonal synthesis matrices Q_{jk} = h_k(x_j) sqrt(omega_j).
  RMatrix qx_, qy_;
  std::unique_ptr<Plans> plans_;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

}  // namespace strobo
