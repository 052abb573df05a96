#pragma once

// Dense-matrix reference implementations. Everything here works from explicit
// density matrices and never uses the closed-form product formulas, so it can
// be used to check them.

#include <quadmath.h>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "thermalfid/model.hpp"

namespace thermalfid::oracle {

/// Uhlmann fidelity of nearly pure states is sqrt-sensitive to rounding in the
/// matrix entries; the verification paths therefore run in binary128.
using Quad = __float128;

namespace detail {
inline double rsqrt(double x) { return std::sqrt(x); }
inline double rexp(double x) { return std::exp(x); }
inline double rcos(double x) { return std::cos(x); }
inline double rsin(double x) { return std::sin(x); }
inline double rabs(double x) { return std::fabs(x); }
inline Quad rsqrt(Quad x) { return sqrtq(x); }
inline Quad rexp(Quad x) { return expq(x); }
inline Quad rcos(Quad x) { return cosq(x); }
inline Quad rsin(Quad x) { return sinq(x); }
inline Quad rabs(Quad x) { return fabsq(x); }
inline double epsilon_of(double) { return std::numeric_limits<double>::epsilon(); }
inline Quad epsilon_of(Quad) { return static_cast<Quad>(0x1p-112); }
}  // namespace detail

/// Complex number over a pair of reals.
template <class Real>
struct Complex {
  Real re{};
  Real im{};

  constexpr Complex() = default;
  constexpr Complex(Real r, Real i = Real(0)) : re(r), im(i) {}

  friend constexpr Complex operator+(Complex a, Complex b) { return {a.re + b.re, a.im + b.im}; }
  friend constexpr Complex operator-(Complex a, Complex b) { return {a.re - b.re, a.im - b.im}; }
  friend constexpr Complex operator-(Complex a) { return {-a.re, -a.im}; }
  friend constexpr Complex operator*(Complex a, Complex b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend constexpr Complex operator*(Real s, Complex a) { return {s * a.re, s * a.im}; }
  Complex& operator+=(Complex b) { re += b.re; im += b.im; return *this; }

  friend constexpr Complex conj(Complex a) { return {a.re, -a.im}; }
  friend constexpr Real norm2(Complex a) { return a.re * a.re + a.im * a.im; }
  friend Real abs(Complex a) { return detail::rsqrt(norm2(a)); }
};

/// Square complex matrix, row-major.
template <class Real>
class Matrix {
 public:
  using value_type = Complex<Real>;

  Matrix() = default;
  explicit Matrix(std::size_t dim) : dim_(dim), a_(dim * dim) {}

  static Matrix identity(std::size_t dim);
  static Matrix diagonal(const std::vector<Real>& values);

  std::size_t dim() const noexcept { return dim_; }
  value_type& operator()(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
  const value_type& operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }

  Matrix adjoint() const;
  Real frobenius() const;
  value_type trace() const;

  friend Matrix operator*(const Matrix& x, const Matrix& y) { return x.multiply(y); }
  friend Matrix operator-(const Matrix& x, const Matrix& y) { return x.combine(y, Real(-1)); }
  friend Matrix operator+(const Matrix& x, const Matrix& y) { return x.combine(y, Real(1)); }

 private:
  Matrix multiply(const Matrix& y) const;
  Matrix combine(const Matrix& y, Real sign) const;

  std::size_t dim_ = 0;
  std::vector<value_type> a_;
};

template <class Real>
Matrix<Real> kron(const Matrix<Real>& x, const Matrix<Real>& y);

inline constexpr std::size_t kMaxDim = 64;
inline constexpr double kHermitianTolerance = 1e-13;

/// Hermitian matrix of dimension 1..64. The checked constructor rejects
/// inputs whose entries violate a_ij = conj(a_ji) by more than 1e-13
/// (relative to the largest entry, floor 1).
template <class Real>
class DenseHermitian {
 public:
  explicit DenseHermitian(Matrix<Real> m);

  /// (m + m^+)/2; for products that are Hermitian up to rounding.
  static DenseHermitian hermitized(const Matrix<Real>& m);

  std::size_t dim() const noexcept { return m_.dim(); }
  const Matrix<Real>& matrix() const noexcept { return m_; }
  Complex<Real> operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

 private:
  struct Unchecked {};
  DenseHermitian(Matrix<Real> m, Unchecked) : m_(std::move(m)) {}

  Matrix<Real> m_;
};

template <class Real>
struct EigenDecomposition {
  std::vector<Real> values;  // ascending
  Matrix<Real> vectors;      // columns are eigenvectors
  int sweeps = 0;
};

/// Cyclic complex Jacobi. Throws NumericalError if the off-diagonal norm is
/// not reduced below ~n eps ||a|| within 50 sweeps.
template <class Real>
EigenDecomposition<Real> eig_hermitian(const DenseHermitian<Real>& a);

/// V diag(sqrt(values)) V^+. Eigenvalues down to -1e-12 are clamped to 0;
/// anything more negative is a NumericalError.
template <class Real>
DenseHermitian<Real> sqrt_psd(const DenseHermitian<Real>& a);

/// tr sqrt(r1^{1/2} r0 r1^{1/2}). Both arguments must be PSD with unit trace
/// (within 1e-10).
template <class Real>
Real uhlmann_fidelity(const DenseHermitian<Real>& r0, const DenseHermitian<Real>& r1);

/// H_k = eps (n_k + n_-k) + delta (-i c_k^+ c_-k^+ + h.c.) on the 4-dim Fock
/// space of the pair, built from Jordan-Wigner fermion operators. Basis order
/// |00>, |11> (even sector), |01>, |10> (odd sector).
template <class Real>
DenseHermitian<Real> mode_hamiltonian_dense(const MomentumMode& m);

/// exp(-beta H_k) / tr exp(-beta H_k), exponentiated through the
/// eigendecomposition with the ground energy shifted out (no overflow).
template <class Real>
DenseHermitian<Real> mode_density_dense(const MomentumMode& m, double beta);

/// exp(-i H_k t), odd-sector phase included.
template <class Real>
Matrix<Real> mode_propagator(const MomentumMode& m, double t);

/// Uhlmann fidelity of two 4x4 mode thermal states, evaluated in binary128.
double dense_thermal_fidelity(const MomentumMode& m0, const MomentumMode& m1, double beta0,
                              double beta1);

/// F(rho, W rho W^+) with rho the thermal state of m0 and W = U1(t)^+ U0(t).
double dense_echo(const MomentumMode& m0, const MomentumMode& m1, double beta, double t);

/// Random-draw verification of the analytic kernels against the dense path.
struct OracleReport {
  std::uint64_t seed = 0;
  std::size_t fidelity_draws = 0;
  std::size_t echo_draws = 0;
  std::size_t product_draws = 0;
  double max_fidelity_deviation = 0.0;
  double max_echo_deviation = 0.0;
  double max_product_deviation = 0.0;  // 16x16 vs product of 4x4 fidelities
  double fidelity_tolerance = 1e-10;
  double echo_tolerance = 1e-10;
  double product_tolerance = 1e-12;

  bool passed() const {
    return max_fidelity_deviation <= fidelity_tolerance && max_echo_deviation <= echo_tolerance &&
           max_product_deviation <= product_tolerance;
  }
};

/// `draws` fidelity cases, draws/2 echo cases and draws/10 two-mode product
/// cases (each at least one). Parameters: Lambda in [0,5], theta in (-pi,pi],
/// beta in [0.01,50], t in [0,20].
OracleReport run_oracle_checks(std::uint64_t seed, std::size_t draws);

/// Deterministic uniform doubles from a 64-bit Mersenne twister.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed);
  double next();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }
  double angle();  // (-pi, pi]

 private:
  std::mt19937_64 engine_;
};

#define THERMALFID_ORACLE_EXTERN(Real)                                                         \
  extern template class Matrix<Real>;                                                          \
  extern template class DenseHermitian<Real>;                                                  \
  extern template Matrix<Real> kron(const Matrix<Real>&, const Matrix<Real>&);                 \
  extern template EigenDecomposition<Real> eig_hermitian(const DenseHermitian<Real>&);         \
  extern template DenseHermitian<Real> sqrt_psd(const DenseHermitian<Real>&);                  \
  extern template Real uhlmann_fidelity(const DenseHermitian<Real>&, const DenseHermitian<Real>&); \
  extern template DenseHermitian<Real> mode_hamiltonian_dense(const MomentumMode&);            \
  extern template DenseHermitian<Real> mode_density_dense(const MomentumMode&, double);        \
  extern template Matrix<Real> mode_propagator(const MomentumMode&, double);

THERMALFID_ORACLE_EXTERN(double)
THERMALFID_ORACLE_EXTERN(Quad)
#undef THERMALFID_ORACLE_EXTERN

}  // namespace thermalfid::oracle
