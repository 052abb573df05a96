#include "thermalfid/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "thermalfid/error.hpp"
#include "thermalfid/fidelity.hpp"
#include "thermalfid/loschmidt.hpp"

namespace thermalfid::oracle {

using detail::rabs;
using detail::rcos;
using detail::rexp;
using detail::rsin;
using detail::rsqrt;

// ---- Matrix ---------------------------------------------------------------

template <class Real>
Matrix<Real> Matrix<Real>::identity(std::size_t dim) {
  Matrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = value_type(Real(1));
  return m;
}

template <class Real>
Matrix<Real> Matrix<Real>::diagonal(const std::vector<Real>& values) {
  Matrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = value_type(values[i]);
  return m;
}

template <class Real>
Matrix<Real> Matrix<Real>::adjoint() const {
  Matrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = conj((*this)(i, j));
  return out;
}

template <class Real>
Real Matrix<Real>::frobenius() const {
  Real s = 0;
  for (const auto& z : a_) s += norm2(z);
  return rsqrt(s);
}

template <class Real>
typename Matrix<Real>::value_type Matrix<Real>::trace() const {
  value_type t;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

template <class Real>
Matrix<Real> Matrix<Real>::multiply(const Matrix& y) const {
  if (y.dim_ != dim_) throw DimensionMismatch("Matrix: product of different dimensions");
  Matrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t k = 0; k < dim_; ++k) {
      const value_type x = (*this)(i, k);
      if (x.re == Real(0) && x.im == Real(0)) continue;
      for (std::size_t j = 0; j < dim_; ++j) out(i, j) += x * y(k, j);
    }
  return out;
}

template <class Real>
Matrix<Real> Matrix<Real>::combine(const Matrix& y, Real sign) const {
  if (y.dim_ != dim_) throw DimensionMismatch("Matrix: sum of different dimensions");
  Matrix out(dim_);
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] + sign * y.a_[i];
  return out;
}

template <class Real>
Matrix<Real> kron(const Matrix<Real>& x, const Matrix<Real>& y) {
  const std::size_t n = x.dim();
  const std::size_t m = y.dim();
  Matrix<Real> out(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) out(i * m + k, j * m + l) = x(i, j) * y(k, l);
  return out;
}

// ---- DenseHermitian -------------------------------------------------------

template <class Real>
DenseHermitian<Real>::DenseHermitian(Matrix<Real> m) : m_(std::move(m)) {
  const std::size_t n = m_.dim();
  if (n == 0 || n > kMaxDim) {
    throw DomainError("DenseHermitian: dimension must be in 1.." + std::to_string(kMaxDim));
  }
  Real scale = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, abs(m_(i, j)));
  const Real tol = Real(kHermitianTolerance) * scale;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      if (abs(m_(i, j) - conj(m_(j, i))) > tol) {
        throw DomainError("DenseHermitian: entry (" + std::to_string(i) + "," + std::to_string(j) +
                          ") breaks hermiticity");
      }
    }
}

template <class Real>
DenseHermitian<Real> DenseHermitian<Real>::hermitized(const Matrix<Real>& m) {
  const std::size_t n = m.dim();
  if (n == 0 || n > kMaxDim) {
    throw DomainError("DenseHermitian: dimension must be in 1.." + std::to_string(kMaxDim));
  }
  Matrix<Real> h(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = Real(0.5) * (m(i, j) + conj(m(j, i)));
  return DenseHermitian(std::move(h), Unchecked{});
}

// ---- Jacobi ---------------------------------------------------------------

namespace {

template <class Real>
Real off_diagonal_norm(const Matrix<Real>& a) {
  Real s = 0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (i != j) s += norm2(a(i, j));
  return rsqrt(s);
}

template <class Real>
double to_double(Real x) {
  return static_cast<double>(x);
}

}  // namespace

template <class Real>
EigenDecomposition<Real> eig_hermitian(const DenseHermitian<Real>& input) {
  constexpr int kMaxSweeps = 50;
  using C = Complex<Real>;
  const std::size_t n = input.dim();
  Matrix<Real> a = input.matrix();
  Matrix<Real> v = Matrix<Real>::identity(n);
  for (std::size_t i = 0; i < n; ++i) a(i, i).im = 0;

  const Real eps = detail::epsilon_of(Real(0));
  const Real tol = Real(4) * Real(static_cast<double>(n)) * eps * a.frobenius();

  int sweep = 0;
  Real off = off_diagonal_norm(a);
  while (off > tol) {
    if (sweep == kMaxSweeps) {
      throw NumericalError("eig_hermitian: no convergence after " + std::to_string(kMaxSweeps) +
                           " sweeps (dim " + std::to_string(n) + ", off-diagonal norm " +
                           std::to_string(to_double(off)) + ", tolerance " +
                           std::to_string(to_double(tol)) + ")");
    }
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const C apq = a(p, q);
        const Real mag = abs(apq);
        if (mag == Real(0)) continue;
        const C w{apq.re / mag, apq.im / mag};
        const Real app = a(p, p).re;
        const Real aqq = a(q, q).re;

        // Real Jacobi rotation of the phase-rotated 2x2 block; G = D R D^+
        // with D = diag(1, conj(w)).
        const Real theta = (aqq - app) / (Real(2) * mag);
        Real t;
        if (rabs(theta) > Real(1e150)) {
          t = Real(0.5) / theta;
        } else {
          t = Real(1) / (rabs(theta) + rsqrt(theta * theta + Real(1)));
          if (theta < Real(0)) t = -t;
        }
        const Real c = Real(1) / rsqrt(t * t + Real(1));
        const Real s = t * c;
        const C g_pq = s * w;           // G(p,q)
        const C g_qp = -(s * conj(w));  // G(q,p)

        for (std::size_t k = 0; k < n; ++k) {  // A <- A G
          const C akp = a(k, p);
          const C akq = a(k, q);
          a(k, p) = c * akp + akq * g_qp;
          a(k, q) = akp * g_pq + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // A <- G^+ A
          const C apk = a(p, k);
          const C aqk = a(q, k);
          a(p, k) = c * apk + conj(g_qp) * aqk;
          a(q, k) = conj(g_pq) * apk + c * aqk;
        }
        a(p, q) = C{};
        a(q, p) = C{};
        a(p, p) = C{app - t * mag};
        a(q, q) = C{aqq + t * mag};

        for (std::size_t k = 0; k < n; ++k) {  // V <- V G
          const C vkp = v(k, p);
          const C vkq = v(k, q);
          v(k, p) = c * vkp + vkq * g_qp;
          v(k, q) = vkp * g_pq + c * vkq;
        }
      }
    }
    off = off_diagonal_norm(a);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).re < a(j, j).re; });

  EigenDecomposition<Real> out;
  out.sweeps = sweep;
  out.values.reserve(n);
  out.vectors = Matrix<Real>(n);
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = order[col];
    out.values.push_back(a(src, src).re);
    for (std::size_t row = 0; row < n; ++row) out.vectors(row, col) = v(row, src);
  }
  return out;
}

namespace {

// V diag(f(values)) V^+
template <class Real, class F>
Matrix<Real> spectral_map(const EigenDecomposition<Real>& e, F f) {
  const std::size_t n = e.values.size();
  Matrix<Real> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex<Real> fk = f(e.values[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex<Real> left = e.vectors(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += left * conj(e.vectors(j, k));
    }
  }
  return out;
}

template <class Real>
void require_psd(const EigenDecomposition<Real>& e, const char* who) {
  constexpr double kNegativeTolerance = 1e-12;
  if (!e.values.empty() && e.values.front() < Real(-kNegativeTolerance)) {
    throw NumericalError(std::string(who) + ": matrix is not positive semidefinite (eigenvalue " +
                         std::to_string(to_double(e.values.front())) + ")");
  }
}

template <class Real>
void require_unit_trace(const DenseHermitian<Real>& r, const char* who) {
  constexpr double kTraceTolerance = 1e-10;
  const Real tr = r.matrix().trace().re;
  if (rabs(tr - Real(1)) > Real(kTraceTolerance)) {
    throw DomainError(std::string(who) + ": density matrix trace " + std::to_string(to_double(tr)) +
                      " differs from 1");
  }
}

}  // namespace

template <class Real>
DenseHermitian<Real> sqrt_psd(const DenseHermitian<Real>& a) {
  const auto e = eig_hermitian(a);
  require_psd(e, "sqrt_psd");
  return DenseHermitian<Real>::hermitized(spectral_map(e, [](Real x) {
    return Complex<Real>(x > Real(0) ? rsqrt(x) : Real(0));
  }));
}

template <class Real>
Real uhlmann_fidelity(const DenseHermitian<Real>& r0, const DenseHermitian<Real>& r1) {
  if (r0.dim() != r1.dim()) throw DimensionMismatch("uhlmann_fidelity: dimensions differ");
  require_unit_trace(r0, "uhlmann_fidelity");
  require_unit_trace(r1, "uhlmann_fidelity");
  require_psd(eig_hermitian(r0), "uhlmann_fidelity");

  const auto root1 = sqrt_psd(r1).matrix();
  const auto inner = DenseHermitian<Real>::hermitized(root1 * r0.matrix() * root1);
  const auto e = eig_hermitian(inner);
  require_psd(e, "uhlmann_fidelity");
  Real f = 0;
  for (Real x : e.values)
    if (x > Real(0)) f += rsqrt(x);
  return f;
}

// ---- Fermionic mode pair --------------------------------------------------

namespace {

// Fock basis |n_k n_-k> in index order 2 n_k + n_-k, then permuted to
// |00>, |11>, |01>, |10>.
template <class Real>
Matrix<Real> to_parity_order(const Matrix<Real>& m) {
  constexpr std::size_t perm[4] = {0, 3, 1, 2};
  Matrix<Real> out(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) out(i, j) = m(perm[i], perm[j]);
  return out;
}

}  // namespace

template <class Real>
DenseHermitian<Real> mode_hamiltonian_dense(const MomentumMode& m) {
  using C = Complex<Real>;
  Matrix<Real> lower(2);  // single-site annihilator |0><1|
  lower(0, 1) = C(Real(1));
  Matrix<Real> parity(2);
  parity(0, 0) = C(Real(1));
  parity(1, 1) = C(Real(-1));
  const auto id2 = Matrix<Real>::identity(2);

  const auto c_k = kron(lower, id2);
  const auto c_mk = kron(parity, lower);
  const auto n_k = c_k.adjoint() * c_k;
  const auto n_mk = c_mk.adjoint() * c_mk;
  const auto pair = c_k.adjoint() * c_mk.adjoint();  // c_k^+ c_-k^+

  const Real eps = Real(m.epsilon);
  const Real delta = Real(m.delta);
  Matrix<Real> h(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      // -i Delta c_k^+ c_-k^+ + i Delta c_-k c_k, the second term being the adjoint of the first.
      const C anomalous = C(Real(0), -delta) * pair(i, j) + C(Real(0), delta) * conj(pair(j, i));
      h(i, j) = eps * (n_k(i, j) + n_mk(i, j)) + anomalous;
    }
  return DenseHermitian<Real>(to_parity_order(h));
}

template <class Real>
DenseHermitian<Real> mode_density_dense(const MomentumMode& m, double beta) {
  validate_finite_beta(beta);
  const auto e = eig_hermitian(mode_hamiltonian_dense<Real>(m));
  const Real ground = e.values.front();
  std::vector<Real> weights;
  Real z = 0;
  for (Real x : e.values) {
    weights.push_back(rexp(-Real(beta) * (x - ground)));
    z += weights.back();
  }
  EigenDecomposition<Real> scaled = e;
  for (std::size_t i = 0; i < weights.size(); ++i) scaled.values[i] = weights[i] / z;
  return DenseHermitian<Real>::hermitized(spectral_map(scaled, [](Real w) { return Complex<Real>(w); }));
}

template <class Real>
Matrix<Real> mode_propagator(const MomentumMode& m, double t) {
  const auto e = eig_hermitian(mode_hamiltonian_dense<Real>(m));
  const Real time = Real(t);
  return spectral_map(e, [time](Real x) { return Complex<Real>(rcos(x * time), -rsin(x * time)); });
}

double dense_thermal_fidelity(const MomentumMode& m0, const MomentumMode& m1, double beta0,
                              double beta1) {
  return static_cast<double>(
      uhlmann_fidelity(mode_density_dense<Quad>(m0, beta0), mode_density_dense<Quad>(m1, beta1)));
}

double dense_echo(const MomentumMode& m0, const MomentumMode& m1, double beta, double t) {
  const auto rho = mode_density_dense<Quad>(m0, beta);
  const auto u0 = mode_propagator<Quad>(m0, t);
  const auto u1 = mode_propagator<Quad>(m1, t);
  const auto w = u1.adjoint() * u0;
  const auto evolved = DenseHermitian<Quad>::hermitized(w * rho.matrix() * w.adjoint());
  return static_cast<double>(uhlmann_fidelity(rho, evolved));
}

// ---- Random-draw suites ---------------------------------------------------

UniformSource::UniformSource(std::uint64_t seed) : engine_(seed) {}

double UniformSource::next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double UniformSource::angle() { return std::numbers::pi - 2.0 * std::numbers::pi * next(); }

namespace {

MomentumMode random_mode(UniformSource& rng) {
  const double lambda = rng.uniform(0.0, 5.0);
  const double theta = rng.angle();
  return make_mode(lambda * std::cos(theta), lambda * std::sin(theta));
}

}  // namespace

OracleReport run_oracle_checks(std::uint64_t seed, std::size_t draws) {
  OracleReport report;
  report.seed = seed;
  report.fidelity_draws = std::max<std::size_t>(draws, 1);
  report.echo_draws = std::max<std::size_t>(draws / 2, 1);
  report.product_draws = std::max<std::size_t>(draws / 10, 1);

  UniformSource rng(seed);
  for (std::size_t i = 0; i < report.fidelity_draws; ++i) {
    const auto m0 = random_mode(rng);
    const auto m1 = random_mode(rng);
    const double b0 = rng.uniform(0.01, 50.0);
    const double b1 = rng.uniform(0.01, 50.0);
    const double dev = std::abs(mode_fidelity(m0, m1, b0, b1) - dense_thermal_fidelity(m0, m1, b0, b1));
    report.max_fidelity_deviation = std::max(report.max_fidelity_deviation, dev);
  }
  for (std::size_t i = 0; i < report.echo_draws; ++i) {
    const auto m0 = random_mode(rng);
    const auto m1 = random_mode(rng);
    const double beta = rng.uniform(0.01, 50.0);
    const double t = rng.uniform(0.0, 20.0);
    const double dev = std::abs(mode_echo(m0, m1, beta, t) - dense_echo(m0, m1, beta, t));
    report.max_echo_deviation = std::max(report.max_echo_deviation, dev);
  }
  for (std::size_t i = 0; i < report.product_draws; ++i) {
    const auto a0 = random_mode(rng);
    const auto a1 = random_mode(rng);
    const auto b0 = random_mode(rng);
    const auto b1 = random_mode(rng);
    const double beta0 = rng.uniform(0.01, 50.0);
    const double beta1 = rng.uniform(0.01, 50.0);
    const auto ra0 = mode_density_dense<Quad>(a0, beta0);
    const auto ra1 = mode_density_dense<Quad>(a1, beta1);
    const auto rb0 = mode_density_dense<Quad>(b0, beta0);
    const auto rb1 = mode_density_dense<Quad>(b1, beta1);
    const Quad joint = uhlmann_fidelity(DenseHermitian<Quad>::hermitized(kron(ra0.matrix(), rb0.matrix())),
                                        DenseHermitian<Quad>::hermitized(kron(ra1.matrix(), rb1.matrix())));
    const Quad separate = uhlmann_fidelity(ra0, ra1) * uhlmann_fidelity(rb0, rb1);
    report.max_product_deviation =
        std::max(report.max_product_deviation, static_cast<double>(fabsq(joint - separate)));
  }
  return report;
}

#define THERMALFID_ORACLE_INSTANTIATE(Real)                                                 \
  template class Matrix<Real>;                                                              \
  template class DenseHermitian<Real>;                                                      \
  template Matrix<Real> kron(const Matrix<Real>&, const Matrix<Real>&);                     \
  template EigenDecomposition<Real> eig_hermitian(const DenseHermitian<Real>&);             \
  template DenseHermitian<Real> sqrt_psd(const DenseHermitian<Real>&);                      \
  template Real uhlmann_fidelity(const DenseHermitian<Real>&, const DenseHermitian<Real>&); \
  template DenseHermitian<Real> mode_hamiltonian_dense(const MomentumMode&);                \
  template DenseHermitian<Real> mode_density_dense(const MomentumMode&, double);            \
  template Matrix<Real> mode_propagator(const MomentumMode&, double);

THERMALFID_ORACLE_INSTANTIATE(double)
THERMALFID_ORACLE_INSTANTIATE(Quad)

}  // namespace thermalfid::oracle
