#include "crebound/quadrature.hpp"

#include <Eigen/Dense>
#include <map>
#include <mutex>

namespace crebound {

namespace {

// Golub-Welsch on a symmetric tridiagonal recurrence matrix.
GaussRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) J(i, i) = diag(i);
  for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = offdiag(i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    r.x[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.w[i] = mu0 * v0 * v0;
  }
  return r;
}

GaussRule make_gauss_legendre(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n - 1 > 0 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(diag, off, 2.0);
}

// Gauss-Jacobi with weight (1-x)^alpha (1+x)^beta on [-1,1].
GaussRule make_gauss_jacobi(int n, double alpha, double beta) {
  Eigen::VectorXd diag(n), off(n - 1 > 0 ? n - 1 : 0);
  const double ab = alpha + beta;
  for (int k = 0; k < n; ++k) {
    const double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
    diag(k) = den != 0.0 ? (beta * beta - alpha * alpha) / den : (beta - alpha) / (ab + 2.0);
  }
  for (int k = 1; k < n; ++k) {
    const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
    const double den =
        (2.0 * k + ab) * (2.0 * k + ab) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0);
    off(k - 1) = std::sqrt(num / den);
  }
  // mu0 = int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
  const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                     std::tgamma(ab + 2.0);
  return golub_welsch(diag, off, mu0);
}

TriRule make_triangle_rule(int degree) {
  const int n = std::max(1, (degree + 2) / 2);  // 2n-1 >= degree
  const GaussRule gl = make_gauss_legendre(n);
  const GaussRule gj = make_gauss_jacobi(n, 1.0, 0.0);
  // Duffy map: x = xi (1 - eta), y = eta on [0,1]^2; the (1-eta) Jacobian is
  // absorbed into the Jacobi weight.
  TriRule r;
  r.pts.reserve(static_cast<size_t>(n) * n);
  r.w.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double xi = 0.5 * (gl.x[i] + 1.0);
    const double wxi = 0.5 * gl.w[i];
    for (int j = 0; j < n; ++j) {
      const double eta = 0.5 * (gj.x[j] + 1.0);
      // weight (1-x)^1 on [-1,1] maps to 2*(1-eta) on [0,1]; d(x)/d(eta) = 2
      const double weta = 0.25 * gj.w[j];
      r.pts.emplace_back(xi * (1.0 - eta), eta);
      r.w.push_back(wxi * weta);
    }
  }
  return r;
}

std::mutex cache_mutex;

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

const TriRule& triangle_rule(int degree) {
  static std::map<int, TriRule> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, make_triangle_rule(degree)).first;
  return it->second;
}

}  // namespace crebound
