#include "ricci/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace ricci {

namespace {

void check_dim(int n) {
  if (n < 3) throw DimensionError("tensor dimension must be >= 3");
  if (n > 12) throw DimensionError("tensor dimension must be <= 12");
}

Eigen::MatrixXd to_eigen(const SymTensor2& a) {
  const int n = a.dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = a(i, j);
  return m;
}

}  // namespace

SymTensor2::SymTensor2(int n) : n_(n), c_(static_cast<size_t>(n) * n, 0.0) {
  check_dim(n);
}

SymTensor2 SymTensor2::identity(int n) {
  SymTensor2 t(n);
  for (int i = 0; i < n; ++i) t.set(i, i, 1.0);
  return t;
}

double SymTensor2::trace_with(const SymTensor2& ginv) const {
  if (ginv.dim() != n_) throw DimensionError("trace_with: dimension mismatch");
  double acc = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) acc += ginv(i, j) * (*this)(i, j);
  return acc;
}

SymTensor2 SymTensor2::inverse() const {
  Eigen::MatrixXd m = to_eigen(*this);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) throw SingularMetricError("SymTensor2::inverse: singular matrix");
  Eigen::MatrixXd inv = lu.inverse();
  SymTensor2 out(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) out.set(i, j, 0.5 * (inv(i, j) + inv(j, i)));
  return out;
}

Tensor3::Tensor3(int n) : n_(n), c_(static_cast<size_t>(n) * n * n, 0.0) { check_dim(n); }

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

CurvTensor4::CurvTensor4(int n) : n_(n), c_(static_cast<size_t>(n) * n * n * n, 0.0) {
  check_dim(n);
}

double CurvTensor4::max_abs() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

double CurvTensor4::max_symmetry_violation() const {
  const auto& t = *this;
  double m = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) {
          const double v = t(i, j, k, l);
          m = std::max(m, std::abs(v + t(j, i, k, l)));
          m = std::max(m, std::abs(v + t(i, j, l, k)));
          m = std::max(m, std::abs(v - t(k, l, i, j)));
        }
  return m;
}

double CurvTensor4::max_bianchi_violation() const {
  const auto& t = *this;
  double m = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l)
          m = std::max(m, std::abs(t(i, j, k, l) + t(j, k, i, l) + t(k, i, j, l)));
  return m;
}

CurvTensor4 kulkarni_nomizu(const SymTensor2& a, const SymTensor2& b) {
  const int n = a.dim();
  if (b.dim() != n) throw DimensionError("kulkarni_nomizu: dimension mismatch");
  CurvTensor4 t(n);
  // One representative per orbit; all eight symmetric slots get the same
  // double, so the symmetries hold bit-for-bit.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = i; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          if (k == i && l < j) continue;
          const double v = a(i, k) * b(j, l) + a(j, l) * b(i, k) -
                           a(i, l) * b(j, k) - a(j, k) * b(i, l);
          t.set(i, j, k, l, v);
          t.set(j, i, k, l, -v);
          t.set(i, j, l, k, -v);
          t.set(j, i, l, k, v);
          t.set(k, l, i, j, v);
          t.set(l, k, i, j, -v);
          t.set(k, l, j, i, -v);
          t.set(l, k, j, i, v);
        }
  return t;
}

SymTensor2 ricci_contraction(const CurvTensor4& rm, const SymTensor2& g) {
  const int n = rm.dim();
  if (g.dim() != n) throw DimensionError("ricci_contraction: dimension mismatch");
  const SymTensor2 gi = g.inverse();
  SymTensor2 ric(n);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) acc += gi(i, l) * rm(i, j, k, l);
      ric.set(j, k, acc);
    }
  return ric;
}

double scalar_contraction(const SymTensor2& ric, const SymTensor2& g) {
  return ric.trace_with(g.inverse());
}

CurvTensor4 weyl_from(const CurvTensor4& rm, const SymTensor2& ric, double scal,
                      const SymTensor2& g) {
  const int n = rm.dim();
  if (ric.dim() != n || g.dim() != n) throw DimensionError("weyl_from: dimension mismatch");
  CurvTensor4 w(n);
  std::vector<double> out(static_cast<size_t>(n) * n * n * n);
  std::vector<double> rmb(out.size()), ricb(static_cast<size_t>(n) * n), gb(ricb.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ricb[i * n + j] = ric(i, j);
      gb[i * n + j] = g(i, j);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          rmb[((i * n + j) * n + k) * n + l] = rm(i, j, k, l);
    }
  detail::weyl_terms(n, rmb.data(), ricb.data(), scal, gb.data(), out.data());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          w.set(i, j, k, l, out[((i * n + j) * n + k) * n + l]);
  return w;
}

double max_trace_norm(const CurvTensor4& w, const SymTensor2& g) {
  const int n = w.dim();
  const SymTensor2 gi = g.inverse();
  double m = 0.0;
  // Contract every slot pair; by the symmetries several coincide, but the
  // brute-force sweep is cheap and makes the check assumption-free.
  const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  int idx[4];
  for (const auto& p : pairs) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double acc = 0.0;
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            int free_pos = 0;
            for (int pos = 0; pos < 4; ++pos) {
              if (pos == p[0]) idx[pos] = c;
              else if (pos == p[1]) idx[pos] = d;
              else idx[pos] = (free_pos++ == 0) ? a : b;
            }
            acc += gi(c, d) * w(idx[0], idx[1], idx[2], idx[3]);
          }
        m = std::max(m, std::abs(acc));
      }
  }
  return m;
}

SymTensor2 schouten(const SymTensor2& ric, double scal, const SymTensor2& g) {
  const int n = ric.dim();
  if (g.dim() != n) throw DimensionError("schouten: dimension mismatch");
  SymTensor2 out(n);
  const double c = scal / (2.0 * (n - 1));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) out.set(i, j, ric(i, j) - c * g(i, j));
  return out;
}

std::vector<double> generalized_eigenvalues(const SymTensor2& a, const SymTensor2& g) {
  const int n = a.dim();
  if (g.dim() != n) throw DimensionError("generalized_eigenvalues: dimension mismatch");
  Eigen::MatrixXd ae = to_eigen(a), ge = to_eigen(g);
  Eigen::LLT<Eigen::MatrixXd> llt(ge);
  if (llt.info() != Eigen::Success)
    throw SingularMetricError("generalized_eigenvalues: metric is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ae, ge, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error("generalized_eigenvalues: eigensolver failed to converge");
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = es.eigenvalues()(i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

int distinct_count(std::span<const double> values, double tol) {
  if (values.empty()) throw Error("distinct_count: empty value list");
  if (!(tol >= 0.0)) throw Error("distinct_count: tolerance must be >= 0");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  int count = 1;
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] - v[i - 1] > tol) ++count;
  return count;
}

}  // namespace ricci
