#pragma once

// Dense symmetric 2-tensors, algebraic curvature 4-tensors, and rank-3
// tensors on one tangent space, with the curvature-algebra operations built
// on them. Dimensions are small (<= 12): storage is flat row-major, no
// sparsity, no expression templates.

#include <span>
#include <vector>

#include "ricci/errors.hpp"

namespace ricci {

class SymTensor2 {
 public:
  explicit SymTensor2(int n);
  static SymTensor2 identity(int n);

  int dim() const { return n_; }
  double operator()(int i, int j) const { return c_[i * n_ + j]; }
  // Assigns both (i,j) and (j,i) so symmetry is exact by construction.
  void set(int i, int j, double v) {
    c_[i * n_ + j] = v;
    c_[j * n_ + i] = v;
  }
  std::span<const double> data() const { return c_; }

  double trace_with(const SymTensor2& ginv) const;  // g^{ij} A_ij
  SymTensor2 inverse() const;                       // requires invertibility

 private:
  int n_;
  std::vector<double> c_;
};

class Tensor3 {
 public:
  explicit Tensor3(int n);
  int dim() const { return n_; }
  double operator()(int i, int j, int k) const { return c_[(i * n_ + j) * n_ + k]; }
  void set(int i, int j, int k, double v) { c_[(i * n_ + j) * n_ + k] = v; }
  double max_abs() const;

 private:
  int n_;
  std::vector<double> c_;
};

class CurvTensor4 {
 public:
  explicit CurvTensor4(int n);
  int dim() const { return n_; }
  double operator()(int i, int j, int k, int l) const {
    return c_[((i * n_ + j) * n_ + k) * n_ + l];
  }
  void set(int i, int j, int k, int l, double v) {
    c_[((i * n_ + j) * n_ + k) * n_ + l] = v;
  }
  double max_abs() const;

  // Largest violation of the pair symmetries / antisymmetries.
  double max_symmetry_violation() const;
  // Largest violation of the first Bianchi identity T_ijkl+T_jkil+T_kijl.
  double max_bianchi_violation() const;

 private:
  int n_;
  std::vector<double> c_;
};

// (A o B)_ijkl = A_ik B_jl + A_jl B_ik - A_il B_jk - A_jk B_il.
// Output symmetries are exact bit-for-bit: each orbit is computed once and
// assigned to all eight index positions.
CurvTensor4 kulkarni_nomizu(const SymTensor2& a, const SymTensor2& b);

// Ric_jk = g^{il} Rm_ijkl and R = g^{jk} Ric_jk for a lowered curvature tensor.
SymTensor2 ricci_contraction(const CurvTensor4& rm, const SymTensor2& g);
double scalar_contraction(const SymTensor2& ric, const SymTensor2& g);

// Weyl part of an algebraic curvature tensor whose Ricci contraction is ric
// and scalar trace is scal. Sign convention: the round unit sphere satisfies
// Rm(X,Y,Y,X) > 0 and Ric = (n-1) g; with that orientation
//   W = Rm + (Ric - (R/n) g) o g / (n-2) + R (g o g) / (2n(n-1)),
// which is totally trace-free (the normative test). Requires dim >= 4.
CurvTensor4 weyl_from(const CurvTensor4& rm, const SymTensor2& ric, double scal,
                      const SymTensor2& g);

// Max |g^{..} W| over all six single contractions; ~0 for a true Weyl part.
double max_trace_norm(const CurvTensor4& w, const SymTensor2& g);

// Schouten-type tensor Ric - R/(2(n-1)) g.
SymTensor2 schouten(const SymTensor2& ric, double scal, const SymTensor2& g);

// Eigenvalues of A v = mu g v for SPD g, ascending. Throws SingularMetricError
// if g is not positive definite.
std::vector<double> generalized_eigenvalues(const SymTensor2& a, const SymTensor2& g);

// Number of clusters when sorted values are split at gaps larger than tol
// (single linkage). tol is an absolute threshold chosen by the caller.
int distinct_count(std::span<const double> values, double tol);

namespace detail {

// Templated curvature-formula kernels shared by the tensor ops above and the
// chart oracle (which needs them at dual-number scalars). Buffers are flat
// row-major of length n^2 / n^4.
template <class S>
void kn_product(int n, const S* a, const S* b, S* out) {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          out[((i * n + j) * n + k) * n + l] =
              a[i * n + k] * b[j * n + l] + a[j * n + l] * b[i * n + k] -
              a[i * n + l] * b[j * n + k] - a[j * n + k] * b[i * n + l];
}

template <class S>
void weyl_terms(int n, const S* rm, const S* ric, const S& scal, const S* g, S* out) {
  if (n < 4) throw DimensionError("weyl decomposition requires dim >= 4");
  std::vector<S> tf(n * n), kn1(static_cast<size_t>(n) * n * n * n),
      kn2(static_cast<size_t>(n) * n * n * n);
  for (int i = 0; i < n * n; ++i) tf[i] = ric[i] - (scal / double(n)) * g[i];
  kn_product(n, tf.data(), g, kn1.data());
  kn_product(n, g, g, kn2.data());
  const double c1 = 1.0 / (n - 2);
  const double c2 = 1.0 / (2.0 * n * (n - 1));
  const size_t n4 = static_cast<size_t>(n) * n * n * n;
  for (size_t idx = 0; idx < n4; ++idx)
    out[idx] = rm[idx] + c1 * kn1[idx] + (scal * c2) * kn2[idx];
}

}  // namespace detail

}  // namespace ricci
