#include "mplex/types.hpp"

namespace mplex {

void NetworkShape::validate() const {
  if (K < 1 || static_cast<int>(p.size()) != K + 1)
    throw UsageError("shape: need K >= 1 and K+1 widths");
  for (int k = 0; k <= K; ++k) {
    if (p[k] < 1) throw UsageError("shape: widths must be positive");
    if (k > 0 && p[k] < p[k - 1]) throw UsageError("shape: widths must be nondecreasing");
  }
  if (u(0) > 62) throw UsageError("shape: layer-0 configuration space exceeds 64-bit codes");
}

void ConnectionMatrices::validate(const NetworkShape& shape, int S) const {
  if (static_cast<int>(A.size()) != shape.K)
    throw UsageError("connection matrices: need one per layer transition");
  for (int k = 1; k <= shape.K; ++k) {
    const BinMat& m = A[k - 1];
    if (m.rows != shape.p[k] || m.cols != shape.p[k - 1])
      throw UsageError("connection matrices: wrong dimensions");
    if (S > 0)
      for (int i = 0; i < m.rows; ++i) {
        int rs = m.row_sum(i);
        if (rs < 1 || rs > S) throw UsageError("connection matrices: row sum outside [1,S]");
      }
  }
}

void ContinuousParams::validate(const NetworkShape& shape) const {
  if (static_cast<int>(C.size()) != shape.K || static_cast<int>(Gamma.size()) != shape.K)
    throw UsageError("params: need C_k and Gamma_k for each layer transition");
  size_t ncfg = 1ull << shape.u(0);
  if (nu.size() != ncfg) throw UsageError("params: nu has wrong length");
  double s = 0.0;
  for (double w : nu) {
    if (!(w > 0.0)) throw UsageError("params: nu must be interior to the simplex");
    s += w;
  }
  if (std::fabs(s - 1.0) > 1e-8) throw UsageError("params: nu must sum to 1");
  for (int k = 1; k <= shape.K; ++k) {
    if (!std::isfinite(C[k - 1])) throw UsageError("params: C not finite");
    const Eigen::MatrixXd& g = Gamma[k - 1];
    if (g.rows() != shape.p[k - 1] || g.cols() != shape.p[k - 1])
      throw UsageError("params: Gamma has wrong dimensions");
    for (int s1 = 0; s1 < g.rows(); ++s1)
      for (int s2 = 0; s2 < g.cols(); ++s2) {
        if (!(g(s1, s2) > 0.0)) throw UsageError("params: Gamma entries must be positive");
        if (std::fabs(g(s1, s2) - g(s2, s1)) > 1e-12)
          throw UsageError("params: Gamma must be symmetric");
      }
  }
}

void LayeredSample::validate(const NetworkShape& shape) const {
  if (static_cast<int>(X.size()) != shape.layers())
    throw UsageError("sample: need one matrix per layer");
  for (int k = 0; k <= shape.K; ++k) {
    if (X[k].rows != shape.p[k] || X[k].cols != shape.p[k])
      throw UsageError("sample: wrong matrix size");
    if (!X[k].is_symmetric_unit_diag())
      throw UsageError("sample: layers must be symmetric with unit diagonal");
  }
}

uint64_t encode_adj(const BinMat& X) {
  int u = tri_count(X.rows);
  if (u > 62) throw UsageError("encode_adj: too many free entries for a 64-bit code");
  uint64_t code = 0;
  for (int i = 0; i < X.rows; ++i)
    for (int j = i + 1; j < X.cols; ++j) code = (code << 1) | X.at(i, j);
  return code;
}

BinMat decode_adj(int p, uint64_t code) {
  int u = tri_count(p);
  if (u > 62) throw UsageError("decode_adj: too many free entries for a 64-bit code");
  if (u < 62 && (code >> u) != 0) throw UsageError("decode_adj: code out of range");
  BinMat X(p, p);
  for (int i = 0; i < p; ++i) X.at(i, i) = 1;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      --u;
      uint8_t b = (code >> u) & 1u;
      X.at(i, j) = X.at(j, i) = b;
    }
  return X;
}

}  // namespace mplex
