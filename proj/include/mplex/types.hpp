#pragma once

#include <Eigen/Dense>
#include <optional>

#include "mplex/util.hpp"

namespace mplex {

// layer widths p_0 <= p_1 <= ... <= p_K; only layer K is observed
struct NetworkShape {
  int K = 0;
  std::vector<int> p;

  NetworkShape() = default;
  NetworkShape(std::vector<int> widths) : K(static_cast<int>(widths.size()) - 1), p(std::move(widths)) {}

  int layers() const { return K + 1; }
  int u(int k) const { return tri_count(p[k]); }  // free entries at layer k
  void validate() const;
};

// A[k-1] is the p_k x p_{k-1} assignment of layer-k nodes to layer-(k-1) nodes
struct ConnectionMatrices {
  std::vector<BinMat> A;

  const BinMat& layer(int k) const { return A[k - 1]; }
  BinMat& layer(int k) { return A[k - 1]; }
  bool operator==(const ConnectionMatrices&) const = default;
  void validate(const NetworkShape& shape, int S = 0) const;  // S>0: row sums in [1,S]
};

struct TruncationBounds {
  double C_lo = kNegInf, C_hi = kInf;
  double gamma_lo = 0.0, gamma_hi = kInf;
  double delta_lo = 0.0, delta_hi = kInf;
  bool operator==(const TruncationBounds&) const = default;
};

// (nu, C_1..C_K, Gamma_1..Gamma_K); Gamma_k is p_{k-1} x p_{k-1},
// symmetric with strictly positive entries
struct ContinuousParams {
  std::vector<double> nu;  // length 2^{u(0)}, interior of the simplex
  std::vector<double> C;   // length K
  std::vector<Eigen::MatrixXd> Gamma;

  const Eigen::MatrixXd& gamma(int k) const { return Gamma[k - 1]; }
  Eigen::MatrixXd& gamma(int k) { return Gamma[k - 1]; }
  void validate(const NetworkShape& shape) const;
};

// one individual's layer stack X_0..X_K (each symmetric, unit diagonal)
struct LayeredSample {
  std::vector<BinMat> X;
  void validate(const NetworkShape& shape) const;
};

// canonical code of a symmetric unit-diagonal adjacency: upper-triangle
// bits in lexicographic (i,j) order, first pair most significant
uint64_t encode_adj(const BinMat& X);
BinMat decode_adj(int p, uint64_t code);

}  // namespace mplex
