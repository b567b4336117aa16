#pragma once

#include "mplex/types.hpp"

namespace mplex::spectral {

// q algebraically largest eigenpairs of a symmetric matrix, descending,
// orthonormal vectors, sign fixed (first coordinate with |x| > 1e-12 positive)
std::pair<Eigen::VectorXd, Eigen::MatrixXd> topk_symeig(const Eigen::MatrixXd& M, int q);

struct DcmmEstimate {
  Eigen::MatrixXd Pi;        // p x q, rows nonnegative, sum 1
  Eigen::VectorXd eigvals;   // q, descending
  Eigen::MatrixXd eigvecs;   // p x q
  Eigen::MatrixXd vertices;  // q x (q-1) hunted simplex vertices
};

// SCORE ratios + vertex hunting (k-means then successive projection) +
// barycentric membership reconstruction (clipped, renormalized)
DcmmEstimate mixed_score(const Eigen::MatrixXd& Y, int q, uint64_t seed = 0);

struct InitDiagnostics {
  // per layer transition K..1: max over column slots of ||Pi_row - e_slot||_2
  // for the rows picked as purest
  std::vector<double> max_assign_dist;
};

// top-down initialization of all connection matrices from observed layer-K
// adjacency samples (mean adjacency; per-layer membership estimation;
// nearest-feasible-row rounding under the sparsity cap; purest-row recursion)
ConnectionMatrices multilayer_init(const std::vector<BinMat>& observed,
                                   const NetworkShape& shape, int S,
                                   InitDiagnostics* diag = nullptr, uint64_t seed = 0);

// exact min-cost assignment (rows >= cols); returns the row given to each col
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

// Lloyd k-means with k-means++ seeding, fixed restarts, deterministic ties
std::vector<int> kmeans(const Eigen::MatrixXd& pts, int L, int restarts, uint64_t seed,
                        Eigen::MatrixXd* centers_out = nullptr);

// successive projection over augmented rows (pts_i, 1); picks q extreme rows
std::vector<int> successive_projection(const Eigen::MatrixXd& pts, int q);

}  // namespace mplex::spectral
