#include "mplex/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

#include "mplex/rng.hpp"

namespace mplex::spectral {

std::pair<Eigen::VectorXd, Eigen::MatrixXd> topk_symeig(const Eigen::MatrixXd& M, int q) {
  if (M.rows() != M.cols()) throw UsageError("topk_symeig: matrix not square");
  if (q < 1 || q > M.rows()) throw UsageError("topk_symeig: bad q");
  double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw UsageError("topk_symeig: matrix not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success) throw NumericError("topk_symeig: eigensolver failed");

  int p = static_cast<int>(M.rows());
  Eigen::VectorXd vals(q);
  Eigen::MatrixXd vecs(p, q);
  for (int m = 0; m < q; ++m) {  // solver returns ascending order
    vals(m) = es.eigenvalues()(p - 1 - m);
    Eigen::VectorXd v = es.eigenvectors().col(p - 1 - m);
    for (int i = 0; i < p; ++i)
      if (std::fabs(v(i)) > 1e-12) {
        if (v(i) < 0) v = -v;
        break;
      }
    vecs.col(m) = v;
  }
  return {vals, vecs};
}

std::vector<int> kmeans(const Eigen::MatrixXd& pts, int L, int restarts, uint64_t seed,
                        Eigen::MatrixXd* centers_out) {
  int n = static_cast<int>(pts.rows());
  int dim = static_cast<int>(pts.cols());
  if (L < 1 || L > n) throw UsageError("kmeans: L must be in [1, n]");

  auto sqdist = [&](const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
    return (a - b).squaredNorm();
  };

  std::vector<int> best_labels(n, 0);
  Eigen::MatrixXd best_centers(L, dim);
  double best_inertia = kInf;

  for (int r = 0; r < restarts; ++r) {
    Rng g(seed, 0x6b6du, static_cast<uint64_t>(r));
    Eigen::MatrixXd centers(L, dim);
    // k-means++ seeding
    std::vector<double> d2(n, kInf);
    int first = static_cast<int>(g() % static_cast<uint64_t>(n));
    centers.row(0) = pts.row(first);
    for (int c = 1; c < L; ++c) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        d2[i] = std::min(d2[i], sqdist(pts.row(i), centers.row(c - 1)));
        total += d2[i];
      }
      int pick = 0;
      if (total > 0.0) {
        double u = runif(g) * total, acc = 0.0;
        for (int i = 0; i < n; ++i) {
          acc += d2[i];
          if (u < acc) {
            pick = i;
            break;
          }
          pick = i;
        }
      } else {
        pick = static_cast<int>(g() % static_cast<uint64_t>(n));
      }
      centers.row(c) = pts.row(pick);
    }

    std::vector<int> labels(n, -1);
    for (int iter = 0; iter < 100; ++iter) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        int arg = 0;
        double bd = kInf;
        for (int c = 0; c < L; ++c) {
          double d = sqdist(pts.row(i), centers.row(c));
          if (d < bd - 1e-15) {
            bd = d;
            arg = c;
          }
        }
        if (labels[i] != arg) {
          labels[i] = arg;
          changed = true;
        }
      }
      if (!changed) break;
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(L, dim);
      std::vector<int> cnt(L, 0);
      for (int i = 0; i < n; ++i) {
        sums.row(labels[i]) += pts.row(i);
        ++cnt[labels[i]];
      }
      for (int c = 0; c < L; ++c) {
        if (cnt[c] > 0) {
          centers.row(c) = sums.row(c) / cnt[c];
          continue;
        }
        // empty cluster: restart it at the point farthest from its center
        int far = 0;
        double fd = -1.0;
        for (int i = 0; i < n; ++i) {
          double d = sqdist(pts.row(i), centers.row(labels[i]));
          if (d > fd) {
            fd = d;
            far = i;
          }
        }
        centers.row(c) = pts.row(far);
      }
    }

    double inertia = 0.0;
    for (int i = 0; i < n; ++i) inertia += sqdist(pts.row(i), centers.row(labels[i]));
    if (inertia < best_inertia - 1e-15) {
      best_inertia = inertia;
      best_labels = labels;
      best_centers = centers;
    }
  }
  if (centers_out) *centers_out = best_centers;
  return best_labels;
}

std::vector<int> successive_projection(const Eigen::MatrixXd& pts, int q) {
  int n = static_cast<int>(pts.rows());
  if (q < 1 || q > n) throw UsageError("successive_projection: bad q");
  Eigen::MatrixXd resid(n, pts.cols() + 1);
  resid.leftCols(pts.cols()) = pts;
  resid.col(pts.cols()).setOnes();

  std::vector<int> chosen;
  std::vector<char> used(n, 0);
  for (int step = 0; step < q; ++step) {
    int arg = -1;
    double bn = -1.0;
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      double nm = resid.row(i).squaredNorm();
      if (nm > bn + 1e-15) {
        bn = nm;
        arg = i;
      }
    }
    if (arg < 0) throw NumericError("successive_projection: ran out of candidates");
    used[arg] = 1;
    chosen.push_back(arg);
    double nm = resid.row(arg).norm();
    if (nm > 1e-14) {
      Eigen::RowVectorXd u = resid.row(arg) / nm;
      resid -= (resid * u.transpose()) * u;
    }
  }
  return chosen;
}

DcmmEstimate mixed_score(const Eigen::MatrixXd& Y, int q, uint64_t seed) {
  auto [vals, vecs] = topk_symeig(Y, q);
  DcmmEstimate out;
  out.eigvals = vals;
  out.eigvecs = vecs;
  int p = static_cast<int>(Y.rows());

  if (q == 1) {
    out.Pi = Eigen::MatrixXd::Ones(p, 1);
    out.vertices = Eigen::MatrixXd(1, 0);
    return out;
  }

  double xinorm = vecs.col(0).cwiseAbs().maxCoeff();
  for (int i = 0; i < p; ++i)
    if (std::fabs(vecs(i, 0)) < 1e-10 * xinorm)
      throw NumericError("mixed_score: leading eigenvector has a near-zero entry");

  Eigen::MatrixXd R(p, q - 1);
  for (int m = 1; m < q; ++m) R.col(m - 1) = vecs.col(m).cwiseQuotient(vecs.col(0));

  int L = std::min(p, 5 * q);
  Eigen::MatrixXd centers;
  kmeans(R, L, 10, seed, &centers);
  std::vector<int> vidx = successive_projection(centers, q);
  Eigen::MatrixXd V(q, q - 1);
  for (int c = 0; c < q; ++c) V.row(c) = centers.row(vidx[c]);
  out.vertices = V;

  // barycentric coordinates of each ratio row against the q vertices
  Eigen::MatrixXd sys(q, q);
  sys.topRows(q - 1) = V.transpose();
  sys.bottomRows(1).setOnes();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys);

  // barycentric weights carry a per-community factor b_1(c): w_c is
  // proportional to pi_c * b_1(c). For a constant-diagonal mixing matrix,
  // b_1(c)^-2 is proportional to lambda_1 + v_c' diag(lambda_2..q) v_c, so
  // dividing by b_1 recovers the memberships themselves.
  Eigen::VectorXd debias(q);
  for (int c = 0; c < q; ++c) {
    double t = vals(0);
    for (int m = 1; m < q; ++m) t += vals(m) * V(c, m - 1) * V(c, m - 1);
    debias(c) = std::sqrt(std::max(t, 1e-12 * std::max(vals(0), 1.0)));
  }

  out.Pi = Eigen::MatrixXd(p, q);
  Eigen::VectorXd rhs(q);
  for (int i = 0; i < p; ++i) {
    rhs.head(q - 1) = R.row(i).transpose();
    rhs(q - 1) = 1.0;
    Eigen::VectorXd w = qr.solve(rhs);
    double s = 0.0;
    for (int c = 0; c < q; ++c) {
      w(c) = std::max(w(c), 0.0) * debias(c);
      s += w(c);
    }
    if (s <= 0.0)
      out.Pi.row(i).setConstant(1.0 / q);
    else
      out.Pi.row(i) = w.transpose() / s;
  }
  return out;
}

namespace {

// round each membership row to the nearest feasible pattern v/|v| with
// 1 <= |v| <= S ones. On exact memberships this reproduces thresholding at
// 1/S; under noise it is the least-squares decode. For a given count r the
// best support is the r largest entries, so only r varies.
BinMat threshold_rows(const Eigen::MatrixXd& Pi, int S) {
  int p = static_cast<int>(Pi.rows()), q = static_cast<int>(Pi.cols());
  int rmax = std::min(S, q);
  BinMat A(p, q);
  std::vector<int> ord(q);
  for (int i = 0; i < p; ++i) {
    for (int c = 0; c < q; ++c) ord[c] = c;
    std::stable_sort(ord.begin(), ord.end(),
                     [&](int a, int b) { return Pi(i, a) > Pi(i, b); });
    // ||pi - pattern_r||^2 differs from ||pi||^2 by 1/r - (2/r) * top-r sum
    int best_r = 1;
    double best = kInf, prefix = 0.0;
    for (int r = 1; r <= rmax; ++r) {
      prefix += Pi(i, ord[r - 1]);
      double score = (1.0 - 2.0 * prefix) / r;
      if (score < best - 1e-15) {
        best = score;
        best_r = r;
      }
    }
    for (int r = 0; r < best_r; ++r) A.at(i, ord[r]) = 1;
  }
  return A;
}

}  // namespace

ConnectionMatrices multilayer_init(const std::vector<BinMat>& observed,
                                   const NetworkShape& shape, int S,
                                   InitDiagnostics* diag, uint64_t seed) {
  shape.validate();
  if (observed.empty()) throw UsageError("multilayer_init: need at least one sample");
  if (S < 1) throw UsageError("multilayer_init: S must be >= 1");
  int pK = shape.p[shape.K];
  for (const BinMat& x : observed)
    if (x.rows != pK || x.cols != pK)
      throw UsageError("multilayer_init: sample size mismatch");

  Eigen::MatrixXd xbar = Eigen::MatrixXd::Zero(pK, pK);
  for (const BinMat& x : observed)
    for (int i = 0; i < pK; ++i)
      for (int j = 0; j < pK; ++j) xbar(i, j) += x.at(i, j);
  xbar /= static_cast<double>(observed.size());

  ConnectionMatrices conn;
  conn.A.resize(shape.K);
  if (diag) diag->max_assign_dist.assign(shape.K, 0.0);

  for (int k = shape.K; k >= 1; --k) {
    int q = shape.p[k - 1];
    DcmmEstimate est;
    try {
      est = mixed_score(xbar, q, splitmix64(seed ^ static_cast<uint64_t>(k)));
    } catch (const std::exception& e) {
      throw NumericError("multilayer_init: layer " + std::to_string(k) + ": " + e.what());
    }
    conn.A[k - 1] = threshold_rows(est.Pi, S);

    if (k == 1) break;
    // purest rows: assign each column slot its closest-to-indicator row
    int p = static_cast<int>(est.Pi.rows());
    Eigen::MatrixXd cost(p, q);
    for (int i = 0; i < p; ++i) {
      double rn = est.Pi.row(i).squaredNorm();
      for (int s = 0; s < q; ++s) cost(i, s) = rn - 2.0 * est.Pi(i, s) + 1.0;
    }
    std::vector<int> pick = min_cost_assignment(cost);
    if (diag) {
      double worst = 0.0;
      for (int s = 0; s < q; ++s) worst = std::max(worst, std::sqrt(cost(pick[s], s)));
      diag->max_assign_dist[k - 1] = worst;
    }
    Eigen::MatrixXd sub(q, q);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) sub(a, b) = xbar(pick[a], pick[b]);
    xbar = sub;
  }
  return conn;
}

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  int n = static_cast<int>(cost.rows());  // suppliers (rows)
  int m = static_cast<int>(cost.cols());  // demands (columns, all assigned)
  if (m < 1) return {};
  if (n < m) throw UsageError("min_cost_assignment: need rows >= cols");

  const double inf = kInf;
  std::vector<double> u(m + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= m; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(j - 1, i0 - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_of_col(m, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_of_col[p[j] - 1] = j - 1;
  return row_of_col;
}

}  // namespace mplex::spectral
