#pragma once

#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mplex {

// error taxonomy: UsageError -> CLI exit 2, NumericError -> exit 1
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// refusal to exceed an enumeration budget is a usage-class failure
struct BudgetError : UsageError {
  using UsageError::UsageError;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1+e^x) without overflow on either side
inline double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double log_sigmoid(double x) { return -softplus(-x); }

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// -inf-safe; empty -> -inf
double logsumexp(const std::vector<double>& v);

// upper-triangle (i<j) pairs in lexicographic order
inline int tri_count(int p) { return p * (p - 1) / 2; }

inline int tri_index(int p, int i, int j) {
  return i * (2 * p - i - 1) / 2 + (j - i - 1);
}

std::pair<int, int> tri_unindex(int p, int e);

// dense 0/1 matrix, row-major bytes
struct BinMat {
  int rows = 0, cols = 0;
  std::vector<uint8_t> v;

  BinMat() = default;
  BinMat(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0) {}

  uint8_t& at(int i, int j) { return v[static_cast<size_t>(i) * cols + j]; }
  uint8_t at(int i, int j) const { return v[static_cast<size_t>(i) * cols + j]; }

  bool operator==(const BinMat&) const = default;

  int row_sum(int i) const;
  std::string row_string(int i) const;
  bool is_symmetric_unit_diag() const;  // square, X=X^T, diag all ones
};

// parse rows like "0110"; all rows must be equal length over {0,1}
BinMat parse_bin_rows(const std::vector<std::string>& rows);
// parse a flat upper-triangle bitstring (lexicographic pairs) into a
// symmetric unit-diagonal p x p matrix
BinMat adj_from_tri_string(int p, const std::string& bits);
std::string adj_to_tri_string(const BinMat& X);

uint64_t splitmix64(uint64_t x);

// thread count resolution: MPLEX_THREADS env; 0/unset/invalid -> hardware
int resolved_threads();

// static chunk parallel map; fn(lo, hi) over [0, n); serial when 1 thread.
// callers that need determinism must write into disjoint slots and fold
// serially afterwards.
void parallel_chunks(int n, const std::function<void(int, int)>& fn);

}  // namespace mplex
