#include "mplex/util.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace mplex {

double logsumexp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

std::pair<int, int> tri_unindex(int p, int e) {
  // row i holds p-1-i entries; walk rows (p is small everywhere we care)
  int i = 0, left = e;
  while (left >= p - 1 - i) {
    left -= p - 1 - i;
    ++i;
  }
  return {i, i + 1 + left};
}

int BinMat::row_sum(int i) const {
  int s = 0;
  for (int j = 0; j < cols; ++j) s += at(i, j);
  return s;
}

std::string BinMat::row_string(int i) const {
  std::string s(cols, '0');
  for (int j = 0; j < cols; ++j)
    if (at(i, j)) s[j] = '1';
  return s;
}

bool BinMat::is_symmetric_unit_diag() const {
  if (rows != cols) return false;
  for (int i = 0; i < rows; ++i) {
    if (at(i, i) != 1) return false;
    for (int j = i + 1; j < cols; ++j)
      if (at(i, j) != at(j, i)) return false;
  }
  return true;
}

BinMat parse_bin_rows(const std::vector<std::string>& rows) {
  if (rows.empty()) throw UsageError("parse_bin_rows: no rows");
  BinMat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int i = 0; i < m.rows; ++i) {
    if (static_cast<int>(rows[i].size()) != m.cols)
      throw UsageError("parse_bin_rows: ragged rows");
    for (int j = 0; j < m.cols; ++j) {
      char c = rows[i][j];
      if (c != '0' && c != '1') throw UsageError("parse_bin_rows: non-binary char");
      m.at(i, j) = (c == '1');
    }
  }
  return m;
}

BinMat adj_from_tri_string(int p, const std::string& bits) {
  if (static_cast<int>(bits.size()) != tri_count(p))
    throw UsageError("adj_from_tri_string: wrong length");
  BinMat X(p, p);
  for (int i = 0; i < p; ++i) X.at(i, i) = 1;
  int e = 0;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j, ++e) {
      char c = bits[e];
      if (c != '0' && c != '1') throw UsageError("adj_from_tri_string: non-binary char");
      X.at(i, j) = X.at(j, i) = (c == '1');
    }
  return X;
}

std::string adj_to_tri_string(const BinMat& X) {
  std::string s(tri_count(X.rows), '0');
  int e = 0;
  for (int i = 0; i < X.rows; ++i)
    for (int j = i + 1; j < X.cols; ++j, ++e)
      if (X.at(i, j)) s[e] = '1';
  return s;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

int resolved_threads() {
  if (const char* env = std::getenv("MPLEX_THREADS")) {
    char* end = nullptr;
    long t = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && t > 0) return static_cast<int>(t);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void parallel_chunks(int n, const std::function<void(int, int)>& fn) {
  int nt = std::min(resolved_threads(), n);
  if (nt <= 1 || n <= 1) {
    if (n > 0) fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  int base = n / nt, rem = n % nt, lo = 0;
  for (int t = 0; t < nt; ++t) {
    int hi = lo + base + (t < rem ? 1 : 0);
    pool.emplace_back(fn, lo, hi);
    lo = hi;
  }
  for (auto& th : pool) th.join();
}

}  // namespace mplex
