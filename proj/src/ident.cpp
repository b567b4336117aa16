#include "mplex/ident.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <unordered_map>

namespace mplex::ident {

namespace {

// fingerprint of a pair subset: the off-diagonal sum matrix, upper triangle
// packed as 5-bit fields (entries <= 2 * 15 = 30 for d <= 6), 12 fields/word
struct Fp {
  uint64_t w0 = 0, w1 = 0;
  bool operator==(const Fp&) const = default;
};

inline void fp_add(Fp& f, const Fp& d) { f.w0 += d.w0; f.w1 += d.w1; }
inline void fp_sub(Fp& f, const Fp& d) { f.w0 -= d.w0; f.w1 -= d.w1; }

inline void fp_bump(Fp& f, int field, uint64_t val) {
  if (field < 12)
    f.w0 += val << (5 * field);
  else
    f.w1 += val << (5 * (field - 12));
}

inline uint64_t fp_hash(const Fp& f) {
  return splitmix64(f.w0 ^ (f.w1 * 0x9e3779b97f4a7c15ull));
}

// per-pair packed contribution (m_i m_j^T + m_j m_i^T restricted off-diagonal)
Fp pair_delta(const BinMat& M, int i, int j) {
  Fp d;
  int n = M.rows, field = 0;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v, ++field) {
      uint64_t val = static_cast<uint64_t>(M.at(u, i)) * M.at(v, j) +
                     static_cast<uint64_t>(M.at(u, j)) * M.at(v, i);
      if (val) fp_bump(d, field, val);
    }
  return d;
}

// epoch-stamped open-addressing table reused across calls
struct FpTable {
  std::vector<Fp> fp;
  std::vector<uint32_t> mask, epoch;
  uint32_t cur = 0;
  size_t cap = 0;

  void reset(size_t want) {
    if (cap < want) {
      cap = want;
      fp.assign(cap, Fp{});
      mask.assign(cap, 0);
      epoch.assign(cap, 0);
      cur = 0;
    }
    ++cur;
    if (cur == 0) {  // epoch wrapped; full clear
      std::fill(epoch.begin(), epoch.end(), 0u);
      cur = 1;
    }
  }

  // returns -1 on fresh insert, else the previously stored subset mask
  int64_t insert(const Fp& f, uint32_t m) {
    size_t h = fp_hash(f) & (cap - 1);
    for (;;) {
      if (epoch[h] != cur) {
        epoch[h] = cur;
        fp[h] = f;
        mask[h] = m;
        return -1;
      }
      if (fp[h] == f) return mask[h];
      h = (h + 1) & (cap - 1);
    }
  }
};

thread_local FpTable g_table;

std::vector<std::pair<int, int>> mask_to_pairs(int d, uint32_t mask) {
  std::vector<std::pair<int, int>> out;
  int e = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j, ++e)
      if ((mask >> e) & 1u) out.emplace_back(i, j);
  return out;
}

// direct off-diagonal sum over a pair subset (witness verification)
std::vector<int> subset_sum(const BinMat& M, const std::vector<std::pair<int, int>>& s) {
  int d = M.rows;
  std::vector<int> f(static_cast<size_t>(d) * d, 0);
  for (auto [i, j] : s)
    for (int u = 0; u < d; ++u)
      for (int v = 0; v < d; ++v)
        if (u != v) f[u * d + v] += M.at(u, i) * M.at(v, j) + M.at(u, j) * M.at(v, i);
  return f;
}

// core enumeration; when `report` is null only the verdict is produced
bool md_fingerprints_distinct(const BinMat& M, MdReport* report) {
  int d = M.rows;
  int np = tri_count(d);
  std::vector<Fp> delta(np);
  int e = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j, ++e) delta[e] = pair_delta(M, i, j);

  size_t nsub = 1ull << np;
  g_table.reset(std::bit_ceil(nsub * 2));
  Fp acc;
  g_table.insert(acc, 0);
  uint32_t gray = 0;
  for (uint32_t s = 1; s < nsub; ++s) {
    int b = std::countr_zero(s);
    gray ^= 1u << b;
    if ((gray >> b) & 1u)
      fp_add(acc, delta[b]);
    else
      fp_sub(acc, delta[b]);
    int64_t prev = g_table.insert(acc, gray);
    if (prev >= 0) {
      if (report) {
        report->s1 = mask_to_pairs(d, static_cast<uint32_t>(prev));
        report->s2 = mask_to_pairs(d, gray);
        if (subset_sum(M, report->s1) != subset_sum(M, report->s2))
          throw NumericError("in_class_Md: witness failed re-verification");
      }
      return false;
    }
  }
  return true;
}

}  // namespace

MdReport in_class_Md(const BinMat& M) {
  if (M.rows != M.cols || M.rows < 1) throw UsageError("in_class_Md: need a square matrix");
  if (M.rows > 6) throw BudgetError("in_class_Md: d > 6 exceeds the enumeration budget");
  MdReport r;
  r.d = M.rows;
  for (int i = 0; i < M.rows; ++i)
    if (M.at(i, i) != 1) {
      r.bad_diag = i;
      return r;
    }
  r.in_class = md_fingerprints_distinct(M, &r);
  return r;
}

bool in_A1(const ConnectionMatrices& conn) {
  for (const BinMat& a : conn.A) {
    if (a.rows < 2 * a.cols) return false;
    for (int s = 0; s < a.cols; ++s) {
      int pure = 0;
      for (int i = 0; i < a.rows; ++i)
        if (a.at(i, s) && a.row_sum(i) == 1) ++pure;
      if (pure < 2) return false;
    }
  }
  return true;
}

namespace {

struct A21Search {
  int d = 0;
  uint64_t nodes = 0, cap = 0;
  bool capped = false;
  std::vector<uint64_t> values;  // distinct row bitmasks
  std::vector<int> avail;        // remaining multiplicity
  std::vector<int> cols;         // chosen value index per slot (2d slots)
  std::unordered_map<uint64_t, bool> md_cache;

  bool md_ok(int lo) {  // test slots [lo, lo+d) as a candidate class member
    uint64_t key = 0;
    for (int s = 0; s < d; ++s) key = (key << 6) | values[cols[lo + s]];
    auto it = md_cache.find(key);
    if (it != md_cache.end()) return it->second;
    BinMat m(d, d);
    for (int s = 0; s < d; ++s) {
      uint64_t v = values[cols[lo + s]];
      for (int u = 0; u < d; ++u) m.at(u, s) = (v >> u) & 1u;
    }
    bool ok = md_fingerprints_distinct(m, nullptr);
    md_cache.emplace(key, ok);
    return ok;
  }

  bool rec(int slot) {
    if (slot == d && !md_ok(0)) return false;
    if (slot == 2 * d) return md_ok(d);
    int bit = slot % d;
    for (size_t v = 0; v < values.size(); ++v) {
      if (!avail[v] || !((values[v] >> bit) & 1u)) continue;
      if (++nodes > cap) {
        capped = true;
        return false;
      }
      cols[slot] = static_cast<int>(v);
      --avail[v];
      if (rec(slot + 1)) return true;
      ++avail[v];
      if (capped) return false;
    }
    return false;
  }
};

}  // namespace

Tri in_A21_layer(const BinMat& A_k, uint64_t node_cap) {
  int d = A_k.cols;
  if (d > 6) return Tri::Undecided;  // class test infeasible at this width
  if (A_k.rows < 2 * d) return Tri::False;

  std::map<uint64_t, int> counts;
  for (int i = 0; i < A_k.rows; ++i) {
    uint64_t v = 0;
    for (int u = 0; u < d; ++u) v |= static_cast<uint64_t>(A_k.at(i, u)) << u;
    ++counts[v];
  }
  // necessary: each column slot must be coverable twice
  for (int s = 0; s < d; ++s) {
    int total = 0;
    for (auto& [v, c] : counts)
      if ((v >> s) & 1u) total += c;
    if (total < 2) return Tri::False;
  }

  A21Search srch;
  srch.d = d;
  srch.cap = node_cap;
  srch.cols.assign(2 * d, -1);
  for (auto& [v, c] : counts) {
    srch.values.push_back(v);
    srch.avail.push_back(c);
  }
  bool found = srch.rec(0);
  if (found) return Tri::True;
  return srch.capped ? Tri::Undecided : Tri::False;
}

Tri in_A21(const ConnectionMatrices& conn, uint64_t node_cap) {
  bool undecided = false;
  for (const BinMat& a : conn.A) {
    Tri t = in_A21_layer(a, node_cap);
    if (t == Tri::False) return Tri::False;
    if (t == Tri::Undecided) undecided = true;
  }
  return undecided ? Tri::Undecided : Tri::True;
}

bool in_A22(const ConnectionMatrices& conn) {
  for (const BinMat& a : conn.A) {
    std::vector<uint64_t> cols(a.cols, 0);
    for (int s = 0; s < a.cols; ++s)
      for (int i = 0; i < a.rows; ++i)
        cols[s] = cols[s] * 2 + a.at(i, s);  // fine for rows <= 63
    if (a.rows > 63) {  // wide fallback: compare column strings
      std::vector<std::string> cs(a.cols);
      for (int s = 0; s < a.cols; ++s) {
        cs[s].resize(a.rows);
        for (int i = 0; i < a.rows; ++i) cs[s][i] = static_cast<char>('0' + a.at(i, s));
      }
      std::sort(cs.begin(), cs.end());
      if (std::adjacent_find(cs.begin(), cs.end()) != cs.end()) return false;
      continue;
    }
    std::sort(cols.begin(), cols.end());
    if (std::adjacent_find(cols.begin(), cols.end()) != cols.end()) return false;
  }
  return true;
}

int integer_rank(const std::vector<std::vector<long long>>& m) {
  if (m.empty()) return 0;
  size_t rows = m.size(), cols = m[0].size();
  std::vector<std::vector<__int128>> w(rows, std::vector<__int128>(cols));
  for (size_t i = 0; i < rows; ++i) {
    if (m[i].size() != cols) throw UsageError("integer_rank: ragged matrix");
    for (size_t j = 0; j < cols; ++j) w[i][j] = m[i][j];
  }
  const __int128 lim = static_cast<__int128>(1) << 62;
  __int128 prev = 1;
  size_t rank = 0;
  for (size_t col = 0; col < cols && rank < rows; ++col) {
    size_t piv = rank;
    while (piv < rows && w[piv][col] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(w[piv], w[rank]);
    for (size_t i = rank + 1; i < rows; ++i) {
      for (size_t j = col + 1; j < cols; ++j) {
        __int128 a = w[rank][col], b = w[i][j], c = w[i][col], d = w[rank][j];
        if ((a > lim || a < -lim) || (b > lim || b < -lim) || (c > lim || c < -lim) ||
            (d > lim || d < -lim))
          throw NumericError("integer_rank: entry growth beyond guard");
        w[i][j] = (a * b - c * d) / prev;
      }
      w[i][col] = 0;
    }
    prev = w[rank][col];
    ++rank;
  }
  return static_cast<int>(rank);
}

bool in_A23(const ConnectionMatrices& conn) {
  for (const BinMat& a : conn.A) {
    int d = a.cols;
    std::vector<std::vector<long long>> rows;
    rows.reserve(tri_count(a.rows));
    for (int i = 0; i < a.rows; ++i)
      for (int j = i + 1; j < a.rows; ++j) {
        std::vector<long long> r(d + 1);
        r[0] = 1;
        for (int s = 0; s < d; ++s) r[s + 1] = a.at(i, s) * a.at(j, s);
        rows.push_back(std::move(r));
      }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    if (integer_rank(rows) != d + 1) return false;
  }
  return true;
}

bool has_all_ones_column(const BinMat& m) {
  for (int s = 0; s < m.cols; ++s) {
    bool all = true;
    for (int i = 0; i < m.rows && all; ++i) all = m.at(i, s);
    if (all) return true;
  }
  return false;
}

Tri in_A2(const ConnectionMatrices& conn, int S, bool use_shortcut, uint64_t node_cap) {
  if (conn.A.empty()) throw UsageError("in_A2: empty connection matrices");
  bool shortcut_ok = use_shortcut && (S == 1 || S == 2) && conn.A[0].cols >= 3;
  if (shortcut_ok)
    for (const BinMat& a : conn.A)
      if (has_all_ones_column(a)) {
        shortcut_ok = false;
        break;
      }
  if (shortcut_ok) return in_A21(conn, node_cap);

  if (!in_A22(conn) || !in_A23(conn)) return Tri::False;
  return in_A21(conn, node_cap);
}

Census md_census(int d) {
  if (d < 1 || d > 5) throw BudgetError("md_census: d must be in [1,5]");
  Census c;
  int nfree = d * (d - 1);  // off-diagonal entries
  uint64_t total = 1ull << nfree;
  c.matrices = total;

  for (uint64_t code = 0; code < total; ++code) {
    BinMat m(d, d);
    int b = 0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (i == j) {
          m.at(i, j) = 1;
          continue;
        }
        m.at(i, j) = (code >> b) & 1u;
        ++b;
      }
    // distinct columns
    bool distinct = true;
    uint64_t colmask[5];
    for (int j = 0; j < d; ++j) {
      uint64_t cm = 0;
      for (int i = 0; i < d; ++i) cm |= static_cast<uint64_t>(m.at(i, j)) << i;
      colmask[j] = cm;
    }
    for (int a = 0; a < d && distinct; ++a)
      for (int bb = a + 1; bb < d; ++bb)
        if (colmask[a] == colmask[bb]) {
          distinct = false;
          break;
        }
    if (!distinct) continue;
    ++c.distinct_cols;
    if (md_fingerprints_distinct(m, nullptr)) ++c.members;
  }
  c.fraction = c.distinct_cols ? static_cast<double>(c.members) / c.distinct_cols : 0.0;
  return c;
}

}  // namespace mplex::ident
