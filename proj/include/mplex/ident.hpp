#pragma once

#include "mplex/types.hpp"

namespace mplex::ident {

enum class Tri { False = 0, True = 1, Undecided = 2 };

inline const char* tri_name(Tri t) {
  switch (t) {
    case Tri::True: return "true";
    case Tri::False: return "false";
    default: return "undecided";
  }
}

struct MdReport {
  bool in_class = false;
  int d = 0;
  int bad_diag = -1;  // >= 0: failing diagonal entry
  // on a fingerprint collision: the two pair subsets with equal off-diagonal sums
  std::vector<std::pair<int, int>> s1, s2;
};

// membership in the class of d x d binary matrices with unit diagonal whose
// off-diagonal pair-sum fingerprints are all distinct; exact, d <= 6
MdReport in_class_Md(const BinMat& M);

// strict condition: every column has >= 2 pure indicator rows, p_k >= 2 p_{k-1}
bool in_A1(const ConnectionMatrices& conn);

// generic condition, part 1: some row permutation stacks two class members.
// exact backtracking; node cap exceeded -> Undecided
Tri in_A21_layer(const BinMat& A_k, uint64_t node_cap = 1ull << 21);
Tri in_A21(const ConnectionMatrices& conn, uint64_t node_cap = 1ull << 21);

// part 2: pairwise distinct columns in every A_k
bool in_A22(const ConnectionMatrices& conn);

// part 3: the stacked rows (1, a_i x a_j), i < j, have full column rank
// (integer fraction-free elimination)
bool in_A23(const ConnectionMatrices& conn);

// conjunction; with use_shortcut and S in {1,2}, p_0 >= 3 and no all-ones
// column, part 1 alone decides
Tri in_A2(const ConnectionMatrices& conn, int S, bool use_shortcut,
          uint64_t node_cap = 1ull << 21);

bool has_all_ones_column(const BinMat& m);

// exact rank over the rationals of a small integer matrix
int integer_rank(const std::vector<std::vector<long long>>& m);

struct Census {
  uint64_t matrices = 0;       // unit-diagonal matrices enumerated
  uint64_t distinct_cols = 0;  // ... with pairwise distinct columns
  uint64_t members = 0;        // ... of those, in the class
  double fraction = 0.0;       // members / distinct_cols
};

// exhaustive census over all unit-diagonal d x d binary matrices, d <= 5
Census md_census(int d);

}  // namespace mplex::ident
