#pragma once

#include <cstdint>

#include "mplex/rng.hpp"

namespace mplex::pg {

// one draw from PG(1, c); exact (Devroye-style alternating-series rejection)
double sample_pg1(double c, Rng& g);

// rejection-loop cap exhaustions since process start / last reset.
// a nonzero count is a diagnostic anomaly, never a silent failure.
uint64_t cap_anomalies();
void reset_cap_anomalies();

// envelope split point and branch probability, exposed for tests
inline constexpr double kTrunc = 0.64;
double exp_branch_prob(double z);  // z = |c|/2

}  // namespace mplex::pg
