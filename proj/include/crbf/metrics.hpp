#pragma once

#include <span>
#include <vector>

#include "crbf/tanner.hpp"

namespace crbf {

/// Check-penalty weights for the relaxed decoding cost. For a regular code
/// gamma = alpha / dc ties the per-bit and global forms together.
struct CostParams {
    double gamma;
    double alpha;

    static CostParams from_gamma(double gamma, std::uint32_t dc) {
        return {gamma, gamma * static_cast<double>(dc)};
    }
};

/// E(x_hat) = -sum_i x_hat[i] y[i] - alpha * sum_j s_hat[j], where s_hat[j]
/// is the bipolar parity of check j. Accumulation is index-ascending.
double global_cost(const BipolarWord& x_hat, std::span<const double> y, const TannerGraph& g,
                   double alpha);

/// E_i = -(x_hat[i] y[i] + gamma * sum over checks of i of s_hat[j]).
/// -E_i, when positive, is the reliability of bit i.
std::vector<double> local_costs(const BipolarWord& x_hat, std::span<const double> y,
                                const TannerGraph& g, double gamma);

/// All codewords of the code, enumerated by Gray-code walk over the full
/// 2^N cube with incremental syndrome bookkeeping. Guarded to n_vars <= 24.
std::vector<BinaryWord> enumerate_codewords(const TannerGraph& g);

/// Bipolar word maximizing sum_i x_hat[i] y[i] over valid codewords; ties go
/// to the lexicographically smallest bit pattern. Guarded to n_vars <= 24.
BipolarWord ml_brute_force(std::span<const double> y, const TannerGraph& g);

}  // namespace crbf
