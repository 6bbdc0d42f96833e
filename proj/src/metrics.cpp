#include "crbf/metrics.hpp"

#include <bit>
#include <stdexcept>

namespace crbf {

namespace {

void require_lengths(const BipolarWord& x_hat, std::span<const double> y, const TannerGraph& g,
                     const char* who) {
    if (x_hat.size() != g.n_vars() || y.size() != g.n_vars()) {
        throw std::invalid_argument(std::string(who) + ": input lengths do not match n_vars");
    }
}

}  // namespace

double global_cost(const BipolarWord& x_hat, std::span<const double> y, const TannerGraph& g,
                   double alpha) {
    require_lengths(x_hat, y, g, "global_cost");
    if (!(alpha > 0.0)) throw std::invalid_argument("global_cost: alpha must be positive");
    double corr = 0.0;
    for (std::size_t i = 0; i < g.n_vars(); ++i) {
        corr += static_cast<double>(x_hat[i]) * y[i];
    }
    double parity_sum = 0.0;
    for (std::size_t m = 0; m < g.n_checks(); ++m) {
        int p = 1;
        for (const std::uint32_t i : g.check_neighbors(m)) p *= x_hat[i];
        parity_sum += static_cast<double>(p);
    }
    return -corr - alpha * parity_sum;
}

std::vector<double> local_costs(const BipolarWord& x_hat, std::span<const double> y,
                                const TannerGraph& g, double gamma) {
    require_lengths(x_hat, y, g, "local_costs");
    if (!(gamma > 0.0)) throw std::invalid_argument("local_costs: gamma must be positive");
    const BipolarWord s_hat = bipolar_syndrome(x_hat, g);
    std::vector<double> costs(g.n_vars());
    for (std::size_t i = 0; i < g.n_vars(); ++i) {
        double check_sum = 0.0;
        for (const std::uint32_t j : g.var_neighbors(i)) {
            check_sum += static_cast<double>(s_hat[j]);
        }
        costs[i] = -(static_cast<double>(x_hat[i]) * y[i] + gamma * check_sum);
    }
    return costs;
}

std::vector<BinaryWord> enumerate_codewords(const TannerGraph& g) {
    const std::size_t n = g.n_vars();
    if (n > 24) {
        throw std::invalid_argument("enumerate_codewords: n_vars > 24 is not enumerable");
    }
    // Gray-code walk: each step flips one bit, so the count of unsatisfied
    // checks is maintained in O(dv) per visited word.
    BinaryWord word(n, 0);
    std::size_t unsatisfied = 0;
    std::vector<std::uint8_t> check_parity(g.n_checks(), 0);

    std::vector<BinaryWord> codewords;
    codewords.push_back(word);  // all-zero, always valid

    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < count; ++k) {
        const unsigned bit = std::countr_zero(k);  // Gray-code flip position
        word[bit] ^= 1;
        for (const std::uint32_t j : g.var_neighbors(bit)) {
            check_parity[j] ^= 1;
            unsatisfied += check_parity[j] ? 1 : -1;
        }
        if (unsatisfied == 0) codewords.push_back(word);
    }
    return codewords;
}

BipolarWord ml_brute_force(std::span<const double> y, const TannerGraph& g) {
    if (y.size() != g.n_vars()) {
        throw std::invalid_argument("ml_brute_force: input length does not match n_vars");
    }
    const std::vector<BinaryWord> codewords = enumerate_codewords(g);

    const BinaryWord* best = nullptr;
    double best_metric = 0.0;
    for (const BinaryWord& c : codewords) {
        double metric = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            metric += (c[i] ? -1.0 : 1.0) * y[i];
        }
        if (best == nullptr || metric > best_metric ||
            (metric == best_metric && c < *best)) {
            best = &c;
            best_metric = metric;
        }
    }
    return to_bipolar(*best);
}

}  // namespace crbf
