#include "crbf/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "crbf/channel.hpp"

namespace crbf {

double default_gamma(const TannerGraph& g) {
    const double mean_dc =
        static_cast<double>(g.total_edges()) / static_cast<double>(g.n_checks());
    return 1.0 / mean_dc;
}

double reliability_ceiling(std::span<const double> channel_values, const TannerGraph& g,
                           double gamma) {
    double ceiling = 0.0;
    for (std::size_t i = 0; i < g.n_vars(); ++i) {
        ceiling = std::max(ceiling, std::abs(channel_values[i]) +
                                        gamma * static_cast<double>(g.var_degree(i)));
    }
    return ceiling;
}

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::BF: return "bf";
        case Algorithm::WBF: return "wbf";
        case Algorithm::MWBF: return "mwbf";
        case Algorithm::IMWBF: return "imwbf";
        case Algorithm::SOFT_CRBF: return "soft-crbf";
        case Algorithm::HARD_CRBF: return "hard-crbf";
        case Algorithm::SPA: return "spa";
    }
    return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
    for (const Algorithm a : {Algorithm::BF, Algorithm::WBF, Algorithm::MWBF, Algorithm::IMWBF,
                              Algorithm::SOFT_CRBF, Algorithm::HARD_CRBF, Algorithm::SPA}) {
        if (name == algorithm_name(a)) return a;
    }
    throw std::invalid_argument("unknown decoder name: " + name);
}

namespace {

// Epoch-stamped membership set; clears in O(1).
class StampSet {
public:
    explicit StampSet(std::size_t n) : stamps_(n, 0) {}
    void new_epoch() { ++epoch_; }
    bool insert(std::size_t i) {
        if (stamps_[i] == epoch_) return false;
        stamps_[i] = epoch_;
        return true;
    }

private:
    std::vector<std::uint32_t> stamps_;
    std::uint32_t epoch_ = 0;
};

int count_unsatisfied(const BipolarWord& s) {
    int n = 0;
    for (const Sign v : s) n += v < 0;
    return n;
}

// Chooses the bit(s) of maximal cost. Returns the max value; `picked` gets
// the lowest-indexed maximum, or every tied index under ALL_TIED.
double select_flips(const std::vector<double>& costs, FlipPolicy policy,
                    std::vector<std::uint32_t>& picked) {
    picked.clear();
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (costs[i] > best) best = costs[i];
    }
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (costs[i] == best) {
            picked.push_back(static_cast<std::uint32_t>(i));
            if (policy == FlipPolicy::SINGLE_LOWEST_INDEX) break;
        }
    }
    return best;
}

void require_min_check_degree(const TannerGraph& g, const char* who) {
    for (std::size_t m = 0; m < g.n_checks(); ++m) {
        if (g.check_degree(m) < 2) {
            throw std::invalid_argument(std::string(who) +
                                        ": needs every check degree >= 2 (check " +
                                        std::to_string(m) + " has fewer neighbors)");
        }
    }
}

// ---------------------------------------------------------------------------
// BF / WBF / MWBF / IMWBF
//
// One engine: per-bit metric  E_i = -sum_{j in M(i)} s_hat_j * w(j,i) - t_i
// with static edge weights w and static per-bit term t. Only the syndrome
// moves between iterations, so a flip of bit e dirties exactly the bits
// sharing a check with e.
// ---------------------------------------------------------------------------

DecodeOutcome bf_family_decode(const BinaryWord& z, const std::vector<double>& edge_weights,
                               const std::vector<double>& bit_terms, const TannerGraph& g,
                               const DecoderConfig& cfg) {
    const std::size_t n = g.n_vars();
    if (z.size() != n) throw std::invalid_argument("decode: word length does not match n_vars");
    if (cfg.i_max < 1) throw std::invalid_argument("decode: i_max must be at least 1");

    DecodeOutcome out;
    BipolarWord x_hat = to_bipolar(z);
    BipolarWord s_hat = bipolar_syndrome(x_hat, g);
    int unsat = count_unsatisfied(s_hat);

    auto recompute_bit = [&](std::size_t i, std::vector<double>& costs) {
        double acc = 0.0;
        const auto checks = g.var_neighbors(i);
        const auto edges = g.var_edge_ids(i);
        for (std::size_t k = 0; k < checks.size(); ++k) {
            acc += static_cast<double>(s_hat[checks[k]]) * edge_weights[edges[k]];
        }
        costs[i] = -acc - bit_terms[i];
    };

    std::vector<double> costs(n);
    for (std::size_t i = 0; i < n; ++i) recompute_bit(i, costs);

    if (cfg.pre_check && unsat == 0) {
        out.decoded = z;
        out.converged = true;
        return out;
    }

    StampSet dirty_bits(n);
    std::vector<std::uint32_t> picked, prev_picked, dirty;
    for (std::uint32_t l = 1; l <= cfg.i_max; ++l) {
        const double max_cost = select_flips(costs, cfg.flip_policy, picked);
        for (const std::uint32_t e : picked) {
            out.flips.emplace_back(l, e);
            x_hat[e] = static_cast<Sign>(-x_hat[e]);
            for (const std::uint32_t j : g.var_neighbors(e)) {
                s_hat[j] = static_cast<Sign>(-s_hat[j]);
                unsat += s_hat[j] < 0 ? 1 : -1;
            }
        }
        if (l > 1 && picked == prev_picked) ++out.oscillations;
        prev_picked = picked;
        if (cfg.collect_trace) {
            out.trace.push_back({l, picked.size() == 1 ? static_cast<std::int32_t>(picked[0]) : -1,
                                 max_cost, static_cast<std::uint32_t>(unsat)});
        }

        if (unsat == 0 || l == cfg.i_max) {
            out.iterations = l;
            out.converged = unsat == 0;
            break;
        }

        if (cfg.update_mode == UpdateMode::FULL) {
            for (std::size_t i = 0; i < n; ++i) recompute_bit(i, costs);
            out.op_counts.cost_updates.push_back(static_cast<std::uint32_t>(n));
        } else {
            dirty_bits.new_epoch();
            dirty.clear();
            for (const std::uint32_t e : picked) {
                for (const std::uint32_t j : g.var_neighbors(e)) {
                    for (const std::uint32_t i : g.check_neighbors(j)) {
                        if (dirty_bits.insert(i)) dirty.push_back(i);
                    }
                }
            }
            for (const std::uint32_t i : dirty) recompute_bit(i, costs);
            out.op_counts.cost_updates.push_back(static_cast<std::uint32_t>(dirty.size()));
        }
        out.op_counts.reliability_updates.push_back(0);  // weights never move
    }

    out.decoded = to_binary(x_hat);
    return out;
}

// min |y| over N(j)\i for every edge via per-check (min, argmin, second-min).
std::vector<double> leave_one_out_weights(std::span<const double> y, const TannerGraph& g) {
    std::vector<double> w(g.total_edges());
    for (std::size_t m = 0; m < g.n_checks(); ++m) {
        const auto nbrs = g.check_neighbors(m);
        double min1 = std::numeric_limits<double>::infinity(), min2 = min1;
        std::size_t pos1 = 0;
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const double mag = std::abs(y[nbrs[k]]);
            if (mag < min1) {
                min2 = min1;
                min1 = mag;
                pos1 = k;
            } else if (mag < min2) {
                min2 = mag;
            }
        }
        const std::size_t base = g.edge_offset(m);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            w[base + k] = k == pos1 ? min2 : min1;
        }
    }
    return w;
}

DecodeOutcome wbf_variant(std::span<const double> y, const TannerGraph& g,
                          const DecoderConfig& cfg, double channel_coeff) {
    if (y.size() != g.n_vars()) {
        throw std::invalid_argument("decode: input length does not match n_vars");
    }
    require_min_check_degree(g, "wbf");
    std::vector<double> terms(g.n_vars(), 0.0);
    if (channel_coeff != 0.0) {
        for (std::size_t i = 0; i < g.n_vars(); ++i) terms[i] = channel_coeff * std::abs(y[i]);
    }
    return bf_family_decode(hard_decide(y), leave_one_out_weights(y, g), terms, g, cfg);
}

// ---------------------------------------------------------------------------
// CRBF
//
// Double-buffered iteration of the check-reliability recursion: the prev_*
// members of CrbfState hold iteration l-1 while l is written, and a swap
// ends the iteration. In incremental mode a check row or bit cost is
// recomputed exactly when one of its inputs moved since the last iteration,
// which reproduces the full recomputation bit for bit.
// ---------------------------------------------------------------------------

DecodeOutcome crbf_decode(std::span<const double> channel_values, const BinaryWord& z,
                          const TannerGraph& g, const DecoderConfig& cfg) {
    const std::size_t n = g.n_vars();
    const std::size_t n_checks = g.n_checks();
    const std::size_t n_edges = g.total_edges();
    if (channel_values.size() != n || z.size() != n) {
        throw std::invalid_argument("crbf: input length does not match n_vars");
    }
    if (!(cfg.gamma > 0.0)) throw std::invalid_argument("crbf: gamma must be positive");
    if (cfg.i_max < 1) throw std::invalid_argument("crbf: i_max must be at least 1");
    require_min_check_degree(g, "crbf");
    const double gamma = cfg.gamma;

    DecodeOutcome out;

    // The prev_* buffers hold iteration l-1 while iteration l writes the
    // others; a swap closes each iteration.
    CrbfState st;
    st.x_hat = to_bipolar(z);
    st.prev_s_hat = bipolar_syndrome(st.x_hat, g);
    st.s_hat = st.prev_s_hat;
    int unsat = count_unsatisfied(st.prev_s_hat);
    st.prev_rel.assign(n_edges, 1.0);
    st.rel.assign(n_edges, 0.0);
    st.prev_costs.resize(n);
    st.costs.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (const std::uint32_t j : g.var_neighbors(i)) {
            acc += static_cast<double>(st.prev_s_hat[j]);
        }
        st.prev_costs[i] = -(static_cast<double>(st.x_hat[i]) * channel_values[i] + gamma * acc);
    }

    if (cfg.collect_state_trace) {
        out.state_trace.push_back({0, st.x_hat, st.prev_s_hat, st.prev_costs, st.prev_rel});
    }

    if (cfg.pre_check && unsat == 0) {
        out.decoded = z;
        out.converged = true;
        return out;
    }

    out.min_edge_reliability = std::numeric_limits<double>::infinity();
    out.max_edge_reliability = -std::numeric_limits<double>::infinity();

    const bool incremental = cfg.update_mode == UpdateMode::INCREMENTAL;
    StampSet check_set(n_checks), bit_set(n);
    std::vector<std::uint32_t> picked, prev_picked;
    std::vector<std::uint32_t> changed_E_prev, changed_s_prev, changed_R_checks_prev;
    std::vector<std::uint32_t> dirty_checks, dirty_bits;
    std::vector<std::uint32_t> changed_E_cur, changed_s_cur, changed_R_checks_cur;
    std::vector<std::uint32_t> rbit_dirty;  // bits with a changed incident reliability

    // Recomputes check row j from the previous iteration's costs, syndrome
    // and reliabilities; reports whether any edge value moved and marks the
    // bits behind moved edges.
    auto recompute_check_row = [&](std::size_t j, bool track_changes) {
        const auto nbrs = g.check_neighbors(j);
        const std::size_t base = g.edge_offset(j);
        const double sj = static_cast<double>(st.prev_s_hat[j]);
        double max1 = -std::numeric_limits<double>::infinity(), max2 = max1;
        std::size_t pos1 = 0;
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const double q = st.prev_costs[nbrs[k]] - gamma * sj * st.prev_rel[base + k];
            if (q > max1) {
                max2 = max1;
                max1 = q;
                pos1 = k;
            } else if (q > max2) {
                max2 = q;
            }
        }
        bool row_changed = false;
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const double r_star = k == pos1 ? max2 : max1;
            const double r = std::max(-r_star, 0.0);
            st.rel[base + k] = r;
            if (track_changes && r != st.prev_rel[base + k]) {
                row_changed = true;
                if (bit_set.insert(nbrs[k])) rbit_dirty.push_back(nbrs[k]);
            }
        }
        return row_changed;
    };

    auto recompute_cost = [&](std::size_t i) {
        const auto checks = g.var_neighbors(i);
        const auto edges = g.var_edge_ids(i);
        double acc = 0.0;
        for (std::size_t k = 0; k < checks.size(); ++k) {
            acc += st.rel[edges[k]] * static_cast<double>(st.s_hat[checks[k]]);
        }
        st.costs[i] = -(static_cast<double>(st.x_hat[i]) * channel_values[i] + gamma * acc);
    };

    for (std::uint32_t l = 1; l <= cfg.i_max; ++l) {
        // Step 1: flip the most unreliable bit(s) of the previous iteration.
        const double max_cost = select_flips(st.prev_costs, cfg.flip_policy, picked);
        std::memcpy(st.s_hat.data(), st.prev_s_hat.data(), n_checks * sizeof(Sign));
        for (const std::uint32_t e : picked) {
            out.flips.emplace_back(l, e);
            st.x_hat[e] = static_cast<Sign>(-st.x_hat[e]);
            for (const std::uint32_t j : g.var_neighbors(e)) {
                st.s_hat[j] = static_cast<Sign>(-st.s_hat[j]);
                unsat += st.s_hat[j] < 0 ? 1 : -1;
            }
        }
        if (l > 1 && picked == prev_picked) ++out.oscillations;
        prev_picked = picked;
        changed_s_cur.clear();
        check_set.new_epoch();
        for (const std::uint32_t e : picked) {
            for (const std::uint32_t j : g.var_neighbors(e)) {
                if (st.s_hat[j] != st.prev_s_hat[j] && check_set.insert(j)) changed_s_cur.push_back(j);
            }
        }
        if (cfg.collect_trace) {
            out.trace.push_back({l, picked.size() == 1 ? static_cast<std::int32_t>(picked[0]) : -1,
                                 max_cost, static_cast<std::uint32_t>(unsat)});
        }

        // Step 2: stop on a valid codeword or iteration budget.
        if (unsat == 0 || l == cfg.i_max) {
            out.iterations = l;
            out.converged = unsat == 0;
            break;
        }

        // Step 3: refresh the check reliabilities.
        bit_set.new_epoch();
        rbit_dirty.clear();
        changed_R_checks_cur.clear();
        std::size_t rel_updates = 0;
        if (!incremental || l == 1) {
            // Iteration 1 always touches every row: the initial reliabilities
            // were assigned, not derived, so no "unchanged inputs" shortcut
            // exists yet.
            for (std::size_t j = 0; j < n_checks; ++j) {
                if (recompute_check_row(j, incremental)) {
                    changed_R_checks_cur.push_back(static_cast<std::uint32_t>(j));
                }
            }
            rel_updates = n_edges;
        } else {
            std::memcpy(st.rel.data(), st.prev_rel.data(), n_edges * sizeof(double));
            check_set.new_epoch();
            dirty_checks.clear();
            auto mark_check = [&](std::uint32_t j) {
                if (check_set.insert(j)) dirty_checks.push_back(j);
            };
            for (const std::uint32_t j : changed_s_prev) mark_check(j);
            for (const std::uint32_t j : changed_R_checks_prev) mark_check(j);
            for (const std::uint32_t i : changed_E_prev) {
                for (const std::uint32_t j : g.var_neighbors(i)) mark_check(j);
            }
            for (const std::uint32_t j : dirty_checks) {
                rel_updates += g.check_degree(j);
                if (recompute_check_row(j, true)) changed_R_checks_cur.push_back(j);
            }
        }
        out.op_counts.reliability_updates.push_back(static_cast<std::uint32_t>(rel_updates));
        for (const double r : st.rel) {
            out.min_edge_reliability = std::min(out.min_edge_reliability, r);
            out.max_edge_reliability = std::max(out.max_edge_reliability, r);
        }

        // Step 4: refresh the local costs.
        std::size_t cost_updates = 0;
        changed_E_cur.clear();
        if (!incremental) {
            for (std::size_t i = 0; i < n; ++i) recompute_cost(i);
            cost_updates = n;
        } else {
            std::memcpy(st.costs.data(), st.prev_costs.data(), n * sizeof(double));
            // rbit_dirty already holds bits with changed reliabilities; add
            // the flipped bit(s) and the neighborhoods of flipped checks.
            dirty_bits = rbit_dirty;
            auto mark_bit = [&](std::uint32_t i) {
                if (bit_set.insert(i)) dirty_bits.push_back(i);
            };
            for (const std::uint32_t e : picked) mark_bit(e);
            for (const std::uint32_t j : changed_s_cur) {
                for (const std::uint32_t i : g.check_neighbors(j)) mark_bit(i);
            }
            for (const std::uint32_t i : dirty_bits) {
                recompute_cost(i);
                if (st.costs[i] != st.prev_costs[i]) changed_E_cur.push_back(i);
            }
            cost_updates = dirty_bits.size();
        }
        out.op_counts.cost_updates.push_back(static_cast<std::uint32_t>(cost_updates));

        st.iter = l;
        if (cfg.collect_state_trace) {
            out.state_trace.push_back({l, st.x_hat, st.s_hat, st.costs, st.rel});
        }
        std::swap(st.prev_s_hat, st.s_hat);
        std::swap(st.prev_costs, st.costs);
        std::swap(st.prev_rel, st.rel);
        changed_E_prev.swap(changed_E_cur);
        changed_s_prev.swap(changed_s_cur);
        changed_R_checks_prev.swap(changed_R_checks_cur);
    }

    if (out.min_edge_reliability > out.max_edge_reliability) {
        out.min_edge_reliability = out.max_edge_reliability = 1.0;  // none computed
    }
    out.decoded = to_binary(st.x_hat);
    return out;
}

}  // namespace

std::vector<double> wbf_edge_weights(std::span<const double> y, const TannerGraph& g) {
    require_min_check_degree(g, "wbf_edge_weights");
    return leave_one_out_weights(y, g);
}

DecodeOutcome decode_bf(const BinaryWord& z, const TannerGraph& g, const DecoderConfig& cfg) {
    return bf_family_decode(z, std::vector<double>(g.total_edges(), 1.0),
                            std::vector<double>(g.n_vars(), 0.0), g, cfg);
}

DecodeOutcome decode_wbf(std::span<const double> y, const TannerGraph& g,
                         const DecoderConfig& cfg) {
    return wbf_variant(y, g, cfg, 0.0);
}

DecodeOutcome decode_mwbf(std::span<const double> y, const TannerGraph& g,
                          const DecoderConfig& cfg) {
    return wbf_variant(y, g, cfg, 1.0);
}

DecodeOutcome decode_imwbf(std::span<const double> y, const TannerGraph& g,
                           const DecoderConfig& cfg) {
    if (!(cfg.imwbf_alpha > 0.0)) {
        throw std::invalid_argument("imwbf: alpha must be positive");
    }
    return wbf_variant(y, g, cfg, cfg.imwbf_alpha);
}

DecodeOutcome decode_soft_crbf(std::span<const double> y, const TannerGraph& g,
                               const DecoderConfig& cfg) {
    return crbf_decode(y, hard_decide(y), g, cfg);
}

DecodeOutcome decode_hard_crbf(const BinaryWord& z, const TannerGraph& g,
                               const DecoderConfig& cfg) {
    if (z.size() != g.n_vars()) {
        throw std::invalid_argument("hard-crbf: word length does not match n_vars");
    }
    std::vector<double> z_hat(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) z_hat[i] = z[i] ? -1.0 : 1.0;
    return crbf_decode(z_hat, z, g, cfg);
}

DecodeOutcome decode_spa(std::span<const double> y, const TannerGraph& g,
                         const DecoderConfig& cfg, double sigma) {
    const std::size_t n = g.n_vars();
    const std::size_t n_checks = g.n_checks();
    const std::size_t n_edges = g.total_edges();
    if (y.size() != n) throw std::invalid_argument("spa: input length does not match n_vars");
    if (!(sigma > 0.0)) throw std::invalid_argument("spa: sigma must be positive");
    if (cfg.i_max < 1) throw std::invalid_argument("spa: i_max must be at least 1");

    static constexpr double kClamp = 30.0;
    auto clamp = [](double v) { return std::clamp(v, -kClamp, kClamp); };

    std::vector<double> llr(n);
    for (std::size_t i = 0; i < n; ++i) llr[i] = 2.0 * y[i] / (sigma * sigma);

    std::vector<double> var_to_check(n_edges), check_to_var(n_edges, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const std::uint32_t e : g.var_edge_ids(i)) var_to_check[e] = clamp(llr[i]);
    }

    DecodeOutcome out;
    std::vector<double> posterior(n);
    std::vector<double> fwd, bwd;
    BinaryWord z(n, 0);

    for (std::uint32_t iter = 1; iter <= cfg.i_max; ++iter) {
        // Check update: forward/backward tanh products give each edge the
        // product over the other edges of its check.
        for (std::size_t m = 0; m < n_checks; ++m) {
            const std::size_t deg = g.check_degree(m);
            const std::size_t base = g.edge_offset(m);
            fwd.resize(deg);
            bwd.resize(deg);
            for (std::size_t k = 0; k < deg; ++k) {
                const double t = std::tanh(0.5 * var_to_check[base + k]);
                fwd[k] = k == 0 ? t : fwd[k - 1] * t;
                const std::size_t kb = deg - 1 - k;
                const double tb = std::tanh(0.5 * var_to_check[base + kb]);
                bwd[kb] = kb == deg - 1 ? tb : bwd[kb + 1] * tb;
            }
            for (std::size_t k = 0; k < deg; ++k) {
                double prod = 1.0;
                if (k > 0) prod *= fwd[k - 1];
                if (k + 1 < deg) prod *= bwd[k + 1];
                check_to_var[base + k] = clamp(2.0 * std::atanh(prod));
            }
        }

        // Variable update and tentative decision.
        for (std::size_t i = 0; i < n; ++i) {
            double total = llr[i];
            for (const std::uint32_t e : g.var_edge_ids(i)) total += check_to_var[e];
            posterior[i] = total;
            z[i] = total >= 0.0 ? 0 : 1;
            for (const std::uint32_t e : g.var_edge_ids(i)) {
                var_to_check[e] = clamp(total - check_to_var[e]);
            }
        }
        out.op_counts.reliability_updates.push_back(static_cast<std::uint32_t>(n_edges));
        out.op_counts.cost_updates.push_back(static_cast<std::uint32_t>(n));

        const BinaryWord s = syndrome(z, g);
        const bool clean = std::all_of(s.begin(), s.end(), [](Bit b) { return b == 0; });
        if (clean || iter == cfg.i_max) {
            out.iterations = iter;
            out.converged = clean;
            break;
        }
    }

    out.decoded = z;
    out.posterior_llrs = std::move(posterior);
    return out;
}

DecodeOutcome decode(std::span<const double> y, const TannerGraph& g, const DecoderConfig& cfg,
                     double sigma) {
    switch (cfg.algorithm) {
        case Algorithm::BF: return decode_bf(hard_decide(y), g, cfg);
        case Algorithm::WBF: return decode_wbf(y, g, cfg);
        case Algorithm::MWBF: return decode_mwbf(y, g, cfg);
        case Algorithm::IMWBF: return decode_imwbf(y, g, cfg);
        case Algorithm::SOFT_CRBF: return decode_soft_crbf(y, g, cfg);
        case Algorithm::HARD_CRBF: return decode_hard_crbf(hard_decide(y), g, cfg);
        case Algorithm::SPA: return decode_spa(y, g, cfg, sigma);
    }
    throw std::logic_error("decode: unreachable");
}

}  // namespace crbf
