#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "crbf/tanner.hpp"

namespace crbf {

enum class Algorithm { BF, WBF, MWBF, IMWBF, SOFT_CRBF, HARD_CRBF, SPA };

enum class FlipPolicy {
    SINGLE_LOWEST_INDEX,  // flip the one lowest-indexed bit of maximal cost
    ALL_TIED,             // flip every bit tied at the maximal cost
};

enum class UpdateMode {
    INCREMENTAL,  // recompute only entries whose inputs changed
    FULL,         // recompute every reliability and cost each iteration
};

struct DecoderConfig {
    Algorithm algorithm = Algorithm::SOFT_CRBF;
    std::uint32_t i_max = 30;
    double gamma = 0.0;        // check-penalty weight; <= 0 is invalid at decode time
    double imwbf_alpha = 1.0;  // channel-term weight of the IMWBF metric
    FlipPolicy flip_policy = FlipPolicy::SINGLE_LOWEST_INDEX;
    bool pre_check = true;     // test the syndrome before the first flip
    UpdateMode update_mode = UpdateMode::INCREMENTAL;
    bool collect_trace = false;
    bool collect_state_trace = false;  // CRBF only; snapshots every iteration
};

/// gamma = 1 / mean check degree, which makes the global penalty weight 1
/// on regular codes.
double default_gamma(const TannerGraph& g);

/// Per-iteration decoder state of the check-reliability decoders. The prev_*
/// buffers hold the previous iteration's values, which reliability updates
/// read while the current buffers are written.
struct CrbfState {
    BipolarWord x_hat;           // bipolar decisions
    BipolarWord s_hat;           // bipolar syndrome of x_hat
    std::vector<double> costs;   // per-bit local costs
    std::vector<double> rel;     // per-edge check reliabilities
    BipolarWord prev_s_hat;
    std::vector<double> prev_costs;
    std::vector<double> prev_rel;
    std::uint32_t iter = 0;
};

/// Snapshot of the observable state after one iteration (used by tests and
/// the golden trace).
struct CrbfStateSnapshot {
    std::uint32_t iter = 0;
    BipolarWord x_hat;
    BipolarWord s_hat;
    std::vector<double> costs;
    std::vector<double> rel;
};

struct TraceRecord {
    std::uint32_t iteration;
    std::int32_t flipped_bit;       // -1 when nothing flipped
    double max_cost;                // cost of the flipped bit before the flip
    std::uint32_t syndrome_weight;  // unsatisfied checks after the flip
};

/// Recomputation counters per executed update pass.
struct OpCounts {
    std::vector<std::uint32_t> reliability_updates;  // edge reliabilities recomputed
    std::vector<std::uint32_t> cost_updates;         // bit costs recomputed
};

struct DecodeOutcome {
    BinaryWord decoded;
    bool converged = false;
    std::uint32_t iterations = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> flips;  // (iteration, bit)
    OpCounts op_counts;
    std::uint32_t oscillations = 0;  // iterations that re-flipped the previous bit(s)
    // Range of edge reliabilities actually computed (1.0/1.0 if none were).
    double min_edge_reliability = 1.0;
    double max_edge_reliability = 1.0;
    std::vector<double> posterior_llrs;  // SPA only
    std::vector<TraceRecord> trace;
    std::vector<CrbfStateSnapshot> state_trace;
};

/// Standard bit flipping on hard decisions: per-bit metric is the negated
/// sum of adjacent bipolar parities.
DecodeOutcome decode_bf(const BinaryWord& z, const TannerGraph& g, const DecoderConfig& cfg);

/// Weighted bit flipping: edge weight w(j,i) = min |y| over check j's other
/// neighbors, fixed for the whole decode.
DecodeOutcome decode_wbf(std::span<const double> y, const TannerGraph& g,
                         const DecoderConfig& cfg);

/// WBF with the channel magnitude |y_i| added to each bit metric.
DecodeOutcome decode_mwbf(std::span<const double> y, const TannerGraph& g,
                          const DecoderConfig& cfg);

/// MWBF with the channel term scaled by cfg.imwbf_alpha.
DecodeOutcome decode_imwbf(std::span<const double> y, const TannerGraph& g,
                           const DecoderConfig& cfg);

/// Check-reliability bit flipping on soft inputs; see CrbfState for the
/// quantities iterated.
DecodeOutcome decode_soft_crbf(std::span<const double> y, const TannerGraph& g,
                               const DecoderConfig& cfg);

/// Check-reliability bit flipping fed only hard decisions: the channel value
/// of bit i is its bipolar decision.
DecodeOutcome decode_hard_crbf(const BinaryWord& z, const TannerGraph& g,
                               const DecoderConfig& cfg);

/// Flooding log-domain sum-product reference decoder; channel LLRs 2y/sigma^2,
/// messages clamped to +-30.
DecodeOutcome decode_spa(std::span<const double> y, const TannerGraph& g,
                         const DecoderConfig& cfg, double sigma);

/// Dispatch on cfg.algorithm; hard-input decoders get hard_decide(y), SPA
/// gets sigma.
DecodeOutcome decode(std::span<const double> y, const TannerGraph& g, const DecoderConfig& cfg,
                     double sigma);

/// max_i(|channel_values[i]| + gamma * |M(i)|): the largest value a computed
/// check reliability is expected to take.
double reliability_ceiling(std::span<const double> channel_values, const TannerGraph& g,
                           double gamma);

/// Per-edge WBF weights w(j,i) = min over N(j)\i of |y|, computed with one
/// (min, second-min) scan per check.
std::vector<double> wbf_edge_weights(std::span<const double> y, const TannerGraph& g);

const char* algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);  // kebab-case names

}  // namespace crbf
