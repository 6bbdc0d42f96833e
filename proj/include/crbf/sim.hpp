#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "crbf/decoders.hpp"
#include "crbf/tanner.hpp"

namespace crbf {

/// Monte Carlo sweep description. Frames transmit the all-zero codeword by
/// default; per-frame noise streams are keyed (seed, point index, frame
/// index), so results are identical at any worker count.
struct SweepConfig {
    std::shared_ptr<const TannerGraph> code;
    DecoderConfig decoder;
    std::vector<double> ebn0_points;
    std::size_t max_frames = 0;        // 0 -> 10^7 / N
    std::size_t min_bit_errors = 200;  // early stop needs both minima reached
    std::size_t min_frame_errors = 50;
    std::uint64_t seed = 1;
    bool all_zero_codeword = true;     // false: sample random codewords
    double rate_override = 0.0;        // <= 0 -> design rate (N - M) / N
    bool decode_disabled = false;      // debug: output the raw hard decisions
    unsigned threads = 0;              // 0 -> hardware concurrency
};

struct SweepRecord {
    double ebn0_db = 0.0;
    std::size_t frames = 0;
    std::size_t bit_errors = 0;
    std::size_t frame_errors = 0;
    double ber = 0.0;
    double fer = 0.0;
    double mean_iterations = 0.0;
    double wall_seconds = 0.0;
    // In-memory extras, not part of the CSV schema: sum of squared per-frame
    // bit-error counts and the codeword length, for frame-level std errors.
    double bit_errors_sq_sum = 0.0;
    std::size_t word_length = 0;

    /// Frame-level standard error of the BER estimate (0 if unavailable).
    double ber_std_error() const;
};

/// Runs frames at one Eb/N0 until max_frames, or until both error minima are
/// met; totals always cover a prefix of the frame sequence, so early stopping
/// never biases counts.
SweepRecord run_point(const SweepConfig& cfg, double ebn0_db);

/// run_point per entry of cfg.ebn0_points; records in Eb/N0 order.
std::vector<SweepRecord> run_sweep(const SweepConfig& cfg);

/// Reruns one channel point for each gamma, with common per-frame noise so
/// the comparison is paired.
std::vector<std::pair<double, SweepRecord>> gamma_sweep(const SweepConfig& cfg,
                                                        const std::vector<double>& gammas,
                                                        double ebn0_db);

/// Same for the IMWBF channel-term weight.
std::vector<std::pair<double, SweepRecord>> alpha_sweep(const SweepConfig& cfg,
                                                        const std::vector<double>& alphas,
                                                        double ebn0_db);

/// Header "ebn0_db,frames,bit_errors,frame_errors,ber,fer,mean_iterations,
/// wall_seconds", one row per record, full-precision floats.
std::string records_to_csv(const std::vector<SweepRecord>& records);
void write_csv(const std::vector<SweepRecord>& records, const std::string& path);
std::vector<SweepRecord> parse_csv(const std::string& text);

}  // namespace crbf
