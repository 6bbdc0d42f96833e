#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crbf/tanner.hpp"

namespace crbf {

/// sigma = sqrt(1 / (2 * rate * 10^(ebn0_db/10))) for unit-energy BPSK.
double ebn0_to_sigma(double ebn0_db, double rate);
double sigma_to_ebn0(double sigma, double rate);

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
double q_function(double x);

struct ChannelParams {
    double ebn0_db;
    double rate;
    double sigma;

    static ChannelParams from_ebn0(double ebn0_db, double rate) {
        return {ebn0_db, rate, ebn0_to_sigma(ebn0_db, rate)};
    }
};

/// One channel use: transmitted codeword, soft receive values, hard decisions.
struct FrameSample {
    BinaryWord codeword;
    std::vector<double> y;
    BinaryWord z;
};

/// Counter-style random stream: the state walks a fixed 64-bit sequence and
/// every output is a SplitMix64 hash of it, so a (seed, point, frame) triple
/// pins the whole stream. Gaussians come from Box-Muller on two uniforms.
/// The generator algorithm never changes between runs or thread counts.
class FrameRng {
public:
    explicit FrameRng(std::uint64_t stream_key) : state_(stream_key) {}
    FrameRng(std::uint64_t seed, std::uint64_t point_index, std::uint64_t frame_index)
        : FrameRng(derive_stream(seed, point_index, frame_index)) {}

    std::uint64_t next_u64();
    /// Uniform on (0, 1]; never returns 0 so log() below stays finite.
    double next_unit_open();
    double next_gaussian();
    Bit next_bit() { return static_cast<Bit>(next_u64() >> 63); }

    static std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// out[i] = 1 - 2 c[i]: bit 0 -> +1, bit 1 -> -1.
BipolarWord bpsk_modulate(const BinaryWord& c);

/// z[i] = 0 if y[i] >= 0 else 1.
BinaryWord hard_decide(std::span<const double> y);

/// y[i] = c_hat[i] + n_i with n_i iid N(0, sigma^2); sigma = 0 is the
/// noiseless limit. Throws on negative sigma.
std::vector<double> transmit(const BipolarWord& c_hat, double sigma, FrameRng& rng);

FrameSample make_frame(const BinaryWord& codeword, double sigma, FrameRng& rng);

}  // namespace crbf
