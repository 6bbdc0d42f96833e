#include "crbf/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crbf {

double ebn0_to_sigma(double ebn0_db, double rate) {
    if (!(rate > 0.0 && rate <= 1.0)) {
        throw std::invalid_argument("ebn0_to_sigma: rate must lie in (0, 1]");
    }
    return std::sqrt(1.0 / (2.0 * rate * std::pow(10.0, ebn0_db / 10.0)));
}

double sigma_to_ebn0(double sigma, double rate) {
    if (!(rate > 0.0 && rate <= 1.0)) {
        throw std::invalid_argument("sigma_to_ebn0: rate must lie in (0, 1]");
    }
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma_to_ebn0: sigma must be positive");
    return 10.0 * std::log10(1.0 / (2.0 * rate * sigma * sigma));
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace {

// SplitMix64 output mix.
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

}  // namespace

std::uint64_t FrameRng::derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = mix64(seed + kGamma);
    h = mix64(h ^ ((a + 1) * 0xd6e8feb86659fd93ULL));
    h = mix64(h ^ ((b + 1) * 0xca01f9dd51b143dfULL));
    return h;
}

std::uint64_t FrameRng::next_u64() {
    state_ += kGamma;
    return mix64(state_);
}

double FrameRng::next_unit_open() {
    // 53 random bits, shifted into (0, 1].
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double FrameRng::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = next_unit_open();
    const double u2 = next_unit_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

BipolarWord bpsk_modulate(const BinaryWord& c) { return to_bipolar(c); }

BinaryWord hard_decide(std::span<const double> y) {
    BinaryWord z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = y[i] >= 0.0 ? 0 : 1;
    return z;
}

std::vector<double> transmit(const BipolarWord& c_hat, double sigma, FrameRng& rng) {
    if (sigma < 0.0) throw std::invalid_argument("transmit: sigma must be nonnegative");
    std::vector<double> y(c_hat.size());
    if (sigma == 0.0) {
        for (std::size_t i = 0; i < c_hat.size(); ++i) y[i] = static_cast<double>(c_hat[i]);
        return y;
    }
    for (std::size_t i = 0; i < c_hat.size(); ++i) {
        y[i] = static_cast<double>(c_hat[i]) + sigma * rng.next_gaussian();
    }
    return y;
}

FrameSample make_frame(const BinaryWord& codeword, double sigma, FrameRng& rng) {
    FrameSample f;
    f.codeword = codeword;
    f.y = transmit(bpsk_modulate(codeword), sigma, rng);
    f.z = hard_decide(f.y);
    return f;
}

}  // namespace crbf
