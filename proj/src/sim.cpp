#include "crbf/sim.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "crbf/channel.hpp"

namespace crbf {

double SweepRecord::ber_std_error() const {
    if (frames < 2 || word_length == 0) return 0.0;
    const double f = static_cast<double>(frames);
    const double mean = static_cast<double>(bit_errors) / f;
    const double var = std::max(0.0, bit_errors_sq_sum / f - mean * mean);
    return std::sqrt(var / f) / static_cast<double>(word_length);
}

namespace {

struct FrameResult {
    std::uint32_t bit_errors = 0;
    std::uint32_t iterations = 0;
};

BinaryWord sample_codeword(const std::vector<BinaryWord>& basis, std::size_t n, FrameRng& rng) {
    BinaryWord c(n, 0);
    for (const BinaryWord& b : basis) {
        if (rng.next_bit()) {
            for (std::size_t i = 0; i < n; ++i) c[i] ^= b[i];
        }
    }
    return c;
}

SweepRecord run_point_indexed(const SweepConfig& cfg, double ebn0_db, std::size_t point_index) {
    if (!cfg.code) throw std::invalid_argument("run_point: no code set");
    const TannerGraph& g = *cfg.code;
    const std::size_t n = g.n_vars();
    const double rate = cfg.rate_override > 0.0 ? cfg.rate_override : g.rate();
    const double sigma = ebn0_to_sigma(ebn0_db, rate);
    const std::size_t max_frames =
        cfg.max_frames > 0 ? cfg.max_frames : std::max<std::size_t>(1, 10'000'000 / n);

    std::vector<BinaryWord> basis;
    if (!cfg.all_zero_codeword) basis = null_space_basis(g);

    const unsigned threads =
        cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());

    const auto t0 = std::chrono::steady_clock::now();

    SweepRecord rec;
    rec.ebn0_db = ebn0_db;
    rec.word_length = n;
    double iteration_sum = 0.0;

    auto run_frame = [&](std::size_t frame_index) {
        FrameRng rng(cfg.seed, point_index, frame_index);
        const BinaryWord codeword =
            cfg.all_zero_codeword ? BinaryWord(n, 0) : sample_codeword(basis, n, rng);
        const std::vector<double> y = transmit(bpsk_modulate(codeword), sigma, rng);

        FrameResult r;
        BinaryWord decoded;
        if (cfg.decode_disabled) {
            decoded = hard_decide(y);
        } else {
            DecodeOutcome out = decode(y, g, cfg.decoder, sigma);
            r.iterations = out.iterations;
            decoded = std::move(out.decoded);
        }
        for (std::size_t i = 0; i < n; ++i) r.bit_errors += decoded[i] != codeword[i];
        return r;
    };

    // Frames are evaluated in parallel chunks but reduced strictly in frame
    // order, so the stopping frame (and every total) is independent of the
    // worker count and chunk size.
    std::size_t next_frame = 0;
    std::size_t chunk = std::max<std::size_t>(64, threads * 32);
    std::vector<FrameResult> results;
    bool done = false;
    while (!done && next_frame < max_frames) {
        const std::size_t begin = next_frame;
        const std::size_t end = std::min(max_frames, begin + chunk);
        results.assign(end - begin, {});

        if (threads == 1 || end - begin == 1) {
            for (std::size_t f = begin; f < end; ++f) results[f - begin] = run_frame(f);
        } else {
            std::atomic<std::size_t> cursor{begin};
            std::vector<std::thread> pool;
            pool.reserve(threads);
            for (unsigned t = 0; t < threads; ++t) {
                pool.emplace_back([&] {
                    for (std::size_t f = cursor.fetch_add(1); f < end; f = cursor.fetch_add(1)) {
                        results[f - begin] = run_frame(f);
                    }
                });
            }
            for (auto& th : pool) th.join();
        }

        for (std::size_t f = begin; f < end; ++f) {
            const FrameResult& r = results[f - begin];
            rec.frames += 1;
            rec.bit_errors += r.bit_errors;
            rec.frame_errors += r.bit_errors > 0;
            rec.bit_errors_sq_sum +=
                static_cast<double>(r.bit_errors) * static_cast<double>(r.bit_errors);
            iteration_sum += r.iterations;
            if (rec.bit_errors >= cfg.min_bit_errors && rec.frame_errors >= cfg.min_frame_errors) {
                done = true;
                break;
            }
        }
        next_frame = begin + results.size();
        chunk = std::min<std::size_t>(chunk * 2, 8192);
    }

    rec.ber = static_cast<double>(rec.bit_errors) / (static_cast<double>(rec.frames) * n);
    rec.fer = static_cast<double>(rec.frame_errors) / static_cast<double>(rec.frames);
    rec.mean_iterations = iteration_sum / static_cast<double>(rec.frames);
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

}  // namespace

SweepRecord run_point(const SweepConfig& cfg, double ebn0_db) {
    return run_point_indexed(cfg, ebn0_db, 0);
}

std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
    for (std::size_t k = 1; k < cfg.ebn0_points.size(); ++k) {
        if (!(cfg.ebn0_points[k] > cfg.ebn0_points[k - 1])) {
            throw std::invalid_argument("run_sweep: ebn0_points must be strictly increasing");
        }
    }
    std::vector<SweepRecord> records;
    records.reserve(cfg.ebn0_points.size());
    for (std::size_t k = 0; k < cfg.ebn0_points.size(); ++k) {
        records.push_back(run_point_indexed(cfg, cfg.ebn0_points[k], k));
    }
    return records;
}

std::vector<std::pair<double, SweepRecord>> gamma_sweep(const SweepConfig& cfg,
                                                        const std::vector<double>& gammas,
                                                        double ebn0_db) {
    std::vector<std::pair<double, SweepRecord>> out;
    out.reserve(gammas.size());
    for (const double gamma : gammas) {
        SweepConfig c = cfg;
        c.decoder.gamma = gamma;
        out.emplace_back(gamma, run_point_indexed(c, ebn0_db, 0));
    }
    return out;
}

std::vector<std::pair<double, SweepRecord>> alpha_sweep(const SweepConfig& cfg,
                                                        const std::vector<double>& alphas,
                                                        double ebn0_db) {
    std::vector<std::pair<double, SweepRecord>> out;
    out.reserve(alphas.size());
    for (const double alpha : alphas) {
        SweepConfig c = cfg;
        c.decoder.imwbf_alpha = alpha;
        out.emplace_back(alpha, run_point_indexed(c, ebn0_db, 0));
    }
    return out;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string records_to_csv(const std::vector<SweepRecord>& records) {
    std::string out = "ebn0_db,frames,bit_errors,frame_errors,ber,fer,mean_iterations,wall_seconds\n";
    for (const SweepRecord& r : records) {
        out += format_double(r.ebn0_db);
        out += ',' + std::to_string(r.frames);
        out += ',' + std::to_string(r.bit_errors);
        out += ',' + std::to_string(r.frame_errors);
        out += ',' + format_double(r.ber);
        out += ',' + format_double(r.fer);
        out += ',' + format_double(r.mean_iterations);
        out += ',' + format_double(r.wall_seconds);
        out += '\n';
    }
    return out;
}

void write_csv(const std::vector<SweepRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out << records_to_csv(records);
    if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

std::vector<SweepRecord> parse_csv(const std::string& text) {
    std::vector<SweepRecord> records;
    std::size_t pos = text.find('\n');
    if (pos == std::string::npos) throw std::runtime_error("parse_csv: missing header");
    while (pos + 1 < text.size()) {
        const std::size_t eol = text.find('\n', pos + 1);
        const std::string line = text.substr(pos + 1, eol - pos - 1);
        pos = eol == std::string::npos ? text.size() : eol;
        if (line.empty()) continue;
        SweepRecord r;
        char* cur = nullptr;
        const char* s = line.c_str();
        r.ebn0_db = std::strtod(s, &cur);
        r.frames = std::strtoull(cur + 1, &cur, 10);
        r.bit_errors = std::strtoull(cur + 1, &cur, 10);
        r.frame_errors = std::strtoull(cur + 1, &cur, 10);
        r.ber = std::strtod(cur + 1, &cur);
        r.fer = std::strtod(cur + 1, &cur);
        r.mean_iterations = std::strtod(cur + 1, &cur);
        r.wall_seconds = std::strtod(cur + 1, &cur);
        records.push_back(r);
    }
    return records;
}

}  // namespace crbf
