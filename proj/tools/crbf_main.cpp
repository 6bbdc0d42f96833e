// Command-line front end: BER sweeps, parameter sweeps, single-frame traces,
// alist validation, and self-test code generation.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crbf/channel.hpp"
#include "crbf/decoders.hpp"
#include "crbf/metrics.hpp"
#include "crbf/sim.hpp"
#include "crbf/tanner.hpp"

namespace {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// --code resolution: as given, then under $CRBF_FIXTURES, then ./fixtures.
std::string resolve_code_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    if (fs::path(path).is_relative()) {
        if (const char* dir = std::getenv("CRBF_FIXTURES")) {
            const fs::path candidate = fs::path(dir) / path;
            if (fs::exists(candidate)) return candidate.string();
        }
        const fs::path local = fs::path("fixtures") / path;
        if (fs::exists(local)) return local.string();
    }
    return path;  // let load_alist report the failure
}

// "start:stop:step" inclusive of stop within half a step, or a single value.
std::vector<double> parse_ebn0_range(const std::string& text) {
    std::vector<double> points;
    const std::size_t c1 = text.find(':');
    if (c1 == std::string::npos) {
        points.push_back(std::stod(text));
        return points;
    }
    const std::size_t c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) {
        throw std::invalid_argument("--ebn0 expects START:STOP:STEP or a single value");
    }
    const double start = std::stod(text.substr(0, c1));
    const double stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(text.substr(c2 + 1));
    if (!(step > 0.0)) throw std::invalid_argument("--ebn0 step must be positive");
    for (double v = start; v <= stop + step / 2; v += step) points.push_back(v);
    return points;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = text.substr(pos, comma - pos);
        if (!item.empty()) values.push_back(std::stod(item));
        pos = comma + 1;
    }
    if (values.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
    return values;
}

struct CommonOpts {
    std::string code_path;
    std::string decoder = "soft-crbf";
    double gamma = 0.0;  // 0 -> 1 / dc
    double imwbf_alpha = 1.0;
    std::uint32_t i_max = 30;
    std::uint64_t seed = 1;
    std::string flip_policy = "single";
    bool literal_table_order = false;  // disables the pre-loop syndrome check
    std::size_t max_frames = 0;
    std::size_t min_bit_errors = 200;
    std::size_t min_frame_errors = 50;
    unsigned threads = 0;
    bool random_codewords = false;
    std::string output;
    bool no_manifest = false;
};

void add_decoder_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--decoder", o.decoder, "bf, wbf, mwbf, imwbf, soft-crbf, hard-crbf, spa")
        ->capture_default_str();
    cmd->add_option("--gamma", o.gamma, "check-penalty weight (default 1/dc)");
    cmd->add_option("--alpha", o.imwbf_alpha, "IMWBF channel-term weight")->capture_default_str();
    cmd->add_option("--imax", o.i_max, "iteration budget")->capture_default_str();
    cmd->add_option("--flip-policy", o.flip_policy, "single | all-tied")->capture_default_str();
    cmd->add_flag("--literal-table-order", o.literal_table_order,
                  "flip before the first syndrome test");
}

void add_sim_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "base RNG seed")->capture_default_str();
    cmd->add_option("--frames", o.max_frames, "max frames per point (default 1e7/N)");
    cmd->add_option("--min-bit-errors", o.min_bit_errors, "early-stop bit-error target")
        ->capture_default_str();
    cmd->add_option("--min-frame-errors", o.min_frame_errors, "early-stop frame-error target")
        ->capture_default_str();
    cmd->add_option("--threads", o.threads, "worker cap (default: hardware)");
    cmd->add_flag("--random-codewords", o.random_codewords,
                  "transmit random codewords instead of the all-zero word");
    cmd->add_option("--output", o.output, "output CSV path (default stdout)");
    cmd->add_flag("--no-manifest", o.no_manifest, "skip the JSON run manifest");
}

crbf::DecoderConfig make_decoder_config(const CommonOpts& o, const crbf::TannerGraph& g) {
    crbf::DecoderConfig cfg;
    cfg.algorithm = crbf::algorithm_from_name(o.decoder);
    cfg.i_max = o.i_max;
    cfg.gamma = o.gamma > 0.0 ? o.gamma : crbf::default_gamma(g);
    cfg.imwbf_alpha = o.imwbf_alpha;
    cfg.pre_check = !o.literal_table_order;
    if (o.flip_policy == "single") {
        cfg.flip_policy = crbf::FlipPolicy::SINGLE_LOWEST_INDEX;
    } else if (o.flip_policy == "all-tied") {
        cfg.flip_policy = crbf::FlipPolicy::ALL_TIED;
    } else {
        throw std::invalid_argument("--flip-policy must be 'single' or 'all-tied'");
    }
    return cfg;
}

crbf::SweepConfig make_sweep_config(const CommonOpts& o,
                                    std::shared_ptr<const crbf::TannerGraph> g) {
    crbf::SweepConfig cfg;
    cfg.code = std::move(g);
    cfg.decoder = make_decoder_config(o, *cfg.code);
    cfg.max_frames = o.max_frames;
    cfg.min_bit_errors = o.min_bit_errors;
    cfg.min_frame_errors = o.min_frame_errors;
    cfg.seed = o.seed;
    cfg.all_zero_codeword = !o.random_codewords;
    cfg.threads = o.threads;
    return cfg;
}

json config_json(const CommonOpts& o, const crbf::SweepConfig& cfg) {
    return json{{"code", o.code_path},
                {"decoder", o.decoder},
                {"gamma", cfg.decoder.gamma},
                {"imwbf_alpha", cfg.decoder.imwbf_alpha},
                {"i_max", cfg.decoder.i_max},
                {"flip_policy", o.flip_policy},
                {"pre_check", cfg.decoder.pre_check},
                {"seed", cfg.seed},
                {"max_frames", cfg.max_frames},
                {"min_bit_errors", cfg.min_bit_errors},
                {"min_frame_errors", cfg.min_frame_errors},
                {"all_zero_codeword", cfg.all_zero_codeword},
                {"threads", cfg.threads}};
}

void emit_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_manifest(const CommonOpts& o, const crbf::SweepConfig& cfg, const json& extra,
                    double wall_seconds) {
    if (o.output.empty() || o.no_manifest) return;
    json manifest{{"config", config_json(o, cfg)},
                  {"git_describe", CRBF_GIT_DESCRIBE},
                  {"wall_seconds", wall_seconds}};
    manifest.update(extra);
    std::ofstream out(o.output + ".manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open manifest file: " + o.output + ".manifest.json");
    out << manifest.dump(2) << '\n';
}

int cmd_sweep(const CommonOpts& o, const std::string& ebn0_text) {
    const auto t0 = std::chrono::steady_clock::now();
    auto g = std::make_shared<const crbf::TannerGraph>(
        crbf::load_alist(resolve_code_path(o.code_path)));
    crbf::SweepConfig cfg = make_sweep_config(o, g);
    cfg.ebn0_points = parse_ebn0_range(ebn0_text);

    const std::vector<crbf::SweepRecord> records = crbf::run_sweep(cfg);
    emit_output(crbf::records_to_csv(records), o.output);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(o, cfg, json{{"subcommand", "sweep"}, {"ebn0_points", cfg.ebn0_points}}, wall);
    return 0;
}

int cmd_param_sweep(const CommonOpts& o, const std::string& ebn0_text,
                    const std::string& list_text, bool is_gamma) {
    const auto t0 = std::chrono::steady_clock::now();
    auto g = std::make_shared<const crbf::TannerGraph>(
        crbf::load_alist(resolve_code_path(o.code_path)));
    crbf::SweepConfig cfg = make_sweep_config(o, g);
    const std::vector<double> ebn0 = parse_ebn0_range(ebn0_text);
    if (ebn0.size() != 1) {
        throw std::invalid_argument("parameter sweeps expect a single --ebn0 value");
    }
    const std::vector<double> values =
        parse_double_list(list_text, is_gamma ? "--gammas" : "--alphas");

    const auto results = is_gamma ? crbf::gamma_sweep(cfg, values, ebn0[0])
                                  : crbf::alpha_sweep(cfg, values, ebn0[0]);

    std::string csv = std::string(is_gamma ? "gamma" : "alpha") +
                      ",ebn0_db,frames,bit_errors,frame_errors,ber,fer,mean_iterations,"
                      "wall_seconds\n";
    for (const auto& [v, r] : results) {
        csv += format_double(v);
        csv += ',' + format_double(r.ebn0_db);
        csv += ',' + std::to_string(r.frames);
        csv += ',' + std::to_string(r.bit_errors);
        csv += ',' + std::to_string(r.frame_errors);
        csv += ',' + format_double(r.ber);
        csv += ',' + format_double(r.fer);
        csv += ',' + format_double(r.mean_iterations);
        csv += ',' + format_double(r.wall_seconds);
        csv += '\n';
    }
    emit_output(csv, o.output);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(o, cfg,
                   json{{"subcommand", is_gamma ? "gamma-sweep" : "alpha-sweep"},
                        {"ebn0_db", ebn0[0]},
                        {is_gamma ? "gammas" : "alphas", values}},
                   wall);
    return 0;
}

int cmd_trace(const CommonOpts& o, const std::string& ebn0_text, std::uint64_t frame_seed,
              const std::string& y_text) {
    auto g = std::make_shared<const crbf::TannerGraph>(
        crbf::load_alist(resolve_code_path(o.code_path)));
    const std::vector<double> ebn0 = parse_ebn0_range(ebn0_text);
    if (ebn0.size() != 1) throw std::invalid_argument("trace expects a single --ebn0 value");
    const double sigma = crbf::ebn0_to_sigma(ebn0[0], g->rate());

    std::vector<double> y;
    if (!y_text.empty()) {
        y = parse_double_list(y_text, "--y");
        if (y.size() != g->n_vars()) {
            throw std::invalid_argument("--y needs exactly " + std::to_string(g->n_vars()) +
                                        " values");
        }
    } else {
        crbf::FrameRng rng(o.seed, 0, frame_seed);
        y = crbf::transmit(crbf::bpsk_modulate(crbf::BinaryWord(g->n_vars(), 0)), sigma, rng);
    }

    crbf::DecoderConfig cfg = make_decoder_config(o, *g);
    cfg.collect_trace = true;
    const crbf::DecodeOutcome out = crbf::decode(y, *g, cfg, sigma);

    std::string text;
    for (const crbf::TraceRecord& t : out.trace) {
        text += json{{"iteration", t.iteration},
                     {"flipped_bit", t.flipped_bit},
                     {"max_cost", t.max_cost},
                     {"syndrome_weight", t.syndrome_weight}}
                    .dump() +
                '\n';
    }
    text += json{{"converged", out.converged},
                 {"iterations", out.iterations},
                 {"bit_errors_vs_zero",
                  static_cast<int>(std::count(out.decoded.begin(), out.decoded.end(), 1))}}
                .dump() +
            '\n';
    emit_output(text, o.output);
    return 0;
}

int cmd_check_alist(const std::string& path) {
    const crbf::TannerGraph g = crbf::load_alist(resolve_code_path(path));
    std::cout << "ok: N=" << g.n_vars() << " M=" << g.n_checks()
              << " edges=" << g.total_edges();
    if (g.dv()) std::cout << " dv=" << *g.dv();
    if (g.dc()) std::cout << " dc=" << *g.dc();
    std::cout << " rate=" << g.rate() << '\n';
    return 0;
}

int cmd_gen_code(std::size_t n, std::uint32_t dv, std::uint32_t dc, std::uint64_t seed,
                 const std::string& output) {
    const crbf::TannerGraph g = crbf::construct_regular(n, dv, dc, seed);
    emit_output(crbf::write_alist(g), output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"check-reliability bit-flipping LDPC decoders and BER harness"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string ebn0_text;
    std::string list_text;
    std::uint64_t frame_seed = 0;
    std::string y_text;
    std::size_t gen_n = 20;
    std::uint32_t gen_dv = 3, gen_dc = 4;
    std::uint64_t gen_seed = 7;
    std::string gen_output;

    CLI::App* sweep = app.add_subcommand("sweep", "BER/FER sweep over Eb/N0 points");
    sweep->add_option("--code", o.code_path, "alist file")->required();
    add_decoder_flags(sweep, o);
    sweep->add_option("--ebn0", ebn0_text, "START:STOP:STEP (dB) or single value")->required();
    add_sim_flags(sweep, o);

    CLI::App* gsweep = app.add_subcommand("gamma-sweep", "BER vs gamma at one Eb/N0");
    gsweep->add_option("--code", o.code_path, "alist file")->required();
    add_decoder_flags(gsweep, o);
    gsweep->add_option("--ebn0", ebn0_text, "Eb/N0 (dB)")->required();
    gsweep->add_option("--gammas", list_text, "comma-separated gamma values")->required();
    add_sim_flags(gsweep, o);

    CLI::App* asweep = app.add_subcommand("alpha-sweep", "BER vs IMWBF alpha at one Eb/N0");
    asweep->add_option("--code", o.code_path, "alist file")->required();
    add_decoder_flags(asweep, o);
    asweep->add_option("--ebn0", ebn0_text, "Eb/N0 (dB)")->required();
    asweep->add_option("--alphas", list_text, "comma-separated alpha values")->required();
    add_sim_flags(asweep, o);

    CLI::App* trace = app.add_subcommand("trace", "decode one frame, print per-iteration records");
    trace->add_option("--code", o.code_path, "alist file")->required();
    add_decoder_flags(trace, o);
    trace->add_option("--ebn0", ebn0_text, "Eb/N0 (dB)")->required();
    trace->add_option("--frame-seed", frame_seed, "frame index within the stream");
    trace->add_option("--seed", o.seed, "base RNG seed")->capture_default_str();
    trace->add_option("--y", y_text, "explicit received values, comma-separated");
    trace->add_option("--output", o.output, "output path (default stdout)");

    CLI::App* check = app.add_subcommand("check-alist", "validate an alist file");
    check->add_option("--code", o.code_path, "alist file")->required();

    CLI::App* gen = app.add_subcommand("gen-code", "write a random regular code as alist");
    gen->add_option("--n", gen_n, "codeword length")->capture_default_str();
    gen->add_option("--dv", gen_dv, "column weight")->capture_default_str();
    gen->add_option("--dc", gen_dc, "row weight")->capture_default_str();
    gen->add_option("--seed", gen_seed, "construction seed")->capture_default_str();
    gen->add_option("--output", gen_output, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }

    try {
        if (sweep->parsed()) return cmd_sweep(o, ebn0_text);
        if (gsweep->parsed()) return cmd_param_sweep(o, ebn0_text, list_text, true);
        if (asweep->parsed()) return cmd_param_sweep(o, ebn0_text, list_text, false);
        if (trace->parsed()) return cmd_trace(o, ebn0_text, frame_seed, y_text);
        if (check->parsed()) return cmd_check_alist(o.code_path);
        if (gen->parsed()) return cmd_gen_code(gen_n, gen_dv, gen_dc, gen_seed, gen_output);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
