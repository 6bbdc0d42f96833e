#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crbf {

using Bit = std::uint8_t;            // 0/1
using Sign = std::int8_t;            // +1/-1
using BinaryWord = std::vector<Bit>;
using BipolarWord = std::vector<Sign>;

/// Bit b -> 1 - 2b, so 0 -> +1 and 1 -> -1.
BipolarWord to_bipolar(const BinaryWord& bits);
BinaryWord to_binary(const BipolarWord& values);

/// Error raised while reading alist text; carries the 1-based offending line.
class AlistError : public std::runtime_error {
public:
    AlistError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Sparse bipartite adjacency of an LDPC parity-check matrix.
///
/// Checks and variables carry each other's sorted neighbor lists, and every
/// (check, variable) pair maps to a dense edge id in [0, total_edges) laid
/// out check-major. Immutable after construction; safe to share across
/// threads.
class TannerGraph {
public:
    /// Builds the graph from per-check variable lists (0-based). Lists are
    /// sorted internally; duplicates, out-of-range indices, and variables
    /// that touch no check are rejected.
    TannerGraph(std::size_t n_vars, std::vector<std::vector<std::uint32_t>> check_neighbors);

    std::size_t n_vars() const noexcept { return n_vars_; }
    std::size_t n_checks() const noexcept { return check_offsets_.size() - 1; }
    std::size_t total_edges() const noexcept { return check_flat_.size(); }

    /// N(m): variables participating in check m, ascending.
    std::span<const std::uint32_t> check_neighbors(std::size_t m) const;
    /// M(n): checks touching variable n, ascending.
    std::span<const std::uint32_t> var_neighbors(std::size_t n) const;
    /// Edge ids aligned element-wise with var_neighbors(n).
    std::span<const std::uint32_t> var_edge_ids(std::size_t n) const;

    /// Dense id of edge (check m, variable i); throws if the edge is absent.
    std::size_t edge_id(std::size_t m, std::uint32_t i) const;
    /// First edge id of check m; edges of m are [edge_offset(m), edge_offset(m)+deg).
    std::size_t edge_offset(std::size_t m) const { return check_offsets_[m]; }

    std::size_t check_degree(std::size_t m) const { return check_offsets_[m + 1] - check_offsets_[m]; }
    std::size_t var_degree(std::size_t n) const { return var_offsets_[n + 1] - var_offsets_[n]; }

    /// Column/row weight when the code is regular, absent otherwise.
    std::optional<std::uint32_t> dv() const noexcept { return dv_; }
    std::optional<std::uint32_t> dc() const noexcept { return dc_; }

    double rate() const noexcept;  // (N - M) / N, the design rate

    bool operator==(const TannerGraph& other) const noexcept;

private:
    std::size_t n_vars_ = 0;
    // CSR over checks: check_flat_ holds N(m) back to back, check-major edge ids.
    std::vector<std::uint32_t> check_flat_;
    std::vector<std::size_t> check_offsets_;
    // CSR over variables plus the edge id of each incident (check, var) pair.
    std::vector<std::uint32_t> var_flat_;
    std::vector<std::uint32_t> var_edge_flat_;
    std::vector<std::size_t> var_offsets_;
    std::optional<std::uint32_t> dv_;
    std::optional<std::uint32_t> dc_;
};

/// Parses alist text: "N M", "max_dv max_dc", per-variable degrees,
/// per-check degrees, N variable neighbor lines, M check neighbor lines,
/// 1-based indices. Tokens beyond a line's declared degree are treated as
/// padding and ignored; the two adjacency halves are cross-checked.
TannerGraph parse_alist(const std::string& text);
TannerGraph load_alist(const std::string& path);

/// Canonical alist text: no padding, neighbors ascending, trailing newline.
std::string write_alist(const TannerGraph& g);

/// Random (dv, dc)-regular graph on n_vars variables via socket permutation;
/// resamples until no duplicate edge remains. Deterministic in seed.
TannerGraph construct_regular(std::size_t n_vars, std::uint32_t dv, std::uint32_t dc,
                              std::uint64_t seed);

/// s[m] = XOR of x[i] over i in N(m); all-zero iff x is a codeword.
BinaryWord syndrome(const BinaryWord& x, const TannerGraph& g);

/// s_hat[m] = product of x_hat[i] over i in N(m); +1 iff check m satisfied.
BipolarWord bipolar_syndrome(const BipolarWord& x_hat, const TannerGraph& g);

/// Basis of the GF(2) null space of H (the code's codeword space).
std::vector<BinaryWord> null_space_basis(const TannerGraph& g);

}  // namespace crbf
