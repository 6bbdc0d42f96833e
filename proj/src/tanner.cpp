#include "crbf/tanner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace crbf {

BipolarWord to_bipolar(const BinaryWord& bits) {
    BipolarWord out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        out[i] = static_cast<Sign>(1 - 2 * static_cast<int>(bits[i]));
    }
    return out;
}

BinaryWord to_binary(const BipolarWord& values) {
    BinaryWord out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = values[i] > 0 ? 0 : 1;
    }
    return out;
}

AlistError::AlistError(std::size_t line, const std::string& what)
    : std::runtime_error("alist line " + std::to_string(line) + ": " + what), line_(line) {}

TannerGraph::TannerGraph(std::size_t n_vars,
                         std::vector<std::vector<std::uint32_t>> check_neighbors)
    : n_vars_(n_vars) {
    if (n_vars == 0) throw std::invalid_argument("graph must have at least one variable");
    const std::size_t n_checks = check_neighbors.size();

    check_offsets_.assign(n_checks + 1, 0);
    std::vector<std::size_t> var_deg(n_vars, 0);
    for (std::size_t m = 0; m < n_checks; ++m) {
        auto& list = check_neighbors[m];
        if (list.empty()) {
            throw std::invalid_argument("check " + std::to_string(m) + " has no neighbors");
        }
        std::sort(list.begin(), list.end());
        for (std::size_t k = 0; k < list.size(); ++k) {
            if (list[k] >= n_vars) {
                throw std::invalid_argument("check " + std::to_string(m) +
                                            " references variable " + std::to_string(list[k]) +
                                            " out of range");
            }
            if (k > 0 && list[k] == list[k - 1]) {
                throw std::invalid_argument("check " + std::to_string(m) +
                                            " lists variable " + std::to_string(list[k]) +
                                            " twice");
            }
            ++var_deg[list[k]];
        }
        check_offsets_[m + 1] = check_offsets_[m] + list.size();
    }

    for (std::size_t n = 0; n < n_vars; ++n) {
        if (var_deg[n] == 0) {
            throw std::invalid_argument("variable " + std::to_string(n) +
                                        " participates in no check");
        }
    }

    check_flat_.reserve(check_offsets_.back());
    for (const auto& list : check_neighbors) {
        check_flat_.insert(check_flat_.end(), list.begin(), list.end());
    }

    var_offsets_.assign(n_vars + 1, 0);
    for (std::size_t n = 0; n < n_vars; ++n) var_offsets_[n + 1] = var_offsets_[n] + var_deg[n];
    var_flat_.resize(check_flat_.size());
    var_edge_flat_.resize(check_flat_.size());
    std::vector<std::size_t> fill(n_vars, 0);
    for (std::size_t m = 0; m < n_checks; ++m) {
        for (std::size_t e = check_offsets_[m]; e < check_offsets_[m + 1]; ++e) {
            const std::uint32_t i = check_flat_[e];
            const std::size_t slot = var_offsets_[i] + fill[i]++;
            var_flat_[slot] = static_cast<std::uint32_t>(m);
            var_edge_flat_[slot] = static_cast<std::uint32_t>(e);
        }
    }
    // Check ids arrive in ascending m above, so each var list is already sorted.

    bool regular_v = true, regular_c = true;
    for (std::size_t n = 1; n < n_vars && regular_v; ++n) regular_v = var_deg[n] == var_deg[0];
    for (std::size_t m = 1; m < n_checks && regular_c; ++m) {
        regular_c = check_degree(m) == check_degree(0);
    }
    if (regular_v) dv_ = static_cast<std::uint32_t>(var_deg[0]);
    if (regular_c && n_checks > 0) dc_ = static_cast<std::uint32_t>(check_degree(0));
}

std::span<const std::uint32_t> TannerGraph::check_neighbors(std::size_t m) const {
    return {check_flat_.data() + check_offsets_[m], check_offsets_[m + 1] - check_offsets_[m]};
}

std::span<const std::uint32_t> TannerGraph::var_neighbors(std::size_t n) const {
    return {var_flat_.data() + var_offsets_[n], var_offsets_[n + 1] - var_offsets_[n]};
}

std::span<const std::uint32_t> TannerGraph::var_edge_ids(std::size_t n) const {
    return {var_edge_flat_.data() + var_offsets_[n], var_offsets_[n + 1] - var_offsets_[n]};
}

std::size_t TannerGraph::edge_id(std::size_t m, std::uint32_t i) const {
    const auto nbrs = check_neighbors(m);
    const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), i);
    if (it == nbrs.end() || *it != i) {
        throw std::invalid_argument("no edge between check " + std::to_string(m) +
                                    " and variable " + std::to_string(i));
    }
    return check_offsets_[m] + static_cast<std::size_t>(it - nbrs.begin());
}

double TannerGraph::rate() const noexcept {
    return static_cast<double>(n_vars_ - n_checks()) / static_cast<double>(n_vars_);
}

bool TannerGraph::operator==(const TannerGraph& other) const noexcept {
    return n_vars_ == other.n_vars_ && check_offsets_ == other.check_offsets_ &&
           check_flat_ == other.check_flat_;
}

namespace {

struct Token {
    std::uint64_t value;
    std::size_t line;
};

// Whole-text tokenizer that remembers the source line of every integer.
std::vector<Token> tokenize_alist(const std::string& text, std::vector<std::size_t>& line_breaks) {
    std::vector<Token> tokens;
    std::size_t line = 1;
    std::size_t i = 0;
    bool line_had_token = false;
    line_breaks.clear();
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            if (line_had_token) line_breaks.push_back(tokens.size());
            line_had_token = false;
            ++line;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c < '0' || c > '9') {
            throw AlistError(line, std::string("unexpected character '") + c + "'");
        }
        std::uint64_t v = 0;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            v = v * 10 + static_cast<std::uint64_t>(text[i] - '0');
            if (v > std::numeric_limits<std::uint32_t>::max()) {
                throw AlistError(line, "integer too large");
            }
            ++i;
        }
        tokens.push_back({v, line});
        line_had_token = true;
    }
    if (line_had_token) line_breaks.push_back(tokens.size());
    return tokens;
}

}  // namespace

TannerGraph parse_alist(const std::string& text) {
    // line_breaks[k] = token count after the k-th nonblank line; a "line" below
    // is the slice of tokens between consecutive breaks.
    std::vector<std::size_t> line_breaks;
    const std::vector<Token> tokens = tokenize_alist(text, line_breaks);

    const std::size_t n_lines = line_breaks.size();
    auto line_begin = [&](std::size_t k) { return k == 0 ? std::size_t{0} : line_breaks[k - 1]; };
    auto line_end = [&](std::size_t k) { return line_breaks[k]; };
    auto line_no = [&](std::size_t k) { return tokens[line_begin(k)].line; };

    if (n_lines < 4) throw AlistError(n_lines == 0 ? 1 : tokens.back().line, "truncated header");

    auto expect_count = [&](std::size_t k, std::size_t count, const char* what) {
        if (line_end(k) - line_begin(k) != count) {
            throw AlistError(line_no(k), std::string("malformed header: expected ") +
                                             std::to_string(count) + " " + what);
        }
    };

    expect_count(0, 2, "integers (N M)");
    const std::size_t n_vars = tokens[line_begin(0)].value;
    const std::size_t n_checks = tokens[line_begin(0) + 1].value;
    if (n_vars == 0 || n_checks == 0) throw AlistError(line_no(0), "N and M must be positive");

    expect_count(1, 2, "integers (max_dv max_dc)");
    const std::uint64_t max_dv = tokens[line_begin(1)].value;
    const std::uint64_t max_dc = tokens[line_begin(1) + 1].value;

    if (n_lines != 4 + n_vars + n_checks) {
        throw AlistError(tokens.back().line,
                         "expected " + std::to_string(4 + n_vars + n_checks) +
                             " lines for N=" + std::to_string(n_vars) +
                             ", M=" + std::to_string(n_checks) + ", found " +
                             std::to_string(n_lines));
    }

    expect_count(2, n_vars, "variable degrees");
    expect_count(3, n_checks, "check degrees");

    std::vector<std::size_t> var_deg(n_vars), check_deg(n_checks);
    for (std::size_t n = 0; n < n_vars; ++n) {
        const Token t = tokens[line_begin(2) + n];
        if (t.value == 0) {
            throw AlistError(t.line, "variable " + std::to_string(n + 1) + " has degree 0");
        }
        if (t.value > max_dv) {
            throw AlistError(t.line, "variable degree " + std::to_string(t.value) +
                                         " exceeds declared maximum " + std::to_string(max_dv));
        }
        var_deg[n] = t.value;
    }
    for (std::size_t m = 0; m < n_checks; ++m) {
        const Token t = tokens[line_begin(3) + m];
        if (t.value == 0) {
            throw AlistError(t.line, "check " + std::to_string(m + 1) + " has degree 0");
        }
        if (t.value > max_dc) {
            throw AlistError(t.line, "check degree " + std::to_string(t.value) +
                                         " exceeds declared maximum " + std::to_string(max_dc));
        }
        check_deg[m] = t.value;
    }

    // Reads one adjacency line: the first `deg` tokens are 1-based neighbor
    // indices, anything after that is padding and ignored.
    auto read_neighbors = [&](std::size_t k, std::size_t deg, std::size_t index_limit,
                              const char* owner, std::size_t owner_id) {
        const std::size_t avail = line_end(k) - line_begin(k);
        if (avail < deg) {
            throw AlistError(line_no(k), std::string(owner) + " " + std::to_string(owner_id + 1) +
                                             ": " + std::to_string(deg) +
                                             " neighbors declared but only " +
                                             std::to_string(avail) + " listed");
        }
        std::vector<std::uint32_t> out(deg);
        for (std::size_t j = 0; j < deg; ++j) {
            const Token t = tokens[line_begin(k) + j];
            if (t.value == 0 || t.value > index_limit) {
                throw AlistError(t.line, std::string(owner) + " " + std::to_string(owner_id + 1) +
                                             ": neighbor index " + std::to_string(t.value) +
                                             " out of range [1, " + std::to_string(index_limit) +
                                             "]");
            }
            out[j] = static_cast<std::uint32_t>(t.value - 1);
        }
        auto sorted = out;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t j = 1; j < sorted.size(); ++j) {
            if (sorted[j] == sorted[j - 1]) {
                throw AlistError(line_no(k), std::string(owner) + " " +
                                                 std::to_string(owner_id + 1) +
                                                 ": duplicate neighbor " +
                                                 std::to_string(sorted[j] + 1));
            }
        }
        return sorted;
    };

    std::vector<std::vector<std::uint32_t>> var_lists(n_vars), check_lists(n_checks);
    for (std::size_t n = 0; n < n_vars; ++n) {
        var_lists[n] = read_neighbors(4 + n, var_deg[n], n_checks, "variable", n);
    }
    for (std::size_t m = 0; m < n_checks; ++m) {
        check_lists[m] = read_neighbors(4 + n_vars + m, check_deg[m], n_vars, "check", m);
    }

    // Cross-check the two halves; catches mismatches hidden by padding.
    std::vector<std::vector<std::uint32_t>> derived(n_vars);
    for (std::size_t m = 0; m < n_checks; ++m) {
        for (const std::uint32_t i : check_lists[m]) {
            derived[i].push_back(static_cast<std::uint32_t>(m));
        }
    }
    for (std::size_t n = 0; n < n_vars; ++n) {
        if (derived[n] != var_lists[n]) {
            throw AlistError(line_no(4 + n),
                             "variable " + std::to_string(n + 1) +
                                 ": neighbor list disagrees with the check-side lists");
        }
    }

    return TannerGraph(n_vars, std::move(check_lists));
}

TannerGraph load_alist(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open alist file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_alist(buf.str());
}

std::string write_alist(const TannerGraph& g) {
    const std::size_t n = g.n_vars(), m = g.n_checks();
    std::size_t max_dv = 0, max_dc = 0;
    for (std::size_t i = 0; i < n; ++i) max_dv = std::max(max_dv, g.var_degree(i));
    for (std::size_t j = 0; j < m; ++j) max_dc = std::max(max_dc, g.check_degree(j));

    std::string out;
    out.reserve(16 * (n + m));
    auto append_row = [&out](std::span<const std::uint32_t> xs, bool one_based) {
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (k) out += ' ';
            out += std::to_string(xs[k] + (one_based ? 1 : 0));
        }
        out += '\n';
    };

    out += std::to_string(n) + ' ' + std::to_string(m) + '\n';
    out += std::to_string(max_dv) + ' ' + std::to_string(max_dc) + '\n';
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += std::to_string(g.var_degree(i));
    }
    out += '\n';
    for (std::size_t j = 0; j < m; ++j) {
        if (j) out += ' ';
        out += std::to_string(g.check_degree(j));
    }
    out += '\n';
    for (std::size_t i = 0; i < n; ++i) append_row(g.var_neighbors(i), true);
    for (std::size_t j = 0; j < m; ++j) append_row(g.check_neighbors(j), true);
    return out;
}

namespace {

// Unbiased draw in [0, bound) from a generator whose output sequence is
// pinned by the standard, so construction is reproducible everywhere.
std::uint64_t bounded_u64(std::mt19937_64& gen, std::uint64_t bound) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = gen();
    } while (x >= limit);
    return x % bound;
}

}  // namespace

TannerGraph construct_regular(std::size_t n_vars, std::uint32_t dv, std::uint32_t dc,
                              std::uint64_t seed) {
    if (dv < 2) throw std::invalid_argument("construct_regular: dv must be at least 2");
    if (dc == 0) throw std::invalid_argument("construct_regular: dc must be positive");
    if ((n_vars * dv) % dc != 0) {
        throw std::invalid_argument("construct_regular: " + std::to_string(n_vars) + "*" +
                                    std::to_string(dv) + " = " + std::to_string(n_vars * dv) +
                                    " is not divisible by dc = " + std::to_string(dc));
    }
    if (dc > n_vars) {
        throw std::invalid_argument("construct_regular: dc exceeds the number of variables");
    }
    const std::size_t n_edges = n_vars * dv;
    const std::size_t n_checks = n_edges / dc;

    std::mt19937_64 gen(seed);
    std::vector<std::uint32_t> sockets(n_edges);
    for (std::size_t e = 0; e < n_edges; ++e) {
        sockets[e] = static_cast<std::uint32_t>(e / dv);
    }

    constexpr int kMaxAttempts = 500;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        // Fisher-Yates with explicit bounded draws (std::shuffle is not
        // specified tightly enough to be reproducible across libraries).
        for (std::size_t k = n_edges - 1; k > 0; --k) {
            const std::size_t j = bounded_u64(gen, k + 1);
            std::swap(sockets[k], sockets[j]);
        }
        std::vector<std::vector<std::uint32_t>> check_lists(n_checks);
        bool duplicate = false;
        for (std::size_t m = 0; m < n_checks && !duplicate; ++m) {
            auto& list = check_lists[m];
            list.assign(sockets.begin() + static_cast<std::ptrdiff_t>(m * dc),
                        sockets.begin() + static_cast<std::ptrdiff_t>((m + 1) * dc));
            std::sort(list.begin(), list.end());
            for (std::size_t k = 1; k < list.size(); ++k) {
                if (list[k] == list[k - 1]) {
                    duplicate = true;
                    break;
                }
            }
        }
        if (!duplicate) return TannerGraph(n_vars, std::move(check_lists));
    }
    throw std::runtime_error("construct_regular: no duplicate-free permutation found after " +
                             std::to_string(kMaxAttempts) + " attempts");
}

BinaryWord syndrome(const BinaryWord& x, const TannerGraph& g) {
    if (x.size() != g.n_vars()) {
        throw std::invalid_argument("syndrome: word length " + std::to_string(x.size()) +
                                    " does not match n_vars " + std::to_string(g.n_vars()));
    }
    BinaryWord s(g.n_checks(), 0);
    for (std::size_t m = 0; m < g.n_checks(); ++m) {
        Bit acc = 0;
        for (const std::uint32_t i : g.check_neighbors(m)) acc ^= x[i];
        s[m] = acc;
    }
    return s;
}

BipolarWord bipolar_syndrome(const BipolarWord& x_hat, const TannerGraph& g) {
    if (x_hat.size() != g.n_vars()) {
        throw std::invalid_argument("bipolar_syndrome: word length does not match n_vars");
    }
    BipolarWord s(g.n_checks(), 1);
    for (std::size_t m = 0; m < g.n_checks(); ++m) {
        int acc = 1;
        for (const std::uint32_t i : g.check_neighbors(m)) acc *= x_hat[i];
        s[m] = static_cast<Sign>(acc);
    }
    return s;
}

std::vector<BinaryWord> null_space_basis(const TannerGraph& g) {
    const std::size_t n = g.n_vars(), m = g.n_checks();
    const std::size_t words = (n + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows(m, std::vector<std::uint64_t>(words, 0));
    for (std::size_t j = 0; j < m; ++j) {
        for (const std::uint32_t i : g.check_neighbors(j)) {
            rows[j][i / 64] ^= std::uint64_t{1} << (i % 64);
        }
    }

    // Row-reduce H; columns without a pivot are the free variables.
    std::vector<std::size_t> pivot_col;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < m; ++col) {
        std::size_t pivot = rank;
        while (pivot < m && !((rows[pivot][col / 64] >> (col % 64)) & 1)) ++pivot;
        if (pivot == m) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r != rank && ((rows[r][col / 64] >> (col % 64)) & 1)) {
                for (std::size_t w = 0; w < words; ++w) rows[r][w] ^= rows[rank][w];
            }
        }
        pivot_col.push_back(col);
        ++rank;
    }

    std::vector<bool> is_pivot(n, false);
    for (const std::size_t c : pivot_col) is_pivot[c] = true;

    std::vector<BinaryWord> basis;
    for (std::size_t free_col = 0; free_col < n; ++free_col) {
        if (is_pivot[free_col]) continue;
        BinaryWord v(n, 0);
        v[free_col] = 1;
        for (std::size_t r = 0; r < rank; ++r) {
            if ((rows[r][free_col / 64] >> (free_col % 64)) & 1) v[pivot_col[r]] = 1;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace crbf
