// SPDX-License-Identifier: MIT
//
// Problem configuration files: a flat, human-writable key/value format with
// section headers.  This is the only place expressions enter the system.
//
//   [dims]            p = 1            q = 2
//   [domain]          lo = -1 -1 -1    hi = 1 1 1          (default [-1,1]^n)
//   [connection]      Gamma[i][k][l] = <expr>   1-based, lower pair mirrored
//   [symbol]          k = 2            S[g1,...,gn] = <expr>
//   [function]        f = <expr>
//   [points]          point = v1 v2 ... vn                 (one key per point)
//
// '#' starts a comment.  [dims] must precede sections that need the chart
// shape, and k must precede S[...] keys.  Unlisted Christoffel entries and
// symbol components are zero.  Parse failures throw ParseError carrying the
// byte offset into the file.

#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "folq/chart.hpp"

namespace folq {

struct ProblemConfig {
    int p = 0, q = 0;
    Box domain;
    int degree = 0;
    /// 0-based (i, k, l) with k <= l, plus the component expression.
    std::vector<std::pair<std::array<int, 3>, Expression>> gamma_entries;
    /// Multi-index (length n, entries summing to degree) and its expression.
    std::vector<std::pair<MultiIndex, Expression>> symbol_entries;
    std::optional<Expression> function_expr;
    std::vector<std::vector<double>> points;

    FoliatedChart chart() const { return FoliatedChart{p, q, domain}; }

    AdaptedConnection connection() const {
        AdaptedConnection conn(chart());
        for (const auto& [ikl, e] : gamma_entries)
            conn.set_gamma(ikl[0], ikl[1], ikl[2], ScalarField(e));
        return conn;
    }

    SymbolField symbol() const {
        const auto c = chart();
        SymbolField s;
        s.chart = c;
        s.degree = degree;
        s.comp.assign(sym_dim(c.n(), degree), ScalarField());
        for (const auto& [g, e] : symbol_entries)
            s.comp[multi_index_rank(g)] = ScalarField(e);
        return s;
    }

    ScalarField function() const {
        return function_expr ? ScalarField(*function_expr) : ScalarField();
    }
    bool has_function() const { return function_expr.has_value(); }
};

namespace detail {

struct ConfigCursor {
    std::string_view text;
    std::size_t pos = 0;  // start of the current line
};

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

/// Trims and returns the [begin, end) window of the payload within `line`.
inline std::pair<std::size_t, std::size_t> trim_window(std::string_view line) {
    std::size_t b = 0, e = line.size();
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) e = hash;
    while (b < e && is_space(line[b])) ++b;
    while (e > b && is_space(line[e - 1])) --e;
    return {b, e};
}

inline int parse_int(std::string_view s, std::size_t off) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError(off, "expected an integer");
    return v;
}

inline double parse_number(std::string_view s, std::size_t off) {
    try {
        std::size_t used = 0;
        const double v = std::stod(std::string(s), &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError(off, "expected a number");
    }
}

inline std::vector<double> parse_number_list(std::string_view s, std::size_t off) {
    std::vector<double> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        if (i >= s.size()) break;
        std::size_t j = i;
        while (j < s.size() && !is_space(s[j])) ++j;
        out.push_back(parse_number(s.substr(i, j - i), off + i));
        i = j;
    }
    return out;
}

inline Expression parse_value_expression(std::string_view s, std::size_t off, int p,
                                         int q) {
    try {
        return parse(s, p, q);
    } catch (const ParseError& e) {
        throw ParseError(off + e.offset, std::string(e.what()));
    }
}

/// "Gamma[i][k][l]" -> 0-based indices; throws with the key's offset.
inline std::array<int, 3> parse_gamma_key(std::string_view key, std::size_t off, int n) {
    const std::string_view prefix = "Gamma";
    if (key.substr(0, prefix.size()) != prefix)
        throw ParseError(off, "connection keys must look like Gamma[i][k][l]");
    std::array<int, 3> out{};
    std::size_t i = prefix.size();
    for (int part = 0; part < 3; ++part) {
        if (i >= key.size() || key[i] != '[')
            throw ParseError(off + i, "expected '[' in Gamma[i][k][l]");
        const std::size_t close = key.find(']', ++i);
        if (close == std::string_view::npos)
            throw ParseError(off + i, "expected ']' in Gamma[i][k][l]");
        const int v = parse_int(key.substr(i, close - i), off + i);
        if (v < 1 || v > n)
            throw ParseError(off + i, "Christoffel index out of range 1..n");
        out[part] = v - 1;
        i = close + 1;
    }
    if (i != key.size()) throw ParseError(off + i, "trailing text after Gamma[i][k][l]");
    return out;
}

/// "S[g1,...,gn]" -> multi-index; throws with the key's offset.
inline MultiIndex parse_symbol_key(std::string_view key, std::size_t off, int n,
                                   int degree) {
    if (key.size() < 3 || key[0] != 'S' || key[1] != '[' || key.back() != ']')
        throw ParseError(off, "symbol keys must look like S[g1,...,gn]");
    MultiIndex g;
    std::size_t i = 2;
    const std::size_t end = key.size() - 1;
    while (true) {
        std::size_t j = key.find(',', i);
        if (j == std::string_view::npos || j > end) j = end;
        g.push_back(parse_int(key.substr(i, j - i), off + i));
        if (g.back() < 0) throw ParseError(off + i, "multi-index entries must be >= 0");
        if (j == end) break;
        i = j + 1;
    }
    if (static_cast<int>(g.size()) != n)
        throw ParseError(off, "multi-index must have one entry per chart dimension");
    int total = 0;
    for (int e : g) total += e;
    if (total != degree)
        throw ParseError(off, "multi-index entries must sum to the symbol degree k");
    return g;
}

}  // namespace detail

inline ProblemConfig parse_config(std::string_view text) {
    ProblemConfig cfg;
    bool have_dims = false, have_p = false, have_q = false, have_k = false;
    bool have_lo = false, have_hi = false, have_f = false;
    std::vector<double> lo, hi;
    std::set<std::array<int, 3>> seen_gamma;
    std::set<MultiIndex> seen_symbol;
    std::string section;

    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        std::size_t line_end = text.find('\n', line_start);
        if (line_end == std::string_view::npos) line_end = text.size();
        const std::string_view line = text.substr(line_start, line_end - line_start);
        const auto [b, e] = detail::trim_window(line);

        if (b == e) {  // blank / comment-only
            line_start = line_end + 1;
            continue;
        }
        const std::size_t off = line_start + b;  // offset of the payload
        const std::string_view payload = line.substr(b, e - b);

        if (payload.front() == '[') {
            if (payload.back() != ']')
                throw ParseError(off, "unterminated section header");
            const std::string_view name = payload.substr(1, payload.size() - 2);
            if (name != "dims" && name != "domain" && name != "connection" &&
                name != "symbol" && name != "function" && name != "points")
                throw ParseError(off + 1, "unknown section '" + std::string(name) + "'");
            if (name != "dims" && !(have_p && have_q))
                throw ParseError(off, "[dims] with p and q must be declared first");
            section = name;
            if (name == "dims") have_dims = true;
            line_start = line_end + 1;
            continue;
        }

        const std::size_t eq = payload.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(off, "expected 'key = value'");
        std::size_t kb = 0, ke = eq;
        while (ke > kb && detail::is_space(payload[ke - 1])) --ke;
        const std::string_view key = payload.substr(kb, ke - kb);
        std::size_t vb = eq + 1;
        while (vb < payload.size() && detail::is_space(payload[vb])) ++vb;
        const std::string_view value = payload.substr(vb);
        const std::size_t voff = off + vb;
        if (key.empty()) throw ParseError(off, "missing key before '='");
        if (value.empty()) throw ParseError(voff, "missing value after '='");

        if (section.empty())
            throw ParseError(off, "key outside of any section");
        if (section == "dims") {
            if (key == "p") {
                if (have_p) throw ParseError(off, "duplicate key 'p'");
                cfg.p = detail::parse_int(value, voff);
                if (cfg.p < 0) throw ParseError(voff, "p must be >= 0");
                have_p = true;
            } else if (key == "q") {
                if (have_q) throw ParseError(off, "duplicate key 'q'");
                cfg.q = detail::parse_int(value, voff);
                if (cfg.q < 1) throw ParseError(voff, "q must be >= 1");
                have_q = true;
            } else {
                throw ParseError(off, "unknown key in [dims]");
            }
        } else if (section == "domain") {
            auto vals = detail::parse_number_list(value, voff);
            if (static_cast<int>(vals.size()) != cfg.p + cfg.q)
                throw ParseError(voff, "expected one bound per chart dimension");
            if (key == "lo") {
                if (have_lo) throw ParseError(off, "duplicate key 'lo'");
                lo = std::move(vals);
                have_lo = true;
            } else if (key == "hi") {
                if (have_hi) throw ParseError(off, "duplicate key 'hi'");
                hi = std::move(vals);
                have_hi = true;
            } else {
                throw ParseError(off, "unknown key in [domain]");
            }
        } else if (section == "connection") {
            auto ikl = detail::parse_gamma_key(key, off, cfg.p + cfg.q);
            if (ikl[2] < ikl[1]) std::swap(ikl[1], ikl[2]);  // symmetric mirror
            if (!seen_gamma.insert(ikl).second)
                throw ParseError(off, "duplicate Christoffel entry (the lower index "
                                      "pair is symmetric; its mirror counts)");
            cfg.gamma_entries.emplace_back(
                ikl, detail::parse_value_expression(value, voff, cfg.p, cfg.q));
        } else if (section == "symbol") {
            if (key == "k") {
                if (have_k) throw ParseError(off, "duplicate key 'k'");
                cfg.degree = detail::parse_int(value, voff);
                if (cfg.degree < 0) throw ParseError(voff, "k must be >= 0");
                have_k = true;
            } else {
                if (!have_k)
                    throw ParseError(off, "k must be declared before S[...] entries");
                auto g = detail::parse_symbol_key(key, off, cfg.p + cfg.q, cfg.degree);
                if (!seen_symbol.insert(g).second)
                    throw ParseError(off, "duplicate symbol component");
                cfg.symbol_entries.emplace_back(
                    std::move(g), detail::parse_value_expression(value, voff, cfg.p, cfg.q));
            }
        } else if (section == "function") {
            if (key != "f") throw ParseError(off, "unknown key in [function]");
            if (have_f) throw ParseError(off, "duplicate key 'f'");
            cfg.function_expr = detail::parse_value_expression(value, voff, cfg.p, cfg.q);
            have_f = true;
        } else {  // points
            if (key != "point") throw ParseError(off, "unknown key in [points]");
            auto vals = detail::parse_number_list(value, voff);
            if (static_cast<int>(vals.size()) != cfg.p + cfg.q)
                throw ParseError(voff, "expected one coordinate per chart dimension");
            cfg.points.push_back(std::move(vals));
        }
        line_start = line_end + 1;
    }

    if (!have_dims || !have_p || !have_q)
        throw ParseError(0, "configuration must declare [dims] with p and q");
    const int n = cfg.p + cfg.q;
    if (have_lo != have_hi)
        throw ParseError(0, "[domain] must declare both lo and hi");
    if (have_lo) {
        cfg.domain = Box{std::move(lo), std::move(hi)};
        for (int i = 0; i < n; ++i)
            if (!(cfg.domain.lo[i] < cfg.domain.hi[i]))
                throw ParseError(0, "domain lower bounds must be below upper bounds");
    } else {
        cfg.domain = Box{std::vector<double>(n, -1.0), std::vector<double>(n, 1.0)};
    }
    return cfg;
}

inline ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EvalError("cannot open configuration file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace folq
