// SPDX-License-Identifier: MIT
//
// Exponent multi-indices for symmetric tensor components.
//
// A symmetric degree-k tensor on an n-dimensional space is stored through the
// coefficients of its generating polynomial, one coefficient per exponent
// vector gamma with |gamma| = k.  Enumeration is graded-lexicographic: within
// a fixed degree the exponent vectors appear in descending lexicographic
// order, e.g. (2,0,0), (1,1,0), (1,0,1), (0,2,0), (0,1,1), (0,0,2).

#pragma once

#include <cassert>
#include <cstdint>
#include <map>
#include <vector>

namespace folq {

using MultiIndex = std::vector<int>;

inline int mi_degree(const MultiIndex& g) {
    int s = 0;
    for (int e : g) s += e;
    return s;
}

/// Number of exponent vectors of the given degree: C(dim+degree-1, degree).
inline int sym_dim(int dim, int degree) {
    assert(dim >= 1 && degree >= 0);
    long long r = 1;
    for (int i = 1; i <= degree; ++i) r = r * (dim - 1 + i) / i;
    return static_cast<int>(r);
}

namespace detail {

inline void enumerate(int dim, int degree, MultiIndex& prefix,
                      std::vector<MultiIndex>& out) {
    if (static_cast<int>(prefix.size()) == dim - 1) {
        prefix.push_back(degree);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int e = degree; e >= 0; --e) {
        prefix.push_back(e);
        enumerate(dim, degree - e, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace detail

/// All exponent vectors of the given dimension and degree, graded-lex order.
inline std::vector<MultiIndex> multi_indices(int dim, int degree) {
    std::vector<MultiIndex> out;
    out.reserve(sym_dim(dim, degree));
    MultiIndex prefix;
    detail::enumerate(dim, degree, prefix, out);
    return out;
}

/// Position of an exponent vector within multi_indices(dim, degree).
inline int multi_index_rank(const MultiIndex& g) {
    // Count the exponent vectors that precede g: at each slot, the choices
    // e > g[i] (descending order) each contribute a full tail block.
    const int dim = static_cast<int>(g.size());
    int deg = mi_degree(g);
    int rank = 0;
    for (int i = 0; i + 1 < dim; ++i) {
        for (int e = deg; e > g[i]; --e) rank += sym_dim(dim - i - 1, deg - e);
        deg -= g[i];
    }
    return rank;
}

/// k! / (gamma_1! ... gamma_n!) with k = |gamma|.
inline long long multinomial(const MultiIndex& g) {
    long long r = 1;
    int seen = 0;
    for (int e : g)
        for (int i = 1; i <= e; ++i) r = r * (++seen) / i;
    return r;
}

}  // namespace folq
