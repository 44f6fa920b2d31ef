// Test-only dense linear algebra oracle, independent of the CG/banded paths.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "topt/linsys.hpp"

namespace testref {

using Matrix = std::vector<std::vector<double>>;

inline Matrix to_dense(const topt::SparseMatrix& a) {
    Matrix m(a.size(), std::vector<double>(a.size(), 0.0));
    const auto& ro = a.row_offsets();
    const auto& ci = a.col_indices();
    const auto& v = a.values();
    for (int i = 0; i < a.size(); ++i)
        for (int p = ro[i]; p < ro[i + 1]; ++p) m[i][ci[p]] = v[p];
    return m;
}

// Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(Matrix m, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(m[i][k]) > std::abs(m[piv][k])) piv = i;
        std::swap(m[k], m[piv]);
        std::swap(b[k], b[piv]);
        if (m[k][k] == 0.0) throw std::runtime_error("dense_solve: singular matrix");
        for (int i = k + 1; i < n; ++i) {
            double f = m[i][k] / m[k][k];
            if (f == 0.0) continue;
            for (int j = k; j < n; ++j) m[i][j] -= f * m[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= m[i][j] * x[j];
        x[i] = s / m[i][i];
    }
    return x;
}

inline std::vector<double> dense_solve(const topt::SparseMatrix& a, const std::vector<double>& b) {
    return dense_solve(to_dense(a), b);
}

// Small deterministic RNG (xorshift64*), independent of <random> quirks.
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed = 42) : s(seed ? seed : 1) {}
    double uniform() {
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        return double((s * 2685821657736338717ull) >> 11) / 9007199254740992.0;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

}  // namespace testref
