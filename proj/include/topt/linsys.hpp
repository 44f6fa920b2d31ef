#pragma once

#include <string>
#include <vector>

namespace topt {

/// Row-compressed sparse matrix, full (both triangles) storage.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Build from (row, col, value) triplets; duplicates are summed,
    /// column indices sorted within each row.
    static SparseMatrix from_triplets(int n, const std::vector<int>& rows,
                                      const std::vector<int>& cols,
                                      const std::vector<double>& vals);

    int size() const { return n_; }
    const std::vector<int>& row_offsets() const { return row_offsets_; }
    const std::vector<int>& col_indices() const { return col_indices_; }
    const std::vector<double>& values() const { return values_; }

    double coeff(int i, int j) const;
    std::vector<double> diagonal() const;
    int half_bandwidth() const;

    /// A + c*B, matching or mergeable patterns.
    static SparseMatrix axpy(const SparseMatrix& a, double c, const SparseMatrix& b);

private:
    int n_ = 0;
    std::vector<int> row_offsets_{0};
    std::vector<int> col_indices_;
    std::vector<double> values_;
};

std::vector<double> matvec(const SparseMatrix& a, const std::vector<double>& x);

struct SolveReport {
    int iterations = 0;
    double relative_residual = 0;
    std::string method = "cg";
    bool converged = true;
};

struct SolveResult {
    std::vector<double> x;
    SolveReport report;
};

/// Jacobi-preconditioned CG. Falls back to a dense Cholesky factorization
/// when n <= 2000 and CG stagnates. Non-convergence is reported (not thrown)
/// with the best iterate attached.
SolveResult solve_spd(const SparseMatrix& a, const std::vector<double>& b,
                      double tol = 1e-10, int max_iter = -1);

/// Banded Cholesky factorization of an SPD matrix, reusable across solves.
/// Intended for the structured-mesh systems where the bandwidth is small.
class BandCholesky {
public:
    explicit BandCholesky(const SparseMatrix& a);
    std::vector<double> solve(const std::vector<double>& b) const;
    int bandwidth() const { return bw_; }

private:
    int n_ = 0;
    int bw_ = 0;
    std::vector<double> band_;  // column-major band, band_[j*(bw+1)+ (i-j)] = L(i,j)
};

/// Direct banded solve wrapped in the SolveResult contract.
SolveResult solve_spd_banded(const SparseMatrix& a, const std::vector<double>& b);

}  // namespace topt
