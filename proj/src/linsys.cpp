#include "topt/linsys.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace topt {

SparseMatrix SparseMatrix::from_triplets(int n, const std::vector<int>& rows,
                                         const std::vector<int>& cols,
                                         const std::vector<double>& vals) {
    if (rows.size() != cols.size() || rows.size() != vals.size())
        throw std::invalid_argument("from_triplets: length mismatch");
    SparseMatrix m;
    m.n_ = n;
    std::vector<int> count(n, 0);
    for (int r : rows) {
        if (r < 0 || r >= n) throw std::invalid_argument("from_triplets: row out of range");
        ++count[r];
    }
    m.row_offsets_.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) m.row_offsets_[i + 1] = m.row_offsets_[i] + count[i];
    std::vector<int> pos(m.row_offsets_.begin(), m.row_offsets_.end() - 1);
    std::vector<int> ci(vals.size());
    std::vector<double> cv(vals.size());
    for (std::size_t k = 0; k < vals.size(); ++k) {
        if (cols[k] < 0 || cols[k] >= n) throw std::invalid_argument("from_triplets: col out of range");
        int p = pos[rows[k]]++;
        ci[p] = cols[k];
        cv[p] = vals[k];
    }
    // sort + merge duplicates per row
    m.col_indices_.reserve(ci.size());
    m.values_.reserve(cv.size());
    std::vector<int> offsets{0};
    offsets.reserve(n + 1);
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < n; ++i) {
        row.clear();
        for (int p = m.row_offsets_[i]; p < m.row_offsets_[i + 1]; ++p)
            row.emplace_back(ci[p], cv[p]);
        std::sort(row.begin(), row.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (!m.col_indices_.empty() && static_cast<int>(m.col_indices_.size()) > offsets.back() &&
                m.col_indices_.back() == row[k].first) {
                m.values_.back() += row[k].second;
            } else {
                m.col_indices_.push_back(row[k].first);
                m.values_.push_back(row[k].second);
            }
        }
        offsets.push_back(static_cast<int>(m.col_indices_.size()));
    }
    m.row_offsets_ = std::move(offsets);
    return m;
}

double SparseMatrix::coeff(int i, int j) const {
    for (int p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
        if (col_indices_[p] == j) return values_[p];
    return 0.0;
}

std::vector<double> SparseMatrix::diagonal() const {
    std::vector<double> d(n_, 0.0);
    for (int i = 0; i < n_; ++i) d[i] = coeff(i, i);
    return d;
}

int SparseMatrix::half_bandwidth() const {
    int bw = 0;
    for (int i = 0; i < n_; ++i)
        for (int p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
            bw = std::max(bw, std::abs(col_indices_[p] - i));
    return bw;
}

SparseMatrix SparseMatrix::axpy(const SparseMatrix& a, double c, const SparseMatrix& b) {
    if (a.size() != b.size()) throw std::invalid_argument("axpy: size mismatch");
    std::vector<int> rows, cols;
    std::vector<double> vals;
    auto push = [&](const SparseMatrix& m, double scale) {
        for (int i = 0; i < m.size(); ++i)
            for (int p = m.row_offsets_[i]; p < m.row_offsets_[i + 1]; ++p) {
                rows.push_back(i);
                cols.push_back(m.col_indices_[p]);
                vals.push_back(scale * m.values_[p]);
            }
    };
    push(a, 1.0);
    push(b, c);
    return from_triplets(a.size(), rows, cols, vals);
}

std::vector<double> matvec(const SparseMatrix& a, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != a.size()) throw std::invalid_argument("matvec: dimension mismatch");
    const auto& ro = a.row_offsets();
    const auto& ci = a.col_indices();
    const auto& v = a.values();
    std::vector<double> y(a.size(), 0.0);
    for (int i = 0; i < a.size(); ++i) {
        double s = 0;
        for (int p = ro[i]; p < ro[i + 1]; ++p) s += v[p] * x[ci[p]];
        y[i] = s;
    }
    return y;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Dense Cholesky fallback for small stagnating systems.
bool dense_cholesky_solve(const SparseMatrix& a, const std::vector<double>& b,
                          std::vector<double>& x) {
    const int n = a.size();
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    const auto& ro = a.row_offsets();
    const auto& ci = a.col_indices();
    const auto& v = a.values();
    for (int i = 0; i < n; ++i)
        for (int p = ro[i]; p < ro[i + 1]; ++p) m[static_cast<std::size_t>(i) * n + ci[p]] = v[p];
    for (int j = 0; j < n; ++j) {
        double d = m[static_cast<std::size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) {
            double l = m[static_cast<std::size_t>(j) * n + k];
            d -= l * l;
        }
        if (!(d > 0)) return false;
        d = std::sqrt(d);
        m[static_cast<std::size_t>(j) * n + j] = d;
        for (int i = j + 1; i < n; ++i) {
            double s = m[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= m[static_cast<std::size_t>(i) * n + k] * m[static_cast<std::size_t>(j) * n + k];
            m[static_cast<std::size_t>(i) * n + j] = s / d;
        }
    }
    x = b;
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= m[static_cast<std::size_t>(i) * n + k] * x[k];
        x[i] = s / m[static_cast<std::size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= m[static_cast<std::size_t>(k) * n + i] * x[k];
        x[i] = s / m[static_cast<std::size_t>(i) * n + i];
    }
    return true;
}

}  // namespace

SolveResult solve_spd(const SparseMatrix& a, const std::vector<double>& b,
                      double tol, int max_iter) {
    const int n = a.size();
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("solve_spd: dimension mismatch");
    if (max_iter < 0) max_iter = 20 * n;

    SolveResult res;
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.x.assign(n, 0.0);
        res.report = {0, 0.0, "cg", true};
        return res;
    }

    std::vector<double> dinv = a.diagonal();
    for (auto& d : dinv) d = (d != 0.0) ? 1.0 / d : 1.0;

    std::vector<double> x(n, 0.0);
    std::vector<double> r = b;
    std::vector<double> z(n), p(n);
    for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    p = z;
    double rz = dot(r, z);
    double best_res = norm2(r) / bnorm;
    std::vector<double> best_x = x;
    int it = 0;
    int stagnation = 0;
    for (; it < max_iter; ++it) {
        if (norm2(r) / bnorm <= tol) break;
        std::vector<double> ap = matvec(a, p);
        double pap = dot(p, ap);
        if (!(pap > 0)) break;  // numerically indefinite, stop
        double alpha = rz / pap;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
        double rz_new = dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        double cur = norm2(r) / bnorm;
        if (cur < best_res * (1 - 1e-12)) {
            best_res = cur;
            best_x = x;
            stagnation = 0;
        } else if (++stagnation > 50 && n <= 2000) {
            break;  // fallback to dense below
        }
    }

    double final_res = norm2(r) / bnorm;
    if (final_res <= tol) {
        res.x = std::move(x);
        res.report = {it, final_res, "cg", true};
        return res;
    }

    if (n <= 2000) {
        std::vector<double> xd;
        if (dense_cholesky_solve(a, b, xd)) {
            std::vector<double> rr = matvec(a, xd);
            for (int i = 0; i < n; ++i) rr[i] = b[i] - rr[i];
            double dres = norm2(rr) / bnorm;
            if (dres < best_res) {
                res.x = std::move(xd);
                res.report = {it, dres, "direct", dres <= std::max(tol, 1e3 * 2.2e-16)};
                return res;
            }
        }
    }

    res.x = std::move(best_x);
    res.report = {it, best_res, "cg", false};
    return res;
}

BandCholesky::BandCholesky(const SparseMatrix& a) {
    n_ = a.size();
    bw_ = a.half_bandwidth();
    const int w = bw_ + 1;
    band_.assign(static_cast<std::size_t>(n_) * w, 0.0);
    const auto& ro = a.row_offsets();
    const auto& ci = a.col_indices();
    const auto& v = a.values();
    for (int i = 0; i < n_; ++i)
        for (int p = ro[i]; p < ro[i + 1]; ++p) {
            int j = ci[p];
            if (j <= i) band_[static_cast<std::size_t>(j) * w + (i - j)] = v[p];
        }
    // in-place banded Cholesky, column j updates columns j+1..j+bw
    for (int j = 0; j < n_; ++j) {
        double* colj = &band_[static_cast<std::size_t>(j) * w];
        double d = colj[0];
        if (!(d > 0)) throw std::runtime_error("BandCholesky: matrix not positive definite");
        d = std::sqrt(d);
        colj[0] = d;
        int last = std::min(n_ - 1, j + bw_);
        for (int i = j + 1; i <= last; ++i) colj[i - j] /= d;
        for (int k = j + 1; k <= last; ++k) {
            double ljk = colj[k - j];
            if (ljk == 0.0) continue;
            double* colk = &band_[static_cast<std::size_t>(k) * w];
            for (int i = k; i <= last; ++i) colk[i - k] -= ljk * colj[i - j];
        }
    }
}

std::vector<double> BandCholesky::solve(const std::vector<double>& b) const {
    if (static_cast<int>(b.size()) != n_) throw std::invalid_argument("BandCholesky: dimension mismatch");
    const int w = bw_ + 1;
    std::vector<double> x = b;
    for (int j = 0; j < n_; ++j) {
        const double* colj = &band_[static_cast<std::size_t>(j) * w];
        x[j] /= colj[0];
        int last = std::min(n_ - 1, j + bw_);
        double xj = x[j];
        for (int i = j + 1; i <= last; ++i) x[i] -= colj[i - j] * xj;
    }
    for (int j = n_ - 1; j >= 0; --j) {
        const double* colj = &band_[static_cast<std::size_t>(j) * w];
        int last = std::min(n_ - 1, j + bw_);
        double s = x[j];
        for (int i = j + 1; i <= last; ++i) s -= colj[i - j] * x[i];
        x[j] = s / colj[0];
    }
    return x;
}

SolveResult solve_spd_banded(const SparseMatrix& a, const std::vector<double>& b) {
    BandCholesky chol(a);
    SolveResult res;
    res.x = chol.solve(b);
    std::vector<double> r = matvec(a, res.x);
    double bn = norm2(b);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    res.report = {1, bn > 0 ? norm2(r) / bn : 0.0, "direct", true};
    return res;
}

}  // namespace topt
