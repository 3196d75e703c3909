#include "eulerss/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <string>

#include "eulerss/core.hpp"

namespace eulerss {

CsrMatrix CsrMatrix::from_triplets(int n, std::vector<Triplet> entries) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
    CsrMatrix m;
    m.n_ = n;
    m.row_ptr_.assign(n + 1, 0);
    for (size_t k = 0; k < entries.size();) {
        const int r = entries[k].row, c = entries[k].col;
        double s = 0;
        while (k < entries.size() && entries[k].row == r && entries[k].col == c) s += entries[k++].value;
        m.col_.push_back(c);
        m.val_.push_back(s);
        m.row_ptr_[r + 1]++;
    }
    for (int i = 0; i < n; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
    return m;
}

void CsrMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        double s = 0;
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += val_[k] * x[col_[k]];
        y[i] = s;
    }
}

std::vector<double> CsrMatrix::operator*(const std::vector<double>& x) const {
    std::vector<double> y;
    multiply(x, y);
    return y;
}

double CsrMatrix::at(int i, int j) const {
    auto first = col_.begin() + row_ptr_[i], last = col_.begin() + row_ptr_[i + 1];
    auto it = std::lower_bound(first, last, j);
    return (it != last && *it == j) ? val_[it - col_.begin()] : 0.0;
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(n_);
    for (int i = 0; i < n_; ++i) d[i] = at(i, i);
    return d;
}

CsrMatrix CsrMatrix::submatrix(const std::vector<int>& old_to_new, int new_size) const {
    CsrMatrix m;
    m.n_ = new_size;
    m.row_ptr_.assign(new_size + 1, 0);
    for (int i = 0; i < n_; ++i) {
        int ni = old_to_new[i];
        if (ni < 0) continue;
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            int nj = old_to_new[col_[k]];
            if (nj < 0) continue;
            m.col_.push_back(nj);
            m.val_.push_back(val_[k]);
            m.row_ptr_[ni + 1]++;
        }
    }
    for (int i = 0; i < new_size; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
    return m;
}

double default_rtol() {
    if (const char* env = std::getenv("EULER_SS_RTOL")) {
        char* end = nullptr;
        double v = std::strtod(env, &end);
        if (end != env && v > 0 && std::isfinite(v)) return v;
        throw ConfigError(std::string("invalid EULER_SS_RTOL value '") + env + "'");
    }
    return 1e-10;
}

namespace {

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void remove_mean(std::vector<double>& v) {
    if (v.empty()) return;
    double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) x -= m;
}

}  // namespace

CgResult pcg(const CsrMatrix& A, const std::vector<double>& b_in, std::vector<double>& x, const CgOptions& opts) {
    const int n = A.size();
    const double rtol = opts.rtol > 0 ? opts.rtol : default_rtol();
    const int max_it = opts.max_iterations > 0
                           ? opts.max_iterations
                           : std::max(1, static_cast<int>(std::ceil(20.0 * std::sqrt(static_cast<double>(n)))));
    x.resize(n, 0.0);
    std::vector<double> b = b_in;
    if (opts.deflate_constant) {
        remove_mean(b);
        remove_mean(x);
    }
    CgResult res;
    const double bnorm = std::sqrt(dotv(b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        res.converged = true;
        return res;
    }
    std::vector<double> diag = A.diagonal();
    for (double& d : diag) d = d > 0 ? 1.0 / d : 1.0;

    std::vector<double> r(n), z(n), p(n), q(n);
    A.multiply(x, q);
    for (int i = 0; i < n; ++i) r[i] = b[i] - q[i];
    if (opts.deflate_constant) remove_mean(r);
    double rnorm = std::sqrt(dotv(r, r));
    if (rnorm <= rtol * bnorm) {
        res.converged = true;
        res.relative_residual = rnorm / bnorm;
        return res;
    }
    for (int i = 0; i < n; ++i) z[i] = diag[i] * r[i];
    if (opts.deflate_constant) remove_mean(z);
    p = z;
    double rz = dotv(r, z);
    for (int it = 1; it <= max_it; ++it) {
        A.multiply(p, q);
        double pq = dotv(p, q);
        if (!(pq > 0)) break;
        double alpha = rz / pq;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        if (opts.deflate_constant) remove_mean(r);
        rnorm = std::sqrt(dotv(r, r));
        res.iterations = it;
        res.relative_residual = rnorm / bnorm;
        if (rnorm <= rtol * bnorm) {
            res.converged = true;
            break;
        }
        for (int i = 0; i < n; ++i) z[i] = diag[i] * r[i];
        if (opts.deflate_constant) remove_mean(z);
        double rz_new = dotv(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (!res.converged) {
        // Recompute the true residual before giving up; the recursive one can drift.
        A.multiply(x, q);
        for (int i = 0; i < n; ++i) r[i] = b[i] - q[i];
        if (opts.deflate_constant) remove_mean(r);
        res.relative_residual = std::sqrt(dotv(r, r)) / bnorm;
        if (res.relative_residual <= rtol) {
            res.converged = true;
        } else {
            std::ostringstream msg;
            msg << "conjugate gradient did not converge after " << res.iterations << " iterations (n = " << n
                << "), final relative residual " << res.relative_residual << " > " << rtol;
            throw SolverError(msg.str());
        }
    }
    if (opts.deflate_constant) remove_mean(x);
    return res;
}

}  // namespace eulerss
