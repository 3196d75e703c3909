#pragma once

#include <vector>

namespace eulerss {

struct Triplet {
    int row, col;
    double value;
};

// Compressed sparse row matrix with sorted column indices.
class CsrMatrix {
public:
    CsrMatrix() = default;
    static CsrMatrix from_triplets(int n, std::vector<Triplet> entries);

    int size() const { return n_; }
    int nnz() const { return static_cast<int>(val_.size()); }
    void multiply(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> operator*(const std::vector<double>& x) const;
    double at(int i, int j) const;
    std::vector<double> diagonal() const;

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& cols() const { return col_; }
    const std::vector<double>& values() const { return val_; }

    // Principal submatrix on the rows/columns where keep[i] is true, renumbered densely.
    CsrMatrix submatrix(const std::vector<int>& old_to_new, int new_size) const;

private:
    int n_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_;
    std::vector<double> val_;
};

struct CgOptions {
    double rtol = -1;              // <= 0 means default_rtol()
    int max_iterations = 0;        // <= 0 means 20 * sqrt(n)
    bool deflate_constant = false; // singular Neumann systems: iterate orthogonally to the constant vector
};

struct CgResult {
    int iterations = 0;
    double relative_residual = 0;
    bool converged = false;
};

// Solver tolerance: 1e-10 unless EULER_SS_RTOL is set.
double default_rtol();

// Jacobi-preconditioned conjugate gradients; x holds the initial guess on entry.
// Throws SolverError when the iteration budget is exhausted.
CgResult pcg(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x, const CgOptions& opts = {});

}  // namespace eulerss
