#pragma once

#include "bshape/assembly.hpp"

#include <Eigen/Core>

#include <memory>
#include <vector>

namespace bshape {

/// Symmetric elimination of homogeneous Dirichlet dofs: masked rows and
/// columns are zeroed and the diagonal entry set to 1. The matrix must be
/// square; `mask` has one entry per row.
void eliminate_dofs(SparseOperator& a, const std::vector<char>& mask);

/// Zeroes the masked entries of a right-hand side.
void zero_dofs(Eigen::VectorXd& b, const std::vector<char>& mask);

/// A sparse sub-block placed at (row, col) of a larger operator.
struct Block {
    int row = 0;
    int col = 0;
    const SparseOperator* op = nullptr;
    double scale = 1.0;
    bool transpose = false;
};

SparseOperator assemble_blocks(int rows, int cols, const std::vector<Block>& blocks);

/// Places a dense column vector at (row, col) and, optionally, its transpose
/// at (col, row) of an otherwise empty operator of the given size.
SparseOperator border(int size, int row, int col, const Eigen::VectorXd& v, bool symmetric);

/// Sparse LU factorization of a square, structurally symmetric operator
/// (UMFPACK backend, symmetric pivoting strategy).
class SparseLU {
public:
    SparseLU();
    explicit SparseLU(const SparseOperator& a);
    ~SparseLU();
    SparseLU(SparseLU&&) noexcept;
    SparseLU& operator=(SparseLU&&) noexcept;
    SparseLU(const SparseLU&) = delete;
    SparseLU& operator=(const SparseLU&) = delete;

    /// Throws SolverError when the matrix is structurally or numerically
    /// singular.
    void factor(const SparseOperator& a);
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

    bool factored() const noexcept;
    int size() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Relative residual ||A x - b|| / max(||b||, tiny).
double relative_residual(const SparseOperator& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

} // namespace bshape
