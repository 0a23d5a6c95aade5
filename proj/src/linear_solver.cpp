#include "bshape/linear_solver.hpp"

#include "bshape/errors.hpp"

#include <Eigen/UmfPackSupport>

#include <limits>
#include <sstream>

namespace bshape {

void eliminate_dofs(SparseOperator& a, const std::vector<char>& mask)
{
    if (a.rows() != a.cols() || static_cast<std::size_t>(a.rows()) != mask.size()) {
        throw DomainError("eliminate_dofs: mask does not match a square operator");
    }
    a.prune([&mask](Eigen::Index r, Eigen::Index c, double) {
        return mask[static_cast<std::size_t>(r)] == 0 && mask[static_cast<std::size_t>(c)] == 0;
    });
    std::vector<Eigen::Triplet<double>> diag;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] != 0) {
            diag.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
        }
    }
    SparseOperator d(a.rows(), a.cols());
    d.setFromTriplets(diag.begin(), diag.end());
    a += d;
    a.makeCompressed();
}

void zero_dofs(Eigen::VectorXd& b, const std::vector<char>& mask)
{
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] != 0) {
            b[static_cast<Eigen::Index>(i)] = 0.0;
        }
    }
}

SparseOperator assemble_blocks(int rows, int cols, const std::vector<Block>& blocks)
{
    std::vector<Eigen::Triplet<double>> trips;
    std::size_t nnz = 0;
    for (const auto& b : blocks) {
        nnz += static_cast<std::size_t>(b.op->nonZeros());
    }
    trips.reserve(nnz);
    for (const auto& b : blocks) {
        const SparseOperator& m = *b.op;
        const Eigen::Index br = b.transpose ? m.cols() : m.rows();
        const Eigen::Index bc = b.transpose ? m.rows() : m.cols();
        if (b.row + br > rows || b.col + bc > cols) {
            throw DomainError("assemble_blocks: block exceeds the target operator");
        }
        for (int k = 0; k < m.outerSize(); ++k) {
            for (SparseOperator::InnerIterator it(m, k); it; ++it) {
                const int r = static_cast<int>(b.transpose ? it.col() : it.row());
                const int c = static_cast<int>(b.transpose ? it.row() : it.col());
                trips.emplace_back(b.row + r, b.col + c, b.scale * it.value());
            }
        }
    }
    SparseOperator out(rows, cols);
    out.setFromTriplets(trips.begin(), trips.end());
    out.makeCompressed();
    return out;
}

SparseOperator border(int size, int row, int col, const Eigen::VectorXd& v, bool symmetric)
{
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] == 0.0) {
            continue;
        }
        trips.emplace_back(row + static_cast<int>(i), col, v[i]);
        if (symmetric) {
            trips.emplace_back(col, row + static_cast<int>(i), v[i]);
        }
    }
    SparseOperator out(size, size);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

struct SparseLU::Impl {
    SparseOperator matrix; // UMFPACK solves read the factored matrix again
    Eigen::UmfPackLU<SparseOperator> lu;
    int n = 0;
    bool ok = false;
};

SparseLU::SparseLU() : impl_(std::make_unique<Impl>()) {}

SparseLU::SparseLU(const SparseOperator& a) : SparseLU()
{
    factor(a);
}

SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

void SparseLU::factor(const SparseOperator& a)
{
    if (a.rows() != a.cols()) {
        throw DomainError("SparseLU: operator must be square");
    }
    impl_ = std::make_unique<Impl>();
    impl_->matrix = a;
    impl_->matrix.makeCompressed();
    // every system here is structurally symmetric; AMD on A + A^T avoids the
    // fill the default column ordering produces around the gauge row
    impl_->lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
    impl_->lu.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_AMD;
    impl_->lu.compute(impl_->matrix);
    if (impl_->lu.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "SparseLU: factorization of a " << a.rows() << "x" << a.cols()
            << " operator failed (nnz " << a.nonZeros() << ", UMFPACK status "
            << impl_->lu.umfpackFactorizeReturncode() << "; 1 means singular)";
        throw SolverError(msg.str());
    }
    impl_->n = static_cast<int>(a.rows());
    impl_->ok = true;
}

Eigen::VectorXd SparseLU::solve(const Eigen::VectorXd& b) const
{
    if (!impl_->ok) {
        throw SolverError("SparseLU: solve called before a successful factorization");
    }
    if (b.size() != impl_->n) {
        throw DomainError("SparseLU: right-hand side has the wrong length");
    }
    Eigen::VectorXd x = impl_->lu.solve(b);
    if (impl_->lu.info() != Eigen::Success || !x.allFinite()) {
        throw SolverError("SparseLU: back substitution failed");
    }
    return x;
}

bool SparseLU::factored() const noexcept
{
    return impl_ && impl_->ok;
}

int SparseLU::size() const noexcept
{
    return impl_ ? impl_->n : 0;
}

double relative_residual(const SparseOperator& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b)
{
    const double nb = b.norm();
    return (a * x - b).norm() / std::max(nb, std::numeric_limits<double>::min());
}

} // namespace bshape
