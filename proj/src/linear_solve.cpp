#include "spikelab/linear_solve.hpp"

#include "spikelab/errors.hpp"

#include <umfpack.h>

#include <string>
#include <vector>

namespace spikelab {

namespace {

// Original column of the first exactly-zero diagonal entry of U.
std::ptrdiff_t zero_pivot_column(void* numeric, Eigen::Index n) {
  std::vector<int> q(static_cast<std::size_t>(n));
  std::vector<double> udiag(static_cast<std::size_t>(n));
  const int status = umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, q.data(),
                                            udiag.data(), nullptr, nullptr, numeric);
  if (status != UMFPACK_OK) return -1;
  for (std::size_t k = 0; k < udiag.size(); ++k)
    if (udiag[k] == 0.0) return q[k];
  return -1;
}

}  // namespace

Factorization::Factorization(const SparseMatrix& a) : a_(a) {
  if (a.rows() != a.cols()) throw GridError("factorization needs a square matrix");
  a_.makeCompressed();
  const int n = static_cast<int>(a_.rows());
  void* symbolic = nullptr;
  int status = umfpack_di_symbolic(n, n, a_.outerIndexPtr(), a_.innerIndexPtr(), a_.valuePtr(), &symbolic, nullptr,
                                   nullptr);
  if (status != UMFPACK_OK) throw SingularMatrixError("sparse LU analysis failed (status " + std::to_string(status) + ")", -1);
  status = umfpack_di_numeric(a_.outerIndexPtr(), a_.innerIndexPtr(), a_.valuePtr(), symbolic, &numeric_, nullptr,
                              nullptr);
  umfpack_di_free_symbolic(&symbolic);
  if (status == UMFPACK_WARNING_singular_matrix) {
    const std::ptrdiff_t pivot = zero_pivot_column(numeric_, a_.rows());
    umfpack_di_free_numeric(&numeric_);
    throw SingularMatrixError("singular sparse factorization: zero pivot in column " + std::to_string(pivot), pivot);
  }
  if (status != UMFPACK_OK) {
    if (numeric_) umfpack_di_free_numeric(&numeric_);
    throw SingularMatrixError("sparse LU factorization failed (status " + std::to_string(status) + ")", -1);
  }
}

Factorization::~Factorization() {
  if (numeric_) umfpack_di_free_numeric(&numeric_);
}

Eigen::VectorXd Factorization::run(int system, const Eigen::VectorXd& b) const {
  if (b.size() != a_.rows()) throw GridError("right-hand side size does not match the operator");
  Eigen::VectorXd x(b.size());
  const int status = umfpack_di_solve(system, a_.outerIndexPtr(), a_.innerIndexPtr(), a_.valuePtr(), x.data(), b.data(),
                                      numeric_, nullptr, nullptr);
  if (status != UMFPACK_OK || !x.allFinite())
    throw SingularMatrixError("sparse LU solve failed (status " + std::to_string(status) + ")", -1);
  return x;
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& b) const { return run(UMFPACK_A, b); }

Eigen::VectorXd Factorization::solve_transpose(const Eigen::VectorXd& b) const { return run(UMFPACK_At, b); }

LinearSolution solve_linear(const LinearSystem& system) {
  if (system.op.rows() != system.rhs.size()) throw GridError("operator and rhs sizes differ");
  const double bnorm = system.rhs.norm();
  if (bnorm == 0.0) return {Eigen::VectorXd::Zero(system.rhs.size()), 0.0};
  const Factorization lu(system.op);
  LinearSolution out{lu.solve(system.rhs), 0.0};
  Eigen::VectorXd r = system.rhs - system.op * out.x;
  out.relative_residual = r.norm() / bnorm;
  if (out.relative_residual > 1e-13) {
    out.x += lu.solve(r);
    r = system.rhs - system.op * out.x;
    out.relative_residual = r.norm() / bnorm;
  }
  return out;
}

}  // namespace spikelab
