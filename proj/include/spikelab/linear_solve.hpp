#pragma once

#include "spikelab/operators.hpp"

#include <memory>

namespace spikelab {

struct LinearSystem {
  SparseMatrix op;
  Eigen::VectorXd rhs;
};

struct LinearSolution {
  Eigen::VectorXd x;
  double relative_residual = 0.0;  ///< ||Ax - b||_2 / ||b||_2 (0 when b = 0)
};

/// Sparse LU (UMFPACK) of a square matrix, reusable for several right-hand
/// sides and for transposed solves. Throws SingularMatrixError with the
/// original column of the first zero pivot.
class Factorization {
 public:
  explicit Factorization(const SparseMatrix& a);
  ~Factorization();
  Factorization(const Factorization&) = delete;
  Factorization& operator=(const Factorization&) = delete;

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::VectorXd solve_transpose(const Eigen::VectorXd& b) const;
  Eigen::Index size() const { return a_.rows(); }

 private:
  Eigen::VectorXd run(int system, const Eigen::VectorXd& b) const;

  SparseMatrix a_;
  void* numeric_ = nullptr;
};

/// Direct solve with one step of iterative refinement when the first
/// residual exceeds 1e-13.
LinearSolution solve_linear(const LinearSystem& system);

}  // namespace spikelab
