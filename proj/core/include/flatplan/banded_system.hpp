#pragma once

#include <Eigen/Core>
#include <vector>

namespace flatplan {

// Square banded matrix with LU factorization under partial pivoting.
// Row interchanges are applied step by step (LAPACK gbtrf layout), so the
// factored upper band grows to ku + kl.
class BandedSystem {
 public:
  BandedSystem() = default;
  BandedSystem(int n, int kl, int ku);

  void reset(int n, int kl, int ku);

  int size() const { return n_; }
  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }

  // Throws SingularSystem on a zero pivot.
  void factorize();
  bool factorized() const { return factorized_; }

  // In place: b <- A^{-1} b and b <- A^{-T} b. b has size() rows.
  void solve(Eigen::MatrixXd& b) const;
  void solveTransposed(Eigen::MatrixXd& b) const;

 private:
  int index(int i, int j) const { return i * width_ + (j - i + kl_); }

  int n_ = 0;
  int kl_ = 0;
  int ku_ = 0;
  int width_ = 0;
  bool factorized_ = false;
  std::vector<double> data_;
  std::vector<int> piv_;
};

}  // namespace flatplan
