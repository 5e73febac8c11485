#include "flatplan/banded_system.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flatplan/errors.hpp"

namespace flatplan {

BandedSystem::BandedSystem(int n, int kl, int ku) { reset(n, kl, ku); }

void BandedSystem::reset(int n, int kl, int ku) {
  n_ = n;
  kl_ = kl;
  ku_ = ku;
  width_ = 2 * kl + ku + 1;
  factorized_ = false;
  data_.assign(static_cast<std::size_t>(n) * width_, 0.0);
  piv_.assign(n, 0);
}

void BandedSystem::factorize() {
  const int uw = ku_ + kl_;
  double scale = 0.0;
  for (double v : data_) scale = std::max(scale, std::abs(v));
  const double tiny = std::max(scale, 1.0) * 1e-300;
  for (int k = 0; k < n_; ++k) {
    const int last_row = std::min(n_ - 1, k + kl_);
    const int last_col = std::min(n_ - 1, k + uw);
    int p = k;
    double best = std::abs((*this)(k, k));
    for (int i = k + 1; i <= last_row; ++i) {
      const double a = std::abs((*this)(i, k));
      if (a > best) {
        best = a;
        p = i;
      }
    }
    if (!(best > tiny)) {
      throw SingularSystem("zero pivot in banded factorization at row " + std::to_string(k));
    }
    piv_[k] = p;
    if (p != k) {
      for (int j = k; j <= last_col; ++j) std::swap((*this)(k, j), (*this)(p, j));
    }
    const double inv = 1.0 / (*this)(k, k);
    for (int i = k + 1; i <= last_row; ++i) {
      double& lik = (*this)(i, k);
      if (lik == 0.0) continue;
      lik *= inv;
      for (int j = k + 1; j <= last_col; ++j) (*this)(i, j) -= lik * (*this)(k, j);
    }
  }
  factorized_ = true;
}

void BandedSystem::solve(Eigen::MatrixXd& b) const {
  const int uw = ku_ + kl_;
  for (int k = 0; k < n_; ++k) {
    if (piv_[k] != k) b.row(k).swap(b.row(piv_[k]));
    const int last_row = std::min(n_ - 1, k + kl_);
    for (int i = k + 1; i <= last_row; ++i) b.row(i) -= (*this)(i, k) * b.row(k);
  }
  for (int k = n_ - 1; k >= 0; --k) {
    const int last_col = std::min(n_ - 1, k + uw);
    for (int j = k + 1; j <= last_col; ++j) b.row(k) -= (*this)(k, j) * b.row(j);
    b.row(k) /= (*this)(k, k);
  }
}

void BandedSystem::solveTransposed(Eigen::MatrixXd& b) const {
  const int uw = ku_ + kl_;
  // U^T y = b
  for (int k = 0; k < n_; ++k) {
    const int first = std::max(0, k - uw);
    for (int j = first; j < k; ++j) b.row(k) -= (*this)(j, k) * b.row(j);
    b.row(k) /= (*this)(k, k);
  }
  // Undo the elimination steps in reverse order.
  for (int k = n_ - 1; k >= 0; --k) {
    const int last_row = std::min(n_ - 1, k + kl_);
    for (int i = k + 1; i <= last_row; ++i) b.row(k) -= (*this)(i, k) * b.row(i);
    if (piv_[k] != k) b.row(k).swap(b.row(piv_[k]));
  }
}

}  // namespace flatplan
