#include "sensched/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>

#include "sensched/errors.hpp"

namespace sensched {

namespace {

std::string shape(const Matrix& M) {
  std::ostringstream os;
  os << M.rows() << "x" << M.cols();
  return os.str();
}

Matrix symmetrized(const Matrix& X) { return 0.5 * (X + X.transpose()); }

bool all_finite(const Matrix& X) { return X.allFinite(); }

void require_square(const Matrix& X, Eigen::Index n, const char* what) {
  if (X.rows() != n || X.cols() != n) {
    throw DimensionError(std::string(what) + " must be " + std::to_string(n) + "x" +
                         std::to_string(n) + " (got " + shape(X) + ")");
  }
}

}  // namespace

bool is_symmetric(const Matrix& X, double tol) {
  if (X.rows() != X.cols()) return false;
  return (X - X.transpose()).cwiseAbs().maxCoeff() <= tol * (1.0 + X.cwiseAbs().maxCoeff());
}

double min_eigenvalue_symmetric(const Matrix& X) {
  if (X.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(X), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_symmetric_psd(const Matrix& X, double sym_tol, double eig_tol) {
  if (!is_symmetric(X, sym_tol)) return false;
  const double scale = std::max(1.0, X.cwiseAbs().maxCoeff());
  return min_eigenvalue_symmetric(X) >= eig_tol * scale;
}

double spectral_radius(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(A, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::Index numerical_rank(const Matrix& M, double rel_tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  if (smax == 0.0) return 0;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > rel_tol * smax) ++rank;
  }
  return rank;
}

Matrix psd_sqrt(const Matrix& X) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(X));
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

bool is_controllable(const Matrix& A, const Matrix& B, double rel_tol) {
  const Eigen::Index n = A.rows();
  Matrix ctrb(n, n * B.cols());
  Matrix block = B;
  for (Eigen::Index k = 0; k < n; ++k) {
    ctrb.middleCols(k * B.cols(), B.cols()) = block;
    block = A * block;
  }
  return numerical_rank(ctrb, rel_tol) == n;
}

bool is_observable(const Matrix& A, const Matrix& C, double rel_tol) {
  return is_controllable(A.transpose(), C.transpose(), rel_tol);
}

LinearSystem make_linear_system(Matrix A, Matrix C, Matrix Q, Matrix R) {
  if (A.rows() != A.cols()) throw DimensionError("A must be square (got " + shape(A) + ")");
  const Eigen::Index n = A.rows();
  if (n == 0) throw DimensionError("A must be non-empty");
  if (C.cols() != n) {
    throw DimensionError("C must have " + std::to_string(n) + " columns (got " + shape(C) + ")");
  }
  const Eigen::Index m = C.rows();
  if (m == 0) throw DimensionError("C must have at least one row");
  require_square(Q, n, "Q");
  require_square(R, m, "R");
  for (const Matrix* M : {&A, &C, &Q, &R}) {
    if (!all_finite(*M)) throw ValidationError("matrix entries must be finite");
  }
  if (!is_symmetric_psd(Q)) throw ValidationError("Q must be symmetric positive semidefinite");
  if (!is_symmetric(R) || min_eigenvalue_symmetric(R) <= 0.0) {
    throw ValidationError("R must be positive definite");
  }
  return LinearSystem{std::move(A), std::move(C), symmetrized(Q), symmetrized(R)};
}

Matrix h_map(const LinearSystem& sys, const Matrix& X) {
  if (X.rows() != sys.state_dim() || X.cols() != sys.state_dim()) {
    throw DimensionError("h_map: X must be " + shape(sys.A) + " (got " + shape(X) + ")");
  }
  return symmetrized(sys.A * X * sys.A.transpose() + sys.Q);
}

Matrix g_map(const LinearSystem& sys, const Matrix& X) {
  if (X.rows() != sys.state_dim() || X.cols() != sys.state_dim()) {
    throw DimensionError("g_map: X must be " + shape(sys.A) + " (got " + shape(X) + ")");
  }
  const Matrix CX = sys.C * X;
  const Matrix S = CX * sys.C.transpose() + sys.R;
  const Matrix gain_term = S.ldlt().solve(CX);
  return symmetrized(X - CX.transpose() * gain_term);
}

Matrix steady_state_covariance(const LinearSystem& sys, long max_iterations) {
  Matrix P = sys.Q;
  for (long k = 0; k < max_iterations; ++k) {
    Matrix next = g_map(sys, h_map(sys, P));
    if (!all_finite(next)) break;
    const double step = (next - P).norm();
    const double scale = P.norm();
    P = std::move(next);
    if (step <= 1e-12 * scale || step == 0.0) return P;
  }
  throw RiccatiError("Riccati iteration did not converge");
}

Matrix lyapunov_solution(const LinearSystem& sys) {
  const double rho = spectral_radius(sys.A);
  if (rho >= 1.0) {
    throw UnstableSystemError("Lyapunov solution requires rho(A) < 1 (got " +
                              std::to_string(rho) + ")");
  }
  Matrix X = sys.Q;
  Matrix term = sys.Q;
  constexpr long kMaxTerms = 50'000'000;
  for (long k = 0; k < kMaxTerms; ++k) {
    term = sys.A * term * sys.A.transpose();
    X += term;
    const double inc = term.norm();
    if (inc == 0.0 || (inc < 1e-12 && inc <= 1e-15 * X.norm())) {
      return symmetrized(X);
    }
  }
  throw NoConvergence("Lyapunov series did not converge");
}

// ---------------------------------------------------------------------------

struct SystemModel::TraceTable {
  std::mutex mu;
  LinearSystem sys;
  // traces[l] = Tr h^l(P̄); prefix[k] = sum_{j<k} traces[j]
  std::vector<double> traces;
  std::vector<double> prefix{0.0};
  Matrix last;
  bool overflowed = false;
  // Same for the pure-noise sequence h^l(0).
  std::vector<double> noise_prefix{0.0};
  Matrix noise_last;
  bool noise_overflowed = false;

  void extend_traces(long count) {
    while (static_cast<long>(traces.size()) < count) {
      double t = std::numeric_limits<double>::infinity();
      if (!overflowed) {
        if (!traces.empty()) last = h_map(sys, last);
        t = last.trace();
        if (!std::isfinite(t)) {
          overflowed = true;
          t = std::numeric_limits<double>::infinity();
        }
      }
      traces.push_back(t);
      prefix.push_back(prefix.back() + t);
    }
  }

  void extend_noise(long count) {
    while (static_cast<long>(noise_prefix.size()) <= count) {
      const long l = static_cast<long>(noise_prefix.size()) - 1;
      double t = std::numeric_limits<double>::infinity();
      if (!noise_overflowed) {
        if (l > 0) noise_last = h_map(sys, noise_last);
        t = noise_last.trace();
        if (!std::isfinite(t)) {
          noise_overflowed = true;
          t = std::numeric_limits<double>::infinity();
        }
      }
      noise_prefix.push_back(noise_prefix.back() + t);
    }
  }
};

SystemModel::SystemModel(int id, LinearSystem sys, ModelChecks checks)
    : id_(id), sys_(std::move(sys)), table_(std::make_shared<TraceTable>()) {
  if (checks.observability && !is_observable(sys_.A, sys_.C)) {
    throw ValidationError("(A, C) is not observable");
  }
  if (checks.controllability && !is_controllable(sys_.A, psd_sqrt(sys_.Q))) {
    throw ValidationError("(A, sqrt(Q)) is not controllable");
  }
  rho_ = sensched::spectral_radius(sys_.A);
  steady_ = steady_state_covariance(sys_);
  const double residual = (steady_ - g_map(sys_, h_map(sys_, steady_))).norm();
  if (residual > 1e-9 * (1.0 + steady_.norm())) {
    throw RiccatiError("steady-state residual " + std::to_string(residual) + " too large");
  }
  table_->sys = sys_;
  table_->last = steady_;
  table_->noise_last = Matrix::Zero(sys_.state_dim(), sys_.state_dim());
}

double SystemModel::trace_of_power(long ell) const {
  std::lock_guard lock(table_->mu);
  table_->extend_traces(ell + 1);
  return table_->traces[static_cast<std::size_t>(ell)];
}

double SystemModel::trace_prefix_sum(long count) const {
  std::lock_guard lock(table_->mu);
  table_->extend_traces(count);
  return table_->prefix[static_cast<std::size_t>(count)];
}

double SystemModel::noise_prefix_sum(long count) const {
  std::lock_guard lock(table_->mu);
  table_->extend_noise(count);
  return table_->noise_prefix[static_cast<std::size_t>(count)];
}

std::vector<double> SystemModel::traces(long count) const {
  std::lock_guard lock(table_->mu);
  table_->extend_traces(count);
  return {table_->traces.begin(), table_->traces.begin() + count};
}

Matrix h_map(const SystemModel& sys, const Matrix& X) { return h_map(sys.system(), X); }
Matrix g_map(const SystemModel& sys, const Matrix& X) { return g_map(sys.system(), X); }
Matrix lyapunov_solution(const SystemModel& sys) { return lyapunov_solution(sys.system()); }

bool never_scheduled_check(std::span<const SystemModel> systems, std::size_t i, long ell_max) {
  const SystemModel& target = systems[i];
  if (!target.is_stable()) {
    throw UnstableSystemError("never_scheduled_check requires a stable sensor");
  }
  const double gain_i = (lyapunov_solution(target) - target.steady()).trace();
  for (std::size_t j = 0; j < systems.size(); ++j) {
    if (j == i) continue;
    for (long l = 0; l <= ell_max; ++l) {
      const double increment = systems[j].trace_of_power(l + 1) - systems[j].trace_of_power(l);
      if (increment < gain_i) return false;
    }
  }
  return true;
}

}  // namespace sensched
