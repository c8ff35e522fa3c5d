#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sensched {

using Matrix = Eigen::MatrixXd;

/// Plant/sensor matrices of one process: x' = A x + w, y = C x + v,
/// with w ~ N(0, Q) and v ~ N(0, R).
///
/// Construction through make_linear_system() checks dimensions, symmetry,
/// Q >= 0 and R > 0. Nothing about stability or the Riccati equation is
/// assumed at this level.
struct LinearSystem {
  Matrix A;
  Matrix C;
  Matrix Q;
  Matrix R;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index output_dim() const { return C.rows(); }
};

LinearSystem make_linear_system(Matrix A, Matrix C, Matrix Q, Matrix R);

// Numerical helpers shared by validation and the property tests.
bool is_symmetric(const Matrix& X, double tol = 1e-9);
bool is_symmetric_psd(const Matrix& X, double sym_tol = 1e-9, double eig_tol = -1e-9);
double min_eigenvalue_symmetric(const Matrix& X);
double spectral_radius(const Matrix& A);
Eigen::Index numerical_rank(const Matrix& M, double rel_tol = 1e-8);
Matrix psd_sqrt(const Matrix& X);
bool is_controllable(const Matrix& A, const Matrix& B, double rel_tol = 1e-8);
bool is_observable(const Matrix& A, const Matrix& C, double rel_tol = 1e-8);

/// Prediction step: A X A^T + Q.
Matrix h_map(const LinearSystem& sys, const Matrix& X);

/// Measurement update: X - X C^T (C X C^T + R)^{-1} C X.
Matrix g_map(const LinearSystem& sys, const Matrix& X);

/// Fixed point of g∘h by plain iteration from P0 = Q.
/// Throws RiccatiError when it has not settled after `max_iterations`.
Matrix steady_state_covariance(const LinearSystem& sys, long max_iterations = 1'000'000);

/// Solution of X = A X A^T + Q by series summation. Requires rho(A) < 1.
Matrix lyapunov_solution(const LinearSystem& sys);

struct ModelChecks {
  bool controllability = true;
  bool observability = true;
};

/// One sensor/plant pair with its cached steady-state covariance P̄ and the
/// trace sequence Tr[h^l(P̄)], l = 0, 1, ...
///
/// Immutable after construction. The trace table is extended lazily under a
/// mutex, so a model can be shared across threads; copies share the table.
class SystemModel {
 public:
  SystemModel(int id, LinearSystem sys, ModelChecks checks = {});

  int id() const { return id_; }
  const LinearSystem& system() const { return sys_; }
  const Matrix& steady() const { return steady_; }
  double spectral_radius() const { return rho_; }
  bool is_stable() const { return rho_ < 1.0; }

  /// Tr[h^l(P̄)]. +inf once the sequence overflows a double.
  double trace_of_power(long ell) const;

  /// Sum_{j < count} Tr[h^j(P̄)]; the cost of one off-duty stretch of length `count`.
  double trace_prefix_sum(long count) const;

  /// Sum_{j < count} Tr[h^j(0)]; the accumulated process-noise part of h^j.
  double noise_prefix_sum(long count) const;

  /// First `count` entries of the trace sequence.
  std::vector<double> traces(long count) const;

 private:
  struct TraceTable;

  int id_;
  LinearSystem sys_;
  Matrix steady_;
  double rho_;
  std::shared_ptr<TraceTable> table_;
};

Matrix h_map(const SystemModel& sys, const Matrix& X);
Matrix g_map(const SystemModel& sys, const Matrix& X);
Matrix lyapunov_solution(const SystemModel& sys);

/// True when sensor `i` (stable) is never worth scheduling against any other
/// sensor: Tr[h_j^l(h_j(P̄_j) - P̄_j)] >= Tr[P_i^Lyn - P̄_i] for all j != i and
/// l in [0, ell_max]. The left side uses the covariance increment between
/// consecutive off-duty steps, i.e. the linear part of h_j^l.
bool never_scheduled_check(std::span<const SystemModel> systems, std::size_t i, long ell_max);

}  // namespace sensched
