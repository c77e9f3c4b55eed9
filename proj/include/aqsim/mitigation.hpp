#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "aqsim/circuit.hpp"
#include "aqsim/tomography.hpp"

namespace aqsim {

// column-stochastic map from true outcome distributions to observed ones;
// bitstring index convention matches ShotTable (qubit 0 = MSB)
struct AssignmentMatrix {
  Eigen::MatrixXd m;
  int k = 0;
  double condition_number = 0.0;

  void validate() const;  // columns sum to 1 within 1e-10, entries in [0,1]
  std::string to_json() const;
  static AssignmentMatrix from_json(const std::string& text);
};

struct ErrorRates {
  double eps_1q = 0.0;
  double eps_2q = 0.0;
  double eps_ro = 0.0;
};

// tensor product of per-qubit flip matrices [[1-e01, e10], [e01, 1-e10]]
AssignmentMatrix build_assignment_matrix(const NoiseModel& noise, int k);

// wraps an externally calibrated matrix (validates and caches the condition)
AssignmentMatrix assignment_matrix_from_dense(const Eigen::MatrixXd& m);

struct ReadoutInversion {
  std::vector<double> distribution;  // non-negative, sums to 1
  bool truncated = false;            // singular values were dropped
};

// truncated-SVD pseudo-inverse of M applied to an observed distribution;
// negatives clipped and the result renormalized
ReadoutInversion readout_invert(std::span<const double> observed,
                                const AssignmentMatrix& m,
                                double svd_rel_cutoff = 1e-6);

// applies readout_invert to every setting of a shot table
ShotTable readout_invert_table(const ShotTable& table, const AssignmentMatrix& m,
                               double svd_rel_cutoff = 1e-6);

// eps_1q * n_1q + eps_2q * n_2q + eps_ro * n_ro
double error_budget(const OperationCounts& counts, const ErrorRates& rates);

// S_corr(p) = S(p) - (budget_p / budget_p1) * S(p=1); applied to means only
double residual_entropy_correct(double s_of_p, double s_at_p1, double budget_p,
                                double budget_p1);

}  // namespace aqsim
