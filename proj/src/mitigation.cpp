#include "aqsim/mitigation.hpp"

#include <fmt/format.h>

#include <Eigen/SVD>
#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace aqsim {

void AssignmentMatrix::validate() const {
  if (m.rows() != m.cols() || m.rows() != (Eigen::Index{1} << k)) {
    throw std::invalid_argument("assignment matrix dimension mismatch");
  }
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    double sum = 0.0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const double v = m(r, c);
      if (v < -1e-12 || v > 1.0 + 1e-12) {
        throw std::invalid_argument("assignment matrix entries must be in [0,1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-10) {
      throw std::invalid_argument(
          fmt::format("assignment matrix column {} sums to {}", c, sum));
    }
  }
}

namespace {

double condition_of(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

AssignmentMatrix build_assignment_matrix(const NoiseModel& noise, int k) {
  if (k < 1 || k > 4) {
    throw std::invalid_argument("assignment matrix limited to 1..4 qubits");
  }
  Eigen::Matrix2d per_qubit;
  per_qubit << 1.0 - noise.readout_flip_0to1, noise.readout_flip_1to0,
      noise.readout_flip_0to1, 1.0 - noise.readout_flip_1to0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(1, 1);
  for (int q = 0; q < k; ++q) {
    Eigen::MatrixXd next(m.rows() * 2, m.cols() * 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        next.block(a * m.rows(), b * m.cols(), m.rows(), m.cols()) =
            per_qubit(a, b) * m;
    m = std::move(next);
  }
  AssignmentMatrix out;
  out.m = std::move(m);
  out.k = k;
  out.validate();
  out.condition_number = condition_of(out.m);
  return out;
}

AssignmentMatrix assignment_matrix_from_dense(const Eigen::MatrixXd& m) {
  AssignmentMatrix out;
  out.m = m;
  out.k = 0;
  Eigen::Index dim = m.rows();
  while (dim > 1) {
    dim >>= 1;
    ++out.k;
  }
  out.validate();
  out.condition_number = condition_of(out.m);
  return out;
}

std::string AssignmentMatrix::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["k"] = k;
  std::vector<double> entries;
  entries.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) entries.push_back(m(r, c));
  j["row_major"] = entries;
  return j.dump(2);
}

AssignmentMatrix AssignmentMatrix::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int k = j.at("k").get<int>();
  const auto entries = j.at("row_major").get<std::vector<double>>();
  const Eigen::Index dim = Eigen::Index{1} << k;
  if (static_cast<Eigen::Index>(entries.size()) != dim * dim) {
    throw std::invalid_argument("assignment matrix payload size mismatch");
  }
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = entries[r * dim + c];
  return assignment_matrix_from_dense(m);
}

ReadoutInversion readout_invert(std::span<const double> observed,
                                const AssignmentMatrix& am, double svd_rel_cutoff) {
  const Eigen::Index dim = am.m.rows();
  if (static_cast<Eigen::Index>(observed.size()) != dim) {
    throw std::invalid_argument("observed distribution has wrong dimension");
  }
  double total = 0.0;
  for (double v : observed) total += v;
  if (!(total > 0.0)) {
    throw std::invalid_argument("observed distribution must have positive mass");
  }
  Eigen::VectorXd obs(dim);
  for (Eigen::Index i = 0; i < dim; ++i) obs(i) = observed[i] / total;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(am.m,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double floor = s(0) * svd_rel_cutoff;
  Eigen::VectorXd sinv = Eigen::VectorXd::Zero(s.size());
  bool truncated = false;
  int kept = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > floor) {
      sinv(i) = 1.0 / s(i);
      ++kept;
    } else {
      truncated = true;
    }
  }
  if (kept == 0) {
    throw std::invalid_argument(
        "readout_invert: every singular value fell below the cutoff");
  }
  Eigen::VectorXd corrected =
      svd.matrixV() * sinv.asDiagonal() * svd.matrixU().adjoint() * obs;

  double mass = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    corrected(i) = std::max(0.0, corrected(i));
    mass += corrected(i);
  }
  if (!(mass > 0.0)) {
    throw std::invalid_argument("readout_invert: corrected distribution vanished");
  }
  ReadoutInversion out;
  out.truncated = truncated;
  out.distribution.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) out.distribution[i] = corrected(i) / mass;
  return out;
}

ShotTable readout_invert_table(const ShotTable& table, const AssignmentMatrix& m,
                               double svd_rel_cutoff) {
  std::vector<std::vector<double>> corrected(table.num_settings());
  for (int s = 0; s < table.num_settings(); ++s) {
    corrected[s] = readout_invert(table.counts[s], m, svd_rel_cutoff).distribution;
  }
  return corrected_table(table, corrected);
}

double error_budget(const OperationCounts& counts, const ErrorRates& rates) {
  return rates.eps_1q * static_cast<double>(counts.n_1q) +
         rates.eps_2q * static_cast<double>(counts.n_2q) +
         rates.eps_ro * static_cast<double>(counts.n_ro);
}

double residual_entropy_correct(double s_of_p, double s_at_p1, double budget_p,
                                double budget_p1) {
  if (!(budget_p1 > 0.0)) {
    throw std::invalid_argument("residual_entropy_correct: budget at p=1 must be > 0");
  }
  return s_of_p - (budget_p / budget_p1) * s_at_p1;
}

}  // namespace aqsim
