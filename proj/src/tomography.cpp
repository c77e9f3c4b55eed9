#include "aqsim/tomography.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "aqsim/gates.hpp"
#include "aqsim/rng.hpp"

namespace aqsim {

namespace {

constexpr int kMaxTomoQubits = 4;

Eigen::Matrix2cd basis_rotation(int axis) {
  // maps the +1 eigenstate of the measured Pauli onto |0>
  const std::complex<double> i{0.0, 1.0};
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  switch (axis) {
    case 0:  // X: H
      return h;
    case 1: {  // Y: H S^dagger
      Eigen::Matrix2cd sdg;
      sdg << 1, 0, 0, -i;
      return h * sdg;
    }
    default:  // Z
      return Eigen::Matrix2cd::Identity();
  }
}

int axis_of(int setting, int qubit, int k) {
  int s = setting;
  for (int j = k - 1; j > qubit; --j) s /= 3;
  return s % 3;
}

Eigen::MatrixXcd setting_rotation(int setting, int k) {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Ones(1, 1);
  for (int q = 0; q < k; ++q) {
    const Eigen::Matrix2cd u = basis_rotation(axis_of(setting, q, k));
    Eigen::MatrixXcd next(r.rows() * 2, r.cols() * 2);
    next.setZero();
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        next.block(a * r.rows(), b * r.cols(), r.rows(), r.cols()) = u(a, b) * r;
    r = std::move(next);
  }
  return r;
}

std::vector<double> born_distribution(const DensityMatrix& rho, int setting) {
  const int k = rho.subsystem_size();
  const Eigen::MatrixXcd r = setting_rotation(setting, k);
  const Eigen::MatrixXcd rot = r * rho.rho * r.adjoint();
  std::vector<double> probs(rot.rows());
  for (Eigen::Index b = 0; b < rot.rows(); ++b) {
    probs[b] = std::max(0.0, rot(b, b).real());
  }
  return probs;
}

std::vector<double> apply_readout_map(std::span<const double> probs, int k,
                                      const NoiseModel& noise) {
  // per-qubit independent flips applied to the distribution
  std::vector<double> out(probs.begin(), probs.end());
  if (!noise.has_readout_noise()) return out;
  std::vector<double> tmp(out.size());
  for (int q = 0; q < k; ++q) {
    const std::size_t bit = std::size_t{1} << (k - 1 - q);
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (std::size_t b = 0; b < out.size(); ++b) {
      const bool one = b & bit;
      const double stay = one ? 1.0 - noise.readout_flip_1to0
                              : 1.0 - noise.readout_flip_0to1;
      tmp[b] += stay * out[b];
      tmp[b ^ bit] += (1.0 - stay) * out[b];
    }
    out.swap(tmp);
  }
  return out;
}

}  // namespace

std::string ShotTable::setting_name(int index, int k) {
  std::string name(k, 'Z');
  for (int q = k - 1; q >= 0; --q) {
    name[q] = "XYZ"[index % 3];
    index /= 3;
  }
  return name;
}

int ShotTable::setting_index(const std::string& name) {
  int idx = 0;
  for (char c : name) {
    const int axis = c == 'X' ? 0 : c == 'Y' ? 1 : c == 'Z' ? 2 : -1;
    if (axis < 0) throw std::invalid_argument(fmt::format("bad setting '{}'", name));
    idx = idx * 3 + axis;
  }
  return idx;
}

std::string ShotTable::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["k"] = k;
  j["shots_per_setting"] = shots_per_setting;
  j["analytic"] = analytic;
  nlohmann::json settings = nlohmann::json::object();
  for (int s = 0; s < num_settings(); ++s) {
    nlohmann::json m = nlohmann::json::object();
    for (std::size_t b = 0; b < counts[s].size(); ++b) {
      if (counts[s][b] != 0.0) {
        std::string bits(k, '0');
        for (int q = 0; q < k; ++q) {
          if ((b >> (k - 1 - q)) & 1) bits[q] = '1';
        }
        m[bits] = counts[s][b];
      }
    }
    settings[setting_name(s, k)] = std::move(m);
  }
  j["settings"] = std::move(settings);
  return j.dump(2);
}

ShotTable ShotTable::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ShotTable t;
  t.k = j.at("k").get<int>();
  t.shots_per_setting = j.at("shots_per_setting").get<double>();
  t.analytic = j.value("analytic", false);
  int n_settings = 1;
  for (int q = 0; q < t.k; ++q) n_settings *= 3;
  t.counts.assign(n_settings, std::vector<double>(std::size_t{1} << t.k, 0.0));
  for (const auto& [name, outcomes] : j.at("settings").items()) {
    const int s = setting_index(name);
    for (const auto& [bits, value] : outcomes.items()) {
      std::size_t b = 0;
      for (char c : bits) b = (b << 1) | (c == '1' ? 1 : 0);
      t.counts[s][b] = value.get<double>();
    }
  }
  return t;
}

ShotTable sample_shots(const DensityMatrix& rho, int shots, const NoiseModel& noise,
                       uint64_t seed) {
  const int k = rho.subsystem_size();
  if (k > kMaxTomoQubits) {
    throw std::invalid_argument(
        fmt::format("tomography limited to {} qubits, got {}", kMaxTomoQubits, k));
  }
  ShotTable t;
  t.k = k;
  t.shots_per_setting = shots;
  t.analytic = false;
  int n_settings = 1;
  for (int q = 0; q < k; ++q) n_settings *= 3;
  t.counts.assign(n_settings, std::vector<double>(std::size_t{1} << k, 0.0));
  for (int s = 0; s < n_settings; ++s) {
    CounterRng rng(chain_seed(seed, kTagTomography, s));
    const std::vector<double> probs = born_distribution(rho, s);
    // cumulative distribution for inverse sampling
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t b = 0; b < probs.size(); ++b) {
      acc += probs[b];
      cdf[b] = acc;
    }
    for (int shot = 0; shot < shots; ++shot) {
      const double u = rng.next_u01() * acc;
      std::size_t b =
          std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
      if (b >= probs.size()) b = probs.size() - 1;
      if (noise.has_readout_noise()) {
        std::size_t reported = 0;
        for (int q = 0; q < k; ++q) {
          const int bit = (b >> (k - 1 - q)) & 1;
          const double flip =
              bit ? noise.readout_flip_1to0 : noise.readout_flip_0to1;
          int rep = bit;
          if (flip > 0.0 && rng.next_u01() < flip) rep = 1 - rep;
          reported = (reported << 1) | rep;
        }
        b = reported;
      }
      t.counts[s][b] += 1.0;
    }
  }
  return t;
}

ShotTable sample_shots_analytic(const DensityMatrix& rho, const NoiseModel& noise) {
  const int k = rho.subsystem_size();
  if (k > kMaxTomoQubits) {
    throw std::invalid_argument(
        fmt::format("tomography limited to {} qubits, got {}", kMaxTomoQubits, k));
  }
  ShotTable t;
  t.k = k;
  t.shots_per_setting = 1.0;
  t.analytic = true;
  int n_settings = 1;
  for (int q = 0; q < k; ++q) n_settings *= 3;
  t.counts.resize(n_settings);
  for (int s = 0; s < n_settings; ++s) {
    t.counts[s] = apply_readout_map(born_distribution(rho, s), k, noise);
  }
  return t;
}

std::vector<double> setting_distribution(const DensityMatrix& rho,
                                         int setting_index) {
  return born_distribution(rho, setting_index);
}

ShotTable corrected_table(const ShotTable& table,
                          std::span<const std::vector<double>> corrected) {
  if (static_cast<int>(corrected.size()) != table.num_settings()) {
    throw std::invalid_argument("corrected_table: setting count mismatch");
  }
  ShotTable out = table;
  out.analytic = true;
  out.shots_per_setting = 1.0;
  for (int s = 0; s < out.num_settings(); ++s) {
    out.counts[s] = corrected[s];
  }
  return out;
}

DensityMatrix linear_inversion(const ShotTable& table) {
  const int k = table.k;
  int n_settings = 1;
  for (int q = 0; q < k; ++q) n_settings *= 3;
  if (table.num_settings() != n_settings) {
    throw std::invalid_argument("linear_inversion: incomplete shot table");
  }
  const std::size_t dim = std::size_t{1} << k;
  for (int s = 0; s < n_settings; ++s) {
    if (table.counts[s].size() != dim) {
      throw std::invalid_argument("linear_inversion: malformed shot table");
    }
    double total = 0.0;
    for (double c : table.counts[s]) total += c;
    if (total <= 0.0) {
      throw std::invalid_argument(
          fmt::format("linear_inversion: empty setting {}", ShotTable::setting_name(s, k)));
    }
  }

  // normalized frequencies per setting
  std::vector<std::vector<double>> freq(n_settings);
  for (int s = 0; s < n_settings; ++s) {
    double total = 0.0;
    for (double c : table.counts[s]) total += c;
    freq[s].resize(dim);
    for (std::size_t b = 0; b < dim; ++b) freq[s][b] = table.counts[s][b] / total;
  }

  // <P> for every Pauli string (letters I=0,X=1,Y=2,Z=3, qubit 0 major),
  // averaged over all compatible settings
  const std::size_t n_paulis = std::size_t{1} << (2 * k);
  std::vector<double> expectation(n_paulis, 0.0);
  expectation[0] = 1.0;
  for (std::size_t pidx = 1; pidx < n_paulis; ++pidx) {
    int letters[kMaxTomoQubits] = {0, 0, 0, 0};
    {
      std::size_t v = pidx;
      for (int q = k - 1; q >= 0; --q) {
        letters[q] = v & 3;
        v >>= 2;
      }
    }
    double acc = 0.0;
    int n_compatible = 0;
    for (int s = 0; s < n_settings; ++s) {
      bool compatible = true;
      std::size_t support = 0;
      for (int q = 0; q < k && compatible; ++q) {
        if (letters[q] == 0) continue;
        support |= std::size_t{1} << (k - 1 - q);
        // setting axis X=0,Y=1,Z=2 vs letter X=1,Y=2,Z=3
        if (axis_of(s, q, k) != letters[q] - 1) compatible = false;
      }
      if (!compatible) continue;
      double val = 0.0;
      for (std::size_t b = 0; b < dim; ++b) {
        const int parity = __builtin_popcountll(b & support) & 1;
        val += (parity ? -1.0 : 1.0) * freq[s][b];
      }
      acc += val;
      ++n_compatible;
    }
    expectation[pidx] = acc / n_compatible;
  }

  // rho = 2^{-k} sum_P <P> P
  const std::complex<double> i{0.0, 1.0};
  const std::complex<double> p2[4][2][2] = {
      {{1, 0}, {0, 1}},      // I
      {{0, 1}, {1, 0}},      // X
      {{0, -i}, {i, 0}},     // Y
      {{1, 0}, {0, -1}},     // Z
  };
  DensityMatrix out;
  out.sites.resize(k);
  for (int q = 0; q < k; ++q) out.sites[q] = q;
  out.rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t pidx = 0; pidx < n_paulis; ++pidx) {
    if (expectation[pidx] == 0.0) continue;
    int letters[kMaxTomoQubits] = {0, 0, 0, 0};
    {
      std::size_t v = pidx;
      for (int q = k - 1; q >= 0; --q) {
        letters[q] = v & 3;
        v >>= 2;
      }
    }
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < dim; ++c) {
        std::complex<double> val = expectation[pidx];
        for (int q = 0; q < k && val != std::complex<double>{0, 0}; ++q) {
          const int rb = (r >> (k - 1 - q)) & 1;
          const int cb = (c >> (k - 1 - q)) & 1;
          val *= p2[letters[q]][rb][cb];
        }
        out.rho(r, c) += val;
      }
    }
  }
  out.rho /= static_cast<double>(dim);
  return out;
}

DensityMatrix psd_project(const DensityMatrix& rho) {
  const double herm = (rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-9) {
    throw std::invalid_argument("psd_project expects a Hermitian input");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      ((rho.rho + rho.rho.adjoint()) / 2.0).eval());
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  const double tr = ev.sum();
  if (tr <= 0.0) {
    throw std::invalid_argument("psd_project: input clipped to zero");
  }
  ev /= tr;
  DensityMatrix out;
  out.sites = rho.sites;
  out.rho = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  return out;
}

}  // namespace aqsim
