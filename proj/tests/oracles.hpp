// Test-only oracles, deliberately independent of the trajectory driver:
//  - an exact density-matrix (channel) evolution of the adaptive circuit
//  - an exhaustive enumeration of measurement-outcome branches with Born
//    weights on pure states
// Both follow the protocol directly from the circuit instance. Limited to
// small systems (the channel oracle holds a 2^L x 2^L matrix).
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "aqsim/circuit.hpp"
#include "aqsim/gates.hpp"
#include "aqsim/kernels.hpp"
#include "aqsim/statevector.hpp"

namespace aqsim::testing {

struct OracleProfile {
  int num_sites = 0;
  int depth = 0;
  std::vector<double> occupation;  // (depth+1) x L

  double at(int t, int i) const {
    return occupation[static_cast<std::size_t>(t) * num_sites + i];
  }
  double total(int t) const {
    double s = 0;
    for (int i = 0; i < num_sites; ++i) s += at(t, i);
    return s;
  }
};

namespace detail {

inline Eigen::MatrixXcd embed_two_site(const Unitary4& u, int L, int site_a,
                                       int site_b) {
  const std::size_t dim = std::size_t{1} << L;
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  const int ba = L - 1 - site_a;
  const int bb = L - 1 - site_b;
  for (std::size_t idx = 0; idx < dim; ++idx) {
    const int sa = (idx >> ba) & 1;
    const int sb = (idx >> bb) & 1;
    const std::size_t base = idx & ~((std::size_t{1} << ba) | (std::size_t{1} << bb));
    for (int ta = 0; ta < 2; ++ta) {
      for (int tb = 0; tb < 2; ++tb) {
        const cd v = u[(2 * sa + sb) * 4 + (2 * ta + tb)];
        if (v == cd{0, 0}) continue;
        std::size_t src = base;
        if (ta) src |= std::size_t{1} << ba;
        if (tb) src |= std::size_t{1} << bb;
        full(idx, src) += v;
      }
    }
  }
  return full;
}

inline Eigen::MatrixXcd embed_one_site(const Unitary2& u, int L, int site) {
  const std::size_t dim = std::size_t{1} << L;
  const int b = L - 1 - site;
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    const int s = (idx >> b) & 1;
    for (int t = 0; t < 2; ++t) {
      const cd v = u[s * 2 + t];
      if (v == cd{0, 0}) continue;
      const std::size_t src = t ? (idx | (std::size_t{1} << b))
                                : (idx & ~(std::size_t{1} << b));
      full(idx, src) += v;
    }
  }
  return full;
}

}  // namespace detail

// exact outcome-averaged (channel) evolution; ideal noise only
inline OracleProfile run_channel_oracle(const CircuitInstance& inst) {
  const int L = inst.spec.num_sites;
  const std::size_t dim = std::size_t{1} << L;
  auto [bits, flags] = initial_configuration(inst.spec.initial_state, L);
  std::size_t idx0 = 0;
  for (int i = 0; i < L; ++i) idx0 = (idx0 << 1) | bits[i];
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  rho(idx0, idx0) = 1.0;

  OracleProfile prof;
  prof.num_sites = L;
  prof.depth = inst.spec.depth;
  prof.occupation.assign(static_cast<std::size_t>(inst.spec.depth + 1) * L, 0.0);
  const auto record = [&](int t) {
    for (int i = 0; i < L; ++i) {
      const int b = L - 1 - i;
      double n = 0;
      for (std::size_t idx = 0; idx < dim; ++idx) {
        if ((idx >> b) & 1) n += rho(idx, idx).real();
      }
      prof.occupation[static_cast<std::size_t>(t) * L + i] = n;
    }
  };
  record(0);

  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(dim, dim);
  for (int t = 1; t <= inst.spec.depth; ++t) {
    const Layer& layer = inst.layers[t - 1];
    for (const BondGate& g : layer.gates) {
      if (!flags[g.site_a] && !flags[g.site_b]) continue;
      const Eigen::MatrixXcd u =
          detail::embed_two_site(g.matrix, L, g.site_a, g.site_b);
      rho = u * rho * u.adjoint();
      flags[g.site_a] = 1;
      flags[g.site_b] = 1;
    }
    for (int site : layer.measured_sites) {
      if (!flags[site]) continue;
      const int b = L - 1 - site;
      Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Zero(dim, dim);
      Eigen::MatrixXcd p1 = Eigen::MatrixXcd::Zero(dim, dim);
      for (std::size_t idx = 0; idx < dim; ++idx) {
        if ((idx >> b) & 1) {
          p1(idx, idx) = 1.0;
        } else {
          p0(idx, idx) = 1.0;
        }
      }
      const Eigen::MatrixXcd x = detail::embed_one_site(pauli_x(), L, site);
      rho = p0 * rho * p0 + x * p1 * rho * p1 * x.adjoint();
      flags[site] = 0;
    }
    record(t);
  }
  return prof;
}

// exact trajectory average over every measurement-outcome branch
inline OracleProfile run_branch_enumeration(const CircuitInstance& inst) {
  const int L = inst.spec.num_sites;
  OracleProfile prof;
  prof.num_sites = L;
  prof.depth = inst.spec.depth;
  prof.occupation.assign(static_cast<std::size_t>(inst.spec.depth + 1) * L, 0.0);

  struct Branch {
    PureState state;
    std::vector<uint8_t> flags;
    double weight;
  };
  auto [bits, flags0] = initial_configuration(inst.spec.initial_state, L);
  std::vector<Branch> branches;
  branches.push_back(Branch{PureState::from_bits(bits), flags0, 1.0});

  const auto record = [&](int t) {
    for (const Branch& br : branches) {
      for (int i = 0; i < L; ++i) {
        prof.occupation[static_cast<std::size_t>(t) * L + i] +=
            br.weight * occupation_expectation(br.state, i);
      }
    }
  };
  record(0);

  for (int t = 1; t <= inst.spec.depth; ++t) {
    const Layer& layer = inst.layers[t - 1];
    for (Branch& br : branches) {
      for (const BondGate& g : layer.gates) {
        if (!br.flags[g.site_a] && !br.flags[g.site_b]) continue;
        apply_unitary(br.state, {g.site_a, g.site_b}, g.matrix);
        br.flags[g.site_a] = 1;
        br.flags[g.site_b] = 1;
      }
    }
    for (int site : layer.measured_sites) {
      std::vector<Branch> next;
      for (Branch& br : branches) {
        if (!br.flags[site]) {
          next.push_back(std::move(br));
          continue;
        }
        const double p1 = occupation_expectation(br.state, site);
        for (int outcome = 0; outcome < 2; ++outcome) {
          const double w = outcome ? p1 : 1.0 - p1;
          if (w <= 1e-300) continue;
          Branch child;
          child.state = br.state;
          child.flags = br.flags;
          child.weight = br.weight * w;
          kernels::project_and_scale(child.state.amps.data(),
                                     child.state.amps.size(),
                                     child.state.bit_of_site(site), outcome,
                                     1.0 / std::sqrt(w));
          if (outcome == 1) apply_unitary(child.state, site, pauli_x());
          child.flags[site] = 0;
          next.push_back(std::move(child));
        }
      }
      branches = std::move(next);
    }
    record(t);
  }
  return prof;
}

}  // namespace aqsim::testing
