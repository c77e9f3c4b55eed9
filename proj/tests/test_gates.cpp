#include <doctest.h>

#include <cmath>

#include "aqsim/gates.hpp"
#include "aqsim/rng.hpp"

using namespace aqsim;

namespace {
double md(const Unitary4& a, const Unitary4& b) {
  double w = 0;
  for (int i = 0; i < 16; ++i) w = std::max(w, std::abs(a[i] - b[i]));
  return w;
}
}  // namespace

TEST_CASE("equatorial rotation matches the stated matrices") {
  const double c = std::cos(M_PI / 4), s = std::sin(M_PI / 4);
  const Unitary2 rx = equatorial_rotation(0.0);
  CHECK(std::abs(rx[0] - cd{c, 0}) < 1e-15);
  CHECK(std::abs(rx[1] - cd{0, -s}) < 1e-15);
  CHECK(std::abs(rx[2] - cd{0, -s}) < 1e-15);
  CHECK(std::abs(rx[3] - cd{c, 0}) < 1e-15);
  const Unitary2 ry = equatorial_rotation(M_PI / 2);
  CHECK(std::abs(ry[0] - cd{c, 0}) < 1e-15);
  CHECK(std::abs(ry[1] - cd{-s, 0}) < 1e-15);
  CHECK(std::abs(ry[2] - cd{s, 0}) < 1e-15);
  CHECK(std::abs(ry[3] - cd{c, 0}) < 1e-15);
}

TEST_CASE("equatorial rotation to the 4th power is -identity") {
  CounterRng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const double phi = rng.next_u01() * 2 * M_PI;
    const Unitary2 r = equatorial_rotation(phi);
    // square twice
    Unitary2 r2{}, r4{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        cd acc{0, 0};
        for (int k = 0; k < 2; ++k) acc += r[i * 2 + k] * r[k * 2 + j];
        r2[i * 2 + j] = acc;
      }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        cd acc{0, 0};
        for (int k = 0; k < 2; ++k) acc += r2[i * 2 + k] * r2[k * 2 + j];
        r4[i * 2 + j] = acc;
      }
    CHECK(std::abs(r4[0] + cd{1, 0}) < 1e-12);
    CHECK(std::abs(r4[3] + cd{1, 0}) < 1e-12);
    CHECK(std::abs(r4[1]) < 1e-12);
    CHECK(std::abs(r4[2]) < 1e-12);
  }
}

TEST_CASE("fsim special values") {
  CHECK(md(fsim(0, 0), identity4()) < 1e-15);
  const Unitary4 iswap = fsim(M_PI / 2, 0);
  // |01> -> -i |10>
  CHECK(std::abs(iswap[2 * 4 + 1] - cd{0, -1}) < 1e-15);
  CHECK(std::abs(iswap[1 * 4 + 1]) < 1e-15);
  // phase on |11>
  const Unitary4 g = fsim(M_PI / 2, 0.1);
  CHECK(std::abs(g[15] - std::exp(cd{0, -0.1})) < 1e-15);
}

TEST_CASE("fsim conserves two-qubit excitation number") {
  CounterRng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Unitary4 g = fsim(rng.next_u01() * M_PI, rng.next_u01() * 2 * M_PI);
    CHECK(number_commutator_norm(g) < 1e-12);
    CHECK(unitarity_error(g) < 1e-12);
  }
}

TEST_CASE("dressing breaks number conservation but stays unitary") {
  const Unitary4 dressed =
      dressed_entangler(fsim(M_PI / 2, 0), equatorial_rotation(0), identity2(),
                        identity2(), identity2());
  CHECK(number_commutator_norm(dressed) > 0.1);
  CHECK(unitarity_error(dressed) < 1e-12);
}

TEST_CASE("dressed entangler composes in the stated order") {
  CHECK(md(dressed_entangler(fsim(M_PI / 2, 0), identity2(), identity2(),
                             identity2(), identity2()),
           fsim(M_PI / 2, 0)) < 1e-15);
  // core = I with arbitrary dressings: product of local rotations
  const Unitary4 local =
      dressed_entangler(identity4(), equatorial_rotation(0.4),
                        equatorial_rotation(1.2), equatorial_rotation(2.5),
                        equatorial_rotation(0.9));
  CHECK(unitarity_error(local) < 1e-12);
  // operator Schmidt rank 1: equals kron of the composed locals
  Unitary2 a{}, b{};
  {
    const Unitary2 pre = equatorial_rotation(0.4), post = equatorial_rotation(2.5);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        cd acc{0, 0};
        for (int k = 0; k < 2; ++k) acc += post[i * 2 + k] * pre[k * 2 + j];
        a[i * 2 + j] = acc;
      }
  }
  {
    const Unitary2 pre = equatorial_rotation(1.2), post = equatorial_rotation(0.9);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        cd acc{0, 0};
        for (int k = 0; k < 2; ++k) acc += post[i * 2 + k] * pre[k * 2 + j];
        b[i * 2 + j] = acc;
      }
  }
  CHECK(md(local, kron(a, b)) < 1e-14);
}

TEST_CASE("random discrete dressings stay unitary to 1e-12") {
  CounterRng rng(11);
  const double set[4] = {0, M_PI / 2, M_PI, 3 * M_PI / 2};
  for (int trial = 0; trial < 50; ++trial) {
    const Unitary4 g = dressed_entangler(
        fsim(M_PI / 2, 0), equatorial_rotation(set[rng.next_index(4)]),
        equatorial_rotation(set[rng.next_index(4)]),
        equatorial_rotation(set[rng.next_index(4)]),
        equatorial_rotation(set[rng.next_index(4)]));
    CHECK(unitarity_error(g) < 1e-12);
  }
}

TEST_CASE("transpose_qubits swaps the pair roles") {
  const Unitary4 g = dressed_entangler(fsim(M_PI / 2, 0.2), equatorial_rotation(0.1),
                                       equatorial_rotation(0.7), identity2(),
                                       equatorial_rotation(1.9));
  const Unitary4 gt = transpose_qubits(g);
  // (a,b) entry U[(sa sb),(ta tb)] must equal U'[(sb sa),(tb ta)]
  for (int sa = 0; sa < 2; ++sa)
    for (int sb = 0; sb < 2; ++sb)
      for (int ta = 0; ta < 2; ++ta)
        for (int tb = 0; tb < 2; ++tb) {
          CHECK(std::abs(g[(2 * sa + sb) * 4 + (2 * ta + tb)] -
                         gt[(2 * sb + sa) * 4 + (2 * tb + ta)]) < 1e-15);
        }
}
