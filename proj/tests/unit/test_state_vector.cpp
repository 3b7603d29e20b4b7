// Copyright 2026 The qpca Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qpca/state_vector.hpp"

namespace {

using qpca::BasisState;
using qpca::Complex;
using qpca::Error;
using qpca::ErrorCode;
using qpca::Register;
using qpca::StateVector;

StateVector random_state(std::vector<Register> layout, std::uint64_t seed) {
  StateVector s(std::move(layout));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& a : s.amplitudes()) a = Complex(n(rng), n(rng));
  s.normalize();
  return s;
}

TEST(StateVector, LayoutAndIndexing) {
  StateVector s({{"a", 1}, {"b", 2}, {"c", 0}});
  EXPECT_EQ(s.size(), 8u);
  EXPECT_EQ(s.stride("b"), 1u);
  EXPECT_EQ(s.stride("a"), 4u);
  EXPECT_EQ(s.dimension("c"), 1u);
  EXPECT_EQ(s.index_of({{"a", 1}, {"b", 2}}), 6u);
  EXPECT_EQ(s.value_of(6, "b"), 2u);
  EXPECT_EQ(s.amplitude({}), Complex(1.0, 0.0));
  EXPECT_THROW(s.position("missing"), Error);
  EXPECT_THROW(StateVector({{"a", 1}, {"a", 1}}), Error);
  EXPECT_THROW(s.index_of({{"b", 4}}), Error);
}

TEST(StateVector, AppendAndDropRegister) {
  const StateVector s = random_state({{"x", 2}}, 1);
  const StateVector t = s.append_register({"y", 1});
  EXPECT_EQ(t.size(), 8u);
  for (std::size_t v = 0; v < 4; ++v) {
    EXPECT_EQ(t.amplitude({{"x", v}, {"y", 0}}), s.amplitude({{"x", v}}));
    EXPECT_EQ(t.amplitude({{"x", v}, {"y", 1}}), Complex(0.0, 0.0));
  }
  const StateVector back = t.drop_register("y");
  EXPECT_EQ(qpca::max_abs_difference(back, s), 0.0);
  StateVector u = t;
  u.set_amplitude({{"y", 1}}, 0.5);
  try {
    (void)u.drop_register("y");
    FAIL() << "expected a contract violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ContractViolation);
  }
}

TEST(StateVector, TransformActsOnNamedSlices) {
  StateVector s = random_state({{"a", 1}, {"b", 1}, {"c", 1}}, 2);
  const StateVector before = s;
  // Swap the values of a and c by naming them in the order (c, a).
  s.transform({"c", "a"}, [](std::span<const Complex> in, std::span<Complex> out) {
    out[0] = in[0];
    out[1] = in[2];
    out[2] = in[1];
    out[3] = in[3];
  });
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < 2; ++c)
        EXPECT_EQ(s.amplitude({{"a", a}, {"b", b}, {"c", c}}),
                  before.amplitude({{"a", c}, {"b", b}, {"c", a}}));
}

TEST(StateVector, MarginalSumsToNorm) {
  const StateVector s = random_state({{"a", 2}, {"b", 3}}, 3);
  const auto m = s.marginal({"b"});
  double total = 0.0;
  for (double p : m) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
  const auto joint = s.marginal({"b", "a"});
  EXPECT_EQ(joint.size(), 32u);
  EXPECT_NEAR(joint[3 * 4 + 1], std::norm(s.amplitude({{"a", 1}, {"b", 3}})), 1e-15);
}

TEST(StateVector, InnerProductAndFidelity) {
  const StateVector a = random_state({{"r", 3}}, 4);
  StateVector b = a;
  for (auto& x : b.amplitudes()) x *= std::polar(1.0, 0.7);
  EXPECT_NEAR(qpca::fidelity(a, b), 1.0, 1e-12);
  EXPECT_NEAR(qpca::inner_product(a, a).real(), 1.0, 1e-12);
  EXPECT_THROW(qpca::inner_product(a, StateVector({{"r", 2}})), Error);
}

}  // namespace
