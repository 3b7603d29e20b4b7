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

#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qpca/common.hpp"
#include "qpca/error.hpp"

namespace qpca {

/// Register names shared by the pipeline stages.
namespace reg {
inline constexpr std::string_view kRow = "row";
inline constexpr std::string_view kFeature = "feature";
inline constexpr std::string_view kEigen = "eigenvalue";
inline constexpr std::string_view kIndex = "index";
inline constexpr std::string_view kAncilla = "ancilla";
}  // namespace reg

struct Register {
  std::string name;
  std::size_t qubits = 0;

  std::size_t dimension() const { return std::size_t{1} << qubits; }
  bool operator==(const Register&) const = default;
};

/// Assignment of basis values to (a subset of) registers, by name.
using BasisState = std::vector<std::pair<std::string, std::size_t>>;

/**
 * Dense complex amplitudes over an ordered list of named registers.
 *
 * The first register is the most significant: the flat index is
 * sum_r value_r * stride_r with stride 1 for the last register. Within a
 * register, value bit (qubits-1) is the first written qubit, so the binary
 * string of a value reads left to right as the register's qubits.
 * A register may have zero qubits, in which case it holds the single value 0.
 */
class StateVector {
 public:
  StateVector() = default;

  /// All-zero basis state |0...0>.
  explicit StateVector(std::vector<Register> layout) : layout_(std::move(layout)) {
    check_names();
    amplitudes_.assign(total_size(), Complex{0.0, 0.0});
    amplitudes_[0] = 1.0;
  }

  StateVector(std::vector<Register> layout, std::vector<Complex> amplitudes)
      : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
    check_names();
    if (amplitudes_.size() != total_size())
      throw Error(ErrorCode::DimensionMismatch, "amplitude count does not match register layout");
  }

  const std::vector<Register>& layout() const { return layout_; }
  std::size_t size() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::span<Complex> amplitudes() { return amplitudes_; }

  bool has_register(std::string_view name) const {
    return std::any_of(layout_.begin(), layout_.end(),
                       [&](const Register& r) { return r.name == name; });
  }

  std::size_t position(std::string_view name) const {
    for (std::size_t k = 0; k < layout_.size(); ++k)
      if (layout_[k].name == name) return k;
    throw Error(ErrorCode::UnknownRegister, "unknown register '" + std::string(name) + "'");
  }

  const Register& reg(std::string_view name) const { return layout_[position(name)]; }
  std::size_t dimension(std::string_view name) const { return reg(name).dimension(); }
  std::size_t qubits(std::string_view name) const { return reg(name).qubits; }

  std::size_t stride(std::string_view name) const {
    const std::size_t pos = position(name);
    std::size_t s = 1;
    for (std::size_t k = pos + 1; k < layout_.size(); ++k) s *= layout_[k].dimension();
    return s;
  }

  /// Flat index of a basis state; registers not mentioned are taken as 0.
  std::size_t index_of(const BasisState& basis) const {
    std::size_t idx = 0;
    for (const auto& [name, value] : basis) {
      if (value >= dimension(name))
        throw Error(ErrorCode::OutOfRange, "basis value out of range for register '" + name + "'");
      idx += value * stride(name);
    }
    return idx;
  }

  std::size_t value_of(std::size_t flat_index, std::string_view name) const {
    return (flat_index / stride(name)) % dimension(name);
  }

  Complex amplitude(const BasisState& basis) const { return amplitudes_[index_of(basis)]; }
  void set_amplitude(const BasisState& basis, Complex value) { amplitudes_[index_of(basis)] = value; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return s;
  }

  void normalize() {
    const double n = std::sqrt(norm_squared());
    if (n == 0.0) throw Error(ErrorCode::InvalidInput, "cannot normalize the zero vector");
    for (auto& a : amplitudes_) a /= n;
  }

  /// Register dimensions in layout order; two states have the same shape iff these agree.
  std::vector<std::size_t> shape() const {
    std::vector<std::size_t> dims;
    for (const auto& r : layout_) dims.push_back(r.dimension());
    return dims;
  }

  /// Appends a register in |0> as the new least significant register.
  StateVector append_register(Register r) const {
    std::vector<Register> layout = layout_;
    const std::size_t dim = r.dimension();
    layout.push_back(std::move(r));
    std::vector<Complex> amps(amplitudes_.size() * dim, Complex{0.0, 0.0});
    for (std::size_t k = 0; k < amplitudes_.size(); ++k) amps[k * dim] = amplitudes_[k];
    return StateVector(std::move(layout), std::move(amps));
  }

  /// Removes a register that is disentangled in |0>. Mass outside |0> above `tolerance`
  /// is a contract violation.
  StateVector drop_register(std::string_view name, double tolerance = 1e-10) const {
    const std::size_t pos = position(name);
    const std::size_t str = stride(name);
    const std::size_t dim = dimension(name);
    double leaked = 0.0;
    std::vector<Complex> amps;
    amps.reserve(amplitudes_.size() / dim);
    for (std::size_t k = 0; k < amplitudes_.size(); ++k) {
      if ((k / str) % dim == 0)
        amps.push_back(amplitudes_[k]);
      else
        leaked += std::norm(amplitudes_[k]);
    }
    if (leaked > tolerance)
      throw Error(ErrorCode::ContractViolation,
                  "register '" + std::string(name) + "' is not disentangled in |0>");
    std::vector<Register> layout = layout_;
    layout.erase(layout.begin() + static_cast<std::ptrdiff_t>(pos));
    return StateVector(std::move(layout), std::move(amps));
  }

  /// Probability mass on basis states where register `name` is not 0.
  double mass_outside_zero(std::string_view name) const {
    const std::size_t str = stride(name);
    const std::size_t dim = dimension(name);
    double m = 0.0;
    for (std::size_t k = 0; k < amplitudes_.size(); ++k)
      if ((k / str) % dim != 0) m += std::norm(amplitudes_[k]);
    return m;
  }

  /**
   * Applies `fn(in, out)` to every slice spanned by `names`, one slice per
   * assignment of the remaining registers. Slice indices combine the named
   * registers in the order given, the first one most significant. `out` is
   * zero-initialised and has the same length as `in`.
   */
  template <class Fn>
  void transform(std::initializer_list<std::string_view> names, Fn&& fn) {
    transform(std::vector<std::string_view>(names), std::forward<Fn>(fn));
  }

  template <class Fn>
  void transform(const std::vector<std::string_view>& names, Fn&& fn) {
    const auto sub = slice_offsets(names);
    const auto bases = context_offsets(names);
    std::vector<Complex> in(sub.size()), out(sub.size());
    for (std::size_t base : bases) {
      for (std::size_t s = 0; s < sub.size(); ++s) in[s] = amplitudes_[base + sub[s]];
      std::fill(out.begin(), out.end(), Complex{0.0, 0.0});
      fn(std::span<const Complex>(in), std::span<Complex>(out));
      for (std::size_t s = 0; s < sub.size(); ++s) amplitudes_[base + sub[s]] = out[s];
    }
  }

  /// Exact joint marginal distribution of the named registers (first name most significant).
  std::vector<double> marginal(const std::vector<std::string_view>& names) const {
    const auto sub = slice_offsets(names);
    const auto bases = context_offsets(names);
    std::vector<double> p(sub.size(), 0.0);
    for (std::size_t base : bases)
      for (std::size_t s = 0; s < sub.size(); ++s) p[s] += std::norm(amplitudes_[base + sub[s]]);
    return p;
  }

  /// Flat offsets of each value of the joint named registers, with others at 0.
  std::vector<std::size_t> slice_offsets(const std::vector<std::string_view>& names) const {
    std::vector<std::size_t> offsets{0};
    for (auto name : names) {
      const std::size_t dim = dimension(name);
      const std::size_t str = stride(name);
      std::vector<std::size_t> next;
      next.reserve(offsets.size() * dim);
      for (std::size_t o : offsets)
        for (std::size_t v = 0; v < dim; ++v) next.push_back(o + v * str);
      offsets = std::move(next);
    }
    return offsets;
  }

  /// Flat offsets of each assignment of the registers not in `names`.
  std::vector<std::size_t> context_offsets(const std::vector<std::string_view>& names) const {
    std::vector<std::string_view> rest;
    for (const auto& r : layout_)
      if (std::find(names.begin(), names.end(), std::string_view(r.name)) == names.end())
        rest.push_back(r.name);
    return slice_offsets(rest);
  }

 private:
  std::size_t total_size() const {
    std::size_t n = 1;
    for (const auto& r : layout_) n *= r.dimension();
    return n;
  }

  void check_names() const {
    for (std::size_t a = 0; a < layout_.size(); ++a)
      for (std::size_t b = a + 1; b < layout_.size(); ++b)
        if (layout_[a].name == layout_[b].name)
          throw Error(ErrorCode::InvalidInput, "duplicate register name '" + layout_[a].name + "'");
  }

  std::vector<Register> layout_;
  std::vector<Complex> amplitudes_;
};

/// <a|b>, conjugate-linear in the first argument.
inline Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.shape() != b.shape())
    throw Error(ErrorCode::DimensionMismatch, "states have different register shapes");
  Complex s{0.0, 0.0};
  const auto x = a.amplitudes();
  const auto y = b.amplitudes();
  for (std::size_t k = 0; k < x.size(); ++k) s += std::conj(x[k]) * y[k];
  return s;
}

/// |<a|b>| for normalised states, clamped to [0, 1]; insensitive to global phase.
inline double fidelity(const StateVector& a, const StateVector& b) {
  return std::clamp(std::abs(inner_product(a, b)), 0.0, 1.0);
}

inline double max_abs_difference(const StateVector& a, const StateVector& b) {
  if (a.shape() != b.shape())
    throw Error(ErrorCode::DimensionMismatch, "states have different register shapes");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    m = std::max(m, std::abs(a.amplitudes()[k] - b.amplitudes()[k]));
  return m;
}

}  // namespace qpca
