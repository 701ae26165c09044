#pragma once

#include "qpolar/qmath.hpp"

#include <cstdint>
#include <vector>

namespace qpc {

using BitVec = std::vector<std::uint8_t>;

bool is_power_of_two(std::size_t n);

/// x = u * G_N over GF(2), G_N = B_N F^{(x)n}: bit-reversal permutation then
/// the in-place XOR butterfly. O(N log N) bit operations. Self-inverse.
BitVec polar_encode(const BitVec& u);
void polar_encode_inplace(BitVec& u);

/// The same transform as a permutation of computational basis amplitudes:
/// |u> -> |u G_N>. Bit 1 of u is the most significant index bit.
Vector coherent_encode(const Vector& state, const Tolerances& tol = default_tols());

}  // namespace qpc
