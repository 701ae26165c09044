#include "qpolar/encoding.hpp"

#include <bit>

namespace qpc {

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

namespace {

std::size_t bit_reverse(std::size_t v, int bits) {
    std::size_t out = 0;
    for (int k = 0; k < bits; ++k) {
        out = (out << 1) | (v & 1);
        v >>= 1;
    }
    return out;
}

}  // namespace

void polar_encode_inplace(BitVec& u) {
    const std::size_t n = u.size();
    if (!is_power_of_two(n))
        throw DimensionError("polar_encode: length must be a power of two");
    const int bits = std::countr_zero(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = bit_reverse(i, bits);
        if (j > i) std::swap(u[i], u[j]);
    }
    for (std::size_t h = 1; h < n; h <<= 1)
        for (std::size_t i = 0; i < n; i += 2 * h)
            for (std::size_t j = i; j < i + h; ++j) u[j] ^= u[j + h];
}

BitVec polar_encode(const BitVec& u) {
    BitVec x = u;
    polar_encode_inplace(x);
    return x;
}

Vector coherent_encode(const Vector& state, const Tolerances& tol) {
    const std::size_t dim = state.size();
    if (!is_power_of_two(dim))
        throw DimensionError("coherent_encode: dimension must be a power of two");
    const int n = std::countr_zero(dim);
    // state-vector cap: 2^12 amplitudes
    if (n > 12 || dim > static_cast<std::size_t>(tol.entries_cap))
        throw ResourceError("coherent_encode: state too large");

    Vector out = Vector::Zero(dim);
    BitVec u(n);
    for (std::size_t idx = 0; idx < dim; ++idx) {
        for (int k = 0; k < n; ++k) u[k] = (idx >> (n - 1 - k)) & 1;  // u_1 = MSB
        polar_encode_inplace(u);
        std::size_t tgt = 0;
        for (int k = 0; k < n; ++k) tgt = (tgt << 1) | u[k];
        out[tgt] = state[idx];
    }
    return out;
}

}  // namespace qpc
