#include "qpolar/qmath.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace qpc {

const Tolerances& default_tols() {
    static const Tolerances tols{};
    return tols;
}

namespace {

void check_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols())
        throw DimensionError(std::string(what) + ": matrix is not square");
}

void check_dim_cap(std::int64_t dim, const Tolerances& tol) {
    if (dim > tol.dim_cap)
        throw ResourceError("operator dimension " + std::to_string(dim) +
                            " exceeds cap " + std::to_string(tol.dim_cap));
}

double max_abs(const Matrix& m) {
    return m.cwiseAbs().maxCoeff();
}

}  // namespace

DensityOperator::DensityOperator(Matrix m, Trust trust, const Tolerances& tol)
    : mat_(std::move(m)) {
    check_square(mat_, "DensityOperator");
    check_dim_cap(mat_.rows(), tol);
    if (!mat_.allFinite())
        throw DomainError("DensityOperator: non-finite entries");
    if (trust == Trust::Trusted) return;

    if (max_abs(mat_ - mat_.adjoint()) > tol.hermiticity)
        throw DomainError("DensityOperator: not Hermitian within tolerance");
    if (std::abs(mat_.trace().real() - 1.0) > tol.trace_one ||
        std::abs(mat_.trace().imag()) > tol.trace_one)
        throw DomainError("DensityOperator: trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < tol.psd_floor)
        throw DomainError("DensityOperator: negative eigenvalue beyond tolerance");
}

PureState::PureState(Vector amps, const Tolerances& tol) : amps_(std::move(amps)) {
    if (amps_.size() == 0) throw DimensionError("PureState: empty vector");
    if (!amps_.allFinite()) throw DomainError("PureState: non-finite amplitudes");
    if (std::abs(amps_.norm() - 1.0) > tol.unit_norm)
        throw DomainError("PureState: norm differs from 1");
}

Matrix tensor(const Matrix& a, const Matrix& b, const Tolerances& tol) {
    const std::int64_t rows = a.rows() * b.rows();
    const std::int64_t cols = a.cols() * b.cols();
    if (rows * cols > tol.entries_cap)
        throw ResourceError("tensor product would hold " + std::to_string(rows * cols) +
                            " entries, above cap " + std::to_string(tol.entries_cap));
    Matrix out(rows, cols);
    for (std::int64_t i = 0; i < a.rows(); ++i)
        for (std::int64_t j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b, const Tolerances& tol) {
    return DensityOperator(tensor(a.matrix(), b.matrix(), tol), DensityOperator::Trust::Trusted, tol);
}

Matrix partial_trace(const Matrix& m, const std::vector<std::int64_t>& dims,
                     const std::vector<std::int64_t>& keep) {
    check_square(m, "partial_trace");
    std::int64_t total = 1;
    for (auto d : dims) {
        if (d <= 0) throw DimensionError("partial_trace: nonpositive subsystem dim");
        total *= d;
    }
    if (total != m.rows())
        throw DimensionError("partial_trace: product of dims does not match operator dim");
    if (keep.empty()) throw DimensionError("partial_trace: keep set is empty");

    const std::size_t k = dims.size();
    std::vector<bool> kept(k, false);
    for (auto idx : keep) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= k)
            throw DimensionError("partial_trace: keep index out of range");
        if (kept[idx]) throw DimensionError("partial_trace: duplicate keep index");
        kept[idx] = true;
    }

    // strides for row-major subsystem ordering
    std::vector<std::int64_t> stride(k, 1);
    for (std::size_t i = k - 1; i > 0; --i) stride[i - 1] = stride[i] * dims[i];

    std::vector<std::int64_t> keep_dims, keep_stride, tr_dims, tr_stride;
    for (std::size_t i = 0; i < k; ++i) {
        if (kept[i]) {
            keep_dims.push_back(dims[i]);
            keep_stride.push_back(stride[i]);
        } else {
            tr_dims.push_back(dims[i]);
            tr_stride.push_back(stride[i]);
        }
    }
    std::int64_t dk = 1, dt = 1;
    for (auto d : keep_dims) dk *= d;
    for (auto d : tr_dims) dt *= d;

    // flat offsets for every kept / traced multi-index
    auto offsets = [](const std::vector<std::int64_t>& ds, const std::vector<std::int64_t>& ss,
                      std::int64_t count) {
        std::vector<std::int64_t> out(count, 0);
        for (std::int64_t flat = 0; flat < count; ++flat) {
            std::int64_t rem = flat, off = 0;
            for (std::size_t i = ds.size(); i-- > 0;) {
                off += (rem % ds[i]) * ss[i];
                rem /= ds[i];
            }
            out[flat] = off;
        }
        return out;
    };
    const auto keep_off = offsets(keep_dims, keep_stride, dk);
    const auto tr_off = offsets(tr_dims, tr_stride, dt);

    Matrix out = Matrix::Zero(dk, dk);
    for (std::int64_t r = 0; r < dk; ++r)
        for (std::int64_t c = 0; c < dk; ++c) {
            Complex acc = 0;
            for (std::int64_t t = 0; t < dt; ++t)
                acc += m(keep_off[r] + tr_off[t], keep_off[c] + tr_off[t]);
            out(r, c) = acc;
        }
    return out;
}

DensityOperator partial_trace(const DensityOperator& op, const std::vector<std::int64_t>& dims,
                              const std::vector<std::int64_t>& keep) {
    return DensityOperator(partial_trace(op.matrix(), dims, keep),
                           DensityOperator::Trust::Trusted);
}

Matrix matrix_sqrt(const Matrix& herm, const Tolerances& tol) {
    check_square(herm, "matrix_sqrt");
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    Eigen::VectorXd vals = es.eigenvalues();
    for (std::int64_t i = 0; i < vals.size(); ++i) {
        if (vals[i] < 0.0) {
            if (vals[i] < tol.psd_floor)
                throw DomainError("matrix_sqrt: operator not PSD within tolerance");
            vals[i] = 0.0;
        }
    }
    return es.eigenvectors() * vals.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

double trace_norm(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().sum();
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma, const Tolerances& tol) {
    if (rho.dim() != sigma.dim())
        throw DimensionError("fidelity: dimension mismatch");
    const Matrix prod = matrix_sqrt(rho.matrix(), tol) * matrix_sqrt(sigma.matrix(), tol);
    const double root = trace_norm(prod);
    return std::clamp(root * root, 0.0, 1.0);
}

std::vector<double> hermitian_eigenvalues(const Matrix& herm, const Tolerances& tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    std::vector<double> vals(es.eigenvalues().data(),
                             es.eigenvalues().data() + es.eigenvalues().size());
    for (auto& v : vals) {
        if (v < 0.0 && v >= tol.psd_floor) v = 0.0;
    }
    return vals;
}

double von_neumann_entropy(const DensityOperator& rho, const Tolerances& tol) {
    double h = 0.0;
    for (double lam : hermitian_eigenvalues(rho.matrix(), tol))
        if (lam > 0.0) h -= lam * std::log2(lam);
    return std::max(h, 0.0);
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
    if (rho.dim() != sigma.dim())
        throw DimensionError("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix() - sigma.matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

namespace {

/// Extend the first `r` orthonormal columns of `cols` (d x r) to a full
/// orthonormal basis by Gram-Schmidt against e_0, e_1, ... in order.
Matrix complete_basis(const Matrix& cols, std::int64_t d) {
    Matrix out(d, d);
    std::int64_t have = cols.cols();
    out.leftCols(have) = cols;
    for (std::int64_t e = 0; e < d && have < d; ++e) {
        Vector v = Vector::Zero(d);
        v[e] = 1.0;
        for (std::int64_t j = 0; j < have; ++j) v -= out.col(j).dot(v) * out.col(j);
        const double n = v.norm();
        if (n > 1e-8) {
            out.col(have++) = v / n;
        }
    }
    if (have != d) throw DomainError("uhlmann_isometry: basis completion failed");
    return out;
}

}  // namespace

UhlmannResult uhlmann_isometry(const PureState& psi, const PureState& phi,
                               const std::vector<std::int64_t>& dims, int acting_side,
                               const Tolerances& tol) {
    if (dims.size() != 2) throw DimensionError("uhlmann_isometry: need a bipartition");
    const std::int64_t d0 = dims[0], d1 = dims[1];
    if (d0 * d1 != psi.dim() || d0 * d1 != phi.dim())
        throw DimensionError("uhlmann_isometry: state dims do not match bipartition");
    if (acting_side != 0 && acting_side != 1)
        throw DimensionError("uhlmann_isometry: acting_side must be 0 or 1");

    // row-major reshape: |psi> = sum_{i,j} Psi(i,j) |i>|j>
    auto as_matrix = [&](const PureState& s) {
        Matrix m(d0, d1);
        for (std::int64_t i = 0; i < d0; ++i)
            for (std::int64_t j = 0; j < d1; ++j) m(i, j) = s.amplitudes()[i * d1 + j];
        return m;
    };
    const Matrix P = as_matrix(psi);
    const Matrix F = as_matrix(phi);

    // <phi|(V on side s)|psi> = Tr[A V] with A as below
    const Matrix A = (acting_side == 0) ? Matrix(P * F.adjoint())
                                        : Matrix(P.transpose() * F.conjugate());
    const std::int64_t d = A.rows();

    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv.maxCoeff() : 0.0;
    std::int64_t rank = 0;
    while (rank < sv.size() && sv[rank] > tol.rank_cut * std::max(1.0, smax)) ++rank;

    const Matrix U = complete_basis(svd.matrixU().leftCols(rank), d);
    const Matrix W = complete_basis(svd.matrixV().leftCols(rank), d);
    Matrix V = W * U.adjoint();

    const Complex achieved = (A * V).trace();
    return UhlmannResult{std::move(V), std::norm(achieved)};
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

namespace {

std::int64_t dims_product(const std::vector<std::int64_t>& dims) {
    std::int64_t total = 1;
    for (auto d : dims) {
        if (d <= 0) throw DimensionError("register dims must be positive");
        total *= d;
    }
    return total;
}

}  // namespace

Vector permute_registers(const Vector& state, const std::vector<std::int64_t>& dims,
                         const std::vector<std::size_t>& order) {
    const std::size_t k = dims.size();
    if (order.size() != k) throw DimensionError("permute_registers: order size mismatch");
    if (dims_product(dims) != state.size())
        throw DimensionError("permute_registers: dims do not match state");

    std::vector<std::int64_t> stride(k, 1);
    for (std::size_t i = k - 1; i > 0; --i) stride[i - 1] = stride[i] * dims[i];
    std::vector<std::int64_t> new_dims(k);
    for (std::size_t j = 0; j < k; ++j) new_dims[j] = dims[order[j]];

    Vector out(state.size());
    std::vector<std::int64_t> digits(k);
    for (std::int64_t idx = 0; idx < state.size(); ++idx) {
        std::int64_t rem = idx;
        for (std::size_t j = k; j-- > 0;) {
            digits[j] = rem % new_dims[j];
            rem /= new_dims[j];
        }
        std::int64_t src = 0;
        for (std::size_t j = 0; j < k; ++j) src += digits[j] * stride[order[j]];
        out[idx] = state[src];
    }
    return out;
}

Vector apply_to_register(const Vector& state, const std::vector<std::int64_t>& dims,
                         std::size_t target, const Matrix& op) {
    if (target >= dims.size()) throw DimensionError("apply_to_register: bad target");
    if (op.cols() != dims[target]) throw DimensionError("apply_to_register: op shape mismatch");
    if (dims_product(dims) != state.size())
        throw DimensionError("apply_to_register: dims do not match state");

    std::int64_t left = 1, right = 1;
    for (std::size_t i = 0; i < target; ++i) left *= dims[i];
    for (std::size_t i = target + 1; i < dims.size(); ++i) right *= dims[i];
    const std::int64_t din = op.cols(), dout = op.rows();

    Vector out = Vector::Zero(left * dout * right);
    for (std::int64_t l = 0; l < left; ++l)
        for (std::int64_t o = 0; o < dout; ++o)
            for (std::int64_t r = 0; r < right; ++r) {
                Complex acc = 0;
                for (std::int64_t i = 0; i < din; ++i)
                    acc += op(o, i) * state[(l * din + i) * right + r];
                out[(l * dout + o) * right + r] = acc;
            }
    return out;
}

Matrix reduced_state(const Vector& state, const std::vector<std::int64_t>& dims,
                     const std::vector<std::int64_t>& keep) {
    if (dims_product(dims) != state.size())
        throw DimensionError("reduced_state: dims do not match state");
    const std::size_t k = dims.size();
    std::vector<bool> kept(k, false);
    for (auto i : keep) {
        if (i < 0 || static_cast<std::size_t>(i) >= k)
            throw DimensionError("reduced_state: keep index out of range");
        kept[i] = true;
    }
    std::vector<std::int64_t> stride(k, 1);
    for (std::size_t i = k - 1; i > 0; --i) stride[i - 1] = stride[i] * dims[i];

    std::vector<std::int64_t> kdims, kstride, tdims, tstride;
    for (std::size_t i = 0; i < k; ++i) {
        (kept[i] ? kdims : tdims).push_back(dims[i]);
        (kept[i] ? kstride : tstride).push_back(stride[i]);
    }
    std::int64_t dk = 1, dt = 1;
    for (auto d : kdims) dk *= d;
    for (auto d : tdims) dt *= d;

    auto offsets = [](const std::vector<std::int64_t>& ds, const std::vector<std::int64_t>& ss,
                      std::int64_t count) {
        std::vector<std::int64_t> out(count, 0);
        for (std::int64_t flat = 0; flat < count; ++flat) {
            std::int64_t rem = flat, off = 0;
            for (std::size_t i = ds.size(); i-- > 0;) {
                off += (rem % ds[i]) * ss[i];
                rem /= ds[i];
            }
            out[flat] = off;
        }
        return out;
    };
    const auto koff = offsets(kdims, kstride, dk);
    const auto toff = offsets(tdims, tstride, dt);

    Matrix out = Matrix::Zero(dk, dk);
    for (std::int64_t t = 0; t < dt; ++t)
        for (std::int64_t r = 0; r < dk; ++r) {
            const Complex vr = state[koff[r] + toff[t]];
            if (vr == Complex(0, 0)) continue;
            for (std::int64_t c = 0; c < dk; ++c)
                out(r, c) += vr * std::conj(state[koff[c] + toff[t]]);
        }
    return out;
}

}  // namespace qpc
