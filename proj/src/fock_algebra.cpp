#include "dce/fock_algebra.hpp"

#include <cmath>
#include <string>

#include "dce/error.hpp"

namespace dce {

SpaceDims::SpaceDims(int cavity, int mechanics) : n_c(cavity), n_m(mechanics) {
    if (cavity < 2 || mechanics < 2) {
        throw DimensionError("truncation dimensions must be >= 2, got (" + std::to_string(cavity) + ", " +
                             std::to_string(mechanics) + ")");
    }
}

int SpaceDims::index(int n, int k) const {
    if (n < 0 || n >= n_c || k < 0 || k >= n_m) {
        throw DimensionError("basis label |" + std::to_string(n) + "," + std::to_string(k) +
                             "> outside truncation (" + std::to_string(n_c) + ", " + std::to_string(n_m) + ")");
    }
    return n * n_m + k;
}

Operator::Operator(SpaceDims dims) : dims_(dims), entries_(Eigen::MatrixXcd::Zero(dims.joint(), dims.joint())) {}

Operator::Operator(SpaceDims dims, Eigen::MatrixXcd entries) : dims_(dims), entries_(std::move(entries)) {
    if (entries_.rows() != dims_.joint() || entries_.cols() != dims_.joint()) {
        throw DimensionError("operator matrix is " + std::to_string(entries_.rows()) + "x" +
                             std::to_string(entries_.cols()) + " but joint dimension is " +
                             std::to_string(dims_.joint()));
    }
}

Operator Operator::zero(SpaceDims dims) { return Operator(dims); }

Operator Operator::identity(SpaceDims dims) {
    return Operator(dims, Eigen::MatrixXcd::Identity(dims.joint(), dims.joint()));
}

Complex Operator::element(int n_row, int k_row, int n_col, int k_col) const {
    return entries_(dims_.index(n_row, k_row), dims_.index(n_col, k_col));
}

namespace {
void require_same_dims(const SpaceDims& a, const SpaceDims& b) {
    if (!(a == b)) {
        throw DimensionError("operator dimension mismatch: (" + std::to_string(a.n_c) + ", " + std::to_string(a.n_m) +
                             ") vs (" + std::to_string(b.n_c) + ", " + std::to_string(b.n_m) + ")");
    }
}
}  // namespace

Operator& Operator::operator+=(const Operator& rhs) {
    require_same_dims(dims_, rhs.dims_);
    entries_ += rhs.entries_;
    return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
    require_same_dims(dims_, rhs.dims_);
    entries_ -= rhs.entries_;
    return *this;
}

Operator& Operator::operator*=(Complex s) {
    entries_ *= s;
    return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
    require_same_dims(lhs.dims_, rhs.dims_);
    return Operator(lhs.dims_, lhs.entries_ * rhs.entries_);
}

double Operator::hermiticity_defect() const { return (entries_ - entries_.adjoint()).norm(); }

ModeMatrix annihilation(int dim) {
    if (dim < 2) {
        throw DimensionError("single-mode dimension must be >= 2, got " + std::to_string(dim));
    }
    ModeMatrix a = ModeMatrix::Zero(dim, dim);
    for (int j = 0; j + 1 < dim; ++j) {
        a(j, j + 1) = std::sqrt(static_cast<double>(j + 1));
    }
    return a;
}

ModeMatrix creation(int dim) { return annihilation(dim).adjoint(); }

ModeMatrix number_matrix(int dim) {
    if (dim < 2) {
        throw DimensionError("single-mode dimension must be >= 2, got " + std::to_string(dim));
    }
    ModeMatrix n = ModeMatrix::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
        n(j, j) = static_cast<double>(j);
    }
    return n;
}

ModeMatrix mode_identity(int dim) { return ModeMatrix::Identity(dim, dim); }

Operator dagger(const Operator& op) { return Operator(op.dims(), op.mat().adjoint()); }

ModeMatrix dagger(const ModeMatrix& op) { return op.adjoint(); }

Operator tensor(const ModeMatrix& op_c, const ModeMatrix& op_m, SpaceDims dims) {
    if (op_c.rows() != dims.n_c || op_c.cols() != dims.n_c || op_m.rows() != dims.n_m || op_m.cols() != dims.n_m) {
        throw DimensionError("tensor factors " + std::to_string(op_c.rows()) + "x" + std::to_string(op_c.cols()) +
                             " and " + std::to_string(op_m.rows()) + "x" + std::to_string(op_m.cols()) +
                             " do not match dims (" + std::to_string(dims.n_c) + ", " + std::to_string(dims.n_m) +
                             ")");
    }
    Eigen::MatrixXcd out(dims.joint(), dims.joint());
    for (int n = 0; n < dims.n_c; ++n) {
        for (int np = 0; np < dims.n_c; ++np) {
            out.block(n * dims.n_m, np * dims.n_m, dims.n_m, dims.n_m) = op_c(n, np) * op_m;
        }
    }
    return Operator(dims, std::move(out));
}

Operator tensor(const ModeMatrix& op_c, const ModeMatrix& op_m) {
    return tensor(op_c, op_m, SpaceDims(static_cast<int>(op_c.rows()), static_cast<int>(op_m.rows())));
}

Operator commutator(const Operator& x, const Operator& y) { return x * y - y * x; }

Operator cavity_lowering(SpaceDims dims) { return tensor(annihilation(dims.n_c), mode_identity(dims.n_m), dims); }

Operator mechanics_lowering(SpaceDims dims) { return tensor(mode_identity(dims.n_c), annihilation(dims.n_m), dims); }

Operator photon_number(SpaceDims dims) { return tensor(number_matrix(dims.n_c), mode_identity(dims.n_m), dims); }

Operator phonon_number(SpaceDims dims) { return tensor(mode_identity(dims.n_c), number_matrix(dims.n_m), dims); }

Operator photon_parity(SpaceDims dims) {
    ModeMatrix p = ModeMatrix::Zero(dims.n_c, dims.n_c);
    for (int n = 0; n < dims.n_c; ++n) {
        p(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    }
    return tensor(p, mode_identity(dims.n_m), dims);
}

StateVector basis_state(SpaceDims dims, int n, int k) {
    StateVector v = StateVector::Zero(dims.joint());
    v(dims.index(n, k)) = 1.0;
    return v;
}

}  // namespace dce
