#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace dce {

using Complex = std::complex<double>;
using ModeMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

// Truncation of the joint cavity (x) mechanics space. Photon numbers run over
// 0..n_c-1 and phonon numbers over 0..n_m-1. Basis ordering is cavity-major:
// |n,k> lives at index n*n_m + k. Nothing else in the project re-derives it.
struct SpaceDims {
    int n_c = 2;
    int n_m = 2;

    SpaceDims() = default;
    SpaceDims(int cavity, int mechanics);

    int joint() const noexcept { return n_c * n_m; }
    int index(int n, int k) const;
    int photon_of(int index) const noexcept { return index / n_m; }
    int phonon_of(int index) const noexcept { return index % n_m; }

    friend bool operator==(const SpaceDims&, const SpaceDims&) = default;
};

// Dense operator on the joint space.
class Operator {
public:
    Operator() = default;
    explicit Operator(SpaceDims dims);
    Operator(SpaceDims dims, Eigen::MatrixXcd entries);

    static Operator zero(SpaceDims dims);
    static Operator identity(SpaceDims dims);

    const SpaceDims& dims() const noexcept { return dims_; }
    const Eigen::MatrixXcd& mat() const noexcept { return entries_; }
    Eigen::MatrixXcd& mat() noexcept { return entries_; }

    Complex operator()(int row, int col) const { return entries_(row, col); }
    Complex element(int n_row, int k_row, int n_col, int k_col) const;

    Operator& operator+=(const Operator& rhs);
    Operator& operator-=(const Operator& rhs);
    Operator& operator*=(Complex s);

    friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
    friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
    friend Operator operator*(Operator lhs, Complex s) { return lhs *= s; }
    friend Operator operator*(Complex s, Operator rhs) { return rhs *= s; }
    friend Operator operator*(const Operator& lhs, const Operator& rhs);

    // ||X - X^dagger|| in the Frobenius norm.
    double hermiticity_defect() const;

private:
    SpaceDims dims_{};
    Eigen::MatrixXcd entries_;
};

ModeMatrix annihilation(int dim);
ModeMatrix creation(int dim);
ModeMatrix number_matrix(int dim);
ModeMatrix mode_identity(int dim);

Operator dagger(const Operator& op);
ModeMatrix dagger(const ModeMatrix& op);

// Kronecker product A (x) B in cavity-major ordering. op_c must be n_c x n_c
// and op_m must be n_m x n_m.
Operator tensor(const ModeMatrix& op_c, const ModeMatrix& op_m, SpaceDims dims);
Operator tensor(const ModeMatrix& op_c, const ModeMatrix& op_m);

Operator commutator(const Operator& x, const Operator& y);

// Lifted single-mode ladder operators on the joint space.
Operator cavity_lowering(SpaceDims dims);
Operator mechanics_lowering(SpaceDims dims);
Operator photon_number(SpaceDims dims);
Operator phonon_number(SpaceDims dims);
// (-1)^{a^dagger a} (x) I
Operator photon_parity(SpaceDims dims);

StateVector basis_state(SpaceDims dims, int n, int k);

}  // namespace dce
