#pragma once

#include <initializer_list>
#include <optional>
#include <vector>

namespace recest {

/// Dense parameter vector. Dimension is fixed at construction and small
/// (the recursion engine supports m <= 8).
class ParamVec {
public:
    ParamVec() = default;
    explicit ParamVec(int dim, double fill = 0.0);
    ParamVec(std::initializer_list<double> entries);

    int dim() const noexcept { return static_cast<int>(v_.size()); }
    double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }

    /// Value of a one-dimensional vector; throws otherwise.
    double scalar() const;

    double norm() const;     // Euclidean
    double inf_norm() const;
    bool all_finite() const;

    ParamVec& operator+=(const ParamVec& rhs);
    ParamVec& operator-=(const ParamVec& rhs);
    ParamVec& operator*=(double s);

    const std::vector<double>& entries() const noexcept { return v_; }

private:
    std::vector<double> v_;
};

ParamVec operator+(ParamVec lhs, const ParamVec& rhs);
ParamVec operator-(ParamVec lhs, const ParamVec& rhs);
ParamVec operator*(double s, ParamVec v);
double dot(const ParamVec& a, const ParamVec& b);

/// Dense m-by-m matrix, row major.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n, double fill = 0.0);
    SquareMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SquareMatrix identity(int n);

    int dim() const noexcept { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * n_ + j)]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }

    /// Value of a 1x1 matrix; throws otherwise.
    double scalar() const;

    ParamVec apply(const ParamVec& x) const;
    SquareMatrix multiply(const SquareMatrix& rhs) const;
    SquareMatrix transpose() const;

    double trace() const;
    double inf_norm() const;   // max absolute row sum
    double max_abs() const;
    bool all_finite() const;

    /// Exact check: true only when ||A - A^T||_inf == 0.
    bool is_symmetric() const;

    SquareMatrix& operator+=(const SquareMatrix& rhs);
    SquareMatrix& operator*=(double s);

private:
    int n_ = 0;
    std::vector<double> a_;
};

SquareMatrix operator*(double s, SquareMatrix a);

struct Inversion {
    SquareMatrix inverse;
    double condition_estimate = 0.0;  // ||A||_inf * ||A^-1||_inf
    bool ill_conditioned = false;     // condition_estimate > 1e12
};

/// Partial-pivot Gauss-Jordan inverse for m <= 8.
/// Returns nullopt when a pivot falls within 1e-14 of the matrix scale.
std::optional<Inversion> try_invert(const SquareMatrix& a);

/// Same as try_invert but throws SingularMatrixError instead of returning nullopt.
Inversion invert(const SquareMatrix& a);

} // namespace recest
