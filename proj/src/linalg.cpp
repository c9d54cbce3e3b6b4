#include "recest/linalg.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "recest/errors.hpp"

namespace recest {

ParamVec::ParamVec(int dim, double fill) {
    if (dim < 0) throw std::invalid_argument("ParamVec: negative dimension");
    v_.assign(static_cast<std::size_t>(dim), fill);
}

ParamVec::ParamVec(std::initializer_list<double> entries) : v_(entries) {}

double ParamVec::scalar() const {
    if (dim() != 1) throw std::logic_error("ParamVec::scalar: dimension != 1");
    return v_[0];
}

double ParamVec::norm() const {
    double s = 0.0;
    for (double x : v_) s += x * x;
    return std::sqrt(s);
}

double ParamVec::inf_norm() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

bool ParamVec::all_finite() const {
    for (double x : v_)
        if (!std::isfinite(x)) return false;
    return true;
}

ParamVec& ParamVec::operator+=(const ParamVec& rhs) {
    if (dim() != rhs.dim()) throw std::invalid_argument("ParamVec: dimension mismatch");
    for (int i = 0; i < dim(); ++i) v_[static_cast<std::size_t>(i)] += rhs[i];
    return *this;
}

ParamVec& ParamVec::operator-=(const ParamVec& rhs) {
    if (dim() != rhs.dim()) throw std::invalid_argument("ParamVec: dimension mismatch");
    for (int i = 0; i < dim(); ++i) v_[static_cast<std::size_t>(i)] -= rhs[i];
    return *this;
}

ParamVec& ParamVec::operator*=(double s) {
    for (double& x : v_) x *= s;
    return *this;
}

ParamVec operator+(ParamVec lhs, const ParamVec& rhs) { return lhs += rhs; }
ParamVec operator-(ParamVec lhs, const ParamVec& rhs) { return lhs -= rhs; }
ParamVec operator*(double s, ParamVec v) { return v *= s; }

double dot(const ParamVec& a, const ParamVec& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

SquareMatrix::SquareMatrix(int n, double fill) : n_(n) {
    if (n < 0) throw std::invalid_argument("SquareMatrix: negative dimension");
    a_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill);
}

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    n_ = static_cast<int>(rows.size());
    a_.reserve(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_));
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != n_)
            throw std::invalid_argument("SquareMatrix: ragged initializer");
        for (double x : row) a_.push_back(x);
    }
}

SquareMatrix SquareMatrix::identity(int n) {
    SquareMatrix m(n, 0.0);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double SquareMatrix::scalar() const {
    if (n_ != 1) throw std::logic_error("SquareMatrix::scalar: dimension != 1");
    return a_[0];
}

ParamVec SquareMatrix::apply(const ParamVec& x) const {
    if (x.dim() != n_) throw std::invalid_argument("SquareMatrix::apply: dimension mismatch");
    ParamVec y(n_);
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

SquareMatrix SquareMatrix::multiply(const SquareMatrix& rhs) const {
    if (rhs.n_ != n_) throw std::invalid_argument("SquareMatrix::multiply: dimension mismatch");
    SquareMatrix out(n_);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n_; ++j) out(i, j) += aik * rhs(k, j);
        }
    return out;
}

SquareMatrix SquareMatrix::transpose() const {
    SquareMatrix out(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

double SquareMatrix::trace() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += (*this)(i, i);
    return s;
}

double SquareMatrix::inf_norm() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i) {
        double row = 0.0;
        for (int j = 0; j < n_; ++j) row += std::abs((*this)(i, j));
        m = std::max(m, row);
    }
    return m;
}

double SquareMatrix::max_abs() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
}

bool SquareMatrix::all_finite() const {
    for (double x : a_)
        if (!std::isfinite(x)) return false;
    return true;
}

bool SquareMatrix::is_symmetric() const {
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
}

SquareMatrix& SquareMatrix::operator+=(const SquareMatrix& rhs) {
    if (rhs.n_ != n_) throw std::invalid_argument("SquareMatrix: dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += rhs.a_[i];
    return *this;
}

SquareMatrix& SquareMatrix::operator*=(double s) {
    for (double& x : a_) x *= s;
    return *this;
}

SquareMatrix operator*(double s, SquareMatrix a) { return a *= s; }

std::optional<Inversion> try_invert(const SquareMatrix& a) {
    const int n = a.dim();
    if (n < 1) throw std::invalid_argument("invert: empty matrix");
    if (n > 8) throw std::invalid_argument("invert: dimension > 8 unsupported");

    const double scale = a.max_abs();
    const double pivot_floor = 1e-14 * scale;
    if (scale == 0.0 || !a.all_finite()) return std::nullopt;

    // Augmented [A | I], row-reduced in place with partial pivoting.
    SquareMatrix work = a;
    SquareMatrix inv = SquareMatrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot_row = col;
        double best = std::abs(work(col, col));
        for (int r = col + 1; r < n; ++r) {
            const double cand = std::abs(work(r, col));
            if (cand > best) {
                best = cand;
                pivot_row = r;
            }
        }
        if (best <= pivot_floor) return std::nullopt;
        if (pivot_row != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(work(col, j), work(pivot_row, j));
                std::swap(inv(col, j), inv(pivot_row, j));
            }
        }
        const double p = work(col, col);
        for (int j = 0; j < n; ++j) {
            work(col, j) /= p;
            inv(col, j) /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = work(r, col);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                work(r, j) -= f * work(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    if (!inv.all_finite()) return std::nullopt;

    Inversion result;
    result.condition_estimate = a.inf_norm() * inv.inf_norm();
    result.ill_conditioned = result.condition_estimate > 1e12;
    result.inverse = std::move(inv);
    return result;
}

Inversion invert(const SquareMatrix& a) {
    auto r = try_invert(a);
    if (!r) throw SingularMatrixError("invert: singular matrix");
    return *std::move(r);
}

} // namespace recest
