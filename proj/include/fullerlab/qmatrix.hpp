#pragma once

#include "fullerlab/rational.hpp"

#include <optional>
#include <vector>

namespace fullerlab {

/// Dense matrix of exact rationals. Small sizes only; used for problem
/// contracts (symmetry, definiteness, invertibility) and exact linear
/// algebra at sample points.
struct QMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Rational> data; // row-major

    QMatrix() = default;
    QMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, Rational(0)) {}

    static QMatrix identity(int n);
    static QMatrix from_rows(const std::vector<std::vector<Rational>>& rows_in);

    Rational& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    const Rational& at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    bool operator==(const QMatrix& o) const {
        return rows == o.rows && cols == o.cols && data == o.data;
    }

    QMatrix transposed() const;
    QMatrix operator*(const QMatrix& o) const;
    QMatrix operator-() const;
    bool is_symmetric() const;

    /// Exact determinant (square matrices only), via fraction-free elimination.
    Rational determinant() const;

    /// Sylvester criterion on a symmetric matrix: all leading principal
    /// minors strictly positive.
    bool is_positive_definite() const;

    /// Exact rank over the rationals.
    int rank() const;

    /// One exact vector spanning the left null space, when its dimension is
    /// exactly one (i.e. rank == rows - 1). Components are not normalized.
    std::optional<std::vector<Rational>> left_nullvector() const;
};

} // namespace fullerlab
