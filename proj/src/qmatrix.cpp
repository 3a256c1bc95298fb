#include "fullerlab/qmatrix.hpp"

#include <stdexcept>

namespace fullerlab {

QMatrix QMatrix::identity(int n) {
    QMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = Rational(1);
    return m;
}

QMatrix QMatrix::from_rows(const std::vector<std::vector<Rational>>& rows_in) {
    if (rows_in.empty()) return {};
    QMatrix m(static_cast<int>(rows_in.size()), static_cast<int>(rows_in.front().size()));
    for (int r = 0; r < m.rows; ++r) {
        if (static_cast<int>(rows_in[static_cast<size_t>(r)].size()) != m.cols)
            throw std::invalid_argument("QMatrix: ragged rows");
        for (int c = 0; c < m.cols; ++c) m.at(r, c) = rows_in[static_cast<size_t>(r)][static_cast<size_t>(c)];
    }
    return m;
}

QMatrix QMatrix::transposed() const {
    QMatrix t(cols, rows);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) t.at(c, r) = at(r, c);
    return t;
}

QMatrix QMatrix::operator*(const QMatrix& o) const {
    if (cols != o.rows) throw std::invalid_argument("QMatrix: dimension mismatch in product");
    QMatrix p(rows, o.cols);
    for (int r = 0; r < rows; ++r)
        for (int k = 0; k < cols; ++k) {
            if (at(r, k).is_zero()) continue;
            for (int c = 0; c < o.cols; ++c) p.at(r, c) += at(r, k) * o.at(k, c);
        }
    return p;
}

QMatrix QMatrix::operator-() const {
    QMatrix m(*this);
    for (auto& v : m.data) v = -v;
    return m;
}

bool QMatrix::is_symmetric() const {
    if (rows != cols) return false;
    for (int r = 0; r < rows; ++r)
        for (int c = r + 1; c < cols; ++c)
            if (at(r, c) != at(c, r)) return false;
    return true;
}

namespace {

// Gaussian elimination over Q; returns rank. When `track` is non-null it
// accumulates row operations so the caller can read off the null space.
int eliminate(QMatrix& m, QMatrix* track) {
    int rank = 0;
    for (int col = 0; col < m.cols && rank < m.rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < m.rows; ++r)
            if (!m.at(r, col).is_zero()) { pivot = r; break; }
        if (pivot < 0) continue;
        if (pivot != rank) {
            for (int c = 0; c < m.cols; ++c) std::swap(m.at(pivot, c), m.at(rank, c));
            if (track)
                for (int c = 0; c < track->cols; ++c) std::swap(track->at(pivot, c), track->at(rank, c));
        }
        Rational inv = Rational(1) / m.at(rank, col);
        for (int c = 0; c < m.cols; ++c) m.at(rank, c) *= inv;
        if (track)
            for (int c = 0; c < track->cols; ++c) track->at(rank, c) *= inv;
        for (int r = 0; r < m.rows; ++r) {
            if (r == rank || m.at(r, col).is_zero()) continue;
            Rational factor = m.at(r, col);
            for (int c = 0; c < m.cols; ++c) m.at(r, c) -= factor * m.at(rank, c);
            if (track)
                for (int c = 0; c < track->cols; ++c) track->at(r, c) -= factor * track->at(rank, c);
        }
        ++rank;
    }
    return rank;
}

} // namespace

Rational QMatrix::determinant() const {
    if (rows != cols) throw std::invalid_argument("QMatrix: determinant of non-square matrix");
    QMatrix m(*this);
    Rational det(1);
    for (int col = 0; col < m.cols; ++col) {
        int pivot = -1;
        for (int r = col; r < m.rows; ++r)
            if (!m.at(r, col).is_zero()) { pivot = r; break; }
        if (pivot < 0) return Rational(0);
        if (pivot != col) {
            for (int c = 0; c < m.cols; ++c) std::swap(m.at(pivot, c), m.at(col, c));
            det = -det;
        }
        det *= m.at(col, col);
        Rational inv = Rational(1) / m.at(col, col);
        for (int r = col + 1; r < m.rows; ++r) {
            if (m.at(r, col).is_zero()) continue;
            Rational factor = m.at(r, col) * inv;
            for (int c = col; c < m.cols; ++c) m.at(r, c) -= factor * m.at(col, c);
        }
    }
    return det;
}

bool QMatrix::is_positive_definite() const {
    if (rows != cols || !is_symmetric()) return false;
    for (int k = 1; k <= rows; ++k) {
        QMatrix minor(k, k);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) minor.at(r, c) = at(r, c);
        if (minor.determinant().sign() <= 0) return false;
    }
    return true;
}

int QMatrix::rank() const {
    QMatrix m(*this);
    return eliminate(m, nullptr);
}

std::optional<std::vector<Rational>> QMatrix::left_nullvector() const {
    // Track row operations: track * original = reduced, so a zero row of the
    // reduced matrix exposes a combination v with v^T * original = 0.
    QMatrix m(*this);
    QMatrix track = QMatrix::identity(m.rows);
    int r = eliminate(m, &track);
    if (r != m.rows - 1) return std::nullopt;
    for (int row = 0; row < m.rows; ++row) {
        bool zero = true;
        for (int c = 0; c < m.cols; ++c)
            if (!m.at(row, c).is_zero()) { zero = false; break; }
        if (zero) {
            std::vector<Rational> v(static_cast<size_t>(track.cols));
            for (int c = 0; c < track.cols; ++c) v[static_cast<size_t>(c)] = track.at(row, c);
            return v;
        }
    }
    return std::nullopt;
}

} // namespace fullerlab
