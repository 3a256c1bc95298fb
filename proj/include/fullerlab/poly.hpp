#pragma once

#include "fullerlab/rational.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace fullerlab {

using ExponentVec = std::vector<uint32_t>;

/// Graded lexicographic order: lower total degree first, ties broken
/// lexicographically. Canonical term order for all serialization.
struct GrlexLess {
    bool operator()(const ExponentVec& a, const ExponentVec& b) const;
};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms map exponent vectors (one entry per variable) to nonzero
/// coefficients; zero coefficients are never stored, so is_zero() and
/// operator== are exact. Immutable in spirit: all operations return
/// new values.
class Poly {
public:
    using TermMap = std::map<ExponentVec, Rational, GrlexLess>;

    explicit Poly(int nvars = 0) : nvars_(nvars) {}

    static Poly constant(int nvars, const Rational& c);
    static Poly variable(int nvars, int index);
    static Poly monomial(int nvars, const ExponentVec& exps, const Rational& c);

    int nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    /// Constant term; the whole value when is_constant().
    Rational constant_value() const;
    int total_degree() const; // -1 for the zero polynomial
    size_t term_count() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    friend Poly operator+(Poly a, const Poly& b) { a += b; return a; }
    friend Poly operator-(Poly a, const Poly& b) { a -= b; return a; }
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly scaled(const Rational& c) const;

    bool operator==(const Poly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    /// Exact partial derivative with respect to variable `index`.
    Poly partial(int index) const;

    Rational eval(std::span<const Rational> point) const;
    double eval(std::span<const double> point) const;

    /// Substitutes exact values for the given variables; the variable space
    /// is unchanged (substituted variables simply no longer occur).
    Poly substitute(const std::map<int, Rational>& values) const;

    /// Re-embeds into a larger variable space: old variable i becomes
    /// variable i + offset of an `new_nvars`-variable polynomial.
    Poly lift(int new_nvars, int offset) const;

    /// Text form, e.g. "x0^2 - 1/2 * x1 + 3". Canonical: terms in
    /// descending graded-lex order; round-trips exactly through from_text.
    std::string to_text() const;
    static Poly from_text(const std::string& text, int nvars);

    void add_term(const ExponentVec& exps, const Rational& c);

private:
    int nvars_;
    TermMap terms_;
};

Poly operator*(const Rational& c, const Poly& p);

/// Tuple of polynomials sharing one variable space; represents a polynomial
/// vector field when dim equals nvars (plus drift components otherwise).
struct PolyVec {
    int dim = 0;
    std::vector<Poly> entries;

    PolyVec() = default;
    PolyVec(int dim_, int nvars);
    explicit PolyVec(std::vector<Poly> e);

    int nvars() const { return entries.empty() ? 0 : entries.front().nvars(); }
    bool is_zero() const;
    const Poly& operator[](int i) const { return entries[static_cast<size_t>(i)]; }
    Poly& operator[](int i) { return entries[static_cast<size_t>(i)]; }

    PolyVec operator-() const;
    friend PolyVec operator+(const PolyVec& a, const PolyVec& b);
    friend PolyVec operator-(const PolyVec& a, const PolyVec& b);
    PolyVec scaled(const Rational& c) const;
    bool operator==(const PolyVec& o) const { return dim == o.dim && entries == o.entries; }

    std::vector<Rational> eval(std::span<const Rational> point) const;
    std::vector<double> eval(std::span<const double> point) const;

    PolyVec lift(int new_nvars, int offset) const;

    void check_consistent() const;
};

} // namespace fullerlab
