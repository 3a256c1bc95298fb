#include "fullerlab/poly.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fullerlab {

bool GrlexLess::operator()(const ExponentVec& a, const ExponentVec& b) const {
    uint64_t da = std::accumulate(a.begin(), a.end(), uint64_t{0});
    uint64_t db = std::accumulate(b.begin(), b.end(), uint64_t{0});
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Poly Poly::constant(int nvars, const Rational& c) {
    Poly p(nvars);
    if (!c.is_zero()) p.terms_.emplace(ExponentVec(static_cast<size_t>(nvars), 0), c);
    return p;
}

Poly Poly::variable(int nvars, int index) {
    if (index < 0 || index >= nvars)
        throw std::invalid_argument("Poly::variable: index out of range");
    ExponentVec e(static_cast<size_t>(nvars), 0);
    e[static_cast<size_t>(index)] = 1;
    return monomial(nvars, e, Rational(1));
}

Poly Poly::monomial(int nvars, const ExponentVec& exps, const Rational& c) {
    if (static_cast<int>(exps.size()) != nvars)
        throw std::invalid_argument("Poly::monomial: exponent vector length mismatch");
    Poly p(nvars);
    if (!c.is_zero()) p.terms_.emplace(exps, c);
    return p;
}

void Poly::add_term(const ExponentVec& exps, const Rational& c) {
    if (static_cast<int>(exps.size()) != nvars_)
        throw std::invalid_argument("Poly::add_term: exponent vector length mismatch");
    if (c.is_zero()) return;
    auto it = terms_.find(exps);
    if (it == terms_.end()) {
        terms_.emplace(exps, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

bool Poly::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() > 1) return false;
    const auto& e = terms_.begin()->first;
    return std::all_of(e.begin(), e.end(), [](uint32_t x) { return x == 0; });
}

Rational Poly::constant_value() const {
    ExponentVec zero(static_cast<size_t>(nvars_), 0);
    auto it = terms_.find(zero);
    return it == terms_.end() ? Rational(0) : it->second;
}

int Poly::total_degree() const {
    if (terms_.empty()) return -1;
    // Grlex order: the last term has maximal total degree.
    const auto& e = terms_.rbegin()->first;
    return static_cast<int>(std::accumulate(e.begin(), e.end(), uint64_t{0}));
}

Poly Poly::operator-() const {
    Poly r(nvars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Poly& Poly::operator+=(const Poly& o) {
    if (nvars_ != o.nvars_) throw std::invalid_argument("Poly: variable-count mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    if (nvars_ != o.nvars_) throw std::invalid_argument("Poly: variable-count mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.nvars() != b.nvars()) throw std::invalid_argument("Poly: variable-count mismatch");
    Poly r(a.nvars());
    ExponentVec e(static_cast<size_t>(a.nvars()), 0);
    for (const auto& [ea, ca] : a.terms()) {
        for (const auto& [eb, cb] : b.terms()) {
            for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

Poly Poly::scaled(const Rational& c) const {
    Poly r(nvars_);
    if (c.is_zero()) return r;
    for (const auto& [e, v] : terms_) r.terms_.emplace(e, v * c);
    return r;
}

Poly operator*(const Rational& c, const Poly& p) { return p.scaled(c); }

Poly Poly::partial(int index) const {
    if (index < 0 || index >= nvars_)
        throw std::invalid_argument("Poly::partial: index out of range");
    Poly r(nvars_);
    for (const auto& [e, c] : terms_) {
        uint32_t k = e[static_cast<size_t>(index)];
        if (k == 0) continue;
        ExponentVec d(e);
        d[static_cast<size_t>(index)] = k - 1;
        r.add_term(d, c * Rational(static_cast<long>(k)));
    }
    return r;
}

Rational Poly::eval(std::span<const Rational> point) const {
    if (static_cast<int>(point.size()) != nvars_)
        throw std::invalid_argument("Poly::eval: point length mismatch");
    Rational acc(0);
    for (const auto& [e, c] : terms_) {
        Rational t(c);
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i]) t *= point[i].pow(e[i]);
        acc += t;
    }
    return acc;
}

double Poly::eval(std::span<const double> point) const {
    if (static_cast<int>(point.size()) != nvars_)
        throw std::invalid_argument("Poly::eval: point length mismatch");
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c.to_double();
        for (size_t i = 0; i < e.size(); ++i) {
            uint32_t k = e[i];
            double base = point[i];
            while (k) { // exponentiation by squaring on small exponents
                if (k & 1u) t *= base;
                base *= base;
                k >>= 1u;
            }
        }
        acc += t;
    }
    return acc;
}

Poly Poly::substitute(const std::map<int, Rational>& values) const {
    Poly r(nvars_);
    for (const auto& [e, c] : terms_) {
        Rational coeff(c);
        ExponentVec rest(e);
        for (const auto& [idx, val] : values) {
            uint32_t k = e[static_cast<size_t>(idx)];
            if (k) {
                coeff *= val.pow(k);
                rest[static_cast<size_t>(idx)] = 0;
            }
        }
        r.add_term(rest, coeff);
    }
    return r;
}

Poly Poly::lift(int new_nvars, int offset) const {
    if (offset < 0 || nvars_ + offset > new_nvars)
        throw std::invalid_argument("Poly::lift: offset out of range");
    Poly r(new_nvars);
    for (const auto& [e, c] : terms_) {
        ExponentVec le(static_cast<size_t>(new_nvars), 0);
        for (size_t i = 0; i < e.size(); ++i) le[i + static_cast<size_t>(offset)] = e[i];
        r.terms_.emplace(std::move(le), c);
    }
    return r;
}

std::string Poly::to_text() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    // Descending grlex, leading term first.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        Rational mag = c.abs();
        if (first) {
            if (c.sign() < 0) out << "-";
            first = false;
        } else {
            out << (c.sign() < 0 ? " - " : " + ");
        }
        bool has_vars = std::any_of(e.begin(), e.end(), [](uint32_t x) { return x != 0; });
        bool wrote_coeff = false;
        if (!has_vars || !mag.is_one()) {
            out << mag.str();
            wrote_coeff = true;
        }
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (wrote_coeff) out << " * ";
            wrote_coeff = true;
            out << "x" << i;
            if (e[i] > 1) out << "^" << e[i];
        }
    }
    return out.str();
}

namespace {

struct TextCursor {
    const std::string& s;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool consume(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    std::string integer_token() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw std::invalid_argument("Poly::from_text: expected integer at position " + std::to_string(start));
        return s.substr(start, pos - start);
    }
};

} // namespace

Poly Poly::from_text(const std::string& text, int nvars) {
    Poly result(nvars);
    TextCursor cur{text};
    if (cur.done()) throw std::invalid_argument("Poly::from_text: empty input");
    bool first = true;
    while (!cur.done()) {
        int sign = 1;
        if (cur.consume('+')) {
            if (first) throw std::invalid_argument("Poly::from_text: leading '+'");
        } else if (cur.consume('-')) {
            sign = -1;
        } else if (!first) {
            throw std::invalid_argument("Poly::from_text: expected '+' or '-' between terms");
        }
        first = false;

        Rational coeff(1);
        ExponentVec exps(static_cast<size_t>(nvars), 0);
        bool saw_factor = false;
        bool expect_factor = true;
        while (expect_factor) {
            char c = cur.peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string num = cur.integer_token();
                std::string den;
                if (cur.consume('/')) den = cur.integer_token();
                coeff *= den.empty() ? Rational::from_string(num)
                                     : Rational::from_string(num + "/" + den);
                saw_factor = true;
            } else if (c == 'x') {
                cur.consume('x');
                std::string idx = cur.integer_token();
                long vi = std::strtol(idx.c_str(), nullptr, 10);
                if (vi < 0 || vi >= nvars)
                    throw std::invalid_argument("Poly::from_text: variable x" + idx + " out of range");
                uint32_t e = 1;
                if (cur.consume('^')) {
                    std::string ex = cur.integer_token();
                    e = static_cast<uint32_t>(std::strtoul(ex.c_str(), nullptr, 10));
                }
                exps[static_cast<size_t>(vi)] += e;
                saw_factor = true;
            } else {
                throw std::invalid_argument("Poly::from_text: unexpected character '" + std::string(1, c) + "'");
            }
            expect_factor = cur.consume('*');
        }
        if (!saw_factor) throw std::invalid_argument("Poly::from_text: empty term");
        result.add_term(exps, sign < 0 ? -coeff : coeff);
    }
    return result;
}

PolyVec::PolyVec(int dim_, int nvars) : dim(dim_) {
    entries.assign(static_cast<size_t>(dim_), Poly(nvars));
}

PolyVec::PolyVec(std::vector<Poly> e) : dim(static_cast<int>(e.size())), entries(std::move(e)) {
    check_consistent();
}

void PolyVec::check_consistent() const {
    if (static_cast<int>(entries.size()) != dim)
        throw std::invalid_argument("PolyVec: entry count does not match dim");
    for (const auto& p : entries)
        if (p.nvars() != nvars())
            throw std::invalid_argument("PolyVec: entries disagree on variable count");
}

bool PolyVec::is_zero() const {
    return std::all_of(entries.begin(), entries.end(), [](const Poly& p) { return p.is_zero(); });
}

PolyVec PolyVec::operator-() const {
    PolyVec r(*this);
    for (auto& p : r.entries) p = -p;
    return r;
}

PolyVec operator+(const PolyVec& a, const PolyVec& b) {
    if (a.dim != b.dim) throw std::invalid_argument("PolyVec: dimension mismatch");
    PolyVec r(a);
    for (int i = 0; i < a.dim; ++i) r.entries[static_cast<size_t>(i)] += b.entries[static_cast<size_t>(i)];
    return r;
}

PolyVec operator-(const PolyVec& a, const PolyVec& b) {
    if (a.dim != b.dim) throw std::invalid_argument("PolyVec: dimension mismatch");
    PolyVec r(a);
    for (int i = 0; i < a.dim; ++i) r.entries[static_cast<size_t>(i)] -= b.entries[static_cast<size_t>(i)];
    return r;
}

PolyVec PolyVec::scaled(const Rational& c) const {
    PolyVec r(*this);
    for (auto& p : r.entries) p = p.scaled(c);
    return r;
}

std::vector<Rational> PolyVec::eval(std::span<const Rational> point) const {
    std::vector<Rational> v;
    v.reserve(entries.size());
    for (const auto& p : entries) v.push_back(p.eval(point));
    return v;
}

std::vector<double> PolyVec::eval(std::span<const double> point) const {
    std::vector<double> v;
    v.reserve(entries.size());
    for (const auto& p : entries) v.push_back(p.eval(point));
    return v;
}

PolyVec PolyVec::lift(int new_nvars, int offset) const {
    PolyVec r;
    r.dim = dim;
    r.entries.reserve(entries.size());
    for (const auto& p : entries) r.entries.push_back(p.lift(new_nvars, offset));
    return r;
}

} // namespace fullerlab
