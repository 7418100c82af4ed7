#include "zgkh/zring.hpp"

#include <sstream>

namespace zgkh {

GMonomial::GMonomial(Int c, int k) : coeff(std::move(c)), power(k) {
    if (power < 0) throw precondition_error("negative power of G");
    if (coeff == 0) power = 0;
}

GMonomial mono_mul(const GMonomial& a, const GMonomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return GMonomial(a.coeff * b.coeff, a.power + b.power);
}

bool poly_divides_monomial(const GMonomial& d, const GMonomial& x) {
    if (d.is_zero()) return false;
    if (x.is_zero()) return true;
    if (x.power < d.power) return false;
    return x.coeff % d.coeff == 0;
}

GMonomial mono_div(const GMonomial& x, const GMonomial& d) {
    if (!poly_divides_monomial(d, x)) throw invariant_error("monomial division is not exact");
    if (x.is_zero()) return {};
    return GMonomial(x.coeff / d.coeff, x.power - d.power);
}

GMonomial mono_add(const GMonomial& a, const GMonomial& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.power != b.power) throw invariant_error("adding monomials of different degree");
    return GMonomial(a.coeff + b.coeff, a.power);
}

std::string to_string(const GMonomial& m) {
    std::ostringstream os;
    os << m.coeff << "*G^" << m.power;
    return os.str();
}

nlohmann::json int_to_json(const Int& v) {
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
        return static_cast<std::int64_t>(v);
    return v.str();
}

Int int_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Int(j.get<std::int64_t>());
    if (j.is_string()) return Int(j.get<std::string>());
    throw parse_error("expected an integer");
}

nlohmann::json to_json(const GMonomial& m) { return {{"c", int_to_json(m.coeff)}, {"k", m.power}}; }

GMonomial mono_from_json(const nlohmann::json& j) {
    return GMonomial(int_from_json(j.at("c")), j.at("k").get<int>());
}

GPolynomial::GPolynomial(const Int& c) {
    c_.push_back(c);
    trim();
}

GPolynomial::GPolynomial(const GMonomial& m) {
    if (m.is_zero()) return;
    c_.assign(m.power + 1, Int(0));
    c_[m.power] = m.coeff;
}

GPolynomial::GPolynomial(std::vector<Int> coeffs) : c_(std::move(coeffs)) { trim(); }

void GPolynomial::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

std::optional<GMonomial> GPolynomial::as_monomial() const {
    if (c_.empty()) return GMonomial();
    int nz = 0, at = 0;
    for (std::size_t k = 0; k < c_.size(); ++k)
        if (c_[k] != 0) ++nz, at = static_cast<int>(k);
    if (nz != 1) return std::nullopt;
    return GMonomial(c_[at], at);
}

GPolynomial GPolynomial::operator+(const GPolynomial& o) const {
    std::vector<Int> r(std::max(c_.size(), o.c_.size()), Int(0));
    for (std::size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
    for (std::size_t k = 0; k < o.c_.size(); ++k) r[k] += o.c_[k];
    return GPolynomial(std::move(r));
}

GPolynomial GPolynomial::operator-() const {
    std::vector<Int> r = c_;
    for (auto& x : r) x = -x;
    return GPolynomial(std::move(r));
}

GPolynomial GPolynomial::operator-(const GPolynomial& o) const { return *this + (-o); }

GPolynomial GPolynomial::operator*(const GPolynomial& o) const {
    if (is_zero() || o.is_zero()) return {};
    std::vector<Int> r(c_.size() + o.c_.size() - 1, Int(0));
    for (std::size_t a = 0; a < c_.size(); ++a) {
        if (c_[a] == 0) continue;
        for (std::size_t b = 0; b < o.c_.size(); ++b) r[a + b] += c_[a] * o.c_[b];
    }
    return GPolynomial(std::move(r));
}

std::string to_string(const GPolynomial& p) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = 0; k <= p.degree_in_G(); ++k) {
        Int c = p.coeff(k);
        if (c == 0) continue;
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        Int a = c < 0 ? Int(-c) : c;
        if (k == 0) os << a;
        else {
            if (a != 1) os << a << "*";
            os << "G";
            if (k > 1) os << "^" << k;
        }
        first = false;
    }
    return os.str();
}

std::string to_string(const CoefficientSpec& s) {
    std::string f = s.p == 0 ? "Q" : "F" + std::to_string(s.p);
    switch (s.mode) {
    case CoefficientSpec::Mode::IntegersGZero: return "Z[G=0]";
    case CoefficientSpec::Mode::FieldPGraded: return f + "[G]";
    case CoefficientSpec::Mode::FieldGOne: return f + "[G=1]";
    }
    return "?";
}

Int mod_floor(const Int& a, const Int& m) {
    Int r = a % m;
    if (r < 0) r += m;
    return r;
}

GPolynomial specialize(const GPolynomial& p, const CoefficientSpec& spec) {
    switch (spec.mode) {
    case CoefficientSpec::Mode::IntegersGZero: return GPolynomial(p.coeff(0));
    case CoefficientSpec::Mode::FieldGOne: {
        Int s = 0;
        for (const auto& c : p.coeffs()) s += c;
        if (spec.p != 0) s = mod_floor(s, spec.p);
        return GPolynomial(s);
    }
    case CoefficientSpec::Mode::FieldPGraded: {
        if (spec.p == 0) return p;
        std::vector<Int> r = p.coeffs();
        for (auto& c : r) c = mod_floor(c, spec.p);
        return GPolynomial(std::move(r));
    }
    }
    return p;
}

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

bool is_prime_power(const Int& c) {
    Int a = c < 0 ? Int(-c) : c;
    if (a < 2) return false;
    Int p = 2;
    while (p * p <= a && a % p != 0) ++p;
    if (a % p != 0) return true;  // a itself is prime
    while (a % p == 0) a /= p;
    return a == 1;
}

}  // namespace zgkh
