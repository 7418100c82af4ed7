#pragma once

// Exact arithmetic in the graded ring Z[G] with deg G = -2.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace zgkh {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

class Error : public std::runtime_error {
public:
    enum class Kind { Parse, Cap, Invariant, Precondition };
    Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

inline Error parse_error(const std::string& m) { return Error(Error::Kind::Parse, m); }
inline Error cap_error(const std::string& m) { return Error(Error::Kind::Cap, m); }
inline Error invariant_error(const std::string& m) { return Error(Error::Kind::Invariant, m); }
inline Error precondition_error(const std::string& m) { return Error(Error::Kind::Precondition, m); }

// c * G^k.  Zero is always stored as (0, 0).
struct GMonomial {
    Int coeff = 0;
    int power = 0;

    GMonomial() = default;
    GMonomial(Int c, int k = 0);

    bool is_zero() const { return coeff == 0; }
    bool is_unit() const { return power == 0 && (coeff == 1 || coeff == -1); }
    int degree() const { return -2 * power; }

    bool operator==(const GMonomial& o) const { return coeff == o.coeff && power == o.power; }
    bool operator!=(const GMonomial& o) const { return !(*this == o); }
    GMonomial operator-() const { return GMonomial(-coeff, power); }
};

GMonomial mono_mul(const GMonomial& a, const GMonomial& b);
// true iff x = d * m for a monomial m with integer coefficient
bool poly_divides_monomial(const GMonomial& d, const GMonomial& x);
// x / d, assuming poly_divides_monomial(d, x)
GMonomial mono_div(const GMonomial& x, const GMonomial& d);
// a + b for monomials of equal power (or either zero)
GMonomial mono_add(const GMonomial& a, const GMonomial& b);

std::string to_string(const GMonomial& m);
nlohmann::json to_json(const GMonomial& m);
GMonomial mono_from_json(const nlohmann::json& j);

nlohmann::json int_to_json(const Int& v);
Int int_from_json(const nlohmann::json& j);

class GPolynomial {
public:
    GPolynomial() = default;
    GPolynomial(const Int& c);
    GPolynomial(const GMonomial& m);
    explicit GPolynomial(std::vector<Int> coeffs);

    static GPolynomial G(int k = 1) { return GPolynomial(GMonomial(1, k)); }

    const std::vector<Int>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree_in_G() const { return static_cast<int>(c_.size()) - 1; }
    Int coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : Int(0); }
    // the single monomial if the polynomial is homogeneous
    std::optional<GMonomial> as_monomial() const;

    GPolynomial operator+(const GPolynomial& o) const;
    GPolynomial operator-(const GPolynomial& o) const;
    GPolynomial operator*(const GPolynomial& o) const;
    GPolynomial operator-() const;
    GPolynomial& operator+=(const GPolynomial& o) { return *this = *this + o; }
    GPolynomial& operator-=(const GPolynomial& o) { return *this = *this - o; }
    bool operator==(const GPolynomial& o) const { return c_ == o.c_; }
    bool operator!=(const GPolynomial& o) const { return c_ != o.c_; }

private:
    void trim();
    std::vector<Int> c_;
};

std::string to_string(const GPolynomial& p);

struct CoefficientSpec {
    enum class Mode { IntegersGZero, FieldPGraded, FieldGOne };
    Mode mode = Mode::IntegersGZero;
    int p = 0;  // 0 means the rationals

    static CoefficientSpec integers_g_zero() { return {Mode::IntegersGZero, 0}; }
    static CoefficientSpec field_graded(int p) { return {Mode::FieldPGraded, p}; }
    static CoefficientSpec field_g_one(int p) { return {Mode::FieldGOne, p}; }
};

std::string to_string(const CoefficientSpec& s);

// Image of a polynomial under the specialization.  FieldPGraded keeps G, so the
// result is again a polynomial; the other two modes give a constant polynomial.
// Coefficients mod p are represented in [0, p).  Rational results stay integral
// because the input is integral.
GPolynomial specialize(const GPolynomial& p, const CoefficientSpec& spec);

Int mod_floor(const Int& a, const Int& m);
bool is_prime(std::int64_t n);
// c = +-p^e for a prime p and e >= 1
bool is_prime_power(const Int& c);

}  // namespace zgkh
