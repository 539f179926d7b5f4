// Exact scalar types and the Eigen glue shared by every module.
//
// All decision-relevant arithmetic is exact: integers are GMP mpz_class,
// rationals are GMP mpq_class (kept canonical: lowest terms, positive
// denominator). Dense vectors and matrices over these scalars are plain
// Eigen types; no floating point is used anywhere.

#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>

namespace Eigen {

template <>
struct NumTraits<mpz_class> : GenericNumTraits<mpz_class> {
    typedef mpz_class Real;
    typedef mpz_class NonInteger;
    typedef mpz_class Nested;
    static inline Real epsilon() { return 0; }
    static inline Real dummy_precision() { return 0; }
    static inline int digits10() { return 0; }
    enum {
        IsInteger = 1,
        IsSigned = 1,
        IsComplex = 0,
        RequireInitialization = 1,
        ReadCost = 6,
        AddCost = 30,
        MulCost = 50
    };
};

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
    typedef mpq_class Real;
    typedef mpq_class NonInteger;
    typedef mpq_class Nested;
    static inline Real epsilon() { return 0; }
    static inline Real dummy_precision() { return 0; }
    static inline int digits10() { return 0; }
    enum {
        IsInteger = 0,
        IsSigned = 1,
        IsComplex = 0,
        RequireInitialization = 1,
        ReadCost = 6,
        AddCost = 150,
        MulCost = 100
    };
};

}  // namespace Eigen

namespace vass {

using Int = mpz_class;
using Rat = mpq_class;

using IntVec = Eigen::Matrix<Int, Eigen::Dynamic, 1>;
using IntMat = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;
using RatVec = Eigen::Matrix<Rat, Eigen::Dynamic, 1>;
using RatMat = Eigen::Matrix<Rat, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

// Canonical rational from a possibly non-reduced pair.
inline Rat make_rat(Int num, Int den) {
    Rat r(std::move(num), std::move(den));
    r.canonicalize();
    return r;
}

inline Rat rat_of(const Int& n) { return Rat(n); }

// "p/q" in lowest terms, or just "p" for integers.
inline std::string rat_string(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

// Parses "p", "-p" or "p/q"; rejects q == 0 and garbage.
std::optional<Rat> parse_rat(const std::string& text);

inline bool fits_long(const Int& v) { return v.fits_slong_p(); }

inline long to_long(const Int& v) { return v.get_si(); }

// Lexicographic order on integer vectors; shorter vectors sort first.
inline bool lex_less(const IntVec& a, const IntVec& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (Index i = 0; i < a.size(); ++i) {
        if (a(i) != b(i)) return a(i) < b(i);
    }
    return false;
}

inline Int dot(const IntVec& a, const IntVec& b) { return a.dot(b); }

// n^T M n for a square matrix M.
inline Int quad_form(const IntMat& m, const IntVec& n) { return n.dot(m * n); }

inline Int ceil_div(const Int& a, const Int& b) {
    // b > 0 expected
    Int q, r;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Int ceil_rat(const Rat& r) { return ceil_div(r.get_num(), r.get_den()); }

std::string vec_string(const IntVec& v);

}  // namespace vass
