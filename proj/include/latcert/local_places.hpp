#pragma once

// Decomposition groups of multiquadratic fields Q(sqrt(a_1), ..., sqrt(a_n))
// at all places of Q.  The group at a place is (Z/2)^d where d is the
// F_2-dimension of the span of the radicands in the local square-class group;
// cyclic means d <= 1.  Only {oo, 2} and the odd primes dividing a radicand
// can give d > 1: elsewhere every radicand is a unit and odd-prime units have
// a single nontrivial square class.

#include "latcert/common.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace latcert {

/// Jacobi symbol (a/n) for odd positive n, by quadratic reciprocity.
inline int jacobi_symbol(Int a, Int n)
{
    require(n > 0 && n % 2 != 0, "jacobi symbol needs odd positive modulus");
    a %= n;
    if (a < 0) a += n;
    int result = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            Int r = n % 8;
            if (r == 3 || r == 5) result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

struct Place {
    bool infinite = false;
    Int prime = 0;

    std::string str() const { return infinite ? "oo" : prime.str(); }
};

inline Place infinite_place() { return Place{true, 0}; }
inline Place finite_place(Int p) { return Place{false, std::move(p)}; }

namespace detail {

/// a = p^v * u with p coprime to u.
inline std::pair<long, Int> split_valuation(Int a, const Int& p)
{
    long v = 0;
    while (a % p == 0) {
        a /= p;
        ++v;
    }
    return {v, a};
}

inline Int mod_norm(const Int& a, const Int& m)
{
    Int r = a % m;
    if (r < 0) r += m;
    return r;
}

} // namespace detail

/// Is a a square in the completion at the given place?
inline bool is_local_square(const Int& a, const Place& place)
{
    require(a != 0, "local square test needs a nonzero argument");
    if (place.infinite) return a > 0;
    if (place.prime == 2) {
        auto [v, u] = detail::split_valuation(a, 2);
        return v % 2 == 0 && detail::mod_norm(u, 8) == 1;
    }
    auto [v, u] = detail::split_valuation(a, place.prime);
    return v % 2 == 0 && jacobi_symbol(u, place.prime) == 1;
}

/// Coordinates of a in the local square-class group, as F_2 bits.
/// oo: (sign); odd p: (v mod 2, nonresidue); 2: (v mod 2, u = +-3 mod 8, u = 3,5 mod 8).
inline std::vector<int> local_square_class(const Int& a, const Place& place)
{
    require(a != 0, "square class of zero is undefined");
    if (place.infinite) return {a < 0 ? 1 : 0};
    if (place.prime == 2) {
        auto [v, u] = detail::split_valuation(a, 2);
        Int u8 = detail::mod_norm(u, 8);
        int minus_bit = (u8 == 3 || u8 == 7) ? 1 : 0;
        int five_bit = (u8 == 3 || u8 == 5) ? 1 : 0;
        return {static_cast<int>(v % 2), minus_bit, five_bit};
    }
    auto [v, u] = detail::split_valuation(a, place.prime);
    return {static_cast<int>(v % 2), jacobi_symbol(u, place.prime) == -1 ? 1 : 0};
}

inline std::size_t f2_rank(std::vector<std::vector<int>> rows)
{
    std::size_t rank = 0;
    std::size_t cols = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < cols; ++c) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && rows[pivot][c] == 0) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != rank && rows[i][c])
                for (std::size_t j = 0; j < cols; ++j) rows[i][j] ^= rows[rank][j];
        ++rank;
    }
    return rank;
}

struct SquareFreeList {
    std::vector<Int> entries;
};

/// Prime factorization of |a| by trial division (entries are desk-sized).
inline std::vector<std::pair<Int, long>> factorize(Int a)
{
    std::vector<std::pair<Int, long>> factors;
    if (a < 0) a = -a;
    auto strip = [&](const Int& p) {
        long v = 0;
        while (a % p == 0) {
            a /= p;
            ++v;
        }
        if (v) factors.emplace_back(p, v);
    };
    strip(2);
    for (Int p = 3; p * p <= a; p += 2) strip(p);
    if (a > 1) factors.emplace_back(a, 1);
    return factors;
}

inline std::vector<Int> odd_prime_factors(const Int& a)
{
    std::vector<Int> primes;
    for (const auto& [p, v] : factorize(a))
        if (p != 2) primes.push_back(p);
    return primes;
}

/// Validate: nonzero square-free entries, not 1, multiplicatively independent
/// modulo squares (F_2 independence of sign-and-prime exponent vectors).
inline SquareFreeList make_square_free_list(std::vector<Int> entries)
{
    std::vector<Int> primes = {2};
    for (const Int& a : entries) {
        require(a != 0 && a != 1, "radicands must be nonzero and not 1");
        for (const auto& [p, v] : factorize(a)) {
            require(v <= 1, "radicand is not square-free");
            if (std::find(primes.begin(), primes.end(), p) == primes.end()) primes.push_back(p);
        }
    }
    std::sort(primes.begin(), primes.end());
    std::vector<std::vector<int>> vectors;
    for (const Int& a : entries) {
        std::vector<int> v(primes.size() + 1, 0);
        v[0] = a < 0 ? 1 : 0;
        Int abs_a = a < 0 ? -a : a;
        for (std::size_t i = 0; i < primes.size(); ++i)
            v[i + 1] = abs_a % primes[i] == 0 ? 1 : 0;
        vectors.push_back(std::move(v));
    }
    require(f2_rank(vectors) == entries.size(),
            "radicands are multiplicatively dependent modulo squares");
    return SquareFreeList{std::move(entries)};
}

struct PlaceReport {
    Place place;
    std::size_t local_square_class_dim = 0; // d
    Int decomposition_order = 1;            // 2^d
    bool cyclic = true;                     // d <= 1
};

struct DecompositionReport {
    std::vector<PlaceReport> places;
    bool all_cyclic = true;
};

/// Decomposition groups at every place where they can fail to be cyclic:
/// {oo, 2} and the odd primes dividing a radicand.
inline DecompositionReport decomposition_report(const SquareFreeList& l)
{
    std::vector<Place> places = {infinite_place(), finite_place(2)};
    {
        std::vector<Int> odd;
        for (const Int& a : l.entries)
            for (const Int& p : odd_prime_factors(a)) odd.push_back(p);
        std::sort(odd.begin(), odd.end());
        odd.erase(std::unique(odd.begin(), odd.end()), odd.end());
        for (Int& p : odd) places.push_back(finite_place(std::move(p)));
    }
    DecompositionReport rep;
    for (const Place& v : places) {
        std::vector<std::vector<int>> coords;
        for (const Int& a : l.entries) coords.push_back(local_square_class(a, v));
        PlaceReport pr;
        pr.place = v;
        pr.local_square_class_dim = f2_rank(coords);
        pr.decomposition_order = Int(1) << pr.local_square_class_dim;
        pr.cyclic = pr.local_square_class_dim <= 1;
        if (!pr.cyclic) rep.all_cyclic = false;
        rep.places.push_back(std::move(pr));
    }
    return rep;
}

} // namespace latcert
