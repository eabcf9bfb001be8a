#pragma once

// G-lattices: free Z-modules of finite rank with a finite group acting by
// unimodular matrices, the action stored on every group element.  Column
// convention throughout: vectors are columns, action(g) * v, and column j of
// action(g) is the image of the j-th basis vector.

#include "latcert/common.hpp"
#include "latcert/group.hpp"
#include "latcert/int_matrix.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace latcert {

struct GLattice {
    std::shared_ptr<const FiniteGroup> group;
    std::size_t rank = 0;
    std::vector<IntMatrix> action; // indexed by group element

    const IntMatrix& act(int g) const { return action[g]; }
};

/// Check that the assignment g -> action(g) is a group homomorphism, using
/// the relation set {x * s : x in G, s generator}; this implies the full
/// pairwise property once the generators generate.
inline void verify_action(const GLattice& m)
{
    const FiniteGroup& g = *m.group;
    verify(m.action.size() == g.order, "action table size mismatch");
    verify(m.action[g.identity].is_identity(), "action(identity) != identity");
    for (const auto& a : m.action)
        verify(a.rows() == m.rank && a.cols() == m.rank, "action matrix shape mismatch");
    std::vector<int> gens = g.generators;
    verify(generated_subgroup(g, gens).size() == g.order,
           "stored generators do not generate the group");
    for (std::size_t x = 0; x < g.order; ++x)
        for (int s : gens)
            verify(m.action[x] * m.action[s] == m.action[g.op(static_cast<int>(x), s)],
                   "action is not a homomorphism");
}

/// Build a lattice from matrices on the group generators, closing along the
/// group's own BFS structure and checking every relation encountered.
inline GLattice lattice_from_generator_matrices(std::shared_ptr<const FiniteGroup> group,
                                                const std::vector<IntMatrix>& gen_mats)
{
    const FiniteGroup& g = *group;
    require(gen_mats.size() == g.generators.size(),
            "one matrix per group generator required");
    std::size_t rank = gen_mats.empty() ? 0 : gen_mats[0].rows();
    for (const auto& a : gen_mats) {
        require(a.rows() == rank && a.cols() == rank, "generator matrices must be square, equal size");
        require(is_unimodular(a), "generator matrix is not unimodular");
    }
    GLattice m;
    m.group = std::move(group);
    m.rank = rank;
    m.action.assign(g.order, IntMatrix());
    std::vector<bool> known(g.order, false);
    m.action[g.identity] = IntMatrix::identity(rank);
    known[g.identity] = true;
    std::vector<int> queue = {g.identity};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        int x = queue[qi];
        for (std::size_t s = 0; s < g.generators.size(); ++s) {
            int y = g.op(x, g.generators[s]);
            IntMatrix prod = m.action[x] * gen_mats[s];
            if (!known[y]) {
                m.action[y] = std::move(prod);
                known[y] = true;
                queue.push_back(y);
            } else {
                require(m.action[y] == prod,
                        "generator matrices violate a group relation");
            }
        }
    }
    verify(std::all_of(known.begin(), known.end(), [](bool b) { return b; }),
           "generators do not generate the group");
    return m;
}

/// The rank-1 lattice with trivial action.
inline GLattice trivial_lattice(std::shared_ptr<const FiniteGroup> group, std::size_t rank = 1)
{
    GLattice m;
    m.group = std::move(group);
    m.rank = rank;
    m.action.assign(m.group->order, IntMatrix::identity(rank));
    return m;
}

/// Coset decomposition of G/H in element-enumeration order.
struct CosetTable {
    std::vector<int> reps;             // coset representatives
    std::vector<int> coset_of;         // element -> coset index
};

inline CosetTable coset_table(const FiniteGroup& g, const std::vector<int>& members)
{
    CosetTable t;
    t.coset_of.assign(g.order, -1);
    for (std::size_t e = 0; e < g.order; ++e) {
        if (t.coset_of[e] >= 0) continue;
        int c = static_cast<int>(t.reps.size());
        t.reps.push_back(static_cast<int>(e));
        for (int h : members) t.coset_of[g.op(static_cast<int>(e), h)] = c;
    }
    return t;
}

/// Permutation lattice Z[G/H] with left-translation action on cosets.
inline GLattice permutation_lattice(const std::shared_ptr<const FiniteGroup>& group,
                                    const Subgroup& h)
{
    require(h.parent.get() == group.get(), "subgroup belongs to a different group");
    const FiniteGroup& g = *group;
    CosetTable t = coset_table(g, h.members);
    std::size_t n = t.reps.size();
    GLattice m;
    m.group = group;
    m.rank = n;
    m.action.assign(g.order, IntMatrix(n, n));
    for (std::size_t a = 0; a < g.order; ++a)
        for (std::size_t j = 0; j < n; ++j)
            m.action[a].at(t.coset_of[g.op(static_cast<int>(a), t.reps[j])], j) = 1;
    return m;
}

inline GLattice regular_lattice(const std::shared_ptr<const FiniteGroup>& group)
{
    return permutation_lattice(group, trivial_subgroup(group));
}

inline bool is_permutation_matrix(const IntMatrix& a)
{
    if (a.rows() != a.cols()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::size_t ones = 0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (a.at(i, j) == 1) ++ones;
            else if (a.at(i, j) != 0) return false;
        }
        if (ones != 1) return false;
    }
    for (std::size_t j = 0; j < a.cols(); ++j) {
        std::size_t ones = 0;
        for (std::size_t i = 0; i < a.rows(); ++i)
            if (a.at(i, j) == 1) ++ones;
        if (ones != 1) return false;
    }
    return true;
}

inline bool acts_by_permutations(const GLattice& m)
{
    return std::all_of(m.action.begin(), m.action.end(), is_permutation_matrix);
}

/// Is the permutation action on basis indices transitive?
inline bool permutation_action_transitive(const GLattice& m)
{
    if (!acts_by_permutations(m)) return false;
    if (m.rank == 0) return false;
    std::vector<bool> seen(m.rank, false);
    seen[0] = true;
    std::vector<std::size_t> stack = {0};
    while (!stack.empty()) {
        std::size_t j = stack.back();
        stack.pop_back();
        for (const auto& a : m.action)
            for (std::size_t i = 0; i < m.rank; ++i)
                if (a.at(i, j) == 1 && !seen[i]) {
                    seen[i] = true;
                    stack.push_back(i);
                }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

/// Action induced on a G-stable sublattice given by basis columns K
/// (saturated or not; solutions must exist integrally, which is checked).
inline GLattice sublattice_action(const GLattice& m, const IntMatrix& basis)
{
    require(basis.rows() == m.rank, "sublattice basis has wrong ambient rank");
    GLattice s;
    s.group = m.group;
    s.rank = basis.cols();
    s.action.assign(m.group->order, IntMatrix());
    SmithDecomposition snf = smith_normal_form(basis);
    for (std::size_t g = 0; g < m.group->order; ++g) {
        IntMatrix img = m.action[g] * basis;
        IntMatrix x(basis.cols(), basis.cols());
        for (std::size_t j = 0; j < basis.cols(); ++j) {
            auto sol = solve_integer(snf, img.col(j));
            verify(sol.has_value(), "sublattice is not stable under the action");
            x.set_col(j, *sol);
        }
        s.action[g] = std::move(x);
    }
    verify_action(s);
    return s;
}

/// Quotient P/Z by the diagonal fixed vector of a transitive permutation
/// lattice.  Basis: images of the first rank-1 basis vectors; the last basis
/// vector maps to minus their sum.
inline GLattice augmentation_quotient(const GLattice& p)
{
    require(permutation_action_transitive(p), "input not a transitive permutation lattice");
    std::size_t n = p.rank;
    // The diagonal has coordinate gcd 1, so it is primitive and the quotient
    // is torsion-free.
    GLattice q;
    q.group = p.group;
    q.rank = n - 1;
    q.action.assign(p.group->order, IntMatrix(n - 1, n - 1));
    for (std::size_t g = 0; g < p.group->order; ++g) {
        for (std::size_t j = 0; j + 1 < n; ++j) {
            std::size_t img = 0;
            while (p.action[g].at(img, j) == 0) ++img;
            if (img + 1 < n) {
                q.action[g].at(img, j) = 1;
            } else {
                for (std::size_t i = 0; i + 1 < n; ++i) q.action[g].at(i, j) = -1;
            }
        }
    }
    verify_action(q);
    return q;
}

/// Augmentation kernel I = ker(P -> Z), with basis e_j - e_{n-1}.
inline GLattice augmentation_kernel(const GLattice& p)
{
    require(permutation_action_transitive(p), "input not a transitive permutation lattice");
    std::size_t n = p.rank;
    IntMatrix basis(n, n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        basis.at(j, j) = 1;
        basis.at(n - 1, j) = -1;
    }
    return sublattice_action(p, basis);
}

inline GLattice dual(const GLattice& m)
{
    GLattice d;
    d.group = m.group;
    d.rank = m.rank;
    d.action.assign(m.group->order, IntMatrix());
    for (std::size_t g = 0; g < m.group->order; ++g)
        d.action[g] = m.action[m.group->inverse[g]].transpose();
    return d;
}

inline GLattice direct_sum(const GLattice& a, const GLattice& b)
{
    require(a.group.get() == b.group.get(), "direct sum: group mismatch");
    GLattice s;
    s.group = a.group;
    s.rank = a.rank + b.rank;
    s.action.assign(a.group->order, IntMatrix());
    for (std::size_t g = 0; g < a.group->order; ++g)
        s.action[g] = IntMatrix::block_diag(a.action[g], b.action[g]);
    return s;
}

/// Restriction to a subgroup, realized over the subgroup's own group object.
inline GLattice restrict_lattice(const GLattice& m, const Subgroup& h)
{
    require(h.parent.get() == m.group.get(), "restrict: subgroup of a different group");
    GLattice r;
    r.group = subgroup_as_group(h);
    r.rank = m.rank;
    r.action.reserve(h.members.size());
    for (int e : h.members) r.action.push_back(m.action[e]);
    verify_action(r);
    return r;
}

/// Basis (columns) of the fixed sublattice M^H.  Saturated by construction.
inline IntMatrix fixed_sublattice_basis(const GLattice& m, const std::vector<int>& members)
{
    std::vector<int> gens = small_generating_set(*m.group, members);
    if (gens.empty()) return IntMatrix::identity(m.rank);
    IntMatrix stacked;
    for (int s : gens) {
        IntMatrix c = m.action[s] - IntMatrix::identity(m.rank);
        stacked = stacked.rows() == 0 && stacked.cols() == 0 ? c : IntMatrix::vstack(stacked, c);
    }
    return kernel_basis(stacked);
}

/// M^H as a lattice over H (which acts trivially on it).
inline GLattice fixed_sublattice(const GLattice& m, const Subgroup& h)
{
    require(h.parent.get() == m.group.get(), "fixed_sublattice: subgroup of a different group");
    IntMatrix basis = fixed_sublattice_basis(m, h.members);
    GLattice f;
    f.group = subgroup_as_group(h);
    f.rank = basis.cols();
    f.action.assign(f.group->order, IntMatrix::identity(basis.cols()));
    return f;
}

struct EquivariantMap {
    const GLattice* source = nullptr;
    const GLattice* target = nullptr;
    IntMatrix matrix; // target.rank x source.rank
};

inline bool equivariant(const GLattice& a, const GLattice& b, const IntMatrix& x)
{
    for (int s : a.group->generators)
        if (!(x * a.action[s] == b.action[s] * x)) return false;
    return true;
}

/// Z-basis of Hom_G(A, B), as the integer kernel of the stacked commutation
/// constraints on the group generators.
inline std::vector<IntMatrix> equivariant_hom_basis(const GLattice& a, const GLattice& b)
{
    require(a.group.get() == b.group.get(), "hom basis: group mismatch");
    const std::size_t ra = a.rank, rb = b.rank;
    const std::size_t nunk = ra * rb; // X[i][k], i < rb, k < ra
    std::vector<int> gens = a.group->generators;
    IntMatrix cons(gens.size() * rb * ra, nunk);
    std::size_t row = 0;
    for (int s : gens) {
        const IntMatrix& ag = a.action[s];
        const IntMatrix& bg = b.action[s];
        for (std::size_t i = 0; i < rb; ++i)
            for (std::size_t j = 0; j < ra; ++j) {
                // (X * ag - bg * X)(i, j) = 0
                for (std::size_t k = 0; k < ra; ++k)
                    if (ag.at(k, j) != 0) cons.at(row, i * ra + k) += ag.at(k, j);
                for (std::size_t k = 0; k < rb; ++k)
                    if (bg.at(i, k) != 0) cons.at(row, k * ra + j) -= bg.at(i, k);
                ++row;
            }
    }
    IntMatrix ker = nunk == 0 ? IntMatrix(0, 0) : kernel_basis(cons);
    std::vector<IntMatrix> basis;
    for (std::size_t c = 0; c < ker.cols(); ++c) {
        IntMatrix x(rb, ra);
        for (std::size_t i = 0; i < rb; ++i)
            for (std::size_t k = 0; k < ra; ++k) x.at(i, k) = ker.at(i * ra + k, c);
        basis.push_back(std::move(x));
    }
    return basis;
}

enum class IsoState : std::uint8_t { Isomorphic, NotIsomorphic, Unknown };

struct IsoVerdict {
    IsoState state = IsoState::Unknown;
    IntMatrix witness; // unimodular equivariant matrix when Isomorphic
    std::string reason;
};

struct IsoSearchParams {
    Int bound = 3;              // coefficient box for enumeration / sampling
    std::size_t random_trials = 2000;
    std::uint64_t seed = 1;
    std::size_t enumeration_cap = 200000; // max full-box candidates
};

namespace detail {

inline IntMatrix combine(const std::vector<IntMatrix>& basis, const std::vector<Int>& c)
{
    IntMatrix x(basis[0].rows(), basis[0].cols());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (c[i] == 0) continue;
        for (std::size_t r = 0; r < x.rows(); ++r)
            for (std::size_t s = 0; s < x.cols(); ++s)
                if (basis[i].at(r, s) != 0) x.at(r, s) += c[i] * basis[i].at(r, s);
    }
    return x;
}

} // namespace detail

/// Bounded search for a unimodular element in the span of the hom basis.
/// Honest semi-decision: failure means Unknown, never NotIsomorphic.
inline std::optional<IntMatrix> unimodular_in_span(const std::vector<IntMatrix>& basis,
                                                   const IsoSearchParams& p)
{
    if (basis.empty()) return std::nullopt;
    const std::size_t m = basis.size();
    auto good = [&](const std::vector<Int>& c) -> std::optional<IntMatrix> {
        IntMatrix x = detail::combine(basis, c);
        Int d = det(x);
        if (d == 1 || d == -1) return x;
        return std::nullopt;
    };

    // single basis elements
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<Int> c(m, 0);
        c[i] = 1;
        if (auto x = good(c)) return x;
    }

    // full box enumeration when affordable
    Int width = 2 * p.bound + 1;
    Int total = 1;
    bool enumerate = true;
    for (std::size_t i = 0; i < m; ++i) {
        total *= width;
        if (total > Int(p.enumeration_cap)) {
            enumerate = false;
            break;
        }
    }
    if (enumerate) {
        std::vector<Int> c(m, -p.bound);
        for (;;) {
            if (auto x = good(c)) return x;
            std::size_t i = 0;
            while (i < m && c[i] == p.bound) c[i++] = -p.bound;
            if (i == m) break;
            c[i] += 1;
        }
        return std::nullopt; // span exhausted within the box
    }

    // sparse +-1 combinations of small support
    const std::size_t max_support = std::min<std::size_t>(3, m);
    std::vector<std::size_t> idx;
    std::vector<std::size_t> comb(max_support);
    for (std::size_t sup = 2; sup <= max_support; ++sup) {
        std::vector<std::size_t> pick(sup);
        std::iota(pick.begin(), pick.end(), 0);
        for (;;) {
            for (std::uint64_t signs = 0; signs < (1ull << sup); ++signs) {
                std::vector<Int> c(m, 0);
                for (std::size_t t = 0; t < sup; ++t) c[pick[t]] = (signs >> t) & 1 ? -1 : 1;
                if (auto x = good(c)) return x;
            }
            std::size_t t = sup;
            while (t > 0 && pick[t - 1] == m - sup + t - 1) --t;
            if (t == 0) break;
            ++pick[t - 1];
            for (std::size_t u = t; u < sup; ++u) pick[u] = pick[u - 1] + 1;
        }
    }

    // seeded random trials
    std::mt19937_64 rng(p.seed);
    long lo = -static_cast<long>(p.bound.convert_to<long>());
    long hi = static_cast<long>(p.bound.convert_to<long>());
    std::uniform_int_distribution<long> dist(lo, hi);
    for (std::size_t t = 0; t < p.random_trials; ++t) {
        std::vector<Int> c(m);
        for (auto& x : c) x = dist(rng);
        if (auto x = good(c)) return x;
    }
    return std::nullopt;
}

/// Decide G-lattice isomorphism: exact witness, a separating invariant, or
/// Unknown after bounded search.
inline IsoVerdict equivariant_isomorphism_search(const GLattice& a, const GLattice& b,
                                                 const IsoSearchParams& p = {})
{
    require(a.group.get() == b.group.get(), "isomorphism search: group mismatch");
    IsoVerdict v;
    if (a.rank != b.rank) {
        v.state = IsoState::NotIsomorphic;
        v.reason = "rank differs";
        return v;
    }
    for (std::size_t g = 0; g < a.group->order; ++g)
        if (a.action[g].trace() != b.action[g].trace()) {
            v.state = IsoState::NotIsomorphic;
            v.reason = "character differs at element " + std::to_string(g);
            return v;
        }
    if (a.rank == 0) {
        v.state = IsoState::Isomorphic;
        v.witness = IntMatrix(0, 0);
        return v;
    }
    std::vector<IntMatrix> basis = equivariant_hom_basis(a, b);
    if (basis.empty()) {
        v.state = IsoState::NotIsomorphic;
        v.reason = "no nonzero equivariant maps";
        return v;
    }
    if (auto w = unimodular_in_span(basis, p)) {
        verify(equivariant(a, b, *w) && is_unimodular(*w), "isomorphism witness failed re-check");
        v.state = IsoState::Isomorphic;
        v.witness = *w;
        return v;
    }
    v.state = IsoState::Unknown;
    v.reason = "bounded search exhausted";
    return v;
}

/// Conjugated copy T M T^-1 of a lattice (same abstract lattice, new basis).
inline GLattice basis_changed(const GLattice& m, const IntMatrix& t)
{
    require(is_unimodular(t), "basis change must be unimodular");
    IntMatrix tinv = unimodular_inverse(t);
    GLattice out;
    out.group = m.group;
    out.rank = m.rank;
    out.action.reserve(m.action.size());
    for (const auto& a : m.action) out.action.push_back(t * a * tinv);
    return out;
}

/// A 1-cocycle on the subgroup H with values in M: phi(gh) = phi(g) + g phi(h).
using Cocycle = std::map<int, Vec>; // parent element index -> vector in M

inline void verify_cocycle(const GLattice& m, const Subgroup& h, const Cocycle& phi)
{
    for (int x : h.members)
        require(phi.count(x) == 1, "cocycle must be defined on every subgroup element");
    const FiniteGroup& g = *m.group;
    for (int x : h.members)
        for (int y : h.members) {
            Vec lhs = phi.at(g.op(x, y));
            Vec rhs = m.action[x].apply(phi.at(y));
            const Vec& px = phi.at(x);
            for (std::size_t i = 0; i < m.rank; ++i) rhs[i] += px[i];
            require(lhs == rhs, "cocycle condition violated");
        }
}

struct ExtensionResult {
    GLattice lattice;        // M' of rank rank(M) + t*[G:H]
    IntMatrix inclusion;     // M -> M'
    IntMatrix projection;    // M' -> Z[G/H]^t
    GLattice quotient;       // Z[G/H]^t with its permutation action
};

/// Extension 0 -> M -> M' -> Z[G/H]^t -> 0 whose connecting classes restricted
/// to H are the given cocycle classes, via the evaluation-at-identity-coset
/// form of the Shapiro isomorphism: the coupling block has columns
///   C(g) e_j = action(rep(sigma_g(j))) . phi(h(g, j)),
/// where g rep(j) = rep(sigma_g(j)) h(g, j).
inline ExtensionResult extension_from_cocycles(const GLattice& m, const Subgroup& h,
                                               const std::vector<Cocycle>& phis)
{
    require(h.parent.get() == m.group.get(), "extension: subgroup of a different group");
    for (const auto& phi : phis) verify_cocycle(m, h, phi);
    const FiniteGroup& g = *m.group;
    CosetTable cosets = coset_table(g, h.members);
    const std::size_t r = cosets.reps.size();
    const std::size_t t = phis.size();
    const std::size_t n = m.rank;
    GLattice perm = permutation_lattice(m.group, h);

    ExtensionResult out;
    out.lattice.group = m.group;
    out.lattice.rank = n + t * r;
    out.lattice.action.assign(g.order, IntMatrix());
    for (std::size_t ge = 0; ge < g.order; ++ge) {
        IntMatrix e(n + t * r, n + t * r);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) e.at(i, j) = m.action[ge].at(i, j);
        for (std::size_t j = 0; j < r; ++j) {
            int moved = g.op(static_cast<int>(ge), cosets.reps[j]);
            int target = cosets.coset_of[moved];
            int hpart = g.op(g.inverse[cosets.reps[target]], moved);
            for (std::size_t b = 0; b < t; ++b) {
                Vec c = m.action[cosets.reps[target]].apply(phis[b].at(hpart));
                for (std::size_t i = 0; i < n; ++i) e.at(i, n + b * r + j) = c[i];
                e.at(n + b * r + target, n + b * r + j) = 1;
            }
        }
        out.lattice.action[ge] = std::move(e);
    }
    verify_action(out.lattice); // a failure here would signal a section-choice bug

    out.inclusion = IntMatrix(n + t * r, n);
    for (std::size_t i = 0; i < n; ++i) out.inclusion.at(i, i) = 1;
    out.projection = IntMatrix(t * r, n + t * r);
    for (std::size_t i = 0; i < t * r; ++i) out.projection.at(i, n + i) = 1;
    out.quotient.group = m.group;
    out.quotient.rank = t * r;
    out.quotient.action.assign(g.order, IntMatrix());
    for (std::size_t ge = 0; ge < g.order; ++ge) {
        IntMatrix q = perm.action[ge];
        for (std::size_t b = 1; b < t; ++b) q = IntMatrix::block_diag(q, perm.action[ge]);
        if (t == 0) q = IntMatrix(0, 0);
        out.quotient.action[ge] = std::move(q);
    }
    return out;
}

inline ExtensionResult extension_from_cocycle(const GLattice& m, const Subgroup& h,
                                              const Cocycle& phi)
{
    return extension_from_cocycles(m, h, {phi});
}

} // namespace latcert
