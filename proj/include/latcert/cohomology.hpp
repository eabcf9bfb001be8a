#pragma once

// Tate cohomology of subgroups acting on lattices.
//
// Primary route: H^-1(H, M) = ker(N_H) / I_H M with everything expressed by
// integer matrices, and H^1(H, M) computed as H^-1(H, M*) on the dual.  The
// bar-cocycle route is kept alongside: it is self-evidently correct, provides
// explicit cocycle representatives for resolution building, and cross-checks
// the dual route automatically on small instances.

#include "latcert/common.hpp"
#include "latcert/glattice.hpp"
#include "latcert/group.hpp"
#include "latcert/int_matrix.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace latcert {

struct CohomologyGroup {
    std::vector<Int> invariant_factors; // d1 | d2 | ..., all >= 2; empty = trivial

    bool trivial() const { return invariant_factors.empty(); }
    Int order() const
    {
        Int n = 1;
        for (const Int& d : invariant_factors) n *= d;
        return n;
    }
    bool operator==(const CohomologyGroup& o) const
    {
        return invariant_factors == o.invariant_factors;
    }
    bool operator!=(const CohomologyGroup& o) const { return !(*this == o); }

    std::string str() const
    {
        if (invariant_factors.empty()) return "0";
        std::string s;
        for (std::size_t i = 0; i < invariant_factors.size(); ++i) {
            if (i) s += " x ";
            s += "Z/" + invariant_factors[i].str();
        }
        return s;
    }
};

namespace detail {

// Lattice cohomology of a finite group is annihilated by |H|, hence finite;
// a zero invariant factor would mean an infinite quotient and a bug.
inline CohomologyGroup finite_invariants(const IntMatrix& coords, const std::string& what)
{
    CohomologyGroup g;
    for (Int& d : cokernel_invariants(coords)) {
        verify(d != 0, what + ": quotient is not finite");
        g.invariant_factors.push_back(std::move(d));
    }
    return g;
}

} // namespace detail

inline IntMatrix norm_element_matrix(const GLattice& m, const std::vector<int>& members)
{
    IntMatrix n(m.rank, m.rank);
    for (int h : members) n = n + m.action[h];
    return n;
}

/// Tate H^-1(H, M) = ker(N_H) / I_H M.  I_H M is spanned by (s - 1)M over a
/// generating set of H, since (gh - 1)m = (g - 1)(hm) + (h - 1)m.
inline CohomologyGroup tate_minus1(const GLattice& m, const std::vector<int>& members)
{
    IntMatrix nh = norm_element_matrix(m, members);
    IntMatrix ker = kernel_basis(nh);
    if (ker.cols() == 0) return {};
    std::vector<int> gens = small_generating_set(*m.group, members);
    if (gens.empty()) return {}; // trivial subgroup
    IntMatrix aug;
    for (int s : gens) {
        IntMatrix c = m.action[s] - IntMatrix::identity(m.rank);
        aug = aug.rows() == 0 && aug.cols() == 0 ? c : IntMatrix::hstack(aug, c);
    }
    auto coords = solve_integer_matrix(ker, aug);
    verify(coords.has_value(), "tate_minus1: augmentation image escapes ker(N)");
    return detail::finite_invariants(*coords, "tate_minus1");
}

/// Tate H^0(H, M) = M^H / N_H M.
inline CohomologyGroup tate_0(const GLattice& m, const std::vector<int>& members)
{
    IntMatrix fix = fixed_sublattice_basis(m, members);
    if (fix.cols() == 0) return {};
    IntMatrix nh = norm_element_matrix(m, members);
    auto coords = solve_integer_matrix(fix, nh);
    verify(coords.has_value(), "tate_0: norm image escapes fixed sublattice");
    return detail::finite_invariants(*coords, "tate_0");
}

/// First cohomology by the duality route: H^1(H, M) has the same invariant
/// factors as H^-1(H, M*).
inline CohomologyGroup h1_dual_route(const GLattice& m, const std::vector<int>& members)
{
    return tate_minus1(dual(m), members);
}

/// The cocycle space of H with values in M, parametrized by the values on a
/// generating set: phi(x g_i) = phi(x) + x . phi(g_i), so phi(x) = L_x u with
/// u the stacked generator values.
struct CocycleSpace {
    std::vector<int> gens;            // generating set of H (parent indices)
    std::vector<int> members;         // BFS order of H
    std::map<int, IntMatrix> word;    // element -> L_x  (rank x rank*|gens|)
    IntMatrix z_basis;                // columns: basis of integer 1-cocycles
    CohomologyGroup h1;
    std::vector<Cocycle> class_generators; // lifts generating H^1, SNF order

    Cocycle cocycle_from_parameters(const GLattice& m, const Vec& u) const
    {
        Cocycle phi;
        for (int x : members) phi[x] = word.at(x).apply(u);
        return phi;
    }
};

inline CocycleSpace h1_cocycle_route(const GLattice& m, const Subgroup& h)
{
    CocycleSpace cs;
    const FiniteGroup& g = *m.group;
    cs.gens = small_generating_set(g, h.members);
    const std::size_t n = m.rank;
    const std::size_t ng = cs.gens.size();
    if (ng == 0) { // trivial subgroup: only the zero cocycle
        cs.members = {g.identity};
        cs.word[g.identity] = IntMatrix(n, 0);
        cs.z_basis = IntMatrix(0, 0);
        return cs;
    }

    auto selector = [&](const IntMatrix& a, std::size_t block) {
        IntMatrix e(n, n * ng);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (a.at(i, j) != 0) e.at(i, block * n + j) = a.at(i, j);
        return e;
    };

    cs.word[g.identity] = IntMatrix(n, n * ng);
    cs.members.push_back(g.identity);
    std::vector<IntMatrix> constraints;
    for (std::size_t qi = 0; qi < cs.members.size(); ++qi) {
        int x = cs.members[qi];
        for (std::size_t i = 0; i < ng; ++i) {
            int y = g.op(x, cs.gens[i]);
            IntMatrix ly = cs.word[x] + selector(m.action[x], i);
            auto it = cs.word.find(y);
            if (it == cs.word.end()) {
                cs.word[y] = std::move(ly);
                cs.members.push_back(y);
            } else {
                IntMatrix c = ly - it->second;
                if (!c.is_zero() &&
                    std::find(constraints.begin(), constraints.end(), c) == constraints.end())
                    constraints.push_back(std::move(c));
            }
        }
    }
    verify(cs.members.size() == h.members.size(), "cocycle route: closure mismatch");

    IntMatrix cons(0, n * ng);
    for (const auto& c : constraints) cons = IntMatrix::vstack(cons, c);
    cs.z_basis = cons.rows() == 0 ? IntMatrix::identity(n * ng) : kernel_basis(cons);
    if (cs.z_basis.cols() == 0) return cs;

    // coboundaries: m |-> ((g_i - 1) m)_i, expressed in the cocycle basis
    IntMatrix bnd(n * ng, n);
    for (std::size_t i = 0; i < ng; ++i) {
        IntMatrix d = m.action[cs.gens[i]] - IntMatrix::identity(n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) bnd.at(i * n + r, c) = d.at(r, c);
    }
    auto coords = solve_integer_matrix(cs.z_basis, bnd);
    verify(coords.has_value(), "cocycle route: coboundary not a cocycle");
    SmithDecomposition s = smith_normal_form(*coords);
    for (std::size_t i = 0; i < cs.z_basis.cols(); ++i) {
        Int d = i < s.divisors.size() ? s.divisors[i] : Int(0);
        verify(d != 0, "cocycle route: H^1 is not finite");
        if (d != 1) cs.h1.invariant_factors.push_back(d);
    }
    // class generators: images of Uinv columns with nontrivial divisor
    for (std::size_t i = 0; i < cs.z_basis.cols(); ++i) {
        Int d = i < s.divisors.size() ? s.divisors[i] : Int(0);
        if (d == 1) continue;
        Vec u = cs.z_basis.apply(s.uinv.col(i));
        cs.class_generators.push_back(cs.cocycle_from_parameters(m, u));
    }
    return cs;
}

/// H^1(H, M).  Dual route, cross-checked against the cocycle route whenever
/// |H| * rank <= 200.
inline CohomologyGroup h1(const GLattice& m, const Subgroup& h)
{
    CohomologyGroup viadual = h1_dual_route(m, h.members);
    if (h.members.size() * m.rank <= 200) {
        CocycleSpace cs = h1_cocycle_route(m, h);
        verify(cs.h1 == viadual, "h1: dual and cocycle routes disagree");
    }
    return viadual;
}

struct SubgroupCohomology {
    Subgroup subgroup;
    CohomologyGroup tate_minus1;
    CohomologyGroup tate_0;
    CohomologyGroup h1;
};

struct SubgroupCohomologyReport {
    std::vector<SubgroupCohomology> entries; // one per conjugacy class, in order

    bool all_h1_trivial() const
    {
        return std::all_of(entries.begin(), entries.end(),
                           [](const SubgroupCohomology& e) { return e.h1.trivial(); });
    }
    bool all_tate_minus1_trivial() const
    {
        return std::all_of(entries.begin(), entries.end(),
                           [](const SubgroupCohomology& e) { return e.tate_minus1.trivial(); });
    }
};

inline SubgroupCohomologyReport subgroup_cohomology_report(const GLattice& m)
{
    SubgroupCohomologyReport rep;
    GLattice md = dual(m);
    for (const Subgroup& h : subgroups_up_to_conjugacy(m.group)) {
        SubgroupCohomology e{h, {}, {}, {}};
        e.tate_minus1 = tate_minus1(m, h.members);
        e.tate_0 = tate_0(m, h.members);
        e.h1 = tate_minus1(md, h.members);
        if (h.members.size() * m.rank <= 200) {
            CocycleSpace cs = h1_cocycle_route(m, h);
            verify(cs.h1 == e.h1, "h1: dual and cocycle routes disagree");
        }
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

/// Coflasque: H^1(H, M) = 0 for every subgroup (conjugacy representatives
/// suffice by conjugation invariance).
inline bool is_coflasque(const GLattice& m, SubgroupCohomologyReport* report = nullptr)
{
    SubgroupCohomologyReport rep = subgroup_cohomology_report(m);
    bool ok = rep.all_h1_trivial();
    if (report) *report = std::move(rep);
    return ok;
}

/// Flasque: H^-1(H, M) = 0 for every subgroup, equivalently the dual is
/// coflasque.
inline bool is_flasque(const GLattice& m, SubgroupCohomologyReport* report = nullptr)
{
    SubgroupCohomologyReport rep = subgroup_cohomology_report(m);
    bool ok = rep.all_tate_minus1_trivial();
    if (report) *report = std::move(rep);
    return ok;
}

inline bool is_h_trivial(const GLattice& m, SubgroupCohomologyReport* report = nullptr)
{
    SubgroupCohomologyReport rep = subgroup_cohomology_report(m);
    bool ok = rep.all_h1_trivial() && rep.all_tate_minus1_trivial();
    if (report) *report = std::move(rep);
    return ok;
}

} // namespace latcert
