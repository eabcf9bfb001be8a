#pragma once

// Rationality-obstruction verdicts for tori, assembled from lattice
// computations.  Tri-state discipline: YES always carries a re-verified
// witness, NO always carries a machine-checkable separating invariant, and
// bounded searches that come up empty say Unknown rather than guessing.

#include "latcert/cohomology.hpp"
#include "latcert/common.hpp"
#include "latcert/glattice.hpp"
#include "latcert/group.hpp"
#include "latcert/int_matrix.hpp"
#include "latcert/resolutions.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace latcert {

enum class TriState { Yes, No, Unknown };

inline const char* to_string(TriState t)
{
    switch (t) {
        case TriState::Yes: return "YES";
        case TriState::No: return "NO";
        default: return "UNKNOWN";
    }
}

/// Multiset of transitive permutation lattices, as copy counts per subgroup
/// class (classes in enumeration order).
using PermComposition = std::vector<std::size_t>;

struct PermutationVerdict {
    TriState state = TriState::Unknown;
    std::string reason;
    IntMatrix witness;           // unimodular equivariant map when Yes
    PermComposition s1, s2;      // M (+ S1) ~ S2 when Yes
};

namespace detail {

struct CharacterTable {
    std::vector<Subgroup> classes;
    std::vector<std::vector<Int>> chi; // chi[class][element] = fixed cosets
    std::vector<std::size_t> ranks;    // [G:H]
};

inline CharacterTable transitive_characters(const std::shared_ptr<const FiniteGroup>& g)
{
    CharacterTable t;
    t.classes = subgroups_up_to_conjugacy(g);
    for (const Subgroup& h : t.classes) {
        GLattice p = permutation_lattice(g, h);
        std::vector<Int> c(g->order);
        for (std::size_t e = 0; e < g->order; ++e) c[e] = p.action[e].trace();
        t.chi.push_back(std::move(c));
        t.ranks.push_back(p.rank);
    }
    return t;
}

inline std::vector<Int> character_of(const GLattice& m)
{
    std::vector<Int> c(m.group->order);
    for (std::size_t e = 0; e < m.group->order; ++e) c[e] = m.action[e].trace();
    return c;
}

// All expansions of `target` as nonnegative integer combinations of the
// transitive permutation characters.  Exhaustive DFS, pruned by the rank
// coordinate; desk-scale groups keep this tiny.
inline void character_decompositions(const CharacterTable& t, const std::vector<Int>& target,
                                     std::vector<PermComposition>& out,
                                     std::size_t solution_cap = 4096)
{
    PermComposition counts(t.classes.size(), 0);
    std::vector<Int> rem = target;
    // recurse over classes ordered as enumerated (largest rank = regular first
    // is not guaranteed; the rank prune keeps it cheap regardless)
    auto rec = [&](auto&& self, std::size_t idx) -> void {
        if (out.size() >= solution_cap) return;
        if (idx == t.classes.size()) {
            if (std::all_of(rem.begin(), rem.end(), [](const Int& x) { return x == 0; }))
                out.push_back(counts);
            return;
        }
        Int maxc = rem[0] / Int(t.ranks[idx]); // identity coordinate = rank budget
        if (maxc < 0) maxc = 0;
        for (Int c = 0; c <= maxc; ++c) {
            if (c > 0)
                for (std::size_t e = 0; e < rem.size(); ++e) rem[e] -= t.chi[idx][e];
            if (rem[0] >= 0) {
                counts[idx] = c.convert_to<std::size_t>();
                self(self, idx + 1);
            }
            if (c == maxc)
                for (std::size_t e = 0; e < rem.size(); ++e) rem[e] += c * t.chi[idx][e];
        }
        counts[idx] = 0;
    };
    rec(rec, 0);
}

inline GLattice build_permutation_sum(const std::shared_ptr<const FiniteGroup>& g,
                                      const CharacterTable& t, const PermComposition& counts)
{
    GLattice s;
    s.group = g;
    s.rank = 0;
    s.action.assign(g->order, IntMatrix(0, 0));
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) continue;
        GLattice p = permutation_lattice(g, t.classes[i]);
        for (std::size_t c = 0; c < counts[i]; ++c) {
            for (std::size_t e = 0; e < g->order; ++e)
                s.action[e] = IntMatrix::block_diag(s.action[e], p.action[e]);
            s.rank += p.rank;
        }
    }
    return s;
}

inline std::string composition_str(const CharacterTable& t, const PermComposition& counts)
{
    std::string s;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) continue;
        if (!s.empty()) s += " + ";
        s += "Z[G/H" + std::to_string(i) + "]";
        if (counts[i] > 1) s += "^" + std::to_string(counts[i]);
    }
    return s.empty() ? "0" : s;
}

} // namespace detail

/// Is M a permutation lattice?  NO on a negative trace, an impossible
/// character, or nonvanishing cohomology; YES with an explicit isomorphism to
/// a sum of coset lattices; Unknown if the bounded search stalls.
inline PermutationVerdict is_permutation_lattice(const GLattice& m,
                                                 const IsoSearchParams& params = {})
{
    PermutationVerdict v;
    std::vector<Int> chi = detail::character_of(m);
    for (std::size_t e = 0; e < chi.size(); ++e)
        if (chi[e] < 0) {
            v.state = TriState::No;
            v.reason = "trace of element " + std::to_string(e) +
                       " is negative; permutation matrices have nonnegative trace";
            return v;
        }
    detail::CharacterTable table = detail::transitive_characters(m.group);
    std::vector<PermComposition> decomps;
    detail::character_decompositions(table, chi, decomps);
    if (decomps.empty()) {
        v.state = TriState::No;
        v.reason = "character admits no nonnegative decomposition into transitive "
                   "permutation characters";
        return v;
    }
    SubgroupCohomologyReport rep;
    if (!is_h_trivial(m, &rep)) {
        v.state = TriState::No;
        v.reason = "nonvanishing Tate cohomology; permutation lattices are H-trivial";
        return v;
    }
    bool any_unknown = false;
    for (const PermComposition& d : decomps) {
        GLattice s = detail::build_permutation_sum(m.group, table, d);
        IsoVerdict iso = equivariant_isomorphism_search(m, s, params);
        if (iso.state == IsoState::Isomorphic) {
            v.state = TriState::Yes;
            v.witness = iso.witness;
            v.s2 = d;
            v.reason = "isomorphic to " + detail::composition_str(table, d);
            return v;
        }
        if (iso.state == IsoState::Unknown) any_unknown = true;
    }
    if (any_unknown) {
        v.state = TriState::Unknown;
        v.reason = "character matches a permutation sum but bounded isomorphism search failed";
    } else {
        v.state = TriState::No;
        v.reason = "every character-compatible permutation sum is separated by an invariant";
    }
    return v;
}

struct StablyPermutationParams {
    IsoSearchParams iso;
    std::size_t rank_budget = 0;  // 0 = default 2*rank + |G|
    std::size_t pair_cap = 20000; // candidate (S1, S2) pairs tried before Unknown
};

/// Is M stably permutation, i.e. M + S1 ~ S2 with S1, S2 permutation?
/// S1 runs over multisets of coset lattices by total added rank; each S2
/// composition is forced by character arithmetic.
inline PermutationVerdict is_stably_permutation(const GLattice& m,
                                                const StablyPermutationParams& params = {})
{
    PermutationVerdict v;
    SubgroupCohomologyReport rep;
    if (!is_h_trivial(m, &rep)) {
        v.state = TriState::No;
        v.reason = "nonvanishing Tate cohomology; stably permutation lattices are H-trivial";
        return v;
    }
    detail::CharacterTable table = detail::transitive_characters(m.group);
    std::size_t budget = params.rank_budget ? params.rank_budget : 2 * m.rank + m.group->order;
    std::vector<Int> chi = detail::character_of(m);

    std::size_t pairs_tried = 0;
    bool capped = false;
    // S1 candidates graded by total rank, lexicographic within a grade
    std::vector<PermComposition> s1s;
    {
        PermComposition cur(table.classes.size(), 0);
        auto rec = [&](auto&& self, std::size_t idx, std::size_t remaining) -> void {
            if (idx == table.classes.size()) {
                s1s.push_back(cur);
                return;
            }
            for (std::size_t c = 0; c * table.ranks[idx] <= remaining; ++c) {
                cur[idx] = c;
                self(self, idx + 1, remaining - c * table.ranks[idx]);
            }
            cur[idx] = 0;
        };
        rec(rec, 0, budget);
        std::stable_sort(s1s.begin(), s1s.end(),
                         [&](const PermComposition& a, const PermComposition& b) {
                             std::size_t ra = 0, rb = 0;
                             for (std::size_t i = 0; i < a.size(); ++i) {
                                 ra += a[i] * table.ranks[i];
                                 rb += b[i] * table.ranks[i];
                             }
                             return ra < rb;
                         });
    }
    for (const PermComposition& s1c : s1s) {
        GLattice a = detail::build_permutation_sum(m.group, table, s1c);
        GLattice ms1 = a.rank == 0 ? m : direct_sum(m, a);
        std::vector<Int> target = detail::character_of(ms1);
        std::vector<PermComposition> s2s;
        detail::character_decompositions(table, target, s2s);
        for (const PermComposition& s2c : s2s) {
            if (++pairs_tried > params.pair_cap) {
                capped = true;
                break;
            }
            GLattice b = detail::build_permutation_sum(m.group, table, s2c);
            IsoVerdict iso = equivariant_isomorphism_search(ms1, b, params.iso);
            if (iso.state == IsoState::Isomorphic) {
                v.state = TriState::Yes;
                v.witness = iso.witness;
                v.s1 = s1c;
                v.s2 = s2c;
                v.reason = "M + " + detail::composition_str(table, s1c) + " ~ " +
                           detail::composition_str(table, s2c);
                return v;
            }
        }
        if (capped) break;
    }
    v.state = TriState::Unknown;
    v.reason = capped ? "candidate budget exhausted" : "rank budget exhausted";
    return v;
}

/// Invertibility of a lattice F: F is a direct summand of a permutation
/// lattice iff its own coflasque resolution 0 -> C -> S -> F -> 0 splits
/// (invertible F has Ext^1(F, C) = 0 against coflasque C), and splitting is
/// one integer linear system for an equivariant section.  The system size is
/// capped; beyond the cap the verdict is Unknown.
struct InvertibilityVerdict {
    TriState state = TriState::Unknown;
    std::string reason;
    IntMatrix section; // s with project . s = id when Yes
};

inline InvertibilityVerdict is_invertible(const GLattice& f,
                                          std::size_t hom_unknown_cap = 4000)
{
    InvertibilityVerdict v;
    SubgroupCohomologyReport rep;
    if (!is_h_trivial(f, &rep)) {
        v.state = TriState::No;
        v.reason = "nonvanishing Tate cohomology; invertible lattices are H-trivial";
        return v;
    }
    ResolutionCertificate co = coflasque_resolution(f);
    const GLattice& s = co.seq.middle;
    if (f.rank * s.rank > hom_unknown_cap) {
        v.state = TriState::Unknown;
        v.reason = "section system too large for the configured cap";
        return v;
    }
    std::vector<IntMatrix> homs = equivariant_hom_basis(f, s);
    // solve sum c_k (project . h_k) = id_F
    IntMatrix cons(f.rank * f.rank, homs.size());
    for (std::size_t k = 0; k < homs.size(); ++k) {
        IntMatrix ph = co.seq.project * homs[k];
        for (std::size_t i = 0; i < f.rank; ++i)
            for (std::size_t j = 0; j < f.rank; ++j) cons.at(i * f.rank + j, k) = ph.at(i, j);
    }
    Vec rhs(f.rank * f.rank);
    for (std::size_t i = 0; i < f.rank; ++i) rhs[i * f.rank + i] = 1;
    auto sol = solve_integer(cons, rhs);
    if (!sol) {
        v.state = TriState::No;
        v.reason = "coflasque resolution admits no equivariant section; a direct summand "
                   "of a permutation lattice would split it";
        return v;
    }
    IntMatrix section(s.rank, f.rank);
    for (std::size_t k = 0; k < homs.size(); ++k)
        if ((*sol)[k] != 0)
            for (std::size_t i = 0; i < s.rank; ++i)
                for (std::size_t j = 0; j < f.rank; ++j)
                    section.at(i, j) += (*sol)[k] * homs[k].at(i, j);
    verify((co.seq.project * section).is_identity(), "invertibility section failed re-check");
    verify(equivariant(f, s, section), "invertibility section not equivariant");
    v.state = TriState::Yes;
    v.section = section;
    v.reason = "equivariant section of the coflasque resolution splits F off " +
               std::to_string(s.rank) + "-rank permutation lattice";
    return v;
}

struct Citation {
    std::string claim;
    std::string source;
};

struct TorusCertificate {
    GLattice character_lattice;
    ResolutionCertificate resolution; // 0 -> M -> S -> F -> 0
    SubgroupCohomologyReport kernel_report; // cohomology of F over all classes
    bool flasque_kernel_h_trivial = false;
    bool br_trivial = false; // = flasque_kernel_h_trivial
    CohomologyGroup brauer;  // H^1(G, F), the unramified Brauer group
    PermutationVerdict stably_permutation; // of F
    InvertibilityVerdict invertible;       // of F
    std::vector<Citation> citations;
};

struct CertifyParams {
    StablyPermutationParams stably;
    std::size_t invertible_cap = 4000;
};

inline TorusCertificate certify_torus(const GLattice& m, const CertifyParams& params = {})
{
    TorusCertificate cert;
    cert.character_lattice = m;
    cert.resolution = flasque_resolution(m);
    const GLattice& f = cert.resolution.seq.right;
    cert.kernel_report = subgroup_cohomology_report(f);
    cert.flasque_kernel_h_trivial =
        cert.kernel_report.all_h1_trivial() && cert.kernel_report.all_tate_minus1_trivial();
    cert.br_trivial = cert.flasque_kernel_h_trivial;
    for (const auto& e : cert.kernel_report.entries)
        if (e.subgroup.order() == m.group->order) cert.brauer = e.h1;
    cert.stably_permutation = is_stably_permutation(f, params.stably);
    if (cert.stably_permutation.state == TriState::Yes) {
        // stably permutation implies invertible
        cert.invertible.state = TriState::Yes;
        cert.invertible.reason = "stably permutation";
    } else {
        cert.invertible = is_invertible(f, params.invertible_cap);
        if (cert.invertible.state == TriState::Yes &&
            cert.stably_permutation.state == TriState::No)
            throw internal_error("monotone consistency violated: invertible but not H-trivial");
    }
    return cert;
}

/// Local rationality rules for the torus with character lattice M, evaluated
/// on every cyclic subgroup class (the candidate decomposition groups).
struct LocalRationalityEntry {
    Subgroup subgroup;
    std::size_t faithful_order = 1; // order of the image of C in GL(M)
    bool rational = false;
    std::string rule;
};

struct LocalRationalityReport {
    std::vector<LocalRationalityEntry> entries;
    bool all_rational() const
    {
        return std::all_of(entries.begin(), entries.end(),
                           [](const LocalRationalityEntry& e) { return e.rational; });
    }
};

inline bool order_is_2s5t(std::size_t n)
{
    while (n % 2 == 0) n /= 2;
    while (n % 5 == 0) n /= 5;
    return n == 1;
}

inline LocalRationalityReport local_rationality_report(const GLattice& m)
{
    LocalRationalityReport rep;
    for (const Subgroup& h : subgroups_up_to_conjugacy(m.group)) {
        CyclicWitness cw = is_cyclic(h);
        if (!cw.cyclic) continue;
        LocalRationalityEntry e;
        e.subgroup = h;
        std::size_t kernel = 0;
        for (int x : h.members)
            if (m.action[x].is_identity()) ++kernel;
        e.faithful_order = h.order() / kernel;
        if (m.rank <= 2) {
            e.rational = true;
            e.rule = "tori of dimension <= 2 are rational (Voskresenskii)";
        } else if (e.faithful_order <= 2) {
            e.rational = true;
            e.rule = "split by a quadratic extension, hence a product of tori of "
                     "dimension <= 2 (Voskresenskii 4.9)";
        } else if (order_is_2s5t(e.faithful_order)) {
            e.rational = true;
            e.rule = "split over a cyclic extension of degree 2^s 5^t; all such tori "
                     "are rational";
        } else {
            e.rational = false;
            e.rule = "no applicable rule";
        }
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

} // namespace latcert
