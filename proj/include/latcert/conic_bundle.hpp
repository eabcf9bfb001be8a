#pragma once

// Conic-bundle surfaces through the Galois action on the 2r components of
// their degenerate fibres.  An element is a signed permutation (pi, flips):
// the fibres are relabeled by pi first, then the component pair of fibre j is
// swapped whenever flips[j] = 1.  Flips are indexed by the *target* fibre
// label, which is the unique reading under which the worked actions close to
// the groups they should (e.g. <(123)c2c3, (12)c3c4> has order 6).

#include "latcert/cohomology.hpp"
#include "latcert/common.hpp"
#include "latcert/glattice.hpp"
#include "latcert/group.hpp"
#include "latcert/int_matrix.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace latcert {

struct SignedPerm {
    std::vector<int> perm;           // 0-indexed fibre images
    std::vector<std::uint8_t> flips; // indexed by target fibre
};

/// Component (i, side) <-> point 2*i + side on {0..2r-1}.
inline int component_point(int fibre, int side) { return 2 * fibre + side; }

struct FibreAction {
    std::size_t fibres = 0;
    PermGroup pg;                     // permutation realization on 2r points
    std::vector<SignedPerm> elements; // decomposed, in element order

    const std::shared_ptr<FiniteGroup>& group() const { return pg.group; }

    std::string component_name(int point) const
    {
        int fibre = point / 2;
        return (point % 2 ? "lbar" : "l") + std::to_string(fibre + 1);
    }
};

/// Close signed-permutation generators (1-indexed fibre images in the
/// fixture convention) into the full component action.
inline FibreAction build_fibre_action(std::size_t r,
                                      const std::vector<SignedPerm>& generators,
                                      std::size_t order_bound = kDefaultGroupOrderBound)
{
    std::vector<std::vector<int>> point_gens;
    for (const SignedPerm& g : generators) {
        require(g.perm.size() == r && g.flips.size() == r,
                "fibre generator: perm and flips must have length r");
        std::vector<bool> seen(r, false);
        for (int img : g.perm) {
            require(img >= 0 && static_cast<std::size_t>(img) < r && !seen[img],
                    "fibre generator: perm is not a bijection");
            seen[img] = true;
        }
        std::vector<int> p(2 * r);
        for (std::size_t i = 0; i < r; ++i)
            for (int side = 0; side < 2; ++side)
                p[component_point(static_cast<int>(i), side)] =
                    component_point(g.perm[i], side ^ g.flips[g.perm[i]]);
        point_gens.push_back(std::move(p));
    }
    FibreAction a;
    a.fibres = r;
    a.pg = close_generators(2 * r, point_gens, order_bound);
    for (const auto& p : a.pg.perms) {
        SignedPerm sp;
        sp.perm.assign(r, 0);
        sp.flips.assign(r, 0);
        for (std::size_t i = 0; i < r; ++i) {
            int img0 = p[component_point(static_cast<int>(i), 0)];
            int img1 = p[component_point(static_cast<int>(i), 1)];
            verify(img0 / 2 == img1 / 2 && img0 != img1,
                   "closure left the signed-permutation form");
            sp.perm[i] = img0 / 2;
            sp.flips[img0 / 2] = static_cast<std::uint8_t>(img0 % 2);
        }
        a.elements.push_back(std::move(sp));
    }
    return a;
}

/// Fibres whose component pair is crossed by at least one element of H.
inline std::vector<std::uint8_t> flip_touched_fibres(const FibreAction& a,
                                                     const std::vector<int>& members)
{
    std::vector<std::uint8_t> touched(a.fibres, 0);
    for (int e : members)
        for (std::size_t j = 0; j < a.fibres; ++j)
            if (a.elements[e].flips[j]) touched[j] = 1;
    return touched;
}

/// H-orbits on the 2r components.
inline std::vector<std::vector<int>> component_orbits(const FibreAction& a,
                                                      const std::vector<int>& members)
{
    std::vector<std::vector<int>> orbits;
    std::vector<bool> seen(2 * a.fibres, false);
    for (std::size_t p = 0; p < 2 * a.fibres; ++p) {
        if (seen[p]) continue;
        std::vector<int> orbit;
        std::vector<int> stack = {static_cast<int>(p)};
        seen[p] = true;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            orbit.push_back(x);
            for (int e : members) {
                int y = a.pg.perms[e][x];
                if (!seen[y]) {
                    seen[y] = true;
                    stack.push_back(y);
                }
            }
        }
        std::sort(orbit.begin(), orbit.end());
        orbits.push_back(std::move(orbit));
    }
    std::sort(orbits.begin(), orbits.end());
    return orbits;
}

struct ContractionStep {
    std::vector<int> orbit;   // component points blown down
    std::vector<int> fibres;  // degenerate fibres removed (0-indexed)
};

enum class SurfaceVerdict { Rational, NotRational, Unknown };

inline const char* to_string(SurfaceVerdict v)
{
    switch (v) {
        case SurfaceVerdict::Rational: return "RATIONAL";
        case SurfaceVerdict::NotRational: return "NOT_RATIONAL";
        default: return "UNKNOWN";
    }
}

struct MinimalModelReport {
    Subgroup acting;
    bool relatively_minimal = false;
    std::size_t residual_fibres = 0; // minimum reachable r'
    std::vector<ContractionStep> contraction; // one optimal sequence
    std::set<std::size_t> terminal_counts;    // r' of every maximal sequence
    SurfaceVerdict verdict = SurfaceVerdict::Unknown;
    std::string rule;
};

/// Exhaustive exploration of contraction sequences.  A contractible orbit is
/// an H-orbit of components meeting each remaining fibre at most once and
/// lying over fibres whose component pairs no element of H crosses; every
/// fibre it meets leaves the degenerate set.
inline MinimalModelReport minimal_model(const FibreAction& a, const Subgroup& h)
{
    require(h.parent.get() == a.group().get(), "minimal_model: subgroup of a different group");
    MinimalModelReport rep;
    rep.acting = h;
    const std::size_t r = a.fibres;
    std::vector<std::uint8_t> flipped = flip_touched_fibres(a, h.members);
    std::vector<std::vector<int>> orbits = component_orbits(a, h.members);

    // orbits eligible regardless of the remaining set
    std::vector<std::pair<std::vector<int>, std::uint32_t>> eligible; // (orbit, fibre mask)
    for (const auto& orbit : orbits) {
        std::uint32_t mask = 0;
        bool ok = true;
        for (int p : orbit) {
            int fibre = p / 2;
            if (flipped[fibre] || (mask >> fibre) & 1u) {
                ok = false;
                break;
            }
            mask |= 1u << fibre;
        }
        if (ok) eligible.emplace_back(orbit, mask);
    }

    std::uint32_t full = r == 32 ? ~0u : (1u << r) - 1u;
    rep.relatively_minimal = eligible.empty();

    std::map<std::uint32_t, std::size_t> best;
    std::map<std::uint32_t, int> best_move; // eligible index of an optimal first move
    auto explore = [&](auto&& self, std::uint32_t remaining) -> std::size_t {
        auto it = best.find(remaining);
        if (it != best.end()) return it->second;
        std::size_t count = static_cast<std::size_t>(__builtin_popcount(remaining));
        std::size_t bestval = count;
        int move = -1;
        bool maximal = true;
        for (std::size_t i = 0; i < eligible.size(); ++i) {
            if ((eligible[i].second & remaining) != eligible[i].second) continue;
            maximal = false;
            std::size_t sub = self(self, remaining & ~eligible[i].second);
            if (sub < bestval) {
                bestval = sub;
                move = static_cast<int>(i);
            }
        }
        if (maximal) rep.terminal_counts.insert(count);
        best[remaining] = bestval;
        best_move[remaining] = move;
        return bestval;
    };
    rep.residual_fibres = explore(explore, full);

    std::uint32_t state = full;
    while (best_move[state] >= 0) {
        const auto& [orbit, mask] = eligible[best_move[state]];
        ContractionStep step;
        step.orbit = orbit;
        for (std::size_t f = 0; f < r; ++f)
            if ((mask >> f) & 1u) step.fibres.push_back(static_cast<int>(f));
        rep.contraction.push_back(std::move(step));
        state &= ~mask;
    }

    if (rep.residual_fibres <= 3) {
        rep.verdict = SurfaceVerdict::Rational;
        rep.rule = "conic bundle with at most 3 degenerate fibres (and a rational point) "
                   "is rational [Iskovskikh, Thm 4.1]";
    } else if (rep.relatively_minimal && r >= 4) {
        rep.verdict = SurfaceVerdict::NotRational;
        rep.rule = "relatively minimal conic bundle with >= 4 degenerate fibres is not "
                   "rational [Iskovskikh, Thm 2]";
    } else {
        rep.verdict = SurfaceVerdict::Unknown;
        rep.rule = "no applicable rule";
    }
    return rep;
}

/// Picard lattice of the bundle: rank r + 2 on basis (f, xi, l_1..l_r), with
/// g.l_i = l_{pi(i)} or f - l_{pi(i)}, and g.xi solved from invariance of the
/// intersection form.  The section-incidence convention xi . l_i = e (0 or 1,
/// uniform) fixes the solution; both conventions are built and must agree on
/// all subgroup cohomology.
struct PicardLattice {
    GLattice lattice;
    IntMatrix gram;   // with xi.xi = 0 in the stored copy
    int convention_e = 0;
};

namespace detail {

inline std::optional<GLattice> picard_for_convention(const FibreAction& a, int e)
{
    const std::size_t r = a.fibres;
    const std::size_t n = r + 2;
    GLattice m;
    m.group = a.group();
    m.rank = n;
    m.action.assign(m.group->order, IntMatrix());
    for (std::size_t ge = 0; ge < m.group->order; ++ge) {
        const SignedPerm& sp = a.elements[ge];
        IntMatrix mat(n, n);
        mat.at(0, 0) = 1; // f fixed
        Int sum_c2 = 0, sum_c = 0;
        std::vector<Int> c(r, 0);
        for (std::size_t i = 0; i < r; ++i) {
            int tgt = sp.perm[i];
            if (sp.flips[tgt]) {
                mat.at(0, 2 + i) = 1;
                mat.at(2 + tgt, 2 + i) = -1;
                c[tgt] = 2 * e - 1;
            } else {
                mat.at(2 + tgt, 2 + i) = 1;
            }
        }
        for (std::size_t j = 0; j < r; ++j) {
            sum_c += c[j];
            sum_c2 += c[j] * c[j];
            mat.at(2 + j, 1) = c[j];
        }
        Int twice_d = sum_c2 - 2 * e * sum_c;
        if (twice_d % 2 != 0) return std::nullopt; // no integral section action
        mat.at(1, 1) = 1;
        mat.at(0, 1) = twice_d / 2;
        m.action[ge] = std::move(mat);
    }
    verify_action(m);
    // exact invariance of the intersection form
    IntMatrix q(n, n);
    q.at(0, 1) = 1;
    q.at(1, 0) = 1;
    for (std::size_t i = 0; i < r; ++i) {
        q.at(2 + i, 2 + i) = -1;
        q.at(1, 2 + i) = e;
        q.at(2 + i, 1) = e;
    }
    for (const auto& mat : m.action)
        verify(mat.transpose() * q * mat == q, "picard action does not preserve the form");
    return m;
}

} // namespace detail

inline PicardLattice picard_lattice(const FibreAction& a)
{
    auto m0 = detail::picard_for_convention(a, 0);
    auto m1 = detail::picard_for_convention(a, 1);
    require(m0.has_value() || m1.has_value(),
            "no consistent section extension: fibre action crosses an odd number of pairs");
    if (m0 && m1) {
        SubgroupCohomologyReport r0 = subgroup_cohomology_report(*m0);
        SubgroupCohomologyReport r1 = subgroup_cohomology_report(*m1);
        verify(r0.entries.size() == r1.entries.size(), "convention reports differ in shape");
        for (std::size_t i = 0; i < r0.entries.size(); ++i)
            verify(r0.entries[i].h1 == r1.entries[i].h1 &&
                       r0.entries[i].tate_minus1 == r1.entries[i].tate_minus1,
                   "section conventions disagree on cohomology");
    }
    PicardLattice out;
    out.convention_e = m0 ? 0 : 1;
    out.lattice = m0 ? *m0 : *m1;
    const std::size_t n = out.lattice.rank;
    out.gram = IntMatrix(n, n);
    out.gram.at(0, 1) = 1;
    out.gram.at(1, 0) = 1;
    for (std::size_t i = 2; i < n; ++i) {
        out.gram.at(i, i) = -1;
        out.gram.at(1, i) = out.convention_e;
        out.gram.at(i, 1) = out.convention_e;
    }
    return out;
}

inline std::size_t picard_fixed_rank(const PicardLattice& p, const Subgroup& h)
{
    return fixed_sublattice_basis(p.lattice, h.members).cols();
}

} // namespace latcert
