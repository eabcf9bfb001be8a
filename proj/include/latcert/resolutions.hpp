#pragma once

// Flasque and coflasque resolutions, and the coflasque-ification chain that
// turns a flasque lattice into an H-trivial one by killing H^1 classes with
// permutation extensions.  Every emitted sequence is re-verified: injectivity
// with saturated image, surjectivity, rank additivity, zero composition, and
// the promised cohomological property of the kernel.

#include "latcert/cohomology.hpp"
#include "latcert/common.hpp"
#include "latcert/glattice.hpp"
#include "latcert/group.hpp"
#include "latcert/int_matrix.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace latcert {

/// A verified short exact sequence 0 -> left -> middle -> right -> 0.
struct ExactSequence {
    GLattice left, middle, right;
    IntMatrix inject;  // middle.rank x left.rank
    IntMatrix project; // right.rank x middle.rank

    void verify_exact() const
    {
        verify(left.rank + right.rank == middle.rank, "exact sequence: ranks do not add up");
        verify((project * inject).is_zero(), "exact sequence: composition nonzero");
        {
            SmithDecomposition s = smith_normal_form(inject);
            verify(s.rank == left.rank, "exact sequence: first map not injective");
            for (std::size_t i = 0; i < s.rank; ++i)
                verify(s.divisors[i] == 1, "exact sequence: image of first map not saturated");
        }
        {
            SmithDecomposition s = smith_normal_form(project);
            verify(s.rank == right.rank, "exact sequence: second map not surjective");
            for (std::size_t i = 0; i < s.rank; ++i)
                verify(s.divisors[i] == 1, "exact sequence: second map not surjective over Z");
        }
        verify(equivariant(left, middle, inject), "exact sequence: first map not equivariant");
        verify(equivariant(middle, right, project), "exact sequence: second map not equivariant");
        // saturated image of equal rank inside the saturated kernel of a
        // surjection forces exactness in the middle
    }
};

enum class ResolutionKind { Flasque, Coflasque };

/// One transitive permutation summand Z[G/H]^copies of the middle term.
struct PermutationSummand {
    Subgroup subgroup;
    std::size_t copies = 0;
    std::size_t coset_count = 0;
};

struct ResolutionCertificate {
    ResolutionKind kind = ResolutionKind::Flasque;
    ExactSequence seq;
    std::vector<PermutationSummand> middle_decomposition;

    const GLattice& kernel() const
    {
        return kind == ResolutionKind::Flasque ? seq.right : seq.left;
    }

    void verify_certificate() const
    {
        seq.verify_exact();
        verify(acts_by_permutations(seq.middle), "resolution: middle term not a permutation lattice");
        std::size_t total = 0;
        for (const auto& s : middle_decomposition) total += s.copies * s.coset_count;
        verify(total == seq.middle.rank, "resolution: summand decomposition does not cover middle");
        if (kind == ResolutionKind::Flasque)
            verify(is_flasque(seq.right), "flasque resolution: kernel fails flasque check");
        else
            verify(is_coflasque(seq.left), "coflasque resolution: kernel fails coflasque check");
    }
};

/// Coflasque resolution 0 -> C -> S -> M -> 0: S is built from one copy of
/// Z[G/H] per basis vector of M^H over every subgroup class H, with the
/// evaluation map e_{gH} (x) v  |->  g v.  Surjectivity comes from the
/// trivial-subgroup summand; surjectivity on all fixed points makes the
/// kernel coflasque, which is verified rather than assumed.
inline ResolutionCertificate coflasque_resolution(const GLattice& m)
{
    auto classes = subgroups_up_to_conjugacy(m.group);
    const FiniteGroup& g = *m.group;
    ResolutionCertificate cert;
    cert.kind = ResolutionKind::Coflasque;

    GLattice s;
    s.group = m.group;
    s.rank = 0;
    s.action.assign(g.order, IntMatrix(0, 0));
    IntMatrix eval(m.rank, 0);
    for (const Subgroup& h : classes) {
        IntMatrix fixed = fixed_sublattice_basis(m, h.members);
        if (fixed.cols() == 0) continue;
        GLattice coset_lat = permutation_lattice(m.group, h);
        CosetTable t = coset_table(g, h.members);
        PermutationSummand summand{h, fixed.cols(), coset_lat.rank};
        for (std::size_t v = 0; v < fixed.cols(); ++v) {
            IntMatrix block(m.rank, coset_lat.rank);
            for (std::size_t j = 0; j < coset_lat.rank; ++j)
                block.set_col(j, m.action[t.reps[j]].apply(fixed.col(v)));
            eval = IntMatrix::hstack(eval, block);
            for (std::size_t e = 0; e < g.order; ++e)
                s.action[e] = IntMatrix::block_diag(s.action[e], coset_lat.action[e]);
            s.rank += coset_lat.rank;
        }
        cert.middle_decomposition.push_back(summand);
    }

    IntMatrix kernel = kernel_basis(eval);
    GLattice c = sublattice_action(s, kernel);

    cert.seq.left = std::move(c);
    cert.seq.middle = std::move(s);
    cert.seq.right = m;
    cert.seq.inject = kernel;
    cert.seq.project = eval;
    cert.verify_certificate();
    return cert;
}

/// Flasque resolution 0 -> M -> S -> F -> 0, obtained by dualizing a
/// coflasque resolution of the dual lattice.
inline ResolutionCertificate flasque_resolution(const GLattice& m)
{
    ResolutionCertificate co = coflasque_resolution(dual(m));
    ResolutionCertificate cert;
    cert.kind = ResolutionKind::Flasque;
    cert.seq.left = m;
    cert.seq.middle = dual(co.seq.middle); // permutation lattices are self-dual
    cert.seq.right = dual(co.seq.left);
    cert.seq.inject = co.seq.project.transpose();
    cert.seq.project = co.seq.inject.transpose();
    cert.middle_decomposition = co.middle_decomposition;
    cert.verify_certificate();
    return cert;
}

/// One step of the coflasque-ification: all H^1(H, .) classes of one subgroup
/// killed at once by an extension with quotient Z[G/H]^t.
struct ChainStep {
    ExactSequence seq; // 0 -> before -> after -> Z[G/H]^t -> 0
    Subgroup subgroup;
    std::size_t copies = 0;
};

struct StableEquivalenceChain {
    std::vector<ChainStep> steps;
    ExactSequence composite; // 0 -> M -> M' -> S -> 0, S permutation

    void verify_chain() const
    {
        for (const auto& st : steps) {
            st.seq.verify_exact();
            verify(acts_by_permutations(st.seq.right), "chain step: quotient not permutation");
        }
        composite.verify_exact();
        verify(acts_by_permutations(composite.right), "chain: composite quotient not permutation");
    }
};

struct CoflasquifyResult {
    GLattice lattice; // M', coflasque (H-trivial when the input was flasque)
    StableEquivalenceChain chain;
};

namespace detail {

// Split the leading permutation block off the quotient action: conjugate by
// [[I, Y], [0, I]] where  P_g Y - Y R_g = C_g  on the generators.  An integer
// solution exists because Ext^1 of a lattice with permutation sub vanishes
// against permutation quotients.
inline IntMatrix solve_block_splitting(const FiniteGroup& g,
                                       const std::vector<IntMatrix>& p, // leading block
                                       const std::vector<IntMatrix>& r, // trailing block
                                       const std::vector<IntMatrix>& c) // coupling
{
    const std::size_t np = p[0].rows(), nr = r[0].rows();
    std::vector<int> gens = g.generators;
    IntMatrix cons(gens.size() * np * nr, np * nr);
    Vec rhs(gens.size() * np * nr);
    std::size_t row = 0;
    for (std::size_t t = 0; t < gens.size(); ++t) {
        int s = gens[t];
        for (std::size_t i = 0; i < np; ++i)
            for (std::size_t j = 0; j < nr; ++j) {
                for (std::size_t k = 0; k < np; ++k)
                    if (p[s].at(i, k) != 0) cons.at(row, k * nr + j) += p[s].at(i, k);
                for (std::size_t k = 0; k < nr; ++k)
                    if (r[s].at(k, j) != 0) cons.at(row, i * nr + k) -= r[s].at(k, j);
                rhs[row] = c[s].at(i, j);
                ++row;
            }
    }
    auto sol = solve_integer(cons, rhs);
    verify(sol.has_value(), "quotient splitting has no integer solution");
    IntMatrix y(np, nr);
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j < nr; ++j) y.at(i, j) = (*sol)[i * nr + j];
    return y;
}

} // namespace detail

/// Embed M into a coflasque M' with permutation quotient (one extension per
/// subgroup class with nonvanishing H^1, repeated until a clean pass).  Each
/// extension kills the full H^1 of its subgroup and can only shrink the H^1
/// of the others, so termination is a theorem; the pass cap is a guard.
inline CoflasquifyResult coflasquify(const GLattice& m, std::size_t max_passes = 10)
{
    auto classes = subgroups_up_to_conjugacy(m.group);
    const bool was_flasque = is_flasque(m);
    CoflasquifyResult out;
    out.lattice = m;
    std::vector<std::pair<Subgroup, std::size_t>> used; // for the composite quotient

    bool clean = false;
    for (std::size_t pass = 0; pass < max_passes && !clean; ++pass) {
        clean = true;
        for (const Subgroup& h : classes) {
            if (h1_dual_route(out.lattice, h.members).trivial()) continue;
            clean = false;
            CocycleSpace cs = h1_cocycle_route(out.lattice, h);
            verify(!cs.class_generators.empty(), "dual route found classes the cocycle route lost");
            ExtensionResult ext = extension_from_cocycles(out.lattice, h, cs.class_generators);
            ChainStep step;
            step.seq.left = out.lattice;
            step.seq.middle = ext.lattice;
            step.seq.right = ext.quotient;
            step.seq.inject = ext.inclusion;
            step.seq.project = ext.projection;
            step.subgroup = h;
            step.copies = cs.class_generators.size();
            step.seq.verify_exact();
            out.chain.steps.push_back(std::move(step));
            used.emplace_back(h, cs.class_generators.size());
            out.lattice = ext.lattice;
        }
    }
    verify(clean && is_coflasque(out.lattice),
           "coflasquify: pass cap exceeded before convergence");

    // Composite sequence 0 -> M -> M' -> S -> 0.  The quotient of the stacked
    // extensions is block upper triangular with permutation diagonal; the
    // couplings split off integrally, block by block.
    const std::size_t n0 = m.rank;
    const std::size_t q = out.lattice.rank - n0;
    GLattice normalized = out.lattice;
    std::vector<std::size_t> block_sizes;
    GLattice sperm;
    sperm.group = m.group;
    sperm.rank = 0;
    sperm.action.assign(m.group->order, IntMatrix(0, 0));
    for (const auto& [h, copies] : used) {
        GLattice p = permutation_lattice(m.group, h);
        for (std::size_t c = 0; c < copies; ++c) {
            block_sizes.push_back(p.rank);
            for (std::size_t e = 0; e < m.group->order; ++e)
                sperm.action[e] = IntMatrix::block_diag(sperm.action[e], p.action[e]);
            sperm.rank += p.rank;
        }
    }
    verify(sperm.rank == q, "coflasquify: quotient rank mismatch");

    // Clear couplings between quotient blocks, from the front.
    std::size_t offset = 0;
    for (std::size_t b = 0; b + 1 < block_sizes.size(); ++b) {
        std::size_t np = block_sizes[b];
        std::size_t rest = q - offset - np;
        std::vector<IntMatrix> pblk(m.group->order), rblk(m.group->order), cblk(m.group->order);
        bool coupled = false;
        for (std::size_t e = 0; e < m.group->order; ++e) {
            pblk[e] = normalized.action[e].submatrix(n0 + offset, n0 + offset, np, np);
            rblk[e] = normalized.action[e].submatrix(n0 + offset + np, n0 + offset + np, rest, rest);
            cblk[e] = normalized.action[e].submatrix(n0 + offset, n0 + offset + np, np, rest);
            if (!cblk[e].is_zero()) coupled = true;
        }
        if (coupled) {
            IntMatrix y = detail::solve_block_splitting(*m.group, pblk, rblk, cblk);
            IntMatrix t = IntMatrix::identity(normalized.rank);
            for (std::size_t i = 0; i < np; ++i)
                for (std::size_t j = 0; j < rest; ++j)
                    t.at(n0 + offset + i, n0 + offset + np + j) = y.at(i, j);
            normalized = basis_changed(normalized, t);
        }
        offset += np;
    }
    // The chain steps stay in their own coordinates (each is verified
    // standalone); the composite uses the normalized copy of the final
    // lattice, in which the quotient is literally the block-diagonal
    // permutation action.
    out.lattice = normalized;

    out.chain.composite.left = m;
    out.chain.composite.middle = out.lattice;
    out.chain.composite.right = sperm;
    out.chain.composite.inject = IntMatrix(out.lattice.rank, n0);
    for (std::size_t i = 0; i < n0; ++i) out.chain.composite.inject.at(i, i) = 1;
    out.chain.composite.project = IntMatrix(q, out.lattice.rank);
    for (std::size_t i = 0; i < q; ++i) out.chain.composite.project.at(i, n0 + i) = 1;
    // verify_exact's equivariance of [0 | I] checks that the lower-right
    // block of the normalized action equals the recorded permutation sum.
    out.chain.composite.verify_exact();
    verify(acts_by_permutations(out.chain.composite.right),
           "coflasquify: composite quotient not permutation");

    if (was_flasque)
        verify(is_flasque(out.lattice), "coflasquify must preserve flasqueness");
    return out;
}

} // namespace latcert
