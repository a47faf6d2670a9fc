#pragma once

#include <string>
#include <vector>

#include "microlocal/exactalg/smith.hpp"

namespace microlocal::exactalg {

/// Finitely generated module R^g / im(relations), relations a g×r matrix.
/// Invariants (free rank, non-unit elementary divisors) are computed once.
class FgModule
{
public:
    FgModule() : FgModule(Ring::rationals(), 0) {}

    /// Free module R^generators.
    FgModule(Ring ring, std::size_t generators) : FgModule(Matrix(ring, generators, 0)) {}

    explicit FgModule(Matrix relations) : relations_(std::move(relations))
    {
        SmithForm s = smith_normal_form(relations_, {.left = false, .right = false});
        free_rank_ = relations_.rows() - s.rank;
        for (std::size_t i = 0; i < s.rank; ++i)
            if (!ring().is_unit(s.diagonal(i, i)))
                torsion_.push_back(s.diagonal(i, i));
    }

    /// ⊕ R/(d_i) ⊕ R^free, generators ordered torsion first.
    static FgModule from_invariants(Ring ring, const std::vector<Rational>& torsion, std::size_t free)
    {
        Matrix rel(ring, torsion.size() + free, torsion.size());
        for (std::size_t i = 0; i < torsion.size(); ++i)
            rel.set(i, i, torsion[i]);
        return FgModule(std::move(rel));
    }

    const Ring& ring() const { return relations_.ring(); }
    std::size_t generators() const { return relations_.rows(); }
    const Matrix& relations() const { return relations_; }
    std::size_t free_rank() const { return free_rank_; }
    const std::vector<Rational>& torsion() const { return torsion_; }
    bool is_zero() const { return free_rank_ == 0 && torsion_.empty(); }

    friend bool isomorphic(const FgModule& a, const FgModule& b)
    {
        return a.ring() == b.ring() && a.free_rank_ == b.free_rank_ && a.torsion_ == b.torsion_;
    }

    friend bool operator==(const FgModule& a, const FgModule& b) { return a.relations_ == b.relations_; }

    /// "0", "z^2 + z/2 + z/6", "fp:5^3".
    std::string describe() const
    {
        if (is_zero())
            return "0";
        std::string base = ring().name();
        std::string out;
        if (free_rank_ > 0)
            out = base + (free_rank_ == 1 ? "" : "^" + std::to_string(free_rank_));
        for (const auto& t : torsion_)
            out += (out.empty() ? "" : " + ") + base + "/" + numerator(t).str();
        return out;
    }

private:
    Matrix relations_;
    std::size_t free_rank_ = 0;
    std::vector<Rational> torsion_;
};

/// Homomorphism given on generators: column j is the image of generator j.
struct ModuleMap
{
    FgModule source;
    FgModule target;
    Matrix matrix;

    /// Throws unless the shapes match and relations map into relations.
    void validate() const
    {
        if (matrix.rows() != target.generators() || matrix.cols() != source.generators())
            throw InvalidInput("module map shape " + matrix.shape() + " does not match generators");
        if (source.relations().cols() > 0) {
            Matrix image = matrix * source.relations();
            if (!column_span_contains(target.relations(), image))
                throw InvalidInput("module map does not respect relations");
        }
    }
};

/// Submodule of `ambient` spanned by the columns of `generators` (taken
/// modulo the ambient relations).
struct Submodule
{
    FgModule ambient;
    Matrix generators;

    bool contains(const Submodule& other) const
    {
        Matrix span = Matrix::hstack(generators, ambient.relations());
        return column_span_contains(span, other.generators);
    }

    friend bool operator==(const Submodule& a, const Submodule& b) { return a.contains(b) && b.contains(a); }

    static Submodule whole(const FgModule& m) { return {m, Matrix::identity(m.ring(), m.generators())}; }
};

inline Submodule image(const ModuleMap& f) { return {f.target, f.matrix}; }

/// Elements x of the source (as generator combinations) with f(x) = 0.
inline Submodule kernel(const ModuleMap& f)
{
    Matrix combined = Matrix::hstack(f.matrix, f.target.relations());
    Matrix k = kernel_basis(combined);
    return {f.source, k.block(0, f.source.generators(), 0, k.cols())};
}

inline bool is_surjective(const ModuleMap& f)
{
    return is_surjective_matrix(Matrix::hstack(f.matrix, f.target.relations()));
}

inline bool is_injective(const ModuleMap& f)
{
    Submodule k = kernel(f);
    Submodule zero{f.source, Matrix(f.source.ring(), f.source.generators(), 0)};
    return zero.contains(k);
}

inline bool is_isomorphism(const ModuleMap& f) { return is_surjective(f) && is_injective(f); }

} // namespace microlocal::exactalg
