#pragma once

#include <map>
#include <set>

#include "microlocal/cellsheaf/complex.hpp"

namespace microlocal::microsupport {

using cellsheaf::Cell;
using cellsheaf::CellSet;
using cellsheaf::SimplicialComplex;
using exactalg::Matrix;
using exactalg::Ring;
using Vector = std::vector<Rational>;

inline Rational dot(const Vector& a, const Vector& b)
{
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline Vector axpy(const Vector& x, const Rational& a, const Vector& y)
{
    Vector out = x;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] += a * y[i];
    return out;
}

inline std::string vector_label(const Vector& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + to_string(v[i]);
    return s + ")";
}

/// A covector at a cell: direction in (ℝ^n)* annihilating the cell's tangent space.
struct Covector
{
    std::size_t cell;
    Vector direction;
};

/// Relatively open cone of the fan: the covectors with a fixed sign pattern
/// against the star vertices.
struct Cone
{
    int dimension = 0;
    std::vector<int> signs; // sign of ξ·(w − b), one per fan vertex
    std::vector<Vector> span;
    Vector representative;
};

/// Decomposition of the conormal space N_σ by the hyperplanes ξ·(w − b) = 0,
/// w a vertex of star(σ) outside σ, b a vertex of σ.
struct ConormalFan
{
    std::size_t cell = 0;
    Vector base;
    std::vector<Vector> conormal_basis;
    std::vector<std::size_t> vertices;
    std::vector<Vector> offsets; // w − b, aligned with `vertices`
    std::vector<Cone> cones;     // ordered by (dimension, signs)

    bool is_conormal(const SimplicialComplex& k, const Vector& xi) const
    {
        if (xi.size() != base.size())
            return false;
        for (auto v : k.cell(cell)) {
            Vector d = k.coordinates(v);
            for (std::size_t i = 0; i < d.size(); ++i)
                d[i] -= base[i];
            if (dot(xi, d) != 0)
                return false;
        }
        return true;
    }

    std::vector<int> sign_vector(const Vector& xi) const
    {
        std::vector<int> s;
        for (auto& o : offsets) {
            Rational x = dot(xi, o);
            s.push_back(x > 0 ? 1 : x < 0 ? -1 : 0);
        }
        return s;
    }

    /// Index of the cone containing a conormal covector.
    std::size_t locate(const Vector& xi) const
    {
        auto s = sign_vector(xi);
        for (std::size_t i = 0; i < cones.size(); ++i)
            if (cones[i].signs == s)
                return i;
        throw PreconditionError("covector " + vector_label(xi) + " lies in no cone of the fan");
    }

    /// Is cone i contained in the closure of cone j?
    bool in_closure(std::size_t i, std::size_t j) const
    {
        for (std::size_t h = 0; h < offsets.size(); ++h)
            if (cones[i].signs[h] != 0 && cones[i].signs[h] != cones[j].signs[h])
                return false;
        return true;
    }

    /// Generators of the closed cone: ± a basis of the lineality space, then
    /// the representatives of the minimal faces above it.
    std::vector<Vector> generators(std::size_t j) const
    {
        const Cone& lineality = cones.front();
        std::vector<Vector> out;
        for (auto& b : lineality.span) {
            out.push_back(b);
            Vector neg = b;
            for (auto& x : neg)
                x = -x;
            out.push_back(neg);
        }
        for (std::size_t i = 0; i < cones.size(); ++i)
            if (cones[i].dimension == lineality.dimension + 1 && in_closure(i, j))
                out.push_back(cones[i].representative);
        return out;
    }
};

namespace detail {

/// Columns of a kernel basis as vectors.
inline std::vector<Vector> kernel_vectors(const Matrix& m)
{
    Matrix kb = exactalg::kernel_basis(m);
    std::vector<Vector> out;
    for (std::size_t j = 0; j < kb.cols(); ++j)
        out.push_back(kb.column(j));
    return out;
}

inline Vector primitive(Vector v)
{
    Integer l = 1, g = 0;
    for (auto& x : v)
        l = boost::multiprecision::lcm(l, Integer(denominator(x)));
    for (auto& x : v) {
        x *= l;
        g = boost::multiprecision::gcd(g, Integer(numerator(x)));
    }
    if (g > 1)
        for (auto& x : v)
            x /= Rational(g);
    return v;
}

class FanBuilder
{
public:
    FanBuilder(const ConormalFan& fan, std::size_t n) : fan_(fan), n_(n) {}

    std::map<std::vector<int>, std::pair<int, std::vector<Vector>>> faces;
    std::map<std::vector<int>, Vector> points;

    void run() { chambers(std::set<std::size_t>{}); }

private:
    /// Basis of N_σ ∩ ⋂_{w ∈ zero} H_w.
    std::vector<Vector> flat(const std::set<std::size_t>& zero) const
    {
        const auto& b = fan_.conormal_basis;
        if (b.empty() || zero.empty())
            return b;
        Matrix m(Ring::rationals(), zero.size(), b.size());
        std::size_t r = 0;
        for (auto w : zero) {
            for (std::size_t j = 0; j < b.size(); ++j)
                m.set(r, j, dot(fan_.offsets[w], b[j]));
            ++r;
        }
        std::vector<Vector> out;
        for (auto& c : kernel_vectors(m)) {
            Vector v(n_, Rational(0));
            for (std::size_t j = 0; j < b.size(); ++j)
                v = axpy(v, c[j], b[j]);
            out.push_back(v);
        }
        return out;
    }

    std::set<std::size_t> vanishing(const std::vector<Vector>& basis) const
    {
        std::set<std::size_t> z;
        for (std::size_t w = 0; w < fan_.offsets.size(); ++w) {
            bool all = true;
            for (auto& v : basis)
                all = all && dot(fan_.offsets[w], v) == 0;
            if (all)
                z.insert(w);
        }
        return z;
    }

    /// Records one point per chamber of the arrangement restricted to the
    /// flat cut out by `zero`, recursing into the lower flats first. Returns
    /// the chamber points.
    std::vector<Vector> chambers(const std::set<std::size_t>& zero)
    {
        auto memo = done_.find(zero);
        if (memo != done_.end())
            return memo->second;
        std::vector<Vector> basis = flat(zero);
        std::set<std::size_t> closed = vanishing(basis);
        std::vector<Vector> out;
        if (closed.size() == fan_.offsets.size()) {
            Vector p = basis.empty() ? Vector(n_, Rational(0)) : basis.front();
            out.push_back(p);
        } else {
            std::set<std::vector<int>> seen;
            for (std::size_t w = 0; w < fan_.offsets.size(); ++w) {
                if (closed.count(w))
                    continue;
                std::set<std::size_t> lower = closed;
                lower.insert(w);
                std::vector<Vector> below = chambers(vanishing(flat(lower)));
                // a direction inside the flat leaving the hyperplane
                Vector normal;
                for (auto& v : basis)
                    if (dot(fan_.offsets[w], v) != 0) {
                        normal = v;
                        break;
                    }
                for (auto& q : below) {
                    Rational eps = 1;
                    for (auto& o : fan_.offsets) {
                        Rational a = dot(o, q), c = dot(o, normal);
                        if (a != 0 && c != 0)
                            eps = std::min(eps, Rational(abs(a) / (2 * abs(c))));
                    }
                    for (int side : {1, -1}) {
                        Vector p = axpy(q, eps * side, normal);
                        if (seen.insert(fan_.sign_vector(p)).second)
                            out.push_back(p);
                    }
                }
            }
        }
        for (auto& p : out) {
            auto s = fan_.sign_vector(p);
            if (!faces.count(s)) {
                faces[s] = {int(basis.size()), basis};
                points[s] = p;
            }
        }
        done_.emplace(zero, out);
        return out;
    }

    const ConormalFan& fan_;
    std::size_t n_;
    std::map<std::set<std::size_t>, std::vector<Vector>> done_;
};

/// Least nonzero primitive integer vector of the face, ordered by max-norm
/// then lexicographically; falls back to the primitive multiple of `point`.
inline Vector representative(const ConormalFan& fan, const SimplicialComplex& k, const std::vector<int>& signs,
                             int dimension, const Vector& point)
{
    std::size_t n = point.size();
    if (dimension == 0)
        return Vector(n, Rational(0));
    const int bound = 2;
    for (int norm = 1; norm <= bound; ++norm) {
        std::vector<int> x(n, -norm);
        while (true) {
            int mx = 0;
            for (int c : x)
                mx = std::max(mx, std::abs(c));
            if (mx == norm) {
                Vector v;
                for (int c : x)
                    v.emplace_back(c);
                if (v == primitive(v) && fan.is_conormal(k, v) && fan.sign_vector(v) == signs)
                    return v;
            }
            std::size_t i = n;
            while (i > 0 && x[i - 1] == norm)
                x[--i] = -norm;
            if (i == 0)
                break;
            ++x[i - 1];
        }
    }
    return primitive(point);
}

} // namespace detail

/// The conormal fan at a cell. Boundary cells need `allow_boundary`.
inline ConormalFan conormal_fan(const SimplicialComplex& k, std::size_t cell, bool allow_boundary = false)
{
    if (cell >= k.size())
        throw InvalidInput("cell index out of range");
    if (k.is_boundary(cell) && !allow_boundary)
        throw PreconditionError("cell " + k.label(cell) + " lies on the boundary");
    const std::size_t n = k.ambient_dimension();
    ConormalFan fan;
    fan.cell = cell;
    const Cell& c = k.cell(cell);
    fan.base = k.coordinates(c.front());
    auto offset = [&](std::size_t v) {
        Vector d = k.coordinates(v);
        for (std::size_t i = 0; i < n; ++i)
            d[i] -= fan.base[i];
        return d;
    };
    if (c.size() > 1) {
        Matrix t(Ring::rationals(), c.size() - 1, n);
        for (std::size_t r = 1; r < c.size(); ++r) {
            Vector d = offset(c[r]);
            for (std::size_t j = 0; j < n; ++j)
                t.set(r - 1, j, d[j]);
        }
        fan.conormal_basis = detail::kernel_vectors(t);
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            Vector e(n, Rational(0));
            e[j] = 1;
            fan.conormal_basis.push_back(e);
        }
    }
    std::set<std::size_t> verts;
    for (auto t : k.star(cell))
        for (auto v : k.cell(t))
            if (!std::binary_search(c.begin(), c.end(), v))
                verts.insert(v);
    for (auto v : verts) {
        fan.vertices.push_back(v);
        fan.offsets.push_back(offset(v));
    }

    detail::FanBuilder b(fan, n);
    b.run();
    for (auto& [signs, face] : b.faces) {
        Cone cone;
        cone.dimension = face.first;
        cone.signs = signs;
        cone.span = face.second;
        cone.representative = detail::representative(fan, k, signs, cone.dimension, b.points.at(signs));
        fan.cones.push_back(std::move(cone));
    }
    std::sort(fan.cones.begin(), fan.cones.end(), [](const Cone& a, const Cone& b) {
        return a.dimension != b.dimension ? a.dimension < b.dimension : a.signs < b.signs;
    });
    return fan;
}

} // namespace microlocal::microsupport
