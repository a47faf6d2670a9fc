#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "microlocal/exactalg.hpp"

namespace microlocal::cellsheaf {

using exactalg::ChainComplex;
using exactalg::ChainMap;
using exactalg::Matrix;
using exactalg::Ring;

/// Sorted vertex ids of a simplex.
using Cell = std::vector<std::size_t>;

/// Sorted, duplicate-free list of cell indices.
using CellSet = std::vector<std::size_t>;

inline bool set_contains(const CellSet& s, std::size_t i) { return std::binary_search(s.begin(), s.end(), i); }

inline CellSet set_difference(const CellSet& a, const CellSet& b)
{
    CellSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline CellSet set_intersection(const CellSet& a, const CellSet& b)
{
    CellSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline CellSet set_union(const CellSet& a, const CellSet& b)
{
    CellSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline std::string cell_label(const Cell& c)
{
    std::string s = "(";
    for (std::size_t i = 0; i < c.size(); ++i)
        s += (i ? "," : "") + std::to_string(c[i]);
    return s + ")";
}

/// Finite simplicial complex with exact vertex coordinates in ℚ^n. Cells are
/// all faces of the given simplices (every vertex is a cell), indexed in
/// (dimension, lexicographic) order.
class SimplicialComplex
{
public:
    SimplicialComplex(std::vector<std::vector<Rational>> coordinates, const std::vector<Cell>& simplices)
        : coords_(std::move(coordinates))
    {
        if (coords_.empty())
            throw InvalidInput("complex needs at least one vertex");
        ambient_ = coords_.front().size();
        for (auto& c : coords_)
            if (c.size() != ambient_)
                throw InvalidInput("vertex coordinates have inconsistent dimensions");
        std::map<std::pair<std::size_t, Cell>, int> all;
        for (std::size_t v = 0; v < coords_.size(); ++v)
            all[{1, Cell{v}}] = 0;
        for (Cell s : simplices) {
            std::sort(s.begin(), s.end());
            if (s.empty() || std::adjacent_find(s.begin(), s.end()) != s.end())
                throw InvalidInput("simplex " + cell_label(s) + " is empty or repeats a vertex");
            if (s.back() >= coords_.size())
                throw InvalidInput("simplex " + cell_label(s) + " uses an unknown vertex");
            if (s.size() > 16)
                throw InvalidInput("simplex dimension too large");
            for (std::size_t mask = 1; mask < (std::size_t(1) << s.size()); ++mask) {
                Cell f;
                for (std::size_t i = 0; i < s.size(); ++i)
                    if (mask & (std::size_t(1) << i))
                        f.push_back(s[i]);
                all[{f.size(), f}] = 0;
            }
        }
        for (auto& [key, unused] : all) {
            index_[key.second] = cells_.size();
            cells_.push_back(key.second);
        }
        facets_.resize(cells_.size());
        cofacets_.resize(cells_.size());
        cofaces_.resize(cells_.size());
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            const Cell& c = cells_[i];
            if (c.size() > 1)
                for (std::size_t k = 0; k < c.size(); ++k) {
                    Cell f = c;
                    f.erase(f.begin() + std::ptrdiff_t(k));
                    std::size_t j = index_.at(f);
                    facets_[i].push_back({j, k % 2 == 0 ? 1 : -1});
                    cofacets_[j].push_back(i);
                }
        }
        for (std::size_t i = 0; i < cells_.size(); ++i)
            for (std::size_t j = 0; j < cells_.size(); ++j)
                if (i != j && is_face(i, j))
                    cofaces_[i].push_back(j);
        for (std::size_t i = 0; i < cells_.size(); ++i)
            check_nondegenerate(i);
        classify_boundary();
    }

    std::size_t ambient_dimension() const { return ambient_; }
    std::size_t vertex_count() const { return coords_.size(); }
    std::size_t size() const { return cells_.size(); }
    const Cell& cell(std::size_t i) const { return cells_[i]; }
    int dim(std::size_t i) const { return int(cells_[i].size()) - 1; }
    const std::vector<Rational>& coordinates(std::size_t v) const { return coords_[v]; }
    std::string label(std::size_t i) const { return cell_label(cells_[i]); }

    /// Largest cell dimension.
    int dimension() const { return dim(cells_.size() - 1); }

    std::optional<std::size_t> find(Cell c) const
    {
        std::sort(c.begin(), c.end());
        auto it = index_.find(c);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    std::size_t vertex_cell(std::size_t v) const { return index_.at(Cell{v}); }

    /// Codimension-one faces with incidence signs (-1)^position.
    const std::vector<std::pair<std::size_t, int>>& facets(std::size_t i) const { return facets_[i]; }
    const std::vector<std::size_t>& cofacets(std::size_t i) const { return cofacets_[i]; }
    /// All proper cofaces, ascending.
    const std::vector<std::size_t>& cofaces(std::size_t i) const { return cofaces_[i]; }

    /// a ≤ b in the face order.
    bool is_face(std::size_t a, std::size_t b) const
    {
        return std::includes(cells_[b].begin(), cells_[b].end(), cells_[a].begin(), cells_[a].end());
    }

    /// Open star: the cell and all its cofaces.
    CellSet star(std::size_t i) const
    {
        CellSet s = cofaces_[i];
        s.push_back(i);
        std::sort(s.begin(), s.end());
        return s;
    }

    CellSet all_cells() const
    {
        CellSet s(cells_.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = i;
        return s;
    }

    /// Smallest face-closed set containing `cells`.
    CellSet closure(const CellSet& cells) const
    {
        std::vector<bool> in(cells_.size(), false);
        for (auto c : cells)
            for (std::size_t j = 0; j < cells_.size(); ++j)
                if (!in[j] && is_face(j, c))
                    in[j] = true;
        CellSet out;
        for (std::size_t j = 0; j < in.size(); ++j)
            if (in[j])
                out.push_back(j);
        return out;
    }

    /// Coface-closed: the combinatorial model of an open set.
    bool is_open(const CellSet& cells) const
    {
        for (auto c : cells)
            for (auto t : cofaces_[c])
                if (!set_contains(cells, t))
                    return false;
        return true;
    }

    bool is_closed(const CellSet& cells) const
    {
        for (auto c : cells)
            for (auto [f, sign] : facets_[c])
                if (!set_contains(cells, f))
                    return false;
        return true;
    }

    /// Pure, and every codimension-one cell lies in one or two top cells.
    bool is_pseudomanifold() const { return pseudomanifold_; }

    /// In the closure of a codimension-one cell with a single top coface.
    bool is_boundary(std::size_t i) const { return boundary_[i]; }

    const std::vector<std::vector<Rational>>& all_coordinates() const { return coords_; }
    const std::vector<Cell>& cells() const { return cells_; }

private:
    void check_nondegenerate(std::size_t i)
    {
        const Cell& c = cells_[i];
        if (c.size() < 2)
            return;
        Ring q = Ring::rationals();
        Matrix m(q, c.size() - 1, ambient_);
        for (std::size_t k = 1; k < c.size(); ++k)
            for (std::size_t j = 0; j < ambient_; ++j)
                m.set(k - 1, j, coords_[c[k]][j] - coords_[c[0]][j]);
        if (exactalg::rank(m) != c.size() - 1)
            throw InvalidInput("degenerate geometry: simplex " + cell_label(c) + " is not affinely independent");
    }

    void classify_boundary()
    {
        const int top = dimension();
        boundary_.assign(cells_.size(), false);
        pseudomanifold_ = true;
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            if (dim(i) < top && cofacets_[i].empty())
                pseudomanifold_ = false;
            if (top > 0 && dim(i) == top - 1) {
                if (cofacets_[i].size() > 2)
                    pseudomanifold_ = false;
                if (cofacets_[i].size() == 1)
                    for (std::size_t j = 0; j < cells_.size(); ++j)
                        if (is_face(j, i))
                            boundary_[j] = true;
            }
        }
    }

    std::vector<std::vector<Rational>> coords_;
    std::size_t ambient_ = 0;
    std::vector<Cell> cells_;
    std::map<Cell, std::size_t> index_;
    std::vector<std::vector<std::pair<std::size_t, int>>> facets_;
    std::vector<std::vector<std::size_t>> cofacets_;
    std::vector<std::vector<std::size_t>> cofaces_;
    std::vector<bool> boundary_;
    bool pseudomanifold_ = true;
};

/// Coface-closed cell set (validated on construction).
class OpenCellSet
{
public:
    OpenCellSet() = default;

    OpenCellSet(const SimplicialComplex& k, CellSet cells) : cells_(std::move(cells))
    {
        std::sort(cells_.begin(), cells_.end());
        cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
        for (auto c : cells_)
            if (c >= k.size())
                throw InvalidInput("cell index out of range");
        if (!k.is_open(cells_))
            throw InvalidInput("cell set is not coface-closed, so it does not model an open set");
    }

    static OpenCellSet everything(const SimplicialComplex& k) { return OpenCellSet(k, k.all_cells()); }
    static OpenCellSet star(const SimplicialComplex& k, std::size_t i) { return OpenCellSet(k, k.star(i)); }

    const CellSet& cells() const { return cells_; }
    bool contains(std::size_t i) const { return set_contains(cells_, i); }
    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }

    friend OpenCellSet intersect(const OpenCellSet& a, const OpenCellSet& b)
    {
        OpenCellSet out;
        out.cells_ = set_intersection(a.cells_, b.cells_);
        return out;
    }

    bool operator==(const OpenCellSet&) const = default;

private:
    CellSet cells_;
};

} // namespace microlocal::cellsheaf
