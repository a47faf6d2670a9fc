#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "microlocal/towers/values.hpp"

namespace microlocal::towers {

/// Diagram ℝ^op → V constant on the strata of c_1 < … < c_k.
/// Strata are numbered 0 … 2k: index 2i is the open interval below c_{i+1}
/// (or above c_k when i = k), index 2i+1 is the point c_{i+1}.
/// down(i) is the structure map pieces[i+1] → pieces[i].
template <class Traits>
class TameTower
{
public:
    using Value = typename Traits::Value;
    using Map = typename Traits::Map;

    TameTower(std::vector<Rational> critical_values, std::vector<Value> pieces, std::vector<Map> down)
        : critical_(std::move(critical_values)), pieces_(std::move(pieces)), down_(std::move(down))
    {
        for (std::size_t i = 0; i + 1 < critical_.size(); ++i)
            if (!(critical_[i] < critical_[i + 1]))
                throw InvalidInput("critical values must be strictly increasing");
        if (pieces_.size() != 2 * critical_.size() + 1)
            throw InvalidInput("tower with " + std::to_string(critical_.size()) + " critical values needs "
                               + std::to_string(2 * critical_.size() + 1) + " pieces, got "
                               + std::to_string(pieces_.size()));
        if (down_.size() != 2 * critical_.size())
            throw InvalidInput("tower needs one structure map between consecutive strata");
        for (std::size_t i = 0; i < down_.size(); ++i) {
            try {
                Traits::validate(down_[i], pieces_[i + 1], pieces_[i]);
            } catch (const InvalidInput& e) {
                throw InvalidInput("structure map " + stratum_name(i + 1) + " -> " + stratum_name(i) + ": "
                                   + e.what());
            }
        }
    }

    static TameTower constant(const Value& v)
    {
        return TameTower({}, {v}, {});
    }

    const std::vector<Rational>& critical_values() const { return critical_; }
    const std::vector<Value>& pieces() const { return pieces_; }
    const std::vector<Map>& down_maps() const { return down_; }
    std::size_t strata() const { return pieces_.size(); }
    const Value& piece(std::size_t i) const { return pieces_[i]; }
    const Map& down(std::size_t i) const { return down_[i]; }

    std::size_t stratum_of(const Rational& s) const
    {
        std::size_t i = 0;
        for (; i < critical_.size(); ++i) {
            if (s < critical_[i])
                return 2 * i;
            if (s == critical_[i])
                return 2 * i + 1;
        }
        return 2 * i;
    }

    const Value& at(const Rational& s) const { return pieces_[stratum_of(s)]; }

    /// An exact rational inside stratum i.
    Rational representative(std::size_t i) const
    {
        const std::size_t k = critical_.size();
        if (k == 0)
            return Rational(0);
        if (i % 2 == 1)
            return critical_[i / 2];
        std::size_t j = i / 2;
        if (j == 0)
            return critical_[0] - 1;
        if (j == k)
            return critical_[k - 1] + 1;
        return (critical_[j - 1] + critical_[j]) / 2;
    }

    std::string stratum_name(std::size_t i) const
    {
        const std::size_t k = critical_.size();
        if (i % 2 == 1)
            return "{" + to_string(critical_[i / 2]) + "}";
        std::size_t j = i / 2;
        std::string lo = j == 0 ? "-inf" : to_string(critical_[j - 1]);
        std::string hi = j == k ? "+inf" : to_string(critical_[j]);
        return "(" + lo + "," + hi + ")";
    }

    /// Structure map between strata a ≤ b (pieces[b] → pieces[a]).
    Map rho_strata(std::size_t a, std::size_t b) const
    {
        if (a > b)
            throw PreconditionError("rho needs a ≤ b");
        Map m = Traits::identity(pieces_[b]);
        for (std::size_t i = b; i > a; --i)
            m = Traits::compose(down_[i - 1], m);
        return m;
    }

    /// ρ_{s,t} : X_t → X_s for s ≤ t.
    Map rho(const Rational& s, const Rational& t) const
    {
        if (t < s)
            throw PreconditionError("rho(s,t) needs s ≤ t");
        return rho_strata(stratum_of(s), stratum_of(t));
    }

private:
    std::vector<Rational> critical_;
    std::vector<Value> pieces_;
    std::vector<Map> down_;
};

template <class Traits>
struct PointComparison
{
    typename Traits::Value value;
    typename Traits::Map comparison;
    std::size_t stratum;
};

/// lim_{r<s} X_r with the canonical map X_s → lim.
template <class Traits>
PointComparison<Traits> lim_below(const TameTower<Traits>& t, const Rational& s)
{
    std::size_t i = t.stratum_of(s);
    if (i % 2 == 1)
        return {t.piece(i - 1), t.down(i - 1), i - 1};
    return {t.piece(i), Traits::identity(t.piece(i)), i};
}

/// colim_{t>s} X_t with the canonical map colim → X_s.
template <class Traits>
PointComparison<Traits> colim_above(const TameTower<Traits>& t, const Rational& s)
{
    std::size_t i = t.stratum_of(s);
    if (i % 2 == 1)
        return {t.piece(i + 1), t.down(i), i + 1};
    return {t.piece(i), Traits::identity(t.piece(i)), i};
}

/// ℕ^op tower X_0 ← X_1 ← … ← X_N, then X_n = X_N with the tail endomorphism
/// for all n ≥ N. prefix_maps[i] : X_{i+1} → X_i.
template <class Traits>
class NTower
{
public:
    using Value = typename Traits::Value;
    using Map = typename Traits::Map;

    NTower(std::vector<Value> prefix, std::vector<Map> prefix_maps, Map tail)
        : values_(std::move(prefix)), maps_(std::move(prefix_maps)), tail_(std::move(tail))
    {
        if (values_.empty())
            throw InvalidInput("tower needs at least one term");
        if (maps_.size() + 1 != values_.size())
            throw InvalidInput("tower prefix needs one map between consecutive terms");
        for (std::size_t i = 0; i < maps_.size(); ++i)
            Traits::validate(maps_[i], values_[i + 1], values_[i]);
        try {
            Traits::validate(tail_, values_.back(), values_.back());
        } catch (const InvalidInput& e) {
            throw InvalidInput(std::string("malformed periodicity declaration: ") + e.what());
        }
    }

    std::size_t periodic_from() const { return values_.size() - 1; }
    const Value& value(std::size_t n) const { return values_[std::min(n, periodic_from())]; }
    const std::vector<Value>& prefix() const { return values_; }
    const std::vector<Map>& prefix_maps() const { return maps_; }
    const Map& tail() const { return tail_; }

    /// X_{n+1} → X_n
    const Map& step(std::size_t n) const { return n < maps_.size() ? maps_[n] : tail_; }

    /// X_m → X_n for n ≤ m.
    Map map(std::size_t n, std::size_t m) const
    {
        Map out = Traits::identity(value(m));
        for (std::size_t i = m; i > n; --i)
            out = Traits::compose(step(i - 1), out);
        return out;
    }

private:
    std::vector<Value> values_;
    std::vector<Map> maps_;
    Map tail_;
};

} // namespace microlocal::towers
