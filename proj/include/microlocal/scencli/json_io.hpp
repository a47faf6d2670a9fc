#pragma once

#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "microlocal/error.hpp"
#include "microlocal/exactalg/ring.hpp"

namespace microlocal::scencli {

using json = nlohmann::json;

/// Scenario file does not match the published schema; `where` is a JSON pointer.
class SchemaError : public InvalidInput
{
public:
    SchemaError(const std::string& where, const std::string& what)
        : InvalidInput((where.empty() ? std::string("/") : where) + ": " + what), where_(where)
    {
    }

    const std::string& where() const { return where_; }

private:
    std::string where_;
};

using Grid = std::vector<std::vector<Rational>>;

/// Read-only cursor into a JSON document that knows its own pointer, so
/// every schema error names the offending location.
class Node
{
public:
    Node(const json& j, std::string path = "") : j_(&j), path_(std::move(path)) {}

    const json& raw() const { return *j_; }
    const std::string& path() const { return path_; }

    SchemaError error(const std::string& what) const { return SchemaError(path_, what); }

    const Node& object(std::initializer_list<const char*> required, std::initializer_list<const char*> optional = {}) const
    {
        if (!j_->is_object())
            throw error("expected an object");
        std::set<std::string> allowed;
        for (auto k : required) {
            allowed.insert(k);
            if (!j_->contains(k))
                throw error(std::string("missing field '") + k + "'");
        }
        for (auto k : optional)
            allowed.insert(k);
        for (auto& [k, v] : j_->items())
            if (!allowed.count(k))
                throw error("unknown field '" + k + "'");
        return *this;
    }

    bool has(const char* key) const { return j_->is_object() && j_->contains(key); }

    Node operator[](const char* key) const
    {
        if (!has(key))
            throw error(std::string("missing field '") + key + "'");
        return Node(j_->at(key), path_ + "/" + escape(key));
    }

    std::optional<Node> get(const char* key) const
    {
        if (!has(key))
            return std::nullopt;
        return (*this)[key];
    }

    std::vector<Node> array() const
    {
        if (!j_->is_array())
            throw error("expected an array");
        std::vector<Node> out;
        for (std::size_t i = 0; i < j_->size(); ++i)
            out.emplace_back((*j_)[i], path_ + "/" + std::to_string(i));
        return out;
    }

    std::vector<std::pair<std::string, Node>> entries() const
    {
        if (!j_->is_object())
            throw error("expected an object");
        std::vector<std::pair<std::string, Node>> out;
        for (auto& [k, v] : j_->items())
            out.emplace_back(k, Node(v, path_ + "/" + escape(k)));
        return out;
    }

    std::string string() const
    {
        if (!j_->is_string())
            throw error("expected a string");
        return j_->get<std::string>();
    }

    bool boolean() const
    {
        if (!j_->is_boolean())
            throw error("expected true or false");
        return j_->get<bool>();
    }

    long long integer() const
    {
        if (!j_->is_number_integer())
            throw error("expected an integer");
        return j_->get<long long>();
    }

    std::size_t index() const
    {
        long long v = integer();
        if (v < 0)
            throw error("expected a nonnegative integer");
        return std::size_t(v);
    }

    /// Exact rational written as a string "a" or "a/b".
    Rational rational() const
    {
        if (j_->is_number())
            throw error("numbers must be exact rationals written as strings, e.g. \"1/2\"");
        try {
            return parse_rational(string());
        } catch (const SchemaError&) {
            throw;
        } catch (const InvalidInput& e) {
            throw error(e.what());
        }
    }

    std::vector<Rational> rationals() const
    {
        std::vector<Rational> out;
        for (auto& n : array())
            out.push_back(n.rational());
        return out;
    }

    std::vector<std::size_t> indices() const
    {
        std::vector<std::size_t> out;
        for (auto& n : array())
            out.push_back(n.index());
        return out;
    }

    /// Matrix as a list of rows; `rows`×`cols` enforced.
    Grid grid(std::size_t rows, std::size_t cols) const
    {
        auto rs = array();
        if (rs.size() != rows)
            throw error("expected " + std::to_string(rows) + " rows, got " + std::to_string(rs.size()));
        Grid g;
        for (auto& r : rs) {
            auto row = r.rationals();
            if (row.size() != cols)
                throw r.error("expected " + std::to_string(cols) + " entries, got " + std::to_string(row.size()));
            g.push_back(std::move(row));
        }
        return g;
    }

    /// Matrix whose column count is taken from its first row.
    Grid grid() const
    {
        auto rs = array();
        std::size_t cols = rs.empty() ? 0 : rs.front().array().size();
        return grid(rs.size(), cols);
    }

private:
    static std::string escape(const std::string& key)
    {
        std::string out;
        for (char c : key) {
            if (c == '~')
                out += "~0";
            else if (c == '/')
                out += "~1";
            else
                out += c;
        }
        return out;
    }

    const json* j_;
    std::string path_;
};

inline json to_json(const Rational& x) { return to_string(x); }

inline json to_json(const std::vector<Rational>& v)
{
    json a = json::array();
    for (auto& x : v)
        a.push_back(to_json(x));
    return a;
}

inline json to_json(const Grid& g)
{
    json a = json::array();
    for (auto& row : g)
        a.push_back(to_json(row));
    return a;
}

inline json to_json_indices(const std::vector<std::size_t>& v)
{
    json a = json::array();
    for (auto x : v)
        a.push_back(x);
    return a;
}

} // namespace microlocal::scencli
