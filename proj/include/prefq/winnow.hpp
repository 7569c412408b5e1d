#ifndef PREFQ_WINNOW_HPP_
#define PREFQ_WINNOW_HPP_

#include "prefq/algebra.hpp"
#include "prefq/errors.hpp"
#include "prefq/instance.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace prefq {

enum class WinnowAlgorithm
{
    Auto,           // block-nested-loop when p is an SPO, nested loop otherwise
    BlockNestedLoop, // exact only for SPOs
    NestedLoop
};

namespace detail {

inline std::vector<std::size_t> winnow_nested(const PreferenceFormula& p, const Instance& r)
{
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < r.size(); ++i)
    {
        bool dominated = false;
        for (std::size_t j = 0; j < r.size() && !dominated; ++j)
            dominated = eval_ground(p, r[j], r[i]);
        if (!dominated)
            keep.push_back(i);
    }
    return keep;
}

// The window covers every tuple read so far: each one is in the window or
// dominated by a window member (transitivity), so one pass suffices.
inline std::vector<std::size_t> winnow_bnl(const PreferenceFormula& p, const Instance& r)
{
    std::vector<std::size_t> window;
    for (std::size_t i = 0; i < r.size(); ++i)
    {
        bool dominated = false;
        for (std::size_t w : window)
            if (eval_ground(p, r[w], r[i]))
            {
                dominated = true;
                break;
            }
        if (dominated)
            continue;
        std::erase_if(window, [&](std::size_t w) { return eval_ground(p, r[i], r[w]); });
        window.push_back(i);
    }
    std::sort(window.begin(), window.end());
    return window;
}

inline Instance select_rows(const Instance& r, const std::vector<std::size_t>& rows, std::string name)
{
    std::vector<Tuple> out;
    out.reserve(rows.size());
    for (std::size_t i : rows)
        out.push_back(r[i]);
    return Instance(std::move(name), r.schema(), std::move(out));
}

} // namespace detail

/// Tuples of r not dominated by any tuple of r, in r's order.
inline Instance winnow(const PreferenceRelation& p, const Instance& r,
                       WinnowAlgorithm algo = WinnowAlgorithm::Auto)
{
    require_same_schema(p.schema(), r.schema());
    if (algo == WinnowAlgorithm::Auto)
        algo = check_property(p, OrderProperty::SPO) ? WinnowAlgorithm::BlockNestedLoop : WinnowAlgorithm::NestedLoop;
    auto rows = algo == WinnowAlgorithm::BlockNestedLoop ? detail::winnow_bnl(p.formula(), r)
                                                         : detail::winnow_nested(p.formula(), r);
    return detail::select_rows(r, rows, "w(" + p.name() + "," + r.name() + ")");
}

/// A materialized winnow result and what it was computed from.
struct CachedResult
{
    PreferenceRelation preference;
    std::string relation;
    std::uint64_t version = 0;
    Instance result;
};

inline CachedResult make_cache(const PreferenceRelation& p, const Instance& r, std::uint64_t version = 0)
{
    return {p, r.name(), version, winnow(p, r)};
}

namespace detail {

inline void require_cache_for(const PreferenceRelation& p, const CachedResult& cached)
{
    require_same_schema(p.schema(), cached.result.schema());
    if (!(p.dnf() == cached.preference.dnf()) && !equivalent(p.formula(), cached.preference.formula()))
        throw StaleCache("cached result was computed under a different preference");
}

} // namespace detail

/// w(r + delta) from w(r), valid for SPOs.
inline Instance winnow_insert(const PreferenceRelation& p, const CachedResult& cached, const Instance& delta)
{
    detail::require_cache_for(p, cached);
    require_same_schema(p.schema(), delta.schema());
    if (!check_property(p, OrderProperty::SPO))
        throw NotSPO();
    return winnow(p, set_union(cached.result, delta), WinnowAlgorithm::BlockNestedLoop);
}

/// A subset of w(r - deleted); not exact in general.
inline Instance winnow_delete_bound(const CachedResult& cached, const Instance& deleted)
{
    require_same_schema(cached.result.schema(), deleted.schema());
    return set_difference(cached.result, deleted);
}

struct RefineResult
{
    Instance result;
    bool reused = false;
};

/// Re-evaluates under p_new, filtering the cached result when p_new extends
/// the cached preference and both are SPOs.
inline RefineResult winnow_refine(const PreferenceRelation& p_new, const CachedResult& cached, const Instance& r)
{
    require_same_schema(p_new.schema(), r.schema());
    require_same_schema(p_new.schema(), cached.preference.schema());
    if (cached.relation != r.name())
        throw StaleCache("cached result belongs to relation '" + cached.relation + "', not '" + r.name() + "'");
    const auto& p_old = cached.preference;
    if (contains(p_new, p_old) && check_property(p_new, OrderProperty::SPO) &&
        check_property(p_old, OrderProperty::SPO))
    {
        Instance out = winnow(p_new, cached.result, WinnowAlgorithm::BlockNestedLoop);
        return {out.renamed("w(" + p_new.name() + "," + r.name() + ")"), true};
    }
    return {winnow(p_new, r), false};
}

/// rank[i] is the iterated-winnow layer (from 1) of r[i].
struct RankAssignment
{
    std::vector<std::size_t> rank;

    std::size_t operator[](std::size_t i) const { return rank[i]; }
    std::size_t layers() const { return rank.empty() ? 0 : *std::max_element(rank.begin(), rank.end()); }
};

namespace detail {

inline bool finite_spo(const PreferenceFormula& p, const Instance& r)
{
    const std::size_t n = r.size();
    std::vector<char> e(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            e[i * n + j] = eval_ground(p, r[i], r[j]);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (e[i * n + i])
            return false;
        for (std::size_t j = 0; j < n; ++j)
            if (e[i * n + j])
                for (std::size_t k = 0; k < n; ++k)
                    if (e[j * n + k] && !e[i * n + k])
                        return false;
    }
    return true;
}

} // namespace detail

inline RankAssignment rank(const PreferenceRelation& p, const Instance& r)
{
    require_same_schema(p.schema(), r.schema());
    if (!detail::finite_spo(p.formula(), r))
        throw NotSPO();
    RankAssignment out;
    out.rank.assign(r.size(), 0);
    std::vector<std::size_t> residue(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        residue[i] = i;
    for (std::size_t layer = 1; !residue.empty(); ++layer)
    {
        std::vector<std::size_t> top, rest;
        for (std::size_t i : residue)
        {
            bool dominated = false;
            for (std::size_t j : residue)
                if (eval_ground(p.formula(), r[j], r[i]))
                {
                    dominated = true;
                    break;
                }
            (dominated ? rest : top).push_back(i);
        }
        for (std::size_t i : top)
            out.rank[i] = layer;
        residue = std::move(rest);
    }
    return out;
}

} // namespace prefq

#endif // PREFQ_WINNOW_HPP_
