#include "meronomy/aspects.hpp"

#include <algorithm>

#include "meronomy/common.hpp"

namespace meronomy {

namespace {

double sorted_mean(std::vector<double>& values)
{
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values)
        sum += v;
    return sum / static_cast<double>(values.size());
}

} // namespace

AspectAggregation aggregate_aspect_votes(const std::map<std::string, std::vector<VoteTriple>>& votes,
                                         const AspectThresholds& thresholds)
{
    const std::size_t floor = std::max<std::size_t>(thresholds.min_votes, 1);
    std::vector<const std::pair<const std::string, std::vector<VoteTriple>>*> entries;
    AspectAggregation out;
    for (const auto& entry : votes) {
        if (entry.second.size() < floor) {
            out.warnings.push_back("entity '" + entry.first + "' has " + std::to_string(entry.second.size()) +
                                   " vote(s), below the minimum of " + std::to_string(floor));
            continue;
        }
        entries.push_back(&entry);
    }

    out.decisions.resize(entries.size());
    const auto n = static_cast<std::ptrdiff_t>(entries.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto& [entity, list] = *entries[static_cast<std::size_t>(i)];
        std::vector<double> pa;
        std::vector<double> p2;
        pa.reserve(list.size());
        p2.reserve(list.size());
        for (const auto& v : list) {
            pa.push_back(v.aspect_mass());
            p2.push_back(v.p2);
        }
        AspectDecision d;
        d.entity = entity;
        d.n_votes = list.size();
        d.mean_pa = sorted_mean(pa);
        d.mean_p2 = sorted_mean(p2);
        d.is_aspect = d.mean_pa > thresholds.aspect;
        d.is_product = d.is_aspect && d.mean_p2 > thresholds.product;
        out.decisions[static_cast<std::size_t>(i)] = std::move(d);
    }

    std::sort(out.decisions.begin(), out.decisions.end(), [](const AspectDecision& a, const AspectDecision& b) {
        if (a.n_votes != b.n_votes)
            return a.n_votes > b.n_votes;
        return a.entity < b.entity;
    });
    return out;
}

std::map<std::string, std::vector<VoteTriple>> group_aspect_votes(std::span<const ScoreRecord> records)
{
    std::map<std::string, std::vector<VoteTriple>> out;
    for (const auto& r : records) {
        if (r.task == Task::aspect)
            out[r.subject.at(0)].push_back(r.votes);
    }
    return out;
}

std::vector<std::string> feature_aspects(std::span<const AspectDecision> decisions)
{
    std::vector<std::string> out;
    for (const auto& d : decisions) {
        if (d.is_aspect && !d.is_product)
            out.push_back(d.entity);
    }
    return out;
}

std::vector<std::string> product_aspects(std::span<const AspectDecision> decisions)
{
    std::vector<std::string> out;
    for (const auto& d : decisions) {
        if (d.is_product)
            out.push_back(d.entity);
    }
    return out;
}

nlohmann::json decisions_to_json(std::span<const AspectDecision> decisions)
{
    auto arr = nlohmann::json::array();
    for (const auto& d : decisions) {
        arr.push_back({{"entity", d.entity},
                       {"n_votes", d.n_votes},
                       {"mean_pa", d.mean_pa},
                       {"mean_p2", d.mean_p2},
                       {"is_aspect", d.is_aspect},
                       {"is_product", d.is_product}});
    }
    return arr;
}

std::vector<AspectDecision> decisions_from_json(const nlohmann::json& j)
{
    std::vector<AspectDecision> out;
    try {
        for (const auto& e : j) {
            AspectDecision d;
            d.entity = e.at("entity").get<std::string>();
            d.n_votes = e.at("n_votes").get<std::size_t>();
            d.mean_pa = e.at("mean_pa").get<double>();
            d.mean_p2 = e.at("mean_p2").get<double>();
            d.is_aspect = e.at("is_aspect").get<bool>();
            d.is_product = e.at("is_product").get<bool>();
            if (d.is_product && !d.is_aspect)
                throw DataError("product aspect '" + d.entity + "' is not marked as an aspect");
            out.push_back(std::move(d));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed aspect decisions: ") + e.what());
    }
    return out;
}

} // namespace meronomy
