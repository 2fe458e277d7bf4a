#pragma once

#include <json.hpp>

#include "exponents.hpp"
#include "multiindex.hpp"

namespace rough_taylor {

inline nlohmann::json to_json(const IndexSet& set) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& w : set.members) members.push_back(w);
    return {{"m", set.alphabet_size}, {"members", members}};
}

inline IndexSet index_set_from_json(const nlohmann::json& j) {
    if (!j.contains("m") || !j.contains("members")) throw config_error("IndexSet JSON needs {m, members}");
    const int m = j.at("m").get<int>();
    std::set<MultiIndex> words;
    for (const auto& w : j.at("members")) words.insert(w.get<MultiIndex>());
    return IndexSet(std::move(words), m);
}

inline nlohmann::json to_json(const ExponentVector& e) {
    return {{"mode", e.mode == ExponentVector::Mode::HOLDER ? "holder" : "hurst"}, {"values", e.values}};
}

inline ExponentVector exponent_vector_from_json(const nlohmann::json& j) {
    const std::string mode = j.at("mode").get<std::string>();
    auto values = j.at("values").get<std::vector<double>>();
    if (mode == "holder") return ExponentVector::holder(std::move(values));
    if (mode == "hurst") return ExponentVector::hurst(std::move(values));
    throw config_error("ExponentVector mode must be 'holder' or 'hurst'");
}

}  // namespace rough_taylor
