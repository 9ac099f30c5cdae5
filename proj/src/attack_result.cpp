#include "gea/attack_result.hpp"

#include <algorithm>
#include <stdexcept>

#include "gea/rng.hpp"

namespace gea {

nlohmann::json AttackResult::to_json() const {
    nlohmann::json j;
    j["attack"] = attack;
    j["seed"] = seed;
    j["accuracy"] = metrics.accuracy;
    j["advantage"] = metrics.advantage;
    j["accuracy_above_chance"] = metrics.accuracy_above_chance;
    j["support_positive"] = metrics.support_positive;
    j["support_negative"] = metrics.support_negative;
    if (metrics.auc) j["auc"] = *metrics.auc;
    if (metrics.ap) j["average_precision"] = *metrics.ap;
    if (metrics.f1) j["f1_macro"] = *metrics.f1;
    if (has_threshold) j["threshold"] = threshold;
    if (!threshold_curve.empty()) {
        nlohmann::json curve = nlohmann::json::array();
        for (const auto& [t, a] : threshold_curve) curve.push_back({{"threshold", t}, {"accuracy", a}});
        j["threshold_curve"] = curve;
    }
    j["params"] = params.is_null() ? nlohmann::json::object() : params;
    return j;
}

MembershipEval balanced_membership_eval(const Graph& g, std::uint64_t seed) {
    std::vector<int> members = g.train_nodes();
    std::vector<int> nonmembers = g.test_nodes();
    if (members.empty() || nonmembers.empty())
        throw std::invalid_argument("balanced_membership_eval: graph needs train and test masks");

    Rng rng(seed);
    auto subsample = [&rng](std::vector<int>& v, size_t k) {
        for (size_t i = v.size() - 1; i > 0; --i)
            std::swap(v[i], v[static_cast<size_t>(rng.uniform_int(i + 1))]);
        v.resize(k);
        std::sort(v.begin(), v.end());
    };
    const size_t k = std::min(members.size(), nonmembers.size());
    if (members.size() > k) subsample(members, k);
    if (nonmembers.size() > k) subsample(nonmembers, k);

    MembershipEval eval;
    for (int id : members) {
        eval.node_ids.push_back(id);
        eval.truth.push_back(1);
    }
    for (int id : nonmembers) {
        eval.node_ids.push_back(id);
        eval.truth.push_back(0);
    }
    return eval;
}

}  // namespace gea
