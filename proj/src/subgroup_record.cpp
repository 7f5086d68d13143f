#include "gradientlab/subgroup_record.hpp"

namespace gradientlab {

SubgroupRecord make_record(CosetTable table, std::string provenance) {
  SubgroupRecord r{std::move(table), false, std::nullopt, std::nullopt, std::move(provenance)};
  r.normal = is_normal(r.table);
  return r;
}

void ensure_derived(SubgroupRecord& r, const std::set<std::uint64_t>& primes) {
  if (!r.rs_presentation) r.rs_presentation = subgroup_presentation(r.table);
  if (!r.abelian) {
    r.abelian = abelian_data(r.rs_presentation->presentation, primes);
    return;
  }
  std::set<std::uint64_t> missing;
  for (auto q : primes)
    if (!r.abelian->d_p_by_prime.count(q)) missing.insert(q);
  if (!missing.empty()) {
    auto extra = abelian_data(r.rs_presentation->presentation, missing);
    r.abelian->d_p_by_prime.insert(extra.d_p_by_prime.begin(), extra.d_p_by_prime.end());
  }
}

const AbelianData& derived_abelian(SubgroupRecord& r, const std::set<std::uint64_t>& primes) {
  ensure_derived(r, primes);
  return *r.abelian;
}

nlohmann::json to_json(const SubgroupRecord& r) {
  nlohmann::json j = {{"index", r.index()}, {"normal", r.normal}, {"provenance", r.provenance}};
  nlohmann::json words = nlohmann::json::array();
  for (const auto& w : r.table.subgroup().generators)
    words.push_back(r.table.ambient().format(w));
  j["subgroup_words"] = words;
  if (r.abelian) {
    j["d_lower"] = r.abelian->d_lower;
    j["d_upper"] = r.abelian->d_upper;
    nlohmann::json dp = nlohmann::json::object();
    for (const auto& [q, v] : r.abelian->d_p_by_prime)
      dp[std::to_string(q)] = v;
    j["d_p"] = dp;
  }
  return j;
}

} // namespace gradientlab
