#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <variant>

#include "gradientlab/cost.hpp"
#include "gradientlab/gradient.hpp"

namespace gradientlab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::size_t audit_trials = 100;
constexpr std::size_t max_depth = 8;
constexpr std::uint64_t default_prime = 2;
constexpr std::size_t unsafe_chain_index = 2'000'000;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string command;
  std::string pres, left, right, spec, dir, out;
  std::string format = "pretty";
  std::string mode = "rg";
  std::optional<std::uint64_t> prime;
  std::size_t depth = 4;
  std::size_t max_index = 12;
  std::optional<std::size_t> max_cosets;
  std::uint64_t seed = 0;
  std::uint64_t r = 0;
  bool unsafe = false;

  std::uint64_t p() const { return prime.value_or(default_prime); }
  Mode gradient_mode() const { return mode == "rgp" ? Mode::rg_p(p()) : Mode::rg(); }
  EnumerationLimits limits() const {
    EnumerationLimits l;
    if (max_cosets) l.max_cosets = *max_cosets;
    return l;
  }
  ChainCaps caps() const {
    ChainCaps c;
    if (unsafe) c.max_index = unsafe_chain_index;
    return c;
  }
};

struct Result {
  json doc;
  std::string csv;
  std::string pretty;
  int code = exit_ok;
};

// ---- input ----

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

GroupPresentation load_group(const std::string& path) {
  try {
    auto g = parse_presentation(read_file(path));
    return g.label().empty() ? g.with_label(stem(path)) : g;
  } catch (const DomainError& e) {
    throw UsageError(path + ":" + e.what());
  }
}

using GraphSpec = std::variant<AmalgamSpec, HnnSpec>;

GraphSpec load_spec(const std::string& path) {
  const auto ext = fs::path(path).extension().string();
  if (ext != ".amal" && ext != ".hnn") throw UsageError(path + ": expected a .amal or .hnn file");
  try {
    const auto text = read_file(path);
    if (ext == ".amal") return parse_amalgam_spec(text);
    return parse_hnn_spec(text);
  } catch (const DomainError& e) {
    throw UsageError(path + ":" + e.what());
  }
}

GroupPresentation construct(const GraphSpec& s, const std::string& label) {
  return std::visit([&](const auto& spec) {
    if constexpr (std::is_same_v<std::decay_t<decltype(spec)>, AmalgamSpec>)
      return amalgam(spec).with_label(label);
    else
      return hnn(spec).with_label(label);
  }, s);
}

// Subgroups named by `sub:` lines of a .grp file; cyclic subgroups of the
// generators when there are none.
std::vector<SubgroupSpec> cost_subgroups(const std::string& path, const GroupPresentation& g) {
  std::vector<SubgroupSpec> out;
  try {
    for (const auto& st : detail::split_statements(read_file(path)))
      if (st.key == "sub") out.push_back(SubgroupSpec{detail::parse_word_list(st, g.generator_names())});
  } catch (const DomainError& e) {
    throw UsageError(path + ":" + e.what());
  }
  if (out.empty())
    for (std::uint32_t i = 0; i < g.rank(); ++i)
      out.push_back(SubgroupSpec{{Word{Letter(i, 1)}}});
  return out;
}

// ---- output helpers ----

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s)
    q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string csv_rows(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out += (i ? "," : "") + csv_field(row[i]);
    out += "\n";
  }
  return out;
}

std::string table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], row[i].size());
    }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i)
      line += row[i] + (i + 1 < row.size() ? std::string(width[i] - row[i].size() + 2, ' ') : "");
    out += line + "\n";
  }
  return out;
}

std::string words(const std::vector<Word>& ws, const GroupPresentation& g) {
  std::string out;
  for (std::size_t i = 0; i < ws.size(); ++i)
    out += (i ? ", " : "") + g.format(ws[i]);
  return out.empty() ? "1" : out;
}

std::string invariants(const AbelianData& a) {
  std::string out;
  for (const auto& f : a.invariant_factors) {
    if (f == 1) continue;
    out += (out.empty() ? "" : " x ") + (f == 0 ? std::string("Z") : "Z/" + f.get_str());
  }
  return out.empty() ? "1" : out;
}

json header(const std::string& command) { return {{"schema", 1}, {"command", command}}; }

Result failed(const std::string& command, const Failure& f) {
  Result r;
  r.doc = header(command);
  r.doc["status"] = to_string(f.kind);
  r.doc["detail"] = f.detail;
  r.pretty = std::string(to_string(f.kind)) + ": " + f.detail + "\n";
  r.csv = csv_rows({{"status", "detail"}, {to_string(f.kind), f.detail}});
  r.code = f.kind == FailureKind::embedding_violation ? exit_violated : exit_indeterminate;
  return r;
}

int verdict_code(VerdictStatus s) { return s == VerdictStatus::violated ? exit_violated : exit_ok; }

bool truncated_indeterminate(const ChainRecord& c) {
  return c.truncated && c.truncated->kind == FailureKind::indeterminate;
}

std::string chain_note(const ChainRecord& c) {
  if (c.truncated) return "chain stopped early (" + std::string(to_string(c.truncated->kind)) + "): " + c.truncated->detail + "\n";
  if (c.stabilized) return "chain stabilized: d_p of the last level is 0\n";
  return "";
}

std::string pretty_report(const GradientReport& rep) {
  std::vector<std::vector<std::string>> rows = {{"level", "index", "d", "value", "running inf"}};
  for (std::size_t k = 0; k < rep.levels.size(); ++k) {
    const auto& l = rep.levels[k];
    const std::string d = l.d_lo == l.d_hi ? std::to_string(l.d_lo)
                                           : "[" + std::to_string(l.d_lo) + ", " + std::to_string(l.d_hi) + "]";
    rows.push_back({std::to_string(k), std::to_string(l.index), d, to_string(l.value), to_string(l.running_inf)});
  }
  std::string out = "mode: " + rep.mode.name() + "\n" + table(rows);
  if (rep.running_inf) out += "chain infimum (upper bound for the true infimum): " + to_string(*rep.running_inf) + "\n";
  return out;
}

std::string pretty_verdict(const FormulaVerdict& v) {
  return "formula: " + v.formula + "\nlhs: " + to_string(v.lhs) + "\nrhs: " + to_string(v.rhs) +
         "\nverdict: " + to_string(v.status) + "\nnote: " + v.message + "\n";
}

// ---- commands ----

Result cmd_parse(const Config& c) {
  Result r;
  r.doc = header("parse");
  GroupPresentation g;
  if (!c.pres.empty()) {
    g = load_group(c.pres);
  } else {
    auto spec = load_spec(c.spec);
    g = construct(spec, stem(c.spec));
    r.doc["hypotheses"] = std::visit([](const auto& s) { return hypotheses(s); }, spec);
  }
  json rels = json::array();
  for (const auto& w : g.relators())
    rels.push_back(g.format(w));
  r.doc["label"] = g.label();
  r.doc["generators"] = g.generator_names();
  r.doc["relators"] = rels;
  r.pretty = print_presentation(g);
  std::vector<std::vector<std::string>> rows = {{"field", "value"}, {"label", g.label()}};
  for (const auto& n : g.generator_names())
    rows.push_back({"generator", n});
  for (const auto& w : rels)
    rows.push_back({"relator", w.get<std::string>()});
  r.csv = csv_rows(rows);
  return r;
}

Result cmd_subgroups(const Config& c) {
  auto g = std::make_shared<const GroupPresentation>(load_group(c.pres));
  auto subs = low_index_normal_subgroups(g, c.max_index, c.limits());
  if (!subs) return failed("subgroups", subs.failure());
  Result r;
  r.doc = header("subgroups");
  r.doc["group"] = g->label();
  r.doc["max_index"] = c.max_index;
  json list = json::array();
  std::vector<std::vector<std::string>> rows = {{"index", "d_lower", "d_upper", "abelianization", "generators"}};
  for (auto rec : std::move(subs).value()) {
    const auto& ab = derived_abelian(rec);
    const auto gens = words(rec.table.subgroup().generators, *g);
    list.push_back({{"index", rec.index()},
                    {"generators", gens},
                    {"d_lower", ab.d_lower},
                    {"d_upper", ab.d_upper},
                    {"abelianization", invariants(ab)}});
    rows.push_back({std::to_string(rec.index()), std::to_string(ab.d_lower), std::to_string(ab.d_upper),
                    invariants(ab), gens});
  }
  r.doc["subgroups"] = list;
  r.pretty = g->label() + ": " + std::to_string(list.size()) + " normal subgroups of index <= " +
             std::to_string(c.max_index) + "\n" + table(rows);
  r.csv = csv_rows(rows);
  return r;
}

Result cmd_chain(const Config& c) {
  auto g = std::make_shared<const GroupPresentation>(load_group(c.pres));
  const auto p = c.p();
  auto chain = p_chain(g, p, c.depth, c.limits(), c.caps());
  derive_levels(chain, {p});
  Result r;
  r.doc = header("chain");
  r.doc["chain"] = to_json(chain, p);
  std::vector<std::vector<std::string>> rows = {{"level", "index", "d_p", "d_lower", "d_upper"}};
  for (std::size_t k = 0; k < chain.levels.size(); ++k) {
    const auto& ab = *chain.levels[k].abelian;
    rows.push_back({std::to_string(k), std::to_string(chain.levels[k].index()), std::to_string(ab.d_p(p)),
                    std::to_string(ab.d_lower), std::to_string(ab.d_upper)});
  }
  r.pretty = g->label() + ": mod-" + std::to_string(p) + " chain\n" + table(rows) + chain_note(chain);
  r.csv = csv_rows(rows);
  r.code = truncated_indeterminate(chain) ? exit_indeterminate : exit_ok;
  return r;
}

Result cmd_gradient(const Config& c) {
  const auto g = load_group(c.pres);
  const Mode mode = c.gradient_mode();
  Result r;
  if (mode.kind == GradientMode::rg && !c.prime) {
    auto a = rg_absolute_upper(g, c.max_index, mode, c.limits());
    if (!a) return failed("gradient", a.failure());
    const auto& up = a.value();
    r.doc = header("gradient");
    r.doc["group"] = g.label();
    r.doc["absolute_upper"] = to_json(up);
    r.pretty = g.label() + ": RG over " + std::to_string(up.subgroups) + " normal subgroups of index <= " +
               std::to_string(c.max_index) + "\nfamily minimum: " + to_string(up.family_inf) +
               "\nupper bound for RG: " + to_string(up.upper) + "\nwitness: index " +
               std::to_string(up.witness_index) + ", d in [" + std::to_string(up.witness_d_lower) + ", " +
               std::to_string(up.witness_d_upper) + "]\n";
    r.csv = csv_rows({{"max_index", "subgroups", "family_inf_lo", "family_inf_hi", "witness_index"},
                      {std::to_string(c.max_index), std::to_string(up.subgroups), to_string(up.family_inf.lo),
                       to_string(up.family_inf.hi), std::to_string(up.witness_index)}});
    return r;
  }
  auto chain = p_chain(g, c.p(), c.depth, c.limits(), c.caps());
  auto rep = rg_sequence(chain, mode);
  r.doc = to_json(rep);
  r.doc["command"] = "gradient";
  r.pretty = g.label() + ": mod-" + std::to_string(c.p()) + " chain, depth " + std::to_string(c.depth) + "\n" +
             pretty_report(rep) + chain_note(chain);
  r.csv = to_csv(rep);
  r.code = truncated_indeterminate(chain) ? exit_indeterminate : exit_ok;
  return r;
}

Result cmd_verify_free_product(const Config& c) {
  const auto g1 = load_group(c.left);
  const auto g2 = load_group(c.right);
  VerifyOptions opt;
  opt.mode = c.gradient_mode();
  opt.max_index = c.max_index;
  opt.depth = c.depth;
  opt.limits = c.limits();
  opt.caps = c.caps();
  auto v = verify_free_product(g1, g2, opt);
  if (!v) return failed("verify free-product", v.failure());
  Result r;
  r.doc = header("verify free-product");
  r.doc["left"] = g1.label();
  r.doc["right"] = g2.label();
  r.doc["mode"] = opt.mode.name();
  r.doc["verdict"] = to_json(v.value());
  r.pretty = g1.label() + " * " + g2.label() + "\n" + pretty_verdict(v.value());
  std::vector<std::vector<std::string>> rows = {{"lhs_lo", "lhs_hi", "rhs_lo", "rhs_hi", "status"},
                                                {to_string(v.value().lhs.lo), to_string(v.value().lhs.hi),
                                                 to_string(v.value().rhs.lo), to_string(v.value().rhs.hi),
                                                 to_string(v.value().status)}};
  if (opt.mode.kind == GradientMode::rg) {
    auto up = rg_absolute_upper(free_product(g1, g2), c.max_index, opt.mode, opt.limits);
    if (!up) return failed("verify free-product", up.failure());
    r.doc["product"] = to_json(up.value());
    const auto& u = up.value();
    r.pretty += "witness: index " + std::to_string(u.witness_index) + ", d in [" +
                std::to_string(u.witness_d_lower) + ", " + std::to_string(u.witness_d_upper) + "], value " +
                to_string(u.upper) + "\n";
    rows[0].push_back("witness_index");
    rows[1].push_back(std::to_string(u.witness_index));
  }
  r.csv = csv_rows(rows);
  r.code = verdict_code(v.value().status);
  return r;
}

Result cmd_verify_graph(const Config& c, bool want_amalgam) {
  const auto spec = load_spec(c.spec);
  if (std::holds_alternative<AmalgamSpec>(spec) != want_amalgam)
    throw UsageError(c.spec + ": expected a " + std::string(want_amalgam ? ".amal" : ".hnn") + " file");
  const auto g = construct(spec, stem(c.spec));
  auto chain = p_chain(g, c.p(), c.depth, c.limits(), c.caps());
  const Mode mode = c.gradient_mode();
  auto v = std::visit([&](const auto& s) {
    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, AmalgamSpec>)
      return verify_amalgam(s, chain, mode);
    else
      return verify_hnn(s, chain, mode);
  }, spec);
  const std::string command = want_amalgam ? "verify amalgam" : "verify hnn";
  if (!v) return failed(command, v.failure());
  auto rep = rg_sequence(chain, mode);
  rep.verdicts.push_back(v.value());
  rep.hypotheses = std::visit([](const auto& s) { return hypotheses(s); }, spec);
  Result r;
  r.doc = to_json(rep);
  r.doc["command"] = command;
  r.pretty = g.label() + ": mod-" + std::to_string(c.p()) + " chain, depth " + std::to_string(c.depth) + "\n" +
             pretty_report(rep) + chain_note(chain) + pretty_verdict(v.value());
  for (const auto& h : rep.hypotheses)
    r.pretty += "hypothesis: " + h + "\n";
  r.csv = to_csv(rep);
  r.code = verdict_code(v.value().status);
  if (r.code == exit_ok && truncated_indeterminate(chain)) r.code = exit_indeterminate;
  return r;
}

Result cmd_dp_bounds(const Config& c) {
  const auto spec = load_spec(c.spec);
  auto g = std::make_shared<const GroupPresentation>(construct(spec, stem(c.spec)));
  auto subs = low_index_normal_subgroups(g, c.max_index, c.limits());
  if (!subs) return failed("verify dp-bounds", subs.failure());
  const auto p = c.p();
  Result r;
  r.doc = header("verify dp-bounds");
  r.doc["group"] = g->label();
  r.doc["prime"] = p;
  r.doc["max_index"] = c.max_index;
  json reports = json::array();
  std::vector<std::vector<std::string>> rows = {{"index", "scope", "lower", "d_p", "upper", "holds"}};
  bool all = true;
  std::string notes;
  for (auto rec : std::move(subs).value()) {
    auto rep = std::visit([&](const auto& s) { return dp_bounds_check(s, rec, p, c.limits()); }, spec);
    all = all && rep.holds();
    for (const auto& ch : rep.checks)
      rows.push_back({std::to_string(rep.index), ch.scope, std::to_string(ch.lower), std::to_string(ch.value),
                      std::to_string(ch.upper), ch.holds() ? "yes" : "no"});
    for (const auto& n : rep.notes)
      notes += "index " + std::to_string(rep.index) + ": " + n + "\n";
    if (rep.embedding_suspect) notes += "index " + std::to_string(rep.index) + ": EmbeddingSuspect: " + *rep.embedding_suspect + "\n";
    reports.push_back(to_json(rep));
  }
  r.doc["reports"] = reports;
  r.doc["verdict"] = all ? "holds" : "violated";
  r.pretty = g->label() + ": d_" + std::to_string(p) + " bounds over " + std::to_string(reports.size()) +
             " normal subgroups of index <= " + std::to_string(c.max_index) + "\n" + table(rows) + notes +
             "verdict: " + (all ? "holds" : "violated") + "\n";
  r.csv = csv_rows(rows);
  r.code = all ? exit_ok : exit_violated;
  return r;
}

Result cmd_kurosh(const Config& c) {
  const auto spec = load_spec(c.spec);
  auto g = std::make_shared<const GroupPresentation>(construct(spec, stem(c.spec)));
  auto subs = low_index_normal_subgroups(g, c.max_index, c.limits());
  if (!subs) return failed("kurosh", subs.failure());
  const bool is_amalgam = std::holds_alternative<AmalgamSpec>(spec);
  Result r;
  r.doc = header("kurosh");
  r.doc["group"] = g->label();
  r.doc["kind"] = is_amalgam ? "amalgam" : "hnn";
  r.doc["max_index"] = c.max_index;
  json list = json::array();
  std::vector<std::vector<std::string>> rows;
  if (is_amalgam)
    rows.push_back({"index", "dc_A", "dc_1", "dc_2", "n", "amalgamation_bound"});
  else
    rows.push_back({"index", "dc_A", "dc_K", "n", "amalgamation_bound"});
  bool all = true;
  for (const auto& rec : subs.value()) {
    auto k = std::visit([&](const auto& s) { return kurosh_stats(s, rec); }, spec);
    all = all && k.free_generator_count >= 0;
    auto j = to_json(k);
    j["index"] = rec.index();
    list.push_back(j);
    std::vector<std::string> row = {std::to_string(rec.index()), std::to_string(k.double_cosets_A)};
    for (auto d : k.double_cosets_factors)
      row.push_back(std::to_string(d));
    row.push_back(std::to_string(k.free_generator_count));
    row.push_back(std::to_string(k.amalgamation_bound));
    rows.push_back(row);
  }
  r.doc["subgroups"] = list;
  r.doc["verdict"] = all ? "holds" : "violated";
  r.pretty = g->label() + ": Kurosh counts for " + std::to_string(list.size()) +
             " normal subgroups of index <= " + std::to_string(c.max_index) + "\n" + table(rows) +
             "free factor count non-negative: " + (all ? "yes" : "no") + "\n";
  r.csv = csv_rows(rows);
  r.code = all ? exit_ok : exit_violated;
  return r;
}

Result cmd_cost(const Config& c) {
  auto g = std::make_shared<const GroupPresentation>(load_group(c.pres));
  const auto ls = cost_subgroups(c.pres, *g);
  auto subs = low_index_normal_subgroups(g, c.max_index, c.limits());
  if (!subs) return failed("cost", subs.failure());
  Result r;
  r.doc = header("cost");
  r.doc["group"] = g->label();
  r.doc["max_index"] = c.max_index;
  r.doc["seed"] = c.seed;
  r.doc["trials"] = audit_trials;
  json list = json::array();
  std::vector<std::vector<std::string>> rows = {
      {"index", "L", "orbits", "min_cost", "predicted", "match", "audit_min", "audit_max", "audit"}};
  bool all = true;
  std::uint64_t seed = c.seed;
  for (const auto& rec : subs.value()) {
    const auto act = to_action(rec.table);
    for (const auto& l : ls) {
      const auto rep = orbit_relation_cost(act, l);
      const auto audit = greedy_graphing_audit(act, l, audit_trials, seed++);
      all = all && rep.match && audit.passed();
      list.push_back({{"index", rec.index()},
                      {"h", words(rec.table.subgroup().generators, *g)},
                      {"l", words(l.generators, *g)},
                      {"cost", to_json(rep)},
                      {"audit", to_json(audit)}});
      rows.push_back({std::to_string(rec.index()), words(l.generators, *g), std::to_string(rep.orbit_count),
                      to_string(rep.min_cost), to_string(rep.predicted), rep.match ? "yes" : "no",
                      to_string(audit.min_observed), to_string(audit.max_observed),
                      audit.passed() ? "pass" : "fail"});
    }
  }
  r.doc["rows"] = list;
  r.doc["verdict"] = all ? "holds" : "violated";
  r.pretty = g->label() + ": orbit relation costs on Γ/H for normal H of index <= " +
             std::to_string(c.max_index) + "\n" + table(rows) +
             "finite values only; no limit of these costs is claimed\n";
  r.csv = csv_rows(rows);
  r.code = all ? exit_ok : exit_violated;
  return r;
}

Result cmd_example45(const Config& c) {
  const auto e = example_4_5_report(c.r);
  Result r;
  r.doc = header("example45");
  r.doc.update(to_json(e));
  r.pretty = "RG(F_r x Z/2) + RG(F_r x Z/3) - RG(F_r) at r = " + std::to_string(e.r) + ": " +
             to_string(e.naive) + "\n" + e.note + "\n";
  r.csv = csv_rows({{"r", "rg_left", "rg_right", "rg_a", "naive"},
                    {std::to_string(e.r), to_string(e.rg_left), to_string(e.rg_right), to_string(e.rg_a),
                     to_string(e.naive)}});
  return r;
}

// ---- corpus ----

struct Row {
  std::string file;
  std::string kind;
  std::string status;  // consistent, inconclusive, violated, indeterminate, error
  std::string message;
  json detail = json::object();
};

bool weakly_non_increasing(const GradientReport& rep) {
  for (std::size_t k = 1; k < rep.levels.size(); ++k)
    if (rep.levels[k].value.lo > rep.levels[k - 1].value.hi) return false;
  return true;
}

Row corpus_group(const Config& c, const fs::path& path) {
  Row row{path.filename().string(), "grp", "consistent", "", json::object()};
  auto chain = p_chain(load_group(path.string()), c.p(), c.depth, c.limits(), c.caps());
  auto rep = rg_sequence(chain, c.gradient_mode());
  row.detail["levels"] = rep.levels.size();
  row.detail["running_inf"] = to_json(*rep.running_inf);
  if (chain.truncated) row.detail["truncated"] = to_string(chain.truncated->kind);
  const bool ok = c.gradient_mode().kind == GradientMode::rg_p ? rep.non_increasing() : weakly_non_increasing(rep);
  if (!ok) {
    row.status = "violated";
    row.message = "chain values increase";
  } else if (rep.levels.size() < 2 && truncated_indeterminate(chain)) {
    row.status = "indeterminate";
    row.message = chain.truncated->detail;
  } else {
    const auto n = rep.levels.size();
    row.message = rep.mode.name() + " non-increasing over " + std::to_string(n) + (n == 1 ? " level" : " levels") +
                  "; chain infimum " + to_string(*rep.running_inf);
  }
  return row;
}

Row corpus_graph(const Config& c, const fs::path& path) {
  const auto spec = load_spec(path.string());
  const bool is_amalgam = std::holds_alternative<AmalgamSpec>(spec);
  Row row{path.filename().string(), is_amalgam ? "amal" : "hnn", "", "", json::object()};
  auto chain = p_chain(construct(spec, path.stem().string()), c.p(), c.depth, c.limits(), c.caps());
  const Mode mode = c.gradient_mode();
  auto v = std::visit([&](const auto& s) {
    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, AmalgamSpec>)
      return verify_amalgam(s, chain, mode);
    else
      return verify_hnn(s, chain, mode);
  }, spec);
  if (!v) {
    row.status = v.failure().kind == FailureKind::embedding_violation ? "violated" : "indeterminate";
    row.message = v.failure().detail;
    return row;
  }
  row.detail["verdict"] = to_json(v.value());
  row.status = to_string(v.value().status);
  row.message = v.value().message;
  long kurosh_bad = 0, dp_bad = 0;
  for (auto& level : chain.levels) {
    auto k = std::visit([&](const auto& s) { return kurosh_stats(s, level); }, spec);
    kurosh_bad += k.free_generator_count < 0;
    auto d = std::visit([&](const auto& s) { return dp_bounds_check(s, level, c.p(), c.limits()); }, spec);
    dp_bad += !d.holds();
  }
  row.detail["kurosh_failures"] = kurosh_bad;
  row.detail["dp_bound_failures"] = dp_bad;
  if (kurosh_bad || dp_bad) {
    row.status = "violated";
    row.message = std::to_string(kurosh_bad) + " Kurosh and " + std::to_string(dp_bad) +
                  " d_p bound failures along the chain";
  }
  return row;
}

Row corpus_row(const Config& c, const fs::path& path) {
  try {
    return path.extension() == ".grp" ? corpus_group(c, path) : corpus_graph(c, path);
  } catch (const std::exception& e) {
    return Row{path.filename().string(), path.extension().string().substr(1), "error", e.what(), json::object()};
  }
}

Result cmd_corpus(const Config& c) {
  if (!fs::is_directory(c.dir)) throw UsageError("not a directory: " + c.dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(c.dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".grp" || ext == ".amal" || ext == ".hnn")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });

  std::vector<Row> rows(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++)
      rows[i] = corpus_row(c, files[i]);
  };
  const std::size_t n = std::min<std::size_t>(files.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n; ++i)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool)
    t.join();

  std::map<std::string, std::size_t> counts;
  json list = json::array();
  std::vector<std::vector<std::string>> table_rows = {{"file", "kind", "status", "message"}};
  for (const auto& row : rows) {
    ++counts[row.status];
    list.push_back({{"file", row.file}, {"kind", row.kind}, {"status", row.status}, {"message", row.message},
                    {"detail", row.detail}});
    table_rows.push_back({row.file, row.kind, row.status, row.message});
  }
  Result r;
  r.doc = header("corpus");
  r.doc["mode"] = c.gradient_mode().name();
  r.doc["prime"] = c.p();
  r.doc["depth"] = c.depth;
  r.doc["rows"] = list;
  r.doc["summary"] = counts;
  std::string summary = std::to_string(rows.size()) + " files";
  for (const auto& [status, k] : counts)
    summary += ", " + std::to_string(k) + " " + status;
  r.pretty = table(table_rows) + summary + "\n";
  r.csv = csv_rows(table_rows);
  if (counts.count("violated"))
    r.code = exit_violated;
  else if (counts.count("error"))
    r.code = exit_file_errors;
  else if (counts.count("indeterminate"))
    r.code = exit_indeterminate;
  return r;
}

// ---- driver ----

void validate(const Config& c) {
  if (c.prime && !is_prime(*c.prime)) throw UsageError("-p must be prime, got " + std::to_string(*c.prime));
  if (c.max_index > default_max_index && !c.unsafe)
    throw UsageError("--max-index above " + std::to_string(default_max_index) + " needs --unsafe-limits");
  if (c.max_index == 0) throw UsageError("--max-index must be positive");
  if (c.depth > max_depth) throw UsageError("--depth is at most " + std::to_string(max_depth));
  if (c.max_cosets && *c.max_cosets == 0) throw UsageError("--max-cosets must be positive");
}

Result dispatch(const Config& c) {
  if (c.command == "parse") return cmd_parse(c);
  if (c.command == "subgroups") return cmd_subgroups(c);
  if (c.command == "chain") return cmd_chain(c);
  if (c.command == "gradient") return cmd_gradient(c);
  if (c.command == "free-product") return cmd_verify_free_product(c);
  if (c.command == "amalgam") return cmd_verify_graph(c, true);
  if (c.command == "hnn") return cmd_verify_graph(c, false);
  if (c.command == "dp-bounds") return cmd_dp_bounds(c);
  if (c.command == "kurosh") return cmd_kurosh(c);
  if (c.command == "cost") return cmd_cost(c);
  if (c.command == "example45") return cmd_example45(c);
  if (c.command == "corpus") return cmd_corpus(c);
  throw UsageError("unknown command");
}

struct Flags {
  bool pres = false, left_right = false, spec = false, mode = false, prime = false, depth = false,
       max_index = false, seed = false;
};

CLI::App* add_command(CLI::App& parent, Config& c, const std::string& name, const std::string& help,
                      const Flags& f) {
  auto* sc = parent.add_subcommand(name, help);
  sc->callback([&c, name] { c.command = name; });
  if (f.pres) sc->add_option("--pres", c.pres, "group presentation (.grp)")->required();
  if (f.left_right) {
    sc->add_option("--left", c.left, "left factor (.grp)")->required();
    sc->add_option("--right", c.right, "right factor (.grp)")->required();
  }
  if (f.spec) sc->add_option("--spec", c.spec, "amalgam or HNN description (.amal/.hnn)")->required();
  if (f.mode) sc->add_option("--mode", c.mode, "rg or rgp")->check(CLI::IsMember({"rg", "rgp"}));
  if (f.prime) sc->add_option("-p", c.prime, "prime for mod-p chains (default 2)");
  if (f.depth) sc->add_option("--depth", c.depth, "number of chain steps (at most 8)");
  if (f.max_index) sc->add_option("--max-index", c.max_index, "largest subgroup index (at most 64)");
  if (f.seed) sc->add_option("--seed", c.seed, "seed for randomized audits");
  sc->add_option("--max-cosets", c.max_cosets, "coset enumeration limit");
  sc->add_option("--out", c.out, "write the report here instead of stdout");
  sc->add_option("--format", c.format, "json, csv or pretty")->check(CLI::IsMember({"json", "csv", "pretty"}));
  sc->add_flag("--unsafe-limits", c.unsafe, "lift the --max-index and chain index caps");
  return sc;
}

std::string render(const Result& r, const std::string& format) {
  if (format == "json") return r.doc.dump(2) + "\n";
  if (format == "csv") return r.csv;
  return r.pretty;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Rank gradient and p-gradient estimates for finitely presented groups", "gradientlab"};
  app.require_subcommand(1);

  add_command(app, c, "parse", "print a parsed presentation", {});
  auto* parse = app.get_subcommand("parse");
  auto* pres_opt = parse->add_option("--pres", c.pres, "group presentation (.grp)");
  auto* spec_opt = parse->add_option("--spec", c.spec, "amalgam or HNN description (.amal/.hnn)");
  pres_opt->excludes(spec_opt);
  add_command(app, c, "subgroups", "normal subgroups of small index", {.pres = true, .max_index = true});
  add_command(app, c, "chain", "mod-p Frattini chain", {.pres = true, .prime = true, .depth = true});
  add_command(app, c, "gradient", "rank gradient values",
              {.pres = true, .mode = true, .prime = true, .depth = true, .max_index = true});
  auto* verify = app.add_subcommand("verify", "check a gradient formula");
  verify->require_subcommand(1);
  add_command(*verify, c, "free-product", "free product formula",
              {.left_right = true, .mode = true, .prime = true, .depth = true, .max_index = true});
  add_command(*verify, c, "amalgam", "amalgamated product formula",
              {.spec = true, .mode = true, .prime = true, .depth = true});
  add_command(*verify, c, "hnn", "HNN extension formula", {.spec = true, .mode = true, .prime = true, .depth = true});
  add_command(*verify, c, "dp-bounds", "d_p bounds for subgroups of small index",
              {.spec = true, .prime = true, .max_index = true});
  add_command(app, c, "kurosh", "double coset counts", {.spec = true, .max_index = true});
  add_command(app, c, "cost", "orbit relation costs on finite quotients",
              {.pres = true, .max_index = true, .seed = true});
  add_command(app, c, "example45", "naive amalgam formula for F_r x Z/2 and F_r x Z/3", {})
      ->add_option("--r", c.r, "free rank r >= 1")
      ->required();
  add_command(app, c, "corpus", "run the checks on every file of a directory",
              {.mode = true, .prime = true, .depth = true, .seed = true})
      ->add_option("dir", c.dir, "directory of .grp/.amal/.hnn files")
      ->required();

  std::vector<const char*> argv = {"gradientlab"};
  for (const auto& a : args)
    argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }
  if (c.command == "parse" && c.pres.empty() == c.spec.empty()) {
    err << "parse needs exactly one of --pres or --spec\n";
    return exit_usage;
  }

  Result r;
  try {
    validate(c);
    r = dispatch(c);
  } catch (const UsageError& e) {
    err << "gradientlab: " << e.what() << "\n";
    return exit_usage;
  } catch (const DomainError& e) {
    err << "gradientlab: " << e.what() << "\n";
    return exit_usage;
  }

  const std::string text = render(r, c.format);
  if (c.out.empty()) {
    out << text;
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!(f << text)) {
      err << "gradientlab: cannot write " << c.out << "\n";
      return exit_usage;
    }
  }
  return r.code;
}

} // namespace gradientlab::cli
