// qslab command line: sorting engines, closed forms, posets, graph orders.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>

#include "qslab/closed_forms.hpp"
#include "qslab/graph_order.hpp"
#include "qslab/harness.hpp"
#include "qslab/identities.hpp"
#include "qslab/indicial.hpp"
#include "qslab/poset.hpp"
#include "qslab/poset_sorting.hpp"
#include "qslab/sorting.hpp"

using json = nlohmann::ordered_json;
using namespace qslab;

namespace {

// ---- output ----

std::string cell_text(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_float(v.get<double>());
  return v.dump();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json num(double x) {
  if (std::isfinite(x)) return x;
  return format_float(x);
}

struct Output {
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> cols;
  std::vector<std::vector<json>> rows;
  json extra = json::object();

  void set(const std::string& k, const std::string& v) {
    for (auto& [key, val] : config)
      if (key == k) {
        val = v;
        return;
      }
    config.emplace_back(k, v);
  }
  void echo(std::ostream& os) const {
    for (auto& [k, v] : config) os << "# " << k << "=" << v << "\n";
  }

  void write(std::ostream& os, const std::string& format) const {
    if (format == "json") {
      json j;
      json cfg = json::object();
      for (auto& [k, v] : config) cfg[k] = v;
      j["config"] = cfg;
      for (auto& [k, v] : extra.items()) j[k] = v;
      json rs = json::array();
      for (auto& r : rows) {
        json o = json::object();
        for (std::size_t i = 0; i < cols.size(); ++i) o[cols[i]] = r[i];
        rs.push_back(o);
      }
      j["rows"] = rs;
      os << j.dump(2) << "\n";
      return;
    }
    echo(os);
    if (format == "csv") {
      for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << csv_field(cols[i]);
      os << "\n";
      for (auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(cell_text(r[i]));
        os << "\n";
      }
      return;
    }
    if (rows.size() == 1) {
      for (std::size_t i = 0; i < cols.size(); ++i) os << cols[i] << "=" << cell_text(rows[0][i]) << "\n";
      return;
    }
    std::vector<std::size_t> w(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) w[i] = cols[i].size();
    for (auto& r : rows)
      for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], cell_text(r[i]).size());
    auto line = [&](auto get) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        std::string s = get(i);
        os << s << std::string(i + 1 < cols.size() ? w[i] - s.size() + 2 : 0, ' ');
      }
      os << "\n";
    };
    line([&](std::size_t i) { return cols[i]; });
    for (auto& r : rows) line([&](std::size_t i) { return cell_text(r[i]); });
  }
};

std::uint64_t parse_seed(const std::string& s) {
  try {
    std::size_t pos = 0;
    auto v = std::stoull(s, &pos, 0);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParameterError("seed must be an unsigned integer (decimal or 0x hex), got '" + s + "'");
  }
}

std::vector<long> parse_list(const std::string& s, const std::string& what) {
  std::vector<long> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stol(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParameterError(what + ": '" + item + "' is not an integer");
    }
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParameterError(what + ": '" + item + "' is not a number");
    }
  }
  return out;
}

std::string join(const std::vector<std::size_t>& v, const std::string& sep, std::size_t add = 0) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i] + add);
  return s;
}

// ---- shared options ----

struct Globals {
  std::string seed_text;
  std::uint64_t seed = default_seed;
  unsigned jobs = default_jobs();
  std::string format;

  void resolve() {
    if (!seed_text.empty()) seed = parse_seed(seed_text);
    else if (const char* env = std::getenv("QSLAB_SEED"); env && *env) seed = parse_seed(env);
    else seed = default_seed;
    if (jobs == 0) throw ParameterError("--jobs must be >= 1");
    if (!format.empty() && format != "csv" && format != "json" && format != "table")
      throw ParameterError("--format must be csv, json or table");
  }
  std::string fmt(const std::string& fallback) const { return format.empty() ? fallback : format; }
  std::string seed_str() const { return std::to_string(seed); }
};

void add_globals(CLI::App* sub, Globals& g) {
  sub->add_option("--seed", g.seed_text, "master seed (default: $QSLAB_SEED, else 0xC0FFEE)");
  sub->add_option("--jobs", g.jobs, "worker threads; output does not depend on it")->capture_default_str();
  sub->add_option("--format", g.format, "csv, json or table (default depends on the command)");
}

struct VariantFlags {
  VariantSpec v;
  std::string mult;

  void add(CLI::App* sub) {
    sub->add_option("--variant", v.variant,
                    "single, dual, multi, median, remedian, samplesort, quickselect or multiset")
        ->capture_default_str();
    sub->add_option("--k", v.k, "pivots (multi) or half sample size (median, remedian)")->capture_default_str();
    sub->add_option("--beta", v.beta, "remedian depth")->capture_default_str();
    sub->add_option("--cutoff", v.cutoff, "insertion sort at or below this size (0 = off)")->capture_default_str();
    sub->add_option("--sample", v.sample, "samplesort sample size")->capture_default_str();
    sub->add_option("--rank", v.rank, "quickselect rank (1-based)")->capture_default_str();
    sub->add_option("--mult", mult, "multiset multiplicities, comma separated");
  }
  void resolve() {
    v.mult = parse_list(mult, "--mult");
    if (v.variant == "multiset" && v.mult.empty()) throw ParameterError("multiset variant needs --mult");
    for (long m : v.mult)
      if (m < 1) throw ParameterError("multiplicities must be >= 1");
    require(v.k >= 0 && v.beta >= 1 && v.cutoff >= 0 && v.sample >= 1 && v.rank >= 1, "variant parameters out of range");
  }
  void echo(Output& o) const {
    o.set("variant", v.variant);
    o.set("params", v.params());
  }
};

struct ModelFlags {
  PosetModel m;
  void add(CLI::App* sub) {
    sub->add_option("--model", m.name, "levels, kdim, bipartite, interval, graph, uniform, chain or antichain")
        ->capture_default_str();
    sub->add_option("--d", m.d, "levels: number of levels")->capture_default_str();
    sub->add_option("--k", m.k, "levels: keys per level; kdim: dimension")->capture_default_str();
    sub->add_option("--p", m.p, "bipartite and graph: edge probability")->capture_default_str();
  }
  void echo(Output& o) const {
    o.set("model", m.name);
    o.set("model_params", m.params());
  }
};

// ---- commands ----

template <class T>
SortResult<T> run_engine(const VariantSpec& v, std::vector<T> keys, std::uint64_t seed, T* selected) {
  const auto cutoff = static_cast<std::size_t>(v.cutoff);
  if (v.variant == "single") return quicksort_single(std::move(keys), seed, cutoff);
  if (v.variant == "dual") return quicksort_dual(std::move(keys), seed, cutoff);
  if (v.variant == "multi") return quicksort_multi(std::move(keys), static_cast<std::size_t>(v.k), seed, cutoff);
  if (v.variant == "median") {
    auto c = std::max<std::size_t>(cutoff, static_cast<std::size_t>(2 * v.k + 1));
    return quicksort_median_sample(std::move(keys), static_cast<std::size_t>(v.k), seed, c);
  }
  if (v.variant == "remedian") {
    auto c = std::max<std::size_t>(cutoff, static_cast<std::size_t>(2 * v.k + 1));
    return quicksort_remedian(std::move(keys), static_cast<std::size_t>(v.k), static_cast<std::size_t>(v.beta), seed, c);
  }
  if (v.variant == "samplesort") return samplesort(std::move(keys), static_cast<std::size_t>(v.sample), seed);
  if (v.variant == "multiset") return quicksort_multiset(std::move(keys), seed);
  if (v.variant == "quickselect") {
    auto [x, t] = quickselect(keys, static_cast<std::size_t>(v.rank), seed);
    *selected = x;
    std::sort(keys.begin(), keys.end());
    return {std::move(keys), t};
  }
  throw ParameterError("unknown variant: " + v.variant);
}

int cmd_sort(const Globals& g, const VariantFlags& vf, long n, const std::string& keys_text, bool print_keys) {
  Output o;
  vf.echo(o);
  o.set("seed", g.seed_str());
  std::vector<long> keys;
  Rng rng(g.seed);
  if (!keys_text.empty()) {
    keys = parse_list(keys_text, "--keys");
    o.set("keys", keys_text);
  } else if (vf.v.variant == "multiset") {
    for (std::size_t i = 0; i < vf.v.mult.size(); ++i)
      for (long r = 0; r < vf.v.mult[i]; ++r) keys.push_back(static_cast<long>(i));
    auto perm = random_order(keys.size(), rng);
    std::vector<long> shuffled(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) shuffled[i] = keys[perm[i]];
    keys = shuffled;
  } else {
    require(n >= 0, "--n must be >= 0");
    o.set("n", std::to_string(n));
    for (auto x : random_order(static_cast<std::size_t>(n), rng)) keys.push_back(static_cast<long>(x) + 1);
  }
  long selected = 0;
  auto r = run_engine(vf.v, keys, rng.split(1).engine()(), &selected);
  o.cols = {"n", "comparisons", "exchanges", "stages", "sorted"};
  std::vector<json> row{keys.size(), r.tally.comparisons, r.tally.exchanges, r.tally.stages,
                        std::is_sorted(r.sorted.begin(), r.sorted.end())};
  if (vf.v.variant == "quickselect") {
    o.cols.push_back("selected");
    row.push_back(selected);
  }
  if (print_keys) {
    std::string s;
    for (std::size_t i = 0; i < r.sorted.size(); ++i) s += (i ? "," : "") + std::to_string(r.sorted[i]);
    o.cols.push_back("output");
    row.push_back(s);
  }
  o.rows.push_back(row);
  o.write(std::cout, g.fmt("table"));
  return 0;
}

int cmd_formula(const Globals& g, bool list, const std::string& name, const std::map<std::string, std::string>& given) {
  if (list) {
    json arr = json::array();
    for (auto& e : formula_catalog())
      arr.push_back({{"name", e.name}, {"params", e.params}, {"domain", e.domain}, {"exact", e.exact},
                     {"asymptotic", e.asymptotic}});
    std::cout << arr.dump(2) << "\n";
    return 0;
  }
  if (name.empty()) throw ParameterError("formula needs --name or --list");
  const auto& e = find_formula(name);
  FormulaParams p;
  Output o;
  o.set("name", name);
  for (auto& k : e.params) {
    auto it = given.find(k);
    if (it == given.end()) throw ParameterError("formula " + name + " needs --" + k);
    p.raw[k] = it->second;
    o.set(k, it->second);
  }
  for (auto& [k, v] : given)
    if (std::find(e.params.begin(), e.params.end(), k) == e.params.end())
      throw ParameterError("formula " + name + " does not take --" + k);
  auto v = eval_formula(name, p);
  const std::string fmt = g.fmt("table");
  if (fmt == "table") {
    o.echo(std::cout);
    std::cout << v.str() << "\n";
    return 0;
  }
  o.cols = {"name", "value", "float", "exact", "asymptotic"};
  o.rows.push_back({name, v.str(), num(v.exact ? to_double(v.q) : v.x), v.exact, v.asymptotic});
  o.write(std::cout, fmt);
  return 0;
}

int cmd_identity(const Globals& g, const std::string& name, long nmin, long nmax, bool list) {
  Output o;
  if (list) {
    o.cols = {"name", "statement"};
    for (auto& id : harmonic_identities()) o.rows.push_back({id.name, id.statement});
    o.write(std::cout, g.fmt("csv"));
    return 0;
  }
  require(nmin >= 1 && nmax >= nmin, "need 1 <= --nmin <= --nmax");
  o.set("name", name.empty() ? "all" : name);
  o.set("nmin", std::to_string(nmin));
  o.set("nmax", std::to_string(nmax));
  std::vector<const HarmonicIdentity*> ids;
  if (name.empty())
    for (auto& id : harmonic_identities()) ids.push_back(&id);
  else
    ids.push_back(&find_identity(name));
  o.cols = {"name", "n", "lhs", "rhs", "holds"};
  bool all = true;
  for (auto* id : ids)
    for (long n = nmin; n <= nmax; ++n) {
      auto s = id->sides(n);
      all = all && s.holds();
      o.rows.push_back({id->name, n, to_string(s.lhs), to_string(s.rhs), s.holds()});
    }
  o.extra["all_hold"] = all;
  o.write(std::cout, g.fmt("csv"));
  return 0;
}

int cmd_roots(const Globals& g, const std::string& family, long k, long t) {
  auto fam = parse_family(family);
  auto poly = build_indicial(fam, k, t);
  auto rs = find_roots(poly);
  auto sv = indicial_special_values(fam, k, t);
  Output o;
  o.set("family", family_name(fam));
  o.set("k", std::to_string(k));
  o.set("t", std::to_string(t));
  o.cols = {"re", "im"};
  json roots = json::array();
  for (auto& z : rs.roots) {
    o.rows.push_back({num(z.real()), num(z.imag())});
    roots.push_back({{"re", num(z.real())}, {"im", num(z.imag())}});
  }
  json coeffs = json::array();
  for (auto& c : poly.coeffs) coeffs.push_back(to_string(c));
  o.extra["family"] = family_name(fam);
  o.extra["k"] = k;
  o.extra["t"] = t;
  o.extra["degree"] = poly.degree();
  o.extra["coefficients"] = coeffs;
  o.extra["roots"] = roots;
  o.extra["certified"] = certified(rs);
  o.extra["all_simple"] = rs.all_simple;
  o.extra["min_gap"] = num(rs.min_gap);
  o.extra["contains_minus_two"] = rs.contains_minus_two;
  o.extra["min_real_part_is_minus_two"] = rs.min_real_part_is_minus_two;
  o.extra["expected_real_roots_present"] = rs.expected_real_roots_present;
  o.extra["max_residual"] = num(rs.max_residual);
  o.extra["S_at_minus2"] = to_string(sv.S_at_minus2);
  o.extra["P_at_minus1"] = to_string(sv.P_at_minus1);
  o.extra["leading_coefficient"] = to_string(sv.leading);
  const std::string fmt = g.fmt("json");
  if (fmt == "json") {
    json j;
    json cfg = json::object();
    for (auto& [key, v] : o.config) cfg[key] = v;
    j["config"] = cfg;
    for (auto& [key, v] : o.extra.items()) j[key] = v;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  o.write(std::cout, fmt);
  return 0;
}

Poset load_poset(const std::string& file) {
  if (file.empty()) throw ParameterError("--file is required");
  if (file == "-") return read_poset(std::cin);
  std::ifstream in(file);
  if (!in) throw ParameterError("cannot open poset file: " + file);
  return read_poset(in);
}

int cmd_poset_gen(const Globals& g, const ModelFlags& mf, long n, const std::string& out_file) {
  Rng rng(g.seed);
  Poset P = generate_model(mf.m, n, rng);
  std::ostringstream os;
  Output o;
  mf.echo(o);
  o.set("n", std::to_string(n));
  o.set("seed", g.seed_str());
  o.echo(os);
  write_poset(os, P);
  if (out_file.empty() || out_file == "-") {
    std::cout << os.str();
  } else {
    std::ofstream f(out_file);
    if (!f) throw ParameterError("cannot write " + out_file);
    f << os.str();
  }
  return 0;
}

int cmd_poset_analyze(const Globals& g, const std::string& file) {
  Poset P = load_poset(file);
  auto m = metrics(P);
  Output o;
  o.set("file", file);
  std::vector<std::size_t> level_sizes;
  for (auto& l : m.levels) level_sizes.push_back(l.size());
  o.cols = {"n", "relations", "covers", "width", "height", "levels", "posts", "factors", "antichain",
            "extensions", "log2_extensions", "info_bound", "setup_number"};
  json ext = nullptr, info = nullptr, setup = nullptr, l2 = nullptr;
  if (m.extension_count) {
    ext = m.extension_count->get_str();
    info = forms::info_bound(*m.extension_count);
    l2 = num(m.log2_extensions);
  }
  if (P.size() <= 16) setup = setup_number(P);
  o.rows.push_back({P.size(), P.relation_count(), P.covers().size(), m.width, m.height, join(level_sizes, ";"),
                    join(m.posts, ";", 1), m.factors.size(), join(m.antichain, ";", 1), ext, l2, info, setup});
  o.write(std::cout, g.fmt("table"));
  return 0;
}

json opt_int(const std::optional<long>& v) { return v ? json(*v) : json(nullptr); }

int cmd_poset_sort(const Globals& g, const ModelFlags& mf, long n, std::uint64_t trials, const std::string& strategy,
                   const std::string& file) {
  Output o;
  o.cols = {"model", "n", "trial", "comparisons_used", "info_bound", "fk_upper", "ratio"};
  o.set("strategy", strategy);
  o.set("seed", g.seed_str());
  if (!file.empty()) {
    o.set("file", file);
    Poset P = load_poset(file);
    Rng rng(g.seed);
    auto hidden = hidden_order(P, rng);
    auto r = sort_under_poset(P, hidden, strategy, rng.engine()());
    o.rows.push_back({"file", P.size(), 0, r.comparisons_used, opt_int(r.info_bound), opt_int(r.fk_upper),
                      num(r.ratio_vs_plain)});
    o.extra["strategy_used"] = r.strategy;
    o.extra["chains"] = r.chains;
    o.write(std::cout, g.fmt("csv"));
    return 0;
  }
  mf.echo(o);
  o.set("n", std::to_string(n));
  o.set("trials", std::to_string(trials));
  auto rep = speedup_experiment(mf.m, n, trials, g.seed, g.jobs, strategy);
  for (auto& r : rep.rows) {
    if (r.estimate_only)
      o.rows.push_back({mf.m.name, n, r.trial, nullptr, nullptr, nullptr, nullptr});
    else
      o.rows.push_back({mf.m.name, n, r.trial, r.comparisons_used, opt_int(r.info_bound), opt_int(r.fk_upper),
                        num(r.ratio)});
  }
  o.extra["summary"] = {{"mean_ratio", num(rep.ratio.mean)},
                        {"radius", num(3 * rep.ratio.stderr_mean())},
                        {"info_ratio", num(rep.info_ratio)},
                        {"estimate_only", rep.estimate_only}};
  o.write(std::cout, g.fmt("csv"));
  return 0;
}

int cmd_merge(const Globals& g, const std::string& chains_text, const std::string& strategy) {
  auto chains = parse_chains(chains_text);
  MergeResult<long> r;
  if (strategy == "shellsort") r = merge_chains_shellsort(chains);
  else if (strategy == "binary") r = merge_chains_binary(chains);
  else throw ParameterError("--strategy must be shellsort or binary");
  std::vector<long> lens;
  for (auto& c : chains) lens.push_back(static_cast<long>(c.size()));
  Output o;
  o.set("chains", chains_text);
  o.set("strategy", strategy);
  std::string merged;
  for (std::size_t i = 0; i < r.merged.size(); ++i) merged += (i ? "," : "") + std::to_string(r.merged[i]);
  o.cols = {"comparisons", "merged", "schedule_complete", "inversion_bound"};
  o.rows.push_back({r.comparisons, merged, r.schedule_complete, to_string(forms::inversion_bound(lens))});
  o.write(std::cout, g.fmt("table"));
  return 0;
}

int cmd_graph_order(const Globals& g, const std::string& ps, std::size_t points, std::uint64_t steps) {
  std::vector<double> grid = ps.empty() ? probability_grid(points) : parse_doubles(ps, "--p");
  for (double p : grid) require_probability(p);
  if (steps != 0 && steps < 10000) throw ParameterError("--steps must be 0 or >= 10000");
  Output o;
  o.set("p", ps.empty() ? "grid" : ps);
  if (ps.empty()) o.set("points", std::to_string(points));
  o.set("steps", std::to_string(steps));
  o.set("seed", g.seed_str());
  o.cols = {"p", "f", "h", "theta3_bound", "crude_bound", "mu_lower", "sim_under", "sim_over"};
  auto sims = run_trials<ChainRates>(grid.size(), g.seed, g.jobs, [&](Rng& rng, std::uint64_t i) {
    if (steps == 0) return ChainRates{NAN, NAN, 0};
    return simulate_height_chains(grid[i], steps, rng.engine()());
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto e = height_increments(grid[i]);
    auto mu = mu_lower_bound(grid[i]);
    o.rows.push_back({num(grid[i]), num(e.f), num(e.h), num(e.theta3_bound), num(e.crude_bound), num(mu.mu_lower),
                      num(sims[i].under_rate), num(sims[i].over_rate)});
  }
  o.write(std::cout, g.fmt("csv"));
  return 0;
}

int cmd_mc(const Globals& g, const VariantFlags& vf, long n, std::uint64_t trials, const std::string& metric,
           double tolerance, const std::string& mode, const std::string& grid_text) {
  Output o;
  vf.echo(o);
  o.set("metric", metric);
  o.set("mode", mode);
  o.set("trials", std::to_string(trials));
  o.set("seed", g.seed_str());
  if (mode == "report") {
    o.set("n", std::to_string(n));
    o.set("tolerance", format_float(tolerance));
    auto r = montecarlo(vf.v, n, trials, g.seed, g.jobs, metric, tolerance);
    o.cols = {"variant", "params", "n", "trials", "seed", "mean", "var", "skew", "reference", "radius", "pass"};
    o.rows.push_back({r.variant, r.params, r.n, r.trials, std::to_string(r.seed), num(r.stats.mean), num(r.stats.var),
                      num(r.stats.skew), r.reference ? num(to_double(*r.reference)) : json(nullptr), num(r.radius),
                      r.pass});
    o.write(std::cout, g.fmt("csv"));
    return 0;
  }
  auto grid = parse_list(grid_text, "--grid");
  if (grid.empty()) throw ParameterError("--grid is required for this mode");
  o.set("grid", grid_text);
  if (mode == "martingale") {
    o.cols = {"n", "empirical_var", "reference", "exact_var"};
    for (auto& p : martingale_variance(grid, trials, g.seed, g.jobs))
      o.rows.push_back({p.n, num(p.empirical_var), num(p.reference), num(to_double(p.exact_var))});
  } else if (mode == "skewness") {
    o.cols = {"n", "skew", "stderr", "sign", "exact_third_central"};
    for (auto& p : skewness_report(grid, trials, g.seed, g.jobs))
      o.rows.push_back({p.n, num(p.skew), num(p.stderr_skew), p.sign,
                        p.exact_third_central ? num(to_double(*p.exact_third_central)) : json(nullptr)});
  } else {
    throw ParameterError("--mode must be report, martingale or skewness");
  }
  o.write(std::cout, g.fmt("csv"));
  return 0;
}

int cmd_dist(const Globals& g, const std::string& variant, long n, int moments) {
  auto d = gf_distribution(variant, n);
  Output o;
  o.set("variant", variant);
  o.set("n", std::to_string(n));
  if (moments > 0) {
    o.cols = {"k", "factorial_moment", "central_moment"};
    for (int k = 1; k <= moments; ++k)
      o.rows.push_back({k, to_string(factorial_moment(d, k)), to_string(central_moment(d, k))});
  } else {
    o.cols = {"comparisons", "probability"};
    for (auto& [c, p] : d) o.rows.push_back({c, to_string(p)});
  }
  o.extra["mean"] = to_string(dist_mean(d));
  o.extra["variance"] = to_string(dist_variance(d));
  o.write(std::cout, g.fmt("csv"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qslab: quicksort cost analysis and sorting under partial information"};
  app.require_subcommand(1);
  Globals g;
  std::function<int()> action;

  // sort
  auto* sort = app.add_subcommand("sort", "run one sorting engine and report its costs");
  add_globals(sort, g);
  VariantFlags sort_v;
  sort_v.add(sort);
  long sort_n = 10;
  std::string sort_keys;
  bool sort_print = false;
  sort->add_option("--n", sort_n, "number of keys of a random permutation")->capture_default_str();
  sort->add_option("--keys", sort_keys, "explicit comma separated keys");
  sort->add_flag("--print-keys", sort_print, "print the sorted keys");
  sort->callback([&] {
    action = [&] {
      sort_v.resolve();
      return cmd_sort(g, sort_v, sort_n, sort_keys, sort_print);
    };
  });

  // formula
  auto* formula = app.add_subcommand("formula", "evaluate a closed form from the catalog");
  add_globals(formula, g);
  bool f_list = false;
  std::string f_name;
  formula->add_flag("--list", f_list, "list the catalog as JSON");
  formula->add_option("--name", f_name, "formula name");
  std::set<std::string> pnames;
  for (auto& e : formula_catalog())
    for (auto& p : e.params) pnames.insert(p);
  std::map<std::string, std::string> f_params;
  std::map<std::string, CLI::Option*> f_opts;
  for (auto& p : pnames) f_opts[p] = formula->add_option("--" + p, f_params[p], "formula parameter " + p);
  formula->callback([&] {
    action = [&] {
      std::map<std::string, std::string> given;
      for (auto& [k, opt] : f_opts)
        if (opt->count()) given[k] = f_params[k];
      return cmd_formula(g, f_list, f_name, given);
    };
  });

  // identity
  auto* identity = app.add_subcommand("identity", "check the harmonic-number identities exactly");
  add_globals(identity, g);
  std::string id_name;
  long id_nmin = 1, id_nmax = 64;
  bool id_list = false;
  identity->add_option("--name", id_name, "identity name (default: all)");
  identity->add_option("--nmin", id_nmin, "smallest n")->capture_default_str();
  identity->add_option("--nmax", id_nmax, "largest n")->capture_default_str();
  identity->add_flag("--list", id_list, "list identity names and statements");
  identity->callback([&] { action = [&] { return cmd_identity(g, id_name, id_nmin, id_nmax, id_list); }; });

  // roots
  auto* roots = app.add_subcommand("roots", "roots of an indicial polynomial, with certification");
  add_globals(roots, g);
  std::string r_family = "multi";
  long r_k = 2, r_t = 0;
  roots->add_option("--family", r_family, "median, multi or general")->capture_default_str();
  roots->add_option("--k", r_k, "k")->capture_default_str();
  roots->add_option("--t", r_t, "t (general family)")->capture_default_str();
  roots->callback([&] { action = [&] { return cmd_roots(g, r_family, r_k, r_t); }; });

  // poset
  auto* poset = app.add_subcommand("poset", "generate, analyze or sort under a partial order");
  poset->require_subcommand(1);
  auto* pgen = poset->add_subcommand("gen", "generate a random poset file");
  add_globals(pgen, g);
  ModelFlags gen_m;
  gen_m.add(pgen);
  long gen_n = 10;
  std::string gen_out;
  pgen->add_option("--n", gen_n, "number of elements")->capture_default_str();
  pgen->add_option("--out", gen_out, "output file (default: stdout)");
  pgen->callback([&] { action = [&] { return cmd_poset_gen(g, gen_m, gen_n, gen_out); }; });

  auto* pan = poset->add_subcommand("analyze", "width, height, levels, posts and extension counts");
  add_globals(pan, g);
  std::string an_file;
  pan->add_option("--file", an_file, "poset file ('-' for stdin)")->required();
  pan->callback([&] { action = [&] { return cmd_poset_analyze(g, an_file); }; });

  auto* psort = poset->add_subcommand("sort", "complete a hidden order consistent with a poset");
  add_globals(psort, g);
  ModelFlags ps_m;
  ps_m.add(psort);
  long ps_n = 100;
  std::uint64_t ps_trials = 10;
  std::string ps_strategy = "levels", ps_file;
  psort->add_option("--n", ps_n, "number of elements")->capture_default_str();
  psort->add_option("--trials", ps_trials, "trials")->capture_default_str();
  psort->add_option("--strategy", ps_strategy, "levels, shellsort, binary or best")->capture_default_str();
  psort->add_option("--file", ps_file, "sort under a poset read from a file instead of a model");
  psort->callback([&] { action = [&] { return cmd_poset_sort(g, ps_m, ps_n, ps_trials, ps_strategy, ps_file); }; });

  // merge
  auto* merge = app.add_subcommand("merge", "merge sorted chains and count comparisons");
  add_globals(merge, g);
  std::string m_chains, m_strategy = "shellsort";
  merge->add_option("--chains", m_chains, "chains as \"1,4,7;2,3\"")->required();
  merge->add_option("--strategy", m_strategy, "shellsort or binary")->capture_default_str();
  merge->callback([&] { action = [&] { return cmd_merge(g, m_chains, m_strategy); }; });

  // graph-order
  auto* gorder = app.add_subcommand("graph-order", "height increments, theta bounds and chain simulation");
  add_globals(gorder, g);
  std::string go_p;
  std::size_t go_points = 99;
  std::uint64_t go_steps = 100000;
  gorder->add_option("--p", go_p, "comma separated probabilities (default: uniform grid)");
  gorder->add_option("--points", go_points, "grid points in (0,1)")->capture_default_str();
  gorder->add_option("--steps", go_steps, "Markov chain steps per p (0 = skip)")->capture_default_str();
  gorder->callback([&] { action = [&] { return cmd_graph_order(g, go_p, go_points, go_steps); }; });

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo experiments against exact references");
  add_globals(mc, g);
  VariantFlags mc_v;
  mc_v.add(mc);
  long mc_n = 100;
  std::uint64_t mc_trials = 10000;
  std::string mc_metric = "comparisons", mc_mode = "report", mc_grid;
  double mc_tol = 0;
  mc->add_option("--n", mc_n, "number of keys")->capture_default_str();
  mc->add_option("--trials", mc_trials, "trials (>= 100)")->capture_default_str();
  mc->add_option("--metric", mc_metric, "comparisons, exchanges or stages")->capture_default_str();
  mc->add_option("--tolerance", mc_tol, "added to the 3 standard error radius")->capture_default_str();
  mc->add_option("--mode", mc_mode, "report, martingale or skewness")->capture_default_str();
  mc->add_option("--grid", mc_grid, "comma separated n values for martingale and skewness");
  mc->callback([&] {
    action = [&] {
      mc_v.resolve();
      return cmd_mc(g, mc_v, mc_n, mc_trials, mc_metric, mc_tol, mc_mode, mc_grid);
    };
  });

  // dist
  auto* dist = app.add_subcommand("dist", "exact comparison distribution from the generating function");
  add_globals(dist, g);
  std::string d_variant = "single";
  long d_n = 5;
  int d_moments = 0;
  dist->add_option("--variant", d_variant, "single or dual")->capture_default_str();
  dist->add_option("--n", d_n, "number of keys (<= 12)")->capture_default_str();
  dist->add_option("--moments", d_moments, "print factorial and central moments 1..K instead")->capture_default_str();
  dist->callback([&] { action = [&] { return cmd_dist(g, d_variant, d_n, d_moments); }; });

  try {
    app.parse(argc, argv);
    g.resolve();
    return action ? action() : 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
