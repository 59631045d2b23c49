// cubes_cli: batch front end for the library.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "cubes/cubes.hpp"

using namespace cubes;

namespace {

struct RunConfig {
  std::string format;  // empty: csv for tables, json for reports
  std::string output;
  std::string cache_dir;
  unsigned threads = 1;
  u64 seed = 2024;
};

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("precondition violated: " + what);
}

// Flattened key,value view of a JSON object for --format csv on report commands.
void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else if (j.is_number_float()) {
    std::ostringstream os;
    os << std::setprecision(17) << j.get<double>();
    out.emplace_back(prefix, os.str());
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

class Output {
 public:
  explicit Output(const RunConfig& cfg) : cfg_(cfg) {
    if (!cfg.output.empty()) {
      file_ = std::make_unique<std::ofstream>(cfg.output);
      if (!*file_) throw ValidationError("cannot open output file " + cfg.output);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }
  bool json_mode() const { return cfg_.format == "json"; }

  void report(const json& j) {
    if (json_mode()) {
      os() << j.dump(2) << '\n';
      return;
    }
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(j, "", rows);
    CsvWriter w(os());
    w.header({"key", "value"});
    for (const auto& [k, v] : rows) w.row(k, v);
  }

 private:
  const RunConfig& cfg_;
  std::unique_ptr<std::ofstream> file_;
};

Weight make_weight(const std::string& name, double R) {
  if (name == "nu_star") {
    require(R >= 2, "R >= 2 for nu_star");
    return make_nu_star(R);
  }
  if (name == "shell_bump") return make_shell_bump();
  throw ValidationError("unknown weight '" + name + "' (nu_star, shell_bump)");
}

std::vector<u64> parse_list(const std::string& s) {
  std::vector<u64> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoull(item));
  return out;
}

std::vector<double> parse_dlist(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

// key=value lines become --key value unless the flag is already on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") path = args[i + 1];
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path);
  std::set<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config" || given.count(key)) continue;
    if (value == "true") {
      args.push_back("--" + key);
    } else if (value != "false") {
      args.push_back("--" + key);
      args.push_back(value);
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local and global statistics of x^3 + y^3 + z^3 = a", "cubes_cli"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  RunConfig cfg;
  app.add_option("--config", "key=value file; command line flags win");
  auto common = [&](CLI::App* s) {
    s->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--output,-o", cfg.output, "Output file (default stdout)");
    s->add_option("--cache-dir", cfg.cache_dir, "Cache directory (CUBES_CACHE_DIR overrides)");
    s->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::Range(1u, 256u));
    s->add_option("--seed", cfg.seed, "Seed for randomized checks");
    s->add_option("--config", "key=value file; command line flags win");
  };

  // expsum
  u64 modulus = 0;
  std::optional<i64> a_opt;
  bool all = false;
  auto* expsum = app.add_subcommand("expsum", "T_a(n) for one modulus");
  expsum->add_option("--modulus,-n", modulus, "Modulus n")->required();
  expsum->add_option("--a", a_opt, "Single residue a");
  expsum->add_flag("--all", all, "All residues a = 0..n-1 (default)");

  // splus
  u64 sp_n = 0, sp_d = 1;
  auto* splus = app.add_subcommand("splus", "S+_0(n;d)");
  splus->add_option("--n", sp_n, "Modulus n")->required();
  splus->add_option("--d", sp_d, "Level d");

  // series
  u64 K = 1;
  i64 a_lo = 0, a_hi = 0;
  bool exact = false;
  std::optional<u64> level;
  u64 n_max = kSeriesLevel, p_max = 0;
  auto* series = app.add_subcommand("series", "s_a(K) and M_a(K) over a window, or the singular series at level d");
  series->add_option("--K", K, "Truncation K");
  series->add_option("--a-lo", a_lo, "Window start");
  series->add_option("--a-hi", a_hi, "Window end");
  series->add_flag("--exact", exact, "Exact rationals");
  series->add_option("--level", level, "Singular series at level d instead of a window");
  series->add_option("--n-max", n_max, "Partial sum length for --level");
  series->add_option("--p-max", p_max, "Euler product prime bound (default n-max)");

  // gamma
  i64 g_a = 0;
  u64 g_pmax = 100;
  auto* gam = app.add_subcommand("gamma", "gamma_p(a) factors and their product");
  gam->add_option("--a", g_a, "Integer a")->required();
  gam->add_option("--p-max", g_pmax, "Largest prime");

  // density
  std::string weight_name = "nu_star";
  double R = 2;
  std::size_t grid = 256;
  std::optional<double> d_a;
  double d_X = 1;
  auto* density = app.add_subcommand("density", "Archimedean density table sigma_{inf,a~}(1)");
  density->add_option("--weight", weight_name, "nu_star or shell_bump");
  density->add_option("--R", R, "Scale range of nu_star");
  density->add_option("--grid", grid, "Table nodes (>= 64)");
  density->add_option("--a", d_a, "Single point a (uses surface quadrature)");
  density->add_option("--X", d_X, "Scale X for --a");

  // count
  u64 X = 0;
  auto* count = app.add_subcommand("count", "Weighted lattice counts N_{a,nu}(X)");
  count->add_option("--X", X, "Box scale X")->required();
  count->add_option("--R", R, "Scale range of nu_star");
  count->add_option("--weight", weight_name, "nu_star or shell_bump");

  // variance
  u64 d = 1;
  std::string trace_path, hl_trend;
  auto* var = app.add_subcommand("variance", "K-approximate variance and its decomposition");
  var->add_option("--X", X, "Box scale X")->required();
  var->add_option("--K", K, "Truncation K");
  var->add_option("--d", d, "Level d");
  var->add_option("--R", R, "Scale range of nu_star");
  var->add_option("--weight", weight_name, "nu_star or shell_bump");
  var->add_option("--trace", trace_path, "Per-a CSV trace file");
  var->add_option("--hl-trend", hl_trend, "Comma separated X list for the E/X^3 trend");

  // sieved
  HypothesisParams hp;
  auto* sieved = app.add_subcommand("sieved", "Variance restricted to a coprime to small primes");
  sieved->add_option("--X", X, "Box scale X")->required();
  sieved->add_option("--K", K, "Truncation K");
  sieved->add_option("--R", R, "Scale range of nu_star");
  sieved->add_option("--hbar", hp.hbar, "Sieve exponent");
  sieved->add_option("--delta", hp.delta, "delta");
  sieved->add_option("--xi", hp.xi, "xi");
  sieved->add_option("--k", hp.k, "Sobolev index");

  // verify
  std::string suite = "local";
  u64 max_modulus = 3000, k_max = 48, d_max = 8;
  auto* verify = app.add_subcommand("verify", "Exact identity suites; exit 2 on failure");
  verify->add_option("--suite", suite, "local, ground, moments or all")
      ->check(CLI::IsMember({"local", "ground", "moments", "all"}));
  verify->add_option("--max-modulus", max_modulus, "Cap on every modulus in the local suite");
  verify->add_option("--K-max", k_max, "Largest K for the moment suite (<= 48)");
  verify->add_option("--d-max", d_max, "Largest d for the moment suite (<= 8)");

  // scan-exceptional
  i64 A = 0;
  double eta = 0.5, bin_width = 0.25;
  bool pipeline = false;
  std::string x_list = "60", r_list = "2,4";
  int j_exp = 2;
  auto* scan = app.add_subcommand("scan-exceptional", "|s_a(K)| < eta scan, or the Chebyshev pipeline");
  scan->add_option("--A", A, "Scan |a| <= A");
  scan->add_option("--K", K, "Truncation K");
  scan->add_option("--eta", eta, "Threshold eta");
  scan->add_option("--bin-width", bin_width, "Histogram bin width");
  scan->add_flag("--pipeline", pipeline, "Run the Chebyshev pipeline over --X-list and --R-list");
  scan->add_option("--X-list", x_list, "Comma separated X values");
  scan->add_option("--R-list", r_list, "Comma separated R values");
  scan->add_option("--j", j_exp, "Exponent j");

  // scan-primes
  u64 pA = 0;
  auto* primes = app.add_subcommand("scan-primes", "sum of r3(p) over primes p <= A");
  primes->add_option("--A", pA, "Bound A (<= 10^6)")->required();

  // moments
  std::string kind = "local";
  u64 poisson_n = 4;
  auto* moments = app.add_subcommand("moments", "Truncated local moments or archimedean moments");
  moments->add_option("--kind", kind, "local or archimedean")->check(CLI::IsMember({"local", "archimedean"}));
  moments->add_option("--K", K, "Truncation K");
  moments->add_option("--d", d, "Level d");
  moments->add_option("--R", R, "Scale range of nu_star");
  moments->add_option("--grid", grid, "Density table nodes");
  moments->add_option("--N-max", poisson_n, "Largest Poisson modulus N");

  for (auto* s : {expsum, splus, series, gam, density, count, var, sieved, verify, scan, primes, moments}) common(s);

  try {
    auto args = merge_config(std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (cfg.format.empty())
      cfg.format = var->parsed() || sieved->parsed() || moments->parsed() || primes->parsed() ||
                           (scan->parsed() && !pipeline)
                       ? "json"
                       : "csv";
    ShellProfile::cache_dir_flag() = cfg.cache_dir;
    TTable table(resolve_cache_dir(cfg.cache_dir));
    Output out(cfg);

    if (expsum->parsed()) {
      require(modulus >= 1, "modulus >= 1");
      require(modulus <= 10'000'000, "modulus <= 10^7");
      const TVector& t = table.full(modulus);
      if (a_opt && !all) {
        const i64 v = t.at(*a_opt);
        if (out.json_mode())
          out.os() << json{{"modulus", modulus}, {"a", *a_opt}, {"T", v}}.dump(2) << '\n';
        else {
          CsvWriter w(out.os());
          w.header({"a", "T"});
          w.row(*a_opt, v);
        }
      } else if (out.json_mode()) {
        out.os() << json{{"modulus", modulus}, {"values", t.values}}.dump(2) << '\n';
      } else {
        CsvWriter w(out.os());
        w.header({"a", "T"});
        for (u64 a = 0; a < modulus; ++a) w.row(a, t.values[a]);
      }
    } else if (splus->parsed()) {
      require(sp_n >= 1 && sp_d >= 1, "n, d >= 1");
      const BigInt s = s_plus_zero(sp_n, sp_d, table);
      if (out.json_mode())
        out.os() << json{{"n", sp_n}, {"d", sp_d}, {"S", big_str(s)}}.dump(2) << '\n';
      else {
        CsvWriter w(out.os());
        w.header({"n", "d", "S"});
        w.row(sp_n, sp_d, s);
      }
    } else if (series->parsed()) {
      if (level) {
        require(*level >= 1, "level d >= 1");
        require(n_max >= *level, "n-max >= d");
        const auto e = singular_series_level_d(*level, n_max, p_max, table);
        out.report({{"d", e.d},
                    {"n_max", e.n_max},
                    {"p_max", e.p_max},
                    {"partial", rat_str(e.partial)},
                    {"partial_value", e.value},
                    {"tail_heuristic", e.tail_heuristic},
                    {"euler_product", e.euler_product}});
      } else {
        require(K >= 1, "K >= 1");
        require(a_lo <= a_hi, "a-lo <= a-hi");
        const auto w = series_window(K, a_lo, a_hi, exact ? NumericMode::exact : NumericMode::real, table, cfg.threads);
        if (out.json_mode()) {
          json rows = json::array();
          for (i64 a = a_lo; a <= a_hi; ++a) {
            json r = {{"a", a}, {"s", w.s_at(a)}, {"M", w.m_at(a)}};
            if (exact) {
              r["s_exact"] = rat_str(w.s_exact[std::size_t(a - a_lo)]);
              r["M_exact"] = rat_str(w.m_exact[std::size_t(a - a_lo)]);
            }
            rows.push_back(r);
          }
          out.os() << json{{"K", K}, {"rows", rows}}.dump(2) << '\n';
        } else {
          CsvWriter c(out.os());
          if (exact) {
            c.header({"a", "s", "M", "s_exact", "M_exact"});
            for (i64 a = a_lo; a <= a_hi; ++a)
              c.row(a, w.s_at(a), w.m_at(a), w.s_exact[std::size_t(a - a_lo)], w.m_exact[std::size_t(a - a_lo)]);
          } else {
            c.header({"a", "s", "M"});
            for (i64 a = a_lo; a <= a_hi; ++a) c.row(a, w.s_at(a), w.m_at(a));
          }
        }
      }
    } else if (gam->parsed()) {
      require(g_pmax >= 2, "p-max >= 2");
      const auto g = gamma(g_a, g_pmax, table);
      if (out.json_mode()) {
        json factors = json::array();
        for (u64 p : primes_up_to(g_pmax)) {
          const auto f = gamma_factor(g_a, p, table);
          factors.push_back({{"p", p}, {"gamma_p", rat_str(f.value)}, {"value", to_double(f.value)}});
        }
        out.os() << json{{"a", g_a}, {"p_max", g_pmax}, {"value", g.value}, {"half_value", g.half_value},
                         {"stabilization", g.stabilization}, {"factors", factors}}
                        .dump(2)
                 << '\n';
      } else {
        CsvWriter c(out.os());
        c.header({"p", "gamma_p", "value"});
        for (u64 p : primes_up_to(g_pmax)) {
          const auto f = gamma_factor(g_a, p, table);
          c.row(p, f.value, to_double(f.value));
        }
      }
    } else if (density->parsed()) {
      require(grid >= 64, "grid >= 64");
      const Weight w = make_weight(weight_name, R);
      if (d_a) {
        require(d_X >= 1, "X >= 1");
        out.report({{"weight", w.name}, {"R", w.R}, {"a", *d_a}, {"X", d_X}, {"sigma", sigma_inf(*d_a, d_X, w)}});
      } else {
        const auto t = density_table(w, grid, cfg.seed);
        if (out.json_mode()) {
          out.os() << json{{"weight", w.name},
                           {"R", w.R},
                           {"grid", t.values().size()},
                           {"a_max", t.a_max()},
                           {"validation_max_rel_error", t.validation().max_rel_error},
                           {"refined", t.validation().refined},
                           {"values", t.values()}}
                          .dump(2)
                   << '\n';
        } else {
          t.write_csv(out.os());
        }
      }
    } else if (count->parsed()) {
      require(X >= 1, "X >= 1");
      const Weight w = make_weight(weight_name, R);
      const auto t = count_weighted(X, w, cfg.threads);
      if (out.json_mode()) {
        u64 nonzero = 0;
        for (i64 v : t.q) nonzero += v != 0;
        out.os() << json{{"X", X}, {"weight", w.name}, {"R", w.R}, {"a_lim", t.a_lim}, {"points", t.points},
                         {"represented", nonzero}, {"total_mass", std::ldexp(to_double(t.total_mass), -kScaleBits)}}
                        .dump(2)
                 << '\n';
      } else {
        t.write_csv(out.os());
      }
    } else if (var->parsed()) {
      require(X >= 1 && K >= 1 && d >= 1, "X, K, d >= 1");
      const Weight w = make_weight(weight_name, R);
      const auto ctx = make_variance_context(X, w, cfg.threads);
      const auto r = variance(ctx, K, d, table, cfg.threads, !trace_path.empty());
      if (!r.in_range) std::cerr << "warning: K d > X^{9/10}; outside the unconditional range\n";
      json j = to_json(r);
      j["hl_error"] = to_json(hl_error(ctx, d, table));
      if (!hl_trend.empty()) {
        json trend = json::array();
        for (const auto& e : hl_error_trend(w, parse_list(hl_trend), d, table, cfg.threads)) trend.push_back(to_json(e));
        j["trends"] = {{"hl_error", trend}};
      }
      out.report(j);
      if (!trace_path.empty()) {
        std::ofstream tf(trace_path);
        if (!tf) throw ValidationError("cannot open trace file " + trace_path);
        CsvWriter c(tf);
        c.header({"a", "N", "s", "sigma", "diff"});
        for (const auto& row : r.trace) c.row(row.a, row.N, row.s, row.sigma, row.diff);
      }
    } else if (sieved->parsed()) {
      require(X >= 2 && K >= 1, "X >= 2, K >= 1");
      hp.validate();
      require(std::pow(double(X), hp.hbar) <= 20, "X^hbar <= 20");
      const auto ctx = make_variance_context(X, make_nu_star(R), cfg.threads);
      out.report(to_json(sieved_variance(ctx, K, hp, table, cfg.threads)));
    } else if (verify->parsed()) {
      require(max_modulus >= 2, "max-modulus >= 2");
      require(k_max >= 1 && k_max <= 48 && d_max >= 1 && d_max <= 8, "K-max <= 48 and d-max <= 8");
      std::vector<CheckResult> results;
      auto add = [&](std::vector<CheckResult> v) { results.insert(results.end(), v.begin(), v.end()); };
      if (suite == "ground" || suite == "all") add(ground_suite(table));
      if (suite == "local" || suite == "all") {
        auto c = LocalSuiteConfig::capped(max_modulus);
        c.seed = cfg.seed;
        add(local_suite(c, table));
      }
      if (suite == "moments" || suite == "all") add(moment_suite(k_max, d_max, table));
      if (out.json_mode()) {
        json arr = json::array();
        for (const auto& r : results) arr.push_back(to_json(r));
        out.os() << json{{"suite", suite}, {"ok", all_ok(results)}, {"checks", arr}}.dump(2) << '\n';
      } else {
        CsvWriter c(out.os());
        c.header({"check", "count", "failures", "status"});
        for (const auto& r : results) c.row('"' + r.name + '"', r.checks, r.failure_count, r.ok() ? "PASS" : "FAIL");
      }
      for (const auto& r : results)
        for (const auto& f : r.failures) std::cerr << r.name << ": " << f << '\n';
      return all_ok(results) ? 0 : 2;
    } else if (scan->parsed()) {
      if (pipeline) {
        const auto xs = parse_list(x_list);
        const auto rs = parse_dlist(r_list);
        require(!xs.empty() && !rs.empty(), "non-empty X and R lists");
        for (u64 x : xs) require(x >= 2 && x <= 100, "2 <= X <= 100");
        for (double r : rs) require(r >= 2 && r <= 8, "2 <= R <= 8");
        require(j_exp >= 1, "j >= 1");
        const auto rows = pipeline_demo(rs, xs, j_exp, table, cfg.threads);
        if (out.json_mode()) {
          json arr = json::array();
          for (const auto& r : rows) arr.push_back(to_json(r));
          out.os() << json{{"rows", arr}}.dump(2) << '\n';
        } else {
          CsvWriter c(out.os());
          c.header({"X", "R", "j", "K", "eta", "sigma_min", "var", "unrepresented", "exceptional",
                    "unrepresented_fraction", "exceptional_fraction", "chebyshev_bound", "chebyshev_holds"});
          for (const auto& r : rows)
            c.row(r.X, r.R, r.j, r.K, r.eta, r.sigma_min, r.var, r.unrepresented, r.exceptional,
                  r.unrepresented_fraction, r.exceptional_fraction, r.chebyshev_bound, r.chebyshev_holds);
        }
        for (const auto& r : rows)
          if (!r.chebyshev_holds) return 2;
      } else {
        require(A >= 1 && K >= 1 && eta > 0, "A >= 1, K >= 1, eta > 0");
        require(bin_width > 0, "bin-width > 0");
        out.report(to_json(exceptional_scan(A, K, eta, table, cfg.threads, bin_width)));
      }
    } else if (primes->parsed()) {
      require(pA >= 2 && pA <= 1'000'000, "2 <= A <= 10^6");
      out.report(to_json(prime_demo(pA)));
    } else if (moments->parsed()) {
      if (kind == "local") {
        require(K >= 1 && K <= 48 && d >= 1 && d <= 8, "1 <= K <= 48 and 1 <= d <= 8");
        const auto c = nonarch_moment_check(K, d, table);
        out.report(to_json(c));
        if (!c.ok()) return 2;
      } else {
        require(grid >= 64, "grid >= 64");
        require(poisson_n >= 1, "N-max >= 1");
        const Weight w = make_nu_star(R);
        const auto t = density_table(w, grid, cfg.seed);
        const double pure = pure_l2_moment(w), mixed = mixed_l1_moment(w, t);
        json rows = json::array();
        for (u64 px : {20u, 40u, 80u})
          for (u64 N = 1; N <= poisson_n; ++N) {
            const auto p = poisson_check(t, pure, px, N, 1);
            rows.push_back({{"X", px}, {"N", N}, {"deviation", p.deviation}, {"interp_deviation", p.interp_deviation}});
          }
        out.report({{"R", R},
                    {"pure", pure},
                    {"mixed", mixed},
                    {"relative_difference", std::fabs(pure - mixed) / pure},
                    {"poisson", rows}});
      }
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
