#pragma once

// JSON and CSV emission for experiment records.

#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubes/variance.hpp"
#include "cubes/verify.hpp"

namespace cubes {

using json = nlohmann::ordered_json;

inline std::string big_str(const BigInt& v) { return v.str(); }
inline std::string rat_str(const Rational& v) { return v.str(); }

// Comma separated row with 17 significant digits for floating values.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) { os_ << std::setprecision(17); }

  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) os_ << (i ? "," : "") << cols[i];
    os_ << '\n';
  }

  template <class... Ts>
  void row(const Ts&... v) {
    bool first = true;
    ((os_ << (first ? "" : ",") << v, first = false), ...);
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

inline json to_json(const VarianceReport& r) {
  json j;
  j["inputs"] = {{"X", r.X}, {"K", r.K}, {"d", r.d}, {"R", r.R}, {"weight", r.weight}};
  j["terms"] = {{"var_direct", r.var_direct},
                {"sigma1", r.sigma1},
                {"sigma1_exact_units_2^-80", big_str(r.sigma1_exact)},
                {"sigma2", r.sigma2},
                {"sigma3", r.sigma3},
                {"singular_series", r.series},
                {"pure_moment", r.pure},
                {"main_term", r.main_term},
                {"special_term", r.special_term}};
  j["residuals"] = {{"decomposition_relative", r.decomposition_residual}, {"hl_residual", r.residual}};
  j["scan"] = {{"a_limit", r.a_limit}, {"terms", r.terms}, {"kd_within_x_pow_0.9", r.in_range}};
  return j;
}

inline json to_json(const HLError& e) {
  return {{"X", e.X},
          {"d", e.d},
          {"pair_count", e.pair},
          {"singular_series", e.series},
          {"main_term", e.main_term},
          {"special_diag", e.special_diag},
          {"special_distinct", e.special_distinct},
          {"E", e.E},
          {"E_diag", e.E_diag},
          {"E_over_X3", e.E_over_X3}};
}

inline json to_json(const MomentCheck& c) {
  json j;
  j["inputs"] = {{"K", c.K}, {"d", c.d}};
  j["terms"] = {{"pure_lhs", rat_str(c.pure_lhs)},
                {"mixed_lhs", rat_str(c.mixed_lhs)},
                {"pure_lhs_value", to_double(c.pure_lhs)},
                {"mixed_lhs_value", to_double(c.mixed_lhs)},
                {"main", rat_str(c.main)},
                {"main_value", to_double(c.main)},
                {"truncated_value", to_double(c.truncated)},
                {"pure_tail_bound", to_double(c.pure_bound)},
                {"mixed_tail_bound", to_double(c.mixed_bound)},
                {"unbalanced_pairs", c.unbalanced_pairs}};
  j["residuals"] = {{"pure_minus_main", to_double(c.pure_lhs - c.main)},
                    {"mixed_minus_main", to_double(c.mixed_lhs - c.main)}};
  j["ok"] = c.ok();
  j["failures"] = c.failures;
  return j;
}

inline json to_json(const SievedReport& s) {
  json primes = json::array();
  for (u64 p : s.primes) primes.push_back(p);
  json j;
  j["inputs"] = {{"X", s.X}, {"K", s.K}, {"hbar", s.hbar}, {"z", s.z}};
  j["terms"] = {{"P", big_str(s.P)},
                {"primes", primes},
                {"terms", s.terms},
                {"kept", s.kept},
                {"filtered_variance", s.filtered},
                {"unfiltered_variance", s.unfiltered},
                {"l2_norm_sq", s.l2_norm_sq},
                {"comparison", s.comparison},
                {"H", rat_str(s.H)},
                {"H_value", to_double(s.H)},
                {"H_over_log_z", s.H_over_log}};
  j["residuals"] = {{"filtered_over_comparison", s.comparison > 0 ? s.filtered / s.comparison : 0.0}};
  return j;
}

inline json to_json(const PipelineRow& r) {
  return {{"X", r.X},
          {"R", r.R},
          {"j", r.j},
          {"A", r.A},
          {"K", r.K},
          {"eta", r.eta},
          {"sigma_min", r.sigma_min},
          {"var", r.var},
          {"var_ratio", r.var_ratio},
          {"admissible", r.admissible},
          {"unrepresented", r.unrepresented},
          {"exceptional", r.exceptional},
          {"unrepresented_fraction", r.unrepresented_fraction},
          {"exceptional_fraction", r.exceptional_fraction},
          {"chebyshev_bound", r.chebyshev_bound},
          {"chebyshev_holds", r.chebyshev_holds}};
}

inline json to_json(const CheckResult& r, bool with_time = false) {
  json j = {{"name", r.name}, {"checks", r.checks}, {"failures", r.failure_count}, {"ok", r.ok()},
            {"examples", r.failures}};
  if (with_time) j["seconds"] = r.seconds;
  return j;
}

inline json to_json(const ExceptionalScan& s) {
  json j;
  j["inputs"] = {{"A", s.A}, {"K", s.K}, {"eta", s.eta}};
  j["terms"] = {{"count", s.count},
                {"fraction", double(s.count) / double(2 * s.A + 1)},
                {"bin_width", s.bin_width},
                {"bin_origin", s.bin_origin},
                {"histogram", s.histogram}};
  j["trends"] = {{"K", s.trend_K}, {"fraction", s.trend_fraction}};
  return j;
}

inline json to_json(const PrimeDemo& d) {
  return {{"A", d.A},
          {"primes", d.primes},
          {"sum_r3", d.sum_r3},
          {"sum_r3_sq", d.sum_r3_sq},
          {"admissible_primes", d.admissible},
          {"represented_admissible", d.represented_admissible},
          {"sum_r3_log_A_over_A", d.fitted_constant}};
}

}  // namespace cubes
