#include "opid/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "opid/errors.hpp"
#include "opid/identity_lab.hpp"
#include "opid/spectral_factor.hpp"

namespace opid {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw InvalidSpec(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw InvalidSpec("unknown key '" + key + "' in " + where);
}

double get_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw InvalidSpec(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InvalidSpec(what + " must be finite");
  return d;
}

long long get_integer(const json& v, const std::string& what) {
  if (!v.is_number_integer()) throw InvalidSpec(what + " must be an integer");
  return v.get<long long>();
}

cplx parse_entry(const json& v) {
  if (v.is_number()) return {get_number(v, "matrix entry"), 0.0};
  if (v.is_array() && v.size() == 2) return {get_number(v[0], "matrix entry"), get_number(v[1], "matrix entry")};
  throw InvalidSpec("matrix entry must be a number or [re, im]");
}

MatrixXcd parse_matrix(const json& v) {
  if (!v.is_array() || v.empty()) throw InvalidSpec("matrix must be a non-empty list of rows");
  const auto rows = static_cast<Index>(v.size());
  if (!v[0].is_array() || v[0].empty()) throw InvalidSpec("matrix rows must be non-empty lists");
  const auto cols = static_cast<Index>(v[0].size());
  MatrixXcd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (!v[r].is_array() || static_cast<Index>(v[r].size()) != cols) throw InvalidSpec("matrix rows differ in length");
    for (Index c = 0; c < cols; ++c) m(r, c) = parse_entry(v[r][c]);
  }
  return m;
}

std::string row_col(Index i) { return std::to_string(i); }

CheckRecord at_most(std::string name, double measured, double threshold, std::string note = {}) {
  return CheckRecord{std::move(name), measured, threshold, "<=", measured <= threshold, std::move(note)};
}

CheckRecord at_least(std::string name, double measured, double threshold, std::string note = {}) {
  return CheckRecord{std::move(name), measured, threshold, ">=", measured >= threshold, std::move(note)};
}

BuildOptions build_options(const RunConfig& cfg) { return BuildOptions{cfg.tolerances.kernel_quadrature, Exec::parallel}; }

void require_ladder(const RunConfig& cfg) {
  if (cfg.N_list.size() < 2) throw InvalidSpec("this command needs at least two entries in N_list");
}

Table residual_table() { return Table{{"variant", "N", "residual", "order"}, {}}; }

void add_residual_row(Table& t, const std::string& label, int N, double residual, std::optional<double> order) {
  t.rows.push_back({label, std::to_string(N), format_double(residual), order ? format_double(*order) : ""});
}

// Pass when the final residual is at roundoff, otherwise on the final order.
CheckRecord order_check(const std::string& name, const std::vector<double>& residuals, const std::vector<int>& Ns,
                        const Tolerances& tol) {
  const double last = residuals.back();
  if (last <= tol.exact_residual) return at_most(name + " residual (exact cancellation)", last, tol.exact_residual);
  const std::size_t n = residuals.size();
  const double order = observed_order(residuals[n - 2], last, Ns[n - 2], Ns[n - 1]);
  return at_least(name + " order", std::isfinite(order) ? order : 0.0, tol.order_threshold);
}

}  // namespace

MatrixFunctionSpec parse_function(const json& doc, double default_length) {
  reject_unknown(doc,
                 {"family", "m1", "m2", "coefficients", "omega", "num_terms", "decay", "seed", "length", "offset",
                  "addends"},
                 "function");
  MatrixFunctionSpec spec;
  if (!doc.contains("family") || !doc["family"].is_string()) throw InvalidSpec("function.family is required");
  spec.family = family_from_string(doc["family"].get<std::string>());
  spec.m1 = doc.contains("m1") ? get_integer(doc["m1"], "function.m1") : 1;
  spec.m2 = doc.contains("m2") ? get_integer(doc["m2"], "function.m2") : 1;
  if (spec.m1 <= 0 || spec.m2 <= 0) throw InvalidSpec("function dimensions m1, m2 must be positive");
  if (doc.contains("coefficients")) {
    if (!doc["coefficients"].is_array()) throw InvalidSpec("function.coefficients must be a list of matrices");
    for (const auto& c : doc["coefficients"]) spec.coefficients.push_back(parse_matrix(c));
  }
  if (doc.contains("omega")) spec.omega = get_number(doc["omega"], "function.omega");
  if (doc.contains("num_terms")) spec.num_terms = static_cast<int>(get_integer(doc["num_terms"], "function.num_terms"));
  if (doc.contains("decay")) spec.decay = get_number(doc["decay"], "function.decay");
  if (doc.contains("seed")) {
    const auto seed = get_integer(doc["seed"], "function.seed");
    if (seed < 0) throw InvalidSpec("function.seed must be non-negative");
    spec.seed = static_cast<std::uint64_t>(seed);
  }
  spec.length = doc.contains("length") ? get_number(doc["length"], "function.length") : default_length;
  if (doc.contains("offset")) spec.offset = parse_matrix(doc["offset"]);
  if (doc.contains("addends")) {
    if (!doc["addends"].is_array()) throw InvalidSpec("function.addends must be a list");
    for (const auto& a : doc["addends"]) {
      json sub = a;
      if (!sub.contains("m1")) sub["m1"] = spec.m1;
      if (!sub.contains("m2")) sub["m2"] = spec.m2;
      spec.addends.push_back(parse_function(sub, spec.length));
    }
  }
  // constructing validates shapes and family parameters
  (void)MatrixFunction(spec);
  return spec;
}

RunConfig parse_config(const json& doc) {
  reject_unknown(doc,
                 {"function", "l", "variant", "N_list", "radii", "epsilons", "l_hat", "h", "expected_min_eig",
                  "tolerances", "output"},
                 "config");
  RunConfig cfg;
  if (doc.contains("l")) cfg.l = get_number(doc["l"], "l");
  if (!(cfg.l > 0)) throw InvalidSpec("l must be positive");
  if (!doc.contains("function")) throw InvalidSpec("config.function is required");
  cfg.function = parse_function(doc["function"], cfg.l);
  if (cfg.function.length < cfg.l * (1 - 1e-12)) throw InvalidSpec("function domain is shorter than l");
  if (doc.contains("variant")) {
    if (!doc["variant"].is_string()) throw InvalidSpec("variant must be a string");
    cfg.variant = variant_from_string(doc["variant"].get<std::string>());
  }
  if (doc.contains("N_list")) {
    if (!doc["N_list"].is_array() || doc["N_list"].empty()) throw InvalidSpec("N_list must be a non-empty list");
    cfg.N_list.clear();
    for (const auto& n : doc["N_list"]) {
      const auto v = get_integer(n, "N_list entry");
      if (v < 2 || v > 1 << 16) throw InvalidSpec("N_list entries must be in [2, 65536]");
      if (!cfg.N_list.empty() && v <= cfg.N_list.back()) throw InvalidSpec("N_list must be strictly increasing");
      cfg.N_list.push_back(static_cast<int>(v));
    }
  }
  if (doc.contains("radii")) {
    cfg.radii = static_cast<int>(get_integer(doc["radii"], "radii"));
    if (cfg.radii < 1) throw InvalidSpec("radii must be >= 1");
  }
  if (doc.contains("epsilons")) {
    if (!doc["epsilons"].is_array()) throw InvalidSpec("epsilons must be a list");
    cfg.epsilons.clear();
    for (const auto& e : doc["epsilons"]) {
      const double v = get_number(e, "epsilon");
      if (!(v > 0 && v <= 1)) throw InvalidSpec("epsilons must lie in (0, 1]");
      cfg.epsilons.push_back(v);
    }
  }
  if (doc.contains("l_hat")) cfg.l_hat = get_number(doc["l_hat"], "l_hat");
  if (!(cfg.l_hat > 0 && cfg.l_hat < cfg.l)) throw InvalidSpec("l_hat must lie in (0, l)");
  if (doc.contains("h")) cfg.h = get_number(doc["h"], "h");
  if (!(cfg.h > 0 && cfg.h < cfg.l_hat)) throw InvalidSpec("h must lie in (0, l_hat)");
  if (doc.contains("expected_min_eig")) cfg.expected_min_eig = get_number(doc["expected_min_eig"], "expected_min_eig");
  if (doc.contains("tolerances")) {
    const auto& t = doc["tolerances"];
    std::map<std::string, double*> fields = {
        {"order_threshold", &cfg.tolerances.order_threshold},
        {"exact_residual", &cfg.tolerances.exact_residual},
        {"positivity_slack", &cfg.tolerances.positivity_slack},
        {"reconstruction", &cfg.tolerances.reconstruction},
        {"nesting_ratio_min", &cfg.tolerances.nesting_ratio_min},
        {"nesting_ratio_max", &cfg.tolerances.nesting_ratio_max},
        {"nesting_exact", &cfg.tolerances.nesting_exact},
        {"crosscheck_bound", &cfg.tolerances.crosscheck_bound},
        {"crosscheck_exact", &cfg.tolerances.crosscheck_exact},
        {"kernel_quadrature", &cfg.tolerances.kernel_quadrature},
        {"min_eig_tolerance", &cfg.tolerances.min_eig_tolerance},
    };
    std::set<std::string> allowed;
    for (const auto& [k, _] : fields) allowed.insert(k);
    reject_unknown(t, allowed, "tolerances");
    for (const auto& [k, v] : t.items()) {
      *fields[k] = get_number(v, "tolerances." + k);
      if (!(*fields[k] >= 0)) throw InvalidSpec("tolerances." + k + " must be non-negative");
    }
  }
  if (doc.contains("output")) {
    const auto& o = doc["output"];
    reject_unknown(o, {"path", "format"}, "output");
    if (o.contains("path")) {
      if (!o["path"].is_string()) throw InvalidSpec("output.path must be a string");
      cfg.output_path = o["path"].get<std::string>();
    }
    if (o.contains("format")) {
      const auto f = o["format"].is_string() ? o["format"].get<std::string>() : std::string{};
      if (f == "csv")
        cfg.format = OutputFormat::csv;
      else if (f == "json")
        cfg.format = OutputFormat::json;
      else
        throw InvalidSpec("output.format must be csv or json");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidSpec(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::pass:
      return "pass";
    case VerdictStatus::fail:
      return "fail";
    case VerdictStatus::skip:
      return "skip";
  }
  return "fail";
}

bool SuiteVerdict::overall() const {
  if (status == VerdictStatus::fail) return false;
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

void SuiteVerdict::finalize() {
  if (status == VerdictStatus::skip || status == VerdictStatus::fail) return;
  status = overall() ? VerdictStatus::pass : VerdictStatus::fail;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(std::ostream& os, const Table& table) {
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (k) os << ',';
      os << csv_field(fields[k]);
    }
    os << "\r\n";
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CommandResult cmd_verify_identity(const RunConfig& cfg) {
  require_ladder(cfg);
  const auto fn = make_family(cfg.function);
  const auto opts = build_options(cfg);
  CommandResult out{SuiteVerdict{"verify-identity", {}, VerdictStatus::pass, {}}, residual_table()};
  const auto reports = convergence_study(fn, cfg.variant, cfg.N_list, cfg.l, false, opts);
  std::vector<double> residuals;
  for (const auto& r : reports) {
    add_residual_row(out.table, std::string(to_string(cfg.variant)), r.N, r.residual, r.order_estimate);
    residuals.push_back(r.residual);
  }
  out.verdict.checks.push_back(order_check("identity " + std::string(to_string(cfg.variant)), residuals, cfg.N_list, cfg.tolerances));
  if (cfg.variant == Variant::skew) {
    const double defect = skew_equivalence_defect(fn, make_grid(cfg.l, cfg.N_list.back()), opts);
    out.verdict.checks.push_back(at_most("equivalence with 2I - S form", defect, 1e-12));
  }
  out.verdict.finalize();
  return out;
}

CommandResult cmd_components(const RunConfig& cfg) {
  require_ladder(cfg);
  const auto fn = make_family(cfg.function);
  CommandResult out{SuiteVerdict{"components", {}, VerdictStatus::pass, {}}, residual_table()};
  const auto reports = convergence_study(fn, Variant::selfadjoint, cfg.N_list, cfg.l, true, build_options(cfg));
  for (std::size_t k = 0; k < 4; ++k) {
    const std::string label = "S" + std::to_string(k + 1);
    std::vector<double> residuals;
    for (std::size_t n = 0; n < reports.size(); ++n) {
      const double r = (*reports[n].component_residuals)[k];
      std::optional<double> order;
      if (n > 0 && r > 0) order = observed_order(residuals.back(), r, reports[n - 1].N, reports[n].N);
      add_residual_row(out.table, label, reports[n].N, r, order);
      residuals.push_back(r);
    }
    out.verdict.checks.push_back(order_check("component " + label, residuals, cfg.N_list, cfg.tolerances));
  }
  out.verdict.finalize();
  return out;
}

CommandResult cmd_positivity(const RunConfig& cfg) {
  const auto fn = make_family(cfg.function);
  const auto opts = build_options(cfg);
  const int N = cfg.N_list.back();
  const auto& tol = cfg.tolerances;
  CommandResult out{SuiteVerdict{"positivity", {}, VerdictStatus::pass, {}}, Table{{"parameter", "value", "min_eig", "pass"}, {}}};
  auto row = [&](const std::string& p, double v, double e, bool ok) {
    out.table.rows.push_back({p, format_double(v), format_double(e), ok ? "true" : "false"});
  };

  const auto S = build_S(fn, make_grid(cfg.l, N), cfg.variant, opts);
  const double min_eig = min_eigenvalue(S);
  if (cfg.variant == Variant::skew) {
    auto check = at_least("skew S >= I (min eigenvalue)", min_eig, 1.0 - tol.positivity_slack);
    row("N", N, min_eig, check.pass);
    out.verdict.checks.push_back(check);
    for (const auto& [eps, e] : epsilon_family_check(S, cfg.epsilons)) {
      auto c = at_least("S_eps >= 0 at eps=" + format_double(eps), e, eps - tol.positivity_slack);
      row("eps", eps, e, c.pass);
      out.verdict.checks.push_back(c);
    }
  } else {
    row("N", N, min_eig, min_eig > 0);
    if (cfg.expected_min_eig) {
      out.verdict.checks.push_back(at_most("min eigenvalue vs expected " + format_double(*cfg.expected_min_eig),
                                           std::abs(min_eig - *cfg.expected_min_eig), tol.min_eig_tolerance));
    }
    if (N % cfg.radii != 0 || N < 2 * cfg.radii)
      throw InvalidSpec("largest N must be a multiple of radii with at least two panels per radius");
    const auto family = positivity_family(fn, cfg.l, cfg.radii, N, opts);
    if (!family.origin_condition_holds) {
      out.verdict.status = VerdictStatus::skip;
      out.verdict.reason = "hypothesis unmet: I - Phi(0)Phi(0)^H must be positive definite, its min eig is " +
                           format_double(family.condition_min_eig);
      out.verdict.checks.clear();
      return out;
    }
    for (std::size_t k = 0; k < family.r_values.size(); ++k) {
      auto c = CheckRecord{"S_r > 0 at r=" + format_double(family.r_values[k]), family.min_eigs[k], 0.0, ">",
                           family.min_eigs[k] > 0, {}};
      row("r", family.r_values[k], family.min_eigs[k], c.pass);
      out.verdict.checks.push_back(c);
    }
  }
  out.verdict.finalize();
  return out;
}

CommandResult cmd_factorize(const RunConfig& cfg) {
  const auto fn = make_family(cfg.function);
  const auto opts = build_options(cfg);
  const auto& tol = cfg.tolerances;
  CommandResult out{SuiteVerdict{"factorize", {}, VerdictStatus::pass, {}},
                    Table{{"i", "j", "x_i", "x_j", "block_row", "block_col", "re", "im"}, {}}};
  if (fn.at_origin().norm() > 1e-12) {
    // the factorization theorem needs Phi(0) = 0, so this is a hard precondition error
    out.verdict.status = VerdictStatus::fail;
    out.verdict.reason = "precondition error: Phi(0) = 0 required (|Phi(0)| = " + format_double(fn.at_origin().norm()) + ")";
    out.verdict.checks.push_back(at_most("|Phi(0)|", fn.at_origin().norm(), 1e-12, out.verdict.reason));
    return out;
  }
  try {
    const Grid grid = make_grid(cfg.l, cfg.N_list.back());
    const auto S = build_S(fn, grid, Variant::selfadjoint, opts);
    const auto inv = invert(S);
    out.verdict.checks.push_back(at_most("inverse residual", inv.residual, 1e-10));
    const auto factor = factorize_inverse(S);
    out.verdict.checks.push_back(at_most("E*E = S^-1 (relative)", reconstruction_error(factor, inv.op), tol.reconstruction,
                                         "diagonal constant " + format_double(factor.diagonal_constant())));
    const Index b = factor.block;
    for (Index i = 0; i < grid.size(); ++i)
      for (Index j = 0; j <= i; ++j)
        for (Index p = 0; p < b; ++p)
          for (Index q = 0; q < b; ++q) {
            const cplx v = factor.kernel_samples(i * b + p, j * b + q);
            out.table.rows.push_back({row_col(i), row_col(j), format_double(grid.node(i)), format_double(grid.node(j)),
                                      row_col(p), row_col(q), format_double(v.real()), format_double(v.imag())});
          }

    const double coarse = nesting_defect(fn, cfg.l, cfg.l_hat, cfg.h, opts);
    const double fine = nesting_defect(fn, cfg.l, cfg.l_hat, cfg.h / 2, opts);
    if (coarse <= tol.nesting_exact && fine <= tol.nesting_exact) {
      out.verdict.checks.push_back(at_most("nesting defect (exact)", std::max(coarse, fine), tol.nesting_exact));
    } else {
      const double ratio = coarse / fine;
      out.verdict.checks.push_back(CheckRecord{"nesting defect ratio under h-halving", ratio, tol.nesting_ratio_min, "in",
                                               ratio >= tol.nesting_ratio_min && ratio <= tol.nesting_ratio_max,
                                               "defects " + format_double(coarse) + ", " + format_double(fine) +
                                                   "; upper bound " + format_double(tol.nesting_ratio_max)});
    }
  } catch (const SingularityError& e) {
    out.verdict.status = VerdictStatus::fail;
    out.verdict.reason = e.what();
  } catch (const NotPositiveError& e) {
    out.verdict.status = VerdictStatus::fail;
    out.verdict.reason = e.what();
  }
  out.verdict.finalize();
  return out;
}

CommandResult cmd_crosscheck(const RunConfig& cfg) {
  const auto fn = make_family(cfg.function);
  const auto opts = build_options(cfg);
  const auto& tol = cfg.tolerances;
  CommandResult out{SuiteVerdict{"crosscheck", {}, VerdictStatus::pass, {}}, residual_table()};
  std::vector<double> dev;
  for (int N : cfg.N_list) {
    const Grid grid = make_grid(cfg.l, N);
    const auto S = build_S(fn, grid, Variant::selfadjoint, opts);
    const auto rec = reconstruct_S_via_pnid(fn, grid);
    const double d = op_norm(DiscreteOperator{grid, fn.m2(), rec.matrix - S.base.matrix}) / op_norm(S.base);
    std::optional<double> order;
    if (!dev.empty() && d > 0) order = observed_order(dev.back(), d, cfg.N_list[dev.size() - 1], N);
    add_residual_row(out.table, "crosscheck", N, d, order);
    dev.push_back(d);
  }
  const double worst = *std::max_element(dev.begin(), dev.end());
  if (worst <= tol.crosscheck_exact) {
    out.verdict.checks.push_back(at_most("reconstruction deviation (exact)", worst, tol.crosscheck_exact));
  } else {
    out.verdict.checks.push_back(at_most("relative deviation at largest N", dev.back(), tol.crosscheck_bound));
    bool decreasing = true;
    for (std::size_t k = 1; k < dev.size(); ++k) decreasing = decreasing && dev[k] < dev[k - 1];
    out.verdict.checks.push_back(
        CheckRecord{"deviation strictly decreasing", decreasing ? 1.0 : 0.0, 1.0, "==", decreasing, {}});
  }
  out.verdict.finalize();
  return out;
}

CommandResult cmd_converge(const RunConfig& cfg) {
  require_ladder(cfg);
  const auto fn = make_family(cfg.function);
  CommandResult out{SuiteVerdict{"converge", {}, VerdictStatus::pass, {}}, residual_table()};
  const auto reports = convergence_study(fn, cfg.variant, cfg.N_list, cfg.l, false, build_options(cfg));
  bool nonincreasing = true;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    add_residual_row(out.table, std::string(to_string(cfg.variant)), reports[k].N, reports[k].residual,
                     reports[k].order_estimate);
    if (k > 0 && reports[k].residual > reports[k - 1].residual) nonincreasing = false;
  }
  out.verdict.checks.push_back(
      CheckRecord{"residual non-increasing", nonincreasing ? 1.0 : 0.0, 1.0, "==", nonincreasing, {}});
  out.verdict.finalize();
  return out;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"verify-identity", "components", "positivity",
                                                 "factorize",       "crosscheck", "converge"};
  return names;
}

CommandResult run_command(const std::string& name, const RunConfig& cfg) {
  static const std::map<std::string, std::function<CommandResult(const RunConfig&)>> table = {
      {"verify-identity", cmd_verify_identity}, {"components", cmd_components}, {"positivity", cmd_positivity},
      {"factorize", cmd_factorize},             {"crosscheck", cmd_crosscheck}, {"converge", cmd_converge},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw InvalidSpec("unknown command '" + name + "'");
  return it->second(cfg);
}

json to_json(const CommandResult& result, const std::string& timestamp) {
  const auto& v = result.verdict;
  json checks = json::array();
  for (const auto& c : v.checks) {
    json rec = {{"name", c.name},         {"measured", c.measured}, {"threshold", c.threshold},
                {"relation", c.relation}, {"pass", c.pass}};
    if (!c.note.empty()) rec["note"] = c.note;
    checks.push_back(std::move(rec));
  }
  json doc = {{"command", v.command},
              {"status", std::string(to_string(v.status))},
              {"overall", v.status != VerdictStatus::fail && v.overall()},
              {"checks", std::move(checks)},
              {"timestamp", timestamp}};
  if (!v.reason.empty()) doc["reason"] = v.reason;
  json rows = json::array();
  for (const auto& r : result.table.rows) {
    json obj;
    for (std::size_t k = 0; k < r.size(); ++k) obj[result.table.header[k]] = r[k];
    rows.push_back(std::move(obj));
  }
  doc["table"] = std::move(rows);
  return doc;
}

}  // namespace opid
