#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "rsmoment/moments.hpp"
#include "rsmoment/numfield.hpp"
#include "rsmoment/rankin.hpp"
#include "rsmoment/tracefmla.hpp"

namespace rsm::cli {

namespace {

constexpr const char* kVersion = "0.3.0";

struct KeyInfo {
  const char* key;
  const char* def;
  const char* help;
};

const std::vector<KeyInfo>& key_table() {
  static const std::vector<KeyInfo> t = {
      {"field", "Q", "Q, Q_sqrt5 or Q_sqrt2"},
      {"precision", "256", "working precision in bits for the exact stages"},
      {"tol", "1e-10", "truncation target"},
      {"max_cert", "1e-6", "largest accepted certificate"},
      {"g_scale", "0.125", "c_G in G(u) = exp(c_G u^2) for moment runs"},
      {"contour", "1.5", "contour height Re u for V"},
      {"seed", "1", "random seed (property runs only)"},
      {"out", ".", "output directory"},
      {"g", "", "newform file for g"},
      {"g2", "", "second newform file for the determination experiment"},
      {"k", "", "weight, weight list a,b,c or range lo:hi:step"},
      {"p", "1", "twisting prime (or 1), or a list"},
      {"m", "1", "first Kloosterman argument (a or a,b over a quadratic field)"},
      {"n", "1", "second Kloosterman argument"},
      {"c", "1", "Kloosterman modulus"},
      {"nu", "1", "first index of the trace formula"},
      {"xi", "1", "second index of the trace formula"},
      {"norm_bound", "50", "largest N(c) in the trace formula"},
      {"height", "16", "unit height bound as an exponent of eps0"},
      {"lambda0", "1", "decay exponent of the unit sum"},
      {"c_g", "0.5,1,2", "c_G values for the afe report"},
      {"contours", "1,1.5,2", "contour heights for the afe report"},
      {"afe_tol", "1e-9", "central value tolerance for the afe report"},
      {"index", "0", "eigenform index by increasing a(2)"},
      {"count", "2000", "number of coefficients to export"},
      {"file", "", "output newform file"},
  };
  return t;
}

std::string normalize_key(std::string k) {
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n"), b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::string fmt15(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

FieldElement parse_element(const std::string& s) {
  auto comma = s.find(',');
  try {
    if (comma == std::string::npos) return FieldElement(std::stol(s));
    return FieldElement(std::stol(s.substr(0, comma)), std::stol(s.substr(comma + 1)));
  } catch (const std::logic_error&) {
    throw Error("cannot parse field element '" + s + "' (expected a or a,b)");
  }
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.str("out"));
  std::ofstream f(std::filesystem::path(cfg.str("out")) / name);
  if (!f) throw Error("cannot write " + name);
  return f;
}

NewformRecord load_g(const RunConfig& cfg, const std::string& key = "g") {
  if (cfg.str(key).empty()) throw Error("--" + key + " <newform file> is required");
  return load_newform(cfg.str(key));
}

MomentOptions moment_options(const RunConfig& cfg) {
  MomentOptions o;
  o.g_scale = cfg.real("g_scale");
  o.contour = cfg.real("contour");
  o.tol = cfg.real("tol");
  o.max_cert = cfg.real("max_cert");
  return o;
}

using Manifest = nlohmann::ordered_json;
using Command = std::function<int(const RunConfig&, std::ostream&, Manifest&)>;

int cmd_trace_check(const RunConfig& cfg, std::ostream& out, Manifest& man) {
  auto ks = cfg.has("k") && !cfg.str("k").empty() ? cfg.int_list("k")
                                                   : std::vector<int>{12, 16, 18, 20, 22, 26, 24, 28, 32, 36};
  auto csv = open_out(cfg, "trace_check.csv");
  csv << "k,m,n,LHS,RHS,rel_err\n";
  int status = 0;
  for (int k : ks) {
    auto forms = eigenforms(k, 16);
    OmegaWeights w;
    try {
      w = omega_weights(forms);
    } catch (const Error& e) {
      out << "k=" << k << ": " << e.what() << "\n";
      status = 1;
      continue;
    }
    for (auto [m, n] : omega_holdout_pairs()) {
      double lhs = 0;
      for (size_t f = 0; f < forms.size(); ++f) lhs += w.omega[f] * forms[f].C[size_t(m)] * forms[f].C[size_t(n)];
      double rhs = petersson_rhs_q(m, n, k, petersson_c_cutoff(m, n, k, 1e-16)).value;
      double e = std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs));
      csv << k << "," << m << "," << n << "," << fmt15(lhs) << "," << fmt15(rhs) << "," << fmt15(e) << "\n";
    }
    out << "k=" << k << " dim=" << forms.size() << " condition=" << w.condition_estimate
        << " max held-out error=" << w.max_holdout_error << "\n";
    man["certificates"]["k" + std::to_string(k)] = w.max_holdout_error;
  }
  return status;
}

int cmd_afe(const RunConfig& cfg, std::ostream& out, Manifest& man) {
  auto g = load_g(cfg);
  auto ks = cfg.int_list("k");
  auto cgs = cfg.real_list("c_g");
  auto hs = cfg.real_list("contours");
  const double tol = cfg.real("afe_tol");
  auto csv = open_out(cfg, "afe.csv");
  csv << "k,form,c_G,contour,value,cert\n";
  double worst = 0;
  for (int k : ks) {
    size_t need = 0;
    for (double cg : cgs) {
      VParams p = VParams::degree_one(k, g.weight, double(g.level));
      p.g_scale = cg;
      need = std::max(need, effective_cutoff(p, tol / 2));
    }
    if (g.length() < need) throw Error("insufficient coefficients of g up to " + std::to_string(need));
    auto forms = eigenforms(k, need);
    for (size_t i = 0; i < forms.size(); ++i) {
      double lo = INFINITY, hi = -INFINITY;
      for (double cg : cgs)
        for (double h : hs) {
          CentralValueOptions o;
          o.g_scale = cg;
          o.contour = h;
          o.tol = tol;
          auto v = central_value(forms[i], g, o);
          if (!(v.cert <= cfg.real("max_cert"))) throw UncertifiedError("central value not certified", v.cert);
          csv << k << "," << i << "," << fmt15(cg) << "," << fmt15(h) << "," << fmt15(v.value) << ","
              << fmt15(v.cert) << "\n";
          lo = std::min(lo, v.value);
          hi = std::max(hi, v.value);
        }
      double spread = (hi - lo) / std::max(1.0, std::fabs(hi));
      worst = std::max(worst, spread);
      out << "k=" << k << " form " << i << ": L(1/2) = " << fmt15(hi) << ", relative spread over c_G and contour "
          << spread << "\n";
    }
  }
  man["certificates"]["max_relative_spread"] = worst;
  return worst <= 1e-8 ? 0 : 1;
}

int cmd_kloosterman(const RunConfig& cfg, std::ostream& out, Manifest& man) {
  auto F = FieldDescriptor::make(parse_field_id(cfg.str("field")));
  double v;
  if (F.degree == 1) {
    long c = cfg.integer("c");
    if (c < 1) throw Error("Kloosterman modulus must be positive");
    v = kloosterman_q(cfg.integer("m"), cfg.integer("n"), c);
  } else {
    KloostermanQuery q;
    q.alpha = parse_element(cfg.str("m"));
    q.beta = parse_element(cfg.str("n"));
    q.c = parse_element(cfg.str("c"));
    v = kloosterman_nf(F, q);
  }
  double r = std::round(v);
  if (std::fabs(v - r) < 1e-9 && F.degree == 1)
    out << static_cast<long>(r) << "\n";
  else
    out << fmt15(v) << "\n";
  man["result"] = v;
  return 0;
}

int cmd_rhs(const RunConfig& cfg, std::ostream& out, Manifest& man) {
  auto F = FieldDescriptor::make(parse_field_id(cfg.str("field")));
  TraceRHSParams P;
  P.k = cfg.int_list("k");
  P.c_norm_bound = cfg.real("norm_bound");
  P.unit_height_bound = std::pow(F.epsilon0(), cfg.real("height"));
  P.tol = cfg.real("max_cert");
  auto nu = parse_element(cfg.str("nu")), xi = parse_element(cfg.str("xi"));
  auto r = petersson_rhs_nf(F, nu, xi, P);
  out << "value,c_tail,unit_tail,rounding,ideals,units\n"
      << fmt15(r.value) << "," << fmt15(r.c_tail) << "," << fmt15(r.unit_tail) << "," << fmt15(r.rounding) << ","
      << r.ideal_count << "," << r.unit_count << "\n";
  man["result"] = r.value;
  man["certificates"] = {{"c_tail", r.c_tail}, {"unit_tail", r.unit_tail}, {"rounding", r.rounding}};
  return 0;
}

int cmd_units(const RunConfig& cfg, std::ostream& out, Manifest& man) {
  auto F = FieldDescriptor::make(parse_field_id(cfg.str("field")));
  const double lam = cfg.real("lambda0");
  const long H = cfg.integer("height");
  auto csv = open_out(cfg, "units.csv");
  csv << "height_exponent,terms,partial,tail\n";
  UnitSum last;
  for (long h = 2; h <= H; h += 2) {
    last = unit_sum_tail(F, lam, std::pow(F.epsilon0(), double(h)));
    csv << h << "," << last.terms << "," << fmt15(last.partial) << "," << fmt15(last.tail) << "\n";
    out << "eps0^" << h << ": terms " << last.terms << ", partial " << fmt15(last.partial) << ", tail "
        << last.tail << "\n";
  }
  man["certificates"]["tail"] = last.tail;
  if (!(last.tail <= cfg.real("max_cert")))
    throw UncertifiedError("unit-sum tail above max_cert", last.tail);
  return 0;
}

void write_report(std::ostream& csv, const MomentReport& r) { csv << moment_csv_row(r) << "\n"; }

int cmd_moment(const RunConfig& cfg, std::ostream& out, Manifest& man) {
  auto g = load_g(cfg);
  const int k = int(cfg.integer("k"));
  const long p = cfg.integer("p");
  auto r = moment_report(g, p, k, moment_options(cfg));
  auto csv = open_out(cfg, "moment.csv");
  csv << moment_csv_header() << "\n";
  write_report(csv, r);
  out << moment_csv_header() << "\n" << moment_csv_row(r) << "\n";
  man["certificates"] = {{"M_direct", r.m_direct.cert}, {"E", r.e_value.cert}, {"LHS", r.lhs.cert}};
  return std::fabs(r.residual) <= r.cert_total() ? 0 : 1;
}

int cmd_scan(const RunConfig& cfg, std::ostream& out, Manifest& man) {
  auto g = load_g(cfg);
  const long p = cfg.integer("p");
  auto s = asymptotic_scan(g, p, cfg.int_list("k"), moment_options(cfg));
  auto csv = open_out(cfg, "scan.csv");
  csv << moment_csv_header() << "\n";
  bool ok = true;
  for (const auto& r : s.rows) {
    write_report(csv, r);
    ok = ok && std::fabs(r.residual) <= r.cert_total();
  }
  out << "rows " << s.rows.size() << "\nfitted slope " << fmt15(s.slope) << "\npredicted slope "
      << fmt15(s.predicted_slope) << "\nintercept " << fmt15(s.intercept) << "\nmax residual "
      << fmt15(s.max_residual) << "\n";
  man["fit"] = {{"slope", s.slope}, {"predicted", s.predicted_slope}, {"intercept", s.intercept},
                {"max_residual", s.max_residual}};
  double worst = 0;
  for (const auto& r : s.rows) worst = std::max(worst, r.cert_total());
  man["certificates"]["max_cert_total"] = worst;
  return ok ? 0 : 1;
}

int cmd_recover(const RunConfig& cfg, std::ostream& out, Manifest& man) {
  auto g = load_g(cfg);
  auto ps = cfg.int_list("p");
  auto ks = cfg.int_list("k");
  auto opt = moment_options(cfg);
  auto csv = open_out(cfg, "recover.csv");
  csv << "form,k,p,recovered_C,cert,C_g(p)\n";
  int status = 0;
  auto one = [&](const NewformRecord& h, const char* name, int k, long p) {
    auto c = recover_coefficient(h, p, k, opt);
    csv << name << "," << k << "," << p << "," << fmt15(c.value) << "," << fmt15(c.cert) << ","
        << fmt15(h.C[size_t(p)]) << "\n";
    out << name << " k=" << k << " p=" << p << ": recovered " << fmt15(c.value) << " (cert " << c.cert
        << "), C_g(p) = " << fmt15(h.C[size_t(p)]) << "\n";
    if (std::fabs(c.value - h.C[size_t(p)]) > c.cert + 1e-9) status = 1;
    return c.value;
  };
  for (int k : ks)
    for (long p : ps) one(g, "g", k, p);
  if (!cfg.str("g2").empty()) {
    auto g2 = load_g(cfg, "g2");
    for (int k : ks)
      for (long p : ps) {
        if (k <= std::max(g.weight, g2.weight)) continue;
        double a = one(g, "g", k, p), b = one(g2, "g2", k, p);
        out << "determination k=" << k << " p=" << p << ": |difference| = " << fmt15(std::fabs(a - b)) << "\n";
        man["determination"].push_back({{"k", k}, {"p", p}, {"margin", std::fabs(a - b)}});
      }
  }
  return status;
}

int cmd_export(const RunConfig& cfg, std::ostream& out, Manifest& man) {
  const int k = int(cfg.integer("k"));
  const size_t count = size_t(cfg.integer("count"));
  const long idx = cfg.integer("index");
  if (cfg.str("file").empty()) throw Error("--file <path> is required");
  PrecisionContext ctx;
  ctx.working_bits = int(cfg.integer("precision"));
  auto forms = eigenforms(k, count, ctx);
  if (idx < 0 || size_t(idx) >= forms.size()) throw Error("eigenform index out of range");
  auto rec = newform_from_eigenform(forms[size_t(idx)]);
  write_newform(cfg.str("file"), rec);
  out << "wrote weight " << k << " form " << idx << " with " << count << " coefficients to " << cfg.str("file") << "\n";
  man["result"] = cfg.str("file");
  return 0;
}

const std::vector<std::pair<std::string, std::pair<std::string, Command>>>& commands() {
  static const std::vector<std::pair<std::string, std::pair<std::string, Command>>> c = {
      {"trace-check", {"cross-validate the Petersson formula over Q", cmd_trace_check}},
      {"afe", {"central values and their c_G / contour invariance", cmd_afe}},
      {"kloosterman", {"a single Kloosterman sum", cmd_kloosterman}},
      {"rhs-nf", {"trace-formula right-hand side over a quadratic field", cmd_rhs}},
      {"units", {"unit-sum convergence table", cmd_units}},
      {"moment", {"one MomentReport", cmd_moment}},
      {"scan", {"asymptotic scan over weights (CSV)", cmd_scan}},
      {"recover", {"coefficient recovery and the determination experiment", cmd_recover}},
      {"export-newform", {"write an eigenform as a newform file", cmd_export}},
  };
  return c;
}

void write_manifest(const RunConfig& cfg, const Manifest& man) {
  try {
    std::filesystem::create_directories(cfg.str("out"));
    std::ofstream f(std::filesystem::path(cfg.str("out")) / ("manifest_" + man["command"].get<std::string>() + ".json"));
    f << man.dump(2) << "\n";
  } catch (const std::exception&) {
    // the run's own status already reflects any output failure
  }
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& k : key_table())
    if (*k.def) values_[k.key] = k.def;
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> ks = [] {
    std::vector<std::string> v;
    for (const auto& k : key_table()) v.push_back(k.key);
    return v;
  }();
  return ks;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  std::string k = normalize_key(trim(key));
  if (std::find(keys().begin(), keys().end(), k) == keys().end()) throw Error("unknown config key '" + key + "'");
  values_[k] = trim(value);
}

void RunConfig::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(path + ":" + std::to_string(no) + ": expected key=value");
    set(line.substr(0, eq), line.substr(eq + 1));
  }
}

std::string RunConfig::str(const std::string& key) const {
  auto it = values_.find(key);
  return it == values_.end() ? std::string() : it->second;
}

double RunConfig::real(const std::string& key) const {
  try {
    size_t pos;
    double v = std::stod(str(key), &pos);
    if (pos != str(key).size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::logic_error&) {
    throw Error("config key '" + key + "' needs a number, got '" + str(key) + "'");
  }
}

long RunConfig::integer(const std::string& key) const {
  try {
    size_t pos;
    long v = std::stol(str(key), &pos);
    if (pos != str(key).size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::logic_error&) {
    throw Error("config key '" + key + "' needs an integer, got '" + str(key) + "'");
  }
}

std::vector<int> RunConfig::int_list(const std::string& key) const {
  std::string s = str(key);
  if (s.empty()) throw Error("config key '" + key + "' is required");
  std::vector<int> out;
  try {
    if (s.find(':') != std::string::npos) {
      std::vector<int> parts;
      std::istringstream is(s);
      std::string tok;
      while (std::getline(is, tok, ':')) parts.push_back(std::stoi(trim(tok)));
      if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument(s);
      int lo = parts[0], hi = parts[1], step = parts.size() == 3 ? parts[2] : 1;
      if (step < 1 || hi < lo) throw std::invalid_argument(s);
      for (int v = lo; v <= hi; v += step) out.push_back(v);
      return out;
    }
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stoi(trim(tok)));
  } catch (const std::logic_error&) {
    throw Error("config key '" + key + "' needs integers (a,b,c or lo:hi:step), got '" + s + "'");
  }
  return out;
}

std::vector<double> RunConfig::real_list(const std::string& key) const {
  std::vector<double> out;
  std::istringstream is(str(key));
  std::string tok;
  try {
    while (std::getline(is, tok, ',')) out.push_back(std::stod(trim(tok)));
  } catch (const std::logic_error&) {
    throw Error("config key '" + key + "' needs numbers, got '" + str(key) + "'");
  }
  if (out.empty()) throw Error("config key '" + key + "' is empty");
  return out;
}

void RunConfig::validate() const {
  for (const char* k : {"tol", "max_cert", "afe_tol", "g_scale"})
    if (!(real(k) > 0)) throw Error(std::string(k) + " must be positive");
  if (integer("precision") < 64) throw Error("precision must be at least 64 bits");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Twisted first moments of Rankin-Selberg L-functions: experiment driver", "rsmoment"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands()) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "key=value file; flags override it");
    for (const auto& k : key_table()) {
      std::string flag = k.key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      std::string names = "--" + flag;
      if (k.key == "norm_bound") names += ",--cmax";
      if (k.key == "height") names += ",--B";
      sub->add_option(names, flags[k.key], k.help);
    }
    subs[name] = sub;
  }
  subs["rhs-nf"]->alias("rhs");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  RunConfig cfg;
  Manifest man;
  man["command"] = command;
  man["version"] = kVersion;
  int status = 0;
  try {
    if (!config_path.empty()) cfg.merge_file(config_path);
    for (const auto& k : key_table()) {
      std::string flag = k.key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (subs[command]->count("--" + flag)) cfg.set(k.key, flags[k.key]);
    }
    cfg.validate();
    man["config"] = cfg.values();
    for (const auto& [name, entry] : commands())
      if (name == command) status = entry.second(cfg, out, man);
    man["status"] = status == 0 ? "ok" : "failed";
  } catch (const UncertifiedError& e) {
    err << "uncertified: " << e.what() << " (certificate " << e.achieved() << ")\n";
    man["status"] = "uncertified";
    man["error"] = e.what();
    man["certificates"]["offending"] = e.achieved();
    status = 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    man["status"] = "error";
    man["error"] = e.what();
    status = 1;
  }
  if (!man.contains("config")) man["config"] = cfg.values();
  write_manifest(cfg, man);
  return status;
}

}  // namespace rsm::cli
