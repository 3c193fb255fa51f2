#include "sepint/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <sstream>
#include <toml.hpp>

#include "sepint/catalog.hpp"
#include "sepint/detsolve.hpp"
#include "sepint/dynamics.hpp"
#include "sepint/specfun.hpp"

namespace sepint::cli {

using nlohmann::json;

namespace {

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump_rec(std::ostringstream& os, const json& j, int indent, int depth) {
  const auto nl = [&](int d) {
    if (indent < 0) return;
    os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        first = false;
        nl(depth + 1);
        os << json(it.key()).dump() << (indent < 0 ? ":" : ": ");
        dump_rec(os, it.value(), indent, depth + 1);
      }
      nl(depth);
      os << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << ',';
        first = false;
        nl(depth + 1);
        dump_rec(os, v, indent, depth + 1);
      }
      nl(depth);
      os << ']';
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      os << (std::isfinite(v) ? num17(v) : "null");
      return;
    }
    default:
      os << j.dump();
  }
}

json number(double v) { return json(v); }

json interval_json(const Interval& iv) { return json::array({number(iv.lo), number(iv.hi)}); }

json params_json(const ParamSet& p) {
  json o = json::object();
  for (const auto& [k, v] : p.values()) o[k] = number(v);
  return o;
}

ParamSet to_paramset(const std::map<std::string, double>& m) {
  ParamSet p;
  for (const auto& [k, v] : m) {
    if (!ParamSet::is_recognized(k)) throw SchemaError("unknown parameter name '" + k + "'");
    p.set(k, v);
  }
  return p;
}

/// Maps an exception thrown while running an entry to its exit code.
int code_for(const std::exception_ptr& ep, std::string& message) {
  try {
    std::rethrow_exception(ep);
  } catch (const UnknownEntryError& e) {
    message = e.what();
    return kUnknownEntry;
  } catch (const SchemaError& e) {
    message = e.what();
    return kSchemaViolation;
  } catch (const PreconditionError& e) {
    message = e.what();
    return kSchemaViolation;
  } catch (const CLI::Error& e) {
    message = e.what();
    return kSchemaViolation;
  } catch (const StepFailureError& e) {
    message = e.what();
    return kVerifyFail;
  } catch (const Error& e) {
    // poles, singular points, domain edges, branch failures
    message = e.what();
    return kSingularity;
  } catch (const std::exception& e) {
    message = e.what();
    return kVerifyFail;
  }
}

int worse(int a, int b) { return std::max(a, b); }

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw SchemaError("cannot write '" + path + "'");
  f << text;
}

bool drift_tier_special(const catalog::PotentialEntry& e) { return e.special_function || e.branch_built; }

ParamSet params_for_mode(const catalog::PotentialEntry& e, const RunConfig& c, Mode m) {
  ParamSet p = to_paramset(c.params);
  const bool has_hbar = std::any_of(e.schema.begin(), e.schema.end(), [](const auto& s) { return s.name == "hbar"; });
  if (m == Mode::classical) {
    if (p.get_or("hbar", 0.0) != 0.0) throw SchemaError("classical mode forces hbar = 0");
    if (has_hbar) {
      if (e.requires_hbar_positive) throw SchemaError("entry " + e.id + " has no hbar = 0 form; use quantum mode");
      p.set("hbar", 0.0);
    }
  } else if (m == Mode::quantum) {
    if (!has_hbar) throw SchemaError("entry " + e.id + " is classical; quantum mode needs hbar > 0");
    const double h = p.has("hbar") ? p.get("hbar") : 1.0;
    if (!(h > 0.0)) throw SchemaError("quantum mode needs hbar > 0");
  }
  return p;
}

Mode resolved_mode(const catalog::PotentialEntry& e, Mode m) {
  if (m != Mode::automatic) return m;
  return e.quantum ? Mode::quantum : Mode::classical;
}

json verify_one(const catalog::PotentialEntry& e, const RunConfig& c, Mode m, int& code) {
  const ParamSet overrides = params_for_mode(e, c, m);
  catalog::InstantiateOptions opt;
  catalog::Box box = e.domain;
  if (c.grid_x) box.x = *c.grid_x;
  if (c.grid_y) box.y = *c.grid_y;
  if (c.grid_x || c.grid_y) opt.working_domain = box;
  const catalog::Instance inst = catalog::instantiate(e.id, overrides, opt);

  detsolve::GridSpec g;
  g.x = inst.domain.x;
  g.y = inst.domain.y;
  g.nx = c.nx;
  g.ny = c.ny;
  g.margin = c.margin;
  const double tol = e.special_function ? detsolve::kSpecialFunctionTolerance : detsolve::kClosedFormTolerance;

  std::map<std::string, double> worst{{"eq6", 0.0}, {"eq7", 0.0}, {"eq8", 0.0}, {"eq9", 0.0}, {"eq10", 0.0}};
  bool pass = true;
  for (const auto& I : inst.integrals) {
    const auto r = detsolve::residual_determining(inst.potential, I, g, tol);
    const auto r6 = detsolve::residual_linear_compat(inst.potential, I.coeffs, g, tol);
    pass = pass && r.pass && r6.pass;
    for (const auto& q : r.equations) worst[q.name] = std::max(worst[q.name], q.max_abs);
    worst["eq6"] = std::max(worst["eq6"], r6.at("eq6").max_abs);
  }

  json rep;
  rep["schema"] = 1;
  rep["entry_id"] = e.id;
  rep["mode"] = to_string(m);
  rep["params"] = params_json(inst.params);
  rep["grid"] = {{"x", interval_json(g.x)}, {"y", interval_json(g.y)}, {"nx", g.nx}, {"ny", g.ny},
                 {"margin", number(g.margin)}};
  json res = json::object();
  for (const auto& [k, v] : worst) res[k] = number(v);
  rep["residuals"] = res;
  json tols = {{"residual", number(tol)}};
  if (m == Mode::classical) {
    const std::array<Interval, 4> sbox{g.x, g.y, e.states.px, e.states.py};
    const double pad = std::max(c.margin, 1e-3);
    const auto states = dynamics::random_states(sbox, static_cast<std::size_t>(std::max(c.pb_samples, 0)), c.seed,
                                                inst.potential, inst.integrals, pad);
    double worst_pb = 0.0;
    for (const auto& s : states)
      for (const auto& I : inst.integrals) {
        const double r = poisson_bracket_residual(I, inst.potential, s);
        const double sc = poisson_bracket_scale(I, inst.potential, s);
        worst_pb = std::max(worst_pb, std::abs(r) / (1.0 + sc));
      }
    rep["pointwise_pb"] = {{"samples", states.size()}, {"max_abs", number(worst_pb)}};
    tols["pointwise_pb"] = number(tol);
    pass = pass && worst_pb <= tol;
  }
  rep["status"] = pass ? "pass" : "fail";
  rep["tolerances"] = tols;
  if (!pass) code = worse(code, kVerifyFail);
  return rep;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

std::string schema_text(const std::vector<catalog::ParamSpec>& schema) {
  std::vector<std::string> parts;
  for (const auto& s : schema) {
    std::ostringstream os;
    os << s.name << '=' << s.default_value;
    parts.push_back(os.str());
  }
  return join(parts, " ");
}

int cmd_list(const std::string& filter, std::ostream& out) {
  std::size_t rows = 0;
  std::ostringstream body;
  for (const auto& s : catalog::list_entries()) {
    if (!filter.empty() && !filter_matches(filter, s.id, s.table1_label)) continue;
    ++rows;
    body << s.id << '\t' << (s.table1_label.empty() ? "-" : s.table1_label) << '\t' << schema_text(s.schema) << '\t'
         << join(s.leading_terms, "; ") << '\n';
  }
  out << "id\tlabel\tparams\tintegrals\n" << body.str();
  out << "# " << rows << (rows == 1 ? " entry" : " entries") << '\n';
  return kOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.entries.empty()) throw SchemaError("verify needs at least one entry id");
  std::vector<std::future<VerifyOutcome>> jobs;
  for (const auto& id : c.entries)
    jobs.push_back(std::async(std::launch::async, [&c, id] { return verify_entry(id, c); }));
  json all = json::array();
  int code = kOk;
  for (auto& j : jobs) {
    const VerifyOutcome o = j.get();
    code = worse(code, o.code);
    for (const auto& r : o.reports) {
      if (r.contains("error")) {
        err << r["entry_id"].get<std::string>() << ": " << r["error"].get<std::string>() << '\n';
        continue;
      }
      all.push_back(r);
    }
  }
  if (!all.empty()) {
    const json doc = all.size() == 1 ? all[0] : all;
    write_text(c.report_path, dump17(doc) + "\n", out);
  }
  return code;
}

int cmd_trajectory(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.entries.size() != 1) throw SchemaError("trajectory takes exactly one entry id");
  const auto& e = catalog::find_entry(c.entries.front());
  const Mode m = resolved_mode(e, c.mode);
  if (m != Mode::classical) throw SchemaError("trajectory runs classical mode only; " + e.id + " is quantum");
  const ParamSet overrides = params_for_mode(e, c, m);
  catalog::InstantiateOptions opt;
  catalog::Box box = e.domain;
  if (c.grid_x) box.x = *c.grid_x;
  if (c.grid_y) box.y = *c.grid_y;
  if (c.grid_x || c.grid_y) opt.working_domain = box;
  if (c.seed_scan && !e.seed_scan) throw SchemaError("--seed-scan needs a branch-built entry");
  const catalog::Instance inst = catalog::instantiate(e.id, overrides, opt);

  dynamics::IntegrateOptions io;
  io.margin = c.margin;
  for (const auto& I : inst.integrals) {
    io.avoid_x.insert(io.avoid_x.end(), I.corrections.singular_x.begin(), I.corrections.singular_x.end());
    io.avoid_y.insert(io.avoid_y.end(), I.corrections.singular_y.begin(), I.corrections.singular_y.end());
  }
  PhaseState s0;
  if (c.state) {
    s0 = *c.state;
  } else {
    const std::array<Interval, 4> sbox{e.states.x, e.states.y, e.states.px, e.states.py};
    s0 = dynamics::random_states(sbox, 1, c.seed, inst.potential, inst.integrals).front();
  }
  dynamics::Trajectory tr;
  if (c.integrator == "rkf78")
    tr = dynamics::integrate(inst.potential, s0, c.t_end, c.tol, io);
  else if (c.integrator == "verlet")
    tr = dynamics::integrate_verlet(inst.potential, s0, c.t_end, c.dt, io);
  else
    throw SchemaError("integrator must be rkf78 or verlet");

  const auto drift = dynamics::conservation_report(tr, inst.potential, inst.integrals);
  const double threshold = drift_tier_special(e) ? 1e-6 : 1e-8;

  json sum;
  sum["schema"] = 1;
  sum["entry_id"] = e.id;
  sum["mode"] = "classical";
  sum["params"] = params_json(inst.params);
  sum["state0"] = json::array({number(s0.x), number(s0.y), number(s0.px), number(s0.py)});
  sum["t_end"] = number(c.t_end);
  sum["integrator"] = c.integrator;
  sum["tol"] = number(c.integrator == "rkf78" ? c.tol : c.dt);
  sum["samples"] = tr.t.size();
  sum["rejected_steps"] = tr.rejected_steps;
  sum["completed"] = tr.completed;
  json ev = json::array();
  for (const auto& x : tr.events)
    ev.push_back({{"kind", x.kind == dynamics::Event::Kind::singularity_approach ? "singularity_approach"
                                                                                  : "step_rejection"},
                  {"t", number(x.t)},
                  {"detail", x.detail}});
  sum["events"] = ev;
  json d = json::object();
  for (const auto& q : drift.quantities)
    d[q.name] = {{"initial", number(q.initial)},
                 {"max_deviation", number(q.max_deviation)},
                 {"relative", number(q.relative)},
                 {"term_scale", number(q.term_scale)},
                 {"normalized", number(q.normalized)}};
  sum["drift"] = d;
  sum["threshold"] = number(threshold);
  if (c.seed_scan) {
    const auto b = e.seed_scan(inst.params, inst.domain);
    json roots = json::array();
    for (double r : b.roots) roots.push_back(number(r));
    sum["branch"] = {{"relation", b.relation}, {"x0", number(b.x0)},       {"roots", roots},
                     {"chosen", number(b.chosen)}, {"range", interval_json(b.range)}, {"step", number(b.step)}};
  }
  const bool ok = tr.completed && drift.max_normalized() <= threshold;
  sum["status"] = ok ? "pass" : "fail";

  if (!c.csv_path.empty()) {
    std::ofstream f(c.csv_path);
    if (!f) throw SchemaError("cannot write '" + c.csv_path + "'");
    dynamics::write_csv(f, tr, inst.potential, inst.integrals);
  }
  write_text(c.summary_path, dump17(sum) + "\n", out);
  if (!tr.completed) {
    err << e.id << ": " << (tr.events.empty() ? "halted" : tr.events.back().detail) << '\n';
    return kSingularity;
  }
  return ok ? kOk : kVerifyFail;
}

struct SpecfunArgs {
  std::string kind;
  double alpha = 0.0, K1 = 0.0, K2 = 0.0, g2 = 0.0, g3 = 0.0;
  std::string ic, interval;
  int n = 201;
  double step = 0.0;
  std::string out_path;
};

int cmd_specfun(const SpecfunArgs& a, std::ostream& out, std::ostream& err) {
  const specfun::Kind kind = specfun::kind_from_string(a.kind);
  const auto iv = parse_list(a.interval);
  if (iv.size() != 2 || !(iv[0] < iv[1])) throw SchemaError("--interval needs lo,hi with lo < hi");
  const Interval want{iv[0], iv[1]};
  specfun::PainleveIC ic;
  if (kind != specfun::Kind::weierstrass) {
    const auto v = parse_list(a.ic);
    if (v.size() != 3) throw SchemaError("--ic needs x0,y0,yp0");
    ic = {v[0], v[1], v[2]};
  }
  std::shared_ptr<const specfun::SpecFunSolution> sol;
  int code = kOk;
  std::string note;
  try {
    switch (kind) {
      case specfun::Kind::weierstrass:
        sol = std::make_shared<specfun::SpecFunSolution>(specfun::weierstrass_p(want, a.g2, a.g3));
        break;
      case specfun::Kind::p1:
        sol = std::make_shared<specfun::SpecFunSolution>(specfun::painleve1(want, ic));
        break;
      case specfun::Kind::p2:
        sol = std::make_shared<specfun::SpecFunSolution>(specfun::painleve2(want, a.alpha, ic));
        break;
      case specfun::Kind::p4:
        sol = std::make_shared<specfun::SpecFunSolution>(specfun::painleve4(want, a.alpha, a.K1, a.K2, ic));
        break;
    }
  } catch (const specfun::PoleCollisionError& e) {
    sol = std::make_shared<specfun::SpecFunSolution>(e.partial());
    note = e.what();
  }
  if (!sol->covers(want.lo) || !sol->covers(want.hi)) {
    code = kSingularity;
    if (note.empty()) note = "pole inside the requested interval";
  }
  int n = a.n;
  if (a.step > 0.0) n = static_cast<int>(std::floor((want.hi - want.lo) / a.step + 1e-9)) + 1;
  if (n < 2) throw SchemaError("need at least two samples");
  std::ostringstream os;
  os << "x,value,d1\n";
  for (int i = 0; i < n; ++i) {
    const double x = a.step > 0.0 ? want.lo + i * a.step : want.lo + (want.hi - want.lo) * i / (n - 1);
    if (!sol->covers(x)) continue;
    const auto [v, d] = sol->eval(x);
    os << num17(x) << ',' << num17(v) << ',' << num17(d) << '\n';
  }
  os << "# validity " << num17(sol->validity().lo) << ',' << num17(sol->validity().hi) << '\n';
  os << "# poles:";
  if (sol->poles().empty()) os << " none";
  for (double p : sol->poles()) os << ' ' << num17(p);
  os << '\n';
  write_text(a.out_path, os.str(), out);
  if (code != kOk) err << note << '\n';
  return code;
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SchemaError("cannot read '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void require_report(const json& r, const std::string& path) {
  for (const char* k : {"schema", "entry_id", "mode", "params", "grid", "residuals", "status", "tolerances"})
    if (!r.is_object() || !r.contains(k)) throw SchemaError("'" + path + "' has a report without '" + k + "'");
  if (r["schema"] != 1) throw SchemaError("'" + path + "' has an unsupported schema version");
}

int cmd_merge(const std::vector<std::string>& inputs, const std::string& out_path, std::ostream& out) {
  if (inputs.empty()) throw SchemaError("report-merge needs input files");
  json all = json::array();
  for (const auto& p : inputs) {
    const json doc = read_json_file(p);
    const json items = doc.is_array() ? doc : json::array({doc});
    for (const auto& r : items) {
      require_report(r, p);
      all.push_back(r);
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const json& a, const json& b) {
    return std::tie(a["entry_id"].get_ref<const std::string&>(), a["mode"].get_ref<const std::string&>()) <
           std::tie(b["entry_id"].get_ref<const std::string&>(), b["mode"].get_ref<const std::string&>());
  });
  bool pass = true;
  for (const auto& r : all) pass = pass && r["status"] == "pass";
  write_text(out_path, dump17(all) + "\n", out);
  return pass ? kOk : kVerifyFail;
}

}  // namespace

Mode mode_from_string(const std::string& s) {
  if (s == "auto") return Mode::automatic;
  if (s == "classical") return Mode::classical;
  if (s == "quantum") return Mode::quantum;
  if (s == "both") return Mode::both;
  throw SchemaError("mode must be classical, quantum, both or auto");
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::automatic:
      return "auto";
    case Mode::classical:
      return "classical";
    case Mode::quantum:
      return "quantum";
    case Mode::both:
      return "both";
  }
  return "auto";
}

double parse_number(const std::string& text) {
  const auto conv = [&](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw SchemaError("'" + text + "' is not a number");
    }
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw SchemaError("'" + text + "' is not a number");
    return v;
  };
  const auto slash = text.find('/');
  double v = slash == std::string::npos ? conv(text) : conv(text.substr(0, slash)) / conv(text.substr(slash + 1));
  if (!std::isfinite(v)) throw SchemaError("'" + text + "' is not a finite number");
  return v;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  return out;
}

std::string dump17(const json& j, int indent) {
  std::ostringstream os;
  dump_rec(os, j, indent, 0);
  return os.str();
}

bool filter_matches(const std::string& filter, const std::string& id, const std::string& label) {
  if (!filter.empty() && filter.back() == '*') {
    const std::string pre = filter.substr(0, filter.size() - 1);
    return id.rfind(pre, 0) == 0 || (!label.empty() && label.rfind(pre, 0) == 0);
  }
  return filter == id || (!label.empty() && filter == label);
}

VerifyOutcome verify_entry(const std::string& id, const RunConfig& c) {
  VerifyOutcome o;
  try {
    const auto& e = catalog::find_entry(id);
    const Mode m = resolved_mode(e, c.mode);
    const std::vector<Mode> modes =
        m == Mode::both ? std::vector<Mode>{Mode::quantum, Mode::classical} : std::vector<Mode>{m};
    for (Mode mm : modes) o.reports.push_back(verify_one(e, c, mm, o.code));
  } catch (...) {
    std::string msg;
    o.code = worse(o.code, code_for(std::current_exception(), msg));
    o.reports.push_back({{"entry_id", id}, {"error", msg}});
  }
  return o;
}

RunConfig load_config(const std::string& path) {
  toml::table t;
  try {
    t = toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    throw SchemaError("config '" + path + "': " + std::string(e.description()));
  }
  RunConfig c;
  const auto real = [&](const toml::node* n, const char* what) {
    if (n)
      if (auto v = n->value<double>()) return *v;
    throw SchemaError(std::string("config field ") + what + " must be a number");
  };
  const auto interval = [&](const toml::node_view<toml::node>& n, const char* what) {
    const auto* arr = n.as_array();
    if (!arr || arr->size() != 2) throw SchemaError(std::string("config field ") + what + " must be [lo, hi]");
    return Interval{real(arr->get(0), what), real(arr->get(1), what)};
  };
  const auto integer = [&](const toml::node_view<toml::node>& n, const char* what) -> std::optional<int64_t> {
    if (!n) return std::nullopt;
    if (auto v = n.value_exact<int64_t>()) return *v;
    throw SchemaError(std::string("config field ") + what + " must be an integer");
  };
  const auto text = [&](const toml::node_view<toml::node>& n, const char* what) -> std::optional<std::string> {
    if (!n) return std::nullopt;
    if (auto v = n.value_exact<std::string>()) return *v;
    throw SchemaError(std::string("config field ") + what + " must be a string");
  };
  if (auto* e = t["entry"].as_table()) {
    if (auto id = text((*e)["id"], "entry.id")) c.entries.push_back(*id);
    if (auto* ids = (*e)["ids"].as_array())
      for (auto& n : *ids) {
        if (auto s = n.value<std::string>()) c.entries.push_back(*s);
        else throw SchemaError("config field entry.ids must hold strings");
      }
    if (auto m = text((*e)["mode"], "entry.mode")) c.mode = mode_from_string(*m);
    if (auto s = integer((*e)["seed"], "entry.seed")) c.seed = static_cast<std::uint64_t>(*s);
    if (auto* p = (*e)["params"].as_table())
      for (auto& [k, v] : *p) c.params[std::string(k.str())] = real(&v, "entry.params");
  }
  if (auto* g = t["grid"].as_table()) {
    if ((*g)["x"]) c.grid_x = interval((*g)["x"], "grid.x");
    if ((*g)["y"]) c.grid_y = interval((*g)["y"], "grid.y");
    if (auto v = integer((*g)["nx"], "grid.nx")) c.nx = static_cast<int>(*v);
    if (auto v = integer((*g)["ny"], "grid.ny")) c.ny = static_cast<int>(*v);
    if ((*g)["margin"]) c.margin = real((*g)["margin"].node(), "grid.margin");
    if (auto v = integer((*g)["pb_samples"], "grid.pb_samples")) c.pb_samples = static_cast<int>(*v);
  }
  if (auto* tr = t["trajectory"].as_table()) {
    if (auto* s = (*tr)["state"].as_array()) {
      if (s->size() != 4) throw SchemaError("trajectory.state must be [x, y, px, py]");
      const toml::array& a = *s;
      c.state = PhaseState{real(a.get(0), "trajectory.state"),
                           real(a.get(1), "trajectory.state"),
                           real(a.get(2), "trajectory.state"),
                           real(a.get(3), "trajectory.state")};
    }
    if ((*tr)["t_end"]) c.t_end = real((*tr)["t_end"].node(), "trajectory.t_end");
    if ((*tr)["tol"]) c.tol = real((*tr)["tol"].node(), "trajectory.tol");
    if ((*tr)["dt"]) c.dt = real((*tr)["dt"].node(), "trajectory.dt");
    if (auto s = text((*tr)["integrator"], "trajectory.integrator")) c.integrator = *s;
    if (auto b = (*tr)["seed_scan"].value<bool>()) c.seed_scan = *b;
  }
  if (auto* o = t["output"].as_table()) {
    if (auto s = text((*o)["report"], "output.report")) c.report_path = *s;
    if (auto s = text((*o)["csv"], "output.csv")) c.csv_path = *s;
    if (auto s = text((*o)["summary"], "output.summary")) c.summary_path = *s;
  }
  if (c.nx < 1 || c.ny < 1) throw SchemaError("grid.nx and grid.ny must be >= 1");
  return c;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Separable potentials with third-order integrals: catalog, verification and dynamics"};
  app.require_subcommand(1);

  std::string filter;
  auto* list = app.add_subcommand("list", "List catalog entries");
  list->add_option("--filter", filter, "Exact id, exact Table 1 label, or prefix ending in *");

  RunConfig cfg;
  std::string config_path, mode_text, grid_x, grid_y, state_text;
  std::vector<std::string> param_items, ids;
  std::optional<int> nx, ny, samples;
  std::optional<double> margin, t_end, tol, dt;
  std::optional<std::uint64_t> seed;
  std::string report_path, csv_path, summary_path, integrator;
  bool seed_scan = false;

  const auto common = [&](CLI::App* s) {
    s->add_option("ids", ids, "Entry ids");
    s->add_option("--config", config_path, "TOML config file");
    s->add_option("--param", param_items, "Parameter override name=value")->take_all();
    s->add_option("--mode", mode_text, "classical | quantum | both | auto");
    s->add_option("--grid-x", grid_x, "Working x-range lo,hi");
    s->add_option("--grid-y", grid_y, "Working y-range lo,hi");
    s->add_option("--margin", margin, "Singularity margin");
    s->add_option("--seed", seed, "Random seed");
  };
  auto* verify = app.add_subcommand("verify", "Residuals of the determining equations, JSON report");
  common(verify);
  verify->add_option("--nx", nx, "Grid nodes in x");
  verify->add_option("--ny", ny, "Grid nodes in y");
  verify->add_option("--samples", samples, "Poisson-bracket sample points (classical)");
  verify->add_option("--report", report_path, "Report path (default stdout)");

  auto* traj = app.add_subcommand("trajectory", "Classical trajectory with conservation monitoring");
  common(traj);
  traj->add_option("--state", state_text, "x,y,px,py");
  traj->add_option("--t", t_end, "Final time");
  traj->add_option("--tol", tol, "Local error tolerance");
  traj->add_option("--integrator", integrator, "rkf78 | verlet");
  traj->add_option("--dt", dt, "Verlet step");
  traj->add_option("--csv", csv_path, "Trajectory CSV path");
  traj->add_option("--summary", summary_path, "Drift summary JSON path (default stdout)");
  traj->add_flag("--seed-scan", seed_scan, "Report the root scan behind a branch-built potential");

  SpecfunArgs sf;
  std::string alpha_t, K1_t, K2_t, g2_t, g3_t;
  auto* spec = app.add_subcommand("specfun", "Samples of a Weierstrass or Painleve function");
  spec->add_option("kind", sf.kind, "wp | p1 | p2 | p4")->required();
  spec->add_option("--alpha", alpha_t);
  spec->add_option("--K1", K1_t);
  spec->add_option("--K2", K2_t);
  spec->add_option("--g2", g2_t);
  spec->add_option("--g3", g3_t);
  spec->add_option("--ic", sf.ic, "x0,y0,yp0");
  spec->add_option("--interval", sf.interval, "lo,hi")->required();
  spec->add_option("--n", sf.n, "Number of samples");
  spec->add_option("--step", sf.step, "Sample spacing (overrides --n)");
  spec->add_option("--out", sf.out_path, "CSV path (default stdout)");

  std::vector<std::string> merge_inputs;
  std::string merge_out;
  auto* merge = app.add_subcommand("report-merge", "Merge JSON reports into one array");
  merge->add_option("inputs", merge_inputs, "Report files")->required();
  merge->add_option("-o,--out", merge_out, "Output path (default stdout)");

  std::string ref_out;
  auto* ref = app.add_subcommand("reference", "Write the catalog reference document (markdown)");
  ref->add_option("-o,--out", ref_out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kSchemaViolation;
  }

  try {
    if (list->parsed()) return cmd_list(filter, out);
    if (ref->parsed()) {
      std::ostringstream os;
      catalog::write_reference(os);
      write_text(ref_out, os.str(), out);
      return kOk;
    }
    if (merge->parsed()) return cmd_merge(merge_inputs, merge_out, out);
    if (spec->parsed()) {
      if (!alpha_t.empty()) sf.alpha = parse_number(alpha_t);
      if (!K1_t.empty()) sf.K1 = parse_number(K1_t);
      if (!K2_t.empty()) sf.K2 = parse_number(K2_t);
      if (!g2_t.empty()) sf.g2 = parse_number(g2_t);
      if (!g3_t.empty()) sf.g3 = parse_number(g3_t);
      return cmd_specfun(sf, out, err);
    }
    // verify and trajectory: config file first, then flags
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!ids.empty()) cfg.entries = ids;
    for (const auto& item : param_items) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw SchemaError("--param expects name=value, got '" + item + "'");
      cfg.params[item.substr(0, eq)] = parse_number(item.substr(eq + 1));
    }
    if (!mode_text.empty()) cfg.mode = mode_from_string(mode_text);
    const auto range = [](const std::string& s, const char* what) {
      const auto v = parse_list(s);
      if (v.size() != 2 || !(v[0] < v[1])) throw SchemaError(std::string(what) + " needs lo,hi with lo < hi");
      return Interval{v[0], v[1]};
    };
    if (!grid_x.empty()) cfg.grid_x = range(grid_x, "--grid-x");
    if (!grid_y.empty()) cfg.grid_y = range(grid_y, "--grid-y");
    if (margin) cfg.margin = *margin;
    if (seed) cfg.seed = *seed;
    if (nx) cfg.nx = *nx;
    if (ny) cfg.ny = *ny;
    if (samples) cfg.pb_samples = *samples;
    if (!report_path.empty()) cfg.report_path = report_path;
    if (cfg.nx < 1 || cfg.ny < 1) throw SchemaError("grid needs at least one node per axis");
    if (verify->parsed()) return cmd_verify(cfg, out, err);

    if (!state_text.empty()) {
      const auto v = parse_list(state_text);
      if (v.size() != 4) throw SchemaError("--state needs x,y,px,py");
      cfg.state = PhaseState{v[0], v[1], v[2], v[3]};
    }
    if (t_end) cfg.t_end = *t_end;
    if (tol) cfg.tol = *tol;
    if (dt) cfg.dt = *dt;
    if (!integrator.empty()) cfg.integrator = integrator;
    if (!csv_path.empty()) cfg.csv_path = csv_path;
    if (!summary_path.empty()) cfg.summary_path = summary_path;
    if (seed_scan) cfg.seed_scan = true;
    return cmd_trajectory(cfg, out, err);
  } catch (...) {
    std::string msg;
    const int code = code_for(std::current_exception(), msg);
    err << msg << '\n';
    return code;
  }
}

}  // namespace sepint::cli
