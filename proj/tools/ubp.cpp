#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ubp/errors.hpp"
#include "ubp/montecarlo.hpp"
#include "ubp/rulefile.hpp"
#include "ubp/verify.hpp"

#ifndef UBP_CORPUS_DIR
#define UBP_CORPUS_DIR "corpus"
#endif

using namespace ubp;
using ojson = nlohmann::ordered_json;

namespace {

struct Options {
  std::string rules;
  std::vector<i64> n{64};
  std::vector<double> p{0.05};
  int trials = 100;
  std::uint64_t seed = 1;
  i64 t_max = 4096;
  int window = 8;
  std::string out;
  std::string format = "csv";
  std::string suite;
  std::string direction;
  std::string sites;
  std::string box;
  std::size_t max_sites = std::size_t(1) << 24;
  double tol = 0.002;
};

std::vector<Site> parse_sites(const std::string& text) {
  std::vector<Site> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(' ') == std::string::npos) continue;
    Site p;
    char comma = 0;
    std::stringstream is(item);
    if (!(is >> p.x >> comma >> p.y) || comma != ',')
      throw Error(Errc::ParseError, "bad site '" + item + "', expected x,y");
    out.push_back(p);
  }
  return out;
}

std::vector<i64> parse_ints(const std::string& text, std::size_t count, const std::string& what) {
  std::vector<i64> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
  if (out.size() != count) throw Error(Errc::ParseError, what + " needs " + std::to_string(count) + " integers");
  return out;
}

ojson sites_json(const std::vector<Site>& s) {
  ojson a = ojson::array();
  for (Site p : s) a.push_back({p.x, p.y});
  return a;
}

ojson direction_json(Direction u) { return ojson::array({u.a(), u.b()}); }

ojson arcs_json(const StableSet& S) {
  ojson a = ojson::array();
  for (const Arc& arc : S.arcs) a.push_back(to_string(arc));
  return a;
}

ojson difficulty_json(const DifficultyResult& r) {
  ojson j;
  j["status"] = r.finite() ? "finite" : r.status == DiffStatus::Infinite ? "infinite" : "unresolved";
  if (r.finite()) j["value"] = r.value;
  j["window"] = r.window;
  if (!r.witness.empty()) j["witness"] = sites_json(r.witness);
  return j;
}

// Writes to --out when given, otherwise stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(Errc::ParseError, "cannot write " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void print_config(const std::string& command, const Options& o, const ojson& extra) {
  ojson c;
  c["command"] = command;
  if (!o.rules.empty()) c["rules"] = o.rules;
  c["seed"] = o.seed;
  c["trials"] = o.trials;
  c["window"] = o.window;
  c["t_max"] = o.t_max;
  c["format"] = o.format;
  c["threads"] = worker_count();
  for (auto it = extra.begin(); it != extra.end(); ++it) c[it.key()] = it.value();
  std::cerr << "# config " << c.dump() << "\n";
}

UpdateFamily load_family(const Options& o) {
  if (o.rules.empty()) throw Error(Errc::ParseError, "--rules is required");
  return load_rule_file(o.rules).family();
}

int cmd_classify(const Options& o) {
  UpdateFamily U = load_family(o);
  DifficultyOptions dopt;
  dopt.window = o.window;
  dopt.throw_on_cap = false;
  print_config("classify", o, {{"difficulty_max_size", dopt.max_size}, {"candidate_cap", dopt.candidate_cap}});
  Classification c = classify(U, dopt);
  Sink out(o.out);
  if (o.format == "json") {
    ojson j;
    j["family"] = U.name();
    j["kind"] = to_string(c.kind);
    if (c.kind == Kind::Critical) {
      j["balanced"] = c.balanced;
      j["alpha"] = c.alpha;
      j["alpha_resolved"] = c.alpha_resolved;
      j["drift"] = c.drift;
      if (c.u_star) j["u_star"] = direction_json(*c.u_star);
      ojson T = ojson::array();
      for (Direction u : c.droplet_directions) T.push_back(direction_json(u));
      j["droplet_directions"] = T;
    }
    j["stable_set"] = arcs_json(c.stable);
    out.os() << j.dump(2) << "\n";
    return 0;
  }
  auto& os = out.os();
  os << "family: " << U.name() << "\n";
  os << "class: " << to_string(c.kind) << "\n";
  if (c.kind == Kind::Critical) {
    os << "balanced: " << (c.balanced ? "yes" : "no") << "\n";
    os << "alpha: " << c.alpha << (c.alpha_resolved ? "" : " (unresolved within window)") << "\n";
    os << "drift: " << (c.drift ? "yes" : "no") << "\n";
    if (c.u_star) os << "u*: " << to_string(*c.u_star) << "\n";
  }
  os << "stable set:";
  for (const Arc& a : c.stable.arcs) os << " " << to_string(a);
  os << "\n";
  return 0;
}

int cmd_stable_set(const Options& o) {
  UpdateFamily U = load_family(o);
  print_config("stable-set", o, ojson::object());
  StableSet S = stable_set(U);
  std::vector<Direction> Q = quasi_stable_set(U);
  Sink out(o.out);
  if (o.format == "json") {
    ojson j;
    j["family"] = U.name();
    j["arcs"] = arcs_json(S);
    ojson iso = ojson::array(), q = ojson::array();
    for (Direction u : S.isolated()) iso.push_back(direction_json(u));
    for (Direction u : Q) q.push_back(direction_json(u));
    j["isolated"] = iso;
    j["quasi_stable"] = q;
    out.os() << j.dump(2) << "\n";
    return 0;
  }
  auto& os = out.os();
  for (const Arc& a : S.arcs) os << to_string(a) << "\n";
  os << "quasi-stable:";
  for (Direction u : Q) os << " " << to_string(u);
  os << "\n";
  return 0;
}

int cmd_difficulty(const Options& o) {
  UpdateFamily U = load_family(o);
  if (o.direction.empty()) throw Error(Errc::ParseError, "--direction a,b is required");
  auto ab = parse_ints(o.direction, 2, "--direction");
  Direction u(ab[0], ab[1]);
  DifficultyOptions dopt;
  dopt.window = o.window;
  dopt.throw_on_cap = false;
  print_config("difficulty", o, {{"direction", direction_json(u)}, {"difficulty_max_size", dopt.max_size}});
  Difficulty d = difficulty(u, U, dopt);
  Sink out(o.out);
  if (o.format == "json") {
    ojson j;
    j["direction"] = direction_json(u);
    j["stable"] = is_stable(u, U);
    j["plus"] = difficulty_json(d.plus);
    j["minus"] = difficulty_json(d.minus);
    j["alpha"] = difficulty_json(d.alpha);
    out.os() << j.dump(2) << "\n";
    return 0;
  }
  auto& os = out.os();
  os << "u: " << to_string(u) << (is_stable(u, U) ? " (stable)" : " (unstable)") << "\n";
  os << "alpha+: " << to_string(d.plus) << "\n";
  os << "alpha-: " << to_string(d.minus) << "\n";
  os << "alpha: " << to_string(d.alpha) << "\n";
  return 0;
}

Window window_of(const Options& o, const std::vector<Site>& A, i64 margin) {
  if (!o.box.empty()) {
    auto b = parse_ints(o.box, 4, "--box");
    return Window::make_box(b[0], b[1], b[2], b[3]);
  }
  if (A.empty()) return Window::torus(o.n.front());
  BoundingBox bb{A[0].x, A[0].y, A[0].x, A[0].y};
  for (Site p : A) bb = {std::min(bb.x0, p.x), std::min(bb.y0, p.y), std::max(bb.x1, p.x), std::max(bb.y1, p.y)};
  return Window::make_box(bb.x0 - margin, bb.y0 - margin, bb.x1 + margin, bb.y1 + margin);
}

std::string window_string(const Window& w) {
  if (w.shape == Window::Shape::Torus) return "torus " + std::to_string(w.width());
  std::ostringstream os;
  os << "box [" << w.box.x0 << "," << w.box.x1 << "]x[" << w.box.y0 << "," << w.box.y1 << "]";
  return os.str();
}

int cmd_closure(const Options& o) {
  UpdateFamily U = load_family(o);
  std::vector<Site> A = parse_sites(o.sites);
  Window w = window_of(o, A, 2 * o.window);
  print_config("closure", o, {{"closure_window", window_string(w)}, {"initial_sites", A.size()}});
  std::vector<Site> cl = closure(A, w, U);
  Sink out(o.out);
  if (o.format == "json") {
    out.os() << ojson{{"window", window_string(w)}, {"size", cl.size()}, {"sites", sites_json(cl)}}.dump() << "\n";
    return 0;
  }
  out.os() << "x,y\n";
  for (Site p : cl) out.os() << p.x << "," << p.y << "\n";
  return 0;
}

int cmd_pc(const Options& o, bool fixed_p) {
  UpdateFamily U = load_family(o);
  Sink out(o.out);
  auto& os = out.os();
  ojson rows = ojson::array();
  if (o.format == "csv") write_csv_header(os);
  if (fixed_p) {
    print_config("pc", o, {{"mode", "probability"}, {"n", o.n}, {"p", o.p}});
    for (i64 n : o.n)
      for (double p : o.p) {
        TrialConfig cfg;
        cfg.family = U;
        cfg.n = n;
        cfg.p = p;
        cfg.seed = o.seed;
        cfg.trials = o.trials;
        Proportion pr = percolation_probability(cfg);
        CsvRow r{U.name(), n, p, std::size_t(o.trials), pr.fraction, pr.ci_low, pr.ci_high, o.seed};
        if (o.format == "csv")
          write_csv_row(os, r);
        else
          rows.push_back({{"n", n}, {"p", p}, {"trials", o.trials}, {"probability", pr.fraction},
                          {"ci_low", pr.ci_low}, {"ci_high", pr.ci_high}});
      }
  } else {
    PcOptions popt;
    popt.batch = o.trials;
    popt.seed = o.seed;
    popt.tol = o.tol;
    print_config("pc", o,
                 {{"mode", "bisection"}, {"n", o.n}, {"batch", popt.batch}, {"max_batches", popt.max_batches},
                  {"tol", popt.tol}, {"budget", popt.budget}});
    for (i64 n : o.n) {
      PcEstimate e = estimate_pc(U, n, popt);
      CsvRow r{U.name(), n, e.p_hat, e.trials_used, e.p_hat, e.ci_low, e.ci_high, o.seed};
      if (o.format == "csv")
        write_csv_row(os, r);
      else
        rows.push_back({{"n", n}, {"p_hat", e.p_hat}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high},
                        {"trials_used", e.trials_used}});
    }
  }
  if (o.format == "json") os << ojson{{"family", U.name()}, {"seed", o.seed}, {"rows", rows}}.dump(2) << "\n";
  return 0;
}

int cmd_tau(const Options& o) {
  UpdateFamily U = load_family(o);
  TauOptions topt;
  topt.seed = o.seed;
  topt.t_max = o.t_max;
  topt.max_sites = o.max_sites;
  print_config("tau", o, {{"p", o.p}, {"max_sites", topt.max_sites}});
  Sink out(o.out);
  auto& os = out.os();
  ojson rows = ojson::array();
  if (o.format == "csv") write_csv_header(os);
  for (double p : o.p) {
    TauStats s = sample_tau(U, p, o.trials, topt);
    auto lg = [](double v) { return v <= 1 ? 0.0 : std::log(v); };
    CsvRow r{U.name(), 0, p, std::size_t(o.trials), s.median_log, lg(s.q1), lg(s.q3), o.seed};
    if (o.format == "csv") {
      write_csv_row(os, r);
    } else {
      ojson row{{"p", p}, {"trials", o.trials}, {"timeouts", s.timeouts}, {"median_log_tau", s.median_log}};
      row["median_tau"] = std::isfinite(s.median) ? ojson(s.median) : ojson(nullptr);
      rows.push_back(row);
    }
  }
  if (o.format == "json") os << ojson{{"family", U.name()}, {"seed", o.seed}, {"rows", rows}}.dump(2) << "\n";
  return 0;
}

std::vector<UpdateFamily> verify_targets(const Options& o) {
  if (!o.rules.empty()) return {load_family(o)};
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(UBP_CORPUS_DIR))
    for (const auto& e : std::filesystem::directory_iterator(UBP_CORPUS_DIR))
      if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<UpdateFamily> out;
  for (const auto& f : files) out.push_back(load_rule_file(f.string()).family());
  if (out.empty())
    out = {families::two_neighbour(), families::duarte(), families::van_enter_hulshof(), families::all_singletons(),
           families::three_of_four()};
  return out;
}

int cmd_verify(const Options& o) {
  const auto& all = verify_suites();
  if (std::find(all.begin(), all.end(), o.suite) == all.end())
    throw Error(Errc::ParseError, "--suite must be one of stable, quasi, voracity, cover, span, iceberg, scaling");
  VerifyOptions vopt;
  vopt.window = o.window;
  print_config("verify", o, {{"suite", o.suite}, {"lambda", vopt.lambda}});
  Sink out(o.out);
  auto& os = out.os();
  bool ok = true;
  ojson reports = ojson::array();
  for (const UpdateFamily& U : verify_targets(o)) {
    try {
      VerifyReport r = run_verify_suite(o.suite, U, std::size_t(std::max(o.trials, 0)), o.seed, vopt);
      ok = ok && r.ok();
      if (o.format == "json")
        reports.push_back(ojson::parse(r.json()));
      else
        os << r.text();
    } catch (const Error& e) {
      // Suites that do not apply to a family are skipped when running the whole corpus.
      bool skip = o.rules.empty() && (e.code() == Errc::NotCritical || e.code() == Errc::NotDriftFamily);
      if (!skip) throw;
      if (o.format == "json")
        reports.push_back({{"suite", o.suite}, {"family", U.name()}, {"skipped", e.what()}});
      else
        os << "SKIP suite " << o.suite << " family " << U.name() << ": " << e.what() << "\n";
    }
  }
  if (o.format == "json") os << reports.dump(2) << "\n";
  return ok ? 0 : 1;
}

int cmd_demo_growth(const Options& o) {
  UpdateFamily U = load_family(o);
  std::vector<Site> A;
  Window w;
  if (!o.sites.empty()) {
    A = parse_sites(o.sites);
    w = window_of(o, A, 2 * o.window);
  } else {
    i64 n = o.n.front();
    w = Window::make_box(0, 0, n - 1, n - 1);
    SiteRng rng(o.seed, 0);
    for (i64 y = 0; y < n; ++y)
      for (i64 x = 0; x < n; ++x)
        if (rng.uniform(SiteRng::site_key({x, y})) < o.p.front()) A.push_back({x, y});
  }
  print_config("demo-growth", o, {{"growth_window", window_string(w)}, {"initial_sites", A.size()}});
  LatticeState st(U, w);
  for (Site p : A) st.infect(p);
  auto gens = st.run_generations(o.t_max);
  Sink out(o.out);
  auto& os = out.os();
  if (o.format == "json") {
    ojson frames = ojson::array();
    frames.push_back({{"step", 0}, {"sites", sites_json(A)}});
    for (std::size_t t = 0; t < gens.size(); ++t) frames.push_back({{"step", t + 1}, {"sites", sites_json(gens[t])}});
    os << frames.dump() << "\n";
    return 0;
  }
  os << "step,x,y\n";
  std::sort(A.begin(), A.end());
  for (Site p : A) os << 0 << "," << p.x << "," << p.y << "\n";
  for (std::size_t t = 0; t < gens.size(); ++t)
    for (Site p : gens[t]) os << t + 1 << "," << p.x << "," << p.y << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bootstrap percolation toolkit for two-dimensional update families"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--rules", o.rules, "Rule file (JSON)");
    c->add_option("--seed", o.seed, "Random seed");
    c->add_option("--window", o.window, "Search window for difficulty and verification");
    c->add_option("--out", o.out, "Output file (default stdout)");
    c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* classify_cmd = app.add_subcommand("classify", "Classify a family");
  common(classify_cmd);
  auto* stable_cmd = app.add_subcommand("stable-set", "Stable and quasi-stable directions");
  common(stable_cmd);
  auto* diff_cmd = app.add_subcommand("difficulty", "Difficulty of a direction");
  common(diff_cmd);
  diff_cmd->add_option("--direction", o.direction, "Direction a,b")->required();
  auto* closure_cmd = app.add_subcommand("closure", "Closure of a finite set");
  common(closure_cmd);
  closure_cmd->add_option("--sites", o.sites, "Sites x,y;x,y;...");
  closure_cmd->add_option("--box", o.box, "Window x0,y0,x1,y1");
  closure_cmd->add_option("--n", o.n, "Torus side when no sites are given")->expected(1);
  auto* pc_cmd = app.add_subcommand("pc", "Percolation probability at --p, or p_c by bisection without --p");
  common(pc_cmd);
  pc_cmd->add_option("--n", o.n, "Torus sides")->expected(1, 64);
  auto* pc_p = pc_cmd->add_option("--p", o.p, "Densities")->expected(1, 64);
  pc_cmd->add_option("--trials", o.trials, "Trials per point, or per batch when bisecting");
  pc_cmd->add_option("--tol", o.tol, "Bisection bracket width");
  auto* tau_cmd = app.add_subcommand("tau", "Infection time of the origin");
  common(tau_cmd);
  tau_cmd->add_option("--p", o.p, "Densities")->expected(1, 64);
  tau_cmd->add_option("--trials", o.trials, "Trials per density");
  tau_cmd->add_option("--t-max", o.t_max, "Time cap");
  tau_cmd->add_option("--max-sites", o.max_sites, "Cap on simulated window sites");
  auto* verify_cmd = app.add_subcommand("verify", "Run a property suite");
  common(verify_cmd);
  verify_cmd->add_option("--suite", o.suite, "stable, quasi, voracity, cover, span, iceberg or scaling")->required();
  verify_cmd->add_option("--trials", o.trials, "Random instances");
  auto* demo_cmd = app.add_subcommand("demo-growth", "Per-step infected sites as CSV frames");
  common(demo_cmd);
  demo_cmd->add_option("--sites", o.sites, "Initial sites x,y;x,y;... (default: p-random n-box)");
  demo_cmd->add_option("--box", o.box, "Window x0,y0,x1,y1");
  demo_cmd->add_option("--n", o.n, "Box side")->expected(1);
  demo_cmd->add_option("--p", o.p, "Density")->expected(1);
  demo_cmd->add_option("--t-max", o.t_max, "Step cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (o.trials < 0) throw Error(Errc::ParseError, "--trials must be non-negative");
    if (*classify_cmd) return cmd_classify(o);
    if (*stable_cmd) return cmd_stable_set(o);
    if (*diff_cmd) return cmd_difficulty(o);
    if (*closure_cmd) return cmd_closure(o);
    if (*pc_cmd) return cmd_pc(o, pc_p->count() > 0);
    if (*tau_cmd) return cmd_tau(o);
    if (*verify_cmd) return cmd_verify(o);
    if (*demo_cmd) return cmd_demo_growth(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
