#include "ubp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ubp/errors.hpp"
#include "ubp/lattice.hpp"
#include "ubp/montecarlo.hpp"

namespace ubp {

DropletContext droplet_context(const UpdateFamily& U, const VerifyOptions& opt) {
  DropletContext ctx;
  DifficultyOptions dopt;
  dopt.window = opt.window;
  dopt.throw_on_cap = false;
  ctx.classification = classify(U, dopt);
  const Classification& c = ctx.classification;
  if (c.kind != Kind::Critical) throw Error(Errc::NotCritical, "droplet constants need a critical family");
  ctx.directions = c.droplet_directions;
  if (c.balanced) ctx.rho_hat = rho_bound(U, ctx.directions, c.alpha, 4).value;
  ctx.kappa = kappa(U, c, ctx.rho_hat);
  ctx.stretch = hull_stretch(ctx.directions);
  ctx.d_hat_radius = opt.d_hat_radius ? *opt.d_hat_radius
                                      : std::max(3 * ctx.kappa, double(std::max(c.alpha - 1, 0)) * ctx.kappa);
  ctx.d_hat = ball_droplet(ctx.d_hat_radius, ctx.directions);
  return ctx;
}

bool VerifyReport::ok() const {
  return std::all_of(lemmas.begin(), lemmas.end(), [](const LemmaTally& l) { return l.failed == 0; });
}

LemmaTally& VerifyReport::tally(const std::string& name) {
  for (auto& l : lemmas)
    if (l.name == name) return l;
  lemmas.push_back({name, 0, 0});
  return lemmas.back();
}

const LemmaTally* VerifyReport::find(const std::string& name) const {
  for (const auto& l : lemmas)
    if (l.name == name) return &l;
  return nullptr;
}

std::string VerifyReport::text() const {
  std::ostringstream os;
  os << "suite " << suite << " family " << family << " trials " << trials << " seed " << seed << "\n";
  for (const auto& [k, v] : constants) os << "  " << k << " = " << v << "\n";
  for (const auto& l : lemmas)
    os << (l.failed ? "FAIL " : "PASS ") << l.name << " (" << l.passed << "/" << l.passed + l.failed << ")\n";
  for (const auto& c : counterexamples) os << "  counterexample: " << c << "\n";
  os << (ok() ? "PASS" : "FAIL") << " suite " << suite << "\n";
  return os.str();
}

std::string VerifyReport::json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["family"] = family;
  j["trials"] = trials;
  j["seed"] = seed;
  j["constants"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : constants) j["constants"][k] = v;
  j["lemmas"] = nlohmann::ordered_json::array();
  for (const auto& l : lemmas) j["lemmas"].push_back({{"name", l.name}, {"passed", l.passed}, {"failed", l.failed}});
  j["counterexamples"] = counterexamples;
  j["pass"] = ok();
  return j.dump(2);
}

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> s{"stable", "quasi", "voracity", "cover", "span", "iceberg", "scaling"};
  return s;
}

namespace {

using Rng = std::mt19937_64;

Rng trial_rng(std::uint64_t seed, std::uint64_t trial) { return Rng(SiteRng(seed, trial).bits(0)); }

i64 uniform_int(Rng& rng, i64 lo, i64 hi) { return lo + i64(rng() % std::uint64_t(hi - lo + 1)); }

std::vector<Site> random_sites(Rng& rng, std::size_t count, i64 x0, i64 y0, i64 x1, i64 y1) {
  std::vector<Site> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back({uniform_int(rng, x0, x1), uniform_int(rng, y0, y1)});
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string sites_string(const std::vector<Site>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + to_string(s[i]);
  return out + "]";
}

void record(VerifyReport& rep, const std::string& lemma, bool ok, std::size_t trial, const std::string& input) {
  LemmaTally& t = rep.tally(lemma);
  if (ok) {
    ++t.passed;
    return;
  }
  ++t.failed;
  if (rep.counterexamples.size() < 20)
    rep.counterexamples.push_back(lemma + " trial=" + std::to_string(trial) + " seed=" + std::to_string(rep.seed) +
                                  " input=" + input);
}

BoundingBox inflate(BoundingBox b, i64 m) { return {b.x0 - m, b.y0 - m, b.x1 + m, b.y1 + m}; }

BoundingBox box_union(BoundingBox a, BoundingBox b) {
  if (a.x1 < a.x0) return b;
  if (b.x1 < b.x0) return a;
  return {std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1), std::max(a.y1, b.y1)};
}

BoundingBox box_of(const std::vector<Site>& s) {
  BoundingBox b{0, 0, -1, -1};
  for (Site p : s) b = box_union(b, BoundingBox{p.x, p.y, p.x, p.y});
  return b;
}

template <class Node>
std::vector<std::size_t> ancestors(const std::vector<Node>& nodes, std::size_t id) {
  std::vector<std::size_t> out, stack{id};
  while (!stack.empty()) {
    std::size_t n = stack.back();
    stack.pop_back();
    out.push_back(n);
    for (std::size_t p : nodes[n].parents) stack.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Five scales spread over [lambda, top].
std::vector<double> sample_scales(double lambda, double top) {
  std::vector<double> ks;
  for (int i = 0; i < 5; ++i) ks.push_back(lambda + (top - lambda) * i / 4.0);
  return ks;
}

bool strongly_connected(const std::vector<Site>& s, double kappa) {
  return s.empty() || strong_components(s, kappa).size() == 1;
}

void add_constant(VerifyReport& rep, const std::string& k, double v) { rep.constants.push_back({k, v}); }

// ---- stable

void suite_stable(VerifyReport& rep, const UpdateFamily& U) {
  StableSet S = stable_set(U);
  i64 reach = std::max<i64>(1, U.reach());
  for (std::size_t t = 0; t < rep.trials; ++t) {
    Rng rng = trial_rng(rep.seed, t);
    i64 a = 0, b = 0;
    while (a == 0 && b == 0) {
      a = uniform_int(rng, -60, 60);
      b = uniform_int(rng, -60, 60);
    }
    // Every fifth sample is a rule-site perpendicular, where the arc endpoints live.
    if (t % 5 == 4) {
      auto sup = U.support();
      Site x = sup[rng() % sup.size()];
      Direction d(x.x, x.y);
      a = (rng() & 1) ? d.rot_ccw().a() : d.rot_cw().a();
      b = (rng() & 1) ? d.rot_ccw().b() : d.rot_cw().b();
      if (a == 0 && b == 0) a = 1;
    }
    Direction u(a, b);
    bool st = is_stable(u, U);
    record(rep, "stable-set agrees with is_stable", S.contains(u) == st, t, to_string(u));
    // Half-plane dichotomy on a small window.
    if (std::abs(u.a()) + std::abs(u.b()) <= 12) {
      i64 r = 6 * reach + 6;
      Window w = Window::make_box(BoundingBox{-r, -r, r, r}, HalfPlane{u, 0});
      bool grew = !closure({}, w, U).empty();
      record(rep, "half-plane closure grows iff unstable", grew == !st, t, to_string(u));
    }
  }
}

// ---- quasi

void suite_quasi(VerifyReport& rep, const UpdateFamily& U) {
  StableSet S = stable_set(U);
  std::vector<Direction> Q = quasi_stable_set(U);
  for (Direction q : Q) {
    bool perp = false;
    for (Site x : U.support()) perp = perp || line_index(x, q) == 0;
    record(rep, "quasi direction is perpendicular to a rule site", perp, 0, to_string(q));
  }
  for (auto [u, v] : consecutive_pairs(S, Q))
    record(rep, "consecutive pair admits a rule in the closed double half-plane",
           closed_double_half_plane_rule(U, u, v), 0, to_string(u) + "," + to_string(v));
  // Randomised repetitions probe the same guarantee on random sub-arcs between consecutive elements.
  auto pairs = consecutive_pairs(S, Q);
  for (std::size_t t = 1; t < rep.trials && !pairs.empty(); ++t) {
    Rng rng = trial_rng(rep.seed, t);
    auto [u, v] = pairs[rng() % pairs.size()];
    record(rep, "consecutive pair admits a rule in the closed double half-plane",
           closed_double_half_plane_rule(U, u, v), t, to_string(u) + "," + to_string(v));
  }
}

// ---- voracity

void suite_voracity(VerifyReport& rep, const UpdateFamily& U, const VerifyOptions& opt) {
  DifficultyOptions dopt;
  dopt.window = opt.window;
  dopt.throw_on_cap = false;
  Classification c = classify(U, dopt);
  std::vector<std::pair<Direction, int>> checked;
  for (const auto& ev : c.evidence) {
    for (const DifficultyResult* r : {&ev.difficulty.plus, &ev.difficulty.minus}) {
      if (!r->finite() || r->witness.empty()) continue;
      bool v = false;
      try {
        v = voracious_check(r->witness, ev.u, U, r->value);
      } catch (const Error&) {
        v = false;
      }
      record(rep, "difficulty witness is voracious", v, 0, to_string(ev.u) + " " + sites_string(r->witness));
      checked.push_back({ev.u, r->value});
    }
    bool st = is_stable(ev.u, U);
    bool positive = !(ev.difficulty.alpha.finite() && ev.difficulty.alpha.value == 0);
    record(rep, "alpha(u) > 0 iff u stable", positive == st, 0, to_string(ev.u));
  }
  if (checked.empty()) return;
  for (std::size_t t = 1; t < rep.trials; ++t) {
    Rng rng = trial_rng(rep.seed, t);
    auto [u, cap] = checked[rng() % checked.size()];
    LineFrame frame(u);
    std::vector<Site> Z;
    std::size_t k = 1 + rng() % std::size_t(std::max(cap, 1));
    for (std::size_t i = 0; i < k; ++i) Z.push_back(frame.from_frame({uniform_int(rng, -4, 4), uniform_int(rng, 0, 2)}));
    std::sort(Z.begin(), Z.end());
    Z.erase(std::unique(Z.begin(), Z.end()), Z.end());
    std::vector<Site> bigger = Z;
    bigger.push_back(frame.from_frame({uniform_int(rng, -4, 4), uniform_int(rng, 0, 2)}));
    std::sort(bigger.begin(), bigger.end());
    bigger.erase(std::unique(bigger.begin(), bigger.end()), bigger.end());
    try {
      bool a = voracious_check(Z, u, U, int(Z.size()));
      bool b = voracious_check(bigger, u, U, int(bigger.size()));
      record(rep, "voracity is monotone", !a || b, t, to_string(u) + " " + sites_string(Z) + " " + sites_string(bigger));
    } catch (const Error&) {
      rep.tally("voracity undecided within the band");
    }
  }
}

// ---- cover

void suite_cover(VerifyReport& rep, const UpdateFamily& U, const VerifyOptions& opt) {
  DropletContext ctx = droplet_context(U, opt);
  const Classification& c = ctx.classification;
  if (!c.balanced) throw Error(Errc::NotCritical, "the cover suite needs a balanced family");
  double n = nu(U), dhat = ctx.d_hat.diameter();
  double C0 = 2 * dhat + 2 * ctx.stretch * ctx.kappa + 2 * n;
  double c_al = 2 * ctx.stretch * ctx.kappa + 2 * n;
  add_constant(rep, "alpha", c.alpha);
  add_constant(rep, "rho_hat", ctx.rho_hat);
  add_constant(rep, "kappa", ctx.kappa);
  add_constant(rep, "lambda", opt.lambda);
  add_constant(rep, "d_hat_radius", ctx.d_hat_radius);
  add_constant(rep, "d_hat_diameter", dhat);
  add_constant(rep, "hull_stretch", ctx.stretch);
  add_constant(rep, "C0", C0);
  add_constant(rep, "AL_slack", c_al);
  i64 margin = i64(std::ceil(ctx.rho_hat + 2 * n)) + 2;
  for (std::size_t t = 0; t < rep.trials; ++t) {
    Rng rng = trial_rng(rep.seed, t);
    i64 L = uniform_int(rng, 20, 220);
    std::size_t count = std::size_t(uniform_int(rng, 2, 40));
    std::vector<Site> K = random_sites(rng, count, 0, 0, L, L);
    std::string input = sites_string(K);
    CoverResult cov = covering_algorithm(K, c.alpha, ctx.kappa, ctx.d_hat);

    bool maximal = true;
    for (const auto& comp : strong_components(cov.dust, ctx.kappa)) maximal = maximal && int(comp.size()) < c.alpha;
    record(rep, "cluster collection is maximal", maximal, t, input);

    BoundingBox bb = box_of(K);
    for (const Droplet& d : cov.droplets) bb = box_union(bb, d.polygon().bbox());
    std::vector<Site> cl = closure(K, Window::make_box(inflate(bb, margin)), U);
    bool local = true;
    for (Site x : cl) {
      if (std::any_of(cov.droplets.begin(), cov.droplets.end(), [&](const Droplet& d) { return d.contains(x); }))
        continue;
      double dist = std::numeric_limits<double>::infinity();
      for (Site y : cov.dust) dist = std::min(dist, norm(x - y));
      if (dist > ctx.rho_hat + 1e-9) local = false;
    }
    record(rep, "cover locality", local, t, input);

    for (const CoverNode& node : cov.nodes)
      record(rep, "extremal cover bound", double(node.clusters) >= node.droplet.diameter() / C0, t, input);

    for (std::size_t f : cov.final_nodes) {
      double dm = cov.nodes[f].droplet.diameter();
      if (dm < opt.lambda) continue;
      auto anc = ancestors(cov.nodes, f);
      for (double k : sample_scales(opt.lambda, dm)) {
        bool found = std::any_of(anc.begin(), anc.end(), [&](std::size_t a) {
          double d = cov.nodes[a].droplet.diameter();
          return d >= k && d <= 3 * k + c_al;
        });
        record(rep, "Aizenman-Lebowitz cover", found, t, input + " k=" + std::to_string(k));
      }
    }

    bool apart = true;
    std::vector<Site> nb = disc(ctx.kappa);
    for (std::size_t i = 0; i < cov.droplets.size(); ++i)
      for (std::size_t j = i + 1; j < cov.droplets.size(); ++j) {
        auto a = cov.droplets[i].sites();
        const Droplet& b = cov.droplets[j];
        for (Site p : a)
          for (Site e : nb)
            if (b.contains(p + e)) apart = false;
      }
    record(rep, "output droplets are pairwise more than kappa apart", apart, t, input);
  }
}

// ---- span

struct SpanSetup {
  std::vector<Direction> T;
  double kappa;
  double stretch;
  bool bounded_growth;  // closures of finite sets are finite
};

SpanSetup span_setup(const UpdateFamily& U, const VerifyOptions& opt) {
  try {
    DropletContext ctx = droplet_context(U, opt);
    return {ctx.directions, ctx.kappa, ctx.stretch, true};
  } catch (const Error& e) {
    if (e.code() != Errc::NotCritical) throw;
  }
  std::vector<Direction> axes{Direction(1, 0), Direction(0, 1), Direction(-1, 0), Direction(0, -1)};
  DifficultyOptions dopt;
  dopt.window = opt.window;
  dopt.throw_on_cap = false;
  return {axes, 2 * nu(U), 1.0, classify(U, dopt).kind != Kind::Supercritical};
}

bool same_droplets(std::vector<Droplet> a, std::vector<Droplet> b) {
  auto less = [](const Droplet& x, const Droplet& y) { return x.offsets < y.offsets; };
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  return a == b;
}

void suite_span(VerifyReport& rep, const UpdateFamily& U, const VerifyOptions& opt) {
  SpanSetup su = span_setup(U, opt);
  double n = nu(U);
  double C1 = su.stretch * su.kappa + 2 * n + 1;
  add_constant(rep, "kappa", su.kappa);
  add_constant(rep, "lambda", opt.lambda);
  add_constant(rep, "hull_stretch", su.stretch);
  add_constant(rep, "C1", C1);
  add_constant(rep, "AL_slack", su.kappa + 1);
  std::vector<Direction> axes;
  for (Direction u : su.bounded_growth ? su.T : std::vector<Direction>{})
    if (std::find(su.T.begin(), su.T.end(), -u) != su.T.end()) axes.push_back(u);
  i64 margin = 2 * std::max<i64>(1, U.reach()) + 4;
  for (std::size_t t = 0; t < rep.trials; ++t) {
    Rng rng = trial_rng(rep.seed, t);
    i64 L = uniform_int(rng, 6, 40);
    std::vector<Site> K = random_sites(rng, 25, 0, 0, L, L);
    std::string input = sites_string(K);
    Window w = Window::make_box(inflate(box_of(K), margin));
    SpanResult sr = spanning_algorithm(K, U, su.kappa, su.T, w);
    record(rep, "merge loop equals components of the closure",
           same_droplets(sr.droplets, span_by_components(K, U, su.kappa, su.T, w)), t, input);

    for (const SpanNode& node : sr.nodes) {
      std::size_t inside = 0;
      for (Site p : K) inside += node.droplet.contains(p) ? 1 : 0;
      record(rep, "extremal span bound", double(inside) >= node.droplet.diameter() / C1, t, input);
    }

    for (std::size_t f : sr.final_nodes) {
      const Droplet& D = sr.nodes[f].droplet;
      record(rep, "internally spanned: definition equals merge loop",
             is_internally_spanned(D, K, U, su.kappa) == is_internally_spanned_by_algorithm(D, K, U, su.kappa), t,
             input + " D=" + to_string(D));
      auto anc = ancestors(sr.nodes, f);
      // Ancestors in creation order: the first one reaching k has both parents below k.
      for (Direction u : axes) {
        double top = D.projection(u);
        if (top < opt.lambda) continue;
        for (double k : sample_scales(opt.lambda, top)) {
          bool found = false;
          for (std::size_t a : anc) {
            double pr = sr.nodes[a].droplet.projection(u);
            if (pr >= k) {
              found = pr <= 3 * k + su.kappa + 1;
              break;
            }
          }
          record(rep, "Aizenman-Lebowitz span", found, t, input + " u=" + to_string(u) + " k=" + std::to_string(k));
        }
      }
    }

    // Small dense instance for the penultimate-step split.
    std::vector<Site> small = random_sites(rng, std::size_t(uniform_int(rng, 2, 8)), 0, 0, 5, 5);
    Window ws = Window::make_box(inflate(box_of(small), margin));
    if (small.size() >= 2 && strongly_connected(closure(small, ws, U), su.kappa)) {
      SpanResult s2 = spanning_algorithm(small, U, su.kappa, su.T, ws);
      bool ok = s2.final_nodes.size() == 1 && s2.nodes[s2.final_nodes[0]].parents.size() == 2;
      if (ok) {
        const auto& par = s2.nodes[s2.final_nodes[0]].parents;
        const auto &c1 = s2.nodes[par[0]].closure, &c2 = s2.nodes[par[1]].closure;
        std::vector<Site> both = c1;
        both.insert(both.end(), c2.begin(), c2.end());
        std::sort(both.begin(), both.end());
        both.erase(std::unique(both.begin(), both.end()), both.end());
        ok = strongly_connected(c1, su.kappa) && strongly_connected(c2, su.kappa) &&
             strongly_connected(both, su.kappa);
      }
      record(rep, "penultimate split", ok, t, sites_string(small));
    }
  }
}

// ---- iceberg

// Stretch of the smallest iceberg around D_hat placed with its lowest line at depth.
double iceberg_shape_factor(const Droplet& hat, Direction u, Direction u0, Direction us, double depth) {
  auto pts = hat.sites();
  i64 low = std::numeric_limits<i64>::max();
  for (Site p : pts) low = std::min(low, line_index(p, u));
  i64 norm2 = u.a() * u.a() + u.b() * u.b();
  i64 k = (i64(std::ceil(depth)) - low + norm2 - 1) / norm2;
  for (Site& p : pts) p = p + Site{k * u.a(), k * u.b()};
  LatticePolygon J = smallest_iceberg(pts, u, u0, us).polygon();
  double d = hat.diameter();
  return std::max({1.0, height(J, us) / d, width(J, us) * angle_between(u, us) / d});
}

void suite_iceberg(VerifyReport& rep, const UpdateFamily& U, const VerifyOptions& opt) {
  DifficultyOptions dopt;
  dopt.window = opt.window;
  dopt.throw_on_cap = false;
  Classification c = classify(U, dopt);
  if (c.kind != Kind::Critical || !c.drift || !c.u_star)
    throw Error(Errc::NotDriftFamily, "the iceberg suite needs an unbalanced family with drift");
  Direction us = *c.u_star;
  Direction u0 = iceberg_u0(U, us, c.stable);
  double kap = kappa(U, c, 0.0), n = nu(U);
  Droplet hat = ball_droplet(opt.d_hat_radius.value_or(3 * kap), c.droplet_directions);
  double C2 = 2 * hat.diameter() + 2 * kap + 2 * n + 2;
  add_constant(rep, "kappa", kap);
  add_constant(rep, "d_hat_diameter", hat.diameter());
  add_constant(rep, "C2", C2);
  add_constant(rep, "C2_shape_factor_max", 0.0);
  add_constant(rep, "u_star_a", double(us.a()));
  add_constant(rep, "u_star_b", double(us.b()));
  add_constant(rep, "u0_a", double(u0.a()));
  add_constant(rep, "u0_b", double(u0.b()));
  i64 pad = 2 * std::max<i64>(1, U.reach()) + 2;
  auto closed_with = [&](Direction u, const std::vector<Site>& X) {
    std::vector<Site> xs = X;
    std::sort(xs.begin(), xs.end());
    Window w = Window::make_box(inflate(box_of(xs), pad), HalfPlane{u, 0});
    return closure(xs, w, U) == xs;
  };
  for (std::size_t t = 0; t < rep.trials; ++t) {
    Rng rng = trial_rng(rep.seed, t);
    i64 a = uniform_int(rng, 1, 6), b = uniform_int(rng, 1, 6);
    Direction u(a * us.a() + b * u0.a(), a * us.b() + b * u0.b());
    LineFrame frame(u);
    std::string tag = "u=" + to_string(u) + " ";
    double sigma = angle_between(u, us);
    double shape = iceberg_shape_factor(hat, u, u0, us, 2 * hat.diameter() + 2 * kap);
    double C2u = C2 * shape;
    for (auto& [k, v] : rep.constants)
      if (k == "C2_shape_factor_max") v = std::max(v, shape);

    std::vector<Site> pts;
    std::size_t m = std::size_t(uniform_int(rng, 1, 3));
    for (std::size_t i = 0; i < m; ++i) pts.push_back(frame.from_frame({uniform_int(rng, -15, 15), uniform_int(rng, 0, 12)}));
    Iceberg J = smallest_iceberg(pts, u, u0, us);
    record(rep, "half-plane plus iceberg is closed", closed_with(u, J.sites()), t, tag + sites_string(pts));

    std::vector<Site> K;
    std::size_t count = std::size_t(uniform_int(rng, 1, 20));
    i64 spread = uniform_int(rng, 10, 60);
    for (std::size_t i = 0; i < count; ++i)
      K.push_back(frame.from_frame({uniform_int(rng, -spread, spread), uniform_int(rng, 0, spread / 2)}));
    std::sort(K.begin(), K.end());
    K.erase(std::unique(K.begin(), K.end()), K.end());
    IcebergResult res = iceberg_algorithm(K, u, {us, u0}, U, kap, hat);
    std::vector<Site> all;
    for (std::size_t f : res.final_nodes) {
      const IcebergNode& node = res.nodes[f];
      LatticePolygon P = node.region.polygon();
      auto s = P.sites();
      all.insert(all.end(), s.begin(), s.end());
      if (!node.region.is_iceberg) continue;
      double g = double(node.leaves);
      record(rep, "iceberg height bound", height(P, us) <= C2u * g, t, tag + sites_string(K));
      record(rep, "iceberg width bound", width(P, us) <= C2u * g / sigma, t, tag + sites_string(K));
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    record(rep, "half-plane plus output is closed", all.empty() || closed_with(u, all), t, tag + sites_string(K));
  }
}

// ---- scaling

void suite_scaling(VerifyReport& rep, const UpdateFamily& U) {
  const i64 n = 32;
  int per = int(std::max<std::size_t>(rep.trials, 1));
  std::vector<Proportion> curve;
  std::vector<double> grid;
  for (int k = 1; k <= 10; ++k) grid.push_back(0.02 * k);
  TrialConfig cfg;
  cfg.family = U;
  cfg.n = n;
  cfg.seed = rep.seed;
  cfg.trials = per;
  for (double p : grid) {
    cfg.p = p;
    curve.push_back(percolation_probability(cfg));
  }
  for (std::size_t i = 0; i + 1 < curve.size(); ++i)
    record(rep, "percolation probability is non-decreasing in p", curve[i + 1].ci_high >= curve[i].ci_low, i,
           "p=" + std::to_string(grid[i]));
  // Two-round sprinkling at the grid point nearest probability 1/2.
  std::size_t mid = 0;
  for (std::size_t i = 0; i < curve.size(); ++i)
    if (std::abs(curve[i].fraction - 0.5) < std::abs(curve[mid].fraction - 0.5)) mid = i;
  double p = grid[mid], q = 1 - std::sqrt(1 - p);
  std::size_t one = 0, two = 0;
  for (int t = 0; t < per; ++t) {
    SiteRng a(rep.seed ^ 0xA5A5A5A5ULL, std::uint64_t(t));
    one += torus_trial(U, n, p, a) ? 1 : 0;
    SiteRng r1(rep.seed ^ 0x5A5A5A5AULL, std::uint64_t(t)), r2(rep.seed ^ 0x3C3C3C3CULL, std::uint64_t(t));
    LatticeState st(U, Window::torus(n));
    for (i64 y = 0; y < n; ++y)
      for (i64 x = 0; x < n; ++x) {
        std::uint64_t key = SiteRng::site_key({x, y});
        if (r1.uniform(key) < q || r2.uniform(key) < q) st.infect_index(std::size_t(y * n + x));
      }
    st.run();
    two += st.count() == std::size_t(n * n) ? 1 : 0;
  }
  double f1 = double(one) / per, f2 = double(two) / per, pool = double(one + two) / (2.0 * per);
  double se = std::sqrt(pool * (1 - pool) * 2.0 / per);
  double z = se > 0 ? std::abs(f1 - f2) / se : 0.0;
  add_constant(rep, "sprinkling_p", p);
  add_constant(rep, "sprinkling_z", z);
  record(rep, "two-round sprinkling matches one round", z < 2.5758293035489, 0, "p=" + std::to_string(p));

  std::vector<std::pair<double, double>> bal, unb;
  for (double pp : {0.04, 0.05, 0.06, 0.07, 0.08}) {
    bal.push_back({pp, 0.7 / pp});
    unb.push_back({pp, 0.7 * std::pow(std::log(1 / pp), 2) / pp});
  }
  record(rep, "balanced transform inverts synthetic data",
         std::abs(scaling_fit(bal, 1, false, Statistic::LogTau, 4).spread - 1) < 1e-9, 0, "synthetic");
  record(rep, "unbalanced transform inverts synthetic data",
         std::abs(scaling_fit(unb, 1, true, Statistic::LogTau, 4).spread - 1) < 1e-9, 0, "synthetic");
}

}  // namespace

VerifyReport run_verify_suite(const std::string& suite, const UpdateFamily& U, std::size_t trials, std::uint64_t seed,
                              const VerifyOptions& opt) {
  if (std::find(verify_suites().begin(), verify_suites().end(), suite) == verify_suites().end())
    throw Error(Errc::InvalidRule, "unknown suite " + suite);
  VerifyReport rep;
  rep.suite = suite;
  rep.family = U.name();
  rep.seed = seed;
  rep.trials = trials;
  if (trials == 0) return rep;
  if (suite == "stable") suite_stable(rep, U);
  if (suite == "quasi") suite_quasi(rep, U);
  if (suite == "voracity") suite_voracity(rep, U, opt);
  if (suite == "cover") suite_cover(rep, U, opt);
  if (suite == "span") suite_span(rep, U, opt);
  if (suite == "iceberg") suite_iceberg(rep, U, opt);
  if (suite == "scaling") suite_scaling(rep, U);
  return rep;
}

}  // namespace ubp
