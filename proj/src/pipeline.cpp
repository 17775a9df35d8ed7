#include "aeq/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "aeq/errors.hpp"
#include "aeq/integrator.hpp"

namespace aeq {
namespace {

std::vector<Vector> basis(int n) {
  std::vector<Vector> out;
  for (int i = 0; i < n; ++i) out.push_back(Vector::Unit(n, i));
  return out;
}

Json cert_json(const TailCertificate& c) {
  Json j = Json::object();
  j["K"] = number(c.K);
  j["m"] = c.m;
  j["lambda"] = number(c.lambda);
  j["t_star"] = number(c.t_star);
  return j;
}

Verdict make_verdict(std::string name, bool pass, double worst, double at_t, std::string note = {}) {
  Verdict v;
  v.condition = std::move(name);
  v.pass = pass;
  v.worst_value = worst;
  v.at_t = at_t;
  v.note = std::move(note);
  return v;
}

Verdict parity_verdict(const std::string& name, const MatrixFunction& m, Parity p, double horizon) {
  double scale = 1.0;
  for (int k = 0; k <= 64; ++k) scale = std::max(scale, m(horizon * k / 64).norm());
  const double dev = m.parity_deviation(p, horizon, 64);
  return make_verdict(name, dev <= 1e-9 * scale, dev, horizon,
                      std::string(p == Parity::odd ? "F(-t) = -F(t)" : "F(-t) = F(t)") + " sampled at 64 points");
}

Verdict parity_verdict(const std::string& name, const ParityCheck& c, const std::string& note) {
  return make_verdict(name, c.pass, c.worst_deviation, 0.0, note);
}

Vector x_at(const LinearContext& ctx, double t, const Vector& c) { return (*ctx.X)(t) * c; }

/// Ψ for the scenario's mode; two-sided scenarios fall back to the continued
/// one-sided solution when the half-axis constructions do not glue.
PsiSolution build_psi(const LinearContext& ctx, Artifacts& a) {
  const MatrixFn p = ctx.P->as_function();
  if (!ctx.two_sided) return psi_series(p, ctx.cert, ctx.psi_options);
  try {
    auto ts = psi_two_sided(p, ctx.cert, ctx.psi_options);
    a.add(make_verdict("glue", true, ts.glue_mismatch, ts.glue_at, "half-axis solutions agree across [-t1, t1]"));
    return std::move(ts.psi);
  } catch (const GlueMismatch& e) {
    a.add(make_verdict("glue", false, e.mismatch(), e.at_t(), e.what()));
    return psi_plus_continued(p, ctx.cert, ctx.psi_options);
  }
}

void psi_verdicts(const LinearContext& ctx, const PsiSolution& psi, Artifacts& a) {
  const double limit = 100.0 * ctx.tol;
  a.add(make_verdict("integral_equation", psi.residual <= limit, psi.residual, psi.t_begin(),
                     "max residual of the integral equation for Ψ (limit " + format_number(limit) + ")"));
  Json j = Json::object();
  j["t1"] = number(psi.t1);
  j["t2"] = number(psi.t2);
  j["horizon"] = number(psi.horizon);
  j["eps"] = number(psi.eps);
  j["levels"] = psi.k_used;
  j["residual"] = number(psi.residual);
  j["tail_at_horizon"] = number(psi.tail_at_horizon);
  j["two_sided"] = psi.two_sided;
  a.details["psi"] = std::move(j);
}

std::vector<Vector> initial_at_t2(const LinearContext& ctx, double t2) {
  std::vector<Vector> out;
  for (const auto& c : ctx.initial) out.push_back(x_at(ctx, t2, c));
  return out;
}

CsvTable gap_table(const std::vector<double>& t, const std::vector<std::vector<double>>& gaps) {
  CsvTable table;
  table.header.push_back("t");
  for (std::size_t k = 0; k < gaps.size(); ++k) table.header.push_back("gap_" + std::to_string(k + 1));
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::vector<double> row{t[i]};
    for (const auto& g : gaps) row.push_back(g[i]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

Json map_json(const EquivalenceMap& map) {
  Json j = Json::object();
  j["t2"] = number(map.t2);
  j["condition"] = number(map.condition);
  j["M"] = to_json(map.M);
  return j;
}

Verdict round_trip_verdict(const EquivalenceMap& map, const std::vector<Vector>& vs) {
  double worst = 0.0;
  for (const auto& v : vs) {
    const Vector back = map_solution(map, map_solution(map, v, MapDirection::x_to_y), MapDirection::y_to_x);
    worst = std::max(worst, (back - v).norm() / std::max(1.0, v.norm()));
  }
  return make_verdict("map_round_trip", worst <= 1e-10, worst, map.t2, "‖M^{-1} M v - v‖ relative, limit 1e-10");
}

Verdict c2_verdict(const LinearContext& ctx, Artifacts& a, double tol) {
  if (ctx.B.is_zero()) return make_verdict("C2", true, 0.0, ctx.horizon, "B = 0, so Ψ = 0");
  const PsiSolution psi = psi_series(ctx.P->as_function(), ctx.cert, ctx.psi_options);
  const C2Report r = check_C2(*ctx.X, psi, ctx.cert, tol);
  CsvTable t{{"t", "x_psi", "envelope"}, {}};
  for (std::size_t i = 0; i < r.curve.t.size(); ++i) t.rows.push_back({r.curve.t[i], r.curve.value[i], r.curve.envelope[i]});
  a.tables.emplace_back("c2", std::move(t));
  return r.verdict;
}

bool is_linear_condition(const std::string& c) { return c == "C1" || c == "C2" || c == "C6" || c == "C7"; }
bool is_quasi_condition(const std::string& c) { return c == "C3" || c == "C4" || c == "C5" || c == "Eq14"; }

struct QuasiContext {
  Matrix C;
  StateMap f;
  Eta eta;
  SpectralData spec;
  double horizon = 0.0;
  double tol = 1e-8;
};

QuasiContext prepare_quasi(const Scenario& s, const RunConfig& cfg) {
  if (!s.C) throw InputError("scenario '" + s.name + "' has no C (quasilinear system)");
  if (!s.run.eta_cert) throw InputError("quasilinear runs need run.eta_cert");
  const CertDef* def = s.cert(*s.run.eta_cert);
  if (def->auto_K) throw InputError("the eta certificate needs an explicit K");
  QuasiContext q;
  q.C = *s.C;
  q.f = s.f ? *s.f : StateMap::zero(s.dim);
  q.eta.function = s.eta;
  q.eta.cert = def->cert;
  q.spec = spectral_data(q.C);
  q.horizon = cfg.horizon.value_or(s.run.horizon.value_or(find_smallness_point(def->cert, 1e-10)));
  q.tol = cfg.tol.value_or(s.run.tol);
  return q;
}

void quasi_conditions(const QuasiContext& q, const std::set<std::string>& want, const RunConfig& cfg, Artifacts& a) {
  if (want.count("C3")) a.add(check_C3(q.f, q.eta, GridSpec{0.0, q.horizon, 2001, cfg.seed}));
  if (want.count("C4")) {
    const C4Report r = check_C4(q.spec, q.eta);
    a.add(r.verdict);
    Json j = Json::object();
    j["finite"] = r.finite;
    j["L"] = number(r.L);
    j["error_bound"] = number(r.error_bound);
    a.details["C4"] = std::move(j);
  }
  if (want.count("C5") || want.count("Eq14")) {
    const C5Report r = check_C5(q.spec, q.eta, GridSpec{0.0, q.horizon, 401, std::nullopt}, cfg.report());
    if (want.count("C5")) a.add(r.c5_verdict);
    if (want.count("Eq14")) a.add(r.yakubovich_verdict);
    CsvTable t{{"t", "c5", "eq14"}, {}};
    for (std::size_t i = 0; i < r.t.size(); ++i) t.rows.push_back({r.t[i], r.c5[i], r.yakubovich[i]});
    a.tables.emplace_back("c5", std::move(t));
    if (!r.divergence_evidence.empty()) {
      Json ev = Json::array();
      for (const auto& [range, value] : r.divergence_evidence) {
        Json e = Json::object();
        e["R"] = number(range);
        e["partial_integral"] = number(value);
        ev.push_back(std::move(e));
      }
      a.details["Eq14_divergence_evidence"] = std::move(ev);
    }
  }
}

Json spectral_json(const SpectralData& s) {
  Json j = Json::object();
  j["alpha"] = number(s.alpha);
  j["beta"] = number(s.beta);
  j["m_alpha"] = s.m_alpha;
  j["m_beta"] = s.m_beta;
  j["kappa1"] = number(s.kappa1);
  j["kappa2"] = number(s.kappa2);
  j["k1"] = number(s.k1());
  Json w = Json::array();
  for (const auto& m : s.warnings) w.push_back(m);
  j["warnings"] = std::move(w);
  return j;
}

}  // namespace

double LinearContext::envelope(double t) const {
  const double v = P->norm(t);
  return two_sided ? std::max(v, P->norm(-t)) : v;
}

LinearContext prepare_linear(const Scenario& s, const RunConfig& cfg) {
  if (!s.A) throw InputError("scenario '" + s.name + "' has no A (linear system)");
  LinearContext ctx;
  ctx.A = *s.A;
  ctx.B = s.B ? *s.B : MatrixFunction::zero(s.dim);
  ctx.tol = cfg.tol.value_or(s.run.tol);
  ctx.two_sided = s.run.two_sided;
  CertDef def;
  if (s.run.p_cert) {
    def = *s.cert(*s.run.p_cert);
  } else if (ctx.B.is_zero()) {
    def.name = "default";
  } else {
    throw InputError("run.p_cert is required when B is nonzero");
  }
  PsiOptions opt;
  opt.eps = cfg.eps.value_or(s.run.eps);
  opt.k_max = s.run.kmax;
  opt.tol = ctx.tol;
  opt.t_start = s.run.t_start;
  auto horizon_for = [&](const TailCertificate& c) {
    if (cfg.horizon) return *cfg.horizon;
    if (s.run.horizon) return *s.run.horizon;
    return psi_horizon(c, opt);
  };
  auto build = [&](double h) {
    ctx.X = std::make_shared<const FundamentalMatrix>(fundamental_matrix(ctx.A, h, cfg.x_tol, ctx.two_sided));
    ctx.P = std::make_shared<const PerturbationMatrix>(build_P(ctx.X, ctx.B));
    ctx.horizon = h;
  };
  ctx.cert = def.cert;
  build(horizon_for(ctx.cert));
  auto env = [&ctx](double t) { return ctx.envelope(t); };
  auto fit = [&]() {
    if (!(ctx.horizon > def.cert.t_star)) throw InputError("certificate t_star lies beyond the horizon");
    ctx.cert = fit_certificate(env, def.cert.m, def.cert.lambda, def.cert.t_star,
                               GridSpec{def.cert.t_star, ctx.horizon, 4001, std::nullopt});
    ctx.fitted = true;
  };
  if (def.auto_K) {
    fit();
    const double h = horizon_for(ctx.cert);
    if (h > ctx.horizon) {
      build(h);
      fit();
    }
  }
  if (!(ctx.horizon > ctx.cert.t_star)) throw InputError("certificate t_star lies beyond the horizon");
  ctx.cert_report = validate_certificate(env, ctx.cert, GridSpec{ctx.cert.t_star, ctx.horizon, 2001, cfg.seed});
  opt.horizon = ctx.horizon;
  ctx.psi_options = opt;
  ctx.initial = s.initial.empty() ? basis(s.dim) : s.initial;
  return ctx;
}

Verdict c1_verdict(const LinearContext& ctx) {
  return make_verdict("C1", ctx.cert_report.pass, ctx.cert_report.worst_excess, ctx.cert_report.worst_t,
                      std::string("‖P(t)‖ <= K t^m e^{-λt} on ") + std::to_string(ctx.cert_report.samples) +
                          " samples" + (ctx.fitted ? " (K fitted)" : "") + "; worst_value = max(‖P‖ - bound)");
}

CsvTable psi_table(const PsiSolution& psi) {
  CsvTable t;
  const int n = psi.dim();
  t.header.push_back("t");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t.header.push_back("psi_" + std::to_string(i + 1) + std::to_string(j + 1));
  t.header.push_back("norm");
  const auto& edges = psi.grid.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    std::vector<double> row{edges[e]};
    const Matrix& m = psi.edge_values[e];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) row.push_back(m(i, j));
    row.push_back(m.norm());
    t.rows.push_back(std::move(row));
  }
  return t;
}

Artifacts run_check(const Scenario& s, const RunConfig& cfg) {
  std::vector<std::string> want = cfg.conditions;
  if (want.empty()) {
    if (s.A) {
      want = {"C1", "C2"};
      if (s.run.two_sided) want.insert(want.end(), {"C6", "C7"});
    }
    if (s.C) want.insert(want.end(), {"C3", "C4", "C5", "Eq14"});
  }
  bool linear = false, quasi = false;
  for (const auto& c : want) {
    if (is_linear_condition(c)) {
      if (!s.A) throw InputError("condition " + c + " needs a linear scenario (A)");
      linear = true;
    } else if (is_quasi_condition(c)) {
      if (!s.C) throw InputError("condition " + c + " needs a quasilinear scenario (C, f)");
      quasi = true;
    } else {
      throw InputError("unknown condition '" + c + "' (known: C1..C7, Eq14)");
    }
  }
  Artifacts a;
  const std::set<std::string> set(want.begin(), want.end());
  if (linear) {
    const LinearContext ctx = prepare_linear(s, cfg);
    a.details["certificate"] = cert_json(ctx.cert);
    a.details["horizon"] = number(ctx.horizon);
    if (set.count("C1")) a.add(c1_verdict(ctx));
    if (set.count("C2")) a.add(c2_verdict(ctx, a, cfg.report()));
    if (set.count("C6")) a.add(parity_verdict("C6", ctx.A, Parity::odd, ctx.horizon));
    if (set.count("C7")) a.add(parity_verdict("C7", ctx.B, Parity::even, ctx.horizon));
  }
  if (quasi) {
    const QuasiContext q = prepare_quasi(s, cfg);
    a.details["spectral"] = spectral_json(q.spec);
    quasi_conditions(q, set, cfg, a);
  }
  return a;
}

Artifacts run_psi(const Scenario& s, const RunConfig& cfg) {
  const LinearContext ctx = prepare_linear(s, cfg);
  Artifacts a;
  a.add(c1_verdict(ctx));
  a.details["certificate"] = cert_json(ctx.cert);
  const PsiSolution psi = build_psi(ctx, a);
  psi_verdicts(ctx, psi, a);
  if (!ctx.two_sided) {
    const PsiSolution back = psi_backward(ctx.P->as_function(), ctx.cert, ctx.psi_options);
    double diff = 0.0, at = psi.t_begin();
    for (std::size_t e = 0; e < psi.edge_values.size(); ++e) {
      const double d = (psi.edge_values[e] - back.edge_values[e]).norm();
      if (d > diff) {
        diff = d;
        at = psi.grid.edges()[e];
      }
    }
    const double limit = 100.0 * ctx.tol;
    a.add(make_verdict("backward_agreement", diff <= limit, diff, at,
                       "series vs backward integration, limit " + format_number(limit)));
    // ‖Ψ_k(t)‖ < eps^k for t ≥ t1
    double worst = -1.0, worst_t = psi.t1;
    const auto& edges = psi.grid.edges();
    for (std::size_t k = 0; k < psi.level_edge_norms.size() && k < 10; ++k)
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e] < psi.t1) continue;
        const double ratio = psi.level_edge_norms[k][e] / std::pow(psi.eps, static_cast<double>(k + 1));
        if (ratio > worst) {
          worst = ratio;
          worst_t = edges[e];
        }
      }
    a.add(make_verdict("level_bound", worst < 1.0, worst, worst_t, "max ‖Ψ_k(t)‖ / eps^k over t >= t1, k <= 10"));
  }
  a.tables.emplace_back("psi", psi_table(psi));
  return a;
}

Artifacts run_equiv(const Scenario& s, const RunConfig& cfg) {
  const LinearContext ctx = prepare_linear(s, cfg);
  Artifacts a;
  a.add(c1_verdict(ctx));
  a.details["certificate"] = cert_json(ctx.cert);
  const PsiSolution psi = build_psi(ctx, a);
  psi_verdicts(ctx, psi, a);
  const C2Report c2 = check_C2(*ctx.X, psi, ctx.cert, cfg.report());
  a.add(ctx.B.is_zero() ? make_verdict("C2", true, 0.0, ctx.horizon, "B = 0, so Ψ = 0") : c2.verdict);
  const EquivalenceMap map = build_map(*ctx.X, psi);
  a.details["map"] = map_json(map);
  const auto x0 = initial_at_t2(ctx, map.t2);
  a.add(round_trip_verdict(map, x0));
  ReportOptions ro;
  ro.tol = cfg.report();
  ro.integrator_tol = cfg.x_tol;
  const EquivalenceReport rep = equivalence_report(ctx.A, ctx.B, map, x0, ctx.horizon, ro);
  a.add(rep.verdict);
  a.tables.emplace_back("psi", psi_table(psi));
  a.tables.emplace_back("equiv", gap_table(rep.t, rep.gaps));
  return a;
}

Artifacts run_biasym(const Scenario& s, const RunConfig& cfg) {
  if (!s.run.two_sided) throw InputError("biasym needs run.two_sided = true in the scenario");
  const LinearContext ctx = prepare_linear(s, cfg);
  Artifacts a;
  a.add(c1_verdict(ctx));
  a.details["certificate"] = cert_json(ctx.cert);
  const ParityReport pr = check_parity(ctx.A, ctx.B, *ctx.X, *ctx.P, ctx.horizon);
  a.add(parity_verdict("C6", pr.A_odd, "A(-t) = -A(t)"));
  a.add(parity_verdict("C7", pr.B_even, "B(-t) = B(t)"));
  a.add(parity_verdict("X_even", pr.X_even, "X(-t) = X(t)"));
  a.add(parity_verdict("P_odd", pr.P_odd, "P(-t) = -P(t)"));
  Json pj = Json::object();
  auto put = [&](const char* k, const ParityCheck& c) {
    Json j = Json::object();
    j["pass"] = c.pass;
    j["worst_deviation"] = number(c.worst_deviation);
    j["scale"] = number(c.scale);
    pj[k] = std::move(j);
  };
  put("A_odd", pr.A_odd);
  put("B_even", pr.B_even);
  put("X_even", pr.X_even);
  put("P_odd", pr.P_odd);
  put("B_odd", pr.B_odd);
  put("P_even", pr.P_even);
  a.details["parity"] = std::move(pj);

  const PsiSolution psi = build_psi(ctx, a);
  psi_verdicts(ctx, psi, a);
  const double sym = symmetry_error(psi);
  const double sym_limit = 100.0 * ctx.tol;
  a.add(make_verdict("symmetry", sym <= sym_limit, sym, 0.0,
                     "max ‖Ψ(-t) - Ψ(t)‖ over the grid, limit " + format_number(sym_limit)));
  const TwoSidedC2 c2 = check_C2_two_sided(*ctx.X, psi, ctx.cert, cfg.report());
  Verdict c2v = c2.ends.negative.worst_value >= c2.ends.positive.worst_value ? c2.ends.negative : c2.ends.positive;
  c2v.pass = c2.ends.pass();
  c2v.note = "both half-axes; worst end reported";
  a.add(c2v);
  const EquivalenceMap map = build_map(*ctx.X, psi);
  a.details["map"] = map_json(map);
  const auto x0 = initial_at_t2(ctx, map.t2);
  a.add(round_trip_verdict(map, x0));
  ReportOptions ro;
  ro.tol = cfg.report();
  ro.integrator_tol = cfg.x_tol;
  const BiequivalenceReport rep = biequivalence_report(ctx.A, ctx.B, map, x0, ctx.horizon, ro);
  a.add(rep.verdict);
  Json ends = Json::object();
  ends["negative"] = to_json(rep.ends.negative);
  ends["positive"] = to_json(rep.ends.positive);
  a.details["biequivalence_ends"] = std::move(ends);
  a.tables.emplace_back("psi", psi_table(psi));
  a.tables.emplace_back("equiv", gap_table(rep.t, rep.gaps));
  return a;
}

Artifacts run_quasi(const Scenario& s, const RunConfig& cfg) {
  const QuasiContext q = prepare_quasi(s, cfg);
  Artifacts a;
  a.details["spectral"] = spectral_json(q.spec);
  quasi_conditions(q, {"C3", "C4", "C5", "Eq14"}, cfg, a);
  const double hu = std::min(q.horizon, quasi_horizon_limit(q.spec));
  a.details["solution_horizon"] = number(hu);
  const std::vector<Vector> initial = s.initial.empty() ? basis(s.dim) : s.initial;
  Json limits = Json::array();
  CsvTable table;
  table.header.push_back("t");
  std::vector<std::vector<double>> cols;
  std::vector<double> tgrid;
  for (std::size_t k = 0; k < initial.size(); ++k) {
    const auto rep = asymptotic_representation(q.C, q.f, initial[k], hu, q.tol, q.spec, q.eta);
    const LimitVector lim = c_u_limit(rep.state, q.spec, q.eta);
    double worst = 0.0, worst_t = rep.state.u.t_begin();
    for (std::size_t i = 0; i < rep.state.u.size(); ++i) {
      const double un = rep.state.u.states()[i].norm();
      if (un / rep.state.gronwall_bound > worst) {
        worst = un / rep.state.gronwall_bound;
        worst_t = rep.state.u.times()[i];
      }
    }
    a.add(make_verdict("gronwall", worst <= 1.0 + 10.0 * q.tol, worst, worst_t,
                          "max |u(t)| / (|u0| e^{k1 L}); slack 10*tol for integration error"));
    const GapCurve gap = quasi_equivalence_gap(q.C, q.f, rep.state, lim, cfg.report());
    a.add(gap.verdict);
    Json j = Json::object();
    j["initial"] = to_json(initial[k]);
    j["c_u"] = to_json(lim.c_u);
    j["tail_bound"] = number(lim.tail_bound);
    j["gronwall_bound"] = number(rep.state.gronwall_bound);
    j["L_gronwall"] = number(rep.state.L_gronwall);
    limits.push_back(std::move(j));
    if (tgrid.empty()) tgrid = gap.t;
    table.header.push_back("gap_" + std::to_string(k + 1));
    cols.push_back(gap.gap);
  }
  a.details["limits"] = std::move(limits);
  for (std::size_t i = 0; i < tgrid.size(); ++i) {
    std::vector<double> row{tgrid[i]};
    for (const auto& c : cols) row.push_back(c[i]);
    table.rows.push_back(std::move(row));
  }
  a.tables.emplace_back("quasi", std::move(table));
  return a;
}

namespace {

struct MappedSolution {
  Trajectory forward;
  std::optional<Trajectory> backward;
  double t2 = 0.0;
  Vector at(double t) const { return t >= t2 || !backward ? forward.at(t) : backward->at(t); }
};

MappedSolution mapped_solution(const LinearContext& ctx, const EquivalenceMap& map, const Vector& c, double lo,
                               double hi) {
  const MatrixFunction ab = ctx.A + ctx.B;
  const Vector y0 = map.M * x_at(ctx, map.t2, c);
  MappedSolution m;
  m.t2 = map.t2;
  m.forward = integrate(ab, y0, map.t2, hi, ctx.psi_options.tol * 1e-2);
  if (lo < map.t2) m.backward = integrate(ab, y0, map.t2, lo, ctx.psi_options.tol * 1e-2);
  return m;
}

APSignal reference_signal(const Scenario& s, const LinearContext& ctx, const Vector& c) {
  if (s.run.ap) return s.signal(*s.run.ap)->signal;
  if (!ctx.A.is_constant())
    throw InputError("classify needs run.ap when A is not constant (no closed-form AP reference)");
  return ap_signal_of(ctx.A(0.0), c);
}

void classify_solutions(const Scenario& s, const LinearContext& ctx, const EquivalenceMap& map, double tol,
                        Artifacts& a) {
  const double hi = ctx.horizon;
  const double lo = ctx.two_sided ? -hi : 0.0;
  CsvTable table;
  table.header.push_back("t");
  std::vector<std::vector<double>> cols;
  std::vector<double> tgrid;
  for (std::size_t k = 0; k < ctx.initial.size(); ++k) {
    const MappedSolution y = mapped_solution(ctx, map, ctx.initial[k], lo, hi);
    const APSignal g = reference_signal(s, ctx, ctx.initial[k]);
    const DecompositionReport r =
        classify([&y](double t) { return y.at(t); }, lo, hi, g, tol, ctx.two_sided, 2001);
    Verdict v = r.verdict;
    v.note = "solution " + std::to_string(k + 1) + ": " + v.note;
    a.add(v);
    Json j = Json::object();
    j["classification"] = std::string(to_string(r.classification));
    j["sup_residual"] = number(r.sup_residual);
    j["final_window_max"] = number(r.positive.final_max);
    j["census_hits"] = r.census.hits.size();
    j["census_max_gap"] = number(r.census.max_gap);
    a.details["classification"].push_back(std::move(j));
    if (tgrid.empty()) tgrid = r.t;
    table.header.push_back("residual_" + std::to_string(k + 1));
    cols.push_back(r.residual);
  }
  for (std::size_t i = 0; i < tgrid.size(); ++i) {
    std::vector<double> row{tgrid[i]};
    for (const auto& c : cols) row.push_back(c[i]);
    table.rows.push_back(std::move(row));
  }
  a.tables.emplace_back("classify", std::move(table));
}

EquivalenceMap identity_map(int n) {
  EquivalenceMap m;
  m.M = Matrix::Identity(n, n);
  m.M_inv = m.M;
  return m;
}

}  // namespace

Artifacts run_classify(const Scenario& s, const RunConfig& cfg) {
  const LinearContext ctx = prepare_linear(s, cfg);
  Artifacts a;
  EquivalenceMap map = identity_map(s.dim);
  if (!ctx.B.is_zero()) {
    a.add(c1_verdict(ctx));
    const PsiSolution psi = build_psi(ctx, a);
    map = build_map(*ctx.X, psi);
  }
  a.details["map"] = map_json(map);
  a.details["classification"] = Json::array();
  classify_solutions(s, ctx, map, cfg.report(), a);
  return a;
}

Artifacts run_example(int which, const BuiltinParams& params, const RunConfig& cfg) {
  switch (which) {
    case 1:
      return run_equiv(builtin("example1", params), cfg);
    case 2: {
      const Scenario s = builtin("example2", params);
      RunConfig c = cfg;
      c.report_tol = cfg.report(1e-3);
      Artifacts a = run_equiv(s, c);
      const LinearContext ctx = prepare_linear(s, c);
      const PsiSolution psi = psi_series(ctx.P->as_function(), ctx.cert, ctx.psi_options);
      const EquivalenceMap map = build_map(*ctx.X, psi);
      // c with zero fifth coordinate: the bounded family
      std::vector<Vector> family;
      for (const auto& v : ctx.initial)
        if (v(4) == 0.0) family.push_back(x_at(ctx, map.t2, v));
      const int rank = transported_rank(map, family);
      a.add(make_verdict("family_rank", rank == 4, rank, map.t2, "rank of the transported family with c5 = 0"));
      for (std::size_t k = 0; k < ctx.initial.size(); ++k) {
        const MappedSolution y = mapped_solution(ctx, map, ctx.initial[k], 0.0, ctx.horizon);
        double first = 0.0, second = 0.0;
        for (int i = 0; i <= 600; ++i) {
          const double t = ctx.horizon * i / 600;
          double& slot = t <= 0.5 * ctx.horizon ? first : second;
          slot = std::max(slot, y.at(t).norm());
        }
        a.add(make_verdict("bounded", std::isfinite(second) && second <= first * (1.0 + 1e-6), second, ctx.horizon,
                           "solution " + std::to_string(k + 1) + ": sup over [T/2, T] vs sup over [0, T/2]"));
      }
      a.details["classification"] = Json::array();
      classify_solutions(s, ctx, map, c.report(), a);
      return a;
    }
    case 3: {
      RunConfig c = cfg;
      c.report_tol = cfg.report(1e-3);
      return run_biasym(builtin("example3", params), c);
    }
    default:
      throw InputError("example must be 1, 2 or 3");
  }
}

}  // namespace aeq
