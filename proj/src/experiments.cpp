#include "rpsim/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

#include "rpsim/bosonic.hpp"
#include "rpsim/errors.hpp"
#include "rpsim/molecules.hpp"
#include "rpsim/sensitivity.hpp"
#include "rpsim/state_search.hpp"
#include "rpsim/units.hpp"

namespace rpsim {

namespace {

// T_E, or +inf when entanglement outlives the trajectory.
double lifetime_or_inf(const Trajectory& tr) {
  try {
    return entanglement_lifetime(tr);
  } catch (const ConvergenceError&) {
    return std::numeric_limits<double>::infinity();
  }
}

using json = nlohmann::json;

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

// One plot-data file: x column, one column per series.
struct Table {
  std::string file;
  std::string x_label;
  std::vector<double> x;
  std::vector<std::pair<std::string, std::vector<double>>> series;
  std::map<std::string, std::string> metadata;
};

void write_table(const std::filesystem::path& path, const Table& t) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  for (const auto& [k, v] : t.metadata) os << "# " << k << ": " << v << "\n";
  os << t.x_label;
  for (const auto& [name, v] : t.series) os << "," << name;
  os << "\n" << std::setprecision(12);
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    os << t.x[i];
    for (const auto& [name, v] : t.series) os << "," << v[i];
    os << "\n";
  }
}

const std::vector<double> kFig1Fields{0.5, 8.0};

struct Molecule {
  MoleculeFile file;
  RadicalSpec r1, r2;
};

Molecule load_config_molecule(const ExperimentConfig& c) {
  Molecule m;
  m.file = load_molecule_file(resolve_molecule_path(c.molecule));
  m.r1 = m.file.radical1;
  m.r2 = m.file.radical2;
  if (c.truncate > 0) {
    m.r1 = truncate_bath(m.r1, c.truncate);
    m.r2 = truncate_bath(m.r2, c.truncate);
  }
  return m;
}

std::map<std::string, std::string> base_metadata(const ExperimentConfig& c, const Molecule* m) {
  std::map<std::string, std::string> md;
  md["experiment"] = c.experiment;
  md["scale"] = scale_name(c.scale);
  md["seed"] = std::to_string(c.seed);
  md["tol"] = num(c.tol);
  md["field_step_mT"] = num(c.field_step_mT);
  md["k_per_s"] = num(c.k_per_s);
  md["tau_c_ns"] = num(c.tau_c_ns);
  md["tau_a_ns"] = num(c.tau_a_ns);
  md["bath"] = c.bath;
  md["pulse_target"] = c.pulse_target;
  if (m) {
    md["molecule"] = m->file.name;
    md["molecule_checksum"] = format_checksum(m->file.checksum);
    md["truncate"] = std::to_string(c.truncate);
    md["dims"] = std::to_string(m->r1.hilbert_dim()) + "x" + std::to_string(m->r2.hilbert_dim());
  }
  return md;
}

// Invariant spot checks on a setup at one field value.
void check_setup(const RadicalPairSetup& s, double field_mT, std::vector<std::string>& failures) {
  const std::string where = s.protocol.name + " at B=" + num(field_mT) + " mT";
  try {
    const auto sched = s.schedule(field_mT);
    const auto pulses = s.pulses();
    BathStrategy bath = s.options.bath;
    for (int idx = 1; idx <= 2; ++idx) {
      const auto& r = idx == 1 ? s.radical1 : s.radical2;
      auto ch = tomograph_channel(r, sched, pulses, 1.0, bath, idx, s.options.tol);
      if (!uses_sampling(r, bath)) check_channel(ch);
    }
    const double y = pair_singlet_yield(s, field_mT).value;
    if (!(y >= -1e-9 && y <= 1.0 + 1e-9))
      failures.push_back(where + ": singlet yield " + num(y) + " outside [0, 1]");
  } catch (const InvariantError& e) {
    failures.push_back(where + ": " + e.what());
  }
}

void check_trajectory(const Trajectory& tr, const std::string& label,
                      std::vector<std::string>& failures) {
  for (std::size_t j = 0; j < tr.times.size(); ++j) {
    const double eps = entanglement_lower_bound(tr.f_s[j]);
    if (eps > tr.E[j] + 1e-9) {
      failures.push_back(label + ": lower bound exceeds concurrence at t=" + num(tr.times[j]));
      return;
    }
  }
}

struct Runner {
  const ExperimentConfig& c;
  bool check;
  ExperimentOutput out;

  void emit(Table t, const Molecule* m) {
    auto md = base_metadata(c, m);
    for (auto& [k, v] : t.metadata) md[k] = v;
    t.metadata = md;
    const auto path = c.out_dir / t.file;
    write_table(path, t);
    out.files.push_back(path);
  }

  void maybe_check(const Molecule& m, const std::string& protocol, double b) {
    if (!check) return;
    check_setup(setup_from_config(c, protocol), b, out.check_failures);
    (void)m;
  }

  void lambda_vs_field(const std::string& file) {
    const auto m = load_config_molecule(c);
    Table t{file, "B_mT", c.fields_mT, {}, {{"protocols", join(c.protocols)}}};
    SweepQuantities q;
    q.yield = false;
    q.lambda = true;
    for (const auto& p : c.protocols) {
      const auto s = setup_from_config(c, p);
      const auto r = field_sweep(s, c.fields_mT, q, c.field_step_mT);
      t.series.emplace_back("Lambda[" + p + "]", r.values.at("Lambda"));
      maybe_check(m, p, c.fields_mT[c.fields_mT.size() / 2]);
    }
    emit(t, &m);
  }

  void fig1b() {
    const auto m = load_config_molecule(c);
    const auto s = setup_from_config(c, "N");
    const auto csp = setup_from_config(c, "CS-P");
    const std::size_t n = c.fields_mT.size();
    std::vector<double> lam_s(n), lam_t0(n), lam_sep(n), lam_rc(n), lam_csp(n);
    std::vector<double> sep_is_rc(n);
    std::vector<StateFamily> fams;
    for (const auto& f : c.families) fams.push_back({family_from_name(f), c.seed});
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < n; ++i) {
      const double b = c.fields_mT[i];
      const auto d = response_derivative(s, b, c.field_step_mT);
      lam_s[i] = d.sensitivity(singlet_state());
      lam_t0[i] = d.sensitivity(triplet_zero_state());
      lam_rc[i] = d.sensitivity(classical_mixture_state());
      double best = 0.0;
      bool rc = true;
      for (const auto& f : fams) {
        const auto o = optimal_sensitivity(f, c.n_samples, d);
        if (std::abs(o.lambda) > std::abs(best)) {
          best = o.lambda;
          rc = o.winner_is_rho_c;
        }
      }
      lam_sep[i] = best;
      sep_is_rc[i] = rc ? 1.0 : 0.0;
      RadicalPairSetup p = csp;
      p.initial = classical_mixture_state();
      lam_csp[i] = field_sensitivity(p, b, c.field_step_mT).value;
    }
    Table t{"fig1b.csv", "B_mT", c.fields_mT, {}, {{"families", join(c.families)},
                                                   {"n_samples", std::to_string(c.n_samples)}}};
    t.series = {{"Lambda[N]", lam_s},   {"Lambda[T0]", lam_t0},     {"Lambda[Sep]", lam_sep},
                {"Lambda[rho_c]", lam_rc}, {"Lambda[CS-P]", lam_csp}, {"sep_winner_is_rho_c", sep_is_rc}};
    maybe_check(m, "N", c.fields_mT[n / 2]);
    emit(t, &m);
  }

  void fig2a() {
    const auto m = load_config_molecule(c);
    const auto s = setup_from_config(c, "N");
    SweepQuantities q;
    q.yield = false;
    q.lambda = true;
    q.lambda_e = true;
    const auto r = field_sweep(s, c.fields_mT, q, c.field_step_mT);
    Table t{"fig2a.csv", "B_mT", c.fields_mT,
            {{"Lambda", r.values.at("Lambda")}, {"Lambda_E", r.values.at("Lambda_E")}}, {}};
    maybe_check(m, "N", c.fields_mT[c.fields_mT.size() / 2]);
    emit(t, &m);
  }

  void fig2b() {
    const auto m = load_config_molecule(c);
    const auto s = setup_from_config(c, "N");
    const auto r = lifetime_scan(s, c.fields_mT);
    const auto& te = r.values.at("T_E");
    std::string jumps;
    for (const auto& j : detect_jumps(c.fields_mT, te, 0.5))
      jumps += "[" + num(j.x_before) + "," + num(j.x_after) + "]:" + num(j.before) + "->" +
               num(j.after) + " ";
    Table t{"fig2b.csv", "B_mT", c.fields_mT, {{"T_E_ns", te}}, {{"jumps", jumps}}};
    maybe_check(m, "N", c.fields_mT[c.fields_mT.size() / 2]);
    emit(t, &m);
  }

  void angular(const std::string& file) {
    const auto m = load_config_molecule(c);
    const double b = c.fields_mT.at(0);
    Table t{file, "theta_rad", c.thetas_rad, {}, {{"B_mT", num(b)}, {"protocols", join(c.protocols)}}};
    for (const auto& p : c.protocols) {
      const auto s = setup_from_config(c, p);
      const auto r = angular_sweep(s, b, c.thetas_rad);
      const auto& y = r.values.at("Phi_s");
      t.series.emplace_back("Phi_s[" + p + "]", y);
      t.metadata["visibility[" + p + "]"] = num(visibility(y));
      maybe_check(m, p, b);
    }
    emit(t, &m);
  }

  void entdyn() {
    const auto m = load_config_molecule(c);
    const double b = c.fields_mT.at(0);
    for (const auto& p : c.protocols) {
      const auto s = setup_from_config(c, p);
      const auto tr = pair_trajectory(s, b, s.initial);
      Table t{"si-entdyn-" + p + ".csv", "t_ns", tr.times, {}, {{"B_mT", num(b)}, {"protocol", p}}};
      std::vector<double> eps(tr.f_s.size());
      for (std::size_t j = 0; j < eps.size(); ++j) eps[j] = entanglement_lower_bound(tr.f_s[j]);
      t.series = {{"f_s", tr.f_s}, {"E", tr.E}, {"epsilon_bound", eps}};
      t.metadata["T_E_ns"] = num(lifetime_or_inf(tr));
      if (check) check_trajectory(tr, p, out.check_failures);
      maybe_check(m, p, b);
      emit(t, &m);
    }
  }

  void lambda_e() {
    const auto m = load_config_molecule(c);
    const auto s = setup_from_config(c, "N");
    SweepQuantities q;
    q.yield = false;
    q.phi_e = true;
    q.lambda_e = true;
    const auto r = field_sweep(s, c.fields_mT, q, c.field_step_mT);
    Table t{"si-lambdaE.csv", "B_mT", c.fields_mT,
            {{"Phi_E", r.values.at("Phi_E")}, {"Lambda_E", r.values.at("Lambda_E")}}, {}};
    maybe_check(m, "N", c.fields_mT[c.fields_mT.size() / 2]);
    emit(t, &m);
  }

  void pe() {
    const auto m = load_config_molecule(c);
    const auto s = setup_from_config(c, "N");
    for (double b : c.fields_mT) {
      const auto acc = accumulated_sensitivity(s, b, c.field_step_mT);
      const auto tr = pair_trajectory(s, b, s.initial, default_grid(s, b + c.field_step_mT));
      Table t{"si-pe-B" + num(b) + ".csv", "t_ns", acc.times,
              {{"Lambda_accumulated", acc.lambda}, {"E", tr.E}},
              {{"B_mT", num(b)}, {"T_E_ns", num(lifetime_or_inf(tr))},
               {"reaction_time_ns", num(reaction_time(s, b, c.field_step_mT))}}};
      if (check) check_trajectory(tr, "B=" + num(b), out.check_failures);
      emit(t, &m);
    }
  }

  void bosonic() {
    Table t{"si-bosonic.csv", "B_mT", c.fields_mT, {}, {}};
    t.metadata["model"] = "bosonic";
    t.metadata["kappa0"] = num(c.kappa0);
    t.metadata["hbar"] = num(units::codata2018::kHbar);
    t.metadata["k_B"] = num(units::codata2018::kBoltzmann);
    t.metadata["gamma_e_si"] = num(units::gamma_e_si());
    for (double temp : c.temperatures_K) {
      std::vector<double> lim, lam, te;
      for (double b : c.fields_mT) {
        BathParams p{temp, c.kappa0, b};
        lim.push_back(bosonic_sensitivity_limit(p));
        const double h = 1e-4 * b;
        BathParams up{temp, c.kappa0, b + h}, dn{temp, c.kappa0, b - h};
        lam.push_back((bosonic_yield(up, c.k_per_s) - bosonic_yield(dn, c.k_per_s)) / (2 * h));
        te.push_back(c.kappa0 * bosonic_entanglement_lifetime(p));
        if (check) {
          const double e1 = bosonic_entanglement(p, 0.3 / p.gamma());
          const double e2 = concurrence(bosonic_state(p, 0.3 / p.gamma()));
          if (std::abs(e1 - e2) > 1e-10)
            out.check_failures.push_back("bosonic concurrence mismatch at B=" + num(b));
        }
      }
      const std::string tag = "[T=" + num(temp) + "K]";
      t.series.emplace_back("Lambda_limit" + tag, lim);
      t.series.emplace_back("Lambda" + tag, lam);
      t.series.emplace_back("kappa0_T_E" + tag, te);
      t.metadata["sign_change_T" + tag] = num(sensitivity_sign_change(temp));
    }
    if (!c.molecule.empty()) {
      const auto m = load_config_molecule(c);
      SweepQuantities q;
      q.yield = false;
      q.lambda = true;
      const auto r = field_sweep(setup_from_config(c, "N"), c.fields_mT, q, c.field_step_mT);
      t.series.emplace_back("Lambda[nuclear]", r.values.at("Lambda"));
      emit(t, &m);
    } else {
      emit(t, nullptr);
    }
  }

  void census() {
    const auto m = load_config_molecule(c);
    const auto s = setup_from_config(c, c.protocols.at(0));
    std::vector<StateFamily> fams;
    for (const auto& f : c.families) fams.push_back({family_from_name(f), c.seed});
    const double b = c.fields_mT.at(0);
    const auto res = visibility_census(fams, c.n_samples, s, b, c.thetas_rad);
    std::vector<double> idx, vis, conc, pur, fam;
    for (const auto& e : res.entries) {
      idx.push_back(static_cast<double>(e.index));
      vis.push_back(e.visibility);
      conc.push_back(e.concurrence);
      pur.push_back(e.purity);
      fam.push_back(static_cast<double>(family_from_name(e.family)));
    }
    Table t{"si-visibility.csv", "index", idx,
            {{"family_id", fam}, {"visibility", vis}, {"concurrence", conc}, {"purity", pur}},
            {{"B_mT", num(b)},
             {"V_singlet", num(res.singlet_visibility)},
             {"fraction_at_least_singlet", num(res.fraction_at_least_singlet())},
             {"families", join(c.families)},
             {"n_samples", std::to_string(c.n_samples)},
             {"n_theta", std::to_string(c.thetas_rad.size())}}};
    maybe_check(m, s.protocol.name, b);
    emit(t, &m);
  }
};

}  // namespace

Scale scale_from_name(const std::string& name) {
  if (name == "ci") return Scale::ci;
  if (name == "desk") return Scale::desk;
  if (name == "full") return Scale::full;
  throw ConfigError("scale must be ci, desk or full, got '" + name + "'");
}

std::string scale_name(Scale s) {
  switch (s) {
    case Scale::ci: return "ci";
    case Scale::desk: return "desk";
    case Scale::full: return "full";
  }
  return "ci";
}

const std::vector<ExperimentInfo>& list_experiments() {
  static const std::vector<ExperimentInfo> table{
      {"fig1a", "Fig. 1(a)", "Lambda(B) for N, Z, RB, RB-X on Py-DMA", "desk"},
      {"fig1b", "Fig. 1(b)", "Lambda(B) for singlet, T0, optimal separable, rho_c and CS-P", "desk"},
      {"fig2a", "Fig. 2(a)", "Lambda_E against Lambda over B", "desk"},
      {"fig2b", "Fig. 2(b)", "entanglement lifetime T_E(B) with jump detection", "long"},
      {"fig3a", "Fig. 3(a)", "Phi_s(theta) for N and pulses along the field at 46 uT", "desk"},
      {"fig3b", "Fig. 3(b)", "Phi_s(theta) for RB and RB-X at 46 uT", "desk"},
      {"fig4", "Fig. 4", "Phi_s(theta) at B = 0 with pulses every 100 ns", "desk"},
      {"si-entdyn", "SI entanglement decay", "E(t) and its lower bound under N, Z, X at 4.5 mT", "CI"},
      {"si-lambdaE", "SI Lambda_E(B)", "Phi_E and Lambda_E over B", "desk"},
      {"si-pe", "SI accumulated sensitivity", "Lambda(B, t) and E(t) at 3, 3.5, 4, 4.5 mT", "desk"},
      {"si-bosonic", "SI bosonic bath", "closed-form bath Lambda and kappa0 T_E against nuclear Lambda", "CI"},
      {"si-visibility", "SI visibility statistics", "visibility census of random separable states", "desk"},
  };
  return table;
}

ExperimentConfig default_config(const std::string& experiment, Scale scale) {
  const auto& list = list_experiments();
  if (std::none_of(list.begin(), list.end(), [&](const auto& e) { return e.name == experiment; }))
    throw ConfigError("unknown experiment '" + experiment + "'; run 'rpsim list' for the table");
  ExperimentConfig c;
  c.experiment = experiment;
  c.scale = scale;
  const bool ci = scale == Scale::ci;
  const std::size_t nb = ci ? 16 : scale == Scale::desk ? 31 : 76;
  const std::size_t nth = ci ? 13 : 49;
  const std::size_t trunc_pd = ci ? 3 : 0;

  if (experiment.rfind("fig1", 0) == 0 || experiment.rfind("fig2", 0) == 0 ||
      experiment == "si-entdyn" || experiment == "si-lambdaE" || experiment == "si-pe" ||
      experiment == "si-bosonic") {
    c.molecule = "py_dma";
    c.truncate = trunc_pd;
    c.k_per_s = 5.8e8;
    c.tau_c_ns = 0.5;
    c.tau_a_ns = 0.5;
    c.fields_mT = linspace(0.5, 8.0, nb);
    c.protocols = {"N"};
  } else {
    c.molecule = "fadh_o2_standin";
    c.truncate = ci ? 3 : 0;
    c.k_per_s = 5e5;
    c.tau_c_ns = 10.0;
    c.tau_a_ns = 10.0;
    c.fields_mT = {0.046};
    c.thetas_rad = linspace(0.0, units::kPi, nth);
    c.field_step_mT = 0.0005;
  }

  if (experiment == "fig1a") {
    c.protocols = {"N", "Z", "RB", "RB-X"};
  } else if (experiment == "fig1b") {
    c.families = {"product", "incoherent"};
    c.n_samples = ci ? 100 : scale == Scale::desk ? 500 : 5000;
  } else if (experiment == "fig2b") {
    c.fields_mT = linspace(0.5, 8.0, ci ? 16 : scale == Scale::desk ? 61 : 151);
  } else if (experiment == "fig3a") {
    c.protocols = {"N", "Z"};
  } else if (experiment == "fig3b") {
    c.protocols = {"RB", "RB-X"};
  } else if (experiment == "fig4") {
    c.protocols = {"N", "QC-only"};
    c.fields_mT = {0.0};
    c.tau_c_ns = 100.0;
  } else if (experiment == "si-entdyn") {
    c.protocols = {"N", "Z", "X"};
    c.fields_mT = {4.5};
  } else if (experiment == "si-pe") {
    c.fields_mT = {3.0, 3.5, 4.0, 4.5};
  } else if (experiment == "si-bosonic") {
    c.temperatures_K = {1.0, 1.5};
    c.kappa0 = 1.0;
    c.truncate = 3;
  } else if (experiment == "si-visibility") {
    c.protocols = {"N"};
    c.families = {"product", "incoherent"};
    c.n_samples = ci ? 20 : 200;
  }
  c.out_dir = std::filesystem::path("out") / experiment;
  return c;
}

void ExperimentConfig::validate() const {
  const std::string where = source.empty() ? std::string("config") : source;
  auto fail = [&](const std::string& field, const std::string& msg) {
    throw ConfigError(where + ": " + field + ": " + msg);
  };
  const auto& list = list_experiments();
  if (std::none_of(list.begin(), list.end(), [&](const auto& e) { return e.name == experiment; }))
    fail("experiment", "unknown experiment '" + experiment + "'");
  if (!molecule.empty()) {
    try {
      resolve_molecule_path(molecule);
    } catch (const ConfigError& e) {
      fail("molecule", e.what());
    }
  }
  for (const auto& p : protocols) {
    const auto& names = protocol_names();
    if (std::find(names.begin(), names.end(), p) == names.end())
      fail("protocols", "unknown protocol '" + p + "'");
  }
  if (!(k_per_s > 0.0) || !std::isfinite(k_per_s)) fail("k_per_s", "must be positive");
  if (!(tau_c_ns > 0.0)) fail("tau_c_ns", "must be positive");
  if (!(tau_a_ns > 0.0)) fail("tau_a_ns", "must be positive");
  auto ascending = [&](const std::vector<double>& g, const std::string& name, double lo) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!std::isfinite(g[i]) || g[i] < lo) fail(name, "entry " + std::to_string(i) + " out of range");
      if (i > 0 && !(g[i] > g[i - 1])) fail(name, "grid must ascend strictly");
    }
  };
  ascending(fields_mT, "fields_mT", 0.0);
  ascending(thetas_rad, "thetas_rad", 0.0);
  for (double t : thetas_rad)
    if (t > units::kPi + 1e-12) fail("thetas_rad", "angles must lie in [0, pi]");
  for (double t : temperatures_K)
    if (!(t > 0.0)) fail("temperatures_K", "must be positive");
  for (const auto& f : families) {
    try {
      family_from_name(f);
    } catch (const ConfigError& e) {
      fail("families", e.what());
    }
  }
  if (!families.empty() && n_samples == 0) fail("n_samples", "must be positive with families");
  if (!(tol > 0.0)) fail("tol", "must be positive");
  if (!(field_step_mT > 0.0)) fail("field_step_mT", "must be positive");
  if (bath != "auto" && bath != "exact" && bath != "sampled")
    fail("bath", "must be auto, exact or sampled");
  if (bath_samples == 0) fail("bath_samples", "must be positive");
  if (pulse_target != "both" && pulse_target != "electron1" && pulse_target != "electron2")
    fail("pulse_target", "must be both, electron1 or electron2");
  if (!(kappa0 > 0.0)) fail("kappa0", "must be positive");
}

namespace {

std::vector<double> read_grid(const json& j, const std::string& field, const std::string& src) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.is_object() && j.contains("from") && j.contains("to") && j.contains("n")) {
    const auto n = j["n"].get<std::size_t>();
    if (n == 0) throw ConfigError(src + ": " + field + ": n must be at least 1");
    return linspace(j["from"].get<double>(), j["to"].get<double>(), n);
  }
  throw ConfigError(src + ": " + field + ": expected an array or {from, to, n}");
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("experiment"))
    throw ConfigError(source + ": experiment: required key missing");
  ExperimentConfig c;
  try {
    const std::string name = j["experiment"].get<std::string>();
    const Scale scale = scale_from_name(j.value("scale", std::string("ci")));
    c = default_config(name, scale);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": experiment: " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(source + ": experiment: " + e.what());
  }
  c.source = source;
  static const std::vector<std::string> known{
      "experiment", "scale", "molecule", "truncate", "protocols", "k_per_s", "tau_c_ns",
      "tau_a_ns", "fields_mT", "thetas_rad", "families", "n_samples", "temperatures_K", "kappa0",
      "seed", "tol", "field_step_mT", "bath", "bath_samples", "fixed_lab_perpendicular",
      "pulse_target", "out"};
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw ConfigError(source + ": " + k + ": unknown key");
  try {
    if (j.contains("molecule")) c.molecule = j["molecule"].get<std::string>();
    if (j.contains("truncate")) c.truncate = j["truncate"].get<std::size_t>();
    if (j.contains("protocols")) c.protocols = j["protocols"].get<std::vector<std::string>>();
    if (j.contains("k_per_s")) c.k_per_s = j["k_per_s"].get<double>();
    if (j.contains("tau_c_ns")) c.tau_c_ns = j["tau_c_ns"].get<double>();
    if (j.contains("tau_a_ns")) c.tau_a_ns = j["tau_a_ns"].get<double>();
    if (j.contains("fields_mT")) c.fields_mT = read_grid(j["fields_mT"], "fields_mT", source);
    if (j.contains("thetas_rad")) c.thetas_rad = read_grid(j["thetas_rad"], "thetas_rad", source);
    if (j.contains("families")) c.families = j["families"].get<std::vector<std::string>>();
    if (j.contains("n_samples")) c.n_samples = j["n_samples"].get<std::size_t>();
    if (j.contains("temperatures_K")) c.temperatures_K = j["temperatures_K"].get<std::vector<double>>();
    if (j.contains("kappa0")) c.kappa0 = j["kappa0"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("tol")) c.tol = j["tol"].get<double>();
    if (j.contains("field_step_mT")) c.field_step_mT = j["field_step_mT"].get<double>();
    if (j.contains("bath")) c.bath = j["bath"].get<std::string>();
    if (j.contains("bath_samples")) c.bath_samples = j["bath_samples"].get<std::size_t>();
    if (j.contains("fixed_lab_perpendicular"))
      c.fixed_lab_perpendicular = j["fixed_lab_perpendicular"].get<bool>();
    if (j.contains("pulse_target")) c.pulse_target = j["pulse_target"].get<std::string>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str(), path.string());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["scale"] = scale_name(c.scale);
  j["molecule"] = c.molecule;
  j["truncate"] = c.truncate;
  j["protocols"] = c.protocols;
  j["k_per_s"] = c.k_per_s;
  j["tau_c_ns"] = c.tau_c_ns;
  j["tau_a_ns"] = c.tau_a_ns;
  j["fields_mT"] = c.fields_mT;
  j["thetas_rad"] = c.thetas_rad;
  j["families"] = c.families;
  j["n_samples"] = c.n_samples;
  j["temperatures_K"] = c.temperatures_K;
  j["kappa0"] = c.kappa0;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["field_step_mT"] = c.field_step_mT;
  j["bath"] = c.bath;
  j["bath_samples"] = c.bath_samples;
  j["fixed_lab_perpendicular"] = c.fixed_lab_perpendicular;
  j["pulse_target"] = c.pulse_target;
  j["out"] = c.out_dir.string();
  return j.dump(2);
}

RadicalPairSetup setup_from_config(const ExperimentConfig& c, const std::string& protocol) {
  const auto m = load_config_molecule(c);
  RadicalPairSetup s;
  s.radical1 = m.r1;
  s.radical2 = m.r2;
  s.protocol = protocol_by_name(protocol, c.tau_c_ns, c.tau_a_ns, c.fixed_lab_perpendicular);
  if (s.protocol.pulses && protocol != "CS-P") {
    if (c.pulse_target == "electron1") s.protocol.pulses->target = PulseTarget::electron1;
    if (c.pulse_target == "electron2") s.protocol.pulses->target = PulseTarget::electron2;
  }
  s.reencounter.rate_per_s = c.k_per_s;
  s.options.tol = c.tol;
  if (c.bath == "exact") s.options.bath = BathStrategy::exact();
  if (c.bath == "sampled") s.options.bath = BathStrategy::sampled(c.bath_samples, c.seed);
  s.validate();
  return s;
}

ExperimentOutput run_experiment(const ExperimentConfig& config, bool check) {
  config.validate();
  const std::string where = config.source.empty() ? config.experiment : config.source;
  Runner r{config, check, {}};
  try {
    std::filesystem::create_directories(config.out_dir);
    const auto& e = config.experiment;
    if (e == "fig1a") r.lambda_vs_field("fig1a.csv");
    else if (e == "fig1b") r.fig1b();
    else if (e == "fig2a") r.fig2a();
    else if (e == "fig2b") r.fig2b();
    else if (e == "fig3a" || e == "fig3b" || e == "fig4") r.angular(e + ".csv");
    else if (e == "si-entdyn") r.entdyn();
    else if (e == "si-lambdaE") r.lambda_e();
    else if (e == "si-pe") r.pe();
    else if (e == "si-bosonic") r.bosonic();
    else if (e == "si-visibility") r.census();
  } catch (const ConfigError& ex) {
    throw ConfigError(where + ": " + ex.what());
  } catch (const InvariantError& ex) {
    throw InvariantError(where + ": " + ex.what());
  } catch (const ConvergenceError& ex) {
    throw ConvergenceError(where + ": " + ex.what());
  } catch (const std::filesystem::filesystem_error& ex) {
    throw ConfigError(where + ": " + ex.what());
  }

  const auto cfg_path = config.out_dir / "config.json";
  {
    std::ofstream os(cfg_path);
    os << config_to_json(config) << "\n";
  }
  json manifest;
  manifest["experiment"] = config.experiment;
  manifest["config"] = cfg_path.filename().string();
  std::vector<std::string> files;
  for (const auto& f : r.out.files) files.push_back(f.filename().string());
  manifest["files"] = files;
  manifest["checked"] = check;
  manifest["check_failures"] = r.out.check_failures;
  manifest["created_unix"] = std::chrono::duration_cast<std::chrono::seconds>(
                                 std::chrono::system_clock::now().time_since_epoch())
                                 .count();
  const auto man_path = config.out_dir / "manifest.json";
  std::ofstream(man_path) << manifest.dump(2) << "\n";
  r.out.files.push_back(cfg_path);
  r.out.files.push_back(man_path);
  return r.out;
}

}  // namespace rpsim
