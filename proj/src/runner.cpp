#include "pptaxis/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "pptaxis/kernels.hpp"
#include "pptaxis/solver_imex.hpp"
#include "pptaxis/solver_picard.hpp"

namespace pptaxis {

namespace fs = std::filesystem;

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> sorted_unique(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::string snapshot_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snapshot_%03zu.csv", k);
  return buf;
}

// A json number, or null when non-finite (JSON has no inf/nan).
nlohmann::ordered_json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

std::string verdict_word(const RunOutcome& o) {
  if (o.outcome == "completed") return "pass";
  return o.outcome;
}

std::string bounds_report_text(const RunOutcome& o, const RunSpec& spec, const DerivedConstants& dc) {
  std::ostringstream os;
  os << "verdict: " << verdict_word(o) << "\n";
  os << "exit_status: " << o.exit_code << "\n";
  if (o.trace) {
    os << "termination: " << to_string(o.trace->termination) << "\n";
    os << "termination_time: " << format_double(o.trace->termination_time) << "\n";
  }
  os << "bounds_asserted: " << (spec.observe.bounds ? "true" : "false") << "\n";
  os << "slack: " << format_double(spec.observe.slack) << "\n";
  os << "sigma: " << format_double(dc.sigma) << "\n";
  if (o.bounds) {
    for (const BoundCheck& b : o.bounds->bounds_checked) {
      os << "check " << b.name << ": bound=" << format_double(b.bound)
         << " observed=" << format_double(b.observed) << " first_violation="
         << (b.first_violation ? format_double(*b.first_violation) : std::string("none"))
         << (b.asserted ? "" : " (reported only)") << "\n";
    }
  }
  if (!o.message.empty()) os << "message: " << o.message << "\n";
  return os.str();
}

}  // namespace

std::string norms_csv(const std::vector<NormRecord>& records) {
  std::string out = "t,sup_u,min_u,sup_v,min_v,l2_u,l2_v,c2proxy_u,c2proxy_v,picard_iters\n";
  for (const NormRecord& r : records) {
    for (double x : {r.t, r.sup_u, r.min_u, r.sup_v, r.min_v, r.l2_u, r.l2_v, r.c2proxy_u, r.c2proxy_v}) {
      out += format_double(x);
      out += ',';
    }
    if (r.picard_iters) out += std::to_string(*r.picard_iters);
    out += '\n';
  }
  return out;
}

std::string snapshot_csv(const State& s) {
  const Grid& g = s.grid();
  std::string out = g.dim() == 1 ? "x,u,v\n" : "x,y,u,v\n";
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < g.cells(0); ++i)
      out += format_double(g.center(0, i)) + "," + format_double(s.u[i]) + "," + format_double(s.v[i]) + "\n";
  } else {
    for (std::size_t i = 0; i < g.cells(0); ++i)
      for (std::size_t j = 0; j < g.cells(1); ++j) {
        const std::size_t k = g.index(i, j);
        out += format_double(g.center(0, i)) + "," + format_double(g.center(1, j)) + "," +
               format_double(s.u[k]) + "," + format_double(s.v[k]) + "\n";
      }
  }
  return out;
}

RunOutcome run_main(const RunSpec& spec, const fs::path& out_dir) {
  RunOutcome o;
  std::optional<DerivedConstants> dc;
  try {
    validate(spec);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir.string());

    const State s0 = build_initial_state(spec);
    const InitialDataNorms norms = resolve_norms(spec, s0);
    dc = derive_constants(spec.model, norms, spec.norms.schauder_p);
    const AdmissibilityReport adm = check_taxis_admissible(spec.model, *dc);
    const PicardControl ctl = make_control(spec, *dc);

    const std::vector<double> snap_times = sorted_unique(spec.output.snapshot_times);
    std::size_t next_snap = 0;
    std::vector<double> snap_written;
    auto maybe_snapshot = [&](const State& s) {
      while (next_snap < snap_times.size() &&
             s.t >= snap_times[next_snap] - 1e-9 * std::max(1.0, snap_times[next_snap])) {
        write_file(out_dir / snapshot_name(next_snap), snapshot_csv(s));
        snap_written.push_back(s.t);
        ++next_snap;
      }
    };
    maybe_snapshot(s0);

    Observers obs;
    obs.record_stride = spec.observe.stride;
    obs.on_step = maybe_snapshot;

    NormTrace trace = spec.solver.kind == SolverChoice::imex ? run_imex(s0, spec.model, ctl.step, obs)
                                                             : run_picard(s0, spec.model, *dc, ctl, obs);
    NormRecord initial = measure(s0);
    if (spec.solver.kind == SolverChoice::picard) initial.picard_iters = 0;
    trace.records.insert(trace.records.begin(), initial);

    BoundMonitorOptions bopts;
    bopts.slack = spec.observe.slack;
    bopts.c2_horizon = spec.observe.c2_horizon;
    const BoundReport bounds = bound_monitor(trace, *dc, bopts);

    switch (trace.termination) {
      case Termination::completed:
        if (spec.observe.bounds && bounds.verdict == Verdict::violated) {
          o.exit_code = kExitViolation;
          o.outcome = "violated";
        } else {
          o.exit_code = kExitOk;
          o.outcome = "completed";
        }
        break;
      case Termination::blowup:
        o.exit_code = kExitBlowup;
        o.outcome = "blowup";
        break;
      case Termination::solver_failure:
        o.exit_code = kExitError;
        o.outcome = "solver_failure";
        break;
    }
    o.message = trace.message;

    write_file(out_dir / "norms.csv", norms_csv(trace.records));

    nlohmann::ordered_json meta;
    for (const auto& [k, v] : config_entries(spec)) meta["config." + k] = v;
    meta["norms.u0_c2alpha_used"] = num(norms.norm_u0_c2alpha);
    meta["norms.v0_c2alpha_used"] = num(norms.norm_v0_c2alpha);
    meta["derived.rho"] = num(dc->rho);
    meta["derived.sigma"] = num(dc->sigma);
    meta["derived.h1"] = num(dc->h1);
    meta["derived.h2"] = num(dc->h2);
    meta["derived.h3"] = num(dc->h3);
    meta["derived.h4"] = num(dc->h4);
    meta["derived.r_upper"] = num(dc->r_upper);
    meta["derived.chi_max"] = num(dc->chi_max);
    meta["derived.xi_max"] = num(dc->xi_max);
    meta["derived.schauder_p"] = dc->schauder_p ? num(*dc->schauder_p) : nlohmann::ordered_json(nullptr);
    meta["admissibility.label"] = std::string(AdmissibilityReport::label);
    meta["admissibility.chi_ok"] = adm.chi_ok;
    meta["admissibility.xi_ok"] = adm.xi_ok;
    meta["admissibility.chi_margin"] = num(adm.chi_margin);
    meta["admissibility.xi_margin"] = num(adm.xi_margin);
    meta["solver.blowup_threshold_used"] = num(ctl.step.blowup_threshold);
    meta["termination.reason"] = std::string(to_string(trace.termination));
    meta["termination.time"] = num(trace.termination_time);
    meta["termination.message"] = trace.message;
    meta["outcome"] = o.outcome;
    meta["verdict"] = std::string(to_string(bounds.verdict));
    meta["exit_status"] = o.exit_code;
    meta["records"] = trace.records.size();
    meta["snapshots_written"] = snap_written.size();
    meta["kernels"] = std::string(kernels::active().name);
    meta["generated_at"] = utc_timestamp();
    write_file(out_dir / "metadata.json", meta.dump(2) + "\n");

    o.bounds = bounds;
    o.trace = std::move(trace);
    write_file(out_dir / "bounds_report.txt", bounds_report_text(o, spec, *dc));
  } catch (const std::exception& e) {
    o.exit_code = kExitError;
    o.outcome = "error";
    o.message = e.what();
    o.trace.reset();
    o.bounds.reset();
  }
  return o;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const fs::path& out_dir) {
  if (spec.chi_values.empty() || spec.xi_values.empty())
    throw ConfigError("sweep needs non-empty chi and xi lists");
  const std::vector<double> chis = sorted_unique(spec.chi_values);
  const std::vector<double> xis = sorted_unique(spec.xi_values);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir.string());

  std::vector<SweepRow> rows(chis.size() * xis.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) {
      const std::size_t i = k / xis.size(), j = k % xis.size();
      RunSpec point = spec.base;
      point.model.chi = chis[i];
      point.model.xi = xis[j];
      const RunOutcome o = run_main(point, out_dir / ("point_" + std::to_string(i) + "_" + std::to_string(j)));
      SweepRow& row = rows[k];
      row.chi = chis[i];
      row.xi = xis[j];
      row.outcome = o.outcome;
      if (o.trace && !o.trace->records.empty()) {
        row.sup_u = o.trace->records.back().sup_u;
        row.sup_v = o.trace->records.back().sup_v;
        for (const NormRecord& r : o.trace->records) {
          row.max_c2proxy = std::max(row.max_c2proxy, r.c2proxy_u + r.c2proxy_v);
          if (r.picard_iters) row.picard_iters_max = std::max(row.picard_iters_max.value_or(0), *r.picard_iters);
        }
      } else {
        row.sup_u = row.sup_v = row.max_c2proxy = std::nan("");
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(spec.jobs, 1, rows.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }
  write_file(out_dir / "sweep.csv", sweep_csv(rows));
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "chi,xi,outcome,sup_u,sup_v,max_c2proxy,picard_iters_max\n";
  for (const SweepRow& r : rows) {
    out += format_double(r.chi) + "," + format_double(r.xi) + "," + r.outcome + "," + format_double(r.sup_u) +
           "," + format_double(r.sup_v) + "," + format_double(r.max_c2proxy) + ",";
    if (r.picard_iters_max) out += std::to_string(*r.picard_iters_max);
    out += "\n";
  }
  return out;
}

void print_constants(const RunSpec& spec, std::ostream& os) {
  const State s0 = build_initial_state(spec);
  const InitialDataNorms norms = resolve_norms(spec, s0);
  const DerivedConstants dc = derive_constants(spec.model, norms, spec.norms.schauder_p);
  const AdmissibilityReport adm = check_taxis_admissible(spec.model, dc);
  auto line = [&os](const char* k, double v) { os << k << " = " << format_double(v) << "\n"; };
  line("norm_u0_c2alpha", norms.norm_u0_c2alpha);
  line("norm_v0_c2alpha", norms.norm_v0_c2alpha);
  line("rho", dc.rho);
  line("sigma", dc.sigma);
  line("h1", dc.h1);
  line("h2", dc.h2);
  line("h3", dc.h3);
  line("h4", dc.h4);
  line("r_upper", dc.r_upper);
  line("chi_max", dc.chi_max);
  line("xi_max", dc.xi_max);
  if (dc.schauder_p) line("schauder_p", *dc.schauder_p);
  os << "admissibility = " << AdmissibilityReport::label << "\n";
  line("chi", spec.model.chi);
  os << "chi_ok = " << (adm.chi_ok ? "true" : "false") << "\n";
  line("chi_margin", adm.chi_margin);
  line("xi", spec.model.xi);
  os << "xi_ok = " << (adm.xi_ok ? "true" : "false") << "\n";
  line("xi_margin", adm.xi_margin);
  if (const auto eq = coexistence_equilibrium(spec.model)) {
    line("equilibrium_u", eq->u);
    line("equilibrium_v", eq->v);
  }
}

int run_twin_test(const RunSpec& spec, double delta, std::ostream& os) {
  const State s0 = build_initial_state(spec);
  const InitialDataNorms norms = resolve_norms(spec, s0);
  const DerivedConstants dc = derive_constants(spec.model, norms, spec.norms.schauder_p);
  TwinTestOptions opts;
  opts.solver = spec.solver.kind;
  opts.record_stride = spec.observe.stride;
  const GrowthReport rep = gronwall_twin_test(s0, delta, spec.model, dc, make_control(spec, dc), opts);

  os << "delta = " << format_double(rep.delta) << "\n";
  os << "solver = " << to_string(spec.solver.kind) << "\n";
  os << "inconclusive = " << (rep.inconclusive ? "true" : "false") << "\n";
  if (!rep.note.empty()) os << "note = " << rep.note << "\n";
  os << "identical = " << (rep.identical ? "true" : "false") << "\n";
  if (rep.lambda) os << "lambda = " << format_double(*rep.lambda) << "\n";
  os << "envelope_ok = " << (rep.envelope_ok ? "true" : "false") << "\n";
  os << "max_second_diff_rate = " << format_double(rep.max_second_diff_rate) << "\n";
  os << "superexponential_free = " << (rep.superexponential_free ? "true" : "false") << "\n";
  os << "gradient_coefficient = " << format_double(rep.gradient_coefficient) << " (reported only)\n";
  os << "t,energy\n";
  for (std::size_t k = 0; k < rep.times.size(); ++k)
    os << format_double(rep.times[k]) << "," << format_double(rep.energies[k]) << "\n";

  if (rep.inconclusive) return rep.note.find("blowup") != std::string::npos ? kExitBlowup : kExitError;
  return rep.envelope_ok && rep.superexponential_free ? kExitOk : kExitViolation;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError(what + ": empty list entry");
    const std::string tok = item.substr(b, e - b + 1);
    double x = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(x))
      throw ConfigError(what + ": not a number: '" + tok + "'");
    out.push_back(x);
  }
  if (out.empty()) throw ConfigError(what + ": list is empty");
  return out;
}

}  // namespace pptaxis
