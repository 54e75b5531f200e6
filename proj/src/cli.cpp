#include "degen/cli.hpp"

#include "degen/errors.hpp"
#include "degen/examples.hpp"
#include "degen/io.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace degen {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("L schedule: '" + s + "' is not a number");
}

void need(const std::string& value, const char* flag, const std::string& command) {
  if (value.empty()) throw ValidationError(command + " requires " + flag);
}

void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out_path.empty())
    out << text;
  else
    write_text_file(cfg.out_path, text);
}

StratumKey parse_center(const ModelData& model, const std::string& text) {
  StratumKey key;
  auto hash = text.find('#');
  std::string ids = text.substr(0, hash);
  if (hash != std::string::npos) key.label = text.substr(hash + 1);
  for (const auto& id : split(ids, ',')) {
    if (id.empty()) continue;
    if (model.vertical_index(id))
      key.verticals.push_back(id);
    else if (model.horizontal_index(id))
      key.horizontals.push_back(id);
    else
      throw ValidationError("--center names unknown component '" + id + "'");
  }
  return canonical_key(model, key);
}

std::string compact(const Json& j) { return j.dump(); }

std::string convergence_csv(const RunConfig& cfg, const LocalChart& chart, const FaceFunction& f,
                            const ConvergenceRun& run, const std::vector<std::pair<double, double>>& mc, bool with_fit) {
  std::ostringstream os;
  os << "# command: " << cfg.command << "\n";
  os << "# chart: " << compact(chart_to_json(chart)) << "\n";
  os << "# testfn: " << compact(face_function_to_json(f)) << "\n";
  os << "# L:";
  for (double L : run.L_values) os << " " << format_double(L);
  os << "\n";
  os << "# probe: " << (cfg.probe ? "true" : "false") << "\n";
  if (!mc.empty())
    os << "# mc: seed=" << *cfg.seed << " samples=" << *cfg.samples << " workers=" << cfg.workers
       << " t_abs=exp(-L)\n";
  os << "L,integral,limit_estimate,kappa_hat,d_hat,log_unscaled_mass";
  if (!mc.empty()) os << ",mc,mc_stderr";
  os << "\n";
  for (std::size_t i = 0; i < run.L_values.size(); ++i) {
    os << format_double(run.L_values[i]) << "," << format_double(run.integrals[i]) << ","
       << format_double(run.limit_estimate) << ",";
    if (with_fit) os << format_double(run.fit->kappa_hat) << "," << format_double(run.fit->d_hat);
    else os << ",";
    const auto& u = run.unscaled[i];
    os << "," << (u.sign == 0 ? std::string("-inf") : format_double(u.log_abs));
    if (!mc.empty()) os << "," << format_double(mc[i].first) << "," << format_double(mc[i].second);
    os << "\n";
  }
  if (with_fit)
    os << "# fit: kappa_hat=" << format_double(run.fit->kappa_hat) << " d_hat=" << format_double(run.fit->d_hat)
       << " growth_rate=" << format_double(run.fit->growth_rate) << " residual_rms="
       << format_double(run.fit->residual_rms) << "\n";
  return os.str();
}

std::vector<std::pair<double, double>> mc_columns(const RunConfig& cfg, const LocalChart& chart, const FaceFunction& f,
                                                  const std::vector<double>& Ls) {
  std::vector<std::pair<double, double>> mc;
  if (!cfg.samples) return mc;
  for (double L : Ls) {
    auto est = direct_fiber_mass_mc(chart, f, std::exp(-L), *cfg.samples, *cfg.seed, cfg.workers);
    mc.emplace_back(est.mean, est.stderr_);
  }
  return mc;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  need(cfg.model_path, "--model", "check");
  auto model = model_from_json(read_json_file(cfg.model_path));
  build_complex(model);
  auto report = check_sub_log_canonical(model);
  std::ostringstream os;
  os << "model: " << model.name << "\n";
  os << "sub-log-canonical: " << (report.ok ? "yes" : "no") << "\n";
  if (!report.ok) {
    os << "offending:";
    for (const auto& id : report.offending) os << " " << id << " (beta=" << to_string(model.horizontal(id).beta) << ")";
    os << "\n";
  }
  emit(cfg, out, os.str());
  return report.ok ? kOk : kNonSubLc;
}

int cmd_weights(const RunConfig& cfg, std::ostream& out) {
  need(cfg.model_path, "--model", "weights");
  auto model = model_from_json(read_json_file(cfg.model_path));
  auto cx = build_complex(model);
  emit(cfg, out, profile_to_json(weight_profile(model, cx)).dump(2) + "\n");
  return kOk;
}

int cmd_limit(const RunConfig& cfg, std::ostream& out) {
  need(cfg.model_path, "--model", "limit");
  need(cfg.masses_path, "--masses", "limit");
  auto model = model_from_json(read_json_file(cfg.model_path));
  auto cx = build_complex(model);
  auto profile = weight_profile(model, cx);
  auto measure = build_limit_measure(profile, cx, masses_from_json(read_json_file(cfg.masses_path)));
  Json doc = measure_to_json(measure);
  if (!cfg.testfn_path.empty()) {
    auto f = test_function_from_json(read_json_file(cfg.testfn_path), cx);
    doc["integral"] = integrate_limit(measure, f);
  }
  emit(cfg, out, doc.dump(2) + "\n");
  return kOk;
}

int cmd_converge(const RunConfig& cfg, std::ostream& out, bool fit) {
  need(cfg.chart_path, "--chart", cfg.command);
  need(cfg.testfn_path, "--testfn", cfg.command);
  if (!cfg.L_schedule) throw ValidationError(cfg.command + " requires --L");
  auto Ls = parse_L_schedule(*cfg.L_schedule);
  auto chart = chart_from_json(read_json_file(cfg.chart_path));
  auto f = face_function_from_json(read_json_file(cfg.testfn_path), chart_face(chart).coordinate_ids());
  ReducedOptions opts;
  opts.allow_non_sublc = cfg.probe;
  auto run = convergence_run(chart, f, Ls, opts);
  if (fit && !run.fit) {
    std::vector<MassSample> pts;
    for (std::size_t i = 0; i < Ls.size(); ++i) pts.push_back({Ls[i], run.unscaled[i].log_abs});
    run.fit = fit_exponents(pts, ModelForm::FiberMass);  // throws with the reason
  }
  auto mc = mc_columns(cfg, chart, f, Ls);
  emit(cfg, out, convergence_csv(cfg, chart, f, run, mc, fit));
  return kOk;
}

int cmd_blowup(const RunConfig& cfg, std::ostream& out) {
  need(cfg.model_path, "--model", "blowup");
  need(cfg.center, "--center", "blowup");
  auto model = model_from_json(read_json_file(cfg.model_path));
  auto center = parse_center(model, cfg.center);
  BlowupResult res;
  if (cfg.point_codim > 0) {
    res = blowup_at_point(model, center, cfg.point_codim);
  } else {
    res = blowup_at_stratum(model, center);
  }
  Json map_doc{{"record", record_to_json(res.record)}, {"retraction", retraction_to_json(res.retraction)}};
  if (cfg.out_path.empty()) {
    Json doc{{"model", model_to_json(res.model)}, {"record", map_doc["record"]}, {"retraction", map_doc["retraction"]}};
    out << doc.dump(2) << "\n";
  } else {
    std::filesystem::create_directories(cfg.out_path);
    write_text_file(std::filesystem::path(cfg.out_path) / "model.json", model_to_json(res.model).dump(2) + "\n");
    write_text_file(std::filesystem::path(cfg.out_path) / "map.json", map_doc.dump(2) + "\n");
  }
  return kOk;
}

int cmd_demo(const RunConfig& cfg, std::ostream& out) {
  need(cfg.example, "an example name", "demo");
  const auto& ex = builtin_example(cfg.example);
  auto Ls = parse_L_schedule(cfg.L_schedule.value_or("1,10,100,1000,10000"));
  auto cx = build_complex(ex.model);
  auto profile = weight_profile(ex.model, cx);
  auto measure = build_limit_measure(profile, cx, ex.masses);
  TestFunction f(cx, ex.test_function);
  std::ostringstream os;
  os << "# demo: " << ex.name << " (" << ex.description << ")\n";
  os << "kappa_min=" << to_string(profile.kappa_min) << "\n";
  os << "d=" << profile.d << "\n";
  os << "essential_faces=";
  bool first = true;
  for (const auto& k : profile.essential_faces) {
    os << (first ? "" : " ") << to_string(k);
    first = false;
  }
  os << "\n";
  os << "limit_integral=" << format_double(integrate_limit(measure, f)) << "\n";
  RunConfig sub = cfg;
  sub.command = "demo " + ex.name;
  for (const auto& ch : ex.charts) {
    os << "# chart on " << to_string(ch.face) << "\n";
    auto run = convergence_run(ch.chart, ch.f, Ls);
    os << convergence_csv(sub, ch.chart, ch.f, run, mc_columns(cfg, ch.chart, ch.f, Ls), run.fit.has_value());
  }
  emit(cfg, out, os.str());
  return kOk;
}

}  // namespace

std::vector<double> parse_L_schedule(std::string_view text) {
  std::vector<double> Ls;
  if (text.find(':') != std::string_view::npos) {
    auto parts = split(text, ':');
    if (parts.size() != 3) throw ValidationError("geometric L schedule must read a:b:n");
    double a = parse_double(parts[0]), b = parse_double(parts[1]);
    int n = static_cast<int>(parse_double(parts[2]));
    if (!(a > 0) || !(b > a) || n < 2) throw ValidationError("geometric L schedule needs 0 < a < b and n >= 2");
    for (int i = 0; i < n; ++i) Ls.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
    Ls.back() = b;
  } else {
    for (const auto& s : split(text, ','))
      if (!s.empty()) Ls.push_back(parse_double(s));
  }
  if (Ls.empty()) throw ValidationError("L schedule is empty");
  for (std::size_t i = 0; i < Ls.size(); ++i) {
    if (!(Ls[i] > 0) || !std::isfinite(Ls[i])) throw ValidationError("L values must be positive and finite");
    if (i && !(Ls[i] > Ls[i - 1])) throw ValidationError("L schedule must be strictly increasing");
  }
  return Ls;
}

std::string csv_columns_help() {
  return "Convergence CSV columns (converge, fit, demo):\n"
         "  L                  log|t|^-1\n"
         "  integral           scaled mass I(L) = mu_t(f o Log) / (|t|^{2 kappa_min} (2 pi L)^d)\n"
         "  limit_estimate     limit of I(L) from the residue formula (nan if beta > 1)\n"
         "  kappa_hat, d_hat   fitted exponents of the unscaled mass (fit, and demo when the schedule allows a fit)\n"
         "  log_unscaled_mass  natural log of mu_t(f o Log)\n"
         "  mc, mc_stderr      Monte Carlo estimate of I(L) at t = e^-L (with --seed/--samples)\n"
         "Lines starting with # echo the configuration.\n"
         "Exit codes: 0 ok, 2 invalid input, 3 not sub-log-canonical, 4 numerical tolerance not met.\n";
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.seed.has_value() != cfg.samples.has_value())
      throw ValidationError("--seed and --samples must be given together");
    if (cfg.samples && *cfg.samples == 0) throw ValidationError("--samples must be positive");
    if (cfg.command == "check") return cmd_check(cfg, out);
    if (cfg.command == "weights") return cmd_weights(cfg, out);
    if (cfg.command == "limit") return cmd_limit(cfg, out);
    if (cfg.command == "converge") return cmd_converge(cfg, out, false);
    if (cfg.command == "fit") return cmd_converge(cfg, out, true);
    if (cfg.command == "blowup") return cmd_blowup(cfg, out);
    if (cfg.command == "demo") return cmd_demo(cfg, out);
    throw ValidationError("unknown command '" + cfg.command + "'");
  } catch (const NonSubLogCanonical& e) {
    err << "error: " << e.what() << "\n";
    return kNonSubLc;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
}

}  // namespace degen
